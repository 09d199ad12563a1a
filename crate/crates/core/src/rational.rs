//! Exact rational scalars and the small helpers the kernel needs around them.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// A point with rational coordinates; its length is the ambient dimension.
pub type Point = Vec<Rational>;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn from_i128(n: i128) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Formats as `num/den`, including integers (`3/1`) so every field parses the same way.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `p/q` or a bare integer `p`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Invalid(format!("cannot parse rational {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Huge numerators/denominators: scale through the bit lengths.
        let n = r.numer();
        let d = r.denom();
        let shift = n.bits().max(d.bits()).saturating_sub(1000) as usize;
        let n = (n >> shift).to_f64().unwrap_or(f64::NAN);
        let d = (d >> shift).to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

pub fn floor_i128(r: &Rational) -> Option<i128> {
    r.floor().to_integer().to_i128()
}

pub fn ceil_i128(r: &Rational) -> Option<i128> {
    r.ceil().to_integer().to_i128()
}

/// Rounds `x` to the nearest multiple of `1/2^bits` and returns it exactly.
pub fn dyadic(x: f64, bits: u32) -> Rational {
    let scale = (1u64 << bits) as f64;
    let n = (x * scale).round();
    let den = BigInt::one() << bits as usize;
    Rational::new(BigInt::from(n as i128), den)
}

/// Scales a rational vector to a primitive integer vector, returning the integer
/// vector and the positive factor it was multiplied by.
pub fn primitive_integer(v: &[Rational]) -> (Vec<BigInt>, Rational) {
    let mut l = BigInt::one();
    for x in v {
        l = l.lcm(x.denom());
    }
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Rational::from_integer(l.clone())).to_integer()).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return (ints, Rational::one());
    }
    let ints = ints.into_iter().map(|x| x / &g).collect();
    (ints, Rational::new(l, g.abs()))
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

pub fn dist_sq(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| {
        let d = x - y;
        acc + &d * &d
    })
}

pub fn sub(a: &[Rational], b: &[Rational]) -> Point {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[Rational], b: &[Rational]) -> Point {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[Rational], s: &Rational) -> Point {
    a.iter().map(|x| x * s).collect()
}

pub fn point(coords: &[(i64, i64)]) -> Point {
    coords.iter().map(|&(n, d)| rat(n, d)).collect()
}

pub fn ipoint(coords: &[i64]) -> Point {
    coords.iter().map(|&n| int(n)).collect()
}

pub fn is_negative(r: &Rational) -> bool {
    r.is_negative()
}

/// `n!` as a rational, for simplex volumes.
pub fn factorial(n: usize) -> Rational {
    (1..=n as i64).fold(Rational::one(), |acc, k| acc * int(k))
}
