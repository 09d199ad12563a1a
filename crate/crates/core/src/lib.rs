//! Exact-arithmetic laboratory for stability of the Brunn-Minkowski inequality
//! on lattice simple sets.
//!
//! Everything measured here is a [`Rational`]: volumes of cell sets, their
//! Minkowski combinations, hulls, cone and half-space measures. Floating point
//! appears only inside searches, and every search result is re-certified exactly.

pub mod deficits;
pub mod error;
pub mod families;
pub mod geom;
pub mod oracle;
pub mod partition;
pub mod rational;

pub use error::{Error, Result};
pub use geom::{CellSet, ConeFrame, GridSpec, HalfSpace, Polytope, Simplex, Weight};
pub use rational::Rational;
