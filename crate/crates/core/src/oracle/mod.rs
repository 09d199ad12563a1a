//! Second computation path for the kernel's exact quantities.

pub mod bracket;
pub mod brute_hull;
pub mod crosscheck;
pub mod sweep;

pub use bracket::{region_bracket, simplex_facets};
pub use brute_hull::brute_hull_volume;
pub use crosscheck::{crosscheck_instance, crosscheck_with, probe_simplex, CrossRow, CrosscheckReport, Verdict};
pub use sweep::{minkowski_direct_boxes, sweep_union_volume, BoxList, DEFAULT_PAIR_CAP};
