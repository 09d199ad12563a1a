pub mod cell;
pub mod cone;
pub mod hull;
pub mod measure;
pub mod minkowski;
pub mod polytope;

pub use cell::{Cell, CellSet, GridSpec, Weight};
pub use cone::ConeFrame;
pub use measure::{measure_in_halfspaces, overlap_volume, region_measure, symdiff_volume};
pub use minkowski::{minkowski_combine, minkowski_volume};
pub use polytope::{clip_polytope, convex_hull, diameter_sq, polytope_volume, HalfSpace, Polytope, Simplex};
