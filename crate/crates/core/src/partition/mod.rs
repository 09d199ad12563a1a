//! Constructive partition machinery: balancing, subdivision, the recursive
//! partition process, subset matching and Steiner symmetrization.

pub mod balance;
pub mod central;
pub mod process;
pub mod steiner;
pub mod subset;
pub mod sublinear;

pub use balance::{balanced_hyperplane, cone_measures, kkm_cone_translate, kkm_residual, pencil_halfspace, Anchor, BalanceResult, BisectOptions, KkmOptions, Witness};
pub use central::{central_point, subdivide_simplex, CentralPoint};
pub use process::{linear_partition_process, Category, PartitionNode, PartitionOptions, PartitionTree};
pub use steiner::{slice_counts, steiner_symmetrize};
pub use subset::{subset_match, subset_match_with_tau};
pub use sublinear::{sublinearity_check, SublinearityReport};
