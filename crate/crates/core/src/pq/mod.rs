//! Product quantization: 256-centroid codebooks per subspace, byte codes,
//! and lookup-table distances between raw queries and coded points.

mod codebook;
mod kmeans;
mod table;

pub use codebook::{compress, subspace_sizes, CompressedVectors, PqCodebook, CENTROIDS};
pub use kmeans::{train_codebook, TrainReport, DEFAULT_ITERS};
pub(crate) use table::lookup_sum;
pub use table::{asymmetric_distance, asymmetric_distances, build_pq_dist_table, PqDistTable};
