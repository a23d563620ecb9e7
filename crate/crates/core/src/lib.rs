//! Kernels for phased, batched greedy search over a proximity graph with
//! product-quantized vectors.
//!
//! The crate is `no_std` (it needs `alloc`). Enabling the `parallel` feature
//! pulls in `std` and `rayon` and spreads the query-, point- and
//! centroid-level loops over a thread pool; results are identical either way.
//!
//! Layout:
//! - [`vectors`], [`graph`], [`ground_truth`]: in-memory data model.
//! - [`pq`]: codebook training, compression, distance tables, asymmetric distance.
//! - [`build`]: Vamana-style graph construction.
//! - [`bloom`], [`merge`], [`worklist`], [`search`]: the per-query search machinery.
//! - [`eval`]: exact k-NN oracle and the recall / iteration metrics.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod bloom;
pub mod build;
mod error;
pub mod eval;
pub mod graph;
pub mod ground_truth;
pub mod merge;
mod par;
pub mod pq;
pub mod search;
pub mod vectors;
pub mod worklist;

pub use error::{Error, Result};
pub use graph::GraphIndex;
pub use ground_truth::GroundTruth;
pub use merge::Neighbour;
pub use vectors::{squared_l2, Dense, ScalarKind, VectorStore};
