//! Twelve-node, two-dimensional worked example with one PQ subspace.
//!
//! Node `i` sits at `QUERY + OFFSETS[i]`, so its squared distance to the
//! query is an integer. Each node's centroid coincides with the node except
//! node 5, whose centroid (cluster 11) is slightly closer to the query than
//! the node itself (2113 vs ~2133).

use pqgraph_core::pq::{CompressedVectors, PqCodebook, CENTROIDS};
use pqgraph_core::{Dense, GraphIndex, VectorStore};

pub const QUERY: [f32; 2] = [82.0, 53.0];

/// Cluster id of each node.
pub const CLUSTER: [u8; 12] = [6, 9, 7, 8, 1, 11, 0, 2, 4, 5, 3, 10];

/// Squared distance from the query to each node's centroid.
pub const PQ_DIST: [f32; 12] = [
    6273.0, 3893.0, 3233.0, 3433.0, 3973.0, 2113.0, 1033.0, 1853.0, 433.0, 673.0, 73.0, 593.0,
];

/// Squared distance from the query to each node.
pub const EXACT_DIST: [f32; 12] = [
    6273.0, 3893.0, 3233.0, 3433.0, 3973.0, 2133.0, 1033.0, 1853.0, 433.0, 673.0, 73.0, 593.0,
];

const OFFSETS: [[f32; 2]; 12] = [
    [-72.0, -33.0],
    [62.0, -7.0],
    [-52.0, 23.0],
    [52.0, 27.0],
    [-63.0, 2.0],
    [32.0, -33.0], // centroid of cluster 11; node 5 itself is scaled out
    [-32.0, -3.0],
    [-43.0, 2.0],
    [-17.0, 12.0],
    [23.0, 12.0],
    [8.0, -3.0],
    [23.0, -8.0],
];

pub const MEDOID: u32 = 6;
pub const DEGREE: usize = 3;
pub const WORKLIST: usize = 8;

/// Candidate order of a k = 2, t = 8 search from the medoid.
pub const VISIT_ORDER: [u32; 8] = [6, 8, 7, 2, 5, 9, 11, 10];
/// Visited candidates sorted by exact distance.
pub const RERANKED: [u32; 8] = [10, 8, 11, 9, 6, 7, 5, 2];

pub fn adjacency() -> Vec<Vec<u32>> {
    vec![
        vec![8, 1],     // 0
        vec![5, 0],     // 1
        vec![5, 3, 7],  // 2
        vec![2, 4],     // 3
        vec![7, 3],     // 4
        vec![9, 1, 2],  // 5
        vec![8, 7, 2],  // 6
        vec![8, 2, 4],  // 7
        vec![6, 0],     // 8
        vec![11, 5],    // 9
        vec![11, 9, 8], // 10
        vec![10, 9],    // 11
    ]
}

pub fn graph() -> GraphIndex {
    GraphIndex::new(DEGREE, MEDOID, adjacency()).unwrap()
}

fn node_vector(i: usize) -> [f32; 2] {
    let [dx, dy] = OFFSETS[i];
    let scale = if i == 5 {
        (2133.0f64 / 2113.0).sqrt() as f32
    } else {
        1.0
    };
    [QUERY[0] + dx * scale, QUERY[1] + dy * scale]
}

pub fn base() -> VectorStore {
    VectorStore::from_f32(2, (0..12).flat_map(node_vector).collect()).unwrap()
}

pub fn queries() -> VectorStore {
    VectorStore::from_f32(2, QUERY.to_vec()).unwrap()
}

pub fn dense_query() -> Dense<'static> {
    Dense::new(2, QUERY.to_vec()).unwrap()
}

/// Clusters 0..12 hold the node centroids; the unused slots sit far away.
pub fn codebook() -> PqCodebook {
    let mut table = vec![0.0f32; CENTROIDS * 2];
    for c in 0..CENTROIDS {
        let v = [1000.0 + c as f32, 1000.0];
        table[c * 2..c * 2 + 2].copy_from_slice(&v);
    }
    for (node, &c) in CLUSTER.iter().enumerate() {
        let [dx, dy] = OFFSETS[node];
        let c = c as usize;
        table[c * 2..c * 2 + 2].copy_from_slice(&[QUERY[0] + dx, QUERY[1] + dy]);
    }
    PqCodebook::new(2, vec![2], vec![table]).unwrap()
}

pub fn codes() -> CompressedVectors {
    CompressedVectors::new(1, CLUSTER.to_vec()).unwrap()
}
