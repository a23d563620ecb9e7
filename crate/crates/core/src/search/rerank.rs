use alloc::vec::Vec;

use crate::merge::{parallel_merge_sort, Neighbour};
use crate::vectors::squared_l2;

#[derive(Debug, Clone, PartialEq)]
pub struct Reranked {
    pub ids: Vec<u32>,
    /// Exact squared distances.
    pub dists: Vec<f32>,
    /// Fewer than `k` candidates were supplied.
    pub short: bool,
}

/// Scores every candidate with its full-precision vector and keeps the `k`
/// nearest by `(dist, id)`. `vector(i)` is the vector of `candidates[i]`.
pub fn rerank<'v>(
    candidates: &[u32],
    vector: impl Fn(usize) -> &'v [f32],
    query: &[f32],
    k: usize,
) -> Reranked {
    let mut scored: Vec<Neighbour> = candidates
        .iter()
        .enumerate()
        .map(|(i, &id)| Neighbour::new(id, squared_l2(vector(i), query)))
        .collect();
    parallel_merge_sort(&mut scored);
    let short = scored.len() < k;
    scored.truncate(k);
    Reranked {
        ids: scored.iter().map(|n| n.id).collect(),
        dists: scored.iter().map(|n| n.dist).collect(),
        short,
    }
}
