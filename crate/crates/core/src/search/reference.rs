use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::graph::GraphIndex;
use crate::vectors::{squared_l2, Dense};

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceResult {
    pub ids: Vec<u32>,
    pub dists: Vec<f32>,
    /// Candidates in the order they were expanded.
    pub visit_order: Vec<u32>,
}

/// Plain sequential best-first search with exact distances and an exact
/// visited set. Kept deliberately simple so it can serve as an oracle for
/// the batched engine.
pub fn greedy_search_reference(
    graph: &GraphIndex,
    base: &Dense<'_>,
    query: &[f32],
    k: usize,
    t: usize,
) -> ReferenceResult {
    let dist = |id: u32| squared_l2(base.row(id as usize), query);
    let start = graph.medoid();
    let mut list: Vec<(f32, u32)> = alloc::vec![(dist(start), start)];
    let mut visited = BTreeSet::new();
    let mut visit_order = Vec::new();

    while let Some(&(_, u)) = list.iter().find(|(_, id)| !visited.contains(id)) {
        visited.insert(u);
        visit_order.push(u);
        for &n in graph.neighbours(u) {
            if !list.iter().any(|&(_, id)| id == n) {
                list.push((dist(n), n));
            }
        }
        list.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        list.truncate(t);
    }

    list.truncate(k);
    ReferenceResult {
        ids: list.iter().map(|&(_, id)| id).collect(),
        dists: list.iter().map(|&(d, _)| d).collect(),
        visit_order,
    }
}
