use alloc::vec::Vec;
use core::cmp::Ordering;

use super::{QueryDistance, QueryResult};
use crate::bloom::{BloomFilter, VisitedSet};
use crate::merge::{parallel_merge_sort_with, rank_cmp, Neighbour};
use crate::worklist::Worklist;

/// Drops ids the filter has already seen, preserving order, and records the
/// survivors (test-and-set, so a repeated id survives only once).
pub fn filter_neighbours<V: VisitedSet>(visited: &mut V, neighbours: &[u32], out: &mut Vec<u32>) {
    out.clear();
    out.extend(
        neighbours
            .iter()
            .copied()
            .filter(|&n| !visited.test_and_set(n)),
    );
}

/// Pairs each id with its distance to the query.
pub fn compute_neighbour_distances<D: QueryDistance + ?Sized>(
    ids: &[u32],
    dist: &D,
    out: &mut Vec<Neighbour>,
) {
    out.clear();
    out.extend(ids.iter().map(|&id| Neighbour::new(id, dist.distance(id))));
}

/// Picks the next candidate before the new neighbours are sorted and merged.
///
/// Considers the nearest new neighbour, provided it would survive the
/// worklist truncation, and the first unvisited worklist entry, and returns
/// the better one by `(dist, id)`. This is exactly the first unvisited entry
/// of the worklist after [`Worklist::update`] with the same neighbours.
pub fn eager_next_candidate(worklist: &Worklist, new: &[Neighbour]) -> Option<Neighbour> {
    let from_new = new
        .iter()
        .copied()
        .min_by(rank_cmp)
        .filter(|n| worklist.admits(n));
    let from_list = worklist
        .first_unvisited()
        .map(|e| Neighbour::new(e.id, e.dist));
    match (from_new, from_list) {
        (Some(a), Some(b)) => Some(if rank_cmp(&a, &b) == Ordering::Less {
            a
        } else {
            b
        }),
        (a, b) => a.or(b),
    }
}

/// Search state of one query.
#[derive(Debug, Clone)]
pub struct QueryState<V = BloomFilter> {
    query: usize,
    worklist: Worklist,
    visited: V,
    candidate: Option<u32>,
    visited_log: Vec<u32>,
    converged: bool,
    discovered: usize,
    evictions: usize,
    filtered: Vec<u32>,
    pending: Vec<Neighbour>,
    scratch: Vec<Neighbour>,
}

impl<V: VisitedSet> QueryState<V> {
    /// Starts at `entry` with worklist size `t`.
    pub fn new(query: usize, entry: u32, entry_dist: f32, t: usize, mut visited: V) -> Self {
        visited.insert(entry);
        Self {
            query,
            worklist: Worklist::with_entry(t, entry, entry_dist),
            visited,
            candidate: Some(entry),
            visited_log: Vec::new(),
            converged: false,
            discovered: 1,
            evictions: 0,
            filtered: Vec::new(),
            pending: Vec::new(),
            scratch: Vec::new(),
        }
    }

    pub fn query(&self) -> usize {
        self.query
    }

    /// Node whose neighbours are needed next; `None` once converged.
    pub fn candidate(&self) -> Option<u32> {
        self.candidate
    }

    pub fn is_converged(&self) -> bool {
        self.converged
    }

    pub fn worklist(&self) -> &Worklist {
        &self.worklist
    }

    /// Expanded candidates, in order.
    pub fn visited_log(&self) -> &[u32] {
        &self.visited_log
    }

    pub fn iterations(&self) -> u32 {
        self.visited_log.len() as u32
    }

    /// Distinct nodes that passed the filter, including the entry point.
    pub fn discovered(&self) -> usize {
        self.discovered
    }

    /// Worklist entries dropped by truncation so far.
    pub fn evictions(&self) -> usize {
        self.evictions
    }

    /// First half of an iteration: consumes the neighbours of the current
    /// candidate, marks it visited, filters and scores the neighbours, and
    /// returns the next candidate so its neighbours can be requested while
    /// [`settle`](Self::settle) runs.
    ///
    /// # Panics
    /// If the query has already converged.
    pub fn expand<D: QueryDistance + ?Sized>(
        &mut self,
        neighbours: &[u32],
        dist: &D,
    ) -> Option<u32> {
        let u = self.candidate.expect("expand called on a converged query");
        let present = self.worklist.mark_visited(u);
        debug_assert!(present, "candidate {u} missing from worklist");
        self.visited_log.push(u);

        filter_neighbours(&mut self.visited, neighbours, &mut self.filtered);
        self.discovered += self.filtered.len();
        compute_neighbour_distances(&self.filtered, dist, &mut self.pending);
        self.candidate = eager_next_candidate(&self.worklist, &self.pending).map(|n| n.id);
        self.candidate
    }

    /// Second half of an iteration: sorts the new neighbours and merges them
    /// into the worklist.
    pub fn settle(&mut self) {
        parallel_merge_sort_with(&mut self.pending, &mut self.scratch);
        self.evictions += self.worklist.update(&self.pending);
        self.pending.clear();
        debug_assert!(
            self.eager_choice_holds(),
            "eager candidate diverged from worklist"
        );
        if self.candidate.is_none() {
            debug_assert!(self.worklist.all_visited());
            self.converged = true;
        }
    }

    /// One full iteration.
    pub fn step<D: QueryDistance + ?Sized>(&mut self, neighbours: &[u32], dist: &D) -> Option<u32> {
        self.expand(neighbours, dist);
        self.settle();
        self.candidate
    }

    /// Whether the pending candidate equals the first unvisited worklist entry.
    pub fn eager_choice_holds(&self) -> bool {
        self.worklist.first_unvisited().map(|e| e.id) == self.candidate
    }

    /// The `k` nearest worklist entries, without re-ranking.
    pub fn result(&self, k: usize) -> QueryResult {
        let top = self.worklist.top(k);
        QueryResult {
            ids: top.iter().map(|e| e.id).collect(),
            dists: top.iter().map(|e| e.dist).collect(),
            iterations: self.iterations(),
            converged: self.converged,
            short: top.len() < k,
        }
    }
}
