//! Batched best-first search over the graph index.
//!
//! A query is a [`QueryState`] that is advanced one candidate at a time:
//! the caller supplies the neighbour list of the current candidate (fetched
//! from wherever the graph lives), and the state filters, scores, picks the
//! next candidate eagerly, and then folds the new neighbours into its
//! worklist. [`search_local`] drives whole batches when the graph is in
//! reach; a pipelined driver can interleave the same steps with remote
//! neighbour fetches.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::bloom::DEFAULT_BLOOM_ENTRIES;
use crate::error::{invalid, Error, Result};
use crate::pq::{lookup_sum, CompressedVectors};
use crate::vectors::{squared_l2, Dense};

mod local;
mod query;
mod reference;
mod rerank;

pub use local::{check_inputs, search_local, search_one, PqData};
pub use query::{compute_neighbour_distances, eager_next_candidate, filter_neighbours, QueryState};
pub use reference::{greedy_search_reference, ReferenceResult};
pub use rerank::{rerank, Reranked};

pub const DEFAULT_K: usize = 10;
pub const DEFAULT_WORKLIST: usize = 152;
pub const DEFAULT_BATCH: usize = 10_000;

/// Where neighbours and distances come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SearchMode {
    /// Graph and full vectors behind a request/response queue pair; PQ
    /// distances during the walk, exact re-ranking at the end.
    Pipelined,
    /// Same arithmetic as `Pipelined`, graph read directly.
    InMemory,
    /// Exact distances throughout; no distance table, no re-ranking.
    ExactDistance,
}

impl SearchMode {
    pub const ALL: [SearchMode; 3] = [
        SearchMode::Pipelined,
        SearchMode::InMemory,
        SearchMode::ExactDistance,
    ];

    pub fn uses_pq(self) -> bool {
        !matches!(self, SearchMode::ExactDistance)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SearchMode::Pipelined => "pipelined",
            SearchMode::InMemory => "in_memory",
            SearchMode::ExactDistance => "exact_distance",
        }
    }
}

impl fmt::Display for SearchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SearchMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pipelined" => Ok(SearchMode::Pipelined),
            "in_memory" | "in-memory" => Ok(SearchMode::InMemory),
            "exact_distance" | "exact-distance" => Ok(SearchMode::ExactDistance),
            other => Err(invalid!("unknown search mode `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchParams {
    /// Neighbours returned per query.
    pub k: usize,
    /// Worklist size; must be at least `k`.
    pub t: usize,
    pub mode: SearchMode,
    /// Bloom filter cells per query.
    pub bloom_entries: usize,
    /// Queries per batch (one distance table per batch).
    pub batch_size: usize,
    /// Exact re-ranking of the visited candidates (PQ modes only).
    pub rerank: bool,
}

impl Default for SearchParams {
    fn default() -> Self {
        Self {
            k: DEFAULT_K,
            t: DEFAULT_WORKLIST,
            mode: SearchMode::Pipelined,
            bloom_entries: DEFAULT_BLOOM_ENTRIES,
            batch_size: DEFAULT_BATCH,
            rerank: true,
        }
    }
}

impl SearchParams {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(invalid!("k must be positive"));
        }
        if self.t < self.k {
            return Err(invalid!(
                "worklist size t = {} is below k = {}",
                self.t,
                self.k
            ));
        }
        if self.bloom_entries == 0 {
            return Err(invalid!("bloom filter needs at least one entry"));
        }
        if self.batch_size == 0 {
            return Err(invalid!("batch size must be positive"));
        }
        Ok(())
    }
}

/// Per-query output.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryResult {
    /// Up to `k` ids, nearest first.
    pub ids: Vec<u32>,
    /// Squared distances matching `ids`: exact after re-ranking or in exact
    /// mode, PQ estimates otherwise.
    pub dists: Vec<f32>,
    /// Candidates expanded before convergence.
    pub iterations: u32,
    pub converged: bool,
    /// Fewer than `k` candidates were available.
    pub short: bool,
}

/// Distance from the current query to a node.
pub trait QueryDistance {
    fn distance(&self, id: u32) -> f32;
}

/// Lookup-table distance for one query.
#[derive(Clone, Copy)]
pub struct PqQueryDistance<'a> {
    codes: &'a CompressedVectors,
    block: &'a [f32],
}

impl<'a> PqQueryDistance<'a> {
    /// `block` is the query's `m × 256` slice of the distance table.
    pub fn new(codes: &'a CompressedVectors, block: &'a [f32]) -> Self {
        Self { codes, block }
    }
}

impl QueryDistance for PqQueryDistance<'_> {
    #[inline]
    fn distance(&self, id: u32) -> f32 {
        lookup_sum(self.codes.code(id), self.block)
    }
}

/// Exact squared Euclidean distance for one query.
#[derive(Clone, Copy)]
pub struct ExactQueryDistance<'a> {
    base: &'a Dense<'a>,
    query: &'a [f32],
}

impl<'a> ExactQueryDistance<'a> {
    pub fn new(base: &'a Dense<'a>, query: &'a [f32]) -> Self {
        Self { base, query }
    }
}

impl QueryDistance for ExactQueryDistance<'_> {
    #[inline]
    fn distance(&self, id: u32) -> f32 {
        squared_l2(self.base.row(id as usize), self.query)
    }
}

impl<F: Fn(u32) -> f32> QueryDistance for F {
    fn distance(&self, id: u32) -> f32 {
        self(id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_require_t_at_least_k() {
        let mut p = SearchParams::default();
        assert!(p.validate().is_ok());
        p.t = 10;
        p.k = 10;
        assert!(p.validate().is_ok());
        p.t = 9;
        assert!(p.validate().is_err());
    }

    #[test]
    fn mode_names_round_trip() {
        for m in SearchMode::ALL {
            assert_eq!(m.as_str().parse::<SearchMode>().unwrap(), m);
        }
        assert!("gpu".parse::<SearchMode>().is_err());
    }
}
