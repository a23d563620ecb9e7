//! Query-to-centroid distance tables and asymmetric distance.

use alloc::vec;
use alloc::vec::Vec;

use super::codebook::{CompressedVectors, PqCodebook, CENTROIDS};
use crate::error::{malformed, Result};
use crate::par;
use crate::vectors::{squared_l2_sequential, Dense};

/// `rho × m × 256` squared distances, laid out as `table[q][s][c]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PqDistTable {
    rho: usize,
    m: usize,
    table: Vec<f32>,
}

impl PqDistTable {
    pub fn from_raw(rho: usize, m: usize, table: Vec<f32>) -> Result<Self> {
        if table.len() != rho * m * CENTROIDS {
            return Err(malformed!(
                "distance table of {} values, expected {rho} x {m} x {CENTROIDS}",
                table.len()
            ));
        }
        Ok(Self { rho, m, table })
    }

    /// Batch size.
    pub fn rho(&self) -> usize {
        self.rho
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn as_slice(&self) -> &[f32] {
        &self.table
    }

    /// The `m × 256` block of query `q`.
    #[inline]
    pub fn query(&self, q: usize) -> &[f32] {
        let len = self.m * CENTROIDS;
        &self.table[q * len..(q + 1) * len]
    }

    #[inline]
    pub fn get(&self, q: usize, s: usize, c: usize) -> f32 {
        self.table[(q * self.m + s) * CENTROIDS + c]
    }
}

/// Computes the distance table for a batch of queries. Each entry is summed
/// left to right over its subvector, so the table is identical for any
/// worker count.
pub fn build_pq_dist_table(queries: &Dense<'_>, codebook: &PqCodebook) -> Result<PqDistTable> {
    let m = codebook.m();
    let rho = queries.len();
    if rho == 0 {
        return PqDistTable::from_raw(0, m, Vec::new());
    }
    queries.check_dim(codebook.dim())?;
    let mut table = vec![0.0f32; rho * m * CENTROIDS];
    par::for_each_chunk(&mut table, m * CENTROIDS, |q, block| {
        let query = queries.row(q);
        for s in 0..m {
            let sub = &query[codebook.range(s)];
            let out = &mut block[s * CENTROIDS..(s + 1) * CENTROIDS];
            for (c, slot) in out.iter_mut().enumerate() {
                *slot = squared_l2_sequential(sub, codebook.centroid(s, c));
            }
        }
    });
    PqDistTable::from_raw(rho, m, table)
}

/// Sum of the coded partial distances, accumulated over subspaces `0..m` in order.
#[inline]
pub fn asymmetric_distance(code: &[u8], q: usize, table: &PqDistTable) -> f32 {
    lookup_sum(code, table.query(q))
}

#[inline]
pub(crate) fn lookup_sum(code: &[u8], block: &[f32]) -> f32 {
    let mut sum = 0.0f32;
    for (s, &c) in code.iter().enumerate() {
        sum += block[s * CENTROIDS + c as usize];
    }
    sum
}

/// Asymmetric distance of every listed point.
pub fn asymmetric_distances(
    codes: &CompressedVectors,
    ids: &[u32],
    q: usize,
    table: &PqDistTable,
    out: &mut Vec<f32>,
) {
    let block = table.query(q);
    out.clear();
    out.extend(ids.iter().map(|&id| lookup_sum(codes.code(id), block)));
}
