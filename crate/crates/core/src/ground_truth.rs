//! Exact nearest-neighbour lists for a query set.

use alloc::vec::Vec;

use crate::error::{malformed, Result};

/// `query_count` rows of `k` ids, each sorted by ascending true distance,
/// with the matching squared distances.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    k: usize,
    ids: Vec<u32>,
    dists: Vec<f32>,
}

impl GroundTruth {
    pub fn new(k: usize, ids: Vec<u32>, dists: Vec<f32>) -> Result<Self> {
        let gt = Self { k, ids, dists };
        gt.validate()?;
        Ok(gt)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(malformed!("ground truth needs k > 0"));
        }
        if !self.ids.len().is_multiple_of(self.k) || self.ids.len() != self.dists.len() {
            return Err(malformed!(
                "{} ids and {} distances do not form rows of {}",
                self.ids.len(),
                self.dists.len(),
                self.k
            ));
        }
        for q in 0..self.query_count() {
            let ids = self.ids(q);
            let dists = self.dists(q);
            if dists.windows(2).any(|w| w[0] > w[1]) {
                return Err(malformed!("row {q} distances are not sorted"));
            }
            for (i, id) in ids.iter().enumerate() {
                if ids[..i].contains(id) {
                    return Err(malformed!("row {q} repeats id {id}"));
                }
            }
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn query_count(&self) -> usize {
        self.ids.len() / self.k
    }

    pub fn ids(&self, query: usize) -> &[u32] {
        &self.ids[query * self.k..(query + 1) * self.k]
    }

    pub fn dists(&self, query: usize) -> &[f32] {
        &self.dists[query * self.k..(query + 1) * self.k]
    }

    pub fn all_ids(&self) -> &[u32] {
        &self.ids
    }

    pub fn all_dists(&self) -> &[f32] {
        &self.dists
    }
}
