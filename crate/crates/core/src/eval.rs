//! Exact k-NN oracle and search-quality metrics.

use alloc::collections::{BTreeMap, BinaryHeap};
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{invalid, Error, Result};
use crate::ground_truth::GroundTruth;
use crate::merge::{rank_cmp, Neighbour};
use crate::par;
use crate::vectors::{squared_l2, Dense};

struct MaxByRank(Neighbour);

impl PartialEq for MaxByRank {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for MaxByRank {}
impl PartialOrd for MaxByRank {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for MaxByRank {
    fn cmp(&self, other: &Self) -> Ordering {
        rank_cmp(&self.0, &other.0)
    }
}

/// Exact top-`k` of one query by `(squared distance, id)`.
pub fn exact_knn(base: &Dense<'_>, query: &[f32], k: usize) -> Vec<Neighbour> {
    let mut heap: BinaryHeap<MaxByRank> = BinaryHeap::with_capacity(k + 1);
    for i in 0..base.len() {
        let cand = Neighbour::new(i as u32, squared_l2(base.row(i), query));
        if heap.len() < k {
            heap.push(MaxByRank(cand));
        } else if rank_cmp(&cand, &heap.peek().expect("k > 0").0) == Ordering::Less {
            heap.pop();
            heap.push(MaxByRank(cand));
        }
    }
    let mut out: Vec<Neighbour> = heap.into_iter().map(|m| m.0).collect();
    out.sort_by(rank_cmp);
    out
}

/// Exact ground truth for every query.
pub fn brute_force_knn(base: &Dense<'_>, queries: &Dense<'_>, k: usize) -> Result<GroundTruth> {
    if k == 0 {
        return Err(invalid!("k must be positive"));
    }
    if k > base.len() {
        return Err(invalid!("k = {k} exceeds the {} base points", base.len()));
    }
    if !queries.is_empty() {
        queries.check_dim(base.dim())?;
    }
    let rows = par::map_collect(queries.len(), |q| exact_knn(base, queries.row(q), k));
    let mut ids = Vec::with_capacity(queries.len() * k);
    let mut dists = Vec::with_capacity(queries.len() * k);
    for row in rows {
        ids.extend(row.iter().map(|n| n.id));
        dists.extend(row.iter().map(|n| n.dist));
    }
    GroundTruth::new(k, ids, dists)
}

/// Mean over queries of `|S ∩ S̃| / k`, with `S` the first `k` ground-truth
/// ids and `S̃` the first `k` returned ids. Ids tied in distance with the
/// `k`-th ground-truth entry but ranked after it earn no credit. A result
/// row shorter than `k` simply scores its missing slots as misses.
pub fn recall_at_k<R: AsRef<[u32]>>(results: &[R], gt: &GroundTruth, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(invalid!("k must be positive"));
    }
    if results.len() != gt.query_count() {
        return Err(Error::Malformed(alloc::format!(
            "{} result rows for {} ground-truth rows",
            results.len(),
            gt.query_count()
        )));
    }
    if gt.k() < k {
        return Err(invalid!(
            "ground truth holds {} ids per query, need {k}",
            gt.k()
        ));
    }
    if results.is_empty() {
        return Ok(1.0);
    }
    let mut total = 0usize;
    for (q, row) in results.iter().enumerate() {
        let truth = &gt.ids(q)[..k];
        let row = row.as_ref();
        let found = &row[..k.min(row.len())];
        total += found
            .iter()
            .enumerate()
            .filter(|&(i, id)| truth.contains(id) && !found[..i].contains(id))
            .count();
    }
    Ok(total as f64 / (k * results.len()) as f64)
}

/// Extra iterations over the worklist size, in percent: `(mean(I) − t) / t × 100`.
pub fn lambda_metric(iterations: &[u32], t: usize) -> Result<f64> {
    if t == 0 {
        return Err(invalid!("t must be positive"));
    }
    if iterations.is_empty() {
        return Err(Error::Empty("iteration counts"));
    }
    let mean = iterations.iter().map(|&i| i as f64).sum::<f64>() / iterations.len() as f64;
    Ok((mean - t as f64) / t as f64 * 100.0)
}

/// Fraction of queries that converged within `factor × t` iterations.
pub fn completion_fraction(iterations: &[u32], t: usize, factor: f64) -> f64 {
    if iterations.is_empty() {
        return 1.0;
    }
    let limit = factor * t as f64;
    iterations.iter().filter(|&&i| i as f64 <= limit).count() as f64 / iterations.len() as f64
}

/// Iteration count → number of queries.
pub fn iteration_histogram(iterations: &[u32]) -> BTreeMap<u32, usize> {
    let mut hist = BTreeMap::new();
    for &i in iterations {
        *hist.entry(i).or_insert(0) += 1;
    }
    hist
}
