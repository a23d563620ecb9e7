//! Per-subspace k-means (k-means++ seeding, Lloyd iterations).

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::codebook::{subspace_sizes, PqCodebook, CENTROIDS};
use crate::error::{Error, Result};
use crate::par;
use crate::vectors::{squared_l2_sequential, VectorStore};

pub const DEFAULT_ITERS: usize = 25;

const POINTS_PER_TASK: usize = 1024;

/// Diagnostics from [`train_codebook`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainReport {
    /// Mean squared quantization error of the whole vector, recorded after
    /// each assignment step (`iters + 1` entries).
    pub objective: Vec<f64>,
    /// Subspaces that had fewer than 256 distinct subvectors. Their spare
    /// centroid slots repeat the centroid farthest from the subspace mean and
    /// are never selected by the encoder.
    pub padded_subspaces: Vec<usize>,
}

impl TrainReport {
    pub fn padded(&self) -> bool {
        !self.padded_subspaces.is_empty()
    }
}

/// Trains a product quantizer with `m` subspaces and 256 centroids each.
/// Deterministic for a fixed `seed`.
pub fn train_codebook(
    base: &VectorStore,
    m: usize,
    iters: usize,
    seed: u64,
) -> Result<(PqCodebook, TrainReport)> {
    if base.is_empty() {
        return Err(Error::Empty("training set"));
    }
    let dim = base.dim();
    let sizes = subspace_sizes(dim, m)?;
    let rows = base.dense();
    let n = base.count();

    let mut tables = Vec::with_capacity(m);
    let mut report = TrainReport {
        objective: vec![0.0; iters + 1],
        padded_subspaces: Vec::new(),
    };
    let mut offset = 0;
    for (s, &size) in sizes.iter().enumerate() {
        let mut points = Vec::with_capacity(n * size);
        for i in 0..n {
            points.extend_from_slice(&rows.row(i)[offset..offset + size]);
        }
        offset += size;

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(s as u64);
        let trained = kmeans(&points, size, iters, &mut rng);
        for (acc, obj) in report.objective.iter_mut().zip(&trained.objective) {
            *acc += obj / n as f64;
        }
        if trained.distinct < CENTROIDS {
            report.padded_subspaces.push(s);
        }
        tables.push(trained.centroids);
    }
    Ok((PqCodebook::new(dim, sizes, tables)?, report))
}

pub(crate) struct KMeans {
    /// `CENTROIDS * dim` values.
    pub centroids: Vec<f32>,
    /// Total squared error after each assignment step.
    pub objective: Vec<f64>,
    /// Centroids backed by real data; the rest are padding.
    pub distinct: usize,
}

/// Clusters `points` (row-major, `dim` wide) into 256 centroids.
pub(crate) fn kmeans(points: &[f32], dim: usize, iters: usize, rng: &mut ChaCha8Rng) -> KMeans {
    let n = points.len() / dim;
    let row = |i: usize| &points[i * dim..(i + 1) * dim];

    let mut centroids = seed_plus_plus(points, dim, CENTROIDS, rng);
    let k = centroids.len() / dim;

    // (assigned centroid, squared error)
    let mut assign = vec![(0u8, 0.0f32); n];
    let mut objective = Vec::with_capacity(iters + 1);
    let mut counts = vec![0usize; k];
    let mut sums = vec![0.0f64; k * dim];
    for it in 0..=iters {
        let cents = &centroids;
        par::for_each_chunk(&mut assign, POINTS_PER_TASK, |chunk_idx, chunk| {
            let first = chunk_idx * POINTS_PER_TASK;
            for (j, slot) in chunk.iter_mut().enumerate() {
                *slot = nearest(row(first + j), cents, dim);
            }
        });
        objective.push(assign.iter().map(|&(_, e)| e as f64).sum());
        if it == iters {
            break;
        }

        counts.iter_mut().for_each(|c| *c = 0);
        sums.iter_mut().for_each(|x| *x = 0.0);
        for (i, &(c, _)) in assign.iter().enumerate() {
            let c = c as usize;
            counts[c] += 1;
            for (acc, &x) in sums[c * dim..(c + 1) * dim].iter_mut().zip(row(i)) {
                *acc += x as f64;
            }
        }
        for c in 0..k {
            if counts[c] == 0 {
                continue;
            }
            let inv = 1.0 / counts[c] as f64;
            for (dst, &acc) in centroids[c * dim..(c + 1) * dim]
                .iter_mut()
                .zip(&sums[c * dim..(c + 1) * dim])
            {
                *dst = (acc * inv) as f32;
            }
        }
        // Re-seed empty clusters with the worst-served points.
        for c in 0..k {
            if counts[c] != 0 {
                continue;
            }
            let Some((far, err)) = assign.iter().enumerate().map(|(i, &(_, e))| (i, e)).fold(
                None,
                |best: Option<(usize, f32)>, (i, e)| match best {
                    Some((_, be)) if be >= e => best,
                    _ => Some((i, e)),
                },
            ) else {
                break;
            };
            if err <= 0.0 {
                break;
            }
            centroids[c * dim..(c + 1) * dim].copy_from_slice(row(far));
            assign[far] = (c as u8, 0.0);
        }
    }

    let distinct = k;
    if k < CENTROIDS {
        let pad = farthest_from_mean(&centroids, dim);
        let pad_vec: Vec<f32> = centroids[pad * dim..(pad + 1) * dim].to_vec();
        for _ in k..CENTROIDS {
            centroids.extend_from_slice(&pad_vec);
        }
    }
    KMeans {
        centroids,
        objective,
        distinct,
    }
}

#[inline]
fn nearest(point: &[f32], centroids: &[f32], dim: usize) -> (u8, f32) {
    let mut best = 0usize;
    let mut best_dist = f32::INFINITY;
    for (c, cent) in centroids.chunks_exact(dim).enumerate() {
        let d = squared_l2_sequential(point, cent);
        if d < best_dist {
            best_dist = d;
            best = c;
        }
    }
    (best as u8, best_dist)
}

/// k-means++ seeding. Stops early when every remaining point coincides with
/// a chosen centre, so the result may hold fewer than `k` centroids.
fn seed_plus_plus(points: &[f32], dim: usize, k: usize, rng: &mut ChaCha8Rng) -> Vec<f32> {
    let n = points.len() / dim;
    let row = |i: usize| &points[i * dim..(i + 1) * dim];
    let mut centroids = Vec::with_capacity(k * dim);
    let first = rng.random_range(0..n);
    centroids.extend_from_slice(row(first));

    let mut min_d2 = vec![f32::INFINITY; n];
    let mut last = first;
    while centroids.len() / dim < k {
        let newest = row(last).to_vec();
        par::for_each_chunk(&mut min_d2, POINTS_PER_TASK, |chunk_idx, chunk| {
            let start = chunk_idx * POINTS_PER_TASK;
            for (j, d) in chunk.iter_mut().enumerate() {
                let nd = squared_l2_sequential(row(start + j), &newest);
                if nd < *d {
                    *d = nd;
                }
            }
        });
        let total: f64 = min_d2.iter().map(|&d| d as f64).sum();
        if total <= 0.0 {
            break;
        }
        let target = rng.random::<f64>() * total;
        let mut acc = 0.0f64;
        let mut pick = None;
        for (i, &d) in min_d2.iter().enumerate() {
            if d <= 0.0 {
                continue;
            }
            acc += d as f64;
            pick = Some(i);
            if acc > target {
                break;
            }
        }
        // `pick` is the last positive-weight point when rounding leaves acc <= target.
        let pick = pick.expect("positive total implies a positive weight");
        centroids.extend_from_slice(row(pick));
        last = pick;
    }
    centroids
}

fn farthest_from_mean(centroids: &[f32], dim: usize) -> usize {
    let k = centroids.len() / dim;
    let mut mean = vec![0.0f64; dim];
    for c in centroids.chunks_exact(dim) {
        for (m, &x) in mean.iter_mut().zip(c) {
            *m += x as f64;
        }
    }
    let mean: Vec<f32> = mean.iter().map(|&m| (m / k as f64) as f32).collect();
    let mut best = 0;
    let mut best_dist = -1.0f32;
    for (c, cent) in centroids.chunks_exact(dim).enumerate() {
        let d = squared_l2_sequential(cent, &mean);
        if d > best_dist {
            best_dist = d;
            best = c;
        }
    }
    best
}
