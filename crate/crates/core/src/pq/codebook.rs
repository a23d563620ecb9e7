use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, malformed, Error, Result};
use crate::par;
use crate::vectors::{squared_l2_sequential, VectorStore};

/// Centroids per subspace; every code is a single byte.
pub const CENTROIDS: usize = 256;

/// Splits `dim` into `m` contiguous subspaces. When `m` does not divide
/// `dim`, the first `dim % m` subspaces get one extra dimension.
pub fn subspace_sizes(dim: usize, m: usize) -> Result<Vec<usize>> {
    if m == 0 {
        return Err(invalid!("m must be positive"));
    }
    if m > dim {
        return Err(invalid!("m = {m} exceeds dimension {dim}"));
    }
    let base = dim / m;
    let extra = dim % m;
    Ok((0..m).map(|s| base + usize::from(s < extra)).collect())
}

/// Per-subspace centroid tables.
#[derive(Debug, Clone, PartialEq)]
pub struct PqCodebook {
    dim: usize,
    sizes: Vec<usize>,
    offsets: Vec<usize>,
    /// Subspace `s` holds `CENTROIDS * sizes[s]` values, centroid-major.
    centroids: Vec<Vec<f32>>,
}

impl PqCodebook {
    pub fn new(dim: usize, sizes: Vec<usize>, centroids: Vec<Vec<f32>>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(malformed!("codebook needs at least one subspace"));
        }
        if sizes.contains(&0) {
            return Err(malformed!("empty subspace in codebook"));
        }
        let total: usize = sizes.iter().sum();
        if total != dim {
            return Err(malformed!(
                "subspace sizes sum to {total}, dimension is {dim}"
            ));
        }
        if centroids.len() != sizes.len() {
            return Err(malformed!(
                "{} centroid tables for {} subspaces",
                centroids.len(),
                sizes.len()
            ));
        }
        for (s, (table, &size)) in centroids.iter().zip(&sizes).enumerate() {
            if table.len() != CENTROIDS * size {
                return Err(malformed!(
                    "subspace {s} has {} centroid values, expected {}",
                    table.len(),
                    CENTROIDS * size
                ));
            }
        }
        let mut offsets = Vec::with_capacity(sizes.len() + 1);
        offsets.push(0);
        for &s in &sizes {
            offsets.push(offsets.last().unwrap() + s);
        }
        Ok(Self {
            dim,
            sizes,
            offsets,
            centroids,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of subspaces.
    pub fn m(&self) -> usize {
        self.sizes.len()
    }

    pub fn subspace_sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Dimension range of subspace `s`.
    #[inline]
    pub fn range(&self, s: usize) -> core::ops::Range<usize> {
        self.offsets[s]..self.offsets[s + 1]
    }

    #[inline]
    pub fn centroid(&self, s: usize, c: usize) -> &[f32] {
        let size = self.sizes[s];
        &self.centroids[s][c * size..(c + 1) * size]
    }

    pub fn centroid_table(&self, s: usize) -> &[f32] {
        &self.centroids[s]
    }

    /// Nearest centroid per subspace; ties go to the lowest index.
    pub fn encode(&self, vector: &[f32], out: &mut [u8]) {
        debug_assert_eq!(vector.len(), self.dim);
        for s in 0..self.m() {
            let sub = &vector[self.range(s)];
            let mut best = 0usize;
            let mut best_dist = f32::INFINITY;
            for c in 0..CENTROIDS {
                let d = squared_l2_sequential(sub, self.centroid(s, c));
                if d < best_dist {
                    best_dist = d;
                    best = c;
                }
            }
            out[s] = best as u8;
        }
    }

    /// Concatenation of the coded centroids.
    pub fn decode(&self, code: &[u8]) -> Vec<f32> {
        let mut out = Vec::with_capacity(self.dim);
        for (s, &c) in code.iter().enumerate() {
            out.extend_from_slice(self.centroid(s, c as usize));
        }
        out
    }
}

/// One `m`-byte code per point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompressedVectors {
    m: usize,
    codes: Vec<u8>,
}

impl CompressedVectors {
    pub fn new(m: usize, codes: Vec<u8>) -> Result<Self> {
        if m == 0 {
            return Err(malformed!("compressed vectors need m > 0"));
        }
        if !codes.len().is_multiple_of(m) {
            return Err(malformed!(
                "{} code bytes do not form rows of {m}",
                codes.len()
            ));
        }
        Ok(Self { m, codes })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn count(&self) -> usize {
        self.codes.len() / self.m
    }

    #[inline]
    pub fn code(&self, i: u32) -> &[u8] {
        let i = i as usize;
        &self.codes[i * self.m..(i + 1) * self.m]
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.codes
    }
}

/// Encodes every row of `base` against `codebook`.
pub fn compress(base: &VectorStore, codebook: &PqCodebook) -> Result<CompressedVectors> {
    if base.is_empty() {
        return CompressedVectors::new(codebook.m(), Vec::new());
    }
    if base.dim() != codebook.dim() {
        return Err(Error::DimensionMismatch {
            expected: codebook.dim(),
            found: base.dim(),
        });
    }
    let m = codebook.m();
    let rows = base.dense();
    let mut codes = vec![0u8; base.count() * m];
    const ROWS_PER_TASK: usize = 256;
    par::for_each_chunk(&mut codes, ROWS_PER_TASK * m, |chunk_idx, chunk| {
        let first = chunk_idx * ROWS_PER_TASK;
        for (j, out) in chunk.chunks_mut(m).enumerate() {
            codebook.encode(rows.row(first + j), out);
        }
    });
    CompressedVectors::new(m, codes)
}
