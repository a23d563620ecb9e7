//! Dense, row-major vector collections.

use alloc::borrow::Cow;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{malformed, Error, Result};

/// Element type of a [`VectorStore`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScalarKind {
    U8,
    I8,
    F32,
}

impl ScalarKind {
    pub fn size_bytes(self) -> usize {
        match self {
            ScalarKind::U8 | ScalarKind::I8 => 1,
            ScalarKind::F32 => 4,
        }
    }
}

impl fmt::Display for ScalarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScalarKind::U8 => "u8",
            ScalarKind::I8 => "i8",
            ScalarKind::F32 => "f32",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum VectorData {
    U8(Vec<u8>),
    I8(Vec<i8>),
    F32(Vec<f32>),
}

impl VectorData {
    fn len(&self) -> usize {
        match self {
            VectorData::U8(v) => v.len(),
            VectorData::I8(v) => v.len(),
            VectorData::F32(v) => v.len(),
        }
    }
}

/// `count` vectors of `dim` scalars each, stored contiguously.
///
/// An empty store has `count == 0` and may have `dim == 0` (an empty file
/// carries no dimension header).
#[derive(Debug, Clone, PartialEq)]
pub struct VectorStore {
    dim: usize,
    data: VectorData,
}

impl VectorStore {
    pub fn new(dim: usize, data: VectorData) -> Result<Self> {
        let len = data.len();
        if dim == 0 {
            if len != 0 {
                return Err(malformed!("dimension 0 with {len} values"));
            }
        } else if !len.is_multiple_of(dim) {
            return Err(malformed!(
                "{len} values is not a multiple of dimension {dim}"
            ));
        }
        Ok(Self { dim, data })
    }

    pub fn from_f32(dim: usize, data: Vec<f32>) -> Result<Self> {
        Self::new(dim, VectorData::F32(data))
    }

    pub fn from_u8(dim: usize, data: Vec<u8>) -> Result<Self> {
        Self::new(dim, VectorData::U8(data))
    }

    pub fn from_i8(dim: usize, data: Vec<i8>) -> Result<Self> {
        Self::new(dim, VectorData::I8(data))
    }

    pub fn empty(scalar: ScalarKind) -> Self {
        let data = match scalar {
            ScalarKind::U8 => VectorData::U8(Vec::new()),
            ScalarKind::I8 => VectorData::I8(Vec::new()),
            ScalarKind::F32 => VectorData::F32(Vec::new()),
        };
        Self { dim: 0, data }
    }

    pub fn count(&self) -> usize {
        self.data.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    pub fn scalar(&self) -> ScalarKind {
        match self.data {
            VectorData::U8(_) => ScalarKind::U8,
            VectorData::I8(_) => ScalarKind::I8,
            VectorData::F32(_) => ScalarKind::F32,
        }
    }

    pub fn data(&self) -> &VectorData {
        &self.data
    }

    /// Selects the given rows, in order, into a new store of the same type.
    pub fn select(&self, rows: &[usize]) -> Result<Self> {
        let dim = self.dim;
        for &r in rows {
            if r >= self.count() {
                return Err(malformed!("row {r} out of range for {} rows", self.count()));
            }
        }
        fn pick<T: Copy>(src: &[T], dim: usize, rows: &[usize]) -> Vec<T> {
            rows.iter()
                .flat_map(|&r| src[r * dim..(r + 1) * dim].iter().copied())
                .collect()
        }
        let data = match &self.data {
            VectorData::U8(v) => VectorData::U8(pick(v, dim, rows)),
            VectorData::I8(v) => VectorData::I8(pick(v, dim, rows)),
            VectorData::F32(v) => VectorData::F32(pick(v, dim, rows)),
        };
        Self::new(if rows.is_empty() { 0 } else { dim }, data)
    }

    /// An `f32` view of the whole store; integer types are widened once.
    pub fn dense(&self) -> Dense<'_> {
        let data = match &self.data {
            VectorData::F32(v) => Cow::Borrowed(v.as_slice()),
            VectorData::U8(v) => Cow::Owned(v.iter().map(|&x| x as f32).collect()),
            VectorData::I8(v) => Cow::Owned(v.iter().map(|&x| x as f32).collect()),
        };
        Dense {
            data,
            dim: self.dim,
        }
    }
}

/// Row-major `f32` matrix, borrowed when the source already is `f32`.
#[derive(Debug, Clone)]
pub struct Dense<'a> {
    data: Cow<'a, [f32]>,
    dim: usize,
}

impl<'a> Dense<'a> {
    pub fn new(dim: usize, data: impl Into<Cow<'a, [f32]>>) -> Result<Self> {
        let data = data.into();
        if (dim == 0 && !data.is_empty()) || (dim != 0 && data.len() % dim != 0) {
            return Err(malformed!(
                "{} values do not form rows of dimension {dim}",
                data.len()
            ));
        }
        Ok(Self { data, dim })
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_slice(&self) -> &[f32] {
        &self.data
    }

    pub fn into_owned(self) -> Dense<'static> {
        Dense {
            data: Cow::Owned(self.data.into_owned()),
            dim: self.dim,
        }
    }

    pub(crate) fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: self.dim,
            });
        }
        Ok(())
    }
}

/// Squared Euclidean distance.
///
/// Accumulates in eight interleaved lanes that are reduced in a fixed order,
/// so the result is a pure function of the inputs.
#[inline]
pub fn squared_l2(a: &[f32], b: &[f32]) -> f32 {
    debug_assert_eq!(a.len(), b.len());
    const LANES: usize = 8;
    let mut acc = [0.0f32; LANES];
    let split = a.len() - a.len() % LANES;
    let (a_head, a_tail) = a.split_at(split);
    let (b_head, b_tail) = b.split_at(split);
    for (ca, cb) in a_head.chunks_exact(LANES).zip(b_head.chunks_exact(LANES)) {
        for l in 0..LANES {
            let d = ca[l] - cb[l];
            acc[l] += d * d;
        }
    }
    let mut tail = 0.0f32;
    for (x, y) in a_tail.iter().zip(b_tail) {
        let d = x - y;
        tail += d * d;
    }
    ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7])) + tail
}

/// Squared Euclidean distance summed strictly left to right.
#[inline]
pub fn squared_l2_sequential(a: &[f32], b: &[f32]) -> f32 {
    let mut sum = 0.0f32;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        sum += d * d;
    }
    sum
}
