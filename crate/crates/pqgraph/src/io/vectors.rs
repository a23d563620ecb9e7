use std::fmt;
use std::path::Path;
use std::str::FromStr;

use pqgraph_core::vectors::VectorData;
use pqgraph_core::{ScalarKind, VectorStore};

use super::{read_file, to_u32, Bytes, Out};
use crate::error::{Error, Result};

/// On-disk vector layouts.
///
/// `Fvecs`/`Bvecs` prefix every row with an `i32` dimension. `RawBin` has a
/// single header `{count: u32, dim: u32}` followed by the rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VectorFormat {
    Fvecs,
    Bvecs,
    RawBin(ScalarKind),
}

impl VectorFormat {
    /// Guesses the format from the extension: `.fvecs`, `.bvecs`, `.fbin`,
    /// `.u8bin`, `.i8bin`.
    pub fn from_path(path: &Path) -> Option<Self> {
        let ext = path.extension()?.to_str()?;
        ext.parse().ok()
    }

    pub fn scalar(self) -> ScalarKind {
        match self {
            VectorFormat::Fvecs => ScalarKind::F32,
            VectorFormat::Bvecs => ScalarKind::U8,
            VectorFormat::RawBin(s) => s,
        }
    }
}

impl FromStr for VectorFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "fvecs" => Ok(VectorFormat::Fvecs),
            "bvecs" => Ok(VectorFormat::Bvecs),
            "fbin" => Ok(VectorFormat::RawBin(ScalarKind::F32)),
            "u8bin" => Ok(VectorFormat::RawBin(ScalarKind::U8)),
            "i8bin" => Ok(VectorFormat::RawBin(ScalarKind::I8)),
            other => Err(format!(
                "unknown vector format `{other}` (fvecs, bvecs, fbin, u8bin, i8bin)"
            )),
        }
    }
}

impl fmt::Display for VectorFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VectorFormat::Fvecs => "fvecs",
            VectorFormat::Bvecs => "bvecs",
            VectorFormat::RawBin(ScalarKind::F32) => "fbin",
            VectorFormat::RawBin(ScalarKind::U8) => "u8bin",
            VectorFormat::RawBin(ScalarKind::I8) => "i8bin",
        })
    }
}

fn resolve(path: &Path, format: Option<VectorFormat>) -> Result<VectorFormat> {
    format
        .or_else(|| VectorFormat::from_path(path))
        .ok_or_else(|| Error::format(path, "cannot infer the vector format; pass it explicitly"))
}

/// Reads rows prefixed by an `i32` dimension, each `dim * width` bytes.
fn read_prefixed(path: &Path, buf: &[u8], width: usize) -> Result<(usize, Vec<u8>)> {
    let mut r = Bytes::new(path, buf);
    let mut dim = None;
    let mut data = Vec::new();
    let mut row = 0usize;
    while !r.is_done() {
        let d = r.i32()?;
        if d <= 0 {
            return Err(r.err(format!("row {row}: non-positive dimension {d}")));
        }
        let d = d as usize;
        match dim {
            None => {
                dim = Some(d);
                data.reserve(buf.len());
            }
            Some(first) if first != d => {
                return Err(r.err(format!("row {row} has dimension {d}, row 0 has {first}")));
            }
            _ => {}
        }
        data.extend_from_slice(r.take(d * width)?);
        row += 1;
    }
    Ok((dim.unwrap_or(0), data))
}

fn le_f32(bytes: &[u8]) -> Vec<f32> {
    bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect()
}

fn store(scalar: ScalarKind, dim: usize, bytes: Vec<u8>) -> Result<VectorStore> {
    if dim == 0 {
        return Ok(VectorStore::empty(scalar));
    }
    Ok(match scalar {
        ScalarKind::F32 => VectorStore::from_f32(dim, le_f32(&bytes))?,
        ScalarKind::U8 => VectorStore::from_u8(dim, bytes)?,
        ScalarKind::I8 => VectorStore::from_i8(dim, bytes.into_iter().map(|b| b as i8).collect())?,
    })
}

/// Loads a vector file. `format = None` infers it from the extension.
pub fn read_vectors(path: &Path, format: Option<VectorFormat>) -> Result<VectorStore> {
    let format = resolve(path, format)?;
    let buf = read_file(path)?;
    match format {
        VectorFormat::Fvecs => {
            let (dim, bytes) = read_prefixed(path, &buf, 4)?;
            store(ScalarKind::F32, dim, bytes)
        }
        VectorFormat::Bvecs => {
            let (dim, bytes) = read_prefixed(path, &buf, 1)?;
            store(ScalarKind::U8, dim, bytes)
        }
        VectorFormat::RawBin(scalar) => {
            if buf.is_empty() {
                return Ok(VectorStore::empty(scalar));
            }
            let mut r = Bytes::new(path, &buf);
            let count = r.u32()? as usize;
            let dim = r.u32()? as usize;
            if dim == 0 && count > 0 {
                return Err(r.err("zero dimension"));
            }
            let bytes = r.take(count * dim * scalar.size_bytes())?.to_vec();
            r.finish()?;
            if count == 0 {
                return Ok(VectorStore::empty(scalar));
            }
            store(scalar, dim, bytes)
        }
    }
}

fn row_bytes(data: &VectorData, dim: usize, i: usize, out: &mut Vec<u8>) {
    out.clear();
    let range = i * dim..(i + 1) * dim;
    match data {
        VectorData::F32(v) => v[range]
            .iter()
            .for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
        VectorData::U8(v) => out.extend_from_slice(&v[range]),
        VectorData::I8(v) => out.extend(v[range].iter().map(|&x| x as u8)),
    }
}

/// Writes `store` in `format`, which must match its scalar type.
pub fn write_vectors(path: &Path, store: &VectorStore, format: Option<VectorFormat>) -> Result<()> {
    let format = resolve(path, format)?;
    if format.scalar() != store.scalar() {
        return Err(Error::format(
            path,
            format!(
                "{format} holds {} values, store holds {}",
                format.scalar(),
                store.scalar()
            ),
        ));
    }
    let (count, dim) = (store.count(), store.dim());
    let mut out = Out::create(path)?;
    let mut row = Vec::new();
    match format {
        VectorFormat::RawBin(_) => {
            out.u32(to_u32(path, "count", count)?)?;
            out.u32(to_u32(path, "dim", dim)?)?;
            for i in 0..count {
                row_bytes(store.data(), dim, i, &mut row);
                out.bytes(&row)?;
            }
        }
        _ => {
            let d = i32::try_from(dim).map_err(|_| Error::format(path, "dimension too large"))?;
            for i in 0..count {
                out.i32(d)?;
                row_bytes(store.data(), dim, i, &mut row);
                out.bytes(&row)?;
            }
        }
    }
    out.finish()
}

/// Reads an ivecs file as `(dim, row-major values)`.
pub fn read_ivecs(path: &Path) -> Result<(usize, Vec<i32>)> {
    let buf = read_file(path)?;
    let (dim, bytes) = read_prefixed(path, &buf, 4)?;
    let values = bytes
        .chunks_exact(4)
        .map(|c| i32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok((dim, values))
}

/// Writes `values` as ivecs rows of `dim` entries.
pub fn write_ivecs(path: &Path, dim: usize, values: &[i32]) -> Result<()> {
    if dim == 0 || !values.len().is_multiple_of(dim) {
        return Err(Error::format(
            path,
            format!("{} values do not form rows of {dim}", values.len()),
        ));
    }
    let d = i32::try_from(dim).map_err(|_| Error::format(path, "dimension too large"))?;
    let mut out = Out::create(path)?;
    for row in values.chunks_exact(dim) {
        out.i32(d)?;
        row.iter().try_for_each(|&v| out.i32(v))?;
    }
    out.finish()
}
