//! Binary file formats. Every integer is little-endian and every float is
//! an IEEE-754 `f32`.

mod index;
mod vectors;

use std::fs::File;
use std::io::{BufWriter, ErrorKind, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub use index::{
    read_codebook, read_codes, read_graph, read_ground_truth, read_ground_truth_ivecs,
    write_codebook, write_codes, write_graph, write_ground_truth, write_results,
};
pub use vectors::{read_ivecs, read_vectors, write_ivecs, write_vectors, VectorFormat};

/// Cursor over a file loaded into memory.
pub(crate) struct Bytes<'a> {
    path: &'a Path,
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Bytes<'a> {
    pub(crate) fn new(path: &'a Path, buf: &'a [u8]) -> Self {
        Self { path, buf, pos: 0 }
    }

    pub(crate) fn is_done(&self) -> bool {
        self.pos == self.buf.len()
    }

    pub(crate) fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        let Some(end) = end else {
            return Err(Error::io(
                self.path,
                std::io::Error::new(
                    ErrorKind::UnexpectedEof,
                    format!("truncated at byte {} (wanted {n} more)", self.pos),
                ),
            ));
        };
        let out = &self.buf[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    pub(crate) fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub(crate) fn i32(&mut self) -> Result<i32> {
        Ok(i32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub(crate) fn u32s(&mut self, n: usize) -> Result<Vec<u32>> {
        let raw = self.take(
            n.checked_mul(4)
                .ok_or_else(|| self.err("length overflow"))?,
        )?;
        Ok(raw
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }

    pub(crate) fn f32s(&mut self, n: usize) -> Result<Vec<f32>> {
        let raw = self.take(
            n.checked_mul(4)
                .ok_or_else(|| self.err("length overflow"))?,
        )?;
        Ok(raw
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }

    /// Checks a 4-byte magic followed by a `u32` version.
    pub(crate) fn header(&mut self, magic: &[u8; 4], version: u32) -> Result<()> {
        let found = self.take(4)?;
        if found != magic {
            return Err(self.err(format!(
                "bad magic {:?}, expected {:?}",
                String::from_utf8_lossy(found),
                String::from_utf8_lossy(magic)
            )));
        }
        let v = self.u32()?;
        if v != version {
            return Err(self.err(format!("unsupported version {v}, expected {version}")));
        }
        Ok(())
    }

    pub(crate) fn finish(&self) -> Result<()> {
        if self.is_done() {
            Ok(())
        } else {
            Err(self.err(format!("{} trailing bytes", self.buf.len() - self.pos)))
        }
    }

    pub(crate) fn err(&self, msg: impl Into<String>) -> Error {
        Error::format(self.path, msg)
    }
}

pub(crate) fn read_file(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

/// Buffered writer that tags IO errors with the path.
pub(crate) struct Out<'a> {
    path: &'a Path,
    w: BufWriter<File>,
}

impl<'a> Out<'a> {
    pub(crate) fn create(path: &'a Path) -> Result<Self> {
        let f = File::create(path).map_err(|e| Error::io(path, e))?;
        Ok(Self {
            path,
            w: BufWriter::new(f),
        })
    }

    pub(crate) fn bytes(&mut self, b: &[u8]) -> Result<()> {
        self.w.write_all(b).map_err(|e| Error::io(self.path, e))
    }

    pub(crate) fn u32(&mut self, v: u32) -> Result<()> {
        self.bytes(&v.to_le_bytes())
    }

    pub(crate) fn i32(&mut self, v: i32) -> Result<()> {
        self.bytes(&v.to_le_bytes())
    }

    pub(crate) fn u32s(&mut self, v: &[u32]) -> Result<()> {
        v.iter().try_for_each(|&x| self.u32(x))
    }

    pub(crate) fn f32s(&mut self, v: &[f32]) -> Result<()> {
        v.iter().try_for_each(|&x| self.bytes(&x.to_le_bytes()))
    }

    pub(crate) fn finish(mut self) -> Result<()> {
        self.w.flush().map_err(|e| Error::io(self.path, e))
    }
}

pub(crate) fn to_u32(path: &Path, what: &str, v: usize) -> Result<u32> {
    u32::try_from(v)
        .map_err(|_| Error::format(path, format!("{what} = {v} does not fit in 32 bits")))
}
