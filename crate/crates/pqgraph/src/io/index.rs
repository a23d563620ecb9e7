use std::path::Path;

use pqgraph_core::pq::{CompressedVectors, PqCodebook, CENTROIDS};
use pqgraph_core::search::QueryResult;
use pqgraph_core::{squared_l2, Dense, GraphIndex, GroundTruth, Neighbour};

use super::{read_file, read_ivecs, to_u32, write_ivecs, Bytes, Out};
use crate::error::{Error, Result};

const GRAPH_MAGIC: &[u8; 4] = b"PQGI";
const CODEBOOK_MAGIC: &[u8; 4] = b"PQCB";
const CODES_MAGIC: &[u8; 4] = b"PQCV";
const GT_MAGIC: &[u8; 4] = b"PQGT";
const VERSION: u32 = 1;

/// Layout: `magic, version, node_count, R, medoid`, then per node
/// `len: u32, ids: len × u32`.
pub fn write_graph(path: &Path, graph: &GraphIndex) -> Result<()> {
    let mut out = Out::create(path)?;
    out.bytes(GRAPH_MAGIC)?;
    out.u32(VERSION)?;
    out.u32(to_u32(path, "node count", graph.node_count())?)?;
    out.u32(to_u32(path, "R", graph.max_degree())?)?;
    out.u32(graph.medoid())?;
    for list in graph.adjacency() {
        out.u32(list.len() as u32)?;
        out.u32s(list)?;
    }
    out.finish()
}

pub fn read_graph(path: &Path) -> Result<GraphIndex> {
    let buf = read_file(path)?;
    let mut r = Bytes::new(path, &buf);
    r.header(GRAPH_MAGIC, VERSION)?;
    let n = r.u32()? as usize;
    let max_degree = r.u32()? as usize;
    let medoid = r.u32()?;
    let mut adjacency = Vec::with_capacity(n);
    for node in 0..n {
        let len = r.u32()? as usize;
        if len > max_degree {
            return Err(r.err(format!(
                "node {node} has {len} neighbours, R = {max_degree}"
            )));
        }
        adjacency.push(r.u32s(len)?);
    }
    r.finish()?;
    GraphIndex::new(max_degree, medoid, adjacency).map_err(|e| r.err(e.to_string()))
}

/// Layout: `magic, version, dim, m, sizes: m × u32`, then for each subspace
/// `256 × size` centroid coordinates.
pub fn write_codebook(path: &Path, cb: &PqCodebook) -> Result<()> {
    let mut out = Out::create(path)?;
    out.bytes(CODEBOOK_MAGIC)?;
    out.u32(VERSION)?;
    out.u32(to_u32(path, "dim", cb.dim())?)?;
    out.u32(to_u32(path, "m", cb.m())?)?;
    for &s in cb.subspace_sizes() {
        out.u32(s as u32)?;
    }
    for s in 0..cb.m() {
        out.f32s(cb.centroid_table(s))?;
    }
    out.finish()
}

pub fn read_codebook(path: &Path) -> Result<PqCodebook> {
    let buf = read_file(path)?;
    let mut r = Bytes::new(path, &buf);
    r.header(CODEBOOK_MAGIC, VERSION)?;
    let dim = r.u32()? as usize;
    let m = r.u32()? as usize;
    let sizes: Vec<usize> = r.u32s(m)?.into_iter().map(|s| s as usize).collect();
    let total: usize = sizes.iter().sum();
    if total != dim {
        return Err(r.err(format!("subspace sizes sum to {total}, dim is {dim}")));
    }
    let mut tables = Vec::with_capacity(m);
    for &s in &sizes {
        tables.push(r.f32s(s * CENTROIDS)?);
    }
    r.finish()?;
    PqCodebook::new(dim, sizes, tables).map_err(|e| r.err(e.to_string()))
}

/// Layout: `magic, version, count, m`, then `count × m` code bytes.
pub fn write_codes(path: &Path, codes: &CompressedVectors) -> Result<()> {
    let mut out = Out::create(path)?;
    out.bytes(CODES_MAGIC)?;
    out.u32(VERSION)?;
    out.u32(to_u32(path, "count", codes.count())?)?;
    out.u32(to_u32(path, "m", codes.m())?)?;
    out.bytes(codes.as_bytes())?;
    out.finish()
}

pub fn read_codes(path: &Path) -> Result<CompressedVectors> {
    let buf = read_file(path)?;
    let mut r = Bytes::new(path, &buf);
    r.header(CODES_MAGIC, VERSION)?;
    let count = r.u32()? as usize;
    let m = r.u32()? as usize;
    let bytes = r.take(count * m)?.to_vec();
    r.finish()?;
    CompressedVectors::new(m, bytes).map_err(|e| r.err(e.to_string()))
}

/// Layout: `magic, version, query_count, k`, then `query_count × k` ids and
/// as many squared distances.
pub fn write_ground_truth(path: &Path, gt: &GroundTruth) -> Result<()> {
    let mut out = Out::create(path)?;
    out.bytes(GT_MAGIC)?;
    out.u32(VERSION)?;
    out.u32(to_u32(path, "query count", gt.query_count())?)?;
    out.u32(to_u32(path, "k", gt.k())?)?;
    out.u32s(gt.all_ids())?;
    out.f32s(gt.all_dists())?;
    out.finish()
}

pub fn read_ground_truth(path: &Path) -> Result<GroundTruth> {
    let buf = read_file(path)?;
    let mut r = Bytes::new(path, &buf);
    r.header(GT_MAGIC, VERSION)?;
    let rows = r.u32()? as usize;
    let k = r.u32()? as usize;
    let ids = r.u32s(rows * k)?;
    let dists = r.f32s(rows * k)?;
    r.finish()?;
    GroundTruth::new(k, ids, dists).map_err(|e| r.err(e.to_string()))
}

/// Reads ids from an ivecs file and recomputes their squared distances.
/// Each row is re-sorted by `(distance, id)`.
pub fn read_ground_truth_ivecs(
    path: &Path,
    base: &Dense<'_>,
    queries: &Dense<'_>,
) -> Result<GroundTruth> {
    let (k, values) = read_ivecs(path)?;
    let rows = values.len().checked_div(k).unwrap_or(0);
    if rows != queries.len() {
        return Err(Error::format(
            path,
            format!("{rows} rows for {} queries", queries.len()),
        ));
    }
    let mut ids = Vec::with_capacity(values.len());
    let mut dists = Vec::with_capacity(values.len());
    for (q, row) in values.chunks(k.max(1)).enumerate() {
        let mut row: Vec<Neighbour> = row
            .iter()
            .map(|&v| {
                usize::try_from(v)
                    .ok()
                    .filter(|&i| i < base.len())
                    .map(|i| Neighbour::new(i as u32, squared_l2(base.row(i), queries.row(q))))
                    .ok_or_else(|| Error::format(path, format!("row {q}: id {v} out of range")))
            })
            .collect::<Result<_>>()?;
        row.sort_by(pqgraph_core::merge::rank_cmp);
        ids.extend(row.iter().map(|n| n.id));
        dists.extend(row.iter().map(|n| n.dist));
    }
    GroundTruth::new(k.max(1), ids, dists).map_err(|e| Error::format(path, e.to_string()))
}

/// Writes result ids as ivecs rows of `k`, padding short rows with −1.
pub fn write_results(path: &Path, results: &[QueryResult], k: usize) -> Result<()> {
    let mut values = Vec::with_capacity(results.len() * k);
    for r in results {
        values.extend(r.ids.iter().take(k).map(|&id| id as i32));
        values.extend(std::iter::repeat_n(-1, k.saturating_sub(r.ids.len())));
    }
    write_ivecs(path, k, &values)
}
