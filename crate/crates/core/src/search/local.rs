use alloc::vec::Vec;

use super::{
    rerank, ExactQueryDistance, PqQueryDistance, QueryDistance, QueryResult, QueryState,
    SearchMode, SearchParams,
};
use crate::bloom::BloomFilter;
use crate::error::{invalid, Error, Result};
use crate::graph::GraphIndex;
use crate::par;
use crate::pq::{build_pq_dist_table, CompressedVectors, PqCodebook};
use crate::vectors::Dense;

/// Compressed side of the index.
#[derive(Debug, Clone, Copy)]
pub struct PqData<'a> {
    pub codebook: &'a PqCodebook,
    pub codes: &'a CompressedVectors,
}

/// Validates parameters and the shapes of the index parts against each other.
pub fn check_inputs(
    graph: &GraphIndex,
    base: &Dense<'_>,
    pq: Option<PqData<'_>>,
    queries: &Dense<'_>,
    params: &SearchParams,
) -> Result<()> {
    params.validate()?;
    let n = graph.node_count();
    if base.len() != n {
        return Err(invalid!(
            "graph has {n} nodes but base has {} vectors",
            base.len()
        ));
    }
    if !queries.is_empty() {
        queries.check_dim(base.dim())?;
    }
    if params.mode.uses_pq() {
        let pq = pq.ok_or_else(|| invalid!("{} mode needs a codebook and codes", params.mode))?;
        if pq.codes.count() != n {
            return Err(invalid!("{} codes for {n} graph nodes", pq.codes.count()));
        }
        if pq.codes.m() != pq.codebook.m() {
            return Err(invalid!(
                "codes have m = {}, codebook has m = {}",
                pq.codes.m(),
                pq.codebook.m()
            ));
        }
        if pq.codebook.dim() != base.dim() {
            return Err(Error::DimensionMismatch {
                expected: base.dim(),
                found: pq.codebook.dim(),
            });
        }
    }
    Ok(())
}

/// Runs a whole query set with the graph in local memory, in batches of
/// `params.batch_size`, for the `InMemory` and `ExactDistance` modes.
/// Queries within a batch are independent; the output does not depend on
/// the number of workers.
pub fn search_local(
    graph: &GraphIndex,
    base: &Dense<'_>,
    pq: Option<PqData<'_>>,
    queries: &Dense<'_>,
    params: &SearchParams,
) -> Result<Vec<QueryResult>> {
    if params.mode == SearchMode::Pipelined {
        return Err(invalid!("pipelined mode needs a threaded driver"));
    }
    check_inputs(graph, base, pq, queries, params)?;
    let mut results = Vec::with_capacity(queries.len());
    let mut start = 0;
    while start < queries.len() {
        let end = (start + params.batch_size).min(queries.len());
        let batch = Dense::new(
            queries.dim(),
            &queries.as_slice()[start * queries.dim()..end * queries.dim()],
        )?;
        let table = match (params.mode, pq) {
            (SearchMode::InMemory, Some(pq)) => Some(build_pq_dist_table(&batch, pq.codebook)?),
            _ => None,
        };
        results.extend(par::map_collect(batch.len(), |q| {
            let codes = pq.zip(table.as_ref()).map(|(pq, t)| (pq.codes, t.query(q)));
            search_one(graph, base, codes, batch.row(q), start + q, params)
        }));
        start = end;
    }
    Ok(results)
}

/// Searches a single query with the graph in local memory.
///
/// `pq` carries the codes and this query's `m × 256` block of the distance
/// table; with `None` the search uses exact distances and skips re-ranking.
/// Inputs are assumed to have been checked by the caller.
pub fn search_one(
    graph: &GraphIndex,
    base: &Dense<'_>,
    pq: Option<(&CompressedVectors, &[f32])>,
    query: &[f32],
    query_id: usize,
    params: &SearchParams,
) -> QueryResult {
    match pq {
        Some((codes, block)) => {
            let dist = PqQueryDistance::new(codes, block);
            let state = run_query(graph, query_id, &dist, params);
            finish_pq(&state, base, query, params)
        }
        None => {
            let dist = ExactQueryDistance::new(base, query);
            run_query(graph, query_id, &dist, params).result(params.k)
        }
    }
}

fn run_query<D: QueryDistance>(
    graph: &GraphIndex,
    query: usize,
    dist: &D,
    params: &SearchParams,
) -> QueryState {
    let entry = graph.medoid();
    let mut state = QueryState::new(
        query,
        entry,
        dist.distance(entry),
        params.t,
        BloomFilter::new(params.bloom_entries),
    );
    while let Some(u) = state.candidate() {
        state.step(graph.neighbours(u), dist);
    }
    state
}

fn finish_pq(
    state: &QueryState,
    base: &Dense<'_>,
    query: &[f32],
    params: &SearchParams,
) -> QueryResult {
    if !params.rerank {
        return state.result(params.k);
    }
    let log = state.visited_log();
    let r = rerank(log, |i| base.row(log[i] as usize), query, params.k);
    QueryResult {
        ids: r.ids,
        dists: r.dists,
        iterations: state.iterations(),
        converged: state.is_converged(),
        short: r.short,
    }
}
