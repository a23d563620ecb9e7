//! Batched search driver.
//!
//! In pipelined mode the index host (graph and full vectors) and the search
//! engine (codes and distance table) run as separate thread groups joined by
//! two bounded queues: candidate requests flow to the host, neighbour lists
//! and the candidate's full vector flow back. Each engine worker owns the
//! queries `q` with `q % workers == w`, so a query's state is only ever
//! touched by one thread and results do not depend on scheduling.

use std::thread;
use std::time::{Duration, Instant};

use crossbeam_channel::{bounded, Receiver, Sender};
use log::debug;
use rayon::prelude::*;

use pqgraph_core::bloom::BloomFilter;
use pqgraph_core::pq::{build_pq_dist_table, PqDistTable};
use pqgraph_core::search::{
    check_inputs, rerank, search_one, PqData, PqQueryDistance, QueryDistance, QueryResult,
    QueryState, SearchMode, SearchParams,
};
use pqgraph_core::{Dense, GraphIndex};

use crate::error::{Error, Result};

/// Graph and full-precision vectors, read-only and shared by the host workers.
#[derive(Clone, Copy)]
pub struct IndexHost<'a> {
    pub graph: &'a GraphIndex,
    pub base: &'a Dense<'a>,
}

impl IndexHost<'_> {
    fn fetch(&self, node: u32) -> (Vec<u32>, Vec<f32>) {
        (
            self.graph.neighbours(node).to_vec(),
            self.base.row(node as usize).to_vec(),
        )
    }
}

/// Results of one run.
#[derive(Debug, Clone)]
pub struct SearchOutput {
    pub results: Vec<QueryResult>,
    /// Time from the start of each query's batch until its result was final.
    pub latency: Vec<Duration>,
    /// Whole search, distance tables and re-ranking included.
    pub elapsed: Duration,
}

impl SearchOutput {
    pub fn qps(&self) -> f64 {
        self.results.len() as f64 / self.elapsed.as_secs_f64().max(1e-9)
    }

    pub fn iterations(&self) -> Vec<u32> {
        self.results.iter().map(|r| r.iterations).collect()
    }

    pub fn ids(&self) -> Vec<Vec<u32>> {
        self.results.iter().map(|r| r.ids.clone()).collect()
    }
}

/// Runs every query in `queries` in batches of `params.batch_size`, using
/// `threads` workers (per side, in pipelined mode). Output is identical for
/// any `threads`.
pub fn batched_search(
    host: IndexHost<'_>,
    pq: Option<PqData<'_>>,
    queries: &Dense<'_>,
    params: &SearchParams,
    threads: usize,
) -> Result<SearchOutput> {
    check_inputs(host.graph, host.base, pq, queries, params)?;
    let threads = threads.max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Worker(e.to_string()))?;

    let started = Instant::now();
    let mut results = Vec::with_capacity(queries.len());
    let mut latency = Vec::with_capacity(queries.len());
    let dim = queries.dim();
    for (b, start) in (0..queries.len()).step_by(params.batch_size).enumerate() {
        let end = (start + params.batch_size).min(queries.len());
        let batch = Dense::new(dim, &queries.as_slice()[start * dim..end * dim])?;
        let batch_started = Instant::now();
        let table = match (params.mode.uses_pq(), pq) {
            (true, Some(pq)) => Some(pool.install(|| build_pq_dist_table(&batch, pq.codebook))?),
            _ => None,
        };
        let out = match params.mode {
            SearchMode::Pipelined => {
                let pq = pq.expect("checked");
                let table = table.as_ref().expect("built above");
                pipelined_batch(
                    host,
                    pq,
                    table,
                    &batch,
                    start,
                    params,
                    threads,
                    batch_started,
                )?
            }
            _ => pool.install(|| {
                (0..batch.len())
                    .into_par_iter()
                    .map(|q| {
                        let codes = pq.zip(table.as_ref()).map(|(pq, t)| (pq.codes, t.query(q)));
                        let r = search_one(
                            host.graph,
                            host.base,
                            codes,
                            batch.row(q),
                            start + q,
                            params,
                        );
                        (r, batch_started.elapsed())
                    })
                    .collect::<Vec<_>>()
            }),
        };
        debug!(
            "batch {b}: {} queries in {:?}",
            batch.len(),
            batch_started.elapsed()
        );
        for (r, t) in out {
            results.push(r);
            latency.push(t);
        }
    }
    Ok(SearchOutput {
        results,
        latency,
        elapsed: started.elapsed(),
    })
}

struct Request {
    query: usize,
    node: u32,
    worker: usize,
}

struct Response {
    query: usize,
    neighbours: Vec<u32>,
    vector: Vec<f32>,
}

/// Per-query engine state plus the full vectors received so far, in the
/// order of the visited log.
struct Slot {
    state: QueryState,
    vectors: Vec<f32>,
}

#[allow(clippy::too_many_arguments)]
fn pipelined_batch(
    host: IndexHost<'_>,
    pq: PqData<'_>,
    table: &PqDistTable,
    batch: &Dense<'_>,
    offset: usize,
    params: &SearchParams,
    workers: usize,
    batch_started: Instant,
) -> Result<Vec<(QueryResult, Duration)>> {
    let n = batch.len();
    let workers = workers.min(n).max(1);
    // At most one request per live query is in flight, so neither queue can
    // fill up and block.
    let (req_tx, req_rx) = bounded::<Request>(params.batch_size);
    let (resp_txs, resp_rxs): (Vec<Sender<Response>>, Vec<Receiver<Response>>) =
        (0..workers).map(|_| bounded(params.batch_size)).unzip();

    let ctx = BatchCtx {
        pq,
        table,
        batch,
        offset,
        medoid: host.graph.medoid(),
        dim: host.base.dim(),
        params,
        started: batch_started,
    };
    let per_worker = thread::scope(|s| {
        for _ in 0..workers {
            let req_rx = req_rx.clone();
            let resp_txs = resp_txs.clone();
            s.spawn(move || {
                for req in req_rx {
                    let (neighbours, vector) = host.fetch(req.node);
                    let resp = Response {
                        query: req.query,
                        neighbours,
                        vector,
                    };
                    if resp_txs[req.worker].send(resp).is_err() {
                        break;
                    }
                }
            });
        }
        drop(req_rx);
        drop(resp_txs);

        let handles: Vec<_> = resp_rxs
            .into_iter()
            .enumerate()
            .map(|(w, rx)| {
                let req_tx = req_tx.clone();
                s.spawn(move || engine_worker(w, workers, rx, req_tx, ctx))
            })
            .collect();
        drop(req_tx);
        handles
            .into_iter()
            .map(|h| {
                h.join()
                    .map_err(|_| Error::Worker("engine worker panicked".into()))?
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let mut out: Vec<Option<(QueryResult, Duration)>> = vec![None; n];
    for (q, r, t) in per_worker.into_iter().flatten() {
        out[q] = Some((r, t));
    }
    out.into_iter()
        .map(|r| r.ok_or_else(|| Error::Worker("query left unanswered".into())))
        .collect()
}

/// Read-only inputs shared by the engine workers of one batch.
#[derive(Clone, Copy)]
struct BatchCtx<'a> {
    pq: PqData<'a>,
    table: &'a PqDistTable,
    batch: &'a Dense<'a>,
    offset: usize,
    medoid: u32,
    dim: usize,
    params: &'a SearchParams,
    started: Instant,
}

fn engine_worker(
    w: usize,
    workers: usize,
    rx: Receiver<Response>,
    req_tx: Sender<Request>,
    ctx: BatchCtx<'_>,
) -> Result<Vec<(usize, QueryResult, Duration)>> {
    let disconnected = || Error::Worker("index host hung up".into());
    let params = ctx.params;
    let mut slots: Vec<Option<Slot>> = (0..ctx.batch.len()).map(|_| None).collect();
    let owned: Vec<usize> = (w..ctx.batch.len()).step_by(workers).collect();
    for &q in &owned {
        let dist = PqQueryDistance::new(ctx.pq.codes, ctx.table.query(q));
        let state = QueryState::new(
            ctx.offset + q,
            ctx.medoid,
            dist.distance(ctx.medoid),
            params.t,
            BloomFilter::new(params.bloom_entries),
        );
        slots[q] = Some(Slot {
            state,
            vectors: Vec::new(),
        });
        let req = Request {
            query: q,
            node: ctx.medoid,
            worker: w,
        };
        req_tx.send(req).map_err(|_| disconnected())?;
    }

    let mut live = owned.len();
    let mut done = Vec::with_capacity(owned.len());
    while live > 0 {
        let resp = rx.recv().map_err(|_| disconnected())?;
        let q = resp.query;
        let slot = slots[q].as_mut().expect("response for an owned query");
        let dist = PqQueryDistance::new(ctx.pq.codes, ctx.table.query(q));
        slot.vectors.extend_from_slice(&resp.vector);
        // Request the next candidate before sorting and merging, so the host
        // fetch overlaps with the rest of this iteration.
        if let Some(next) = slot.state.expand(&resp.neighbours, &dist) {
            let req = Request {
                query: q,
                node: next,
                worker: w,
            };
            req_tx.send(req).map_err(|_| disconnected())?;
        }
        slot.state.settle();
        if slot.state.is_converged() {
            live -= 1;
            let slot = slots[q].take().expect("present");
            let result = finish(&slot, ctx.dim, ctx.batch.row(q), params);
            done.push((q, result, ctx.started.elapsed()));
        }
    }
    Ok(done)
}

fn finish(slot: &Slot, dim: usize, query: &[f32], params: &SearchParams) -> QueryResult {
    let state = &slot.state;
    if !params.rerank {
        return state.result(params.k);
    }
    let log = state.visited_log();
    let r = rerank(
        log,
        |i| &slot.vectors[i * dim..(i + 1) * dim],
        query,
        params.k,
    );
    QueryResult {
        ids: r.ids,
        dists: r.dists,
        iterations: state.iterations(),
        converged: state.is_converged(),
        short: r.short,
    }
}
