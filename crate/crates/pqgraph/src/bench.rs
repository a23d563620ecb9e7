//! Parameter sweeps driven by a flat `key = value` config.
//!
//! ```text
//! # comments start with '#'
//! dataset = synth-100k
//! base = base.fvecs
//! queries = queries.fvecs
//! gt = gt.bin            # optional; .ivecs also accepted
//! graph = index.graph    # optional; otherwise built with R, L, sigma
//! modes = pipelined, exact_distance
//! m = 8, 16, 32
//! t = 10, 20, 40, 80, 152
//! batch = 10000
//! ```
//!
//! Relative paths are resolved against the config file's directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use log::info;

use pqgraph_core::build::{build_index, BuildParams};
use pqgraph_core::eval::{brute_force_knn, completion_fraction, lambda_metric, recall_at_k};
use pqgraph_core::pq::{compress, train_codebook, DEFAULT_ITERS};
use pqgraph_core::search::{PqData, SearchMode, SearchParams};
use pqgraph_core::GroundTruth;

use crate::engine::{batched_search, IndexHost};
use crate::error::{Error, Result};
use crate::io;

/// Iteration budget, as a multiple of `t`, for the completion column.
pub const COMPLETION_FACTOR: f64 = 1.1;

pub const BENCH_COLUMNS: [&str; 9] = [
    "dataset",
    "mode",
    "m",
    "t",
    "batch",
    "recall",
    "qps",
    "lambda",
    "completion",
];

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub dataset: String,
    pub base: PathBuf,
    pub queries: PathBuf,
    pub gt: Option<PathBuf>,
    pub graph: Option<PathBuf>,
    pub build: BuildParams,
    pub modes: Vec<SearchMode>,
    pub m: Vec<usize>,
    pub t: Vec<usize>,
    pub batch: Vec<usize>,
    pub k: usize,
    pub iters: usize,
    pub bloom_entries: usize,
    pub rerank: bool,
    pub seed: u64,
}

fn config_err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("line {line}: {msg}"))
}

fn parse_one<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    v.parse()
        .map_err(|e| config_err(line, format!("`{key}`: {e}")))
}

fn parse_list<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    let items: Vec<T> = v
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_one(line, key, s))
        .collect::<Result<_>>()?;
    if items.is_empty() {
        return Err(config_err(line, format!("`{key}` is empty")));
    }
    Ok(items)
}

impl BenchConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn parse(text: &str, dir: &Path) -> Result<Self> {
        let mut entries: BTreeMap<String, (usize, String)> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                config_err(i + 1, format!("expected `key = value`, got `{line}`"))
            })?;
            let key = key.trim().to_ascii_lowercase();
            if entries
                .insert(key.clone(), (i + 1, value.trim().to_string()))
                .is_some()
            {
                return Err(config_err(i + 1, format!("`{key}` given twice")));
            }
        }

        let mut take = |key: &str| entries.remove(key);
        let path = |(_, v): (usize, String)| dir.join(v);
        let required = |key: &str, v: Option<(usize, String)>| {
            v.ok_or_else(|| Error::Config(format!("missing `{key}`")))
        };

        let base = path(required("base", take("base"))?);
        let queries = path(required("queries", take("queries"))?);
        let gt = take("gt").map(path);
        let graph = take("graph").map(path);
        let dataset = take("dataset").map(|(_, v)| v).unwrap_or_else(|| {
            base.file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default()
        });

        let mut build = BuildParams::default();
        if let Some((l, v)) = take("r") {
            build.max_degree = parse_one(l, "R", &v)?;
        }
        if let Some((l, v)) = take("l") {
            build.build_list = parse_one(l, "L", &v)?;
        }
        if let Some((l, v)) = take("sigma") {
            build.sigma = parse_one(l, "sigma", &v)?;
        }
        let seed = match take("seed") {
            Some((l, v)) => parse_one(l, "seed", &v)?,
            None => 0,
        };
        build.seed = seed;

        let modes = match take("modes") {
            Some((l, v)) => parse_list::<SearchMode>(l, "modes", &v)?,
            None => vec![SearchMode::Pipelined],
        };
        let t = match take("t") {
            Some((l, v)) => parse_list(l, "t", &v)?,
            None => return Err(Error::Config("missing `t`".into())),
        };
        let m = match take("m") {
            Some((l, v)) => parse_list(l, "m", &v)?,
            None if modes.iter().any(|m| m.uses_pq()) => {
                return Err(Error::Config("missing `m` for a PQ mode".into()))
            }
            None => Vec::new(),
        };
        let list_or = |v: Option<(usize, String)>, key: &str, default: usize| match v {
            Some((l, v)) => parse_list(l, key, &v),
            None => Ok(vec![default]),
        };
        let batch = list_or(take("batch"), "batch", pqgraph_core::search::DEFAULT_BATCH)?;
        let one_or = |v: Option<(usize, String)>, key: &str, default: usize| match v {
            Some((l, v)) => parse_one(l, key, &v),
            None => Ok(default),
        };
        let k = one_or(take("k"), "k", pqgraph_core::search::DEFAULT_K)?;
        let iters = one_or(take("iters"), "iters", DEFAULT_ITERS)?;
        let bloom_entries = one_or(
            take("bloom_entries"),
            "bloom_entries",
            pqgraph_core::bloom::DEFAULT_BLOOM_ENTRIES,
        )?;
        let rerank = match take("rerank") {
            Some((l, v)) => parse_one(l, "rerank", &v)?,
            None => true,
        };

        if let Some((key, (l, _))) = entries.into_iter().next() {
            return Err(config_err(l, format!("unknown key `{key}`")));
        }
        Ok(Self {
            dataset,
            base,
            queries,
            gt,
            graph,
            build,
            modes,
            m,
            t,
            batch,
            k,
            iters,
            bloom_entries,
            rerank,
            seed,
        })
    }
}

/// One cell of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub dataset: String,
    pub mode: SearchMode,
    /// `None` for exact-distance runs, which use no codes.
    pub m: Option<usize>,
    pub t: usize,
    pub batch: usize,
    pub recall: f64,
    pub qps: f64,
    pub lambda: f64,
    /// Fraction of queries converged within [`COMPLETION_FACTOR`]` × t` iterations.
    pub completion: f64,
}

impl BenchRow {
    pub fn record(&self) -> [String; 9] {
        [
            self.dataset.clone(),
            self.mode.to_string(),
            self.m.map(|m| m.to_string()).unwrap_or_default(),
            self.t.to_string(),
            self.batch.to_string(),
            format!("{:.4}", self.recall),
            format!("{:.1}", self.qps),
            format!("{:.2}", self.lambda),
            format!("{:.4}", self.completion),
        ]
    }
}

fn load_gt(
    cfg: &BenchConfig,
    base: &pqgraph_core::Dense<'_>,
    queries: &pqgraph_core::Dense<'_>,
) -> Result<GroundTruth> {
    match &cfg.gt {
        Some(p) if p.extension().is_some_and(|e| e == "ivecs") => {
            io::read_ground_truth_ivecs(p, base, queries)
        }
        Some(p) => io::read_ground_truth(p),
        None => Ok(brute_force_knn(base, queries, cfg.k)?),
    }
}

/// Runs every (m, mode, batch, t) cell. Exact-distance cells ignore `m` and
/// run once per (batch, t).
pub fn bench_sweep(cfg: &BenchConfig, threads: usize) -> Result<Vec<BenchRow>> {
    let base = io::read_vectors(&cfg.base, None)?;
    let queries = io::read_vectors(&cfg.queries, None)?;
    let rows = base.dense();
    let qrows = queries.dense();
    let gt = load_gt(cfg, &rows, &qrows)?;
    let graph = match &cfg.graph {
        Some(p) => io::read_graph(p)?,
        None => {
            info!("building graph over {} points", base.count());
            build_index(&base, &cfg.build)?
        }
    };
    let host = IndexHost {
        graph: &graph,
        base: &rows,
    };

    let mut out = Vec::new();
    let mut run = |mode: SearchMode, m: Option<usize>, pq: Option<PqData<'_>>| -> Result<()> {
        for &batch in &cfg.batch {
            for &t in &cfg.t {
                let params = SearchParams {
                    k: cfg.k,
                    t,
                    mode,
                    bloom_entries: cfg.bloom_entries,
                    batch_size: batch,
                    rerank: cfg.rerank,
                };
                let res = batched_search(host, pq, &qrows, &params, threads)?;
                let its = res.iterations();
                let row = BenchRow {
                    dataset: cfg.dataset.clone(),
                    mode,
                    m,
                    t,
                    batch,
                    recall: recall_at_k(&res.ids(), &gt, cfg.k)?,
                    qps: res.qps(),
                    lambda: if its.is_empty() {
                        0.0
                    } else {
                        lambda_metric(&its, t)?
                    },
                    completion: completion_fraction(&its, t, COMPLETION_FACTOR),
                };
                info!("{:?}", row.record());
                out.push(row);
            }
        }
        Ok(())
    };

    for &m in &cfg.m {
        if !cfg.modes.iter().any(|mode| mode.uses_pq()) {
            break;
        }
        let (codebook, _) = train_codebook(&base, m, cfg.iters, cfg.seed)?;
        let codes = compress(&base, &codebook)?;
        let pq = PqData {
            codebook: &codebook,
            codes: &codes,
        };
        for &mode in cfg.modes.iter().filter(|m| m.uses_pq()) {
            run(mode, Some(m), Some(pq))?;
        }
    }
    if cfg.modes.contains(&SearchMode::ExactDistance) {
        run(SearchMode::ExactDistance, None, None)?;
    }
    Ok(out)
}

pub fn write_bench_csv(path: &Path, rows: &[BenchRow]) -> Result<()> {
    let csv_err = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::format(path, format!("{other:?}")),
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(BENCH_COLUMNS).map_err(csv_err)?;
    for r in rows {
        w.write_record(r.record()).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
