//! Command line front end.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use log::info;

use pqgraph_core::bloom::DEFAULT_BLOOM_ENTRIES;
use pqgraph_core::build::{
    build_index, BuildParams, DEFAULT_BUILD_LIST, DEFAULT_MAX_DEGREE, DEFAULT_SIGMA,
};
use pqgraph_core::eval::{brute_force_knn, lambda_metric, recall_at_k};
use pqgraph_core::pq::{compress, train_codebook, DEFAULT_ITERS};
use pqgraph_core::search::{
    PqData, SearchMode, SearchParams, DEFAULT_BATCH, DEFAULT_K, DEFAULT_WORKLIST,
};
use pqgraph_core::VectorStore;

use crate::bench::{bench_sweep, write_bench_csv, BenchConfig};
use crate::engine::{batched_search, IndexHost};
use crate::error::Result;
use crate::io::{self, VectorFormat};
use crate::report::write_run_report;
use crate::synth::Mixture;

/// Default number of PQ subspaces.
pub const DEFAULT_M: usize = 74;

#[derive(Debug, Parser)]
#[command(
    name = "pqgraph",
    version,
    about = "Batched graph ANN search over product-quantized vectors"
)]
pub struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long, global = true, env = "BANG_THREADS")]
    pub threads: Option<usize>,
    /// Log more (repeat for debug output).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic Gaussian-mixture base and query set.
    Generate(GenerateArgs),
    /// Build the graph index.
    Build(BuildArgs),
    /// Train a PQ codebook and compress the base vectors.
    Compress(CompressArgs),
    /// Compute exact ground truth.
    Gt(GtArgs),
    /// Run a batched search.
    Search(SearchArgs),
    /// Run a parameter sweep from a config file.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, default_value_t = 100_000)]
    pub n: usize,
    #[arg(long, default_value_t = 64)]
    pub dim: usize,
    #[arg(long, default_value_t = 10_000)]
    pub queries: usize,
    #[arg(long, default_value_t = 100)]
    pub clusters: usize,
    /// Dimension of each cluster's noise subspace (defaults to `dim`).
    #[arg(long)]
    pub latent_dim: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub spread: f32,
    #[arg(long, default_value_t = 1.0)]
    pub noise: f32,
    #[arg(long)]
    pub out_base: PathBuf,
    #[arg(long)]
    pub out_queries: PathBuf,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[arg(long)]
    pub base: PathBuf,
    /// Vector format; inferred from the extension when omitted.
    #[arg(long)]
    pub format: Option<VectorFormat>,
    /// Out-degree bound.
    #[arg(long = "R", visible_alias = "max-degree", default_value_t = DEFAULT_MAX_DEGREE)]
    pub max_degree: usize,
    /// Worklist size during construction.
    #[arg(long = "L", visible_alias = "build-list", default_value_t = DEFAULT_BUILD_LIST)]
    pub build_list: usize,
    #[arg(long, default_value_t = DEFAULT_SIGMA)]
    pub sigma: f32,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CompressArgs {
    #[arg(long)]
    pub base: PathBuf,
    #[arg(long)]
    pub format: Option<VectorFormat>,
    /// Number of subspaces.
    #[arg(long, default_value_t = DEFAULT_M)]
    pub m: usize,
    /// Lloyd iterations per subspace.
    #[arg(long, default_value_t = DEFAULT_ITERS)]
    pub iters: usize,
    #[arg(long)]
    pub out_codebook: PathBuf,
    #[arg(long)]
    pub out_codes: PathBuf,
}

#[derive(Debug, Args)]
pub struct GtArgs {
    #[arg(long)]
    pub base: PathBuf,
    #[arg(long)]
    pub queries: PathBuf,
    #[arg(long)]
    pub format: Option<VectorFormat>,
    #[arg(long, default_value_t = DEFAULT_K)]
    pub k: usize,
    /// `.ivecs` writes ids only; anything else the binary ground-truth format.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub codes: Option<PathBuf>,
    #[arg(long)]
    pub codebook: Option<PathBuf>,
    #[arg(long)]
    pub base: PathBuf,
    #[arg(long)]
    pub queries: PathBuf,
    #[arg(long)]
    pub format: Option<VectorFormat>,
    #[arg(long, default_value_t = DEFAULT_K)]
    pub k: usize,
    /// Worklist size.
    #[arg(long, default_value_t = DEFAULT_WORKLIST)]
    pub t: usize,
    #[arg(long, default_value_t = SearchMode::Pipelined)]
    pub mode: SearchMode,
    /// Bloom filter cells per query; smaller values trade recall for memory.
    #[arg(long, default_value_t = DEFAULT_BLOOM_ENTRIES)]
    pub bloom_entries: usize,
    /// Queries per batch.
    #[arg(long, default_value_t = DEFAULT_BATCH)]
    pub batch: usize,
    /// Skip exact re-ranking of the visited candidates.
    #[arg(long)]
    pub no_rerank: bool,
    /// Ground truth for a recall summary (binary format or `.ivecs`).
    #[arg(long)]
    pub gt: Option<PathBuf>,
    /// Result ids as ivecs, `k` per row, padded with -1.
    #[arg(long)]
    pub out: PathBuf,
    /// Per-query CSV report.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

fn threads(cli: &Cli) -> usize {
    cli.threads
        .filter(|&t| t > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn read(path: &Path, format: Option<VectorFormat>) -> Result<VectorStore> {
    let v = io::read_vectors(path, format)?;
    info!(
        "{}: {} × {} {}",
        path.display(),
        v.count(),
        v.dim(),
        v.scalar()
    );
    Ok(v)
}

/// Runs one command inside a thread pool of the requested size.
pub fn run(cli: Cli) -> Result<()> {
    let threads = threads(&cli);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| crate::Error::Worker(e.to_string()))?;
    pool.install(|| match &cli.command {
        Command::Generate(a) => generate(a, cli.seed),
        Command::Build(a) => build(a, cli.seed),
        Command::Compress(a) => compress_cmd(a, cli.seed),
        Command::Gt(a) => gt(a),
        Command::Search(a) => search(a, threads),
        Command::Bench(a) => {
            let cfg = BenchConfig::load(&a.config)?;
            let rows = bench_sweep(&cfg, threads)?;
            write_bench_csv(&a.out, &rows)?;
            println!("{} rows written to {}", rows.len(), a.out.display());
            Ok(())
        }
    })
}

fn generate(a: &GenerateArgs, seed: u64) -> Result<()> {
    let mix = Mixture {
        dim: a.dim,
        clusters: a.clusters,
        spread: a.spread,
        noise: a.noise,
        latent_dim: a.latent_dim.unwrap_or(a.dim),
        seed,
    };
    io::write_vectors(&a.out_base, &mix.sample(a.n, 0)?, None)?;
    io::write_vectors(&a.out_queries, &mix.sample(a.queries, 1)?, None)?;
    println!(
        "wrote {} base and {} query vectors of dim {}",
        a.n, a.queries, a.dim
    );
    Ok(())
}

fn build(a: &BuildArgs, seed: u64) -> Result<()> {
    let base = read(&a.base, a.format)?;
    let params = BuildParams {
        max_degree: a.max_degree,
        build_list: a.build_list,
        sigma: a.sigma,
        seed,
    };
    let graph = build_index(&base, &params)?;
    io::write_graph(&a.out, &graph)?;
    println!("medoid {}", graph.medoid());
    println!("degree histogram (degree: nodes)");
    for (d, count) in graph
        .degree_histogram()
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
    {
        println!("  {d}: {count}");
    }
    Ok(())
}

fn compress_cmd(a: &CompressArgs, seed: u64) -> Result<()> {
    let base = read(&a.base, a.format)?;
    let (codebook, report) = train_codebook(&base, a.m, a.iters, seed)?;
    if report.padded() {
        log::warn!(
            "subspaces {:?} had fewer than 256 distinct points",
            report.padded_subspaces
        );
    }
    let codes = compress(&base, &codebook)?;
    io::write_codebook(&a.out_codebook, &codebook)?;
    io::write_codes(&a.out_codes, &codes)?;
    if let (Some(first), Some(last)) = (report.objective.first(), report.objective.last()) {
        println!("m = {}: quantization error {first:.4} -> {last:.4}", a.m);
    }
    Ok(())
}

fn gt(a: &GtArgs) -> Result<()> {
    let base = read(&a.base, a.format)?;
    let queries = read(&a.queries, a.format)?;
    let gt = brute_force_knn(&base.dense(), &queries.dense(), a.k)?;
    if a.out.extension().is_some_and(|e| e == "ivecs") {
        let ids: Vec<i32> = gt.all_ids().iter().map(|&i| i as i32).collect();
        io::write_ivecs(&a.out, a.k, &ids)?;
    } else {
        io::write_ground_truth(&a.out, &gt)?;
    }
    println!("ground truth for {} queries, k = {}", gt.query_count(), a.k);
    Ok(())
}

fn search(a: &SearchArgs, threads: usize) -> Result<()> {
    let graph = io::read_graph(&a.graph)?;
    let base = read(&a.base, a.format)?;
    let queries = read(&a.queries, a.format)?;
    let codebook = a.codebook.as_deref().map(io::read_codebook).transpose()?;
    let codes = a.codes.as_deref().map(io::read_codes).transpose()?;
    let params = SearchParams {
        k: a.k,
        t: a.t,
        mode: a.mode,
        bloom_entries: a.bloom_entries,
        batch_size: a.batch,
        rerank: !a.no_rerank,
    };
    let rows = base.dense();
    let qrows = queries.dense();
    let pq = match (&codebook, &codes) {
        (Some(codebook), Some(codes)) => Some(PqData { codebook, codes }),
        _ => None,
    };
    let host = IndexHost {
        graph: &graph,
        base: &rows,
    };
    let out = batched_search(host, pq, &qrows, &params, threads)?;

    io::write_results(&a.out, &out.results, a.k)?;
    if let Some(report) = &a.report {
        write_run_report(report, &out)?;
    }
    let its = out.iterations();
    if !its.is_empty() {
        println!(
            "{} queries, {:.1} QPS, lambda {:.2}%",
            its.len(),
            out.qps(),
            lambda_metric(&its, a.t)?
        );
    }
    let short = out.results.iter().filter(|r| r.short).count();
    if short > 0 {
        println!("{short} queries returned fewer than {} ids", a.k);
    }
    if let Some(path) = &a.gt {
        let gt = if path.extension().is_some_and(|e| e == "ivecs") {
            io::read_ground_truth_ivecs(path, &rows, &qrows)?
        } else {
            io::read_ground_truth(path)?
        };
        println!(
            "{}-recall@{}: {:.4}",
            a.k,
            a.k,
            recall_at_k(&out.ids(), &gt, a.k)?
        );
    }
    Ok(())
}
