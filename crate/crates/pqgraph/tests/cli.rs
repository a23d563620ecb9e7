use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use clap::Parser;
use tempfile::TempDir;

use pqgraph::cli::{Cli, Command as Sub};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_pqgraph"));
    c.env_remove("BANG_THREADS");
    c
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = run(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    std::fs::read(dir.join(name)).unwrap()
}

/// Generates data and runs build, compress and ground truth in `dir`.
fn pipeline(dir: &Path, seed: &str) {
    ok(
        dir,
        &[
            "--seed",
            seed,
            "generate",
            "--n",
            "1500",
            "--dim",
            "12",
            "--queries",
            "60",
            "--clusters",
            "6",
            "--latent-dim",
            "3",
            "--out-base",
            "base.fvecs",
            "--out-queries",
            "queries.fvecs",
        ],
    );
    ok(
        dir,
        &[
            "--seed",
            seed,
            "build",
            "--base",
            "base.fvecs",
            "--R",
            "12",
            "--L",
            "30",
            "--out",
            "index.graph",
        ],
    );
    ok(
        dir,
        &[
            "--seed",
            seed,
            "compress",
            "--base",
            "base.fvecs",
            "--m",
            "4",
            "--iters",
            "6",
            "--out-codebook",
            "cb.bin",
            "--out-codes",
            "codes.bin",
        ],
    );
    ok(
        dir,
        &[
            "gt",
            "--base",
            "base.fvecs",
            "--queries",
            "queries.fvecs",
            "--k",
            "10",
            "--out",
            "gt.bin",
        ],
    );
}

fn search(dir: &Path, mode: &str, threads: &str, out: &str) -> String {
    ok(
        dir,
        &[
            "--threads",
            threads,
            "search",
            "--graph",
            "index.graph",
            "--codes",
            "codes.bin",
            "--codebook",
            "cb.bin",
            "--base",
            "base.fvecs",
            "--queries",
            "queries.fvecs",
            "--mode",
            mode,
            "--t",
            "24",
            "--batch",
            "25",
            "--gt",
            "gt.bin",
            "--out",
            out,
            "--report",
            &format!("{out}.csv"),
        ],
    )
}

#[test]
fn runs_are_reproducible_end_to_end() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for d in [a.path(), b.path()] {
        pipeline(d, "11");
        for mode in ["pipelined", "in_memory", "exact_distance"] {
            search(d, mode, "2", &format!("{mode}.ivecs"));
        }
    }
    for f in [
        "base.fvecs",
        "queries.fvecs",
        "index.graph",
        "cb.bin",
        "codes.bin",
        "gt.bin",
        "pipelined.ivecs",
        "in_memory.ivecs",
        "exact_distance.ivecs",
    ] {
        assert_eq!(read(a.path(), f), read(b.path(), f), "{f} differs");
    }
    let c = TempDir::new().unwrap();
    pipeline(c.path(), "12");
    assert_ne!(read(a.path(), "index.graph"), read(c.path(), "index.graph"));
}

#[test]
fn thread_count_does_not_change_results() {
    let d = TempDir::new().unwrap();
    let d = d.path();
    pipeline(d, "3");
    for mode in ["pipelined", "in_memory", "exact_distance"] {
        let one = format!("{mode}-1.ivecs");
        let eight = format!("{mode}-8.ivecs");
        let s1 = search(d, mode, "1", &one);
        search(d, mode, "8", &eight);
        assert_eq!(read(d, &one), read(d, &eight), "{mode}");
        assert!(s1.contains("10-recall@10"), "{s1}");
    }
    // Thread count taken from the environment.
    let out = bin()
        .current_dir(d)
        .env("BANG_THREADS", "5")
        .args([
            "search",
            "--graph",
            "index.graph",
            "--base",
            "base.fvecs",
            "--queries",
            "queries.fvecs",
            "--mode",
            "exact_distance",
            "--t",
            "24",
            "--batch",
            "25",
            "--out",
            "env.ivecs",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(read(d, "env.ivecs"), read(d, "exact_distance-1.ivecs"));
}

#[test]
fn report_has_one_row_per_query() {
    let d = TempDir::new().unwrap();
    let d = d.path();
    pipeline(d, "5");
    search(d, "pipelined", "2", "r.ivecs");
    let text = String::from_utf8(read(d, "r.ivecs.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("query_id,iterations,converged,wall_ms"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 60);
    assert!(rows[0].starts_with("0,"));
    assert!(rows.iter().all(|r| r.split(',').nth(2) == Some("true")));
}

#[test]
fn small_inputs_and_lower_bounds() {
    let d = TempDir::new().unwrap();
    let d = d.path();
    let pts = pqgraph_core::VectorStore::from_f32(2, vec![0.0, 0.0, 1.0, 0.0, 5.0, 5.0]).unwrap();
    pqgraph::io::write_vectors(&d.join("three.fvecs"), &pts, None).unwrap();
    let stdout = ok(
        d,
        &[
            "build",
            "--base",
            "three.fvecs",
            "--R",
            "2",
            "--L",
            "2",
            "--out",
            "three.graph",
        ],
    );
    assert!(stdout.contains("medoid"), "{stdout}");
    ok(
        d,
        &[
            "search",
            "--graph",
            "three.graph",
            "--base",
            "three.fvecs",
            "--queries",
            "three.fvecs",
            "--mode",
            "exact_distance",
            "--k",
            "3",
            "--t",
            "3",
            "--out",
            "r.ivecs",
        ],
    );
    let (dim, ids) = pqgraph::io::read_ivecs(&d.join("r.ivecs")).unwrap();
    assert_eq!(dim, 3);
    assert_eq!(&ids[..3], &[0, 1, 2]);
}

fn code(dir: &Path, args: &[&str]) -> i32 {
    run(dir, args).status.code().unwrap()
}

#[test]
fn failures_exit_with_categorized_codes() {
    let d = TempDir::new().unwrap();
    let d = d.path();
    pipeline(d, "1");
    assert_eq!(
        code(d, &["build", "--base", "missing.fvecs", "--out", "x"]),
        3
    );
    std::fs::write(d.join("bad.fvecs"), [3, 0, 0, 0, 1]).unwrap();
    assert_eq!(code(d, &["build", "--base", "bad.fvecs", "--out", "x"]), 3);
    std::fs::write(d.join("bad.graph"), b"nonsense-bytes-here-and-more").unwrap();
    assert_eq!(
        code(
            d,
            &[
                "search",
                "--graph",
                "bad.graph",
                "--base",
                "base.fvecs",
                "--queries",
                "queries.fvecs",
                "--mode",
                "exact_distance",
                "--out",
                "x"
            ]
        ),
        4
    );
    assert_eq!(
        code(
            d,
            &[
                "search",
                "--graph",
                "index.graph",
                "--base",
                "base.fvecs",
                "--queries",
                "queries.fvecs",
                "--t",
                "5",
                "--out",
                "x"
            ]
        ),
        5
    );
    assert_eq!(
        code(
            d,
            &[
                "search",
                "--graph",
                "index.graph",
                "--base",
                "base.fvecs",
                "--queries",
                "queries.fvecs",
                "--mode",
                "pipelined",
                "--out",
                "x"
            ]
        ),
        5
    );
    assert_eq!(
        code(
            d,
            &[
                "compress",
                "--base",
                "base.fvecs",
                "--m",
                "13",
                "--out-codebook",
                "a",
                "--out-codes",
                "b"
            ]
        ),
        5
    );
    assert_eq!(
        code(
            d,
            &[
                "gt",
                "--base",
                "queries.fvecs",
                "--queries",
                "base.fvecs",
                "--k",
                "61",
                "--out",
                "x"
            ]
        ),
        5
    );
    std::fs::write(
        d.join("bad.cfg"),
        "base = base.fvecs\nqueries = queries.fvecs\nt = 10\nm = 4\ncolour = red\n",
    )
    .unwrap();
    assert_eq!(
        code(d, &["bench", "--config", "bad.cfg", "--out", "x.csv"]),
        6
    );
    assert_eq!(code(d, &["search", "--mode", "warp"]), 2);
    assert!(!d.join("x").exists());
}

fn bench_rows(dir: &Path, cfg: &str, out: &str) -> Vec<Vec<String>> {
    std::fs::write(dir.join(format!("{out}.cfg")), cfg).unwrap();
    ok(
        dir,
        &["bench", "--config", &format!("{out}.cfg"), "--out", out],
    );
    let mut r = csv::Reader::from_path(dir.join(out)).unwrap();
    assert_eq!(
        r.headers().unwrap().iter().collect::<Vec<_>>(),
        [
            "dataset",
            "mode",
            "m",
            "t",
            "batch",
            "recall",
            "qps",
            "lambda",
            "completion"
        ]
    );
    r.records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect()
}

#[test]
fn bench_emits_one_row_per_cell() {
    let d = TempDir::new().unwrap();
    let d = d.path();
    pipeline(d, "2");
    let single = bench_rows(d, "base = base.fvecs\nqueries = queries.fvecs\ngraph = index.graph\ngt = gt.bin\nm = 4\nt = 20\n", "one.csv");
    assert_eq!(single.len(), 1);
    assert_eq!(&single[0][..5], ["base", "pipelined", "4", "20", "10000"]);

    let multi = "dataset = toy\nbase = base.fvecs\nqueries = queries.fvecs\nR = 10\nL = 20\nmodes = pipelined, in_memory, exact_distance\nm = 2, 4\nt = 10, 20, 40\nbatch = 16, 60\niters = 4\n";
    let a = bench_rows(d, multi, "multi.csv");
    // Two PQ modes × two m × two batches × three t, plus exact × two batches × three t.
    assert_eq!(a.len(), 2 * 2 * 2 * 3 + 2 * 3);
    assert!(a
        .iter()
        .filter(|r| r[1] == "exact_distance")
        .all(|r| r[2].is_empty()));
    let b = bench_rows(d, multi, "again.csv");
    let strip = |rows: &[Vec<String>]| {
        rows.iter()
            .map(|r| {
                let mut r = r.clone();
                r.remove(6);
                r
            })
            .collect::<Vec<_>>()
    };
    assert_eq!(strip(&a), strip(&b));
}

fn parse(args: &[&str]) -> Cli {
    Cli::try_parse_from(std::iter::once("pqgraph").chain(args.iter().copied())).unwrap()
}

#[test]
fn defaults_follow_the_reference_configuration() {
    let Sub::Build(b) = parse(&["build", "--base", "b", "--out", "o"]).command else {
        panic!()
    };
    assert_eq!((b.max_degree, b.build_list, b.sigma), (64, 200, 1.2));
    let Sub::Compress(c) = parse(&[
        "compress",
        "--base",
        "b",
        "--out-codebook",
        "c",
        "--out-codes",
        "d",
    ])
    .command
    else {
        panic!()
    };
    assert_eq!((c.m, c.iters), (74, 25));
    let cli = parse(&[
        "search",
        "--graph",
        "g",
        "--base",
        "b",
        "--queries",
        "q",
        "--out",
        "o",
    ]);
    let Sub::Search(s) = cli.command else {
        panic!()
    };
    assert_eq!(
        (s.k, s.t, s.bloom_entries, s.batch),
        (10, 152, 399_887, 10_000)
    );
    assert_eq!(s.mode, pqgraph_core::search::SearchMode::Pipelined);
    assert!(!s.no_rerank);
    assert_eq!(cli.seed, 0);
    let Sub::Search(s) = parse(&[
        "search",
        "--graph",
        "g",
        "--base",
        "b",
        "--queries",
        "q",
        "--out",
        "o",
        "--k",
        "10",
        "--t",
        "10",
        "--mode",
        "exact-distance",
    ])
    .command
    else {
        panic!()
    };
    assert_eq!((s.k, s.t), (10, 10));
    assert!(s.codes.is_none() && s.codebook.is_none());
    let _: PathBuf = s.out;
}
