use std::path::Path;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::tempdir;

use pqgraph::io::*;
use pqgraph::Error;
use pqgraph_core::pq::{subspace_sizes, CompressedVectors, PqCodebook, CENTROIDS};
use pqgraph_core::{GraphIndex, GroundTruth, ScalarKind, VectorStore};

#[allow(dead_code)]
#[path = "../../core/tests/common/toy.rs"]
mod toy;

fn random_graph(n: usize, r: usize, seed: u64) -> GraphIndex {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let adjacency = (0..n)
        .map(|u| {
            let len = rng.random_range(0..=r.min(n - 1));
            rand::seq::index::sample(&mut rng, n - 1, len)
                .into_iter()
                .map(|v| if v >= u { v + 1 } else { v } as u32)
                .collect()
        })
        .collect();
    GraphIndex::new(r, rng.random_range(0..n as u32), adjacency).unwrap()
}

fn random_codebook(dim: usize, m: usize, seed: u64) -> PqCodebook {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sizes = subspace_sizes(dim, m).unwrap();
    let tables = sizes
        .iter()
        .map(|&s| (0..s * CENTROIDS).map(|_| rng.random()).collect())
        .collect();
    PqCodebook::new(dim, sizes, tables).unwrap()
}

#[test]
fn f32_vectors_round_trip_bit_exactly() {
    let dir = tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let data: Vec<f32> = (0..1000 * 16)
        .map(|_| rng.random::<f32>() * 100.0 - 50.0)
        .collect();
    let store = VectorStore::from_f32(16, data).unwrap();
    for name in ["a.fvecs", "a.fbin"] {
        let p = dir.path().join(name);
        write_vectors(&p, &store, None).unwrap();
        let back = read_vectors(&p, None).unwrap();
        assert_eq!((back.count(), back.dim()), (1000, 16));
        let bits = |s: &VectorStore| {
            s.dense()
                .as_slice()
                .iter()
                .map(|x| x.to_bits())
                .collect::<Vec<_>>()
        };
        assert_eq!(bits(&back), bits(&store));
        let copy = dir.path().join(format!("copy-{name}"));
        write_vectors(&copy, &back, None).unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), std::fs::read(&copy).unwrap());
    }
}

#[test]
fn byte_vectors_round_trip() {
    let dir = tempdir().unwrap();
    let u = VectorStore::from_u8(3, vec![0, 1, 255, 7, 8, 9]).unwrap();
    let i = VectorStore::from_i8(2, vec![-128, 127, 0, -1]).unwrap();
    for (name, store) in [("u.bvecs", &u), ("u.u8bin", &u), ("i.i8bin", &i)] {
        let p = dir.path().join(name);
        write_vectors(&p, store, None).unwrap();
        let back = read_vectors(&p, None).unwrap();
        assert_eq!(back.data(), store.data(), "{name}");
    }
    let p = dir.path().join("wrong.fvecs");
    assert!(matches!(
        write_vectors(&p, &u, None),
        Err(Error::Format { .. })
    ));
}

#[test]
fn empty_files_give_empty_stores() {
    let dir = tempdir().unwrap();
    for (name, scalar) in [
        ("e.fvecs", ScalarKind::F32),
        ("e.bvecs", ScalarKind::U8),
        ("e.fbin", ScalarKind::F32),
    ] {
        let p = dir.path().join(name);
        std::fs::write(&p, []).unwrap();
        let s = read_vectors(&p, None).unwrap();
        assert_eq!(s.count(), 0);
        assert_eq!(s.scalar(), scalar);
    }
}

#[test]
fn explicit_format_overrides_extension() {
    let dir = tempdir().unwrap();
    let p = dir.path().join("data.dat");
    let s = VectorStore::from_f32(2, vec![1.0, 2.0]).unwrap();
    assert!(matches!(
        write_vectors(&p, &s, None),
        Err(Error::Format { .. })
    ));
    write_vectors(&p, &s, Some(VectorFormat::Fvecs)).unwrap();
    assert_eq!(
        read_vectors(&p, Some(VectorFormat::Fvecs)).unwrap().count(),
        1
    );
}

#[test]
fn toy_graph_round_trips() {
    let dir = tempdir().unwrap();
    let p = dir.path().join("toy.graph");
    let g = toy::graph();
    write_graph(&p, &g).unwrap();
    assert_eq!(read_graph(&p).unwrap(), g);

    let single = GraphIndex::new(1, 0, vec![vec![]]).unwrap();
    write_graph(&p, &single).unwrap();
    assert_eq!(read_graph(&p).unwrap(), single);
}

#[test]
fn random_graph_round_trips() {
    let dir = tempdir().unwrap();
    let p = dir.path().join("g");
    let g = random_graph(500, 8, 3);
    write_graph(&p, &g).unwrap();
    let bytes = std::fs::read(&p).unwrap();
    assert_eq!(read_graph(&p).unwrap(), g);
    write_graph(&p, &read_graph(&p).unwrap()).unwrap();
    assert_eq!(std::fs::read(&p).unwrap(), bytes);
}

fn corrupt(p: &Path, at: usize, value: &[u8]) {
    let mut b = std::fs::read(p).unwrap();
    b[at..at + value.len()].copy_from_slice(value);
    std::fs::write(p, b).unwrap();
}

#[test]
fn graph_reader_rejects_bad_files() {
    let dir = tempdir().unwrap();
    let p = dir.path().join("g");
    write_graph(&p, &toy::graph()).unwrap();
    corrupt(&p, 0, b"XXXX");
    assert!(matches!(read_graph(&p), Err(Error::Format { .. })));

    write_graph(&p, &toy::graph()).unwrap();
    corrupt(&p, 4, &9u32.to_le_bytes());
    assert!(matches!(read_graph(&p), Err(Error::Format { .. })));

    // First neighbour of node 0 sits after the 20-byte header and a length.
    write_graph(&p, &toy::graph()).unwrap();
    corrupt(&p, 24, &12u32.to_le_bytes());
    let err = read_graph(&p).unwrap_err();
    assert!(matches!(err, Error::Format { .. }), "{err}");

    write_graph(&p, &toy::graph()).unwrap();
    let b = std::fs::read(&p).unwrap();
    std::fs::write(&p, &b[..b.len() - 2]).unwrap();
    assert!(matches!(read_graph(&p), Err(Error::Io { .. })));
}

#[test]
fn codebooks_round_trip() {
    let dir = tempdir().unwrap();
    let p = dir.path().join("cb");
    let toy_cb = toy::codebook();
    write_codebook(&p, &toy_cb).unwrap();
    assert_eq!(read_codebook(&p).unwrap(), toy_cb);

    // 128 dims over 74 subspaces: 54 of size 2, 20 of size 1.
    let cb = random_codebook(128, 74, 4);
    write_codebook(&p, &cb).unwrap();
    let bytes = std::fs::read(&p).unwrap();
    let back = read_codebook(&p).unwrap();
    assert_eq!(back, cb);
    assert_eq!(
        back.subspace_sizes().iter().filter(|&&s| s == 2).count(),
        54
    );
    write_codebook(&p, &back).unwrap();
    assert_eq!(std::fs::read(&p).unwrap(), bytes);
}

#[test]
fn codebook_with_inconsistent_sizes_is_rejected() {
    let dir = tempdir().unwrap();
    let p = dir.path().join("cb");
    write_codebook(&p, &random_codebook(8, 2, 1)).unwrap();
    // dim field follows magic and version.
    corrupt(&p, 8, &9u32.to_le_bytes());
    assert!(matches!(read_codebook(&p), Err(Error::Format { .. })));
}

#[test]
fn codes_and_ground_truth_round_trip() {
    let dir = tempdir().unwrap();
    let p = dir.path().join("c");
    let codes = CompressedVectors::new(3, (0..=255u8).cycle().take(300).collect()).unwrap();
    write_codes(&p, &codes).unwrap();
    assert_eq!(read_codes(&p).unwrap(), codes);

    let gt = GroundTruth::new(2, vec![10, 8, 1, 2], vec![73.0, 433.0, 0.5, 0.5]).unwrap();
    write_ground_truth(&p, &gt).unwrap();
    assert_eq!(read_ground_truth(&p).unwrap(), gt);
}

#[test]
fn ivecs_ground_truth_recomputes_distances() {
    let dir = tempdir().unwrap();
    let p = dir.path().join("gt.ivecs");
    write_ivecs(&p, 2, &[8, 10]).unwrap();
    let base = toy::base();
    let gt = read_ground_truth_ivecs(&p, &base.dense(), &toy::dense_query()).unwrap();
    assert_eq!(gt.ids(0), &[10, 8]);
    assert_eq!(gt.dists(0), &[73.0, 433.0]);

    write_ivecs(&p, 2, &[8, 12]).unwrap();
    assert!(read_ground_truth_ivecs(&p, &base.dense(), &toy::dense_query()).is_err());
}

#[test]
fn short_results_are_padded() {
    use pqgraph_core::search::QueryResult;
    let dir = tempdir().unwrap();
    let p = dir.path().join("r.ivecs");
    let r = |ids: Vec<u32>| QueryResult {
        dists: vec![0.0; ids.len()],
        ids,
        iterations: 1,
        converged: true,
        short: false,
    };
    write_results(&p, &[r(vec![3, 1, 2]), r(vec![5])], 3).unwrap();
    assert_eq!(read_ivecs(&p).unwrap(), (3, vec![3, 1, 2, 5, -1, -1]));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn any_graph_round_trips(n in 1usize..60, r in 1usize..10, seed in any::<u64>()) {
        let dir = tempdir().unwrap();
        let p = dir.path().join("g");
        let g = random_graph(n, r, seed);
        write_graph(&p, &g).unwrap();
        prop_assert_eq!(read_graph(&p).unwrap(), g);
    }

    #[test]
    fn any_fvecs_round_trips(rows in 0usize..20, dim in 1usize..9, seed in any::<u64>()) {
        let dir = tempdir().unwrap();
        let p = dir.path().join("v.fvecs");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data: Vec<f32> = (0..rows * dim).map(|_| f32::from_bits(rng.random::<u32>() & 0x7f7f_ffff)).collect();
        let s = VectorStore::from_f32(dim, data).unwrap();
        write_vectors(&p, &s, None).unwrap();
        let back = read_vectors(&p, None).unwrap();
        prop_assert_eq!(back.count(), rows);
        let bits = |s: &VectorStore| s.dense().as_slice().iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        prop_assert_eq!(bits(&back), bits(&s));
    }
}
