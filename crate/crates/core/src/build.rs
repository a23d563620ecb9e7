//! Vamana-style graph construction: random initial graph, then two
//! insertion passes of greedy search + robust pruning.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::graph::GraphIndex;
use crate::merge::{rank_cmp, Neighbour};
use crate::vectors::{squared_l2, Dense, VectorStore};

pub const DEFAULT_MAX_DEGREE: usize = 64;
pub const DEFAULT_BUILD_LIST: usize = 200;
pub const DEFAULT_SIGMA: f32 = 1.2;

#[derive(Debug, Clone, PartialEq)]
pub struct BuildParams {
    /// Out-degree bound `R`.
    pub max_degree: usize,
    /// Worklist size used by the insertion searches.
    pub build_list: usize,
    /// Pruning slack for the second pass (the first pass uses 1.0).
    pub sigma: f32,
    pub seed: u64,
}

impl Default for BuildParams {
    fn default() -> Self {
        Self {
            max_degree: DEFAULT_MAX_DEGREE,
            build_list: DEFAULT_BUILD_LIST,
            sigma: DEFAULT_SIGMA,
            seed: 0,
        }
    }
}

impl BuildParams {
    pub fn validate(&self) -> Result<()> {
        if self.max_degree < 2 {
            return Err(invalid!(
                "degree bound R = {} must be at least 2",
                self.max_degree
            ));
        }
        if self.build_list < self.max_degree {
            return Err(invalid!(
                "build worklist L = {} is below R = {}",
                self.build_list,
                self.max_degree
            ));
        }
        if self.sigma.is_nan() || self.sigma < 1.0 {
            return Err(invalid!("sigma = {} must be at least 1.0", self.sigma));
        }
        Ok(())
    }
}

/// Index of the point nearest the arithmetic centroid (lowest id on ties).
pub fn compute_medoid(base: &VectorStore) -> Result<u32> {
    medoid_of(&base.dense())
}

pub(crate) fn medoid_of(rows: &Dense<'_>) -> Result<u32> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::Empty("medoid of an empty store"));
    }
    let dim = rows.dim();
    let mut sum = vec![0.0f64; dim];
    for i in 0..n {
        for (acc, &x) in sum.iter_mut().zip(rows.row(i)) {
            *acc += x as f64;
        }
    }
    let centroid: Vec<f32> = sum.iter().map(|&s| (s / n as f64) as f32).collect();
    let mut best = 0usize;
    let mut best_dist = f32::INFINITY;
    for i in 0..n {
        let d = squared_l2(rows.row(i), &centroid);
        if d < best_dist {
            best_dist = d;
            best = i;
        }
    }
    Ok(best as u32)
}

/// Greedy occlusion pruning of `candidates` (distances from `node`).
///
/// Repeatedly keeps the closest surviving candidate `v` and discards every
/// remaining `u` with `sigma² · d(v, u) <= d(node, u)`, until `max_degree`
/// neighbours are kept or no candidate survives. All distances are squared,
/// hence the squared slack.
pub fn robust_prune(
    node: u32,
    candidates: &[Neighbour],
    base: &Dense<'_>,
    sigma: f32,
    max_degree: usize,
) -> Vec<u32> {
    let mut pool: Vec<Neighbour> = candidates
        .iter()
        .copied()
        .filter(|c| c.id != node)
        .collect();
    pool.sort_by(rank_cmp);
    pool.dedup_by_key(|c| c.id);
    prune_sorted(&pool, base, sigma * sigma, max_degree)
}

fn prune_sorted(pool: &[Neighbour], base: &Dense<'_>, slack: f32, max_degree: usize) -> Vec<u32> {
    let mut kept = Vec::with_capacity(max_degree);
    let mut live = vec![true; pool.len()];
    for i in 0..pool.len() {
        if !live[i] {
            continue;
        }
        let v = pool[i];
        kept.push(v.id);
        if kept.len() == max_degree {
            break;
        }
        let v_vec = base.row(v.id as usize);
        for j in i + 1..pool.len() {
            if live[j] && slack * squared_l2(v_vec, base.row(pool[j].id as usize)) <= pool[j].dist {
                live[j] = false;
            }
        }
    }
    kept
}

/// Builds the graph index. Sequential and deterministic for a fixed seed.
pub fn build_index(base: &VectorStore, params: &BuildParams) -> Result<GraphIndex> {
    params.validate()?;
    let rows = base.dense();
    let n = rows.len();
    if n < 2 {
        return Err(invalid!(
            "graph construction needs at least 2 points, got {n}"
        ));
    }
    if n > u32::MAX as usize {
        return Err(invalid!("{n} points exceed the u32 id space"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let medoid = medoid_of(&rows)?;
    let mut builder = Builder::new(&rows, params, &mut rng);
    let mut order: Vec<u32> = (0..n as u32).collect();
    for sigma in [1.0, params.sigma] {
        order.shuffle(&mut rng);
        for &p in &order {
            builder.insert(p, medoid, sigma);
        }
    }
    let graph = GraphIndex::new_unchecked(params.max_degree, medoid, builder.adjacency);
    debug_assert!(graph.validate().is_ok());
    Ok(graph)
}

struct Builder<'a, 'b> {
    rows: &'a Dense<'b>,
    max_degree: usize,
    build_list: usize,
    adjacency: Vec<Vec<u32>>,
    /// `seen[v] == epoch` marks nodes already scored in the current search.
    seen: Vec<u32>,
    epoch: u32,
    list: Vec<(Neighbour, bool)>,
    expanded: Vec<Neighbour>,
}

impl<'a, 'b> Builder<'a, 'b> {
    fn new(rows: &'a Dense<'b>, params: &BuildParams, rng: &mut ChaCha8Rng) -> Self {
        let n = rows.len();
        let r = params.max_degree.min(n - 1);
        // Uniform R distinct non-self targets per node.
        let adjacency = (0..n)
            .map(|p| {
                let mut picks: Vec<u32> = index::sample(rng, n - 1, r)
                    .into_iter()
                    .map(|x| if x >= p { x as u32 + 1 } else { x as u32 })
                    .collect();
                picks.sort_unstable();
                picks
            })
            .collect();
        Self {
            rows,
            max_degree: params.max_degree,
            build_list: params.build_list,
            adjacency,
            seen: vec![0; n],
            epoch: 0,
            list: Vec::with_capacity(params.build_list + 1),
            expanded: Vec::new(),
        }
    }

    fn dist(&self, a: u32, b: u32) -> f32 {
        squared_l2(self.rows.row(a as usize), self.rows.row(b as usize))
    }

    /// Best-first search for point `target` from `start`; fills `expanded`
    /// with every node whose neighbours were examined.
    fn search(&mut self, target: u32, start: u32) {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.seen.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        let query = self.rows.row(target as usize);
        self.list.clear();
        self.expanded.clear();
        self.seen[start as usize] = self.epoch;
        self.list.push((
            Neighbour::new(start, squared_l2(self.rows.row(start as usize), query)),
            false,
        ));
        let mut cursor = 0;
        while cursor < self.list.len() {
            let u = self.list[cursor].0;
            self.list[cursor].1 = true;
            self.expanded.push(u);
            let mut lowest_insert = usize::MAX;
            for &v in &self.adjacency[u.id as usize] {
                if self.seen[v as usize] == self.epoch {
                    continue;
                }
                self.seen[v as usize] = self.epoch;
                let cand = Neighbour::new(v, squared_l2(self.rows.row(v as usize), query));
                if self.list.len() == self.build_list
                    && rank_cmp(&cand, &self.list[self.build_list - 1].0).is_ge()
                {
                    continue;
                }
                let pos = self
                    .list
                    .partition_point(|(e, _)| rank_cmp(e, &cand).is_lt());
                self.list.insert(pos, (cand, false));
                self.list.truncate(self.build_list);
                lowest_insert = lowest_insert.min(pos);
            }
            cursor = lowest_insert.min(cursor + 1);
            while cursor < self.list.len() && self.list[cursor].1 {
                cursor += 1;
            }
        }
    }

    fn insert(&mut self, p: u32, medoid: u32, sigma: f32) {
        self.search(p, medoid);
        let mut pool = core::mem::take(&mut self.expanded);
        for &v in &self.adjacency[p as usize] {
            pool.push(Neighbour::new(v, self.dist(p, v)));
        }
        let kept = robust_prune(p, &pool, self.rows, sigma, self.max_degree);
        self.expanded = pool;
        self.adjacency[p as usize] = kept;

        for i in 0..self.adjacency[p as usize].len() {
            let v = self.adjacency[p as usize][i];
            if self.adjacency[v as usize].contains(&p) {
                continue;
            }
            if self.adjacency[v as usize].len() < self.max_degree {
                self.adjacency[v as usize].push(p);
                continue;
            }
            let mut pool: Vec<Neighbour> = self.adjacency[v as usize]
                .iter()
                .map(|&w| Neighbour::new(w, self.dist(v, w)))
                .collect();
            pool.push(Neighbour::new(p, self.dist(v, p)));
            self.adjacency[v as usize] = robust_prune(v, &pool, self.rows, sigma, self.max_degree);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::greedy_search_reference;
    use rand::Rng;

    #[test]
    fn medoid_examples() {
        let one = VectorStore::from_f32(2, vec![3.0, 4.0]).unwrap();
        assert_eq!(compute_medoid(&one).unwrap(), 0);
        let four =
            VectorStore::from_f32(2, vec![0.0, 0.0, 10.0, 0.0, 0.0, 10.0, 1.0, 1.0]).unwrap();
        assert_eq!(compute_medoid(&four).unwrap(), 3);
        let pair = VectorStore::from_f32(2, vec![-1.0, 0.0, 1.0, 0.0]).unwrap();
        assert_eq!(compute_medoid(&pair).unwrap(), 0);
        assert!(compute_medoid(&VectorStore::empty(crate::ScalarKind::F32)).is_err());
    }

    fn line() -> Dense<'static> {
        Dense::new(1, vec![0.0f32, 1.0, 2.0]).unwrap()
    }

    #[test]
    fn collinear_far_point_is_occluded() {
        // From 0, node 1 (d=1) occludes node 2 (d=4) whenever sigma^2 * 1 <= 4.
        let base = line();
        let cands = [Neighbour::new(2, 4.0), Neighbour::new(1, 1.0)];
        assert_eq!(robust_prune(0, &cands, &base, 1.0, 8), vec![1]);
        assert_eq!(robust_prune(0, &cands, &base, 1.2, 8), vec![1]);
        assert_eq!(robust_prune(0, &cands, &base, 2.0, 8), vec![1]);
        assert_eq!(robust_prune(0, &cands, &base, 3.0, 8), vec![1, 2]);
    }

    #[test]
    fn spread_out_candidates_all_survive() {
        // Orthogonal unit directions: d(v, u) = 2 > d(p, u) = 1.
        let base = Dense::new(
            3,
            vec![0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
        )
        .unwrap();
        let cands = [
            Neighbour::new(1, 1.0),
            Neighbour::new(2, 1.0),
            Neighbour::new(3, 1.0),
        ];
        assert_eq!(robust_prune(0, &cands, &base, 1.2, 3), vec![1, 2, 3]);
        assert_eq!(robust_prune(0, &cands, &base, 1.2, 2).len(), 2);
    }

    #[test]
    fn rejects_bad_params() {
        let base = VectorStore::from_f32(1, vec![0.0, 1.0, 2.0]).unwrap();
        let mut p = BuildParams {
            max_degree: 1,
            ..BuildParams::default()
        };
        assert!(build_index(&base, &p).is_err());
        p = BuildParams {
            max_degree: 4,
            build_list: 3,
            ..BuildParams::default()
        };
        assert!(build_index(&base, &p).is_err());
        p = BuildParams {
            sigma: 0.9,
            ..BuildParams::default()
        };
        assert!(build_index(&base, &p).is_err());
        let single = VectorStore::from_f32(1, vec![0.0]).unwrap();
        assert!(build_index(&single, &BuildParams::default()).is_err());
    }

    #[test]
    fn degree_two_on_three_points() {
        let base = VectorStore::from_f32(1, vec![0.0, 1.0, 5.0]).unwrap();
        let p = BuildParams {
            max_degree: 2,
            build_list: 2,
            sigma: 1.2,
            seed: 1,
        };
        let g = build_index(&base, &p).unwrap();
        assert_eq!(g.node_count(), 3);
        g.validate().unwrap();
    }

    fn random_points(n: usize, dim: usize, seed: u64) -> VectorStore {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        VectorStore::from_f32(dim, (0..n * dim).map(|_| rng.random::<f32>()).collect()).unwrap()
    }

    #[test]
    fn finds_true_nearest_neighbour_on_2d_points() {
        let base = random_points(1000, 2, 21);
        let params = BuildParams {
            max_degree: 16,
            build_list: 64,
            sigma: 1.2,
            seed: 5,
        };
        let g = build_index(&base, &params).unwrap();
        g.validate().unwrap();
        assert!(g.adjacency().iter().all(|l| l.len() <= 16));

        let rows = base.dense();
        let queries = random_points(100, 2, 22);
        let qrows = queries.dense();
        let mut hits = 0;
        for q in 0..100 {
            let query = qrows.row(q);
            let truth = (0..1000u32)
                .min_by(|&a, &b| {
                    squared_l2(rows.row(a as usize), query)
                        .total_cmp(&squared_l2(rows.row(b as usize), query))
                        .then(a.cmp(&b))
                })
                .unwrap();
            let found = greedy_search_reference(&g, &rows, query, 1, 64);
            hits += usize::from(found.ids[0] == truth);
        }
        assert!(
            hits >= 95,
            "reached the true neighbour for {hits}/100 queries"
        );
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let base = random_points(300, 4, 3);
        let params = BuildParams {
            max_degree: 8,
            build_list: 16,
            sigma: 1.2,
            seed: 9,
        };
        let a = build_index(&base, &params).unwrap();
        let b = build_index(&base, &params).unwrap();
        assert_eq!(a, b);
    }
}
