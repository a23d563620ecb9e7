//! Seeded Gaussian-mixture data sets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use pqgraph_core::VectorStore;

use crate::error::{Error, Result};

/// Points drawn around `clusters` centres. Centres are `N(0, spread²)` per
/// coordinate; a point adds `N(0, noise²)` noise to a uniformly chosen centre.
/// With `latent_dim < dim`, the noise lives in a random `latent_dim`-dimensional
/// subspace per cluster, which lowers the intrinsic dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Mixture {
    pub dim: usize,
    pub clusters: usize,
    pub spread: f32,
    pub noise: f32,
    pub latent_dim: usize,
    pub seed: u64,
}

impl Mixture {
    pub fn new(dim: usize, clusters: usize, seed: u64) -> Self {
        Self {
            dim,
            clusters,
            spread: 10.0,
            noise: 1.0,
            latent_dim: dim,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Invalid(pqgraph_core::Error::InvalidParameter(msg)));
        if self.dim == 0 || self.clusters == 0 {
            return bad("dim and clusters must be positive".into());
        }
        if self.latent_dim == 0 || self.latent_dim > self.dim {
            return bad(format!(
                "latent dim {} must lie in 1..={}",
                self.latent_dim, self.dim
            ));
        }
        if !(self.spread.is_finite()
            && self.noise.is_finite()
            && self.spread >= 0.0
            && self.noise >= 0.0)
        {
            return bad("spread and noise must be finite and non-negative".into());
        }
        Ok(())
    }

    /// Draws `count` points. `stream` selects an independent sample of the
    /// same mixture (e.g. 0 for the base set, 1 for queries).
    pub fn sample(&self, count: usize, stream: u64) -> Result<VectorStore> {
        self.validate()?;
        let (d, l) = (self.dim, self.latent_dim);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let centre = Normal::new(0.0f32, self.spread).expect("validated");
        let unit = Normal::new(0.0f32, 1.0).expect("constant");
        let centres: Vec<f32> = (0..self.clusters * d)
            .map(|_| centre.sample(&mut rng))
            .collect();
        // Per-cluster `l × d` basis, scaled so each point's noise has the
        // same expected squared norm as isotropic noise in `d` dimensions.
        let scale = (d as f32 / l as f32).sqrt() / (d as f32).sqrt();
        let bases: Vec<f32> = if l < d {
            (0..self.clusters * l * d)
                .map(|_| unit.sample(&mut rng) * scale)
                .collect()
        } else {
            Vec::new()
        };

        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream + 1);
        let mut data = Vec::with_capacity(count * d);
        let mut z = vec![0.0f32; l];
        for _ in 0..count {
            let c = rng.random_range(0..self.clusters);
            let start = data.len();
            data.extend_from_slice(&centres[c * d..(c + 1) * d]);
            let row = &mut data[start..];
            if l < d {
                z.iter_mut()
                    .for_each(|v| *v = unit.sample(&mut rng) * self.noise);
                let basis = &bases[c * l * d..(c + 1) * l * d];
                for (zi, dir) in z.iter().zip(basis.chunks_exact(d)) {
                    row.iter_mut().zip(dir).for_each(|(x, b)| *x += zi * b);
                }
            } else {
                row.iter_mut()
                    .for_each(|x| *x += unit.sample(&mut rng) * self.noise);
            }
        }
        Ok(VectorStore::from_f32(d, data)?)
    }
}
