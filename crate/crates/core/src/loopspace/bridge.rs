use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::Vec3;
use crate::error::{param, Result};
use crate::par::{map_range, Execution};

/// Deterministic Brownian-bridge generator. Sample `i` is drawn from the
/// ChaCha stream `i` of the seed, so ensembles can be generated in any order
/// or on any number of workers with identical results.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BridgeSampler {
    pub n_steps: u32,
    pub seed: u64,
    pub p: u32,
}

impl BridgeSampler {
    pub fn new(p: u32, n_steps: u32, seed: u64) -> Result<Self> {
        if p == 0 {
            return param("charge number p must be at least 1");
        }
        if n_steps < 2 {
            return param("n_steps must be at least 2");
        }
        Ok(Self { n_steps, seed, p })
    }

    /// Path `X(s_k)`, `k = 0..p*n_steps`, pinned to zero at both ends.
    ///
    /// A random walk with variance `1/n_steps` per step is drawn and the
    /// linear drift `(s/p) W(p)` removed, which reproduces the bridge
    /// covariance `min(s,s') - s s'/p` exactly on the grid.
    pub fn sample(&self, index: u64) -> Vec<Vec3> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        let total = (self.p * self.n_steps) as usize;
        let sigma = (1.0 / self.n_steps as f64).sqrt();
        let mut walk = vec![[0.0; 3]; total + 1];
        for k in 1..=total {
            for mu in 0..3 {
                let z: f64 = StandardNormal.sample(&mut rng);
                walk[k][mu] = walk[k - 1][mu] + sigma * z;
            }
        }
        let end = walk[total];
        let mut path = walk;
        for (k, x) in path.iter_mut().enumerate() {
            let t = k as f64 / total as f64;
            for mu in 0..3 {
                x[mu] -= t * end[mu];
            }
        }
        path[0] = [0.0; 3];
        path[total] = [0.0; 3];
        path
    }

    /// Samples `count` paths with indices `first..first+count`.
    pub fn ensemble(&self, exec: Execution, first: u64, count: usize) -> Vec<Vec<Vec3>> {
        map_range(exec, count, |i| self.sample(first + i as u64))
    }
}

/// One bridge path for charge number `p` from the given seed.
pub fn sample_bridge(p: u32, n_steps: u32, seed: u64) -> Result<Vec<Vec3>> {
    Ok(BridgeSampler::new(p, n_steps, seed)?.sample(0))
}

/// Exact bridge covariance `min(s, s') - s s'/p` of one component.
pub fn bridge_covariance(p: u32, s: f64, s2: f64) -> f64 {
    s.min(s2) - s * s2 / p as f64
}

/// Empirical versus exact covariance at one pair of grid times.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CovarianceSample {
    pub s: f64,
    pub s2: f64,
    pub exact: f64,
    pub empirical: f64,
    pub std_error: f64,
}

impl CovarianceSample {
    /// Deviation in units of the standard error.
    pub fn z_score(&self) -> f64 {
        (self.empirical - self.exact).abs() / self.std_error.max(f64::MIN_POSITIVE)
    }
}

/// Monte Carlo estimate of `E[X^μ(s) X^μ(s')]` for each grid-index pair,
/// pooled over the three components.
pub fn empirical_covariance(
    sampler: &BridgeSampler,
    pairs: &[(usize, usize)],
    samples: usize,
    exec: Execution,
) -> Result<Vec<CovarianceSample>> {
    let total = (sampler.p * sampler.n_steps) as usize;
    if samples < 2 || pairs.iter().any(|&(a, b)| a > total || b > total) {
        return param("covariance check needs two or more samples and grid indices inside the path");
    }
    let chunk = 4096;
    let n_chunks = samples.div_ceil(chunk);
    // Per chunk: running sums of y and y² for each pair.
    let partial = map_range(exec, n_chunks, |c| {
        let mut acc = vec![(0.0, 0.0); pairs.len()];
        let end = ((c + 1) * chunk).min(samples);
        for i in c * chunk..end {
            let path = sampler.sample(i as u64);
            for (slot, &(a, b)) in acc.iter_mut().zip(pairs) {
                for mu in 0..3 {
                    let y = path[a][mu] * path[b][mu];
                    slot.0 += y;
                    slot.1 += y * y;
                }
            }
        }
        acc
    });
    let n = (3 * samples) as f64;
    let h = 1.0 / sampler.n_steps as f64;
    Ok(pairs
        .iter()
        .enumerate()
        .map(|(j, &(a, b))| {
            let (sum, sq) = partial.iter().fold((0.0, 0.0), |acc, p| (acc.0 + p[j].0, acc.1 + p[j].1));
            let mean = sum / n;
            let var = (sq / n - mean * mean) * n / (n - 1.0);
            let (s, s2) = (a as f64 * h, b as f64 * h);
            CovarianceSample {
                s,
                s2,
                exact: bridge_covariance(sampler.p, s, s2),
                empirical: mean,
                std_error: (var / n).sqrt(),
            }
        })
        .collect())
}
