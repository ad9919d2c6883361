//! Loops: positions plus internal degrees of freedom (species, charge number,
//! closed Brownian shape), bridge sampling, stochastic line integrals and
//! loop activities.

mod bridge;
mod io;
mod params;

pub use bridge::{bridge_covariance, empirical_covariance, sample_bridge, BridgeSampler, CovarianceSample};
pub use io::{path_from_bytes, path_to_bytes};
pub use params::{SpeciesParams, Statistics, ThermoState};

use std::sync::Arc;

use crate::error::{param, Error, Result};
use crate::quadrature::QuadValue;

/// A point in space; index 0 is the slab normal, 1 and 2 are in-plane.
pub type Vec3 = [f64; 3];

/// A closed Brownian loop placed at a position.
#[derive(Clone, Debug)]
pub struct Loop {
    /// Origin of the path, `r^{[0]}`.
    pub r: Vec3,
    pub species: Arc<SpeciesParams>,
    /// Charge number: number of particles in the exchange cycle.
    pub p: u32,
    /// Time nodes per unit of `s`.
    pub n_steps: u32,
    /// Dimensionless shape `X(s_k)` at `p * n_steps + 1` nodes, closed.
    pub path: Arc<Vec<Vec3>>,
}

impl Loop {
    /// Builds a loop, checking the closure and length invariants.
    pub fn new(r: Vec3, species: Arc<SpeciesParams>, p: u32, n_steps: u32, path: Arc<Vec<Vec3>>) -> Result<Self> {
        if p == 0 {
            return param("charge number p must be at least 1");
        }
        if n_steps < 2 {
            return param("n_steps must be at least 2");
        }
        let expected = (p * n_steps) as usize + 1;
        if path.len() != expected {
            return param(format!("path has {} nodes, expected {expected}", path.len()));
        }
        if path[0] != [0.0; 3] || path[expected - 1] != [0.0; 3] {
            return Err(Error::Contract("loop path is not closed at the origin".into()));
        }
        Ok(Self { r, species, p, n_steps, path })
    }

    /// A classical point charge: `p = 1` and a path identically zero.
    pub fn point(r: Vec3, species: Arc<SpeciesParams>, n_steps: u32) -> Self {
        let path = Arc::new(vec![[0.0; 3]; n_steps as usize + 1]);
        Self { r, species, p: 1, n_steps, path }
    }

    pub fn x(&self) -> f64 {
        self.r[0]
    }

    pub fn lambda(&self) -> f64 {
        self.species.lambda
    }

    pub fn charge(&self) -> f64 {
        self.species.charge
    }

    /// Number of distinct time nodes on the periodic grid (`p * n_steps`).
    pub fn n_periodic(&self) -> usize {
        (self.p * self.n_steps) as usize
    }

    /// Time step `Δs = 1/n_steps`.
    pub fn ds(&self) -> f64 {
        1.0 / self.n_steps as f64
    }

    /// Spatial point `r + λ X(s_k)`.
    pub fn point_at(&self, k: usize) -> Vec3 {
        let l = self.lambda();
        let x = self.path[k];
        [self.r[0] + l * x[0], self.r[1] + l * x[1], self.r[2] + l * x[2]]
    }

    /// Same internal state placed at another origin.
    pub fn placed_at(&self, r: Vec3) -> Self {
        Self { r, ..self.clone() }
    }

    /// True when the path is identically zero.
    pub fn is_point(&self) -> bool {
        self.path.iter().all(|x| *x == [0.0; 3])
    }
}

/// Stochastic line integral `Σ_k f(s̄_k, X̄_k) · ΔX_k` with midpoint evaluation.
///
/// The sum is rearranged by parts into `Σ_k X_k · (f_{k-1} - f_k)`, which is
/// algebraically identical on a closed path and returns exactly zero for any
/// integrand that does not vary along the path.
pub fn line_integral<T, F>(path: &[Vec3], n_steps: u32, f: F) -> Result<T>
where
    T: QuadValue,
    F: Fn(f64, &Vec3) -> [T; 3],
{
    let n = path.len();
    if n < 3 || path[0] != [0.0; 3] || path[n - 1] != [0.0; 3] {
        return Err(Error::Contract("line integral requires a closed path".into()));
    }
    let ds = 1.0 / n_steps as f64;
    let mid = |k: usize| -> [T; 3] {
        let a = path[k];
        let b = path[k + 1];
        let m = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])];
        f((k as f64 + 0.5) * ds, &m)
    };
    let mut acc = T::zero();
    let mut prev = mid(0);
    for (k, xk) in path.iter().enumerate().take(n - 1).skip(1) {
        let cur = mid(k);
        for mu in 0..3 {
            acc = acc + (prev[mu] - cur[mu]) * xk[mu];
        }
        prev = cur;
    }
    Ok(acc)
}

/// Effective loop activity with the given self-energy `e² V(L,L)`.
pub fn loop_activity(lp: &Loop, thermo: &ThermoState, self_energy: f64) -> Result<f64> {
    activity_weight(&lp.species, lp.p, thermo, self_energy)
}

/// Activity of a `(species, p)` cell at a given self-energy.
pub fn activity_weight(sp: &SpeciesParams, p: u32, thermo: &ThermoState, self_energy: f64) -> Result<f64> {
    if p == 0 {
        return param("charge number p must be at least 1");
    }
    let pf = p as f64;
    let degeneracy = 2.0 * sp.spin + 1.0;
    let sign = if sp.statistics == Statistics::Fermion && (p - 1) % 2 == 1 { -1.0 } else { 1.0 };
    let fugacity = (thermo.beta * sp.chemical_potential * pf).exp();
    let gauss = (2.0 * std::f64::consts::PI * pf * sp.lambda * sp.lambda).powf(1.5);
    Ok(degeneracy * sign * fugacity / (pf * gauss) * (-0.5 * thermo.beta * self_energy).exp())
}

/// Re-roots a loop at time `u` (which must lie on the time grid):
/// `X^{[u]}(s) = X(s+u) - X(u)` and origin `r + λ X(u)`.
pub fn shift_origin(lp: &Loop, u: f64) -> Result<Loop> {
    let total = lp.n_periodic();
    let m_real = u * lp.n_steps as f64;
    let m = m_real.round();
    if (m_real - m).abs() > 1e-9 || m < 0.0 || m as usize > total {
        return param(format!("shift {u} is not on the time grid of a p={} loop", lp.p));
    }
    let m = (m as usize) % total;
    let xu = lp.path[m];
    let path: Vec<Vec3> = (0..=total)
        .map(|k| {
            let x = lp.path[(k + m) % total];
            [x[0] - xu[0], x[1] - xu[1], x[2] - xu[2]]
        })
        .collect();
    let l = lp.lambda();
    let r = [lp.r[0] + l * xu[0], lp.r[1] + l * xu[1], lp.r[2] + l * xu[2]];
    Ok(Loop { r, path: Arc::new(path), ..lp.clone() })
}
