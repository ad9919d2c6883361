use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{param, Error, Result};
use crate::loopspace::{Loop, Vec3};

/// Distance below which `1/r` is capped: `1e-8` of the smaller de Broglie length.
pub fn coulomb_regularization(li: &Loop, lj: &Loop) -> f64 {
    1e-8 * li.lambda().min(lj.lambda())
}

fn dist(a: &Vec3, b: &Vec3) -> f64 {
    let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
}

fn nodes(lp: &Loop) -> Vec<Vec3> {
    (0..lp.n_periodic()).map(|k| lp.point_at(k)).collect()
}

fn common_grid(li: &Loop, lj: &Loop) -> Result<usize> {
    if li.n_steps != lj.n_steps {
        return param(format!(
            "equal-time pairing needs a common time grid ({} vs {} steps)",
            li.n_steps, lj.n_steps
        ));
    }
    Ok(li.n_steps as usize)
}

/// Visits every equal-time node pair `(k, l)`, `k ≡ l (mod n_steps)`.
fn for_equal_time(li: &Loop, lj: &Loop, mut f: impl FnMut(usize, usize)) -> Result<()> {
    let n = common_grid(li, lj)?;
    let (ni, nj) = (li.n_periodic(), lj.n_periodic());
    for k in 0..ni {
        let mut l = k % n;
        while l < nj {
            f(k, l);
            l += n;
        }
    }
    Ok(())
}

/// Equal-time Coulomb potential `V^c(i, j)`.
pub fn vc_pair(li: &Loop, lj: &Loop) -> Result<f64> {
    let eps = coulomb_regularization(li, lj);
    let (pi, pj) = (nodes(li), nodes(lj));
    let mut acc = 0.0;
    for_equal_time(li, lj, |k, l| acc += 1.0 / dist(&pi[k], &pj[l]).max(eps))?;
    Ok(acc * li.ds())
}

/// Electrostatic potential between two uniformly charged wires,
/// `V^el(i, j) = Δs_i Δs_j Σ_{k,l} 1/|r_i^{[k]} - r_j^{[l]}|`.
pub fn vel_pair(li: &Loop, lj: &Loop) -> f64 {
    let eps = coulomb_regularization(li, lj);
    let (pi, pj) = (nodes(li), nodes(lj));
    let mut acc = 0.0;
    for a in &pi {
        for b in &pj {
            acc += 1.0 / dist(a, b).max(eps);
        }
    }
    acc * li.ds() * lj.ds()
}

/// Dipolar remainder `W^c = V^c - V^el`.
pub fn wc_pair(li: &Loop, lj: &Loop) -> Result<f64> {
    Ok(vc_pair(li, lj)? - vel_pair(li, lj))
}

/// Normal component of the equal-time Coulomb force on loop `i`,
/// `∂_{x_i} V^c(i, j)`.
pub fn vc_force_x(li: &Loop, lj: &Loop) -> Result<f64> {
    let eps = coulomb_regularization(li, lj);
    let (pi, pj) = (nodes(li), nodes(lj));
    let mut acc = 0.0;
    for_equal_time(li, lj, |k, l| {
        let r = dist(&pi[k], &pj[l]).max(eps);
        acc -= (pi[k][0] - pj[l][0]) / (r * r * r);
    })?;
    Ok(acc * li.ds())
}

/// Monopole force kernel `p_i p_j ∂_x v(r_i - r_j)` between loop origins.
pub fn monopole_force_x(li: &Loop, lj: &Loop) -> f64 {
    let eps = coulomb_regularization(li, lj);
    let r = dist(&li.r, &lj.r).max(eps);
    -(li.p as f64) * (lj.p as f64) * (li.r[0] - lj.r[0]) / (r * r * r)
}

/// Coulomb self-energy `e² V^c(L, L)` over distinct equal-time nodes.
pub fn self_energy_coulomb(lp: &Loop) -> f64 {
    let eps = 1e-8 * lp.lambda();
    let pts = nodes(lp);
    let n = lp.n_steps as usize;
    let total = lp.n_periodic();
    let mut acc = 0.0;
    for k in 0..total {
        let mut l = k % n;
        while l < total {
            if l != k {
                acc += 1.0 / dist(&pts[k], &pts[l]).max(eps);
            }
            l += n;
        }
    }
    lp.charge() * lp.charge() * acc * lp.ds()
}

/// Per-loop data for the transverse Fourier transform of `V^el` at an in-plane
/// wavevector `k`: normal displacements, in-plane phases and the exponential
/// moments that make the kernel separable for non-overlapping loops.
#[derive(Clone, Debug)]
pub struct LoopMoments {
    pub kmag: f64,
    pub ds: f64,
    /// `λ X⁰(s_t)` for each periodic time node.
    pub xs: Vec<f64>,
    /// `e^{i k·λ Y(s_t)}`.
    pub phase: Vec<Complex64>,
    /// `Δs Σ_t e^{i k·λY} e^{+k λ X⁰}`.
    pub e_plus: Complex64,
    /// `Δs Σ_t e^{i k·λY} e^{-k λ X⁰}`.
    pub e_minus: Complex64,
    /// `Δs Σ_t e^{i k·λY}`.
    pub e_zero: Complex64,
    pub lo: f64,
    pub hi: f64,
}

impl LoopMoments {
    pub fn new(lp: &Loop, k: [f64; 2]) -> Self {
        let kmag = k[0].hypot(k[1]);
        let l = lp.lambda();
        let ds = lp.ds();
        let n = lp.n_periodic();
        let mut xs = Vec::with_capacity(n);
        let mut phase = Vec::with_capacity(n);
        let (mut ep, mut em, mut e0) = (Complex64::default(), Complex64::default(), Complex64::default());
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for x in lp.path.iter().take(n) {
            let xn = l * x[0];
            let ph = Complex64::from_polar(1.0, l * (k[0] * x[1] + k[1] * x[2]));
            ep += ph * (kmag * xn).exp();
            em += ph * (-kmag * xn).exp();
            e0 += ph;
            lo = lo.min(xn);
            hi = hi.max(xn);
            xs.push(xn);
            phase.push(ph);
        }
        Self { kmag, ds, xs, phase, e_plus: ep * ds, e_minus: em * ds, e_zero: e0 * ds, lo, hi }
    }

    /// `V^el(i, j, k)` for loops with these moments placed at normal
    /// coordinates `xi` and `xj`.
    pub fn vel(&self, xi: f64, other: &LoopMoments, xj: f64) -> Complex64 {
        let k = self.kmag;
        let pref = 2.0 * PI / k;
        if xi + self.lo > xj + other.hi {
            pref * (-k * (xi - xj)).exp() * self.e_minus * other.e_plus.conj()
        } else if xi + self.hi < xj + other.lo {
            pref * (-k * (xj - xi)).exp() * self.e_plus * other.e_minus.conj()
        } else {
            let mut acc = Complex64::default();
            for (a, pa) in self.xs.iter().zip(&self.phase) {
                let mut row = Complex64::default();
                for (b, pb) in other.xs.iter().zip(&other.phase) {
                    row += pb.conj() * (-k * (xi + a - xj - b).abs()).exp();
                }
                acc += pa * row;
            }
            pref * self.ds * other.ds * acc
        }
    }
}

/// Transverse Fourier transform `V^el(i, j, k)` at in-plane wavevector `k`.
pub fn vel_fourier(li: &Loop, lj: &Loop, k: [f64; 2]) -> Result<Complex64> {
    let kmag = k[0].hypot(k[1]);
    if kmag == 0.0 {
        return Err(Error::SingularArgument("V^el(i, j, k) diverges at k = 0".into()));
    }
    let mi = LoopMoments::new(li, k);
    let mj = LoopMoments::new(lj, k);
    Ok(mi.vel(li.x(), &mj, lj.x()))
}

/// Transverse Fourier transform of the normal Coulomb force between slabs in
/// scaled variables: `2π e^{-q} e^{-q (x₂ - x₁)/d}`.
pub fn coulomb_force_kernel(x1: f64, x2: f64, q: f64, d: f64) -> f64 {
    debug_assert!(q >= 0.0 && d > 0.0);
    2.0 * PI * (-q).exp() * (-q * (x2 - x1) / d).exp()
}
