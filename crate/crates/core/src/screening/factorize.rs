use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{param, Error, Result};
use crate::loopspace::Loop;
use crate::par::Execution;
use crate::potentials::LoopMoments;

use super::density::DensityProfile;
use super::nystrom::{SlabOperator, SourceSolution};

/// Which slab a loop belongs to. Positions are slab-local: `A` occupies
/// `[-a, 0]`, `B` occupies `[0, b]` and sits a distance `d` beyond `A`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// Screened potential of a two-slab system on both grids.
#[derive(Clone, Debug)]
pub struct CoupledSolution {
    pub phi_a: Vec<Complex64>,
    pub phi_b: Vec<Complex64>,
    /// Exponential moments of the two induced distributions seen from the
    /// other slab.
    pub sigma_a: Complex64,
    pub sigma_b: Complex64,
    point: Option<PointSource>,
}

/// Single-plate solution around a point-like source, kept for interpolation.
#[derive(Clone, Debug)]
struct PointSource {
    side: Side,
    single: SourceSolution,
    /// Amplitude of the rank-one drive felt by the other slab.
    drive: Complex64,
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Two slabs coupled through the vacuum gap. Since every loop of `A` lies
/// below every loop of `B`, the cross kernel is rank one and the coupled
/// system reduces to two single-slab solves plus a 2×2 elimination.
pub struct CoupledOperator {
    pub op_a: SlabOperator,
    pub op_b: SlabOperator,
    pub d: f64,
    pub k: f64,
    /// `(2π/k) e^{-kd}`.
    pub alpha: f64,
    a_vec: Vec<Complex64>,
    a_prime: Vec<Complex64>,
    g_a: Vec<Complex64>,
    g_b: Vec<Complex64>,
    v_a: Vec<Complex64>,
    v_b: Vec<Complex64>,
    q: Complex64,
    r: Complex64,
}

impl std::fmt::Debug for CoupledOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CoupledOperator").field("d", &self.d).field("k", &self.k).finish()
    }
}

impl CoupledOperator {
    pub fn assemble(profile_a: &DensityProfile, profile_b: &DensityProfile, d: f64, k: f64, exec: Execution) -> Result<Self> {
        if !(d > 0.0) {
            return param(format!("separation must be positive, got {d}"));
        }
        let op_a = SlabOperator::assemble(profile_a, k, exec)?;
        let op_b = SlabOperator::assemble(profile_b, k, exec)?;
        Self::from_operators(op_a, op_b, d)
    }

    pub fn from_operators(op_a: SlabOperator, op_b: SlabOperator, d: f64) -> Result<Self> {
        if op_a.k != op_b.k {
            return param("slab operators were assembled at different k");
        }
        let k = op_a.k;
        let (pa, pb) = (op_a.profile(), op_b.profile());
        let top_a = pa.grid.hi + (0..pa.n_cells()).map(|c| op_a.moments(c).hi).fold(f64::NEG_INFINITY, f64::max);
        let bottom_b = d + pb.grid.lo + (0..pb.n_cells()).map(|c| op_b.moments(c).lo).fold(f64::INFINITY, f64::min);
        if top_a >= bottom_b {
            return param(format!("loops of the two slabs overlap across the gap (d = {d})"));
        }
        let alpha = 2.0 * PI / k * (-k * d).exp();
        let unknowns = |p: &DensityProfile, f: &dyn Fn(f64, usize) -> Complex64| -> Vec<Complex64> {
            (0..p.n_unknowns()).map(|i| f(p.grid.nodes[i / p.n_cells()], i % p.n_cells())).collect()
        };
        let a_vec = unknowns(pa, &|x, c| (k * x).exp() * op_a.moments(c).e_plus);
        let b_prime = unknowns(pa, &|x, c| (k * x).exp() * op_a.moments(c).e_plus.conj());
        let a_prime = unknowns(pb, &|x, c| (-k * x).exp() * op_b.moments(c).e_minus);
        let b_vec = unknowns(pb, &|x, c| (-k * x).exp() * op_b.moments(c).e_minus.conj());
        let weighted = |p: &DensityProfile, v: &[Complex64], coupling: &[f64]| -> Vec<Complex64> {
            v.iter()
                .enumerate()
                .map(|(i, z)| z * p.grid.weights[i / p.n_cells()] * coupling[i])
                .collect()
        };
        let g_a = weighted(pa, &b_prime, op_a.coupling());
        let g_b = weighted(pb, &b_vec, op_b.coupling());
        let v_a = op_a.solve(&a_vec)?;
        let v_b = op_b.solve(&a_prime)?;
        let q = dot(&g_a, &v_a);
        let r = dot(&g_b, &v_b);
        let det = Complex64::new(1.0, 0.0) - alpha * alpha * q * r;
        if det.norm() < 1e-12 {
            return Err(Error::Solver { message: "gap coupling is singular".into(), condition: 1.0 / det.norm() });
        }
        Ok(Self { op_a, op_b, d, k, alpha, a_vec, a_prime, g_a, g_b, v_a, v_b, q, r })
    }

    /// Global normal coordinate of a slab-local position.
    pub fn global_x(&self, side: Side, x: f64) -> f64 {
        match side {
            Side::A => x,
            Side::B => self.d + x,
        }
    }

    /// Bare `V^el` between two loops given in slab-local coordinates.
    pub fn bare(&self, ti: Side, target: &Loop, sj: Side, source: &Loop) -> Complex64 {
        let kv = [self.k, 0.0];
        let mt = LoopMoments::new(target, kv);
        let ms = LoopMoments::new(source, kv);
        mt.vel(self.global_x(ti, target.x()), &ms, self.global_x(sj, source.x()))
    }

    /// Right-hand sides for a point-like source loop.
    pub fn source_rhs(&self, side: Side, source: &Loop) -> (Vec<Complex64>, Vec<Complex64>) {
        let m = LoopMoments::new(source, [self.k, 0.0]);
        let x = source.x();
        match side {
            Side::A => {
                let s = (self.k * x).exp() * m.e_plus.conj() * self.alpha;
                (self.op_a.source_vector(source), self.a_prime.iter().map(|v| v * s).collect())
            }
            Side::B => {
                let t = (-self.k * x).exp() * m.e_minus.conj() * self.alpha;
                (self.a_vec.iter().map(|v| v * t).collect(), self.op_b.source_vector(source))
            }
        }
    }

    fn eliminate(&self, u_a: Vec<Complex64>, u_b: Vec<Complex64>, pa: Complex64, pb: Complex64) -> CoupledSolution {
        let al = self.alpha;
        let sigma_a = (pa - al * self.q * pb) / (Complex64::new(1.0, 0.0) - al * al * self.q * self.r);
        let sigma_b = pb - al * self.r * sigma_a;
        let phi_a = u_a.iter().zip(&self.v_a).map(|(u, v)| u - al * sigma_b * v).collect();
        let phi_b = u_b.iter().zip(&self.v_b).map(|(u, v)| u - al * sigma_a * v).collect();
        CoupledSolution { phi_a, phi_b, sigma_a, sigma_b, point: None }
    }

    /// Solves the coupled system for right-hand sides smooth across both slabs.
    pub fn solve(&self, rhs_a: &[Complex64], rhs_b: &[Complex64]) -> Result<CoupledSolution> {
        let u_a = self.op_a.solve(rhs_a)?;
        let u_b = self.op_b.solve(rhs_b)?;
        let (pa, pb) = (dot(&self.g_a, &u_a), dot(&self.g_b, &u_b));
        Ok(self.eliminate(u_a, u_b, pa, pb))
    }

    /// Solves for a point-like source loop, resolving the kink at the source.
    pub fn solve_source(&self, side: Side, source: &Loop) -> Result<CoupledSolution> {
        let k = self.k;
        let m = LoopMoments::new(source, [k, 0.0]);
        let x = source.x();
        let sol = match side {
            Side::A => {
                let single = self.op_a.solve_source(source)?;
                let ma = &self.op_a;
                let pa = ma.moment(&single, &|y, c| (k * y).exp() * ma.moments(c).e_plus.conj())?;
                let drive = self.alpha * (k * x).exp() * m.e_plus.conj();
                let u_b: Vec<Complex64> = self.v_b.iter().map(|v| v * drive).collect();
                let mut out = self.eliminate(single.phi.clone(), u_b, pa, drive * self.r);
                out.point = Some(PointSource { side, single, drive });
                out
            }
            Side::B => {
                let single = self.op_b.solve_source(source)?;
                let mb = &self.op_b;
                let pb = mb.moment(&single, &|y, c| (-k * y).exp() * mb.moments(c).e_minus.conj())?;
                let drive = self.alpha * (-k * x).exp() * m.e_minus.conj();
                let u_a: Vec<Complex64> = self.v_a.iter().map(|v| v * drive).collect();
                let mut out = self.eliminate(u_a, single.phi.clone(), drive * self.q, pb);
                out.point = Some(PointSource { side, single, drive });
                out
            }
        };
        if sol.sigma_a.is_nan() || sol.sigma_b.is_nan() {
            return Err(Error::Solver { message: "coupled elimination produced NaN".into(), condition: f64::NAN });
        }
        Ok(sol)
    }

    /// Same system assembled as one dense matrix with the cross kernel
    /// evaluated pair by pair; an independent check of the elimination.
    pub fn solve_dense(&self, rhs_a: &[Complex64], rhs_b: &[Complex64]) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        let (pa, pb) = (self.op_a.profile(), self.op_b.profile());
        let (na, nb) = (pa.n_unknowns(), pb.n_unknowns());
        let n = na + nb;
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        let (ca, cb) = (self.op_a.coupling(), self.op_b.coupling());
        let (ka, kb) = (self.op_a.kernel(), self.op_b.kernel());
        for i in 0..na {
            for j in 0..na {
                m[(i, j)] = ka[(i, j)] * ca[j];
            }
        }
        for i in 0..nb {
            for j in 0..nb {
                m[(na + i, na + j)] = kb[(i, j)] * cb[j];
            }
        }
        for i in 0..na {
            let (xi, mi) = (pa.grid.nodes[i / pa.n_cells()], self.op_a.moments(i % pa.n_cells()));
            for l in 0..nb {
                let (xl, ml) = (self.d + pb.grid.nodes[l / pb.n_cells()], self.op_b.moments(l % pb.n_cells()));
                let wl = pb.grid.weights[l / pb.n_cells()];
                let wi = pa.grid.weights[i / pa.n_cells()];
                m[(i, na + l)] = mi.vel(xi, ml, xl) * wl * cb[l];
                m[(na + l, i)] = ml.vel(xl, mi, xi) * wi * ca[i];
            }
        }
        for i in 0..n {
            m[(i, i)] += Complex64::new(1.0, 0.0);
        }
        let rhs = DVector::from_iterator(n, rhs_a.iter().chain(rhs_b).cloned());
        let x = m
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Solver { message: "dense coupled solve failed".into(), condition: f64::INFINITY })?;
        Ok((x.iter().take(na).cloned().collect(), x.iter().skip(na).cloned().collect()))
    }

    /// Screened potential at an arbitrary target loop in slab `A` for a
    /// solved point source, by Nyström interpolation.
    pub fn evaluate_in_a(&self, target: &Loop, sol: &CoupledSolution) -> Result<Complex64> {
        let point = sol
            .point
            .as_ref()
            .ok_or_else(|| Error::Contract("interpolation needs a point-source solution".into()))?;
        let mt = LoopMoments::new(target, [self.k, 0.0]);
        let a_t = (self.k * target.x()).exp() * mt.e_plus;
        let v_t = self.op_a.evaluate_smooth(target, a_t, &self.v_a);
        let u_t = match point.side {
            Side::A => self.op_a.evaluate(target, &point.single)?,
            Side::B => point.drive * v_t,
        };
        Ok(u_t - self.alpha * sol.sigma_b * v_t)
    }

    /// `k`-space integrand of the interplate force in the Debye–Hückel
    /// approximation, `-(k/β) e^{-kd} Σ_{1∈A,2∈B} (…) Φ(1, 2, k)`.
    pub fn force_integrand(&self) -> Result<f64> {
        let pb = self.op_b.profile();
        let nc = pb.n_cells();
        let h_b: Vec<Complex64> = (0..pb.n_unknowns())
            .map(|l| (-self.k * pb.grid.nodes[l / nc]).exp() * self.op_b.moments(l % nc).e_minus * self.op_b.coupling()[l])
            .collect();
        let rhs_b = self.op_b.apply_kernel(&h_b);
        let conj_b: Vec<Complex64> = (0..pb.n_unknowns())
            .map(|l| (-self.k * pb.grid.nodes[l / nc]).exp() * self.op_b.moments(l % nc).e_minus.conj() * pb.grid.weights[l / nc])
            .collect();
        let t = dot(&conj_b, &h_b) * self.alpha;
        let rhs_a: Vec<Complex64> = self.a_vec.iter().map(|v| v * t).collect();
        let sol = self.solve(&rhs_a, &rhs_b)?;
        let beta = self.op_a.profile().beta;
        Ok(-(self.k / beta) * (-self.k * self.d).exp() * sol.sigma_a.re)
    }
}

/// Leading large-`d` coefficient of `Φ_AB(i, j, q/d)`:
/// `(1/d) (q / (4π sinh q)) Φ⁰_A(i, 0, 0) Φ⁰_B(0, j, 0)`.
pub fn factorized_phi_ab(phi0_a: f64, phi0_b: f64, q: f64, d: f64) -> f64 {
    traversing_factor(q, d) * phi0_a * phi0_b
}

/// Closed form of the traversing-chain series, `q / (4π d sinh q)`.
pub fn traversing_factor(q: f64, d: f64) -> f64 {
    if q == 0.0 {
        return 1.0 / (4.0 * PI * d);
    }
    q / (4.0 * PI * d * q.sinh())
}

/// Partial sum over chains with `2n + 1` traversing bonds, `n < terms`:
/// `Σ e^{-2nq} q e^{-q} / (2π d)`.
pub fn traversing_series(q: f64, d: f64, terms: usize) -> f64 {
    (0..terms).map(|n| (-((2 * n + 1) as f64) * q).exp()).sum::<f64>() * q / (2.0 * PI * d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_sums_to_closed_form() {
        let (q, d) = (1.0, 7.0);
        let s = traversing_series(q, d, 60);
        assert!((s - traversing_factor(q, d)).abs() <= 4.0 * f64::EPSILON * s);
        let two = traversing_series(q, d, 2);
        let rest = traversing_factor(q, d) - two;
        assert!(rest / traversing_factor(q, d) < (-4.0f64 * q).exp() * 1.1);
    }
}
