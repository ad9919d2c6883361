use nalgebra::{DMatrix, DVector, Dyn, LU};
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::loopspace::Loop;
use crate::par::{map_range, Execution};
use crate::potentials::LoopMoments;
use crate::quadrature::GaussLegendre;

use super::density::DensityProfile;

/// Sub-intervals of the composite rule across a loop-overlap cluster.
const CLUSTER_PIECES: usize = 3;

/// Discretized kernel `∫dx Σ_χ V^el(·; x, χ) f(x, χ)` at fixed in-plane `k`,
/// with quadrature weights absorbed.
pub type KernelMatrix = DMatrix<Complex64>;

/// `∫_{lo}^{hi} e^{-k|z - x|} dx`.
fn exp_abs_integral(z: f64, lo: f64, hi: f64, k: f64) -> f64 {
    if z <= lo {
        (-k * (lo - z)).exp() * -(-k * (hi - lo)).exp_m1() / k
    } else if z >= hi {
        (-k * (z - hi)).exp() * -(-k * (hi - lo)).exp_m1() / k
    } else {
        (-(-k * (z - lo)).exp_m1() - (-k * (hi - z)).exp_m1()) / k
    }
}

/// Product-integration data for a target at `x_t` against its own panel:
/// exact moments of the one-sided exponentials against the Lagrange basis.
struct OwnPanel {
    panel: usize,
    lo: f64,
    hi: f64,
    left: Vec<f64>,
    right: Vec<f64>,
    left_len: f64,
    right_len: f64,
    lagrange: Vec<f64>,
}

impl OwnPanel {
    fn new(profile: &DensityProfile, xt: f64, k: f64, aux: &GaussLegendre) -> Self {
        let grid = &profile.grid;
        let panel = grid.panel_of(xt);
        let (lo, hi) = grid.panel_bounds(panel);
        let u = xt.clamp(lo, hi);
        let nodes = grid.panel_nodes(panel);
        let order = nodes.len();
        let mut left = vec![0.0; order];
        let mut right = vec![0.0; order];
        if u > lo {
            let (xs, ws) = aux.on_interval(lo, u);
            for (x, w) in xs.iter().zip(&ws) {
                let e = (-k * (xt - x)).exp() * w;
                for (m, l) in grid.lagrange(panel, *x).iter().enumerate() {
                    left[m] += e * l;
                }
            }
        }
        if hi > u {
            let (xs, ws) = aux.on_interval(u, hi);
            for (x, w) in xs.iter().zip(&ws) {
                let e = (-k * (x - xt)).exp() * w;
                for (m, l) in grid.lagrange(panel, *x).iter().enumerate() {
                    right[m] += e * l;
                }
            }
        }
        let left_len = (-k * (xt - u)).exp() * -(-k * (u - lo)).exp_m1() / k;
        let right_len = (-k * (u - xt)).exp() * -(-k * (hi - u)).exp_m1() / k;
        Self { panel, lo, hi, left, right, left_len, right_len, lagrange: grid.lagrange(panel, xt) }
    }
}

/// Screened potential of one slab around a point-like source loop.
#[derive(Clone, Debug)]
pub struct SourceSolution {
    /// `Φ(I, j)` at every unknown.
    pub phi: Vec<Complex64>,
    psi: Vec<Complex64>,
    bare: Vec<Complex64>,
    source: LoopMoments,
    xj: f64,
    near: Vec<usize>,
}

/// Single-slab screened-potential operator `I + K diag(β e² ρ)` at one
/// in-plane wavenumber, factorized once and reused for any source.
pub struct SlabOperator {
    pub k: f64,
    profile: DensityProfile,
    moments: Vec<LoopMoments>,
    coupling: Vec<f64>,
    kernel: KernelMatrix,
    lu: LU<Complex64, Dyn, Dyn>,
    /// Ratio of the largest to the smallest pivot of the factorization.
    pub pivot_ratio: f64,
    aux: GaussLegendre,
    cluster_rule: GaussLegendre,
    exec: Execution,
}

impl std::fmt::Debug for SlabOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SlabOperator").field("k", &self.k).field("n", &self.coupling.len()).finish()
    }
}

impl SlabOperator {
    /// Assembles and factorizes the operator. The in-plane wavevector is
    /// taken along the first in-plane axis.
    pub fn assemble(profile: &DensityProfile, k: f64, exec: Execution) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::SingularArgument(format!("screened potential needs k > 0, got {k}")));
        }
        let moments: Vec<LoopMoments> =
            profile.cells.iter().map(|c| LoopMoments::new(&c.loop_at(0.0), [k, 0.0])).collect();
        let aux = GaussLegendre::new((2 * profile.grid.order).max(16));
        let n = profile.n_unknowns();
        let nc = profile.n_cells();
        let nx = profile.grid.len();
        let own: Vec<OwnPanel> = map_range(exec, nx, |ix| OwnPanel::new(profile, profile.grid.nodes[ix], k, &aux));
        let rows: Vec<Vec<Complex64>> = map_range(exec, n, |row| {
            let (ix, c) = (row / nc, row % nc);
            let mut out = vec![Complex64::default(); n];
            kernel_row(profile, &moments, k, profile.grid.nodes[ix], &moments[c], &own[ix], &mut out);
            out
        });
        let kernel = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        let coupling = profile.coupling();
        let mut system = kernel.clone();
        for (j, cj) in coupling.iter().enumerate() {
            system.column_mut(j).scale_mut(*cj);
        }
        for i in 0..n {
            system[(i, i)] += Complex64::new(1.0, 0.0);
        }
        if system.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Solver { message: "non-finite kernel entries".into(), condition: f64::INFINITY });
        }
        let lu = system.lu();
        let u = lu.u();
        let diag: Vec<f64> = (0..n).map(|i| u[(i, i)].norm()).collect();
        let max = diag.iter().cloned().fold(0.0, f64::max);
        let min = diag.iter().cloned().fold(f64::INFINITY, f64::min);
        let pivot_ratio = max / min;
        if !(min > 0.0) || pivot_ratio > 1e14 {
            return Err(Error::Solver {
                message: format!("screened-potential operator is numerically singular at k = {k}"),
                condition: pivot_ratio,
            });
        }
        Ok(Self { k, profile: profile.clone(), moments, coupling, kernel, lu, pivot_ratio, aux, cluster_rule: GaussLegendre::new(6), exec })
    }

    pub fn profile(&self) -> &DensityProfile {
        &self.profile
    }

    pub fn kernel(&self) -> &KernelMatrix {
        &self.kernel
    }

    pub fn coupling(&self) -> &[f64] {
        &self.coupling
    }

    pub fn moments(&self, c: usize) -> &LoopMoments {
        &self.moments[c]
    }

    pub fn n_unknowns(&self) -> usize {
        self.coupling.len()
    }

    /// Bare potential `V^el(I, j, k)` at every unknown for a source loop whose
    /// origin lies at normal coordinate `source.x()` (slab-local).
    pub fn source_vector(&self, source: &Loop) -> Vec<Complex64> {
        let ms = LoopMoments::new(source, [self.k, 0.0]);
        self.bare_vector(&ms, source.x())
    }

    fn bare_vector(&self, ms: &LoopMoments, xj: f64) -> Vec<Complex64> {
        let nc = self.profile.n_cells();
        (0..self.n_unknowns()).map(|i| self.moments[i % nc].vel(self.profile.grid.nodes[i / nc], ms, xj)).collect()
    }

    /// Solves `(I + K diag(βe²ρ)) Φ = rhs` for a right-hand side that is
    /// smooth across the slab.
    pub fn solve(&self, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
        let b = DVector::from_column_slice(rhs);
        let x = self
            .lu
            .solve(&b)
            .ok_or_else(|| Error::Solver { message: "LU solve failed".into(), condition: self.pivot_ratio })?;
        if x.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Solver { message: "non-finite solution".into(), condition: self.pivot_ratio });
        }
        Ok(x.iter().cloned().collect())
    }

    /// Panels on which some cell overlaps the source loop.
    fn near_panels(&self, ms: &LoopMoments, xj: f64) -> Vec<usize> {
        let (zlo, zhi) = self.cluster(ms, xj);
        (0..self.profile.grid.n_panels)
            .filter(|&p| {
                let (lo, hi) = self.profile.grid.panel_bounds(p);
                hi >= zlo && lo <= zhi
            })
            .collect()
    }

    /// `∫_panel dy Σ_c w(y, c) βe²ρ_c(y) V(y, c; j)`. The panel is cut at the
    /// edges of the overlap clusters (where the integrand has kinks); smooth
    /// pieces get one high-order rule, cluster pieces a composite rule.
    fn near_integral(
        &self,
        p: usize,
        ms: &LoopMoments,
        xj: f64,
        clusters: &[(f64, f64)],
        w: &(dyn Fn(f64, usize) -> Complex64 + Sync),
    ) -> Complex64 {
        let (lo, hi) = self.profile.grid.panel_bounds(p);
        let mut cuts = vec![lo, hi];
        for &(a, b) in clusters {
            for c in [a, b] {
                if c > lo && c < hi {
                    cuts.push(c);
                }
            }
        }
        cuts.sort_by(f64::total_cmp);
        let f = |y: f64| -> Complex64 {
            (0..self.moments.len()).map(|c| w(y, c) * self.profile.coupling_at(y, c) * self.moments[c].vel(y, ms, xj)).sum()
        };
        let mut acc = Complex64::default();
        for seg in cuts.windows(2) {
            let (a, b) = (seg[0], seg[1]);
            if b - a <= 0.0 {
                continue;
            }
            let mid = 0.5 * (a + b);
            let inside = clusters.iter().any(|&(c0, c1)| mid > c0 && mid < c1 && c1 > c0);
            if inside {
                let h = (b - a) / CLUSTER_PIECES as f64;
                for i in 0..CLUSTER_PIECES {
                    acc += self.cluster_rule.integrate(f, a + i as f64 * h, a + (i + 1) as f64 * h);
                }
            } else {
                acc += self.aux.integrate(f, a, b);
            }
        }
        acc
    }

    /// Region of `y` over which some cell placed at `y` overlaps a loop with
    /// moments `m` at `x`.
    fn cluster(&self, m: &LoopMoments, x: f64) -> (f64, f64) {
        let hi_c = self.moments.iter().map(|c| c.hi).fold(f64::NEG_INFINITY, f64::max);
        let lo_c = self.moments.iter().map(|c| c.lo).fold(f64::INFINITY, f64::min);
        (x + m.lo - hi_c, x + m.hi - lo_c)
    }

    /// Convolution `∫ V(t, ·) βe²ρ V(·, j)` for a target with moments `mt` at
    /// `xt`, given its kernel row and the bare source vector. Near panels are
    /// left out of the node rule; those listed in `direct` are integrated here.
    #[allow(clippy::too_many_arguments)]
    fn source_convolution(
        &self,
        mt: &LoopMoments,
        xt: f64,
        row: &[Complex64],
        bare: &[Complex64],
        ms: &LoopMoments,
        xj: f64,
        near: &[usize],
        direct: &[usize],
    ) -> Result<Complex64> {
        let grid = &self.profile.grid;
        let nc = self.profile.n_cells();
        let mut acc = Complex64::default();
        for p in 0..grid.n_panels {
            if near.contains(&p) {
                continue;
            }
            for m in grid.panel_nodes(p) {
                for c in 0..nc {
                    let i = m * nc + c;
                    acc += row[i] * self.coupling[i] * bare[i];
                }
            }
        }
        let clusters = [self.cluster(ms, xj), self.cluster(mt, xt)];
        let weight = |y: f64, c: usize| mt.vel(xt, &self.moments[c], y);
        for &p in direct {
            acc += self.near_integral(p, ms, xj, &clusters, &weight);
        }
        Ok(acc)
    }

    /// Screened potential at every unknown for a source loop.
    ///
    /// The solution has a kink at the source; it is split as `Φ = V - ψ`
    /// with `ψ = K βe²ρ Φ` smooth, and the source convolution that drives `ψ`
    /// is integrated adaptively where the kink lies.
    pub fn solve_source(&self, source: &Loop) -> Result<SourceSolution> {
        let ms = LoopMoments::new(source, [self.k, 0.0]);
        let xj = source.x();
        let bare = self.bare_vector(&ms, xj);
        let near = self.near_panels(&ms, xj);
        let nc = self.profile.n_cells();
        let k = self.k;
        let src_cluster = [self.cluster(&ms, xj)];
        // Exponential moments of each near panel's source convolution; they
        // give the exact contribution for targets that overlap no loop there.
        let up = |y: f64, c: usize| (k * y).exp() * self.moments[c].e_plus.conj();
        let down = |y: f64, c: usize| (-k * y).exp() * self.moments[c].e_minus.conj();
        let panel_moments: Vec<(Complex64, Complex64)> = near
            .iter()
            .map(|&p| (self.near_integral(p, &ms, xj, &src_cluster, &up), self.near_integral(p, &ms, xj, &src_cluster, &down)))
            .collect();
        let hi_c = self.moments.iter().map(|c| c.hi).fold(f64::NEG_INFINITY, f64::max);
        let lo_c = self.moments.iter().map(|c| c.lo).fold(f64::INFINITY, f64::min);
        let pref = 2.0 * PI / k;
        let rows: Vec<Result<Complex64>> = map_range(self.exec, self.n_unknowns(), |i| {
            let (mt, xt) = (&self.moments[i % nc], self.profile.grid.nodes[i / nc]);
            let row: Vec<Complex64> = self.kernel.row(i).iter().cloned().collect();
            let mut direct = Vec::new();
            let mut acc = Complex64::default();
            for (&p, (mu, md)) in near.iter().zip(&panel_moments) {
                let (lo, hi) = self.profile.grid.panel_bounds(p);
                if xt + mt.lo > hi + hi_c {
                    acc += pref * (-k * xt).exp() * mt.e_minus * mu;
                } else if xt + mt.hi < lo + lo_c {
                    acc += pref * (k * xt).exp() * mt.e_plus * md;
                } else {
                    direct.push(p);
                }
            }
            Ok(acc + self.source_convolution(mt, xt, &row, &bare, &ms, xj, &near, &direct)?)
        });
        let rhs = rows.into_iter().collect::<Result<Vec<_>>>()?;
        let psi = self.solve(&rhs)?;
        let phi = bare.iter().zip(&psi).map(|(v, p)| v - p).collect();
        Ok(SourceSolution { phi, psi, bare, source: ms, xj, near })
    }

    /// `∫ dy Σ_c βe²ρ_c(y) w(y, c) Φ(y, c; j)` for a weight that is smooth in `y`.
    pub fn moment(&self, sol: &SourceSolution, w: &(dyn Fn(f64, usize) -> Complex64 + Sync)) -> Result<Complex64> {
        let grid = &self.profile.grid;
        let nc = self.profile.n_cells();
        let mut acc = Complex64::default();
        for i in 0..self.n_unknowns() {
            let (x, c) = (grid.nodes[i / nc], i % nc);
            let wc = w(x, c) * self.coupling[i] * grid.weights[i / nc];
            acc -= wc * sol.psi[i];
            if !sol.near.contains(&grid.panel_of_node(i / nc)) {
                acc += wc * sol.bare[i];
            }
        }
        let clusters = [self.cluster(&sol.source, sol.xj)];
        for &p in &sol.near {
            acc += self.near_integral(p, &sol.source, sol.xj, &clusters, w);
        }
        Ok(acc)
    }

    /// `K f`: the kernel applied to values on the unknowns.
    pub fn apply_kernel(&self, f: &[Complex64]) -> Vec<Complex64> {
        let v = &self.kernel * DVector::from_column_slice(f);
        v.iter().cloned().collect()
    }

    /// Nyström interpolation of a point-source solution at an arbitrary
    /// target loop.
    pub fn evaluate(&self, target: &Loop, sol: &SourceSolution) -> Result<Complex64> {
        let mt = LoopMoments::new(target, [self.k, 0.0]);
        let row = self.kernel_row_for(target);
        let conv = self.source_convolution(&mt, target.x(), &row, &sol.bare, &sol.source, sol.xj, &sol.near, &sol.near)?;
        let smooth: Complex64 = row.iter().zip(&sol.psi).zip(&self.coupling).map(|((r, p), c)| r * p * *c).sum();
        Ok(mt.vel(target.x(), &sol.source, sol.xj) - (conv - smooth))
    }

    /// Nyström interpolation of the solution `f` of a smooth-source problem,
    /// given the source value `rhs_t` at the target.
    pub fn evaluate_smooth(&self, target: &Loop, rhs_t: Complex64, f: &[Complex64]) -> Complex64 {
        let row = self.kernel_row_for(target);
        rhs_t - row.iter().zip(f).zip(&self.coupling).map(|((r, p), c)| r * p * *c).sum::<Complex64>()
    }

    /// Row of the kernel for an arbitrary target loop.
    pub fn kernel_row_for(&self, target: &Loop) -> Vec<Complex64> {
        let mt = LoopMoments::new(target, [self.k, 0.0]);
        let own = OwnPanel::new(&self.profile, target.x(), self.k, &self.aux);
        let mut row = vec![Complex64::default(); self.n_unknowns()];
        kernel_row(&self.profile, &self.moments, self.k, target.x(), &mt, &own, &mut row);
        row
    }
}

/// One row of the discretized kernel for a target with moments `mt` at `xt`.
///
/// Panels other than the target's own use the plain node rule on the exact
/// kernel. On the own panel the kernel is split into the two-sided
/// exponential it equals away from loop overlap (integrated exactly against
/// the Lagrange basis) plus a remainder confined to the overlap region,
/// whose exact integral multiplies the interpolated solution at `xt`.
fn kernel_row(
    profile: &DensityProfile,
    moments: &[LoopMoments],
    k: f64,
    xt: f64,
    mt: &LoopMoments,
    own: &OwnPanel,
    out: &mut [Complex64],
) {
    let grid = &profile.grid;
    let nc = moments.len();
    let pref = 2.0 * PI / k;
    for p in 0..grid.n_panels {
        if p == own.panel {
            continue;
        }
        for m in grid.panel_nodes(p) {
            let (x, w) = (grid.nodes[m], grid.weights[m]);
            for (c, mc) in moments.iter().enumerate() {
                out[m * nc + c] = mt.vel(xt, mc, x) * w;
            }
        }
    }
    let nodes = grid.panel_nodes(own.panel);
    for (c, mc) in moments.iter().enumerate() {
        let al = mt.e_minus * mc.e_plus.conj();
        let ar = mt.e_plus * mc.e_minus.conj();
        for (j, m) in nodes.clone().enumerate() {
            out[m * nc + c] = (al * own.left[j] + ar * own.right[j]) * pref;
        }
        let separated = xt + mt.lo > own.hi + mc.hi || xt + mt.hi < own.lo + mc.lo;
        if separated {
            continue;
        }
        let mut exact = Complex64::default();
        for (a, pa) in mt.xs.iter().zip(&mt.phase) {
            let mut inner = Complex64::default();
            for (b, pb) in mc.xs.iter().zip(&mc.phase) {
                inner += pb.conj() * exp_abs_integral(xt + a - b, own.lo, own.hi, k);
            }
            exact += pa * inner;
        }
        exact *= pref * mt.ds * mc.ds;
        let smooth = (al * own.left_len + ar * own.right_len) * pref;
        let remainder = exact - smooth;
        for (j, m) in nodes.clone().enumerate() {
            out[m * nc + c] += remainder * own.lagrange[j];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_abs_integral_matches_quadrature() {
        let k = 0.7;
        for z in [-1.0f64, 0.3, 0.9, 2.5] {
            let g = GaussLegendre::new(40);
            let num = g.integrate(|x| (-k * (z - x).abs()).exp(), 0.0, z.clamp(0.0, 2.0))
                + g.integrate(|x| (-k * (z - x).abs()).exp(), z.clamp(0.0, 2.0), 2.0);
            assert!((exp_abs_integral(z, 0.0, 2.0, k) - num).abs() < 1e-13);
        }
    }
}
