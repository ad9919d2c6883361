use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{param, Result};
use crate::loopspace::{Loop, SpeciesParams, Statistics, ThermoState};
use crate::par::{try_map_range, Execution};
use crate::quadrature::richardson_halving;

use super::density::DensityProfile;
use super::nystrom::{SlabOperator, SourceSolution};

/// Descending wavenumbers `k_n = k₀ 2^{-n}` used for `k → 0` extrapolation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KSequence {
    pub k0: f64,
    pub levels: usize,
}

impl KSequence {
    /// Default sequence for a medium with mean inverse screening length `kappa`:
    /// `k₀ = 0.1 κ`, four levels. Unscreened media fall back to `k₀ = 0.1/width`.
    pub fn for_kappa(kappa: f64, width: f64) -> Self {
        let k0 = if kappa > 0.0 { 0.1 * kappa } else { 0.1 / width };
        Self { k0, levels: 4 }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.levels).map(|n| self.k0 * 0.5f64.powi(n as i32)).collect()
    }
}

/// Residual of the perfect-screening sum rule for one fixed loop.
#[derive(Clone, Debug, PartialEq)]
pub struct SumRuleReport {
    pub ks: Vec<f64>,
    /// Residual `Σ p e ρ F + p_j e_j` at each `k`.
    pub residuals: Vec<f64>,
    pub extrapolated: f64,
    /// `|extrapolated| / |p_j e_j|`.
    pub relative: f64,
    /// Size of the last Richardson correction relative to `|p_j e_j|`.
    pub extrapolation_change: f64,
    /// Set when nothing screens the source (κ ≡ 0), so the `k → 0` limit of
    /// the potential itself diverges.
    pub diverged: bool,
}

impl SumRuleReport {
    pub fn passes(&self, tol: f64) -> bool {
        !self.diverged && self.relative < tol && self.extrapolation_change < tol
    }
}

/// Unit classical test charge: `p = 1`, no path.
pub fn probe_charge(n_steps: u32, x: f64) -> Loop {
    let thermo = ThermoState::reduced(1.0, 1.0, 1.0).expect("valid probe state");
    let sp = SpeciesParams::new("probe", 1.0, 1.0, 0.0, Statistics::Boson, 0.0, &thermo).expect("valid probe");
    Loop::point([x, 0.0, 0.0], Arc::new(sp), n_steps)
}

/// Weights `β e² p ρ w` such that the screening charge per unit source
/// charge is `-Σ_I q_I Φ_I` by the node rule.
pub fn induced_charge_weights(profile: &DensityProfile) -> Vec<f64> {
    let mut out = Vec::with_capacity(profile.n_unknowns());
    for ix in 0..profile.grid.len() {
        for (c, cell) in profile.cells.iter().enumerate() {
            out.push(
                profile.beta * cell.charge().powi(2) * cell.p as f64 * profile.density(ix, c) * profile.grid.weights[ix],
            );
        }
    }
    out
}

/// Induced charge `∫ Σ p e ρ (-β e e_j Φ)` of a solved source.
pub fn induced_charge_of(op: &SlabOperator, sol: &SourceSolution, source_charge: f64) -> Result<Complex64> {
    let cells = &op.profile().cells;
    let m = op.moment(sol, &|_, c| Complex64::new(cells[c].p as f64, 0.0))?;
    Ok(-m * source_charge)
}

/// Induced charge `∫ Σ p e ρ (-β e e_j Φ)` around `source` at one `k`.
pub fn induced_charge(op: &SlabOperator, source: &Loop) -> Result<Complex64> {
    let sol = op.solve_source(source)?;
    induced_charge_of(op, &sol, source.charge())
}

/// Sum-rule residual around `source` (slab-local coordinates), extrapolated
/// to `k → 0`.
pub fn check_perfect_screening(
    profile: &DensityProfile,
    source: &Loop,
    seq: KSequence,
    exec: Execution,
) -> Result<SumRuleReport> {
    if seq.levels == 0 || !(seq.k0 > 0.0) {
        return param("k sequence needs k₀ > 0 and at least one level");
    }
    let ks = seq.values();
    let own = source.p as f64 * source.charge();
    let residuals: Vec<f64> = try_map_range(exec, ks.len(), |n| {
        let op = SlabOperator::assemble(profile, ks[n], Execution::Sequential)?;
        Ok::<_, crate::Error>(induced_charge(&op, source)?.re + own)
    })?;
    let (extrapolated, change) = richardson_halving(&residuals);
    let kappa = profile.screening_field().kappa.iter().cloned().fold(0.0, f64::max);
    let scale = own.abs().max(f64::MIN_POSITIVE);
    Ok(SumRuleReport {
        ks,
        residuals,
        extrapolated,
        relative: extrapolated.abs() / scale,
        extrapolation_change: change / scale,
        diverged: kappa == 0.0,
    })
}

/// Screening charge per unit source charge around a probe at `face`,
/// `-β Σ p e² ρ w Φ⁰(·, face)`, extrapolated to `k → 0`. Equals `-1` when
/// the slab screens perfectly. Returns the value and the last Richardson change.
pub fn face_bracket(profile: &DensityProfile, face: f64, seq: KSequence, exec: Execution) -> Result<(f64, f64)> {
    let probe = probe_charge(profile.cells.first().map_or(2, |c| c.n_steps), face);
    let values: Vec<f64> = try_map_range(exec, seq.levels, |n| {
        let op = SlabOperator::assemble(profile, seq.values()[n], Execution::Sequential)?;
        Ok::<_, crate::Error>(induced_charge(&op, &probe)?.re)
    })?;
    Ok(richardson_halving(&values))
}

/// Analytic screened potential of a homogeneous unbounded medium,
/// `(2π/K) e^{-K|x|}` with `K = √(k² + κ²)`.
pub fn bulk_phi(kappa: f64, k: f64, x: f64) -> f64 {
    let kk = (k * k + kappa * kappa).sqrt();
    2.0 * PI / kk * (-kk * x.abs()).exp()
}

/// Sum-rule residual of the analytic bulk solution for a unit point source,
/// from quadrature of `(κ²/4π) Φ` over the line, Richardson-extrapolated in `k`.
pub fn bulk_sum_rule(kappa: f64, seq: KSequence) -> Result<SumRuleReport> {
    if !(kappa > 0.0) {
        return Ok(SumRuleReport {
            ks: seq.values(),
            residuals: vec![1.0; seq.levels],
            extrapolated: 1.0,
            relative: 1.0,
            extrapolation_change: 0.0,
            diverged: true,
        });
    }
    let ks = seq.values();
    let opts = crate::quadrature::QuadOptions::new(1e-14, 1e-12);
    let mut residuals = Vec::with_capacity(ks.len());
    for &k in &ks {
        let half = crate::quadrature::integrate_to_infinity(|x| bulk_phi(kappa, k, x), 0.0, opts);
        if !half.converged {
            return Err(crate::Error::Quadrature(format!("bulk screening cloud at k = {k}")));
        }
        residuals.push(1.0 - kappa * kappa / (4.0 * PI) * 2.0 * half.value);
    }
    let (extrapolated, change) = richardson_halving(&residuals);
    Ok(SumRuleReport {
        ks,
        residuals,
        extrapolated,
        relative: extrapolated.abs(),
        extrapolation_change: change,
        diverged: false,
    })
}
