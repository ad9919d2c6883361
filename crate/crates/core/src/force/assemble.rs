use std::f64::consts::PI;

use crate::error::{param, Result};
use crate::loopspace::{shift_origin, Loop, ThermoState};
use crate::par::{try_map_range, Execution};
use crate::potentials::{monopole_force_x, vc_force_x};
use crate::quadrature::GaussLegendre;
use crate::screening::{CoupledOperator, DensityProfile, UrsellLeading};
use crate::special::ZETA3;

use super::zeta::Zeta3Quadrature;

/// Universal large-separation force per area, `-ζ(3) / (8π β d³)`.
/// Depends on nothing but `β` and `d`.
pub fn leading_force(thermo: &ThermoState, d: f64) -> f64 {
    -ZETA3 / (8.0 * PI * thermo.beta * d * d * d)
}

/// `-(1/(4πβd³)) ∫ q² e^{-q}/sinh q dq × [A bracket] × [B bracket]`.
pub fn force_from_brackets(beta: f64, d: f64, q_integral: f64, bracket_a: f64, bracket_b: f64) -> f64 {
    -q_integral / (4.0 * PI * beta * d * d * d) * bracket_a * bracket_b
}

/// Leading force assembled from single-plate brackets.
pub fn assemble_force(ursell: &UrsellLeading, d: f64, q: &Zeta3Quadrature) -> f64 {
    force_from_brackets(ursell.beta, d, q.value, ursell.a.bracket, ursell.b.bracket)
}

/// Order-of-magnitude size of the neglected magnetic contribution, which is
/// `O(d⁻⁵)`: the leading force times `(λ_ph/d)²`.
pub fn magnetic_remainder_estimate(thermo: &ThermoState, d: f64) -> f64 {
    let r = thermo.lambda_ph() / d;
    leading_force(thermo, d).abs() * r * r
}

/// Composite Gauss–Legendre rule in `q` for the interplate integrals.
pub fn q_grid(order: usize) -> (Vec<f64>, Vec<f64>) {
    let rule = GaussLegendre::new(order);
    let cuts = [0.0, 1.0, 3.0, 7.0, 14.0, 28.0];
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for w in cuts.windows(2) {
        let (x, wt) = rule.on_interval(w[0], w[1]);
        nodes.extend(x);
        weights.extend(wt);
    }
    (nodes, weights)
}

/// Debye–Hückel force between the two slabs at finite `d`, from the full
/// coupled screened potential on a `q = kd` grid.
pub fn f_coupled(
    profile_a: &DensityProfile,
    profile_b: &DensityProfile,
    d: f64,
    order: usize,
    exec: Execution,
) -> Result<f64> {
    if !(d > 0.0) {
        return param(format!("separation must be positive, got {d}"));
    }
    let (qs, ws) = q_grid(order);
    let vals: Vec<f64> = try_map_range(exec, qs.len(), |i| {
        CoupledOperator::assemble(profile_a, profile_b, d, qs[i] / d, Execution::Sequential)?.force_integrand()
    })?;
    Ok(vals.iter().zip(&ws).map(|(v, w)| v * w).sum::<f64>() / d)
}

/// Electrostatic capacitor force per area `2π σ_A σ_B`.
pub fn capacitor_electrostatic(sigma_a: f64, sigma_b: f64) -> f64 {
    2.0 * PI * sigma_a * sigma_b
}

/// Capacitor force of two slab profiles. Slabs validated as neutral carry
/// no net charge by construction and give exactly zero.
pub fn capacitor_force(profile_a: &DensityProfile, profile_b: &DensityProfile, neutral: bool) -> f64 {
    if neutral {
        return 0.0;
    }
    capacitor_electrostatic(profile_a.charge_per_area(), profile_b.charge_per_area())
}

/// Result of comparing the loop Coulomb force with the monopole force.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonopoleCheck {
    pub full: f64,
    pub monopole: f64,
    pub relative: f64,
}

/// All re-rootings of a loop on its time grid.
pub fn shift_orbit(lp: &Loop) -> Result<Vec<Loop>> {
    (0..lp.n_periodic()).map(|m| shift_origin(lp, m as f64 / lp.n_steps as f64)).collect()
}

/// Normal force between two groups of loops computed with the full
/// equal-time Coulomb kernel and with the monopole kernel between origins.
/// Each loop enters through its whole shift orbit, which is what the
/// position integral over a homogeneous layer provides.
pub fn monopole_reduction_check(group_a: &[Loop], group_b: &[Loop]) -> Result<MonopoleCheck> {
    let orbit = |g: &[Loop]| -> Result<Vec<(Loop, f64)>> {
        let mut out = Vec::new();
        for lp in g {
            let o = shift_orbit(lp)?;
            let w = 1.0 / o.len() as f64;
            out.extend(o.into_iter().map(|l| (l, w)));
        }
        Ok(out)
    };
    let (oa, ob) = (orbit(group_a)?, orbit(group_b)?);
    let (mut full, mut mono) = (0.0, 0.0);
    for (li, wi) in &oa {
        for (lj, wj) in &ob {
            let ee = li.charge() * lj.charge() * wi * wj;
            full += ee * vc_force_x(li, lj)?;
            mono += ee * monopole_force_x(li, lj);
        }
    }
    Ok(MonopoleCheck { full, monopole: mono, relative: (full - mono).abs() / mono.abs().max(f64::MIN_POSITIVE) })
}
