use crate::error::{Error, Result};
use crate::loopspace::Loop;
use crate::par::{try_map_range, Execution};
use crate::quadrature::richardson_halving;

use super::density::DensityProfile;
use super::factorize::{traversing_factor, CoupledOperator, Side};
use super::nystrom::SlabOperator;
use super::sumrule::{induced_charge_of, induced_charge_weights, probe_charge, KSequence};

/// `k → 0` single-plate data of one slab under the Debye–Hückel closure
/// (`h⁰ = F⁰`, no non-nodal part), relative to a unit classical charge at
/// the inner face.
#[derive(Clone, Debug)]
pub struct PlateLeading {
    /// Normal coordinate of the inner face.
    pub face: f64,
    /// `Φ⁰(I, 0, 0)` at every unknown.
    pub phi0: Vec<f64>,
    /// `G⁰(I, 0, 0) / e₀ = -β e_I Φ⁰(I, 0, 0)`.
    pub g0: Vec<f64>,
    /// Screened self-potential of the face charge, `Φ⁰(0, 0, 0)`.
    pub phi0_face: f64,
    /// `∫ p e ρ G⁰ / e₀`, which perfect screening fixes to `-1`.
    pub bracket: f64,
    /// Last Richardson change of the bracket.
    pub bracket_change: f64,
    /// Worst contraction `∫ p₁ e₁ ρ⁰ [h⁰(1, i) + δ/ρ⁰]` over the test loops,
    /// relative to its unsigned magnitude.
    pub annihilation: f64,
}

/// Leading single-plate pieces of the interplate Ursell function.
#[derive(Clone, Debug)]
pub struct UrsellLeading {
    pub a: PlateLeading,
    pub b: PlateLeading,
    pub beta: f64,
}

impl UrsellLeading {
    /// Single-`F_AB` contribution `-(1/βd) (q / 4π sinh q) G⁰_A(i,0)/e₀ G⁰_B(0,j)/e₀`.
    pub fn h_ab_fab(&self, i: usize, j: usize, q: f64, d: f64) -> f64 {
        -traversing_factor(q, d) / self.beta * self.a.g0[i] * self.b.g0[j]
    }

    /// Product of the two face brackets.
    pub fn bracket_product(&self) -> f64 {
        self.a.bracket * self.b.bracket
    }

    pub fn worst_annihilation(&self) -> f64 {
        self.a.annihilation.max(self.b.annihilation)
    }
}

fn extrapolate_columns(levels: &[Vec<f64>]) -> Vec<f64> {
    let n = levels[0].len();
    (0..n)
        .map(|i| {
            let col: Vec<f64> = levels.iter().map(|v| v[i]).collect();
            richardson_halving(&col).0
        })
        .collect()
}

/// Test loops for the annihilation check: the first and last cell, at the
/// node nearest the face and at the middle of the slab.
fn test_sources(profile: &DensityProfile, face: f64) -> Vec<Loop> {
    let nodes = &profile.grid.nodes;
    let nearest = (0..nodes.len())
        .min_by(|&i, &j| (nodes[i] - face).abs().total_cmp(&(nodes[j] - face).abs()))
        .unwrap_or(0);
    let mid = nodes.len() / 2;
    let mut out = Vec::new();
    for ix in [nearest, mid] {
        for cell in [profile.cells.first(), profile.cells.last()].into_iter().flatten() {
            out.push(cell.loop_at(nodes[ix]));
        }
    }
    out
}

/// Single-plate leading data for the slab described by `profile`.
pub fn plate_leading(profile: &DensityProfile, face: f64, seq: KSequence, exec: Execution) -> Result<PlateLeading> {
    let n_steps = profile.cells.first().map_or(2, |c| c.n_steps);
    let probe = probe_charge(n_steps, face);
    let sources = test_sources(profile, face);
    let q = induced_charge_weights(profile);
    let ks = seq.values();
    // Per level: Φ(·, face), Φ(face, face), and the signed/unsigned annihilation sums.
    type Level = (Vec<f64>, f64, Vec<(f64, f64)>, f64);
    let levels: Vec<Level> = try_map_range(exec, ks.len(), |n| {
        let op = SlabOperator::assemble(profile, ks[n], Execution::Sequential)?;
        let sol = op.solve_source(&probe)?;
        let self_phi = op.evaluate(&probe, &sol)?.re;
        let bracket = induced_charge_of(&op, &sol, 1.0)?.re;
        let mut ann = Vec::with_capacity(sources.len());
        for s in &sources {
            let ss = op.solve_source(s)?;
            let own = s.p as f64 * s.charge();
            let signed = induced_charge_of(&op, &ss, s.charge())?.re + own;
            let unsigned = q.iter().zip(&ss.phi).map(|(w, p)| (w * p.re * s.charge()).abs()).sum::<f64>() + own.abs();
            ann.push((signed, unsigned));
        }
        Ok::<_, Error>((sol.phi.iter().map(|z| z.re).collect(), self_phi, ann, bracket))
    })?;
    let phi_levels: Vec<Vec<f64>> = levels.iter().map(|l| l.0.clone()).collect();
    let phi0 = extrapolate_columns(&phi_levels);
    let phi0_face = richardson_halving(&levels.iter().map(|l| l.1).collect::<Vec<_>>()).0;
    let nc = profile.n_cells();
    let g0: Vec<f64> = phi0.iter().enumerate().map(|(i, p)| -profile.beta * profile.cells[i % nc].charge() * p).collect();
    let bracket_levels: Vec<f64> = levels.iter().map(|l| l.3).collect();
    let (bracket, bracket_change) = richardson_halving(&bracket_levels);
    let mut annihilation: f64 = 0.0;
    for s in 0..sources.len() {
        let signed: Vec<f64> = levels.iter().map(|l| l.2[s].0).collect();
        let unsigned = levels.last().map_or(1.0, |l| l.2[s].1);
        annihilation = annihilation.max(richardson_halving(&signed).0.abs() / unsigned);
    }
    Ok(PlateLeading { face, phi0, g0, phi0_face, bracket, bracket_change, annihilation })
}

/// Leading Ursell pieces for slab `A` (inner face at its upper grid edge)
/// and slab `B` (inner face at its lower grid edge).
pub fn leading_ursell(
    profile_a: &DensityProfile,
    profile_b: &DensityProfile,
    seq: KSequence,
    exec: Execution,
) -> Result<UrsellLeading> {
    if profile_a.n_cells() == 0 || profile_b.n_cells() == 0 {
        return Err(Error::Dependency("single-plate tables need at least one loop cell per slab".into()));
    }
    let a = plate_leading(profile_a, profile_a.grid.hi, seq, exec)?;
    let b = plate_leading(profile_b, profile_b.grid.lo, seq, exec)?;
    Ok(UrsellLeading { a, b, beta: profile_a.beta })
}

/// `Φ_AB(0_A, 0_B, q/d)` between the two face charges from the full
/// coupled-slab solve.
pub fn coupled_face_phi(
    profile_a: &DensityProfile,
    profile_b: &DensityProfile,
    q: f64,
    d: f64,
    exec: Execution,
) -> Result<f64> {
    let op = CoupledOperator::assemble(profile_a, profile_b, d, q / d, exec)?;
    let n_steps = profile_a.cells.first().map_or(2, |c| c.n_steps);
    let src = probe_charge(n_steps, profile_b.grid.lo);
    let tgt = probe_charge(n_steps, profile_a.grid.hi);
    let sol = op.solve_source(Side::B, &src)?;
    Ok(op.evaluate_in_a(&tgt, &sol)?.re)
}

/// `h_AB(0_A, 0_B, q/d) = -β Φ_AB` for unit face charges.
pub fn coupled_face_h(
    profile_a: &DensityProfile,
    profile_b: &DensityProfile,
    q: f64,
    d: f64,
    exec: Execution,
) -> Result<f64> {
    Ok(-profile_a.beta * coupled_face_phi(profile_a, profile_b, q, d, exec)?)
}
