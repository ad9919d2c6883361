#![allow(dead_code)]

use std::sync::Arc;

use casimir_core::loopspace::{BridgeSampler, Loop, SpeciesParams, Statistics, ThermoState};

pub fn thermo(c: f64) -> ThermoState {
    ThermoState::reduced(1.0, 1.0, c).unwrap()
}

pub fn species(name: &str, charge: f64, mass: f64, t: &ThermoState) -> Arc<SpeciesParams> {
    Arc::new(SpeciesParams::new(name, charge, mass, 0.0, Statistics::Boson, 0.0, t).unwrap())
}

pub fn sampled_loop(sp: &Arc<SpeciesParams>, p: u32, n_steps: u32, seed: u64, index: u64, r: [f64; 3]) -> Loop {
    let path = BridgeSampler::new(p, n_steps, seed).unwrap().sample(index);
    Loop::new(r, sp.clone(), p, n_steps, Arc::new(path)).unwrap()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

use casimir_core::par::Execution;
use casimir_core::screening::{build_cells, ChiSampling, DensityProfile, PanelGrid, SlabComposition, SpeciesDensity};

/// `(name, charge, mass, number density)` rows.
pub type SpeciesRow = (&'static str, f64, f64, f64);

/// Symmetric ± plasma with `κ = 1` in reduced units.
pub fn symmetric_rows() -> Vec<SpeciesRow> {
    let n = 1.0 / (8.0 * std::f64::consts::PI);
    vec![("cation", 1.0, 100.0, n), ("anion", -1.0, 100.0, n)]
}

/// Asymmetric neutral mixture: a doubly charged cation, a light and a heavy
/// monovalent anion.
pub fn three_species_rows() -> Vec<SpeciesRow> {
    let n = 1.0 / (4.0 * std::f64::consts::PI * 6.0);
    vec![("dication", 2.0, 120.0, n), ("anion", -1.0, 80.0, n), ("heavy", -1.0, 300.0, n)]
}

pub fn composition(rows: &[SpeciesRow], t: &ThermoState) -> SlabComposition {
    SlabComposition {
        species: rows
            .iter()
            .map(|&(name, e, m, n)| SpeciesDensity { species: species(name, e, m, t), number_density: n })
            .collect(),
        neutral: true,
    }
}

pub fn sampling(classical: bool, seed: u64) -> ChiSampling {
    ChiSampling { p_max: 2, n_paths: 4, n_steps: 8, seed, classical }
}

pub fn profile(rows: &[SpeciesRow], lo: f64, hi: f64, panels: usize, order: usize, classical: bool, tag: u64) -> DensityProfile {
    let t = thermo(5.0);
    let comp = composition(rows, &t);
    let cells = build_cells(&comp, &sampling(classical, 7), &t, tag, Execution::Parallel).unwrap();
    DensityProfile::homogeneous(PanelGrid::new(lo, hi, panels, order).unwrap(), cells, t.beta)
}
