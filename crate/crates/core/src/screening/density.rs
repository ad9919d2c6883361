use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{param, Result};
use crate::loopspace::{activity_weight, BridgeSampler, Loop, SpeciesParams, ThermoState, Vec3};
use crate::par::{map_range, Execution};
use crate::potentials::self_energy_coulomb;

use super::geometry::PanelGrid;

/// Bulk number density of one species in a slab.
#[derive(Clone, Debug)]
pub struct SpeciesDensity {
    pub species: Arc<SpeciesParams>,
    pub number_density: f64,
}

/// Species content of one slab.
#[derive(Clone, Debug)]
pub struct SlabComposition {
    pub species: Vec<SpeciesDensity>,
    /// When set, the composition must carry no net charge.
    pub neutral: bool,
}

impl SlabComposition {
    /// Net charge per volume `Σ e_γ n_γ`.
    pub fn charge_density(&self) -> f64 {
        self.species.iter().map(|s| s.species.charge * s.number_density).sum()
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        if self.species.is_empty() {
            return param("slab has no species");
        }
        for s in &self.species {
            if !(s.number_density.is_finite() && s.number_density >= 0.0) {
                return param(format!("density of {} must be non-negative", s.species.name));
            }
        }
        if self.neutral {
            let scale: f64 = self.species.iter().map(|s| (s.species.charge * s.number_density).abs()).sum();
            if self.charge_density().abs() > tol * scale.max(f64::MIN_POSITIVE) {
                return param(format!("slab declared neutral but Σ e n = {:e}", self.charge_density()));
            }
        }
        Ok(())
    }

    /// Classical Debye wavenumber `√(4πβ Σ e² n)`.
    pub fn debye_kappa(&self, beta: f64) -> f64 {
        (4.0 * PI * beta * self.species.iter().map(|s| s.species.charge.powi(2) * s.number_density).sum::<f64>()).sqrt()
    }
}

/// How the internal degrees of freedom are discretized.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChiSampling {
    pub p_max: u32,
    pub n_paths: usize,
    pub n_steps: u32,
    pub seed: u64,
    /// Point charges only (`p = 1`, no path): the classical monopole sector.
    pub classical: bool,
}

/// One `(species, p, path)` cell of the internal-state discretization.
#[derive(Clone, Debug)]
pub struct Cell {
    pub species_index: usize,
    pub species: Arc<SpeciesParams>,
    pub p: u32,
    pub n_steps: u32,
    pub path: Arc<Vec<Vec3>>,
    /// Loop density carried by this cell (already divided by the number of
    /// sampled paths).
    pub density: f64,
}

impl Cell {
    pub fn charge(&self) -> f64 {
        self.species.charge
    }

    /// The cell's loop placed at normal coordinate `x`.
    pub fn loop_at(&self, x: f64) -> Loop {
        Loop { r: [x, 0.0, 0.0], species: self.species.clone(), p: self.p, n_steps: self.n_steps, path: self.path.clone() }
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent sub-seed for a labelled stream.
pub fn sub_seed(seed: u64, tags: &[u64]) -> u64 {
    tags.iter().fold(splitmix(seed), |acc, &t| splitmix(acc ^ splitmix(t)))
}

/// Samples the cells of one slab. Loop densities follow the loop activities
/// (including the Coulomb self-energy of each sampled shape) normalized so
/// that `Σ_p p ρ_p` equals the species number density.
pub fn build_cells(
    comp: &SlabComposition,
    sampling: &ChiSampling,
    thermo: &ThermoState,
    slab_tag: u64,
    exec: Execution,
) -> Result<Vec<Cell>> {
    comp.validate(1e-12)?;
    if sampling.n_paths == 0 || sampling.p_max == 0 || sampling.n_steps < 2 {
        return param("p_max, n_paths and n_steps must be positive (n_steps ≥ 2)");
    }
    let mut cells = Vec::new();
    for (si, sd) in comp.species.iter().enumerate() {
        if sampling.classical {
            let path = Arc::new(vec![[0.0; 3]; sampling.n_steps as usize + 1]);
            cells.push(Cell {
                species_index: si,
                species: sd.species.clone(),
                p: 1,
                n_steps: sampling.n_steps,
                path,
                density: sd.number_density,
            });
            continue;
        }
        let mut raw: Vec<(u32, Arc<Vec<Vec3>>, f64)> = Vec::new();
        for p in 1..=sampling.p_max {
            let sampler = BridgeSampler::new(p, sampling.n_steps, sub_seed(sampling.seed, &[slab_tag, si as u64, p as u64]))?;
            let paths = sampler.ensemble(exec, 0, sampling.n_paths);
            let weights: Vec<Result<f64>> = map_range(exec, paths.len(), |m| {
                let lp = Loop {
                    r: [0.0; 3],
                    species: sd.species.clone(),
                    p,
                    n_steps: sampling.n_steps,
                    path: Arc::new(paths[m].clone()),
                };
                activity_weight(&sd.species, p, thermo, self_energy_coulomb(&lp))
            });
            for (path, w) in paths.into_iter().zip(weights) {
                let w = w?;
                if w < 0.0 {
                    return param(format!(
                        "species {} has a negative exchange weight at p = {p}; lower p_max for fermions",
                        sd.species.name
                    ));
                }
                raw.push((p, Arc::new(path), w / sampling.n_paths as f64));
            }
        }
        let norm: f64 = raw.iter().map(|(p, _, w)| *p as f64 * w).sum();
        if !(norm > 0.0 && norm.is_finite()) {
            return param(format!("activities of species {} do not normalize", sd.species.name));
        }
        for (p, path, w) in raw {
            cells.push(Cell {
                species_index: si,
                species: sd.species.clone(),
                p,
                n_steps: sampling.n_steps,
                path,
                density: sd.number_density * w / norm,
            });
        }
    }
    Ok(cells)
}

/// Multiplier applied to the homogeneous densities as a function of `x`.
pub type ProfileFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Loop densities of one slab on its `x` grid.
#[derive(Clone)]
pub struct DensityProfile {
    pub grid: PanelGrid,
    pub cells: Vec<Cell>,
    pub beta: f64,
    profile_fn: Option<ProfileFn>,
    profile: Vec<f64>,
}

impl std::fmt::Debug for DensityProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DensityProfile")
            .field("grid", &self.grid)
            .field("cells", &self.cells.len())
            .field("beta", &self.beta)
            .finish()
    }
}

impl DensityProfile {
    /// Step profile: constant densities across the slab.
    pub fn homogeneous(grid: PanelGrid, cells: Vec<Cell>, beta: f64) -> Self {
        let profile = vec![1.0; grid.len()];
        Self { grid, cells, beta, profile_fn: None, profile }
    }

    /// Densities scaled by `f(x)` (applied to every cell alike, so
    /// neutrality is preserved).
    pub fn with_profile(mut self, f: ProfileFn) -> Self {
        self.profile = self.grid.nodes.iter().map(|&x| f(x)).collect();
        self.profile_fn = Some(f);
        self
    }

    /// Same densities on a grid with twice as many panels.
    pub fn refined(&self) -> Self {
        let grid = self.grid.refined();
        let base = Self::homogeneous(grid, self.cells.clone(), self.beta);
        match &self.profile_fn {
            Some(f) => base.with_profile(f.clone()),
            None => base,
        }
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn n_unknowns(&self) -> usize {
        self.grid.len() * self.cells.len()
    }

    pub fn index(&self, ix: usize, c: usize) -> usize {
        ix * self.cells.len() + c
    }

    /// Profile multiplier at an arbitrary `x`.
    pub fn profile_at(&self, x: f64) -> f64 {
        self.profile_fn.as_ref().map_or(1.0, |f| f(x))
    }

    /// `β e² ρ` of cell `c` at an arbitrary `x` inside the slab.
    pub fn coupling_at(&self, x: f64, c: usize) -> f64 {
        let cell = &self.cells[c];
        self.beta * cell.charge() * cell.charge() * cell.density * self.profile_at(x)
    }

    pub fn density(&self, ix: usize, c: usize) -> f64 {
        self.cells[c].density * self.profile[ix]
    }

    /// `β e² ρ` per unknown.
    pub fn coupling(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_unknowns());
        for ix in 0..self.grid.len() {
            for (c, cell) in self.cells.iter().enumerate() {
                out.push(self.beta * cell.charge() * cell.charge() * self.density(ix, c));
            }
        }
        out
    }

    /// Charge density `c(x) = Σ_cells e p ρ` at node `ix`.
    pub fn charge_density(&self, ix: usize) -> f64 {
        self.cells.iter().enumerate().map(|(c, cell)| cell.charge() * cell.p as f64 * self.density(ix, c)).sum()
    }

    /// Charge per unit area, `∫ c(x) dx`.
    pub fn charge_per_area(&self) -> f64 {
        (0..self.grid.len()).map(|ix| self.grid.weights[ix] * self.charge_density(ix)).sum()
    }

    /// Local inverse screening length on the grid.
    pub fn screening_field(&self) -> ScreeningField {
        let kappa = (0..self.grid.len())
            .map(|ix| {
                let s: f64 = self
                    .cells
                    .iter()
                    .enumerate()
                    .map(|(c, cell)| cell.charge().powi(2) * (cell.p as f64).powi(2) * self.density(ix, c))
                    .sum();
                (4.0 * PI * self.beta * s).sqrt()
            })
            .collect();
        ScreeningField { kappa }
    }
}

/// Local inverse screening length `κ(x)` on a slab grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ScreeningField {
    pub kappa: Vec<f64>,
}

impl ScreeningField {
    /// Mean screening length `1/κ̄`.
    pub fn lambda_screen(&self) -> f64 {
        let mean = self.kappa.iter().sum::<f64>() / self.kappa.len() as f64;
        1.0 / mean
    }
}
