use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use casimir_core::error::Error;
use casimir_core::fit::fit_power_law;
use casimir_core::force::{
    assemble_force, capacitor_force, f_coupled, force_q_integrand, leading_force, lifshitz_set,
    magnetic_remainder_estimate, zeta3_quadrature, zeta3_series, ForceRegimeParams, RegimeThresholds,
    Zeta3Quadrature,
};
use casimir_core::loopspace::{BridgeSampler, Loop, SpeciesParams, ThermoState};
use casimir_core::par::{try_map_range, Execution};
use casimir_core::potentials::{magnetic_capacitor_decay, FormFactor, MagneticModel};
use casimir_core::screening::{
    build_cells, leading_ursell, sub_seed, ChiSampling, DensityProfile, KSequence, PanelGrid, SlabComposition,
    SpeciesDensity, UrsellLeading,
};

use crate::config::{RunConfig, SlabConfig};
use crate::error::CliError;
use crate::report::{
    ConvergenceRow, FitSummary, ForceRow, LifshitzRow, PlateSummary, RunReport, Timing, UnitsReport, ZetaSummary,
};
use crate::units::{Conversion, UnitSystem};

/// Everything derived from a configuration before any separation is used.
pub struct Setup {
    pub thermo: ThermoState,
    pub conversion: Conversion,
    pub comp_a: SlabComposition,
    pub comp_b: SlabComposition,
    pub profile_a: DensityProfile,
    pub profile_b: DensityProfile,
    /// Mean screening wavenumber of slab A.
    pub kappa: f64,
    pub lambda_screen: f64,
    pub k_sequence: KSequence,
}

/// Parameter errors raised while building the physical model are
/// configuration problems, everything else is a solver problem.
fn setup_error(e: Error) -> CliError {
    match e {
        Error::Parameter(m) => CliError::Config(m),
        other => CliError::Solver(other),
    }
}

fn composition(slab: &SlabConfig, conv: &Conversion, thermo: &ThermoState) -> Result<SlabComposition, CliError> {
    let species = slab
        .species
        .iter()
        .map(|s| {
            let sp = SpeciesParams::new(
                s.name.clone(),
                s.charge,
                conv.mass(s.mass),
                s.spin,
                s.statistics.into(),
                s.chemical_potential,
                thermo,
            )
            .map_err(setup_error)?;
            Ok(SpeciesDensity { species: Arc::new(sp), number_density: conv.density(s.density) })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(SlabComposition { species, neutral: slab.neutral })
}

impl Setup {
    pub fn new(cfg: &RunConfig, exec: Execution) -> Result<Self, CliError> {
        let (thermo, conversion) = match cfg.units.system {
            UnitSystem::Reduced => {
                let t = &cfg.thermo;
                let thermo = ThermoState::reduced(t.beta.unwrap_or(f64::NAN), t.hbar.unwrap_or(f64::NAN), t.c.unwrap_or(f64::NAN))
                    .map_err(setup_error)?;
                (thermo, Conversion::reduced())
            }
            sys => {
                let conv = Conversion::physical(sys, cfg.thermo.temperature.unwrap_or(f64::NAN));
                (ThermoState::reduced(1.0, 1.0, conv.c_reduced).map_err(setup_error)?, conv)
            }
        };
        let n = &cfg.numerics;
        let sampling = ChiSampling {
            p_max: n.p_max,
            n_paths: n.n_paths,
            n_steps: n.n_steps,
            seed: cfg.seed,
            classical: n.classical,
        };
        let comp_a = composition(&cfg.slab_a, &conversion, &thermo)?;
        let comp_b = composition(cfg.slab_b(), &conversion, &thermo)?;
        let (ta, tb) = (conversion.length(cfg.slab_a.thickness), conversion.length(cfg.slab_b().thickness));
        let build = |comp: &SlabComposition, lo: f64, hi: f64, tag: u64| -> Result<DensityProfile, CliError> {
            let cells = build_cells(comp, &sampling, &thermo, tag, exec).map_err(setup_error)?;
            let grid = PanelGrid::new(lo, hi, n.panels, n.order).map_err(setup_error)?;
            Ok(DensityProfile::homogeneous(grid, cells, thermo.beta))
        };
        let profile_a = build(&comp_a, -ta, 0.0, 0)?;
        let profile_b = build(&comp_b, 0.0, tb, 1)?;
        let field = profile_a.screening_field();
        let kappa = field.kappa.iter().sum::<f64>() / field.kappa.len() as f64;
        let base = KSequence::for_kappa(kappa, ta.max(tb));
        Ok(Self {
            thermo,
            conversion,
            comp_a,
            comp_b,
            profile_a,
            profile_b,
            kappa,
            lambda_screen: 1.0 / kappa,
            k_sequence: KSequence { k0: base.k0, levels: n.k_levels },
        })
    }

    /// Separations in reduced lengths.
    pub fn separations(&self, cfg: &RunConfig, d_list: Option<&[f64]>) -> Result<Vec<f64>, CliError> {
        if let Some(ds) = d_list {
            if ds.is_empty() || ds.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
                return Err(CliError::Config("--d-list needs positive separations".into()));
            }
            return Ok(ds.iter().map(|&d| self.conversion.length(d)).collect());
        }
        if !cfg.sweep.d.is_empty() {
            return Ok(cfg.sweep.d.iter().map(|&d| self.conversion.length(d)).collect());
        }
        if !(self.kappa > 0.0) {
            return Err(CliError::Config("sweep.d_screening needs a screening medium; give sweep.d".into()));
        }
        Ok(cfg.sweep.d_screening.iter().map(|&x| x * self.lambda_screen).collect())
    }

    /// Two sampled loops of the first species of slab A on the run's grid.
    pub fn probe_loops(&self, cfg: &RunConfig) -> Result<(Loop, Loop), CliError> {
        let sp = self.comp_a.species[0].species.clone();
        let sampler = BridgeSampler::new(1, cfg.numerics.n_steps, sub_seed(cfg.seed, &[0xca9])).map_err(setup_error)?;
        let mk = |i: u64| Loop::new([0.0; 3], sp.clone(), 1, cfg.numerics.n_steps, Arc::new(sampler.sample(i)));
        Ok((mk(0).map_err(setup_error)?, mk(1).map_err(setup_error)?))
    }

    /// Capacitor fit window in reduced lengths.
    pub fn capacitor_window(&self, cfg: &RunConfig) -> [f64; 2] {
        let l = self.thermo.lambda_ph();
        cfg.numerics.capacitor_window.map(|x| x * l)
    }

    pub fn magnetic_model(&self) -> MagneticModel {
        let m = self.comp_a.species[0].species.mass;
        MagneticModel::new(&self.thermo, FormFactor::from_mass(m, self.thermo.hbar, self.thermo.c))
    }
}

/// Report plus the wall-clock record kept out of it.
pub struct RunOutput {
    pub report: RunReport,
    pub timing: Timing,
}

fn plate_summary(u: &UrsellLeading) -> PlateSummary {
    PlateSummary {
        bracket_a: u.a.bracket,
        bracket_b: u.b.bracket,
        bracket_change_a: u.a.bracket_change,
        bracket_change_b: u.b.bracket_change,
        annihilation_a: u.a.annihilation,
        annihilation_b: u.b.annihilation,
        phi0_face_a: u.a.phi0_face,
        phi0_face_b: u.b.phi0_face,
    }
}

fn fit_summary(x: &[f64], y: &[f64]) -> Option<FitSummary> {
    if x.len() < 2 {
        return None;
    }
    fit_power_law(x, y).map(|f| FitSummary {
        slope: f.slope,
        slope_stderr: f.slope_stderr,
        slope_ci95: [f.slope_ci95.0, f.slope_ci95.1],
        points: f.points,
    })
}

/// Sample → solve → assemble for every separation.
pub fn run_pipeline(cfg: &RunConfig, d_list: Option<&[f64]>, exec: Execution) -> Result<RunOutput, CliError> {
    let start = Instant::now();
    let mut stages = BTreeMap::new();
    let mut lap = {
        let mut last = Instant::now();
        move |name: &str, stages: &mut BTreeMap<String, f64>| {
            stages.insert(name.to_string(), last.elapsed().as_secs_f64());
            last = Instant::now();
        }
    };

    let setup = Setup::new(cfg, exec)?;
    let ds = setup.separations(cfg, d_list)?;
    lap("setup", &mut stages);

    let zq = zeta3_quadrature();
    let zs = zeta3_series(1_000_000);
    lap("zeta3", &mut stages);

    let ursell = leading_ursell(&setup.profile_a, &setup.profile_b, setup.k_sequence, exec)?;
    let plates = plate_summary(&ursell);
    lap("plates", &mut stages);

    let (li, lj) = setup.probe_loops(cfg)?;
    let [x_lo, x_hi] = setup.capacitor_window(cfg);
    let decay = magnetic_capacitor_decay(&li, &lj, &setup.magnetic_model(), x_lo, x_hi, cfg.numerics.capacitor_points)?;
    let mag_exponent = -decay.exponent;
    lap("capacitor", &mut stages);

    let mut residuals = BTreeMap::new();
    residuals.insert("bracket_a".to_string(), (plates.bracket_a + 1.0).abs());
    residuals.insert("bracket_b".to_string(), (plates.bracket_b + 1.0).abs());
    residuals.insert("annihilation_a".to_string(), plates.annihilation_a);
    residuals.insert("annihilation_b".to_string(), plates.annihilation_b);
    let tol = &cfg.tolerances;
    let failing: Vec<String> = residuals.iter().filter(|(_, v)| !(**v < tol.sumrule)).map(|(k, _)| k.clone()).collect();
    let certified = failing.is_empty();

    let rows = compute_rows(cfg, &setup, &ursell, &zq, &ds, mag_exponent, &residuals, certified, exec)?;
    lap("sweep", &mut stages);

    let convergence = if cfg.numerics.convergence_study {
        let row = convergence_study(cfg, &setup, &plates, ds[0], rows[0].f_coupled, exec)?;
        lap("convergence", &mut stages);
        Some(row)
    } else {
        None
    };

    let f_assembled: Vec<f64> = rows.iter().map(|r| r.f_assembled).collect();
    let mut fits = BTreeMap::new();
    if let Some(f) = fit_summary(&ds, &f_assembled) {
        fits.insert("f_assembled_vs_d".to_string(), f);
    }
    if cfg.numerics.coupled_force {
        let fc: Vec<f64> = rows.iter().filter_map(|r| r.f_coupled).collect();
        let dev: Vec<f64> = rows.iter().filter_map(|r| r.rel_dev_coupled).collect();
        if let Some(f) = fit_summary(&ds, &fc) {
            fits.insert("f_coupled_vs_d".to_string(), f);
        }
        if let Some(f) = fit_summary(&ds, &dev) {
            fits.insert("coupled_relative_deviation_vs_d".to_string(), f);
        }
    }

    let conv = setup.conversion;
    let report = RunReport {
        config_hash: cfg.hash(),
        seed: cfg.seed,
        units: UnitsReport {
            system: conv.system,
            length_unit: conv.length_unit,
            pressure_unit: conv.pressure_unit,
            beta: setup.thermo.beta,
            hbar: setup.thermo.hbar,
            c: setup.thermo.c,
        },
        kappa: setup.kappa,
        lambda_screen: setup.lambda_screen,
        zeta3: ZetaSummary {
            quadrature: zq.value,
            quadrature_error: zq.error,
            series: zs.value,
            series_tail: zs.tail_uncertainty,
            difference: (zq.value - zs.value).abs(),
        },
        plates,
        capacitor_mag_exponent: mag_exponent,
        capacitor_mag_resolved_points: decay.resolved_points,
        electrostatic_integrand: (0..=40).map(|i| 0.5 * i as f64).map(|q| [q, force_q_integrand(q)]).collect(),
        rows,
        fits,
        convergence,
        residuals,
        certified,
        failing_residuals: failing,
    };
    let timing = Timing { total_seconds: start.elapsed().as_secs_f64(), stages, parallel: exec.is_parallel() };
    Ok(RunOutput { report, timing })
}

#[allow(clippy::too_many_arguments)]
fn compute_rows(
    cfg: &RunConfig,
    setup: &Setup,
    ursell: &UrsellLeading,
    zq: &Zeta3Quadrature,
    ds: &[f64],
    mag_exponent: f64,
    residuals: &BTreeMap<String, f64>,
    certified: bool,
    exec: Execution,
) -> Result<Vec<ForceRow>, CliError> {
    let th: RegimeThresholds = cfg.regime.into();
    let hash = cfg.hash();
    let cap = capacitor_force(&setup.profile_a, &setup.profile_b, setup.comp_a.neutral && setup.comp_b.neutral);
    let rows = try_map_range(exec, ds.len(), |i| -> Result<ForceRow, Error> {
        let d = ds[i];
        let t = &setup.thermo;
        let f_leading = leading_force(t, d);
        let f_assembled = assemble_force(ursell, d, zq);
        let f_coupled = if cfg.numerics.coupled_force {
            Some(f_coupled(&setup.profile_a, &setup.profile_b, d, cfg.numerics.q_order, Execution::Sequential)?)
        } else {
            None
        };
        let regime = ForceRegimeParams::new(t, d, th)?;
        let l = lifshitz_set(t, d, th)?;
        let rel = |f: f64| (f - f_leading).abs() / f_leading.abs();
        Ok(ForceRow {
            d,
            d_over_lambda_screen: d * setup.kappa,
            alpha: regime.alpha,
            regime: format!("{:?}", regime.regime),
            f_leading,
            f_assembled,
            f_coupled,
            rel_dev_assembled: rel(f_assembled),
            rel_dev_coupled: f_coupled.map(rel),
            capacitor_el: cap,
            capacitor_mag_exponent: mag_exponent,
            magnetic_remainder: magnetic_remainder_estimate(t, d),
            lifshitz: LifshitzRow {
                eq2: l.low_t_te1.total(),
                eq3: l.low_t_te0.dominant,
                eq3_correction: l.low_t_te0.correction,
                eq3_total: l.low_t_te0.total(),
                eq4: l.high_t_te1.total(),
                eq5: l.high_t_te0.total(),
                low_t_warning: l.low_t_te1.regime_warning,
                high_t_warning: l.high_t_te1.regime_warning,
            },
            residuals: residuals.clone(),
            certified,
            config_hash: hash.clone(),
        })
    })?;
    Ok(rows)
}

fn convergence_study(
    cfg: &RunConfig,
    setup: &Setup,
    plates: &PlateSummary,
    d: f64,
    f_coupled_base: Option<f64>,
    exec: Execution,
) -> Result<ConvergenceRow, CliError> {
    let (pa, pb) = (setup.profile_a.refined(), setup.profile_b.refined());
    let fine = plate_summary(&leading_ursell(&pa, &pb, setup.k_sequence, exec)?);
    let f_fine = match f_coupled_base {
        Some(_) => Some(f_coupled(&pa, &pb, d, cfg.numerics.q_order, exec)?),
        None => None,
    };
    Ok(ConvergenceRow {
        panels: cfg.numerics.panels,
        refined_panels: 2 * cfg.numerics.panels,
        delta_bracket_a: (fine.bracket_a - plates.bracket_a).abs(),
        delta_bracket_b: (fine.bracket_b - plates.bracket_b).abs(),
        delta_phi0_face_a: (fine.phi0_face_a - plates.phi0_face_a).abs() / plates.phi0_face_a.abs(),
        d,
        delta_f_coupled: f_coupled_base.zip(f_fine).map(|(a, b)| (a - b).abs() / a.abs()),
    })
}
