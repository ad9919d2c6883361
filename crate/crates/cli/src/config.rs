use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use casimir_core::force::RegimeThresholds;
use casimir_core::loopspace::Statistics;

use crate::error::CliError;
use crate::units::UnitSystem;

/// A complete run description, read from one TOML document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub units: Units,
    pub thermo: ThermoConfig,
    pub slab_a: SlabConfig,
    /// Defaults to a copy of `slab_a`.
    #[serde(default)]
    pub slab_b: Option<SlabConfig>,
    #[serde(default)]
    pub numerics: Numerics,
    pub sweep: Sweep,
    #[serde(default)]
    pub regime: RegimeConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: Output,
}

fn default_seed() -> u64 {
    7
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Units {
    pub system: UnitSystem,
}

/// Thermodynamic constants. Reduced runs give `beta`, `hbar` and `c`;
/// SI and Gaussian runs give a `temperature` in kelvin and use the physical
/// constants of that system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermoConfig {
    pub beta: Option<f64>,
    pub hbar: Option<f64>,
    pub c: Option<f64>,
    pub temperature: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlabConfig {
    pub thickness: f64,
    #[serde(default = "yes")]
    pub neutral: bool,
    pub species: Vec<SpeciesConfig>,
}

fn yes() -> bool {
    true
}

/// One species. In SI and Gaussian runs the charge is in units of the
/// elementary charge, the mass in kg (SI) or g (Gaussian) and the density
/// per m³ or per cm³.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeciesConfig {
    pub name: String,
    pub charge: f64,
    pub mass: f64,
    pub density: f64,
    #[serde(default)]
    pub spin: f64,
    #[serde(default)]
    pub statistics: StatisticsConfig,
    #[serde(default)]
    pub chemical_potential: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StatisticsConfig {
    #[default]
    Boson,
    Fermion,
}

impl From<StatisticsConfig> for Statistics {
    fn from(s: StatisticsConfig) -> Self {
        match s {
            StatisticsConfig::Boson => Statistics::Boson,
            StatisticsConfig::Fermion => Statistics::Fermion,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Numerics {
    /// Time steps per unit of loop time.
    pub n_steps: u32,
    pub p_max: u32,
    /// Sampled loop shapes per species and charge number.
    pub n_paths: usize,
    /// Panels across each slab.
    pub panels: usize,
    /// Gauss–Legendre nodes per panel.
    pub order: usize,
    /// Replace every loop by a point charge.
    pub classical: bool,
    /// Levels of the `k → 0` extrapolation sequence.
    pub k_levels: usize,
    /// Nodes per panel of the composite `q` rule for the finite-`d` force.
    pub q_order: usize,
    /// Compute the finite-separation Debye–Hückel force.
    pub coupled_force: bool,
    /// Repeat the plate solve on a doubled grid and report the changes.
    pub convergence_study: bool,
    /// Window `[X_lo, X_hi]` for the magnetic capacitor fit, in units of the
    /// photon thermal length `βħc`.
    pub capacitor_window: [f64; 2],
    pub capacitor_points: usize,
    /// Monte Carlo samples for the bridge covariance check.
    pub covariance_samples: usize,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            n_steps: 8,
            p_max: 2,
            n_paths: 4,
            panels: 6,
            order: 6,
            classical: false,
            k_levels: 4,
            q_order: 6,
            coupled_force: true,
            convergence_study: false,
            capacitor_window: [1.0, 10.0],
            capacitor_points: 8,
            covariance_samples: 100_000,
        }
    }
}

/// Separations, either as lengths or as multiples of the screening length.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    #[serde(default)]
    pub d: Vec<f64>,
    #[serde(default)]
    pub d_screening: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RegimeConfig {
    pub low_t_above: f64,
    pub high_t_below: f64,
}

impl Default for RegimeConfig {
    fn default() -> Self {
        let t = RegimeThresholds::default();
        Self { low_t_above: t.low_t_above, high_t_below: t.high_t_below }
    }
}

impl From<RegimeConfig> for RegimeThresholds {
    fn from(r: RegimeConfig) -> Self {
        Self { low_t_above: r.low_t_above, high_t_below: r.high_t_below }
    }
}

/// Pass thresholds. Every entry can be overridden from the command line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// `|bracket + 1|` and annihilation residuals.
    pub sumrule: f64,
    pub bulk_sumrule: f64,
    /// Neutrality of the declared composition, relative to `Σ|e n|`.
    pub neutrality: f64,
    /// Assembled vs universal force, relative.
    pub leading: f64,
    pub zeta3: f64,
    pub capacitor_exponent: f64,
    pub factorization_slope: f64,
    pub w_slope: f64,
    pub dw_slope: f64,
    /// Allowed slack above `-1` in the convergence-rate fit.
    pub convergence_slope: f64,
    pub covariance_sigma: f64,
    pub force_kernel: f64,
    pub transverse_kernel: f64,
    pub monopole: f64,
    /// Small-`K` magnetic oracle at `n_steps = 16`; scales as `(16/n_steps)²`.
    pub wm_small_k: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            sumrule: 1e-2,
            bulk_sumrule: 1e-3,
            neutrality: 1e-12,
            leading: 0.02,
            zeta3: 1e-10,
            capacitor_exponent: 4.0,
            factorization_slope: 0.1,
            w_slope: 0.05,
            dw_slope: 0.1,
            convergence_slope: 0.05,
            covariance_sigma: 3.0,
            force_kernel: 1e-6,
            transverse_kernel: 1e-8,
            monopole: 1e-4,
            wm_small_k: 1e-3,
        }
    }
}

impl Tolerances {
    /// Applies `name=value` pairs.
    pub fn apply_overrides(&mut self, pairs: &[(String, f64)]) -> Result<(), CliError> {
        let mut table = match toml::Value::try_from(&*self) {
            Ok(toml::Value::Table(t)) => t,
            _ => return Err(CliError::Config("tolerance table did not serialize".into())),
        };
        for (k, v) in pairs {
            if !table.contains_key(k) {
                return Err(CliError::Config(format!("unknown tolerance `{k}`")));
            }
            table.insert(k.clone(), toml::Value::Float(*v));
        }
        *self = toml::Value::Table(table).try_into().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Output {
    pub dir: String,
}

impl Default for Output {
    fn default() -> Self {
        Self { dir: "casimir-out".into() }
    }
}

/// Parses `name=value[,name=value...]`.
pub fn parse_overrides(s: &str) -> Result<Vec<(String, f64)>, CliError> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("override `{p}` is not name=value")))?;
            let v: f64 = v.trim().parse().map_err(|_| CliError::Config(format!("override `{p}` has no number")))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn slab_b(&self) -> &SlabConfig {
        self.slab_b.as_ref().unwrap_or(&self.slab_a)
    }

    /// Schema checks that do not need the physics core.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        let positive = |name: &str, v: f64| -> Result<(), CliError> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(CliError::Config(format!("{name} must be finite and positive, got {v}")))
            }
        };
        match self.units.system {
            UnitSystem::Reduced => {
                for (n, v) in [("thermo.beta", self.thermo.beta), ("thermo.hbar", self.thermo.hbar), ("thermo.c", self.thermo.c)] {
                    match v {
                        Some(v) => positive(n, v)?,
                        None => return bad(format!("{n} is required in reduced units")),
                    }
                }
                if self.thermo.temperature.is_some() {
                    return bad("thermo.temperature is not used in reduced units; give thermo.beta".into());
                }
            }
            UnitSystem::Si | UnitSystem::Gaussian => {
                positive("thermo.temperature", self.thermo.temperature.unwrap_or(f64::NAN))?;
                if self.thermo.beta.is_some() || self.thermo.hbar.is_some() || self.thermo.c.is_some() {
                    return bad("physical unit systems take thermo.temperature and fix hbar and c".into());
                }
            }
        }
        for (label, slab) in [("slab_a", &self.slab_a), ("slab_b", self.slab_b())] {
            positive(&format!("{label}.thickness"), slab.thickness)?;
            if slab.species.is_empty() {
                return bad(format!("{label} needs at least one species"));
            }
            for s in &slab.species {
                positive(&format!("{label}.{}.mass", s.name), s.mass)?;
                if !(s.density.is_finite() && s.density >= 0.0) {
                    return bad(format!("{label}.{}.density must be non-negative", s.name));
                }
                if !s.charge.is_finite() {
                    return bad(format!("{label}.{}.charge must be finite", s.name));
                }
            }
            if slab.neutral {
                let net: f64 = slab.species.iter().map(|s| s.charge * s.density).sum();
                let scale: f64 = slab.species.iter().map(|s| (s.charge * s.density).abs()).sum();
                if net.abs() > self.tolerances.neutrality * scale.max(f64::MIN_POSITIVE) {
                    return bad(format!("{label} is declared neutral but Σ e n = {net:e}"));
                }
            }
        }
        let n = &self.numerics;
        for (name, v) in [
            ("numerics.n_steps", n.n_steps as usize),
            ("numerics.p_max", n.p_max as usize),
            ("numerics.n_paths", n.n_paths),
            ("numerics.panels", n.panels),
            ("numerics.order", n.order),
            ("numerics.k_levels", n.k_levels),
            ("numerics.q_order", n.q_order),
            ("numerics.capacitor_points", n.capacitor_points),
            ("numerics.covariance_samples", n.covariance_samples),
        ] {
            if v == 0 {
                return bad(format!("{name} must be positive"));
            }
        }
        if n.n_steps < 2 {
            return bad("numerics.n_steps must be at least 2".into());
        }
        if n.capacitor_points < 3 || !(n.capacitor_window[0] > 0.0 && n.capacitor_window[1] > n.capacitor_window[0]) {
            return bad("capacitor window needs 0 < lo < hi and at least three points".into());
        }
        if self.sweep.d.is_empty() == self.sweep.d_screening.is_empty() {
            return bad("give exactly one of sweep.d and sweep.d_screening".into());
        }
        for &d in self.sweep.d.iter().chain(&self.sweep.d_screening) {
            positive("sweep separation", d)?;
        }
        if !(self.regime.high_t_below > 0.0 && self.regime.low_t_above > self.regime.high_t_below) {
            return bad("regime thresholds need 0 < high_t_below < low_t_above".into());
        }
        let t = serde_json::to_value(&self.tolerances).map_err(|e| CliError::Config(e.to_string()))?;
        for (k, v) in t.as_object().into_iter().flatten() {
            positive(&format!("tolerances.{k}"), v.as_f64().unwrap_or(f64::NAN))?;
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form of the resolved configuration.
    /// Digest of everything that can change the numbers; the output
    /// location is left out.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output = Output::default();
        let canonical = serde_json::to_vec(&c).expect("config serializes");
        let digest = Sha256::digest(&canonical);
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Default configuration: a symmetric ± plasma in reduced units with `κ = 1`.
pub const DEFAULT_CONFIG: &str = r#"
seed = 7

[units]
system = "reduced"

[thermo]
beta = 1.0
hbar = 1.0
c = 5.0

[slab_a]
thickness = 6.0
neutral = true

[[slab_a.species]]
name = "cation"
charge = 1.0
mass = 100.0
density = 0.039788735772973836

[[slab_a.species]]
name = "anion"
charge = -1.0
mass = 100.0
density = 0.039788735772973836

[sweep]
d_screening = [100.0, 200.0, 400.0]
"#;
