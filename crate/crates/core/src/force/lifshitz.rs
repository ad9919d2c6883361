use std::f64::consts::PI;

use crate::error::{param, Result};
use crate::loopspace::ThermoState;
use crate::special::ZETA3;

/// Low- or high-temperature regime of the reference formulas.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// `α ≫ 1`: photon thermal length much larger than the separation.
    LowTemperature,
    /// `α ≪ 1`: separation much larger than the photon thermal length.
    HighTemperature,
    /// Neither limit applies at the configured thresholds.
    Crossover,
}

/// Transverse-electric reflection of the plates at zero frequency.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReflectionMode {
    /// `r^TE(0, k) = 1`.
    Te1,
    /// `r^TE(0, k) = 0`.
    Te0,
}

/// `α = ħc / (k_B T d)` and the regime it selects.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ForceRegimeParams {
    pub alpha: f64,
    pub regime: Regime,
}

/// Regime thresholds on `α`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegimeThresholds {
    pub low_t_above: f64,
    pub high_t_below: f64,
}

impl Default for RegimeThresholds {
    fn default() -> Self {
        Self { low_t_above: 10.0, high_t_below: 0.1 }
    }
}

impl ForceRegimeParams {
    pub fn new(thermo: &ThermoState, d: f64, th: RegimeThresholds) -> Result<Self> {
        if !(d.is_finite() && d > 0.0) {
            return param(format!("separation must be positive, got {d}"));
        }
        let alpha = thermo.hbar * thermo.c / (thermo.kb * thermo.temperature() * d);
        let regime = if alpha > th.low_t_above {
            Regime::LowTemperature
        } else if alpha < th.high_t_below {
            Regime::HighTemperature
        } else {
            Regime::Crossover
        };
        Ok(Self { alpha, regime })
    }
}

/// A reference force per area. The repulsive thermal correction of the
/// low-temperature `r^TE = 0` formula is kept apart from the dominant term.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LifshitzValue {
    /// Dominant term (always attractive).
    pub dominant: f64,
    /// Positive thermal correction, zero when absent.
    pub correction: f64,
    /// Set when the requested regime disagrees with `α`.
    pub regime_warning: bool,
}

impl LifshitzValue {
    pub fn total(&self) -> f64 {
        self.dominant + self.correction
    }
}

/// Closed-form reference for two plates in the given regime.
pub fn lifshitz_reference(
    thermo: &ThermoState,
    d: f64,
    mode: ReflectionMode,
    regime: Regime,
    th: RegimeThresholds,
) -> Result<LifshitzValue> {
    let params = ForceRegimeParams::new(thermo, d, th)?;
    let kt = thermo.kb * thermo.temperature();
    let (dominant, correction) = match (regime, mode) {
        (Regime::LowTemperature, ReflectionMode::Te1) => (-PI * PI * thermo.hbar * thermo.c / (240.0 * d.powi(4)), 0.0),
        (Regime::LowTemperature, ReflectionMode::Te0) => {
            (-PI * PI * thermo.hbar * thermo.c / (240.0 * d.powi(4)), ZETA3 * kt / (8.0 * PI * d.powi(3)))
        }
        (Regime::HighTemperature, ReflectionMode::Te1) => (-ZETA3 * kt / (4.0 * PI * d.powi(3)), 0.0),
        (Regime::HighTemperature, ReflectionMode::Te0) => (-ZETA3 * kt / (8.0 * PI * d.powi(3)), 0.0),
        (Regime::Crossover, _) => return param("no closed form in the crossover regime"),
    };
    Ok(LifshitzValue { dominant, correction, regime_warning: params.regime != regime })
}

/// The four reference values: low-T `r^TE = 1` and `0`, then high-T `1` and `0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LifshitzSet {
    pub low_t_te1: LifshitzValue,
    pub low_t_te0: LifshitzValue,
    pub high_t_te1: LifshitzValue,
    pub high_t_te0: LifshitzValue,
}

pub fn lifshitz_set(thermo: &ThermoState, d: f64, th: RegimeThresholds) -> Result<LifshitzSet> {
    use ReflectionMode::*;
    use Regime::*;
    Ok(LifshitzSet {
        low_t_te1: lifshitz_reference(thermo, d, Te1, LowTemperature, th)?,
        low_t_te0: lifshitz_reference(thermo, d, Te0, LowTemperature, th)?,
        high_t_te1: lifshitz_reference(thermo, d, Te1, HighTemperature, th)?,
        high_t_te0: lifshitz_reference(thermo, d, Te0, HighTemperature, th)?,
    })
}
