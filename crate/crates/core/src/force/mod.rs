//! The Casimir force: universal asymptote, its `q`-integral, assembly from
//! screened single-plate data, capacitor terms and reference formulas.

mod assemble;
mod lifshitz;
mod zeta;

pub use assemble::{
    assemble_force, capacitor_electrostatic, capacitor_force, f_coupled, force_from_brackets, leading_force,
    magnetic_remainder_estimate, monopole_reduction_check, q_grid, shift_orbit, MonopoleCheck,
};
pub use lifshitz::{
    lifshitz_reference, lifshitz_set, ForceRegimeParams, LifshitzSet, LifshitzValue, ReflectionMode, Regime,
    RegimeThresholds,
};
pub use zeta::{force_q_integrand, zeta3_quadrature, zeta3_series, Zeta3Quadrature, Zeta3Series, Q_MAX};

/// Everything reported for one separation.
#[derive(Clone, Debug, PartialEq)]
pub struct ForceBreakdown {
    pub d: f64,
    pub f_leading: f64,
    /// Leading force assembled from computed single-plate brackets.
    pub f_assembled: f64,
    /// `(q, q² e^{-q}/sinh q)` samples of the electrostatic integrand.
    pub f_electrostatic_integrand: Vec<(f64, f64)>,
    pub capacitor_el: f64,
    /// Fitted decay exponent of the magnetic capacitor integrand (positive).
    pub capacitor_mag_exponent: f64,
    /// Size estimate of the neglected `O(d⁻⁵)` magnetic force.
    pub magnetic_remainder: f64,
    pub lifshitz: LifshitzSet,
    pub regime: ForceRegimeParams,
    /// Sum-rule residuals (bracket deviations and annihilation residuals).
    pub sumrule_residuals: Vec<(String, f64)>,
    pub certified: bool,
}
