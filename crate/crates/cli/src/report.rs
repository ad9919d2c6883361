use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::CliError;
use crate::units::UnitSystem;

/// Reference forces at one separation. `eq3` is the attractive part of the
/// low-temperature `r^TE = 0` value; its repulsive thermal correction is
/// `eq3_correction`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LifshitzRow {
    pub eq2: f64,
    pub eq3: f64,
    pub eq3_correction: f64,
    pub eq3_total: f64,
    pub eq4: f64,
    pub eq5: f64,
    /// The low- or high-temperature formula is used outside its regime.
    pub low_t_warning: bool,
    pub high_t_warning: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ForceRow {
    pub d: f64,
    pub d_over_lambda_screen: f64,
    pub alpha: f64,
    pub regime: String,
    pub f_leading: f64,
    pub f_assembled: f64,
    pub f_coupled: Option<f64>,
    pub rel_dev_assembled: f64,
    pub rel_dev_coupled: Option<f64>,
    pub capacitor_el: f64,
    pub capacitor_mag_exponent: f64,
    pub magnetic_remainder: f64,
    pub lifshitz: LifshitzRow,
    pub residuals: BTreeMap<String, f64>,
    pub certified: bool,
    pub config_hash: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlateSummary {
    pub bracket_a: f64,
    pub bracket_b: f64,
    pub bracket_change_a: f64,
    pub bracket_change_b: f64,
    pub annihilation_a: f64,
    pub annihilation_b: f64,
    pub phi0_face_a: f64,
    pub phi0_face_b: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZetaSummary {
    pub quadrature: f64,
    pub quadrature_error: f64,
    pub series: f64,
    pub series_tail: f64,
    pub difference: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitSummary {
    pub slope: f64,
    pub slope_stderr: f64,
    pub slope_ci95: [f64; 2],
    pub points: usize,
}

/// Changes under doubling of the panel count.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub panels: usize,
    pub refined_panels: usize,
    pub delta_bracket_a: f64,
    pub delta_bracket_b: f64,
    pub delta_phi0_face_a: f64,
    pub d: f64,
    pub delta_f_coupled: Option<f64>,
}

/// Reduced units used in the report and their size in the input system.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnitsReport {
    pub system: UnitSystem,
    pub length_unit: f64,
    pub pressure_unit: f64,
    pub beta: f64,
    pub hbar: f64,
    pub c: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub config_hash: String,
    pub seed: u64,
    pub units: UnitsReport,
    pub kappa: f64,
    pub lambda_screen: f64,
    pub zeta3: ZetaSummary,
    pub plates: PlateSummary,
    pub capacitor_mag_exponent: f64,
    pub capacitor_mag_resolved_points: usize,
    /// `(q, q² e^{-q}/sinh q)` samples.
    pub electrostatic_integrand: Vec<[f64; 2]>,
    pub rows: Vec<ForceRow>,
    pub fits: BTreeMap<String, FitSummary>,
    pub convergence: Option<ConvergenceRow>,
    pub residuals: BTreeMap<String, f64>,
    pub certified: bool,
    pub failing_residuals: Vec<String>,
}

/// Wall-clock record, written apart from the reproducible report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Timing {
    pub total_seconds: f64,
    pub stages: BTreeMap<String, f64>,
    pub parallel: bool,
}

/// Flat sweep table row.
#[derive(Serialize)]
struct CsvRow<'a> {
    d: f64,
    d_over_lambda_screen: f64,
    alpha: f64,
    regime: &'a str,
    f_leading: f64,
    f_assembled: f64,
    f_coupled: Option<f64>,
    rel_dev_assembled: f64,
    rel_dev_coupled: Option<f64>,
    capacitor_el: f64,
    magnetic_remainder: f64,
    eq2: f64,
    eq3: f64,
    eq3_correction: f64,
    eq4: f64,
    eq5: f64,
    certified: bool,
}

fn out_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Output(format!("{}: {e}", path.display()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| out_err(path, e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| out_err(path, e))
}

pub fn write_csv(path: &Path, rows: &[ForceRow]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| out_err(path, e))?;
    for r in rows {
        w.serialize(CsvRow {
            d: r.d,
            d_over_lambda_screen: r.d_over_lambda_screen,
            alpha: r.alpha,
            regime: &r.regime,
            f_leading: r.f_leading,
            f_assembled: r.f_assembled,
            f_coupled: r.f_coupled,
            rel_dev_assembled: r.rel_dev_assembled,
            rel_dev_coupled: r.rel_dev_coupled,
            capacitor_el: r.capacitor_el,
            magnetic_remainder: r.magnetic_remainder,
            eq2: r.lifshitz.eq2,
            eq3: r.lifshitz.eq3,
            eq3_correction: r.lifshitz.eq3_correction,
            eq4: r.lifshitz.eq4,
            eq5: r.lifshitz.eq5,
            certified: r.certified,
        })
        .map_err(|e| out_err(path, e))?;
    }
    w.flush().map_err(|e| out_err(path, e))
}

/// Writes `report.json`, `sweep.csv` and `timing.json` into `dir`.
pub fn write_run(dir: &Path, report: &RunReport, timing: &Timing) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| out_err(dir, e))?;
    write_json(&dir.join("report.json"), report)?;
    write_csv(&dir.join("sweep.csv"), &report.rows)?;
    write_json(&dir.join("timing.json"), timing)
}
