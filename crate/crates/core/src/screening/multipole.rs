use crate::error::{param, Result};
use crate::quadrature::gk21;
use crate::special::{bessel_j0, bessel_j1};

/// Outcome of the in-plane integrability check of a shifted-charge
/// difference of the classical screened potential.
#[derive(Clone, Debug, PartialEq)]
pub struct MultipoleReport {
    pub radii: Vec<f64>,
    /// Disc integrals `D(R)` of the difference.
    pub values: Vec<f64>,
    /// Largest change between successive radii, relative to the last value.
    pub cauchy: f64,
    pub passes: bool,
}

/// In-plane charge shift of the source, `λ X(s) = (δx, δy, 0)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Shift {
    pub dx: f64,
    pub dy: f64,
}

/// `D(R) = ∫_{|y|<R} d²y [Φ(x₁, x₂+δx, y-δy) - Φ(x₁, x₂, y)]`, computed from the
/// partial transform as `R ∫ dk [Φ(x₁, x₂+δx, k) J₀(k δy) - Φ(x₁, x₂, k)] J₁(kR)`.
///
/// `phi(x1, x2, k)` must decay exponentially in `k` at the given separations.
pub fn disc_integral<F: Fn(f64, f64, f64) -> f64>(phi: &F, x1: f64, x2: f64, shift: Shift, r: f64) -> Result<f64> {
    let gap = (x1 - x2).abs().min((x1 - x2 - shift.dx).abs());
    if !(gap > 0.0) {
        return param("coincident normal coordinates make the transform decay only algebraically");
    }
    let k_max = 40.0 / gap;
    let h = std::f64::consts::PI / r;
    let n = (k_max / h).ceil() as usize;
    let f = |k: f64| {
        let shifted = phi(x1, x2 + shift.dx, k) * bessel_j0(k * shift.dy);
        (shifted - phi(x1, x2, k)) * bessel_j1(k * r)
    };
    let mut acc = 0.0;
    for i in 0..n {
        acc += gk21(&f, i as f64 * h, (i + 1) as f64 * h).0;
    }
    Ok(r * acc)
}

/// Cauchy test of `D(R)` over growing radii: the integral of the shifted
/// difference must settle to better than `tol` relative.
pub fn multipole_integrability_check<F: Fn(f64, f64, f64) -> f64>(
    phi: &F,
    x1: f64,
    x2: f64,
    shift: Shift,
    radii: &[f64],
    tol: f64,
) -> Result<MultipoleReport> {
    if radii.len() < 2 {
        return param("Cauchy test needs at least two radii");
    }
    let values = radii.iter().map(|&r| disc_integral(phi, x1, x2, shift, r)).collect::<Result<Vec<_>>>()?;
    let last = values.last().copied().unwrap_or(0.0);
    let cauchy = if shift.dx == 0.0 && shift.dy == 0.0 {
        0.0
    } else {
        values.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max) / last.abs().max(f64::MIN_POSITIVE)
    };
    Ok(MultipoleReport { radii: radii.to_vec(), values, cauchy, passes: cauchy < tol })
}

/// Full-plane integral of the shifted difference for a homogeneous medium:
/// `(2π/κ)(e^{-κ|x₁-x₂-δx|} - e^{-κ|x₁-x₂|})`.
pub fn bulk_disc_limit(kappa: f64, x1: f64, x2: f64, shift: Shift) -> f64 {
    2.0 * std::f64::consts::PI / kappa * ((-kappa * (x1 - x2 - shift.dx).abs()).exp() - (-kappa * (x1 - x2).abs()).exp())
}
