//! Brute-force quadrature references for the closed-form kernels.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::transverse_delta;
use crate::error::Result;
use crate::quadrature::{integrate_fourier_half_line, integrate_to_infinity, QuadOptions};

/// In-plane transform of `∂_x 1/r` between points a normal distance
/// `D = d + x₂ - x₁` apart, by quadrature. The `y₂` integral is done in
/// closed form, `∫ dy₂ D/(D²+y₁²+y₂²)^{3/2} = 2D/(D²+y₁²)`, leaving a
/// Fourier integral over `y₁`.
pub fn coulomb_force_kernel_quadrature(x1: f64, x2: f64, q: f64, d: f64) -> f64 {
    let big_d = d + x2 - x1;
    let k = q / d;
    let inner = |y1: f64| 2.0 * big_d / (big_d * big_d + y1 * y1);
    let opts = QuadOptions::new(1e-14, 1e-12);
    2.0 * integrate_fourier_half_line(|y1: f64| inner(y1) * (k * y1).cos(), k, 0.0, opts).value
}

/// `∫ dk₁/2π e^{i k₁ x} (4π/K²) δ^{tr}_{μν}(K)` with `K = (k₁, q)`, by quadrature.
pub fn v_transverse_quadrature(x: f64, q: [f64; 2], mu: usize, nu: usize) -> Result<Complex64> {
    // Validate the direction once; the integrand never reaches K = 0 when q ≠ 0.
    transverse_delta([1.0, q[0], q[1]])?;
    let kernel = |k1: f64| -> Complex64 {
        let kv = [k1, q[0], q[1]];
        let t = transverse_delta(kv).expect("nonzero wavevector");
        let k2 = k1 * k1 + q[0] * q[0] + q[1] * q[1];
        Complex64::from_polar(1.0, k1 * x) * (4.0 * PI / k2 * t[(mu, nu)] / (2.0 * PI))
    };
    let f = |k1: f64| kernel(k1) + kernel(-k1);
    let opts = QuadOptions::new(1e-15, 1e-13);
    Ok(if x == 0.0 {
        integrate_to_infinity(f, 0.0, opts).value
    } else {
        integrate_fourier_half_line(f, x.abs(), 0.0, opts).value
    })
}
