use nalgebra::Matrix3;
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::loopspace::Vec3;

/// Transverse projector `δ_{μν} - K_μ K_ν / |K|²`.
pub fn transverse_delta(k: Vec3) -> Result<Matrix3<f64>> {
    let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    if k2 == 0.0 || !k2.is_finite() {
        return Err(Error::SingularArgument("transverse projector at K = 0".into()));
    }
    Ok(Matrix3::from_fn(|m, n| if m == n { 1.0 } else { 0.0 } - k[m] * k[n] / k2))
}

/// Components of the partial Fourier transform
/// `v^{μν}(x, q) = ∫ dk₁/2π e^{i k₁ x} 4π/(k₁² + q²) δ^tr_{μν}(k₁, q)`
/// written for `x > 0` as `e^{-q x} (A + B x)`; the sign of `x` enters only
/// through the mixed normal/in-plane entries, which are odd in `x`.
#[derive(Clone, Copy, Debug)]
pub struct VTransverse {
    q: [f64; 2],
    qmag: f64,
}

impl VTransverse {
    pub fn new(q: [f64; 2]) -> Result<Self> {
        let qmag = q[0].hypot(q[1]);
        if qmag == 0.0 || !qmag.is_finite() {
            return Err(Error::SingularArgument("v^{μν}(x, q) at q = 0".into()));
        }
        Ok(Self { q, qmag })
    }

    /// Full 3-vector component of the in-plane wavevector (index 0 is normal).
    fn qc(&self, mu: usize) -> f64 {
        if mu == 0 {
            0.0
        } else {
            self.q[mu - 1]
        }
    }

    /// `(A, B)` such that `v^{μν}(x) = e^{-q|x|}(A + B|x|)` with the odd part
    /// folded into `B` for `x > 0`.
    fn coefficients(&self, mu: usize, nu: usize) -> (Complex64, Complex64) {
        let q = self.qmag;
        let z = Complex64::new(0.0, 0.0);
        match (mu == 0, nu == 0) {
            (true, true) => (Complex64::new(PI / q, 0.0), Complex64::new(PI, 0.0)),
            (false, true) => (z, Complex64::new(0.0, -PI * self.qc(mu) / q)),
            (true, false) => (z, Complex64::new(0.0, -PI * self.qc(nu) / q)),
            (false, false) => {
                let qq = self.qc(mu) * self.qc(nu) / (q * q);
                let delta = if mu == nu { 1.0 } else { 0.0 };
                (Complex64::new(PI / q * (2.0 * delta - qq), 0.0), Complex64::new(-PI * qq, 0.0))
            }
        }
    }

    /// `v^{μν}(x, q)`.
    pub fn value(&self, x: f64, mu: usize, nu: usize) -> Complex64 {
        let (a, b) = self.coefficients(mu, nu);
        let odd = (mu == 0) != (nu == 0);
        let e = (-self.qmag * x.abs()).exp();
        if odd {
            b * (x * e)
        } else {
            (a + b * x.abs()) * e
        }
    }

    /// `n`-th derivative in `x` of `v^{μν}(σ x)` at a point `x > 0`, where
    /// `σ = ±1` selects the reflected kernel `v(-x)`.
    pub fn derivative(&self, x: f64, sigma: f64, n: u32, mu: usize, nu: usize) -> Complex64 {
        assert!(x > 0.0, "derivatives are taken away from the kink at x = 0");
        let (a, mut b) = self.coefficients(mu, nu);
        if (mu == 0) != (nu == 0) && sigma < 0.0 {
            b = -b;
        }
        let q = self.qmag;
        let e = (-q * x).exp();
        let mq = -q;
        let pow_n = mq.powi(n as i32);
        let pow_nm1 = if n == 0 { 0.0 } else { n as f64 * mq.powi(n as i32 - 1) };
        ((a + b * x) * pow_n + b * pow_nm1) * e
    }
}

/// Closed form of `v^{μν}(x, q)` for axis indices `0..3` (0 = slab normal).
pub fn v_transverse_partial(x: f64, q: [f64; 2], mu: usize, nu: usize) -> Result<Complex64> {
    if mu > 2 || nu > 2 {
        return Err(Error::Parameter(format!("tensor indices ({mu}, {nu}) out of range")));
    }
    Ok(VTransverse::new(q)?.value(x, mu, nu))
}
