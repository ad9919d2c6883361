use nalgebra::Matrix3;
use num_complex::Complex64;
use std::f64::consts::{PI, SQRT_2};

use super::transverse::{transverse_delta, VTransverse};
use super::{FormFactor, FormProfile};
use crate::error::{param, Error, Result};
use crate::fit::{fit_power_law, PowerLawFit};
use crate::loopspace::{Loop, ThermoState, Vec3};
use crate::quadrature::{integrate, integrate_fourier_half_line, integrate_oscillatory_tail, QuadOptions, QuadResult};

/// Constants entering the magnetic potential.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MagneticModel {
    pub beta: f64,
    pub c: f64,
    /// Photon thermal length; zero selects the classical field (`Q ≡ 1`).
    pub lambda_ph: f64,
    pub form: FormFactor,
}

impl MagneticModel {
    pub fn new(thermo: &ThermoState, form: FormFactor) -> Self {
        Self { beta: thermo.beta, c: thermo.c, lambda_ph: thermo.lambda_ph(), form }
    }

    /// Same constants with a classical electromagnetic field.
    pub fn classical(&self) -> Self {
        Self { lambda_ph: 0.0, ..*self }
    }

    fn prefactor(&self, li: &Loop, lj: &Loop) -> f64 {
        1.0 / (self.beta * (li.species.mass * lj.species.mass).sqrt() * self.c * self.c)
    }
}

const BERNOULLI: [f64; 15] = [
    1.0,
    -0.5,
    1.0 / 6.0,
    0.0,
    -1.0 / 30.0,
    0.0,
    1.0 / 42.0,
    0.0,
    -1.0 / 30.0,
    0.0,
    5.0 / 66.0,
    0.0,
    -691.0 / 2730.0,
    0.0,
    7.0 / 6.0,
];

fn bernoulli_poly(n: usize, t: f64) -> f64 {
    let mut binom = 1.0;
    let mut acc = 0.0;
    for (k, b) in BERNOULLI.iter().enumerate().take(n + 1) {
        if k > 0 {
            binom *= (n + 1 - k) as f64 / k as f64;
        }
        acc += binom * b * t.powi((n - k) as i32);
    }
    acc
}

/// Second antiderivative of `Q(x, t) - 1` in `t`, periodic with period one.
fn q_second_antiderivative(x: f64, t: f64) -> f64 {
    let t = t.rem_euclid(1.0);
    0.5 / x * ((x * (t - 1.0)).exp() + (-x * t).exp()) / (-(-x).exp_m1()) - 0.5 * t * t + 0.5 * t
}

/// Photon kernel averaged over a pair of time segments separated by `d`
/// steps, minus one: `n² ∫∫_{segments} (Q(x, s - s') - 1) ds ds'`.
///
/// Averaging keeps the equal-time pairing bounded (`→ n`) at large `x`, where
/// the kernel becomes narrower than a segment.
pub(crate) fn q_bar_minus_one(x: f64, d: usize, n: usize) -> f64 {
    let h = 1.0 / n as f64;
    let t0 = d as f64 * h;
    let n2 = (n * n) as f64;
    if x < 0.5 {
        // Q - 1 = Σ_{m even ≥ 2} B_m(t) x^m / m!, so the second antiderivative
        // is Σ B_{m+2}(t) x^m / (m+2)!, periodic as written on [0, 1).
        let second = |t: f64| bernoulli_poly_periodic_sum(x, t);
        n2 * (second(t0 + h) - 2.0 * second(t0) + second(t0 - h))
    } else {
        let g = |t: f64| q_second_antiderivative(x, t);
        n2 * (g(t0 + h) - 2.0 * g(t0) + g(t0 - h))
    }
}

fn bernoulli_poly_periodic_sum(x: f64, t: f64) -> f64 {
    let t = t.rem_euclid(1.0);
    let mut acc = 0.0;
    let mut xm = x * x;
    let mut fact = 24.0; // (m+2)! at m = 2
    let mut m = 2;
    while m <= 12 {
        acc += bernoulli_poly(m + 2, t) * xm / fact;
        xm *= x * x;
        fact *= ((m + 3) * (m + 4)) as f64;
        m += 2;
    }
    acc
}

fn expi_minus_one(theta: f64) -> Complex64 {
    // e^{iθ} - 1 = 2i sin(θ/2) e^{iθ/2}, free of cancellation for small θ.
    Complex64::new(0.0, 2.0 * (0.5 * theta).sin()) * Complex64::from_polar(1.0, 0.5 * theta)
}

struct PhasedIncrements {
    /// Residue-class sums `Σ_{k ≡ r} ΔX_k e^{iφ_k}`.
    by_residue: Vec<[Complex64; 3]>,
    /// Total `Σ_k ΔX_k e^{iφ_k}`, summed by parts so that it vanishes as `φ → const`.
    total: [Complex64; 3],
}

/// Midpoint phases `φ_k = sign K·λ X̄_k` and the increment sums they weight.
fn phased_increments(lp: &Loop, k: Vec3, sign: f64) -> PhasedIncrements {
    let path = &lp.path;
    let n_seg = lp.n_periodic();
    let n = lp.n_steps as usize;
    let l = lp.lambda();
    let phase_arg = |s: usize| {
        let a = path[s];
        let b = path[s + 1];
        sign * l * 0.5 * (k[0] * (a[0] + b[0]) + k[1] * (a[1] + b[1]) + k[2] * (a[2] + b[2]))
    };
    let args: Vec<f64> = (0..n_seg).map(phase_arg).collect();
    let mut by_residue = vec![[Complex64::default(); 3]; n];
    for s in 0..n_seg {
        let e = Complex64::from_polar(1.0, args[s]);
        let r = s % n;
        for mu in 0..3 {
            by_residue[r][mu] += e * (path[s + 1][mu] - path[s][mu]);
        }
    }
    let mut total = [Complex64::default(); 3];
    for node in 1..n_seg {
        let diff = Complex64::from_polar(1.0, args[node]) * expi_minus_one(args[node - 1] - args[node]);
        for mu in 0..3 {
            total[mu] += diff * path[node][mu];
        }
    }
    PhasedIncrements { by_residue, total }
}

fn contract(a: &[Complex64; 3], t: &Matrix3<f64>, b: &[Complex64; 3]) -> Complex64 {
    let mut acc = Complex64::default();
    for mu in 0..3 {
        for nu in 0..3 {
            let tv = t[(mu, nu)];
            if tv != 0.0 {
                acc += a[mu] * b[nu] * tv;
            }
        }
    }
    acc
}

/// Magnetic potential in Fourier space, `W^m(χ_i, χ_j, K)`.
///
/// The double line integral uses midpoint increments and pairs segments by
/// their fractional time, so `Q` is evaluated once per residue difference.
pub fn wm_pair_fourier(li: &Loop, lj: &Loop, k: Vec3, model: &MagneticModel) -> Result<Complex64> {
    let kmag = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
    if kmag == 0.0 {
        return Err(Error::SingularArgument(
            "W^m at K = 0 depends on the direction of approach; use K = (k₁, 0, 0) with k₁ ≠ 0".into(),
        ));
    }
    if li.n_steps != lj.n_steps {
        return param("magnetic pairing needs a common time grid");
    }
    let g = model.form.eval(kmag);
    let t = transverse_delta(k)? * (4.0 * PI * g * g / (kmag * kmag));
    let a = phased_increments(li, k, 1.0);
    let b = phased_increments(lj, k, -1.0);
    let mut acc = contract(&a.total, &t, &b.total);
    if model.lambda_ph > 0.0 {
        let n = li.n_steps as usize;
        let x = model.lambda_ph * kmag;
        let qm: Vec<f64> = (0..n).map(|d| q_bar_minus_one(x, d, n)).collect();
        for (r, ar) in a.by_residue.iter().enumerate() {
            let at = [
                ar[0] * t[(0, 0)] + ar[1] * t[(1, 0)] + ar[2] * t[(2, 0)],
                ar[0] * t[(0, 1)] + ar[1] * t[(1, 1)] + ar[2] * t[(2, 1)],
                ar[0] * t[(0, 2)] + ar[1] * t[(1, 2)] + ar[2] * t[(2, 2)],
            ];
            for (rp, br) in b.by_residue.iter().enumerate() {
                let w = qm[(r + n - rp) % n];
                acc += (at[0] * br[0] + at[1] * br[1] + at[2] * br[2]) * w;
            }
        }
    }
    Ok(acc * model.prefactor(li, lj))
}

/// Small-`K` form of the classical magnetic potential,
/// `λ_iλ_j/(β√(m_i m_j)c²) ∫dX_i^μ ∫dX_j^ν (K·X_i)(K·X_j) 4π/K² δ^tr_{μν}(K)`.
pub fn wm_small_k(li: &Loop, lj: &Loop, k: Vec3, model: &MagneticModel) -> Result<f64> {
    let kmag2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    let t = transverse_delta(k)? * (4.0 * PI / kmag2);
    let m = |lp: &Loop| -> [f64; 3] {
        let mut acc = [0.0; 3];
        for s in 0..lp.n_periodic() {
            let (a, b) = (lp.path[s], lp.path[s + 1]);
            let kx = 0.5 * (k[0] * (a[0] + b[0]) + k[1] * (a[1] + b[1]) + k[2] * (a[2] + b[2]));
            for mu in 0..3 {
                acc[mu] += (b[mu] - a[mu]) * kx;
            }
        }
        acc
    };
    let (mi, mj) = (m(li), m(lj));
    let mut acc = 0.0;
    for mu in 0..3 {
        for nu in 0..3 {
            acc += mi[mu] * t[(mu, nu)] * mj[nu];
        }
    }
    Ok(acc * li.lambda() * lj.lambda() * model.prefactor(li, lj))
}

/// Fourier transform of the dipolar Coulomb remainder,
/// `W^c(χ_i, χ_j, K) = 4π/K² [Δs Σ_{equal time} - Δs² Σ_{all}] e^{iK·(λ_iX_i - λ_jX_j)}`.
pub fn wc_fourier(li: &Loop, lj: &Loop, k: Vec3) -> Result<Complex64> {
    let kmag2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    if kmag2 == 0.0 {
        return Err(Error::SingularArgument("W^c at K = 0".into()));
    }
    if li.n_steps != lj.n_steps {
        return param("equal-time pairing needs a common time grid");
    }
    let n = li.n_steps as usize;
    let residues = |lp: &Loop, sign: f64| -> Vec<Complex64> {
        let mut out = vec![Complex64::default(); n];
        for s in 0..lp.n_periodic() {
            let x = lp.path[s];
            let arg = sign * lp.lambda() * (k[0] * x[0] + k[1] * x[1] + k[2] * x[2]);
            out[s % n] += Complex64::from_polar(1.0, arg);
        }
        out
    };
    let (pi, pj) = (residues(li, 1.0), residues(lj, -1.0));
    let ds = 1.0 / n as f64;
    let equal: Complex64 = pi.iter().zip(&pj).map(|(a, b)| a * b).sum::<Complex64>() * ds;
    let all = pi.iter().sum::<Complex64>() * pj.iter().sum::<Complex64>() * (ds * ds);
    Ok((equal - all) * (4.0 * PI / kmag2))
}

/// Line-integral moments of one loop used by the asymptotic `W_AB` formula:
/// `a^μ = ∫dX^μ X⁰` and `c^{μβ} = ∫dX^μ Y^β` (in-plane `β`).
#[derive(Clone, Copy, Debug)]
pub struct WabMoments {
    pub a: [f64; 3],
    pub c: [[f64; 2]; 3],
}

impl WabMoments {
    pub fn new(lp: &Loop) -> Self {
        let mut a = [0.0; 3];
        let mut c = [[0.0; 2]; 3];
        for s in 0..lp.n_periodic() {
            let (p, q) = (lp.path[s], lp.path[s + 1]);
            let mid = [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1]), 0.5 * (p[2] + q[2])];
            for mu in 0..3 {
                let dx = q[mu] - p[mu];
                a[mu] += dx * mid[0];
                c[mu][0] += dx * mid[1];
                c[mu][1] += dx * mid[2];
            }
        }
        Self { a, c }
    }

    fn b(&self, q: [f64; 2]) -> [f64; 3] {
        [
            self.c[0][0] * q[0] + self.c[0][1] * q[1],
            self.c[1][0] * q[0] + self.c[1][1] * q[1],
            self.c[2][0] * q[0] + self.c[2][1] * q[1],
        ]
    }
}

/// `Σ_{μν} [i a_i ∂ + b_i][i a_j ∂ + b_j] ∂^extra v^{μν}(-x)` at `x = 1`.
fn dipolar_contraction(mi: &WabMoments, mj: &WabMoments, q: [f64; 2], extra: u32) -> Result<Complex64> {
    let vt = VTransverse::new(q)?;
    let (bi, bj) = (mi.b(q), mj.b(q));
    let i = Complex64::new(0.0, 1.0);
    let mut acc = Complex64::default();
    for mu in 0..3 {
        for nu in 0..3 {
            let d = |n: u32| vt.derivative(1.0, -1.0, n + extra, mu, nu);
            acc += -mi.a[mu] * mj.a[nu] * d(2) + i * (mi.a[mu] * bj[nu] + bi[mu] * mj.a[nu]) * d(1)
                + bi[mu] * bj[nu] * d(0);
        }
    }
    Ok(acc)
}

/// Leading large-`d` form of `W_AB(1, 2, q/d)`: the dipolar double line
/// integral acting on the transverse kernel `v^{μν}`, divided by `d`.
pub fn wab_asymptotic(li: &Loop, lj: &Loop, q: [f64; 2], d: f64, model: &MagneticModel) -> Result<Complex64> {
    let s = dipolar_contraction(&WabMoments::new(li), &WabMoments::new(lj), q, 0)?;
    Ok(s * (li.lambda() * lj.lambda() * model.prefactor(li, lj) / d))
}

/// Leading large-`d` form of `∂_{x₁} W^m_AB(1, 2, q/d)`, of order `d⁻²`.
pub fn wab_derivative_asymptotic(
    li: &Loop,
    lj: &Loop,
    q: [f64; 2],
    d: f64,
    model: &MagneticModel,
) -> Result<Complex64> {
    let s = dipolar_contraction(&WabMoments::new(li), &WabMoments::new(lj), q, 1)?;
    Ok(-s * (li.lambda() * lj.lambda() * model.prefactor(li, lj) / (d * d)))
}

/// Which Fourier kernel the direct `W_AB` quadrature integrates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DirectKernel {
    /// Full `W^m` with form factor and photon kernel.
    Full,
    /// The small-`K` classical dipolar form.
    SmallK,
}

/// Direct quadrature of `W_AB(1, 2, q/d) = (1/d) ∫ dq₁/2π e^{-i q₁ x} W(q₁/d, q/d)`
/// with `x = 1 - (x₁ - x₂)/d`, or of its `x₁` derivative when `derivative` is set.
///
/// The constant large-`q₁` plateau of the kernel (times the form factor) is
/// subtracted first; its transform is concentrated at `x = 0`.
#[allow(clippy::too_many_arguments)]
pub fn wab_direct(
    li: &Loop,
    lj: &Loop,
    x1: f64,
    x2: f64,
    q: [f64; 2],
    d: f64,
    model: &MagneticModel,
    kernel: DirectKernel,
    derivative: bool,
) -> Result<QuadResult<Complex64>> {
    let x = 1.0 - (x1 - x2) / d;
    if x <= 0.0 {
        return param("direct W_AB quadrature needs x₁ - x₂ < d");
    }
    let plateau = {
        let mi = WabMoments::new(li);
        let mj = WabMoments::new(lj);
        4.0 * PI * (mi.a[1] * mj.a[1] + mi.a[2] * mj.a[2]) * li.lambda() * lj.lambda() * model.prefactor(li, lj)
    };
    let kernel_at = |q1: f64| -> Complex64 {
        let kv = [q1 / d, q[0] / d, q[1] / d];
        let (w, g2) = match kernel {
            DirectKernel::Full => {
                let kmag = (kv[0] * kv[0] + kv[1] * kv[1] + kv[2] * kv[2]).sqrt();
                let g = model.form.eval(kmag);
                (wm_pair_fourier(li, lj, kv, model).unwrap_or_default(), g * g)
            }
            DirectKernel::SmallK => (Complex64::new(wm_small_k(li, lj, kv, model).unwrap_or(0.0), 0.0), 1.0),
        };
        let w = w - plateau * g2;
        if derivative {
            w * Complex64::new(0.0, q1 / d)
        } else {
            w
        }
    };
    let integrand = |q1: f64| -> Complex64 {
        (Complex64::from_polar(1.0, -q1 * x) * kernel_at(q1) + Complex64::from_polar(1.0, q1 * x) * kernel_at(-q1))
            / (2.0 * PI)
    };
    let scale = plateau.abs().max(1e-300);
    let r = integrate_fourier_half_line(integrand, x, 0.0, QuadOptions::new(1e-11 * scale, 1e-9));
    Ok(QuadResult { value: r.value / d, error: r.error / d, ..r })
}

/// `∫₀^∞ sin(kω)/k (g²(k) - 1) dk`.
fn sine_form_deficit(omega: f64, form: &FormFactor) -> f64 {
    if omega == 0.0 {
        return 0.0;
    }
    match form.profile {
        FormProfile::Gaussian => {
            // ∫ sin(kω)/k e^{-2k²/k_c²} dk = (π/2) erf(ω k_c / (2√2))
            -0.5 * PI * omega.signum() * statrs::function::erf::erfc(omega.abs() * form.k_cut / (2.0 * SQRT_2))
        }
        FormProfile::QuarticExp => {
            let f = |k: f64| {
                let g = form.eval(k);
                if k == 0.0 {
                    0.0
                } else {
                    (k * omega).sin() / k * (g * g - 1.0)
                }
            };
            let head = 4.0 * form.k_cut;
            let opts = QuadOptions::new(1e-15, 1e-12);
            let a = integrate(f, 0.0, head, opts).value;
            let b = integrate_oscillatory_tail(|k: f64| -(k * omega).sin() / k, head, PI / omega.abs(), opts).value;
            a + b
        }
    }
}

/// `S_d(ω) - (π/2) sgn ω` with `S_d(ω) = ∫₀^∞ sin(kω)/k g²(k) Q̄_d(λ_ph k) dk`,
/// and the quadrature error estimate.
fn segment_sine_transform(omega: f64, d: usize, n: usize, model: &MagneticModel) -> (f64, f64) {
    if omega == 0.0 {
        return (0.0, 0.0);
    }
    let form = model.form;
    if model.lambda_ph == 0.0 {
        return (sine_form_deficit(omega, &form), 1e-16);
    }
    let q_inf = if d == 0 { n as f64 } else { 0.0 };
    let lph = model.lambda_ph;
    let rem = |k: f64| -> f64 {
        let g = form.eval(k);
        let q = 1.0 + q_bar_minus_one(lph * k, d, n) - q_inf;
        let s = if k == 0.0 { omega } else { (k * omega).sin() / k };
        s * g * g * q
    };
    let head = (40.0 / lph).max(8.0 * PI / omega.abs()).min(4.0 * form.k_cut);
    let opts = QuadOptions { abs_tol: 1e-15, rel_tol: 1e-13, max_intervals: 4000 };
    let a = integrate(rem, 0.0, head, opts);
    let b = integrate_oscillatory_tail(rem, head, PI / omega.abs(), opts);
    let value = q_inf * sine_form_deficit(omega, &form) + a.value + b.value - 0.5 * PI * omega.signum() * (1.0 - q_inf);
    (value, a.error + b.error + 1e-16 * (1.0 + q_inf))
}

/// Zero-in-plane-wavevector magnetic capacitor integrand
/// `I(X) = ∫ dk₁/2π e^{i k₁ X} i k₁ W^m(χ₁, χ₂, k₁, 0)`.
///
/// At `K = (k₁, 0, 0)` the transverse projector keeps only the in-plane
/// increments and every segment pair contributes a pure sine transform,
/// `I(X) = -4/(β√(m₁m₂)c²) Σ_{kl} ΔY_k·ΔY'_l [S_{d_kl}(ω_kl) - (π/2) sgn ω_kl]`
/// with `ω_kl = X + λ₁X̄⁰_k - λ₂X̄⁰_l`. Subtracting the constant is exact
/// because the in-plane increments of each closed loop sum to zero.
///
/// Returns the value and an absolute noise estimate.
pub fn magnetic_capacitor_integral(li: &Loop, lj: &Loop, x: f64, model: &MagneticModel) -> Result<(f64, f64)> {
    if li.n_steps != lj.n_steps {
        return param("magnetic pairing needs a common time grid");
    }
    let n = li.n_steps as usize;
    let seg = |lp: &Loop| -> Vec<(f64, [f64; 2])> {
        (0..lp.n_periodic())
            .map(|s| {
                let (a, b) = (lp.path[s], lp.path[s + 1]);
                (lp.lambda() * 0.5 * (a[0] + b[0]), [b[1] - a[1], b[2] - a[2]])
            })
            .collect()
    };
    let (si, sj) = (seg(li), seg(lj));
    let mut acc = 0.0;
    let mut noise = 0.0;
    for (k, (xi, dyi)) in si.iter().enumerate() {
        for (l, (xj, dyj)) in sj.iter().enumerate() {
            let dot = dyi[0] * dyj[0] + dyi[1] * dyj[1];
            if dot == 0.0 {
                continue;
            }
            let d = (k + n - l % n) % n;
            let (s, err) = segment_sine_transform(x + xi - xj, d, n, model);
            acc += dot * s;
            noise += dot.abs() * (err + 1e-15 * n as f64);
        }
    }
    let pref = -4.0 * model.prefactor(li, lj);
    Ok((pref * acc, pref.abs() * noise))
}

/// Fitted decay of the magnetic capacitor integrand over a window of `X`.
#[derive(Clone, Debug)]
pub struct CapacitorDecay {
    pub x: Vec<f64>,
    pub magnitude: Vec<f64>,
    /// Round-off floor below which values carry no information.
    pub floor: f64,
    /// Log-log slope; when fewer than three points clear the floor this is
    /// the slope from the first point down to the floor, which bounds the
    /// true exponent from above.
    pub exponent: f64,
    pub fit: Option<PowerLawFit>,
    pub resolved_points: usize,
}

/// Samples the magnetic capacitor integrand on `n` log-spaced points of
/// `[x_lo, x_hi]` and fits its power-law exponent.
pub fn magnetic_capacitor_decay(
    li: &Loop,
    lj: &Loop,
    model: &MagneticModel,
    x_lo: f64,
    x_hi: f64,
    n: usize,
) -> Result<CapacitorDecay> {
    if !(x_lo > 0.0 && x_hi > x_lo && n >= 3) {
        return param("capacitor window needs 0 < x_lo < x_hi and at least three points");
    }
    let xs: Vec<f64> = (0..n).map(|i| x_lo * (x_hi / x_lo).powf(i as f64 / (n - 1) as f64)).collect();
    let mut mags = Vec::with_capacity(n);
    let mut floor: f64 = 0.0;
    for &x in &xs {
        let (v, noise) = magnetic_capacitor_integral(li, lj, x, model)?;
        mags.push(v.abs());
        floor = floor.max(10.0 * noise);
    }
    let resolved: Vec<usize> = (0..n).filter(|&i| mags[i] > floor).collect();
    // Keep the leading run of resolved points; later values sit in round-off.
    let run: Vec<usize> = resolved.iter().enumerate().take_while(|(j, &i)| *j == i).map(|(_, &i)| i).collect();
    let (exponent, fit) = if run.len() >= 3 {
        let fx: Vec<f64> = run.iter().map(|&i| xs[i]).collect();
        let fy: Vec<f64> = run.iter().map(|&i| mags[i]).collect();
        let f = fit_power_law(&fx, &fy);
        (f.map(|f| f.slope).unwrap_or(f64::NAN), f)
    } else if mags[0] > floor {
        let last = run.last().copied().unwrap_or(0) + 1;
        let x_end = xs[last.min(n - 1)];
        ((floor / mags[0]).ln() / (x_end / xs[0]).ln(), None)
    } else {
        (f64::NAN, None)
    };
    Ok(CapacitorDecay { x: xs, magnitude: mags, floor, exponent, fit, resolved_points: run.len() })
}
