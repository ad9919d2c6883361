//! Quadrature building blocks: adaptive Gauss–Kronrod, Gauss–Legendre rules,
//! semi-infinite and oscillatory integrals with Wynn-epsilon tail acceleration,
//! and Richardson extrapolation on halving sequences.

use num_complex::Complex64;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Div, Mul, Sub};

use crate::error::{Error, Result};

/// Values that can be integrated: real or complex scalars.
pub trait QuadValue:
    Copy
    + Send
    + Sync
    + std::fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<f64, Output = Self>
    + Div<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn norm(self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn norm(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn norm(self) -> f64 {
        Complex64::norm(self)
    }
}

/// Outcome of an adaptive integration.
#[derive(Clone, Copy, Debug)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Tolerances and work limit for adaptive rules.
#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-12, rel_tol: 1e-10, max_intervals: 2000 }
    }
}

impl QuadOptions {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        Self { abs_tol, rel_tol, ..Self::default() }
    }
}

// 21-point Kronrod abscissae; odd indices are the embedded 10-point Gauss nodes.
const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
];
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];
const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077958109831074,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

/// One Gauss–Kronrod 21-point panel with the QUADPACK error heuristic.
pub fn gk21<T: QuadValue, F: Fn(f64) -> T>(f: &F, a: f64, b: f64) -> (T, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[10];
    let mut res_g = T::zero();
    let mut res_abs = fc.norm() * WGK[10];
    let mut fv1 = [T::zero(); 10];
    let mut fv2 = [T::zero(); 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k = res_k + (f1 + f2) * WGK[j];
        res_abs += WGK[j] * (f1.norm() + f2.norm());
        if j % 2 == 1 {
            res_g = res_g + (f1 + f2) * WG[j / 2];
        }
    }
    let mean = res_k * 0.5;
    let mut res_asc = WGK[10] * (fc - mean).norm();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).norm() + (fv2[j] - mean).norm());
    }
    let scale = half.abs();
    let result = res_k * half;
    res_abs *= scale;
    res_asc *= scale;
    let mut err = ((res_k - res_g) * half).norm();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (1.0f64).min((200.0 * err / res_asc).powf(1.5));
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (result, err)
}

struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive Gauss–Kronrod integration of `f` over `[a, b]`.
pub fn integrate<T: QuadValue, F: Fn(f64) -> T>(
    f: F,
    a: f64,
    b: f64,
    opts: QuadOptions,
) -> QuadResult<T> {
    if a == b {
        return QuadResult { value: T::zero(), error: 0.0, evaluations: 0, converged: true };
    }
    let (v, e) = gk21(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value: v, error: e });
    let mut total = v;
    let mut total_err = e;
    let mut evals = 21;
    let mut intervals = 1;
    loop {
        let tol = opts.abs_tol.max(opts.rel_tol * total.norm());
        if total_err <= tol {
            break;
        }
        if intervals >= opts.max_intervals {
            return QuadResult { value: total, error: total_err, evaluations: evals, converged: false };
        }
        let worst = heap.pop().expect("heap holds at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            return QuadResult { value: total, error: total_err, evaluations: evals, converged: false };
        }
        let (v1, e1) = gk21(&f, worst.a, mid);
        let (v2, e2) = gk21(&f, mid, worst.b);
        evals += 42;
        intervals += 1;
        total = total - worst.value + v1 + v2;
        total_err += e1 + e2 - worst.error;
        heap.push(Panel { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, error: e2 });
        if heap.len() % 64 == 0 {
            // Re-sum to keep round-off from the running updates in check.
            total = heap.iter().fold(T::zero(), |acc, p| acc + p.value);
            total_err = heap.iter().map(|p| p.error).sum();
        }
    }
    let value = heap.iter().fold(T::zero(), |acc, p| acc + p.value);
    QuadResult { value, error: total_err, evaluations: evals, converged: true }
}

/// Like [`integrate`] but turns non-convergence into an error.
pub fn integrate_checked<T: QuadValue, F: Fn(f64) -> T>(
    f: F,
    a: f64,
    b: f64,
    opts: QuadOptions,
) -> Result<T> {
    let r = integrate(f, a, b, opts);
    if r.converged {
        Ok(r.value)
    } else {
        Err(Error::Quadrature(format!(
            "[{a}, {b}]: error estimate {:.3e} after {} evaluations",
            r.error, r.evaluations
        )))
    }
}

/// Integral of a non-oscillatory, decaying integrand over `[a, ∞)` through the
/// map `x = a + t/(1 - t)`.
pub fn integrate_to_infinity<T: QuadValue, F: Fn(f64) -> T>(
    f: F,
    a: f64,
    opts: QuadOptions,
) -> QuadResult<T> {
    integrate(
        |t: f64| {
            let u = 1.0 - t;
            let x = a + t / u;
            let v = f(x);
            if v.norm() == 0.0 {
                T::zero()
            } else {
                v * (1.0 / (u * u))
            }
        },
        0.0,
        1.0,
        opts,
    )
}

/// Wynn epsilon extrapolation of a sequence of partial sums.
pub fn wynn_epsilon<T: QuadValue>(sums: &[T]) -> T {
    let n = sums.len();
    if n < 3 {
        return sums[n - 1];
    }
    let mut prev: Vec<T> = vec![T::zero(); n + 1];
    let mut cur: Vec<T> = sums.to_vec();
    let mut best = sums[n - 1];
    let mut column = 0usize;
    while cur.len() >= 2 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for j in 0..cur.len() - 1 {
            let diff = cur[j + 1] - cur[j];
            if diff.norm() <= 1e-300 || !diff.norm().is_finite() {
                return if column % 2 == 0 { *cur.last().unwrap() } else { best };
            }
            next.push(prev[j + 1] + T::one() / diff);
        }
        column += 1;
        if column % 2 == 0 {
            best = *next.last().unwrap();
        }
        prev = cur;
        cur = next;
    }
    best
}

/// Integral over `[start, ∞)` of an integrand that oscillates with the given
/// half period. Panels of one half period are summed and the partial sums are
/// accelerated with the Wynn epsilon algorithm.
pub fn integrate_oscillatory_tail<T: QuadValue, F: Fn(f64) -> T>(
    f: F,
    start: f64,
    half_period: f64,
    opts: QuadOptions,
) -> QuadResult<T> {
    const MAX_PANELS: usize = 400;
    const WINDOW: usize = 16;
    let panel_opts = QuadOptions { abs_tol: opts.abs_tol * 1e-2, rel_tol: opts.rel_tol * 1e-2, max_intervals: 200 };
    let mut sums: Vec<T> = Vec::new();
    let mut running = T::zero();
    let mut evaluations = 0;
    let mut extrapolated: Vec<T> = Vec::new();
    let mut small_panels = 0;
    for n in 0..MAX_PANELS {
        let lo = start + n as f64 * half_period;
        let r = integrate(&f, lo, lo + half_period, panel_opts);
        evaluations += r.evaluations;
        running = running + r.value;
        sums.push(running);
        let tol = opts.abs_tol.max(opts.rel_tol * running.norm());
        if r.value.norm() < 1e-3 * tol {
            small_panels += 1;
            if small_panels >= 3 {
                return QuadResult { value: running, error: r.value.norm(), evaluations, converged: true };
            }
        } else {
            small_panels = 0;
        }
        if sums.len() >= 4 {
            let window = &sums[sums.len().saturating_sub(WINDOW)..];
            let e = wynn_epsilon(window);
            extrapolated.push(e);
            let m = extrapolated.len();
            if m >= 3 {
                let d1 = (extrapolated[m - 1] - extrapolated[m - 2]).norm();
                let d2 = (extrapolated[m - 2] - extrapolated[m - 3]).norm();
                let tol = opts.abs_tol.max(opts.rel_tol * e.norm());
                if d1 <= tol && d2 <= tol {
                    return QuadResult { value: e, error: d1.max(d2), evaluations, converged: true };
                }
            }
        }
    }
    let value = *extrapolated.last().unwrap_or(&running);
    QuadResult { value, error: f64::INFINITY, evaluations, converged: false }
}

/// Integral over `[0, ∞)` of an integrand carrying an oscillation of angular
/// frequency `omega` (e.g. `e^{i k x}` with `omega = |x|`). The head up to
/// `max(40/omega, head_min)` is integrated adaptively; beyond it half-period
/// panels are summed with Wynn acceleration.
pub fn integrate_fourier_half_line<T: QuadValue, F: Fn(f64) -> T>(
    f: F,
    omega: f64,
    head_min: f64,
    opts: QuadOptions,
) -> QuadResult<T> {
    assert!(omega > 0.0, "oscillation frequency must be positive");
    let head_end = (40.0 / omega).max(head_min);
    let mut head_opts = opts;
    head_opts.max_intervals = opts.max_intervals.max(4000);
    let head = integrate(&f, 0.0, head_end, head_opts);
    let tail = integrate_oscillatory_tail(&f, head_end, std::f64::consts::PI / omega, opts);
    QuadResult {
        value: head.value + tail.value,
        error: head.error + tail.error,
        evaluations: head.evaluations + tail.evaluations,
        converged: head.converged && tail.converged,
    }
}

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre order must be positive");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, z);
                dp = d;
                let dz = p / d;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, z);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn on_interval(&self, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        (
            self.nodes.iter().map(|t| c + h * t).collect(),
            self.weights.iter().map(|w| h * w).collect(),
        )
    }

    pub fn integrate<T: QuadValue, F: Fn(f64) -> T>(&self, f: F, a: f64, b: f64) -> T {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |acc, (t, w)| acc + f(c + h * t) * (h * w))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Richardson extrapolation to `h → 0` of values sampled at `h_n = h_0 2^{-n}`,
/// assuming an expansion in integer powers of `h` starting at `h^1`.
/// Returns the extrapolated value and the change in the last correction step.
pub fn richardson_halving<T: QuadValue>(values: &[T]) -> (T, f64) {
    assert!(!values.is_empty(), "Richardson needs at least one value");
    let mut table: Vec<T> = values.to_vec();
    let mut last_change = f64::INFINITY;
    let mut power = 1;
    while table.len() > 1 {
        let factor = (1u64 << power) as f64;
        let next: Vec<T> = (0..table.len() - 1)
            .map(|i| (table[i + 1] * factor - table[i]) * (1.0 / (factor - 1.0)))
            .collect();
        last_change = (*next.last().unwrap() - *table.last().unwrap()).norm();
        table = next;
        power += 1;
    }
    (table[0], last_change)
}
