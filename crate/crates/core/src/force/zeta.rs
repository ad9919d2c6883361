use crate::quadrature::{integrate, QuadOptions};

/// `q² e^{-q} / sinh q`, written as `2q² e^{-2q} / (1 - e^{-2q})` so that it
/// stays accurate near `q = 0` (where it tends to `q`) and never overflows.
pub fn force_q_integrand(q: f64) -> f64 {
    if q == 0.0 {
        return 0.0;
    }
    let e = (-2.0 * q).exp();
    2.0 * q * q * e / -(-2.0 * q).exp_m1()
}

/// The `q`-integral of the leading force with its error budget.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Zeta3Quadrature {
    pub value: f64,
    /// Adaptive quadrature error estimate on `[0, q_max]`.
    pub error: f64,
    /// Bound on the neglected tail beyond `q_max`.
    pub tail_bound: f64,
    pub evaluations: usize,
}

/// Upper end of the `q` range; the neglected tail is below `2 q_max² e^{-2 q_max}`.
pub const Q_MAX: f64 = 40.0;

/// `∫₀^∞ q² e^{-q} / sinh q dq = ζ(3)/2` by adaptive quadrature.
pub fn zeta3_quadrature() -> Zeta3Quadrature {
    let r = integrate(force_q_integrand, 0.0, Q_MAX, QuadOptions::new(1e-14, 1e-14));
    // For q ≥ q_max the integrand is below 2.000001 q² e^{-2q}, whose tail
    // integral is e^{-2a}(a² + a + 1/2) at a = q_max.
    let a = Q_MAX;
    let tail_bound = 2.000_001 * (-2.0 * a).exp() * (a * a + a + 0.5) / 2.0;
    Zeta3Quadrature { value: r.value, error: r.error, tail_bound, evaluations: r.evaluations }
}

/// Partial sum of `Σ 1/(2n³)` with a bracketing tail estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Zeta3Series {
    pub terms: u64,
    pub partial: f64,
    /// Partial sum plus the midpoint of the tail bracket.
    pub value: f64,
    /// Half-width of the tail bracket `[1/(4(N+1)²), 1/(4N²)]`.
    pub tail_uncertainty: f64,
}

/// `Σ_{n=1}^{N} 1/(2n³)`, summed smallest-first, plus the integral tail estimate.
pub fn zeta3_series(terms: u64) -> Zeta3Series {
    assert!(terms > 0, "series needs at least one term");
    let mut sum = 0.0;
    let mut comp = 0.0;
    for n in (1..=terms).rev() {
        let nf = n as f64;
        let y = 0.5 / (nf * nf * nf) - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    let nf = terms as f64;
    let (lo, hi) = (0.25 / ((nf + 1.0) * (nf + 1.0)), 0.25 / (nf * nf));
    Zeta3Series { terms, partial: sum, value: sum + 0.5 * (lo + hi), tail_uncertainty: 0.5 * (hi - lo) }
}
