/// Exponents beyond this are clamped when forming Mayer-type bonds.
pub const EXPONENT_CLAMP: f64 = 700.0;

/// Bond values over a table plus a flag raised when any exponent was clamped.
#[derive(Clone, Debug, PartialEq)]
pub struct BondTable {
    pub values: Vec<f64>,
    pub strong_coupling: bool,
}

/// Debye–Hückel chain bond `F = -β e_i e_j Φ`.
pub fn f_bond(beta: f64, ei: f64, ej: f64, phi: f64) -> f64 {
    -beta * ei * ej * phi
}

/// Resummed remainder bond `F^R = e^{-βe_ie_j(Φ+W)} - 1 + βe_ie_jΦ`. The
/// second value reports whether the exponent had to be clamped.
pub fn fr_bond(beta: f64, ei: f64, ej: f64, phi: f64, w: f64) -> (f64, bool) {
    let bee = beta * ei * ej;
    let raw = -bee * (phi + w);
    let clamped = raw > EXPONENT_CLAMP;
    (raw.min(EXPONENT_CLAMP).exp_m1() + bee * phi, clamped)
}

/// `F` over a table of `(e_i, e_j, Φ)`.
pub fn build_f_bond(beta: f64, entries: &[(f64, f64, f64)]) -> BondTable {
    BondTable { values: entries.iter().map(|&(ei, ej, p)| f_bond(beta, ei, ej, p)).collect(), strong_coupling: false }
}

/// `F^R` over a table of `(e_i, e_j, Φ, W)`.
pub fn build_fr_bond(beta: f64, entries: &[(f64, f64, f64, f64)]) -> BondTable {
    let mut strong = false;
    let values = entries
        .iter()
        .map(|&(ei, ej, p, w)| {
            let (v, c) = fr_bond(beta, ei, ej, p, w);
            strong |= c;
            v
        })
        .collect();
    BondTable { values, strong_coupling: strong }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f_is_odd_in_each_charge() {
        assert_eq!(f_bond(1.3, 2.0, -1.0, 0.4), -f_bond(1.3, -2.0, -1.0, 0.4));
    }

    #[test]
    fn fr_is_second_order_without_w() {
        for phi in [1e-2, 1e-3, 1e-4] {
            let (v, _) = fr_bond(1.0, 1.0, 1.0, phi, 0.0);
            let expected = 0.5 * phi * phi - phi.powi(3) / 6.0;
            assert!((v - expected).abs() < phi.powi(4));
        }
    }

    #[test]
    fn clamping_is_flagged() {
        let t = build_fr_bond(1.0, &[(1.0, -1.0, 800.0, 0.0), (1.0, 1.0, 0.1, 0.0)]);
        assert!(t.strong_coupling);
        assert!(t.values.iter().all(|v| v.is_finite()));
    }
}
