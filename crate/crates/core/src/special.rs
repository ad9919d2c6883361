//! Bessel functions of the first kind of order 0 and 1, and `ζ(3)`.

use std::f64::consts::PI;

/// Apéry's constant.
pub const ZETA3: f64 = 1.202_056_903_159_594_3;

fn series(x: f64, order: u32) -> f64 {
    let h = 0.5 * x;
    let mut term = if order == 0 { 1.0 } else { h };
    let mut sum = term;
    let q = -h * h;
    for k in 1..200 {
        term *= q / (k as f64 * (k + order) as f64);
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

fn hankel(x: f64, order: u32) -> f64 {
    let mu = 4.0 * (order * order) as f64;
    let (mut p, mut q) = (1.0, 0.0);
    let mut term = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        term *= (mu - (2.0 * kf - 1.0).powi(2)) / (kf * 8.0 * x);
        if term.abs() > prev {
            break;
        }
        prev = term.abs();
        if k % 2 == 1 {
            q += if (k / 2) % 2 == 0 { term } else { -term };
        } else {
            p += if (k / 2) % 2 == 1 { -term } else { term };
        }
    }
    let chi = x - (0.5 * order as f64 + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Bessel `J₀(x)`.
pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    if x < 12.0 {
        series(x, 0)
    } else {
        hankel(x, 0)
    }
}

/// Bessel `J₁(x)`.
pub fn bessel_j1(x: f64) -> f64 {
    let s = x.signum();
    let x = x.abs();
    s * if x < 12.0 { series(x, 1) } else { hankel(x, 1) }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        assert!((bessel_j0(1.0) - 0.765_197_686_557_966_6).abs() < 1e-14);
        assert!((bessel_j1(1.0) - 0.440_050_585_744_933_5).abs() < 1e-14);
        assert!((bessel_j0(20.0) - 0.167_024_664_340_583_2).abs() < 1e-12);
        assert!((bessel_j1(20.0) - 0.066_833_124_175_850_05).abs() < 1e-12);
    }

    #[test]
    fn continuity_at_switch() {
        for order in [0, 1] {
            let (a, b) = (series(12.0, order), hankel(12.0, order));
            assert!((a - b).abs() < 1e-10, "order {order}: {a} vs {b}");
        }
    }

    #[test]
    fn wronskian_like_identity() {
        // J₀' = -J₁
        let h = 1e-5;
        for x in [0.5, 3.0, 15.0, 40.0] {
            let d = (bessel_j0(x + h) - bessel_j0(x - h)) / (2.0 * h);
            assert!((d + bessel_j1(x)).abs() < 1e-8);
        }
    }
}
