//! Exact screened Green function of the one-dimensional problem
//! `(-∂² + k² + κ²(x)) G = 4π δ(x - x')` for piecewise-constant `κ(x)`,
//! i.e. point charges in layered media.

use std::f64::consts::PI;

use crate::error::{param, Result};

/// Layers separated by sorted interfaces; `kappa[r]` holds between
/// `interfaces[r-1]` and `interfaces[r]` (the end layers extend to ±∞).
#[derive(Clone, Debug)]
pub struct LayeredMedium {
    pub interfaces: Vec<f64>,
    pub kappa: Vec<f64>,
}

#[derive(Clone, Copy, Debug)]
struct Piece {
    kk: f64,
    origin: f64,
    plus: f64,
    minus: f64,
}

impl Piece {
    fn eval(&self, x: f64) -> (f64, f64) {
        let t = x - self.origin;
        let (ep, em) = ((self.kk * t).exp(), (-self.kk * t).exp());
        (self.plus * ep + self.minus * em, self.kk * (self.plus * ep - self.minus * em))
    }
}

impl LayeredMedium {
    pub fn new(interfaces: Vec<f64>, kappa: Vec<f64>) -> Result<Self> {
        if kappa.len() != interfaces.len() + 1 {
            return param("need one κ value per layer");
        }
        if interfaces.windows(2).any(|w| w[1] <= w[0]) {
            return param("interfaces must be strictly increasing");
        }
        Ok(Self { interfaces, kappa })
    }

    /// Single slab `[lo, hi]` with inverse screening length `kappa` in vacuum.
    pub fn slab(lo: f64, hi: f64, kappa: f64) -> Result<Self> {
        Self::new(vec![lo, hi], vec![0.0, kappa, 0.0])
    }

    /// Two slabs in vacuum.
    pub fn two_slabs(a: (f64, f64, f64), b: (f64, f64, f64)) -> Result<Self> {
        Self::new(vec![a.0, a.1, b.0, b.1], vec![0.0, a.2, 0.0, b.2, 0.0])
    }

    fn layer(&self, x: f64) -> usize {
        self.interfaces.iter().take_while(|&&b| x > b).count()
    }

    /// Solutions decaying to the left (`forward`) or to the right, one piece per layer.
    fn solution(&self, k: f64, forward: bool) -> Vec<Piece> {
        let n = self.kappa.len();
        let kk: Vec<f64> = self.kappa.iter().map(|c| (k * k + c * c).sqrt()).collect();
        let mut pieces = vec![Piece { kk: 0.0, origin: 0.0, plus: 0.0, minus: 0.0 }; n];
        if forward {
            let o = self.interfaces.first().copied().unwrap_or(0.0);
            pieces[0] = Piece { kk: kk[0], origin: o, plus: 1.0, minus: 0.0 };
            for r in 1..n {
                let b = self.interfaces[r - 1];
                let (v, dv) = pieces[r - 1].eval(b);
                pieces[r] = Piece { kk: kk[r], origin: b, plus: 0.5 * (v + dv / kk[r]), minus: 0.5 * (v - dv / kk[r]) };
            }
        } else {
            let o = self.interfaces.last().copied().unwrap_or(0.0);
            pieces[n - 1] = Piece { kk: kk[n - 1], origin: o, plus: 0.0, minus: 1.0 };
            for r in (0..n - 1).rev() {
                let b = self.interfaces[r];
                let (v, dv) = pieces[r + 1].eval(b);
                pieces[r] = Piece { kk: kk[r], origin: b, plus: 0.5 * (v + dv / kk[r]), minus: 0.5 * (v - dv / kk[r]) };
            }
        }
        pieces
    }

    /// `G(x, x'; k)`.
    pub fn green(&self, x: f64, xp: f64, k: f64) -> f64 {
        assert!(k > 0.0 || self.kappa.iter().all(|&c| c > 0.0), "G needs k > 0 in vacuum layers");
        let left = self.solution(k, true);
        let right = self.solution(k, false);
        let (lo, hi) = if x < xp { (x, xp) } else { (xp, x) };
        let (pl, dpl) = left[self.layer(lo)].eval(lo);
        // Wronskian, taken at `lo`.
        let (prl, dprl) = right[self.layer(lo)].eval(lo);
        let w = pl * dprl - dpl * prl;
        -4.0 * PI * pl * right[self.layer(hi)].eval(hi).0 / w
    }
}
