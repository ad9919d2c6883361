use std::ops::Range;

use crate::error::{param, Result};
use crate::quadrature::GaussLegendre;

/// Composite Gauss–Legendre grid over `[lo, hi]` with equal panels.
#[derive(Clone, Debug)]
pub struct PanelGrid {
    pub lo: f64,
    pub hi: f64,
    pub n_panels: usize,
    pub order: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    rule: GaussLegendre,
}

impl PanelGrid {
    pub fn new(lo: f64, hi: f64, n_panels: usize, order: usize) -> Result<Self> {
        if !(hi > lo && lo.is_finite() && hi.is_finite()) {
            return param(format!("empty interval [{lo}, {hi}]"));
        }
        if n_panels == 0 || order < 2 {
            return param("grid needs at least one panel of order two");
        }
        let rule = GaussLegendre::new(order);
        let h = (hi - lo) / n_panels as f64;
        let mut nodes = Vec::with_capacity(n_panels * order);
        let mut weights = Vec::with_capacity(n_panels * order);
        for p in 0..n_panels {
            let (x, w) = rule.on_interval(lo + p as f64 * h, lo + (p + 1) as f64 * h);
            nodes.extend(x);
            weights.extend(w);
        }
        Ok(Self { lo, hi, n_panels, order, nodes, weights, rule })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Same interval with twice as many panels.
    pub fn refined(&self) -> Self {
        Self::new(self.lo, self.hi, 2 * self.n_panels, self.order).expect("refining a valid grid")
    }

    pub fn panel_bounds(&self, p: usize) -> (f64, f64) {
        let h = (self.hi - self.lo) / self.n_panels as f64;
        (self.lo + p as f64 * h, self.lo + (p + 1) as f64 * h)
    }

    pub fn panel_nodes(&self, p: usize) -> Range<usize> {
        p * self.order..(p + 1) * self.order
    }

    pub fn panel_of_node(&self, i: usize) -> usize {
        i / self.order
    }

    /// Panel containing `x`, clamped to the end panels outside the interval.
    pub fn panel_of(&self, x: f64) -> usize {
        let h = (self.hi - self.lo) / self.n_panels as f64;
        (((x - self.lo) / h).floor().max(0.0) as usize).min(self.n_panels - 1)
    }

    /// Lagrange basis of panel `p` evaluated at `x`.
    pub fn lagrange(&self, p: usize, x: f64) -> Vec<f64> {
        let xs = &self.nodes[self.panel_nodes(p)];
        (0..xs.len())
            .map(|m| {
                xs.iter()
                    .enumerate()
                    .filter(|&(j, _)| j != m)
                    .map(|(_, &xj)| (x - xj) / (xs[m] - xj))
                    .product()
            })
            .collect()
    }

    pub fn rule(&self) -> &GaussLegendre {
        &self.rule
    }
}

/// Length scales whose ordering the asymptotic analysis relies on.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LengthScales {
    pub lambda_cut: f64,
    pub lambda_mat: f64,
    pub lambda_ph: f64,
    pub lambda_screen: f64,
}

/// Ratios of successive scales and whether each separation is large
/// (ratio below [`HierarchyFlags::SEPARATION`]).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HierarchyFlags {
    pub cut_over_mat: f64,
    pub mat_over_ph: f64,
    pub ph_over_d: f64,
    pub screen_over_slab: f64,
    pub slab_over_d: f64,
}

impl HierarchyFlags {
    pub const SEPARATION: f64 = 0.2;

    pub fn ratios(&self) -> [(&'static str, f64); 5] {
        [
            ("lambda_cut/lambda_mat", self.cut_over_mat),
            ("lambda_mat/lambda_ph", self.mat_over_ph),
            ("lambda_ph/d", self.ph_over_d),
            ("lambda_screen/min(a,b)", self.screen_over_slab),
            ("max(a,b)/d", self.slab_over_d),
        ]
    }

    pub fn satisfied(&self) -> bool {
        self.ratios().iter().all(|(_, r)| *r < Self::SEPARATION)
    }

    pub fn violations(&self) -> Vec<&'static str> {
        self.ratios().iter().filter(|(_, r)| *r >= Self::SEPARATION).map(|(n, _)| *n).collect()
    }
}

/// Two slabs, `A` on `[-a, 0]` and `B` on `[0, b]` in its own coordinate,
/// whose inner faces are a distance `d` apart.
#[derive(Clone, Debug)]
pub struct SlabGeometry {
    pub a: f64,
    pub b: f64,
    pub d: f64,
    pub grid_a: PanelGrid,
    pub grid_b: PanelGrid,
}

impl SlabGeometry {
    pub fn new(a: f64, b: f64, d: f64, n_panels: usize, order: usize) -> Result<Self> {
        for (name, v) in [("a", a), ("b", b), ("d", d)] {
            if !(v.is_finite() && v > 0.0) {
                return param(format!("slab length {name} must be positive, got {v}"));
            }
        }
        Ok(Self {
            a,
            b,
            d,
            grid_a: PanelGrid::new(-a, 0.0, n_panels, order)?,
            grid_b: PanelGrid::new(0.0, b, n_panels, order)?,
        })
    }

    pub fn with_separation(&self, d: f64) -> Result<Self> {
        if !(d.is_finite() && d > 0.0) {
            return param(format!("separation must be positive, got {d}"));
        }
        Ok(Self { d, ..self.clone() })
    }

    pub fn hierarchy(&self, s: &LengthScales) -> HierarchyFlags {
        HierarchyFlags {
            cut_over_mat: s.lambda_cut / s.lambda_mat,
            mat_over_ph: s.lambda_mat / s.lambda_ph,
            ph_over_d: s.lambda_ph / self.d,
            screen_over_slab: s.lambda_screen / self.a.min(self.b),
            slab_over_d: self.a.max(self.b) / self.d,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_integrates_polynomials_and_interpolates() {
        let g = PanelGrid::new(-2.0, 1.0, 3, 5).unwrap();
        let s: f64 = g.nodes.iter().zip(&g.weights).map(|(x, w)| w * x.powi(4)).sum();
        assert!((s - (1.0 + 32.0) / 5.0).abs() < 1e-12);
        let p = g.panel_of(-0.3);
        let l = g.lagrange(p, -0.3);
        let f: f64 = g.panel_nodes(p).zip(&l).map(|(i, c)| c * g.nodes[i].powi(3)).sum();
        assert!((f - (-0.027)).abs() < 1e-12);
        assert_eq!(g.panel_of(1.0), 2);
        assert_eq!(g.panel_of(-5.0), 0);
        assert_eq!(g.refined().n_panels, 6);
    }
}
