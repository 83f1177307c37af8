//! Uniform 1D grids and validated radial quadrature grids.

use crate::error::{Error, Result};
use crate::numerics::quadrature::{gauss_legendre, neumaier_sum, simpson_weights};

/// Uniform grid on [x_min, x_max] with n ≥ 3 nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    n: usize,
    spacing: f64,
    nodes: Vec<f64>,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_max <= x_min {
            return Err(Error::InvalidGrid(format!(
                "need finite x_max > x_min, got [{x_min}, {x_max}]"
            )));
        }
        if n < 3 {
            return Err(Error::InvalidGrid(format!("need n >= 3 nodes, got {n}")));
        }
        let spacing = (x_max - x_min) / (n - 1) as f64;
        let nodes = (0..n).map(|i| x_min + i as f64 * spacing).collect();
        Ok(Self { x_min, x_max, n, spacing, nodes })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Trapezoid weight of node `i` (the grid measure used by all field
    /// functionals on this grid).
    pub fn weight(&self, i: usize) -> f64 {
        if i == 0 || i == self.n - 1 {
            0.5 * self.spacing
        } else {
            self.spacing
        }
    }
}

/// Quadrature rule backing a [`RadialGrid`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadialRule {
    GaussLegendreMapped,
    CompositeSimpson,
}

/// Radial quadrature grid on [0, q_max].
///
/// Construction runs a self-check: the rule must reproduce
/// ∫₀^{q_max} q·e^{−q²} dq = ½(1 − e^{−q_max²}) to 1e−12 absolute, otherwise
/// the grid is rejected. Composite Simpson therefore needs a few thousand
/// nodes; Gauss-Legendre passes from a few dozen.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    q_max: f64,
    rule: RadialRule,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl RadialGrid {
    pub fn new(q_max: f64, n: usize, rule: RadialRule) -> Result<Self> {
        if !(q_max.is_finite() && q_max > 0.0) {
            return Err(Error::InvalidGrid(format!("need q_max > 0, got {q_max}")));
        }
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need n >= 2 nodes, got {n}")));
        }
        let (nodes, weights) = match rule {
            RadialRule::GaussLegendreMapped => {
                let (x, w) = gauss_legendre(n);
                // map [-1, 1] -> [0, q_max]
                let half = 0.5 * q_max;
                (
                    x.iter().map(|&xi| half * (xi + 1.0)).collect::<Vec<_>>(),
                    w.iter().map(|&wi| half * wi).collect::<Vec<_>>(),
                )
            }
            RadialRule::CompositeSimpson => {
                let n = if n % 2 == 0 { n + 1 } else { n };
                let h = q_max / (n - 1) as f64;
                let nodes = (0..n).map(|i| i as f64 * h).collect();
                (nodes, simpson_weights(n, h))
            }
        };
        let grid = Self { q_max, rule, nodes, weights };
        let defect = (grid.raw_integrate(|q| q * (-q * q).exp())
            - 0.5 * (1.0 - (-q_max * q_max).exp()))
        .abs();
        if defect > 1e-12 {
            return Err(Error::QuadratureSelfCheck { defect, q_max, n: grid.nodes.len() });
        }
        Ok(grid)
    }

    /// Grid sized by the q_max = k + 8 truncation policy: the radial
    /// integrands decay as e^{−(q∓k)²}, so the dropped tail is below 1e−27.
    pub fn for_coupling(k: f64) -> Result<Self> {
        Self::new(k.max(0.0) + 8.0, 400, RadialRule::GaussLegendreMapped)
    }

    pub fn q_max(&self) -> f64 {
        self.q_max
    }

    pub fn rule(&self) -> RadialRule {
        self.rule
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn raw_integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        neumaier_sum(self.nodes.iter().zip(&self.weights).map(|(&q, &w)| w * f(q)))
    }
}

/// Mass parameter common to all degrees of freedom (coordinates mass-scaled).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassParam(f64);

impl MassParam {
    pub fn new(m: f64) -> Result<Self> {
        if m.is_finite() && m > 0.0 {
            Ok(Self(m))
        } else {
            Err(Error::InvalidParameter(format!("mass must be > 0, got {m}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Default for MassParam {
    fn default() -> Self {
        Self(1.0)
    }
}
