//! Sampled wavefunctions and the polar (modulus/phase) decomposition.

use crate::error::{Error, Result};
use crate::numerics::{derivative, neumaier_sum, Grid1D, MassParam};
use num_complex::Complex64;
use std::f64::consts::TAU;
use std::sync::Arc;

/// Relative modulus threshold below which a node is treated as a zero of the
/// field and excluded from phase-based functionals.
pub const NODE_EPSILON: f64 = 1e-8;

/// Interface shared by the scalar Cartesian field and the two-component
/// radial field: everything the phase functionals need, expressed through
/// the field's own grid measure.
pub trait WaveField: Clone {
    fn num_nodes(&self) -> usize;

    /// Quadrature weight of node `i`, including any radial measure factor.
    fn measure_weight(&self, i: usize) -> f64;

    /// ψ†ψ at node `i`.
    fn density(&self, i: usize) -> f64;

    /// Im ∫ ψ†·other over the grid measure.
    fn im_inner(&self, other: &Self) -> f64;

    /// The gradient-difference functional (1/m)∫[|∇ψ|² − (∇|ψ|)²]:
    /// the kinetic excess of the full complex field over its modulus.
    fn delta_k_rate(&self, m: MassParam) -> f64;

    fn same_grid(&self, other: &Self) -> bool;

    fn norm_sq(&self) -> f64 {
        neumaier_sum((0..self.num_nodes()).map(|i| self.measure_weight(i) * self.density(i)))
    }
}

/// Single-component complex field sampled on a uniform grid.
#[derive(Debug, Clone)]
pub struct ComplexField1D {
    grid: Arc<Grid1D>,
    values: Vec<Complex64>,
    time: f64,
}

impl ComplexField1D {
    pub fn new(grid: Arc<Grid1D>, values: Vec<Complex64>, time: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "value count {} does not match grid size {}",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidParameter("non-finite field value".into()));
        }
        let field = Self { grid, values, time };
        if field.norm_sq() <= 0.0 {
            return Err(Error::FieldVanishes);
        }
        Ok(field)
    }

    pub fn from_fn(grid: Arc<Grid1D>, time: f64, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = grid.nodes().iter().map(|&x| f(x)).collect();
        Self::new(grid, values, time)
    }

    pub fn grid(&self) -> &Arc<Grid1D> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn conj(&self) -> Self {
        Self {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|v| v.conj()).collect(),
            time: self.time,
        }
    }

    /// Σ cⱼ·fieldⱼ with a shared grid; used for time-derivative stencils.
    pub fn linear_comb(terms: &[(f64, &ComplexField1D)], time: f64) -> Self {
        let (_, first) = terms[0];
        let mut values = vec![Complex64::new(0.0, 0.0); first.values.len()];
        for &(c, f) in terms {
            for (acc, v) in values.iter_mut().zip(&f.values) {
                *acc += v * c;
            }
        }
        Self { grid: Arc::clone(&first.grid), values, time }
    }

    /// Rescale in place (normalization helper).
    pub fn scale(&mut self, c: f64) {
        for v in &mut self.values {
            *v *= c;
        }
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }
}

impl WaveField for ComplexField1D {
    fn num_nodes(&self) -> usize {
        self.values.len()
    }

    fn measure_weight(&self, i: usize) -> f64 {
        self.grid.weight(i)
    }

    fn density(&self, i: usize) -> f64 {
        self.values[i].norm_sqr()
    }

    fn im_inner(&self, other: &Self) -> f64 {
        neumaier_sum(
            self.values
                .iter()
                .zip(&other.values)
                .enumerate()
                .map(|(i, (a, b))| self.grid.weight(i) * (a.conj() * b).im),
        )
    }

    fn delta_k_rate(&self, m: MassParam) -> f64 {
        let nodes = self.grid.nodes();
        let dpsi = derivative(nodes, &self.values);
        let da = derivative(nodes, &self.moduli());
        neumaier_sum(
            dpsi.iter()
                .zip(&da)
                .enumerate()
                .map(|(i, (g, ga))| self.grid.weight(i) * (g.norm_sqr() - ga * ga)),
        ) / m.value()
    }

    fn same_grid(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || self.grid == other.grid
    }
}

/// Modulus, unwrapped phase, and the node mask of a field.
#[derive(Debug, Clone)]
pub struct PolarForm {
    pub modulus: Vec<f64>,
    pub phase: Vec<f64>,
    pub node_mask: Vec<bool>,
}

impl PolarForm {
    pub fn masked_count(&self) -> usize {
        self.node_mask.iter().filter(|&&m| m).count()
    }

    /// True where the node and both stencil neighbours are unmasked, so a
    /// three-point derivative of the phase is trustworthy there.
    pub fn stencil_valid(&self) -> Vec<bool> {
        let n = self.node_mask.len();
        let clear = |i: usize| !self.node_mask[i];
        (0..n)
            .map(|i| {
                if i == 0 {
                    clear(0) && clear(1) && clear(2)
                } else if i == n - 1 {
                    clear(n - 1) && clear(n - 2) && clear(n - 3)
                } else {
                    clear(i - 1) && clear(i) && clear(i + 1)
                }
            })
            .collect()
    }
}

/// Split a field into modulus and unwrapped phase.
///
/// Nodes with modulus below `node_epsilon`·max are masked; the phase is
/// continued branch-by-branch outward from the global modulus maximum, so
/// adjacent unmasked nodes never jump by more than π. The overall 2π branch
/// is anchored at the maximum and cancels in any difference of phases.
pub fn polar_decompose(field: &ComplexField1D, node_epsilon: f64) -> Result<PolarForm> {
    let modulus = field.moduli();
    let max_a = modulus.iter().cloned().fold(0.0, f64::max);
    let node_mask: Vec<bool> = modulus.iter().map(|&a| a < node_epsilon * max_a).collect();
    if node_mask.iter().all(|&m| m) {
        return Err(Error::FieldVanishes);
    }

    let raw: Vec<f64> = field.values().iter().map(|v| v.arg()).collect();
    let anchor = modulus
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap();

    let mut phase = raw.clone();
    let mut prev = raw[anchor];
    for i in anchor + 1..field.num_nodes() {
        if !node_mask[i] {
            phase[i] = raw[i] + TAU * ((prev - raw[i]) / TAU).round();
            prev = phase[i];
        }
    }
    prev = raw[anchor];
    for i in (0..anchor).rev() {
        if !node_mask[i] {
            phase[i] = raw[i] + TAU * ((prev - raw[i]) / TAU).round();
            prev = phase[i];
        }
    }

    Ok(PolarForm { modulus, phase, node_mask })
}
