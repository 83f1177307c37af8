//! Grids, quadrature, special functions, and exact 2×2 complex algebra.
//!
//! Everything here is a pure function over immutable inputs; identical inputs
//! give bit-identical outputs, so any of it may run concurrently.

pub mod erf;
pub mod grid;
pub mod mat2;
pub mod quadrature;

pub use erf::erf;
pub use grid::{Grid1D, MassParam, RadialGrid, RadialRule};
pub use mat2::{Mat2c, IDENTITY, SIGMA_X, SIGMA_Z};
pub use quadrature::{gauss_legendre, integrate_radial, neumaier_sum, simpson_weights};

/// First derivative on a (possibly non-uniform) strictly increasing grid,
/// three-point second-order stencils, one-sided at the ends.
pub fn derivative<T>(nodes: &[f64], values: &[T]) -> Vec<T>
where
    T: Copy
        + std::ops::Mul<f64, Output = T>
        + std::ops::Add<Output = T>,
{
    let n = nodes.len();
    assert_eq!(n, values.len());
    assert!(n >= 3, "derivative needs at least 3 nodes");
    let mut out = Vec::with_capacity(n);

    let stencil = |i0: usize, i1: usize, i2: usize, at: f64| -> T {
        // Lagrange derivative through (x0,f0),(x1,f1),(x2,f2) evaluated at `at`
        let (x0, x1, x2) = (nodes[i0], nodes[i1], nodes[i2]);
        let c0 = (2.0 * at - x1 - x2) / ((x0 - x1) * (x0 - x2));
        let c1 = (2.0 * at - x0 - x2) / ((x1 - x0) * (x1 - x2));
        let c2 = (2.0 * at - x0 - x1) / ((x2 - x0) * (x2 - x1));
        values[i0] * c0 + values[i1] * c1 + values[i2] * c2
    };

    out.push(stencil(0, 1, 2, nodes[0]));
    for i in 1..n - 1 {
        out.push(stencil(i - 1, i, i + 1, nodes[i]));
    }
    out.push(stencil(n - 3, n - 2, n - 1, nodes[n - 1]));
    out
}

/// Second derivative on a uniform grid, three-point interior stencil and
/// four-point one-sided ends (both second order on uniform spacing).
pub fn second_derivative_uniform<T>(values: &[T], h: f64) -> Vec<T>
where
    T: Copy
        + std::ops::Mul<f64, Output = T>
        + std::ops::Add<Output = T>,
{
    let n = values.len();
    assert!(n >= 4, "second derivative needs at least 4 nodes");
    let h2 = h * h;
    let mut out = Vec::with_capacity(n);
    out.push(
        values[0] * (2.0 / h2)
            + values[1] * (-5.0 / h2)
            + values[2] * (4.0 / h2)
            + values[3] * (-1.0 / h2),
    );
    for i in 1..n - 1 {
        out.push(values[i - 1] * (1.0 / h2) + values[i] * (-2.0 / h2) + values[i + 1] * (1.0 / h2));
    }
    out.push(
        values[n - 1] * (2.0 / h2)
            + values[n - 2] * (-5.0 / h2)
            + values[n - 3] * (4.0 / h2)
            + values[n - 4] * (-1.0 / h2),
    );
    out
}
