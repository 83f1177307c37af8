//! Mean-phase functionals for time-dependent multi-component wavefunctions,
//! applied to the linear E⊗ε dynamic Jahn-Teller ground doublet.
//!
//! Layers:
//! - [`numerics`]: grids, quadrature, erf, 2×2 complex algebra
//! - [`field`] / [`phase`]: polar decomposition and the phase-functional
//!   chain (entropy, rate forms, gradient-difference term, integrated phase,
//!   residual identities)
//! - [`jt`]: the driven E⊗ε doublet, its cycle phase, and the
//!   phase-versus-coupling sweep
//! - [`tdse`]: a Crank-Nicolson propagator that supplies ground-truth
//!   trajectories for the identity suite
//! - [`fock`]: truncated two-mode boson ⊗ two-level diagonalization and the
//!   variational grading of the ansatz

pub mod error;
pub mod field;
pub mod fock;
pub mod jt;
pub mod numerics;
pub mod phase;
pub mod tdse;
pub mod tol;

pub use error::{Error, Result};
pub use field::{polar_decompose, ComplexField1D, PolarForm, WaveField, NODE_EPSILON};
pub use jt::{
    ansatz_operator, build_doublet, cycle_trajectory, delta_k_jt, mean_phase_closed_form,
    mean_phase_quadrature, sweep_phase, Branch, GridPolicy, JTParams, SpinorRadialField,
    SweepResult, SweepRow,
};
pub use numerics::{erf, integrate_radial, Grid1D, MassParam, Mat2c, RadialGrid, RadialRule};
pub use phase::{
    continuity_residual, delta_k, direct_mean_phase_change, entropy_se, hj_residual,
    integrated_phase, phase_rate_form_a, phase_rate_form_b, roi_identity_residual, PhaseBreakdown,
    Potential, Trajectory,
};
