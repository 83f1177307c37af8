//! Model-independent phase functionals: entropy, the two phase-rate forms,
//! the gradient-difference term, the integrated mean-phase result, and the
//! residual identities used as correctness oracles.
//!
//! Sign convention: the integrated mean phase is
//! `Im ∫dt ∫ ψ†∂ₜψ  +  (1/m) ∫dt ∫ [|∇ψ|² − (∇|ψ|)²]`,
//! fixed so that a stationary state of energy E accumulates −E·t_f.

use crate::error::{Error, Result};
use crate::field::{polar_decompose, ComplexField1D, WaveField, NODE_EPSILON};
use crate::numerics::{derivative, neumaier_sum, second_derivative_uniform, MassParam};
use std::f64::consts::TAU;
use std::sync::Arc;

/// Scalar potential V(x, t).
#[derive(Clone)]
pub struct Potential(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>);

impl Potential {
    pub fn new(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self(Arc::new(f))
    }

    pub fn free() -> Self {
        Self::new(|_, _| 0.0)
    }

    /// V = ½ m ω² x²
    pub fn harmonic(omega: f64, m: MassParam) -> Self {
        let k = 0.5 * m.value() * omega * omega;
        Self::new(move |x, _| k * x * x)
    }

    pub fn eval(&self, x: f64, t: f64) -> f64 {
        (self.0)(x, t)
    }
}

impl std::fmt::Debug for Potential {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("Potential(..)")
    }
}

/// Per-term result of the integrated mean phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseBreakdown {
    pub dynamic_term: f64,
    pub delta_k_term: f64,
    pub total: f64,
    pub normalization_applied: bool,
}

impl PhaseBreakdown {
    fn new(dynamic_term: f64, delta_k_term: f64, normalization_applied: bool) -> Self {
        Self { dynamic_term, delta_k_term, total: dynamic_term + delta_k_term, normalization_applied }
    }
}

/// Ordered snapshots with a uniform time step, all on one grid.
#[derive(Debug, Clone)]
pub struct Trajectory<F: WaveField> {
    times: Vec<f64>,
    fields: Vec<F>,
}

impl<F: WaveField> Trajectory<F> {
    pub fn new(times: Vec<f64>, fields: Vec<F>) -> Result<Self> {
        if times.len() != fields.len() || fields.is_empty() {
            return Err(Error::InvalidParameter(
                "trajectory needs equal, nonzero numbers of times and snapshots".into(),
            ));
        }
        if times.len() >= 2 {
            let dt = times[1] - times[0];
            if dt <= 0.0 {
                return Err(Error::InvalidParameter("times must strictly increase".into()));
            }
            for w in times.windows(2) {
                let step = w[1] - w[0];
                if step <= 0.0 || (step - dt).abs() > 1e-9 * dt {
                    return Err(Error::InvalidParameter("time step must be uniform".into()));
                }
            }
            for f in &fields[1..] {
                if !f.same_grid(&fields[0]) {
                    return Err(Error::GridMismatch);
                }
            }
        }
        Ok(Self { times, fields })
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn dt(&self) -> f64 {
        if self.times.len() >= 2 {
            self.times[1] - self.times[0]
        } else {
            0.0
        }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn field(&self, i: usize) -> &F {
        &self.fields[i]
    }

    pub fn fields(&self) -> &[F] {
        &self.fields
    }

    /// Trapezoid weight in time.
    fn time_weight(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.len() {
            0.5
        } else {
            1.0
        }
    }
}

impl Trajectory<ComplexField1D> {
    /// ∂ψ/∂t at snapshot `i`: centered in the interior, one-sided
    /// second-order at the ends.
    pub fn time_derivative(&self, i: usize) -> Result<ComplexField1D> {
        let n = self.len();
        if i >= n {
            return Err(Error::TimeIndexOutOfRange { index: i, len: n });
        }
        if n < 3 {
            return Err(Error::TooFewSnapshots(n));
        }
        let inv = 1.0 / (2.0 * self.dt());
        let t = self.times[i];
        let f = |j: usize| &self.fields[j];
        let d = if i == 0 {
            ComplexField1D::linear_comb(&[(-3.0 * inv, f(0)), (4.0 * inv, f(1)), (-inv, f(2))], t)
        } else if i == n - 1 {
            ComplexField1D::linear_comb(
                &[(3.0 * inv, f(n - 1)), (-4.0 * inv, f(n - 2)), (inv, f(n - 3))],
                t,
            )
        } else {
            ComplexField1D::linear_comb(&[(-inv, f(i - 1)), (inv, f(i + 1))], t)
        };
        Ok(d)
    }
}

/// −∫ |ψ|² ln|ψ|² over the grid measure; the field must already be
/// normalized to 1 within 1e−8. Densities below 1e−300 contribute zero.
pub fn entropy_se<F: WaveField>(field: &F) -> Result<f64> {
    let norm = field.norm_sq();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::NotNormalized(norm));
    }
    Ok(-neumaier_sum((0..field.num_nodes()).map(|i| {
        let rho = field.density(i);
        if rho < 1e-300 {
            0.0
        } else {
            field.measure_weight(i) * rho * rho.ln()
        }
    })))
}

struct RateIngredients {
    polar: crate::field::PolarForm,
    stencil_ok: Vec<bool>,
    ds_dt: Vec<f64>,
}

fn rate_ingredients(field: &ComplexField1D, dpsi_dt: &ComplexField1D) -> Result<RateIngredients> {
    if !field.same_grid(dpsi_dt) {
        return Err(Error::GridMismatch);
    }
    let polar = polar_decompose(field, NODE_EPSILON)?;
    let masked = polar.masked_count();
    let total = field.num_nodes();
    if 5 * masked > total {
        return Err(Error::TooManyNodes { masked, total });
    }
    let stencil_ok = polar.stencil_valid();
    let ds_dt = field
        .values()
        .iter()
        .zip(dpsi_dt.values())
        .zip(&polar.node_mask)
        .map(|((psi, dpsi), &masked)| {
            if masked {
                0.0
            } else {
                (psi.conj() * dpsi).im / psi.norm_sqr()
            }
        })
        .collect();
    Ok(RateIngredients { polar, stencil_ok, ds_dt })
}

/// d⟨S⟩/dt assembled from the phase gradient:
/// ∫ [A² ∂S/∂t + (1/m) A² (∇S)²], masked nodes excluded.
pub fn phase_rate_form_a(
    field: &ComplexField1D,
    dpsi_dt: &ComplexField1D,
    m: MassParam,
) -> Result<f64> {
    let ing = rate_ingredients(field, dpsi_dt)?;
    let grad_s = derivative(field.grid().nodes(), &ing.polar.phase);
    Ok(neumaier_sum((0..field.num_nodes()).map(|i| {
        if !ing.stencil_ok[i] {
            return 0.0;
        }
        let a2 = ing.polar.modulus[i] * ing.polar.modulus[i];
        field.measure_weight(i) * a2 * (ing.ds_dt[i] + grad_s[i] * grad_s[i] / m.value())
    })))
}

/// d⟨S⟩/dt assembled through the potential instead of the phase gradient:
/// −∫ A² ∂S/∂t − 2⟨V⟩ − (1/m)∫(∇A)². Agrees with [`phase_rate_form_a`]
/// whenever the field actually solves the Schrödinger equation for V.
pub fn phase_rate_form_b(
    field: &ComplexField1D,
    dpsi_dt: &ComplexField1D,
    v: &Potential,
    m: MassParam,
) -> Result<f64> {
    let ing = rate_ingredients(field, dpsi_dt)?;
    let grad_a = derivative(field.grid().nodes(), &ing.polar.modulus);
    let nodes = field.grid().nodes();
    let t = field.time();
    Ok(neumaier_sum((0..field.num_nodes()).map(|i| {
        let w = field.measure_weight(i);
        let a2 = ing.polar.modulus[i] * ing.polar.modulus[i];
        let mut term = -w * a2 * 2.0 * v.eval(nodes[i], t) - w * grad_a[i] * grad_a[i] / m.value();
        if ing.stencil_ok[i] {
            term -= w * a2 * ing.ds_dt[i];
        }
        term
    })))
}

/// The gradient-difference rate for any field kind. Nonnegative up to
/// discretization (Cauchy-Schwarz), and zero exactly when the field is a
/// real profile times a coordinate-independent phase.
pub fn delta_k<F: WaveField>(field: &F, m: MassParam) -> f64 {
    field.delta_k_rate(m)
}

/// Integrated mean phase over a trajectory.
///
/// `dynamic_term` is Im ∫dt ∫ψ†∂ₜψ (per-snapshot normalized when the flag is
/// set), `delta_k_term` is ∫dt δK(t). Time derivatives are centered with
/// one-sided ends; the time integral is a trapezoid. For interior snapshots
/// the step cancels algebraically, so the dynamic term depends only on the
/// snapshot sequence, not on the nominal time scale.
///
/// A single-snapshot trajectory (t_f = 0) integrates to zero; two snapshots
/// are rejected (the stencils need three).
pub fn integrated_phase<F: WaveField>(
    traj: &Trajectory<F>,
    m: MassParam,
    normalize_each_step: bool,
) -> Result<PhaseBreakdown> {
    let n = traj.len();
    if n == 1 {
        return Ok(PhaseBreakdown::new(0.0, 0.0, normalize_each_step));
    }
    if n < 3 {
        return Err(Error::TooFewSnapshots(n));
    }

    let norms: Vec<f64> = if normalize_each_step {
        traj.fields().iter().map(|f| f.norm_sq()).collect()
    } else {
        vec![1.0; n]
    };

    // Im<psi_i | stencil_i> / 2, with the 1/dt of the derivative cancelled
    // against the dt of the time trapezoid.
    let mut dynamic_terms = Vec::with_capacity(n);
    for i in 0..n {
        let f = traj.field(i);
        let im = if i == 0 {
            -3.0 * f.im_inner(traj.field(0)) + 4.0 * f.im_inner(traj.field(1))
                - f.im_inner(traj.field(2))
        } else if i == n - 1 {
            3.0 * f.im_inner(traj.field(n - 1)) - 4.0 * f.im_inner(traj.field(n - 2))
                + f.im_inner(traj.field(n - 3))
        } else {
            f.im_inner(traj.field(i + 1)) - f.im_inner(traj.field(i - 1))
        };
        dynamic_terms.push(traj.time_weight(i) * 0.5 * im / norms[i]);
    }
    let dynamic = neumaier_sum(dynamic_terms);

    let dt = traj.dt();
    let delta_k_term = neumaier_sum(
        (0..n).map(|i| traj.time_weight(i) * dt * traj.field(i).delta_k_rate(m) / norms[i]),
    );

    Ok(PhaseBreakdown::new(dynamic, delta_k_term, normalize_each_step))
}

/// Residual of the elimination identity
/// Im∫ψ†∂ₜψ + ∫|∇ψ|²/(2m) + ∫|ψ|²V, which vanishes on any solution of the
/// Schrödinger equation.
pub fn roi_identity_residual(
    field: &ComplexField1D,
    dpsi_dt: &ComplexField1D,
    v: &Potential,
    m: MassParam,
) -> f64 {
    let im_term = field.im_inner(dpsi_dt);
    let grad = derivative(field.grid().nodes(), field.values());
    let nodes = field.grid().nodes();
    let t = field.time();
    let kinetic = neumaier_sum(
        grad.iter()
            .enumerate()
            .map(|(i, g)| field.measure_weight(i) * g.norm_sqr() / (2.0 * m.value())),
    );
    let pot = neumaier_sum(
        (0..field.num_nodes())
            .map(|i| field.measure_weight(i) * field.density(i) * v.eval(nodes[i], t)),
    );
    im_term + kinetic + pot
}

/// Magnitudes of the three pieces of the elimination identity, for relative
/// normalization of the residual.
pub fn roi_scale(
    field: &ComplexField1D,
    dpsi_dt: &ComplexField1D,
    v: &Potential,
    m: MassParam,
) -> f64 {
    let im_term = field.im_inner(dpsi_dt).abs();
    let grad = derivative(field.grid().nodes(), field.values());
    let nodes = field.grid().nodes();
    let t = field.time();
    let kinetic = neumaier_sum(
        grad.iter()
            .enumerate()
            .map(|(i, g)| field.measure_weight(i) * g.norm_sqr() / (2.0 * m.value())),
    )
    .abs();
    let pot = neumaier_sum(
        (0..field.num_nodes())
            .map(|i| field.measure_weight(i) * field.density(i) * v.eval(nodes[i], t)),
    )
    .abs();
    im_term.max(kinetic).max(pot)
}

/// L² residual of the continuity equation ∂A²/∂t + (1/m)∇(A²∇S) at an
/// interior snapshot, over stencil-valid nodes. Also returns the L² size of
/// the two constituent terms for normalization.
pub fn continuity_residual(
    traj: &Trajectory<ComplexField1D>,
    m: MassParam,
    t_index: usize,
) -> Result<(f64, f64)> {
    let n = traj.len();
    if t_index == 0 || t_index + 1 >= n {
        return Err(Error::TimeIndexOutOfRange { index: t_index, len: n });
    }
    let field = traj.field(t_index);
    let polar = polar_decompose(field, NODE_EPSILON)?;
    let ok = polar.stencil_valid();
    let nodes = field.grid().nodes();

    let inv2dt = 1.0 / (2.0 * traj.dt());
    let drho_dt: Vec<f64> = (0..field.num_nodes())
        .map(|i| (traj.field(t_index + 1).density(i) - traj.field(t_index - 1).density(i)) * inv2dt)
        .collect();

    let grad_s = derivative(nodes, &polar.phase);
    let flux: Vec<f64> = (0..field.num_nodes())
        .map(|i| {
            if ok[i] {
                polar.modulus[i] * polar.modulus[i] * grad_s[i] / m.value()
            } else {
                0.0
            }
        })
        .collect();
    let div_flux = derivative(nodes, &flux);

    // a flux stencil is only valid where the neighbours' flux values are valid
    let deep_ok: Vec<bool> = (0..field.num_nodes())
        .map(|i| {
            if i == 0 {
                ok[0] && ok[1] && ok[2]
            } else if i + 1 == field.num_nodes() {
                ok[i] && ok[i - 1] && ok[i - 2]
            } else {
                ok[i - 1] && ok[i] && ok[i + 1]
            }
        })
        .collect();

    let res = neumaier_sum((0..field.num_nodes()).map(|i| {
        if deep_ok[i] {
            let r = drho_dt[i] + div_flux[i];
            field.measure_weight(i) * r * r
        } else {
            0.0
        }
    }))
    .sqrt();
    let scale_a = neumaier_sum((0..field.num_nodes()).map(|i| {
        if deep_ok[i] {
            field.measure_weight(i) * drho_dt[i] * drho_dt[i]
        } else {
            0.0
        }
    }))
    .sqrt();
    let scale_b = neumaier_sum((0..field.num_nodes()).map(|i| {
        if deep_ok[i] {
            field.measure_weight(i) * div_flux[i] * div_flux[i]
        } else {
            0.0
        }
    }))
    .sqrt();
    Ok((res, scale_a.max(scale_b)))
}

/// L² residual of the Hamilton-Jacobi equation with the quantum-potential
/// term, (∇S)²/2m + ∂S/∂t + V − (1/2m)A⁻¹∇²A, over stencil-valid nodes.
/// Returns (residual, scale) where scale is the largest constituent L² size.
pub fn hj_residual(
    field: &ComplexField1D,
    dpsi_dt: &ComplexField1D,
    v: &Potential,
    m: MassParam,
) -> Result<(f64, f64)> {
    let ing = rate_ingredients(field, dpsi_dt)?;
    let nodes = field.grid().nodes();
    let grad_s = derivative(nodes, &ing.polar.phase);
    let lap_a = second_derivative_uniform(&ing.polar.modulus, field.grid().spacing());
    let t = field.time();

    let mut res2 = Vec::new();
    let mut scales = [0.0f64; 4];
    let mut parts2 = [Vec::new(), Vec::new(), Vec::new(), Vec::new()];
    for i in 0..field.num_nodes() {
        if !ing.stencil_ok[i] {
            continue;
        }
        let w = field.measure_weight(i);
        let terms = [
            grad_s[i] * grad_s[i] / (2.0 * m.value()),
            ing.ds_dt[i],
            v.eval(nodes[i], t),
            -lap_a[i] / (2.0 * m.value() * ing.polar.modulus[i]),
        ];
        let r: f64 = terms.iter().sum();
        res2.push(w * r * r);
        for (k, term) in terms.iter().enumerate() {
            parts2[k].push(w * term * term);
        }
    }
    for (k, p) in parts2.iter().enumerate() {
        scales[k] = neumaier_sum(p.iter().copied()).sqrt();
    }
    let scale = scales.iter().cloned().fold(0.0, f64::max);
    Ok((neumaier_sum(res2).sqrt(), scale))
}

/// ⟨S⟩(t_f) − ⟨S⟩(0) computed directly from the unwrapped phase, with the
/// per-snapshot global branch continued along the time axis through the
/// anchor node (the modulus maximum of the first snapshot). Valid on
/// node-free trajectories.
pub fn direct_mean_phase_change(traj: &Trajectory<ComplexField1D>) -> Result<f64> {
    if traj.len() < 2 {
        return Ok(0.0);
    }
    let first = polar_decompose(traj.field(0), NODE_EPSILON)?;
    let anchor = first
        .modulus
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap();

    let mean_s = |polar: &crate::field::PolarForm, field: &ComplexField1D, shift: f64| -> f64 {
        let num = neumaier_sum((0..field.num_nodes()).map(|i| {
            if polar.node_mask[i] {
                0.0
            } else {
                field.measure_weight(i)
                    * polar.modulus[i]
                    * polar.modulus[i]
                    * (polar.phase[i] + shift)
            }
        }));
        let den = neumaier_sum((0..field.num_nodes()).map(|i| {
            if polar.node_mask[i] {
                0.0
            } else {
                field.measure_weight(i) * polar.modulus[i] * polar.modulus[i]
            }
        }));
        num / den
    };

    let mut prev_anchor = first.phase[anchor];
    let s0 = mean_s(&first, traj.field(0), 0.0);
    let mut s_last = s0;
    for i in 1..traj.len() {
        let polar = polar_decompose(traj.field(i), NODE_EPSILON)?;
        // keep the anchor phase continuous in time
        let shift = TAU * ((prev_anchor - polar.phase[anchor]) / TAU).round();
        prev_anchor = polar.phase[anchor] + shift;
        s_last = mean_s(&polar, traj.field(i), shift);
    }
    Ok(s_last - s0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Grid1D;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn grid(n: usize) -> Arc<Grid1D> {
        Arc::new(Grid1D::new(-8.5, 8.5, n).unwrap())
    }

    fn ho_ground(g: &Arc<Grid1D>, t: f64) -> ComplexField1D {
        let phase = Complex64::from_polar(1.0, -0.5 * t);
        ComplexField1D::from_fn(Arc::clone(g), t, |x| {
            phase * PI.powf(-0.25) * (-x * x / 2.0).exp()
        })
        .unwrap()
    }

    #[test]
    fn entropy_of_gaussian_matches_analytic() {
        let f = ho_ground(&grid(2001), 0.0);
        let want = 0.5 * (1.0 + PI.ln());
        let got = entropy_se(&f).unwrap();
        assert!((got - want).abs() < 1e-10, "{got} vs {want}");
    }

    #[test]
    fn entropy_of_uniform_boxes() {
        let g1 = Arc::new(Grid1D::new(0.0, 1.0, 101).unwrap());
        let f1 = ComplexField1D::from_fn(g1, 0.0, |_| Complex64::new(1.0, 0.0)).unwrap();
        assert_eq!(entropy_se(&f1).unwrap(), 0.0);

        let g2 = Arc::new(Grid1D::new(0.0, 2.0, 101).unwrap());
        let f2 =
            ComplexField1D::from_fn(g2, 0.0, |_| Complex64::new(0.5f64.sqrt(), 0.0)).unwrap();
        assert!((entropy_se(&f2).unwrap() - 2f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn entropy_rejects_unnormalized() {
        let g = Arc::new(Grid1D::new(0.0, 1.0, 51).unwrap());
        let f = ComplexField1D::from_fn(g, 0.0, |_| Complex64::new(2.0, 0.0)).unwrap();
        match entropy_se(&f) {
            Err(Error::NotNormalized(n)) => assert!((n - 4.0).abs() < 1e-12),
            other => panic!("expected NotNormalized, got {other:?}"),
        }
    }

    #[test]
    fn entropy_invariant_under_quarter_turn_exactly() {
        let f = ho_ground(&grid(1001), 0.0);
        let rotated = ComplexField1D::new(
            Arc::clone(f.grid()),
            f.values().iter().map(|v| Complex64::new(-v.im, v.re)).collect(),
            0.0,
        )
        .unwrap();
        assert_eq!(
            entropy_se(&f).unwrap().to_bits(),
            entropy_se(&rotated).unwrap().to_bits()
        );
    }

    #[test]
    fn form_a_stationary_state() {
        let g = grid(2001);
        let f = ho_ground(&g, 0.0);
        let dpsi = ComplexField1D::new(
            Arc::clone(&g),
            f.values().iter().map(|v| v * Complex64::new(0.0, -0.5)).collect(),
            0.0,
        )
        .unwrap();
        let got = phase_rate_form_a(&f, &dpsi, MassParam::default()).unwrap();
        assert!((got + 0.5).abs() < 1e-10, "{got}");
    }

    #[test]
    fn form_a_plane_wave() {
        let l = 10.0;
        let g = Arc::new(Grid1D::new(0.0, l, 2001).unwrap());
        let p = 1.0;
        let f = ComplexField1D::from_fn(Arc::clone(&g), 0.0, |x| {
            Complex64::from_polar(1.0 / l.sqrt(), p * x)
        })
        .unwrap();
        let dpsi = ComplexField1D::new(
            Arc::clone(&g),
            f.values().iter().map(|v| v * Complex64::new(0.0, -p * p / 2.0)).collect(),
            0.0,
        )
        .unwrap();
        let got = phase_rate_form_a(&f, &dpsi, MassParam::default()).unwrap();
        assert!((got - 0.5).abs() < 1e-10, "{got}");
    }

    #[test]
    fn form_a_static_phase_leaves_gradient_term() {
        let g = grid(2001);
        let p = 1.3;
        let f = ComplexField1D::from_fn(Arc::clone(&g), 0.0, |x| {
            Complex64::from_polar(PI.powf(-0.25) * (-x * x / 2.0).exp(), p * x)
        })
        .unwrap();
        // dpsi/dt real multiple of psi: no phase rate
        let dpsi = ComplexField1D::new(
            Arc::clone(&g),
            f.values().iter().map(|v| v * 0.7).collect(),
            0.0,
        )
        .unwrap();
        let got = phase_rate_form_a(&f, &dpsi, MassParam::default()).unwrap();
        assert!((got - p * p).abs() < 1e-8, "{got} vs {}", p * p);
        assert!(got >= 0.0);
    }

    #[test]
    fn form_b_stationary_oscillator_recovers_minus_e() {
        // analytic moments: <V> = 1/4, (1/m) int (grad A)^2 = 1/2,
        // -int A^2 dS/dt = +1/2, so form_b = 1/2 - 1/2 - 1/2 = -1/2 = -E0
        let g = grid(2001);
        let f = ho_ground(&g, 0.0);
        let dpsi = ComplexField1D::new(
            Arc::clone(&g),
            f.values().iter().map(|v| v * Complex64::new(0.0, -0.5)).collect(),
            0.0,
        )
        .unwrap();
        let v = Potential::harmonic(1.0, MassParam::default());
        let got = phase_rate_form_b(&f, &dpsi, &v, MassParam::default()).unwrap();
        assert!((got + 0.5).abs() < 1e-7, "{got}");
        let a = phase_rate_form_a(&f, &dpsi, MassParam::default()).unwrap();
        assert!((got - a).abs() < 1e-7);
    }

    #[test]
    fn form_b_free_gaussian_is_minus_grad_a_term() {
        let g = grid(2001);
        let f = ho_ground(&g, 0.0);
        let zero_rate = ComplexField1D::new(
            Arc::clone(&g),
            f.values().iter().map(|v| v * 1e-30).collect(),
            0.0,
        )
        .unwrap();
        let got =
            phase_rate_form_b(&f, &zero_rate, &Potential::free(), MassParam::default()).unwrap();
        // (1/m) int (grad A)^2 = 1/2 for this gaussian
        assert!((got + 0.5).abs() < 1e-7, "{got}");
    }

    #[test]
    fn integrated_phase_of_stationary_state() {
        let g = grid(1201);
        let n_t = 1257;
        let dt = 2.0 * PI / (n_t - 1) as f64;
        let times: Vec<f64> = (0..n_t).map(|i| i as f64 * dt).collect();
        let fields: Vec<_> = times.iter().map(|&t| ho_ground(&g, t)).collect();
        let traj = Trajectory::new(times, fields).unwrap();
        let pb = integrated_phase(&traj, MassParam::default(), true).unwrap();
        assert!((pb.total + PI).abs() < 2e-3, "total = {}", pb.total);
        assert!(pb.delta_k_term.abs() < 1e-10);
        assert_eq!(pb.total, pb.dynamic_term + pb.delta_k_term);
    }

    #[test]
    fn integrated_phase_zero_time() {
        let g = grid(101);
        let traj = Trajectory::new(vec![0.0], vec![ho_ground(&g, 0.0)]).unwrap();
        let pb = integrated_phase(&traj, MassParam::default(), false).unwrap();
        assert_eq!(pb.total, 0.0);
        let two = Trajectory::new(vec![0.0, 0.1], vec![ho_ground(&g, 0.0), ho_ground(&g, 0.1)])
            .unwrap();
        assert!(matches!(
            integrated_phase(&two, MassParam::default(), false),
            Err(Error::TooFewSnapshots(2))
        ));
    }

    #[test]
    fn conjugation_flips_dynamic_term_exactly() {
        let g = grid(401);
        let n_t = 41;
        let dt = 0.01;
        let times: Vec<f64> = (0..n_t).map(|i| i as f64 * dt).collect();
        let fields: Vec<_> = times
            .iter()
            .map(|&t| {
                ComplexField1D::from_fn(Arc::clone(&g), t, |x| {
                    Complex64::from_polar(
                        (-(x - 0.3 * t) * (x - 0.3 * t) / 2.0).exp(),
                        0.8 * x - 0.3 * t + 0.1 * x * x * t,
                    )
                })
                .unwrap()
            })
            .collect();
        let traj = Trajectory::new(times.clone(), fields.clone()).unwrap();
        let conj_traj =
            Trajectory::new(times, fields.iter().map(|f| f.conj()).collect()).unwrap();
        let a = integrated_phase(&traj, MassParam::default(), true).unwrap();
        let b = integrated_phase(&conj_traj, MassParam::default(), true).unwrap();
        assert_eq!(a.dynamic_term.to_bits(), (-b.dynamic_term).to_bits());
        assert!((a.delta_k_term - b.delta_k_term).abs() <= 1e-14 * a.delta_k_term.abs().max(1e-300));
    }

    #[test]
    fn roi_residual_detects_corrupted_derivative() {
        let g = grid(2001);
        let f = ho_ground(&g, 0.0);
        let dpsi = ComplexField1D::new(
            Arc::clone(&g),
            f.values().iter().map(|v| v * Complex64::new(0.0, -0.5)).collect(),
            0.0,
        )
        .unwrap();
        let v = Potential::harmonic(1.0, MassParam::default());
        let clean = roi_identity_residual(&f, &dpsi, &v, MassParam::default());
        assert!(clean.abs() < 1e-5, "clean residual {clean}");

        let doubled = ComplexField1D::new(
            Arc::clone(&g),
            dpsi.values().iter().map(|v| v * 2.0).collect(),
            0.0,
        )
        .unwrap();
        let bad = roi_identity_residual(&f, &doubled, &v, MassParam::default());
        assert!((bad + 0.5).abs() < 1e-4, "corrupted residual {bad}");
    }

    #[test]
    fn roi_residual_plane_wave() {
        let l = 10.0;
        let n = 4001;
        let g = Arc::new(Grid1D::new(0.0, l, n).unwrap());
        let p = 1.0;
        let f = ComplexField1D::from_fn(Arc::clone(&g), 0.0, |x| {
            Complex64::from_polar(1.0 / l.sqrt(), p * x)
        })
        .unwrap();
        let dpsi = ComplexField1D::new(
            Arc::clone(&g),
            f.values().iter().map(|v| v * Complex64::new(0.0, -p * p / 2.0)).collect(),
            0.0,
        )
        .unwrap();
        let res = roi_identity_residual(&f, &dpsi, &Potential::free(), MassParam::default());
        // centered-stencil bias (p dx)^2/6 on the kinetic term
        let dx = l / (n - 1) as f64;
        let bound = p.powi(4) * dx * dx / 3.0 + 1e-10;
        assert!(res.abs() < bound, "residual {res} bound {bound}");
    }

    #[test]
    fn hj_residual_stationary_and_wrong_potential() {
        let g = grid(2001);
        let f = ho_ground(&g, 0.0);
        let dpsi = ComplexField1D::new(
            Arc::clone(&g),
            f.values().iter().map(|v| v * Complex64::new(0.0, -0.5)).collect(),
            0.0,
        )
        .unwrap();
        let v = Potential::harmonic(1.0, MassParam::default());
        let (res, scale) = hj_residual(&f, &dpsi, &v, MassParam::default()).unwrap();
        assert!(res / scale < 1e-5, "relative hj residual {}", res / scale);

        // wrong potential: residual equals the L2 norm of the mismatch
        let v_wrong = Potential::new(|x, _| 0.5 * x * x + 0.25);
        let (res_w, _) = hj_residual(&f, &dpsi, &v_wrong, MassParam::default()).unwrap();
        let polar = polar_decompose(&f, NODE_EPSILON).unwrap();
        let ok = polar.stencil_valid();
        let mismatch = neumaier_sum(
            (0..f.num_nodes()).map(|i| if ok[i] { f.measure_weight(i) * 0.0625 } else { 0.0 }),
        )
        .sqrt();
        assert!((res_w - mismatch).abs() < 1e-4 * mismatch, "{res_w} vs {mismatch}");
    }

    #[test]
    fn hj_residual_plane_wave() {
        let l = 10.0;
        let g = Arc::new(Grid1D::new(0.0, l, 2001).unwrap());
        let p = 1.0;
        let f = ComplexField1D::from_fn(Arc::clone(&g), 0.0, |x| {
            Complex64::from_polar(1.0 / l.sqrt(), p * x)
        })
        .unwrap();
        let dpsi = ComplexField1D::new(
            Arc::clone(&g),
            f.values().iter().map(|v| v * Complex64::new(0.0, -p * p / 2.0)).collect(),
            0.0,
        )
        .unwrap();
        let (res, scale) = hj_residual(&f, &dpsi, &Potential::free(), MassParam::default()).unwrap();
        assert!(res / scale < 1e-9, "{res} / {scale}");
    }

    #[test]
    fn continuity_residual_stationary() {
        let g = grid(1001);
        let times: Vec<f64> = (0..9).map(|i| i as f64 * 0.01).collect();
        let fields: Vec<_> = times.iter().map(|&t| ho_ground(&g, t)).collect();
        let traj = Trajectory::new(times, fields).unwrap();
        let (res, _) = continuity_residual(&traj, MassParam::default(), 4).unwrap();
        assert!(res < 1e-10, "{res}");
        assert!(continuity_residual(&traj, MassParam::default(), 0).is_err());
        assert!(continuity_residual(&traj, MassParam::default(), 8).is_err());
    }

    #[test]
    fn direct_phase_change_stationary() {
        let g = grid(801);
        let n_t = 629;
        let dt = 2.0 * PI / (n_t - 1) as f64;
        let times: Vec<f64> = (0..n_t).map(|i| i as f64 * dt).collect();
        let fields: Vec<_> = times.iter().map(|&t| ho_ground(&g, t)).collect();
        let traj = Trajectory::new(times, fields).unwrap();
        let ds = direct_mean_phase_change(&traj).unwrap();
        assert!((ds + PI).abs() < 1e-10, "{ds}");
    }
}
