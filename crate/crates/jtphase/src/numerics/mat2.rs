//! Exact 2×2 complex matrix algebra and the closed-form Hermitian exponential.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::ops::{Add, Mul, Sub};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Row-major 2×2 complex matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2c {
    pub m: [Complex64; 4],
}

pub const IDENTITY: Mat2c = Mat2c { m: [ONE, ZERO, ZERO, ONE] };
pub const SIGMA_X: Mat2c = Mat2c { m: [ZERO, ONE, ONE, ZERO] };
pub const SIGMA_Z: Mat2c = Mat2c {
    m: [ONE, ZERO, ZERO, Complex64::new(-1.0, 0.0)],
};

impl Mat2c {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Self { m: [a, b, c, d] }
    }

    pub fn from_real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn scale(self, s: Complex64) -> Self {
        Self { m: self.m.map(|e| e * s) }
    }

    pub fn trace(self) -> Complex64 {
        self.m[0] + self.m[3]
    }

    pub fn det(self) -> Complex64 {
        self.m[0] * self.m[3] - self.m[1] * self.m[2]
    }

    pub fn adjoint(self) -> Self {
        Self::new(self.m[0].conj(), self.m[2].conj(), self.m[1].conj(), self.m[3].conj())
    }

    pub fn max_abs(self) -> f64 {
        self.m.iter().map(|e| e.norm()).fold(0.0, f64::max)
    }

    /// Apply to a column spinor.
    pub fn apply(self, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.m[0] * v[0] + self.m[1] * v[1],
            self.m[2] * v[0] + self.m[3] * v[1],
        ]
    }

    fn hermitian_deviation(self) -> f64 {
        (self - self.adjoint()).max_abs()
    }

    /// exp(M) for Hermitian M, via the eigen-decomposition of the
    /// c·I + v·σ split: exp = ½(e^{λ₊}+e^{λ₋})I + ½(e^{λ₊}−e^{λ₋})(v·σ)/|v|
    /// with λ± = c ± |v|. |v| → 0 falls back to a series for sinh|v|/|v|.
    ///
    /// Rejects input whose deviation from Hermiticity exceeds 1e−12
    /// (relative to the matrix magnitude).
    pub fn exp_hermitian(self) -> Result<Mat2c> {
        let dev = self.hermitian_deviation();
        if !dev.is_finite() || dev > 1e-12 * self.max_abs().max(1.0) {
            return Err(Error::NotHermitian(dev));
        }
        let c = 0.5 * (self.m[0].re + self.m[3].re);
        let vz = 0.5 * (self.m[0].re - self.m[3].re);
        let vx = 0.5 * (self.m[1].re + self.m[2].re);
        let vy = 0.5 * (self.m[2].im - self.m[1].im);
        let h = (vx * vx + vy * vy + vz * vz).sqrt();

        let (cosh_part, sinhc_part) = if h < 1e-4 {
            // e^c cosh h, e^c sinh(h)/h by series; avoids 0/0 and cancellation
            let h2 = h * h;
            let ec = c.exp();
            (ec * (1.0 + h2 / 2.0 + h2 * h2 / 24.0), ec * (1.0 + h2 / 6.0 + h2 * h2 / 120.0))
        } else {
            let ep = (c + h).exp();
            let em = (c - h).exp();
            (0.5 * (ep + em), 0.5 * (ep - em) / h)
        };

        let mut out = IDENTITY.scale(cosh_part.into());
        let v_dot_sigma = Mat2c::new(
            Complex64::new(vz, 0.0),
            Complex64::new(vx, -vy),
            Complex64::new(vx, vy),
            Complex64::new(-vz, 0.0),
        );
        out = out + v_dot_sigma.scale(sinhc_part.into());
        Ok(out)
    }
}

impl Add for Mat2c {
    type Output = Mat2c;
    fn add(self, rhs: Mat2c) -> Mat2c {
        Mat2c {
            m: [
                self.m[0] + rhs.m[0],
                self.m[1] + rhs.m[1],
                self.m[2] + rhs.m[2],
                self.m[3] + rhs.m[3],
            ],
        }
    }
}

impl Sub for Mat2c {
    type Output = Mat2c;
    fn sub(self, rhs: Mat2c) -> Mat2c {
        Mat2c {
            m: [
                self.m[0] - rhs.m[0],
                self.m[1] - rhs.m[1],
                self.m[2] - rhs.m[2],
                self.m[3] - rhs.m[3],
            ],
        }
    }
}

impl Mul for Mat2c {
    type Output = Mat2c;
    fn mul(self, r: Mat2c) -> Mat2c {
        Mat2c::new(
            self.m[0] * r.m[0] + self.m[1] * r.m[2],
            self.m[0] * r.m[1] + self.m[1] * r.m[3],
            self.m[2] * r.m[0] + self.m[3] * r.m[2],
            self.m[2] * r.m[1] + self.m[3] * r.m[3],
        )
    }
}
