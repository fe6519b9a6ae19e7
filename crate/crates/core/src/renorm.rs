//! Complex renormalization powers |θ|^z with companion weight
//! z|θ|^{z−1} sgn θ, and compactly supported space-time test functions
//! φ(t,x) = ψ(t)χ(x) with a closed-form C_c^∞ temporal bump.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::ScalarField;

/// Values with |θ| below this clamp to zero before taking powers/logs.
pub const POWER_CLAMP: f64 = 1e-300;

/// Evaluation rule for |θ|^z = |θ|^{Re z} (cos(Im z ln|θ|) + i sin(Im z ln|θ|)).
#[derive(Debug, Clone, Copy)]
pub struct RenormPower {
    z: Complex64,
}

impl RenormPower {
    pub fn new(z: Complex64) -> Self {
        RenormPower { z }
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    /// |v|^z, defined as 0 at v = 0.
    pub fn power(&self, v: f64) -> Complex64 {
        let a = v.abs();
        if a < POWER_CLAMP {
            return Complex64::new(0.0, 0.0);
        }
        let ln = a.ln();
        Complex64::from_polar((self.z.re * ln).exp(), self.z.im * ln)
    }

    /// z |v|^{z−1} sgn v, defined as 0 at v = 0 (valid for Re z > 1).
    pub fn weight(&self, v: f64) -> Complex64 {
        let a = v.abs();
        if a < POWER_CLAMP {
            return Complex64::new(0.0, 0.0);
        }
        let ln = a.ln();
        let base = Complex64::from_polar(((self.z.re - 1.0) * ln).exp(), self.z.im * ln);
        self.z * base * v.signum()
    }
}

/// φ(t,x) = ψ(t)χ(x): ψ is the standard exp(−1/(s(1−s))) bump supported on
/// (margin, t_end − margin); χ defaults to the constant 1.
#[derive(Debug, Clone)]
pub struct TestFunction {
    t_end: f64,
    margin: f64,
    chi: Option<ScalarField>,
}

impl TestFunction {
    pub fn bump(t_end: f64, margin: f64) -> Result<Self> {
        if !(t_end > 0.0) {
            return Err(Error::Argument("t_end must be positive".into()));
        }
        if !(margin > 0.0 && 2.0 * margin < t_end) {
            return Err(Error::Argument(format!(
                "support margin must satisfy 0 < margin < t_end/2, got {margin}"
            )));
        }
        Ok(TestFunction {
            t_end,
            margin,
            chi: None,
        })
    }

    /// Attach a smooth periodic spatial factor.
    pub fn with_spatial(mut self, chi: ScalarField) -> Self {
        self.chi = Some(chi);
        self
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    pub fn chi(&self) -> Option<&ScalarField> {
        self.chi.as_ref()
    }

    fn unit_coord(&self, t: f64) -> f64 {
        (t - self.margin) / (self.t_end - 2.0 * self.margin)
    }

    pub fn psi(&self, t: f64) -> f64 {
        let s = self.unit_coord(t);
        if s <= 0.0 || s >= 1.0 {
            return 0.0;
        }
        let w = s * (1.0 - s);
        if w < 1.0 / 700.0 {
            return 0.0; // e^{-1/w} underflows
        }
        (-1.0 / w).exp()
    }

    /// Closed-form derivative of the bump (never finite differences).
    pub fn psi_prime(&self, t: f64) -> f64 {
        let s = self.unit_coord(t);
        if s <= 0.0 || s >= 1.0 {
            return 0.0;
        }
        let w = s * (1.0 - s);
        if w < 1.0 / 700.0 {
            return 0.0;
        }
        let psi = (-1.0 / w).exp();
        psi * (1.0 - 2.0 * s) / (w * w) / (self.t_end - 2.0 * self.margin)
    }
}
