//! Rescaled unit-mass mollifiers η^ε and spectral mollification f ↦ η^ε ∗ f,
//! plus sweep drivers that measure how mollification error, mollified
//! gradients, and mollified powers scale with ε.
//!
//! The profile is a radial plateau bump: constant on |x| ≤ ε/2, zero on
//! |x| ≥ ε, smooth in between, normalized to unit mass by the grid
//! quadrature. Mollification is an exact circular convolution computed in
//! Fourier space.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::grid::Grid;
use crate::ratefit::{self, RateFit};
use crate::smooth::plateau;

#[derive(Debug, Clone)]
pub struct Mollifier {
    grid: Grid,
    epsilon: f64,
    kernel_values: Vec<f64>,
    kernel_coeffs: Vec<Complex64>,
}

impl Mollifier {
    /// Requires ε ≥ 4h (kernel resolved by ≥ 4 points across its support)
    /// and ε < 1/2 (no wrap around the torus).
    pub fn build(grid: Grid, epsilon: f64) -> Result<Self> {
        let h = grid.spacing();
        if epsilon < 4.0 * h {
            return Err(Error::Resolution(format!(
                "epsilon {epsilon} below 4h = {} on n = {}",
                4.0 * h,
                grid.n()
            )));
        }
        if epsilon >= 0.5 {
            return Err(Error::DomainWrap(format!(
                "epsilon {epsilon} >= 1/2 would wrap the torus"
            )));
        }
        let inv_scale = 1.0 / epsilon.powi(grid.dim() as i32);
        let mut kernel: Vec<f64> = (0..grid.points())
            .map(|flat| {
                let x = grid.min_image(flat);
                let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
                inv_scale * plateau(r / epsilon)
            })
            .collect();
        let mass: f64 = kernel.iter().sum::<f64>() / grid.points() as f64;
        for v in &mut kernel {
            *v /= mass;
        }
        let mut coeffs = crate::fft::forward_real(grid, &kernel);
        // the zero mode is the kernel mass; pin it so mollification preserves
        // means to the last bit
        coeffs[0] = Complex64::new(1.0, 0.0);
        Ok(Mollifier {
            grid,
            epsilon,
            kernel_values: kernel,
            kernel_coeffs: coeffs,
        })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Periodized kernel samples η^ε(x_j).
    pub fn kernel(&self) -> &[f64] {
        &self.kernel_values
    }

    /// Fourier coefficients of the kernel (the mollification multiplier).
    pub fn coeffs(&self) -> &[Complex64] {
        &self.kernel_coeffs
    }

    /// Grid quadrature of the kernel samples.
    pub fn mass(&self) -> f64 {
        self.kernel_values.iter().sum::<f64>() / self.grid.points() as f64
    }

    /// η^ε ∗ f via coefficientwise product.
    pub fn apply(&self, f: &ScalarField) -> Result<ScalarField> {
        if f.grid() != self.grid {
            return Err(Error::GridMismatch("field and mollifier grids differ".into()));
        }
        Ok(f.multiplied_modes(&self.kernel_coeffs))
    }

    pub fn apply_vector(&self, u: &VectorField) -> Result<VectorField> {
        let comps = u
            .components()
            .iter()
            .map(|c| self.apply(c))
            .collect::<Result<Vec<_>>>()?;
        VectorField::from_components(comps)
    }
}

/// f^ε = η^ε ∗ f.
pub fn mollify(f: &ScalarField, m: &Mollifier) -> Result<ScalarField> {
    m.apply(f)
}

fn sweep_values(
    f: &ScalarField,
    eps_list: &[f64],
    value: impl Fn(&Mollifier) -> Result<f64>,
) -> Result<RateFit> {
    ratefit::validate_sweep(eps_list, 5, 2.0)?;
    let mut vals = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let m = Mollifier::build(f.grid(), eps)?;
        vals.push(value(&m)?);
    }
    RateFit::fit(eps_list, &vals)
}

/// Fit of log ‖f^ε − f‖_p against log ε. For a field of Besov regularity α
/// the slope estimates α, saturating at 2 for smooth fields (the kernel is
/// even, so the first odd moment vanishes).
pub fn smoothing_rate(f: &ScalarField, p: f64, eps_list: &[f64]) -> Result<RateFit> {
    sweep_values(f, eps_list, |m| m.apply(f)?.sub(f)?.lp_norm(p))
}

/// Fit of log ‖∇f^ε‖_{L^{p(s−1)}} against log ε; the slope is bounded below
/// by α − d(s−2)/(p(s−1)) − 1 for fields of Besov regularity α.
pub fn gradient_blowup_rate(f: &ScalarField, p: f64, s: f64, eps_list: &[f64]) -> Result<RateFit> {
    if s < 2.0 {
        return Err(Error::Argument(format!("gradient sweep requires s >= 2, got {s}")));
    }
    let q = p * (s - 1.0);
    if q < 1.0 {
        return Err(Error::Argument(format!(
            "Lebesgue exponent p(s-1) = {q} must be >= 1"
        )));
    }
    sweep_values(f, eps_list, |m| {
        let grad = m.apply(f)?.gradient()?;
        grad.magnitude().lp_norm(q)
    })
}

/// Predicted lower bound for the [`gradient_blowup_rate`] slope.
pub fn gradient_blowup_exponent(alpha: f64, d: usize, p: f64, s: f64) -> f64 {
    alpha - d as f64 * (s - 2.0) / (p * (s - 1.0)) - 1.0
}

/// Fit of log ‖|f^ε|^{s−1}‖_{L^p} against log ε; bounded below by
/// −d(s−2)/p for any f ∈ L^p.
pub fn mollified_power_rate(f: &ScalarField, p: f64, s: f64, eps_list: &[f64]) -> Result<RateFit> {
    if !(p >= s - 1.0 && s - 1.0 >= 1.0) {
        return Err(Error::Precondition(format!(
            "power sweep requires p >= s-1 >= 1, got p = {p}, s = {s}"
        )));
    }
    sweep_values(f, eps_list, |m| {
        let smoothed = m.apply(f)?;
        smoothed.map_values(|v| v.abs().powf(s - 1.0)).lp_norm(p)
    })
}

/// Predicted lower bound for the [`mollified_power_rate`] slope.
pub fn mollified_power_exponent(d: usize, p: f64, s: f64) -> f64 {
    -(d as f64) * (s - 2.0) / p
}
