//! Real periodic scalar and vector fields with lazily synchronized sample and
//! Fourier representations.
//!
//! A `ScalarField` is immutable after construction: every operation returns a
//! new field. Whichever representation was not supplied at construction is
//! computed on first access and cached, so repeated spectral operations pay
//! for one transform.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;
use crate::grid::Grid;

#[derive(Debug, Clone)]
pub struct ScalarField {
    grid: Grid,
    values: OnceLock<Vec<f64>>,
    coeffs: OnceLock<Vec<Complex64>>,
}

impl ScalarField {
    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.points() {
            return Err(Error::Argument(format!(
                "sample count {} does not match grid ({} points)",
                values.len(),
                grid.points()
            )));
        }
        let cell = OnceLock::new();
        cell.set(values).unwrap();
        Ok(ScalarField {
            grid,
            values: cell,
            coeffs: OnceLock::new(),
        })
    }

    /// Build from a coefficient table; the table must describe a real field,
    /// i.e. satisfy Hermitian symmetry f̂(−ξ) = conj f̂(ξ).
    pub fn from_coeffs(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.points() {
            return Err(Error::Argument(format!(
                "coefficient count {} does not match grid ({} points)",
                coeffs.len(),
                grid.points()
            )));
        }
        let scale = coeffs.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
        let tol = 1e-10 * scale.max(1e-300);
        for flat in 0..coeffs.len() {
            let partner = grid.conj_index(flat);
            if (coeffs[flat] - coeffs[partner].conj()).norm() > tol {
                return Err(Error::Argument(
                    "coefficient table is not Hermitian-symmetric (field would not be real)"
                        .into(),
                ));
            }
        }
        let cell = OnceLock::new();
        cell.set(coeffs).unwrap();
        Ok(ScalarField {
            grid,
            values: OnceLock::new(),
            coeffs: cell,
        })
    }

    /// Internal constructor for tables that are Hermitian by construction.
    pub(crate) fn from_coeffs_unchecked(grid: Grid, coeffs: Vec<Complex64>) -> Self {
        let cell = OnceLock::new();
        cell.set(coeffs).unwrap();
        ScalarField {
            grid,
            values: OnceLock::new(),
            coeffs: cell,
        }
    }

    pub fn zeros(grid: Grid) -> Self {
        ScalarField::from_values(grid, vec![0.0; grid.points()]).unwrap()
    }

    pub fn constant(grid: Grid, v: f64) -> Self {
        ScalarField::from_values(grid, vec![v; grid.points()]).unwrap()
    }

    /// Sample a function of the physical coordinates.
    pub fn from_fn(grid: Grid, f: impl Fn([f64; 2]) -> f64) -> Self {
        let values = (0..grid.points()).map(|i| f(grid.coords(i))).collect();
        ScalarField::from_values(grid, values).unwrap()
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        self.values
            .get_or_init(|| fft::inverse_real(self.grid, self.coeffs.get().expect("representation")))
    }

    pub fn coeffs(&self) -> &[Complex64] {
        self.coeffs
            .get_or_init(|| fft::forward_real(self.grid, self.values.get().expect("representation")))
    }

    /// Mean value = zero-mode coefficient (the torus has unit measure).
    pub fn mean(&self) -> f64 {
        match self.values.get() {
            Some(v) => v.iter().sum::<f64>() / v.len() as f64,
            None => self.coeffs()[0].re,
        }
    }

    pub fn is_mean_zero(&self) -> bool {
        let c0 = self.coeffs()[0].norm();
        let scale = self.max_abs().max(1e-300);
        c0 <= 1e-12 * scale.max(1.0)
    }

    pub fn subtract_mean(&self) -> Self {
        let m = self.mean();
        self.map_values(|v| v - m)
    }

    pub fn max_abs(&self) -> f64 {
        self.values().iter().fold(0.0f64, |a, &v| a.max(v.abs()))
    }

    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Self {
        let values = self.values().iter().map(|&v| f(v)).collect();
        ScalarField::from_values(self.grid, values).unwrap()
    }

    fn check_grid(&self, other: &ScalarField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(
                "fields live on different grids".into(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &ScalarField) -> Result<Self> {
        self.check_grid(other)?;
        let values = self
            .values()
            .iter()
            .zip(other.values())
            .map(|(a, b)| a + b)
            .collect();
        Ok(ScalarField::from_values(self.grid, values).unwrap())
    }

    pub fn sub(&self, other: &ScalarField) -> Result<Self> {
        self.check_grid(other)?;
        let values = self
            .values()
            .iter()
            .zip(other.values())
            .map(|(a, b)| a - b)
            .collect();
        Ok(ScalarField::from_values(self.grid, values).unwrap())
    }

    /// Pointwise product on the grid (no dealiasing).
    pub fn mul_pointwise(&self, other: &ScalarField) -> Result<Self> {
        self.check_grid(other)?;
        let values = self
            .values()
            .iter()
            .zip(other.values())
            .map(|(a, b)| a * b)
            .collect();
        Ok(ScalarField::from_values(self.grid, values).unwrap())
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map_values(|v| c * v)
    }

    /// Spectral derivative along `axis`: coefficients 2πi ξ_axis f̂(ξ).
    /// The Nyquist row of the derivative axis is zeroed to keep the result real.
    pub fn derivative(&self, axis: usize) -> Result<Self> {
        if axis >= self.grid.dim() {
            return Err(Error::Argument(format!(
                "axis {axis} out of range for dim {}",
                self.grid.dim()
            )));
        }
        let n = self.grid.n();
        let half = (n / 2) as i64;
        let coeffs = self.coeffs();
        let out: Vec<Complex64> = (0..coeffs.len())
            .map(|flat| {
                let xi = self.grid.mode(flat)[axis];
                if xi == half {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(0.0, 2.0 * PI * xi as f64) * coeffs[flat]
                }
            })
            .collect();
        Ok(ScalarField::from_coeffs_unchecked(self.grid, out))
    }

    pub fn gradient(&self) -> Result<VectorField> {
        let comps = (0..self.grid.dim())
            .map(|axis| self.derivative(axis))
            .collect::<Result<Vec<_>>>()?;
        VectorField::from_components(comps)
    }

    /// L^p norm under the normalized measure; `p = f64::INFINITY` gives the
    /// max over samples. Equispaced quadrature is exact for the band-limited
    /// trigonometric interpolant. Summation is over the sorted power values,
    /// so the norm is exactly invariant under sample permutations (grid
    /// translations in particular).
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if p.is_infinite() && p > 0.0 {
            return Ok(self.max_abs());
        }
        if !(p >= 1.0) {
            return Err(Error::Argument(format!("L^p norm requires p >= 1, got {p}")));
        }
        let vals = self.values();
        let mut powers: Vec<f64> = if p == 2.0 {
            vals.iter().map(|v| v * v).collect()
        } else {
            vals.iter().map(|v| v.abs().powf(p)).collect()
        };
        powers.sort_unstable_by(f64::total_cmp);
        let mean = powers.iter().sum::<f64>() / vals.len() as f64;
        Ok(mean.powf(1.0 / p))
    }

    /// Exact translation by whole grid steps (index roll, no interpolation).
    pub fn shifted(&self, steps: [i64; 2]) -> Self {
        let n = self.grid.n() as i64;
        let wrap = |s: i64| ((s % n) + n) % n;
        let (s0, s1) = (wrap(steps[0]) as usize, wrap(steps[1]) as usize);
        let vals = self.values();
        let n = self.grid.n();
        let out: Vec<f64> = match self.grid.dim() {
            // f(x + y) sampled at index j is f[(j + s) mod n]
            1 => (0..n).map(|j| vals[(j + s0) % n]).collect(),
            _ => (0..self.grid.points())
                .map(|flat| {
                    let (i0, i1) = (flat / n, flat % n);
                    vals[((i0 + s0) % n) * n + (i1 + s1) % n]
                })
                .collect(),
        };
        ScalarField::from_values(self.grid, out).unwrap()
    }

    /// Resample on a grid refined by `factor` (zero-padding in Fourier space;
    /// exact for band-limited fields).
    pub fn refined(&self, factor: usize) -> Result<Self> {
        if factor == 0 || !factor.is_power_of_two() {
            return Err(Error::Argument("refinement factor must be a power of two".into()));
        }
        let fine = Grid::new(self.grid.dim(), self.grid.n() * factor)?;
        let mut out = vec![Complex64::new(0.0, 0.0); fine.points()];
        let coeffs = self.coeffs();
        for flat in 0..coeffs.len() {
            if self.grid.is_nyquist(flat) {
                continue; // drop Nyquist content rather than split it
            }
            let m = self.grid.mode(flat);
            if let Some(dst) = fine.flat_of_mode(m) {
                out[dst] = coeffs[flat];
            }
        }
        Ok(ScalarField::from_coeffs_unchecked(fine, out))
    }

    /// Apply a real radial Fourier multiplier g(|ξ|) (Hermitian-safe).
    pub fn radial_multiplier(&self, g: impl Fn(f64) -> f64) -> Self {
        let coeffs = self.coeffs();
        let out: Vec<Complex64> = (0..coeffs.len())
            .map(|flat| coeffs[flat] * g(self.grid.mode_norm(flat)))
            .collect();
        ScalarField::from_coeffs_unchecked(self.grid, out)
    }

    /// Coefficientwise product with a Hermitian multiplier table.
    pub(crate) fn multiplied_modes(&self, table: &[Complex64]) -> Self {
        let coeffs = self.coeffs();
        let out: Vec<Complex64> = coeffs
            .iter()
            .zip(table)
            .map(|(c, m)| c * m)
            .collect();
        ScalarField::from_coeffs_unchecked(self.grid, out)
    }
}

/// d-component real vector field; all components share one grid.
#[derive(Debug, Clone)]
pub struct VectorField {
    components: Vec<ScalarField>,
}

impl VectorField {
    pub fn from_components(components: Vec<ScalarField>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Argument("vector field needs at least one component".into()));
        }
        let grid = components[0].grid();
        if components.len() != grid.dim() {
            return Err(Error::Argument(format!(
                "expected {} components for dim {}, got {}",
                grid.dim(),
                grid.dim(),
                components.len()
            )));
        }
        for c in &components {
            if c.grid() != grid {
                return Err(Error::GridMismatch("vector components on different grids".into()));
            }
        }
        Ok(VectorField { components })
    }

    pub fn zeros(grid: Grid) -> Self {
        let comps = (0..grid.dim()).map(|_| ScalarField::zeros(grid)).collect();
        VectorField { components: comps }
    }

    /// Spatially constant vector (c, …).
    pub fn uniform(grid: Grid, c: &[f64]) -> Result<Self> {
        if c.len() != grid.dim() {
            return Err(Error::Argument("uniform vector length must equal dim".into()));
        }
        let comps = c.iter().map(|&v| ScalarField::constant(grid, v)).collect();
        Ok(VectorField { components: comps })
    }

    pub fn grid(&self) -> Grid {
        self.components[0].grid()
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, c: usize) -> &ScalarField {
        &self.components[c]
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.components
    }

    pub fn max_abs(&self) -> f64 {
        self.components.iter().map(|c| c.max_abs()).fold(0.0, f64::max)
    }

    /// max_ξ |ξ·û(ξ)| over the resolvable band.
    pub fn divergence_defect(&self) -> f64 {
        let grid = self.grid();
        let mut worst = 0.0f64;
        for flat in 0..grid.points() {
            if grid.is_nyquist(flat) {
                continue;
            }
            let m = grid.mode(flat);
            let mut dot = Complex64::new(0.0, 0.0);
            for (axis, comp) in self.components.iter().enumerate() {
                dot += comp.coeffs()[flat] * m[axis] as f64;
            }
            worst = worst.max(dot.norm());
        }
        worst
    }

    fn coeff_scale(&self) -> f64 {
        self.components
            .iter()
            .flat_map(|c| c.coeffs().iter())
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    /// Spectral divergence test: max_ξ |ξ·û| ≤ 1e−12 · max |û|.
    pub fn is_divergence_free(&self) -> bool {
        self.divergence_defect() <= 1e-12 * self.coeff_scale().max(1e-300)
    }

    /// Pointwise u·∇f with spectral derivatives of `f` (no dealiasing).
    pub fn dot_gradient(&self, f: &ScalarField) -> Result<ScalarField> {
        let mut acc = ScalarField::zeros(self.grid());
        for (axis, comp) in self.components.iter().enumerate() {
            let term = comp.mul_pointwise(&f.derivative(axis)?)?;
            acc = acc.add(&term)?;
        }
        Ok(acc)
    }

    pub fn sub(&self, other: &VectorField) -> Result<VectorField> {
        let comps = self
            .components
            .iter()
            .zip(other.components())
            .map(|(a, b)| a.sub(b))
            .collect::<Result<Vec<_>>>()?;
        VectorField::from_components(comps)
    }

    /// Pointwise Euclidean magnitude |u|(x).
    pub fn magnitude(&self) -> ScalarField {
        let grid = self.grid();
        let mut sq = vec![0.0; grid.points()];
        for comp in &self.components {
            for (s, v) in sq.iter_mut().zip(comp.values()) {
                *s += v * v;
            }
        }
        ScalarField::from_values(grid, sq.into_iter().map(f64::sqrt).collect()).unwrap()
    }
}
