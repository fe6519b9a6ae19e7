//! Thin layer over rustfft: cached plans and separable 1D/2D transforms on
//! flat row-major buffers. Coefficients follow the integral convention
//! f̂(ξ) = ∫ e^{-2πi ξ·x} f(x) dx, i.e. forward transforms divide by the
//! point count and the inverse synthesis carries no factor.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::grid::Grid;

type PlanKey = (usize, bool);

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    static PLANS: OnceLock<Mutex<HashMap<PlanKey, Arc<dyn Fft<f64>>>>> = OnceLock::new();
    let cache = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry((len, inverse))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            if inverse {
                planner.plan_fft_inverse(len)
            } else {
                planner.plan_fft_forward(len)
            }
        })
        .clone()
}

fn transpose_square(buf: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            buf.swap(i * n + j, j * n + i);
        }
    }
}

/// In-place unnormalized DFT of a flat row-major buffer over all axes.
pub(crate) fn dft_in_place(grid: Grid, buf: &mut [Complex64], inverse: bool) {
    let n = grid.n();
    let fft = plan(n, inverse);
    match grid.dim() {
        1 => fft.process(buf),
        _ => {
            for row in buf.chunks_exact_mut(n) {
                fft.process(row);
            }
            transpose_square(buf, n);
            for row in buf.chunks_exact_mut(n) {
                fft.process(row);
            }
            transpose_square(buf, n);
        }
    }
}

/// Real samples → normalized coefficients f̂(ξ).
pub(crate) fn forward_real(grid: Grid, values: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    dft_in_place(grid, &mut buf, false);
    let scale = 1.0 / grid.points() as f64;
    for c in &mut buf {
        *c *= scale;
    }
    buf
}

/// Normalized coefficients → real samples (imaginary parts discarded).
pub(crate) fn inverse_real(grid: Grid, coeffs: &[Complex64]) -> Vec<f64> {
    let mut buf = coeffs.to_vec();
    dft_in_place(grid, &mut buf, true);
    buf.into_iter().map(|c| c.re).collect()
}

/// Normalized coefficients of a complex grid function.
pub(crate) fn forward_complex(grid: Grid, values: &[Complex64]) -> Vec<Complex64> {
    let mut buf = values.to_vec();
    dft_in_place(grid, &mut buf, false);
    let scale = 1.0 / grid.points() as f64;
    for c in &mut buf {
        *c *= scale;
    }
    buf
}

/// Inverse synthesis of a complex coefficient table.
pub(crate) fn inverse_complex(grid: Grid, coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut buf = coeffs.to_vec();
    dft_in_place(grid, &mut buf, true);
    buf
}
