//! Deterministic synthetic fields: lacunary sums of prescribed regularity,
//! random-phase power-law spectra, band-limited noise, and single modes.
//!
//! All generators are seeded (ChaCha) and reproduce bit-identical fields for
//! identical (grid, parameters, seed).

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::grid::Grid;

/// A lacunary field f(x) = Σ_{k=0}^{K} 2^{−kα} cos(2π ξ_k·x + ψ_k) with
/// |ξ_k| ≈ 2^k, the canonical example of a function whose Besov regularity
/// equals α with every dyadic scale active.
#[derive(Debug, Clone)]
pub struct LacunaryField {
    alpha: f64,
    modes: Vec<([i64; 2], f64)>, // frequency vector and phase per dyadic level
    field: ScalarField,
}

impl LacunaryField {
    pub fn new(grid: Grid, alpha: f64, levels: usize, seed: u64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Argument(format!(
                "lacunary regularity must lie in (0,1), got {alpha}"
            )));
        }
        let top = 1i64 << levels;
        if top >= (grid.n() / 2) as i64 {
            return Err(Error::Resolution(format!(
                "lacunary level 2^{levels} exceeds the resolvable band of n = {}",
                grid.n()
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut modes = Vec::with_capacity(levels + 1);
        for k in 0..=levels {
            let target = (1i64 << k) as f64;
            let xi = match grid.dim() {
                1 => [1i64 << k, 0],
                _ => {
                    // round a random direction of length 2^k to the integer
                    // lattice; for tiny radii fall back to axis modes
                    if k == 0 {
                        if rng.gen::<bool>() {
                            [1, 0]
                        } else {
                            [0, 1]
                        }
                    } else {
                        let angle: f64 = rng.gen::<f64>() * 2.0 * PI;
                        let mut v = [
                            (target * angle.cos()).round() as i64,
                            (target * angle.sin()).round() as i64,
                        ];
                        if v == [0, 0] {
                            v = [1i64 << k, 0];
                        }
                        v
                    }
                }
            };
            let phase: f64 = rng.gen::<f64>() * 2.0 * PI;
            modes.push((xi, phase));
        }
        let amplitude = |k: usize| 2.0f64.powf(-(k as f64) * alpha);
        let field = ScalarField::from_fn(grid, |x| {
            modes
                .iter()
                .enumerate()
                .map(|(k, (xi, psi))| {
                    amplitude(k)
                        * (2.0 * PI * (xi[0] as f64 * x[0] + xi[1] as f64 * x[1]) + psi).cos()
                })
                .sum()
        });
        Ok(LacunaryField { alpha, modes, field })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn modes(&self) -> &[([i64; 2], f64)] {
        &self.modes
    }

    pub fn field(&self) -> &ScalarField {
        &self.field
    }

    pub fn into_field(self) -> ScalarField {
        self.field
    }
}

/// Convenience wrapper returning just the realized field.
pub fn lacunary(grid: Grid, alpha: f64, levels: usize, seed: u64) -> Result<ScalarField> {
    Ok(LacunaryField::new(grid, alpha, levels, seed)?.into_field())
}

/// Mean-zero random-phase field with |f̂(ξ)| = |ξ|^{−decay} on the resolvable
/// band: a rough field with slowly decaying spectrum.
pub fn rough_spectrum(grid: Grid, decay: f64, seed: u64) -> Result<ScalarField> {
    if decay <= 0.0 {
        return Err(Error::Argument("spectral decay must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.points()];
    for flat in 0..grid.points() {
        if flat == 0 || grid.is_nyquist(flat) {
            continue;
        }
        let partner = grid.conj_index(flat);
        if partner < flat {
            continue; // already set through its conjugate
        }
        let r = grid.mode_norm(flat);
        let amp = r.powf(-decay);
        let phase: f64 = rng.gen::<f64>() * 2.0 * PI;
        let c = Complex64::from_polar(amp, phase);
        coeffs[flat] = c;
        coeffs[partner] = c.conj();
    }
    Ok(ScalarField::from_coeffs_unchecked(grid, coeffs))
}

/// Mean-zero field with independent Gaussian-ish coefficients on
/// 0 < |ξ|_∞ ≤ kmax and nothing above.
pub fn random_band_limited(grid: Grid, kmax: usize, seed: u64) -> Result<ScalarField> {
    if kmax == 0 || kmax >= grid.n() / 2 {
        return Err(Error::Resolution(format!(
            "band limit {kmax} not inside the resolvable band of n = {}",
            grid.n()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.points()];
    let k = kmax as i64;
    for flat in 0..grid.points() {
        if flat == 0 || grid.is_nyquist(flat) {
            continue;
        }
        let m = grid.mode(flat);
        if m[0].abs() > k || m[1].abs() > k {
            continue;
        }
        let partner = grid.conj_index(flat);
        if partner < flat {
            continue;
        }
        let re: f64 = rng.gen::<f64>() - 0.5;
        let im: f64 = rng.gen::<f64>() - 0.5;
        let c = Complex64::new(re, im);
        coeffs[flat] = c;
        coeffs[partner] = c.conj();
    }
    Ok(ScalarField::from_coeffs_unchecked(grid, coeffs))
}

/// Smooth random data: band-limited noise with exponentially decaying
/// amplitudes, normalized to a requested sup-norm scale.
pub fn smooth_random(grid: Grid, kmax: usize, amplitude: f64, seed: u64) -> Result<ScalarField> {
    let base = random_band_limited(grid, kmax, seed)?;
    let shaped = base.radial_multiplier(|r| (-0.5 * r).exp());
    let sup = shaped.max_abs();
    if sup == 0.0 {
        return Ok(shaped);
    }
    Ok(shaped.scaled(amplitude / sup))
}

/// amplitude·cos(2π ξ·x) for one resolvable frequency, built spectrally so
/// every other coefficient is exactly zero.
pub fn single_mode(grid: Grid, xi: [i64; 2], amplitude: f64) -> Result<ScalarField> {
    if grid.dim() == 1 && xi[1] != 0 {
        return Err(Error::Argument("second frequency component must be 0 in d = 1".into()));
    }
    let flat = grid
        .flat_of_mode(xi)
        .ok_or_else(|| Error::Resolution(format!("mode {xi:?} not resolvable")))?;
    if xi == [0, 0] || grid.is_nyquist(flat) {
        return Err(Error::Resolution(format!(
            "mode {xi:?} outside the usable band 0 < |ξ_i| < n/2"
        )));
    }
    let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.points()];
    coeffs[flat] = Complex64::new(amplitude / 2.0, 0.0);
    coeffs[grid.conj_index(flat)] = Complex64::new(amplitude / 2.0, 0.0);
    Ok(ScalarField::from_coeffs_unchecked(grid, coeffs))
}

/// Two nearly parallel modes per dyadic level, chained so that consecutive
/// levels form exact frequency triangles ξ_k^a + ξ_k^b = ξ_{k+1}^a while
/// every magnitude stays inside [2^{k−1}, 2^{k+1}]. Phases are coherent
/// (zero).
///
/// A plain lacunary field with independent random directions has no solution
/// of ξ_a ± ξ_b = ±ξ_c, so every triple correlation — and with it the entire
/// z = 2 commutator residual — vanishes identically. This variant keeps the
/// triadic interactions active while preserving the dyadic block profile, so
/// it is the right vehicle for commutator-decay measurements; d = 2 only.
pub fn lacunary_triad(grid: Grid, alpha: f64, levels: usize, seed: u64) -> Result<ScalarField> {
    if grid.dim() != 2 {
        return Err(Error::Argument("triad lacunary fields are 2-dimensional".into()));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Argument(format!(
            "lacunary regularity must lie in (0,1), got {alpha}"
        )));
    }
    let limit = (grid.n() / 2 - 1) as f64;
    if 2.0f64.powi(levels as i32) * 1.5 >= limit {
        return Err(Error::Resolution(format!(
            "triad level 2^{levels} exceeds the resolvable band of n = {}",
            grid.n()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a: [i64; 2] = if rng.gen::<bool>() { [1, 0] } else { [0, 1] };
    let mut b: [i64; 2] = [1, 1];
    let mut modes: Vec<([i64; 2], f64)> = Vec::new();
    for k in 0..=levels {
        let amp = 0.5 * 2.0f64.powf(-(k as f64) * alpha);
        modes.push((a, amp));
        modes.push((b, amp));
        if k == levels {
            break;
        }
        // exact triangle: next base mode is the sum of the current pair
        let next_a = [a[0] + b[0], a[1] + b[1]];
        // small transverse kick keeps the set genuinely two-dimensional
        let kick_mag = (2.0f64.powf((k + 1) as f64 / 2.0).floor() as i64).max(1);
        let mut next_b = next_a;
        for _ in 0..32 {
            let kick = [
                rng.gen_range(-kick_mag..=kick_mag),
                rng.gen_range(-kick_mag..=kick_mag),
            ];
            let cand = [next_a[0] + kick[0], next_a[1] + kick[1]];
            let r = ((cand[0] * cand[0] + cand[1] * cand[1]) as f64).sqrt();
            let target = 2.0f64.powi((k + 1) as i32);
            if cand != next_a && r >= target / 2.0 && r <= target * 2.0 {
                next_b = cand;
                break;
            }
        }
        if next_b == next_a {
            next_b = [next_a[0] + 1, next_a[1] - 1];
        }
        a = next_a;
        b = next_b;
    }
    let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.points()];
    for (xi, amp) in &modes {
        let flat = grid.flat_of_mode(*xi).ok_or_else(|| {
            Error::Resolution(format!("triad mode {xi:?} left the resolvable band"))
        })?;
        if grid.is_nyquist(flat) {
            return Err(Error::Resolution(format!("triad mode {xi:?} hit the Nyquist row")));
        }
        coeffs[flat] += Complex64::new(amp / 2.0, 0.0);
        coeffs[grid.conj_index(flat)] += Complex64::new(amp / 2.0, 0.0);
    }
    Ok(ScalarField::from_coeffs_unchecked(grid, coeffs))
}

/// Declarative recipe for initial data and test families (used by configs).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldRecipe {
    Lacunary { alpha: f64, levels: usize, seed: u64 },
    LacunaryTriad { alpha: f64, levels: usize, seed: u64 },
    Rough { decay: f64, seed: u64 },
    RandomBand { kmax: usize, seed: u64 },
    SmoothRandom { kmax: usize, amplitude: f64, seed: u64 },
    SingleMode { xi: [i64; 2], amplitude: f64 },
    Zero,
}

impl FieldRecipe {
    pub fn realize(&self, grid: Grid) -> Result<ScalarField> {
        match *self {
            FieldRecipe::Lacunary { alpha, levels, seed } => lacunary(grid, alpha, levels, seed),
            FieldRecipe::LacunaryTriad { alpha, levels, seed } => {
                lacunary_triad(grid, alpha, levels, seed)
            }
            FieldRecipe::Rough { decay, seed } => rough_spectrum(grid, decay, seed),
            FieldRecipe::RandomBand { kmax, seed } => random_band_limited(grid, kmax, seed),
            FieldRecipe::SmoothRandom { kmax, amplitude, seed } => {
                smooth_random(grid, kmax, amplitude, seed)
            }
            FieldRecipe::SingleMode { xi, amplitude } => single_mode(grid, xi, amplitude),
            FieldRecipe::Zero => Ok(ScalarField::zeros(grid)),
        }
    }
}
