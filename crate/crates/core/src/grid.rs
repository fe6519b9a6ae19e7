//! Uniform periodic grids on the unit torus [0,1)^d, d ∈ {1,2}.
//!
//! The torus carries the normalized measure |T^d| = 1, so the plain average
//! of grid samples is the integral. Integer frequencies ξ live in Z^d with
//! |ξ_i| ≤ n/2; the Nyquist row |ξ_i| = n/2 is stored but excluded from the
//! resolvable band used by differentiation and multipliers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    n: usize,
}

impl Grid {
    /// `n` points per axis; `n` must be a power of two ≥ 8, `dim` 1 or 2.
    pub fn new(dim: usize, n: usize) -> Result<Self> {
        if !(dim == 1 || dim == 2) {
            return Err(Error::Config(format!("dim must be 1 or 2, got {dim}")));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::Config(format!(
                "grid size must be a power of two >= 8, got {n}"
            )));
        }
        Ok(Grid { dim, n })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Grid spacing h = 1/n.
    pub fn spacing(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// Total number of sample points n^d.
    pub fn points(&self) -> usize {
        match self.dim {
            1 => self.n,
            _ => self.n * self.n,
        }
    }

    /// Integer frequency of a DFT index along one axis (standard wraparound).
    pub fn freq(&self, idx: usize) -> i64 {
        debug_assert!(idx < self.n);
        if idx <= self.n / 2 {
            idx as i64
        } else {
            idx as i64 - self.n as i64
        }
    }

    /// Frequency vector of a flat storage index (row-major; [ξ, 0] in d = 1).
    pub fn mode(&self, flat: usize) -> [i64; 2] {
        match self.dim {
            1 => [self.freq(flat), 0],
            _ => [self.freq(flat / self.n), self.freq(flat % self.n)],
        }
    }

    /// Euclidean norm |ξ| of the frequency vector at a flat index.
    pub fn mode_norm(&self, flat: usize) -> f64 {
        let m = self.mode(flat);
        ((m[0] * m[0] + m[1] * m[1]) as f64).sqrt()
    }

    /// True when any axis index sits on the Nyquist row |ξ_i| = n/2.
    pub fn is_nyquist(&self, flat: usize) -> bool {
        let half = (self.n / 2) as i64;
        let m = self.mode(flat);
        m[0] == half || (self.dim == 2 && m[1] == half)
    }

    /// Flat index of a frequency vector, if it is representable.
    pub fn flat_of_mode(&self, mode: [i64; 2]) -> Option<usize> {
        let half = (self.n / 2) as i64;
        let wrap = |f: i64| -> Option<usize> {
            if f < -half + 1 || f > half {
                None
            } else {
                Some(((f + self.n as i64) % self.n as i64) as usize)
            }
        };
        let i0 = wrap(mode[0])?;
        match self.dim {
            1 => {
                if mode[1] != 0 {
                    None
                } else {
                    Some(i0)
                }
            }
            _ => {
                let i1 = wrap(mode[1])?;
                Some(i0 * self.n + i1)
            }
        }
    }

    /// Flat index of the conjugate mode −ξ.
    pub fn conj_index(&self, flat: usize) -> usize {
        let n = self.n;
        match self.dim {
            1 => (n - flat) % n,
            _ => {
                let (i0, i1) = (flat / n, flat % n);
                ((n - i0) % n) * n + (n - i1) % n
            }
        }
    }

    /// Largest |ξ| in the resolvable band (Nyquist excluded).
    pub fn max_mode_norm(&self) -> f64 {
        let m = (self.n / 2 - 1) as f64;
        (self.dim as f64).sqrt() * m
    }

    /// Physical coordinates of a flat sample index.
    pub fn coords(&self, flat: usize) -> [f64; 2] {
        let h = self.spacing();
        match self.dim {
            1 => [flat as f64 * h, 0.0],
            _ => [(flat / self.n) as f64 * h, (flat % self.n) as f64 * h],
        }
    }

    /// Signed min-image coordinates in [-1/2, 1/2)^d of a flat sample index.
    pub fn min_image(&self, flat: usize) -> [f64; 2] {
        let c = self.coords(flat);
        let fold = |x: f64| if x >= 0.5 { x - 1.0 } else { x };
        [fold(c[0]), fold(c[1])]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(matches!(Grid::new(1, 100), Err(Error::Config(_))));
        assert!(matches!(Grid::new(1, 4), Err(Error::Config(_))));
        assert!(matches!(Grid::new(3, 64), Err(Error::Config(_))));
        assert!(Grid::new(2, 64).is_ok());
    }

    #[test]
    fn frequency_layout() {
        let g = Grid::new(1, 8).unwrap();
        let freqs: Vec<i64> = (0..8).map(|i| g.freq(i)).collect();
        assert_eq!(freqs, vec![0, 1, 2, 3, 4, -3, -2, -1]);
        assert!(g.is_nyquist(4));
        assert!(!g.is_nyquist(3));
    }

    #[test]
    fn mode_round_trip_2d() {
        let g = Grid::new(2, 16).unwrap();
        for flat in 0..g.points() {
            let m = g.mode(flat);
            assert_eq!(g.flat_of_mode(m), Some(flat));
            let c = g.conj_index(flat);
            let mc = g.mode(c);
            // conj of non-Nyquist modes negates the frequency
            if !g.is_nyquist(flat) {
                assert_eq!([-m[0], -m[1]], mc);
            }
        }
    }
}
