//! Uniformly sampled space-time fields: either frozen (one snapshot standing
//! for all times, for pathwise estimate sweeps) or genuine trajectories from
//! the solver. Snapshots are immutable once stored.

use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::grid::Grid;

#[derive(Debug, Clone)]
pub struct SpaceTimeField {
    times: Vec<f64>,
    thetas: Vec<ScalarField>,
    velocities: Option<Vec<VectorField>>,
    frozen: bool,
}

impl SpaceTimeField {
    /// Time-constant field sampled at `samples + 1` uniform times on [0, t_end].
    pub fn frozen(
        theta: ScalarField,
        velocity: Option<VectorField>,
        t_end: f64,
        samples: usize,
    ) -> Result<Self> {
        if !(t_end > 0.0) || samples == 0 {
            return Err(Error::Argument("frozen field needs t_end > 0 and samples > 0".into()));
        }
        if let Some(u) = &velocity {
            if u.grid() != theta.grid() {
                return Err(Error::GridMismatch("velocity grid differs from scalar grid".into()));
            }
        }
        let dt = t_end / samples as f64;
        let times = (0..=samples).map(|i| i as f64 * dt).collect();
        Ok(SpaceTimeField {
            times,
            thetas: vec![theta],
            velocities: velocity.map(|u| vec![u]),
            frozen: true,
        })
    }

    /// Trajectory from explicit uniform samples.
    pub fn from_samples(
        times: Vec<f64>,
        thetas: Vec<ScalarField>,
        velocities: Option<Vec<VectorField>>,
    ) -> Result<Self> {
        if times.len() < 2 || times.len() != thetas.len() {
            return Err(Error::Argument(
                "trajectory needs matching times and snapshots (at least two)".into(),
            ));
        }
        let dt = times[1] - times[0];
        if dt <= 0.0 {
            return Err(Error::Argument("times must increase".into()));
        }
        for w in times.windows(2) {
            if ((w[1] - w[0]) - dt).abs() > 1e-9 * dt {
                return Err(Error::Argument("time samples must be uniform".into()));
            }
        }
        let grid = thetas[0].grid();
        for t in &thetas {
            if t.grid() != grid {
                return Err(Error::GridMismatch("snapshots on different grids".into()));
            }
        }
        if let Some(us) = &velocities {
            if us.len() != thetas.len() {
                return Err(Error::Argument("velocity snapshot count mismatch".into()));
            }
            for u in us {
                if u.grid() != grid {
                    return Err(Error::GridMismatch("velocity snapshots on different grids".into()));
                }
            }
        }
        Ok(SpaceTimeField {
            times,
            thetas,
            velocities,
            frozen: false,
        })
    }

    pub fn grid(&self) -> Grid {
        self.thetas[0].grid()
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dt(&self) -> f64 {
        self.times[1] - self.times[0]
    }

    pub fn t_end(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn theta(&self, i: usize) -> &ScalarField {
        if self.frozen {
            &self.thetas[0]
        } else {
            &self.thetas[i]
        }
    }

    pub fn velocity(&self, i: usize) -> Option<&VectorField> {
        self.velocities.as_ref().map(|us| {
            if self.frozen {
                &us[0]
            } else {
                &us[i]
            }
        })
    }

    pub fn has_velocity(&self) -> bool {
        self.velocities.is_some()
    }
}
