//! Pseudospectral advection: ∂_tθ + u·∇θ = 0 with u = T[θ] (active mode) or
//! u prescribed (passive mode), classical RK4 in time, 2/3-rule dealiasing on
//! the quadratic product, optional hyperviscosity for under-resolution
//! studies.
//!
//! With dealiasing on, the semi-discrete system is the spectral Galerkin
//! truncation; for divergence-free u it conserves ∫θ² exactly in continuous
//! time, so the recorded L² drift isolates the RK4 time-integration error.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::grid::Grid;
use crate::multiplier::MultiplierSymbol;
use crate::spacetime::SpaceTimeField;

#[derive(Debug, Clone)]
pub enum Coupling {
    /// u = T[θ], recomputed at every integrator stage.
    Active(MultiplierSymbol),
    /// Fixed prescribed velocity field.
    Prescribed(VectorField),
    /// Spatially uniform velocity (exact transport generator).
    Uniform(Vec<f64>),
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub grid: Grid,
    pub coupling: Coupling,
    pub dt: f64,
    pub t_end: f64,
    /// 2/3-rule dealiasing of the advective product; must be on in active mode.
    pub dealias: bool,
    /// Hyperviscosity coefficient ν ≥ 0 (0 disables) of order `hyper_order`.
    pub nu: f64,
    pub hyper_order: u32,
    /// Steps between stored snapshots.
    pub snapshot_stride: usize,
    /// Exponents r for the per-step norm series ∫|θ|^r.
    pub norm_exponents: Vec<f64>,
    /// Attach velocity snapshots to the trajectory.
    pub store_velocity: bool,
}

impl SolverConfig {
    pub fn new(grid: Grid, coupling: Coupling) -> Self {
        SolverConfig {
            grid,
            coupling,
            dt: 1e-3,
            t_end: 1.0,
            dealias: true,
            nu: 0.0,
            hyper_order: 2,
            snapshot_stride: 10,
            norm_exponents: vec![1.5, 2.0, 3.0, 4.0],
            store_velocity: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.t_end > 0.0) {
            return Err(Error::Config("dt and t_end must be positive".into()));
        }
        if self.nu < 0.0 {
            return Err(Error::Config("hyperviscosity must be nonnegative".into()));
        }
        if self.snapshot_stride == 0 {
            return Err(Error::Config("snapshot stride must be positive".into()));
        }
        match &self.coupling {
            Coupling::Active(symbol) => {
                if !self.dealias {
                    return Err(Error::Config(
                        "dealiasing must stay on when the coupling is active".into(),
                    ));
                }
                if !symbol.is_divergence_free(self.grid)? {
                    return Err(Error::Config(format!(
                        "active coupling refuses non-divergence-free symbol '{}'",
                        symbol.name()
                    )));
                }
            }
            Coupling::Prescribed(u) => {
                if u.grid() != self.grid {
                    return Err(Error::GridMismatch("prescribed velocity on wrong grid".into()));
                }
            }
            Coupling::Uniform(c) => {
                if c.len() != self.grid.dim() {
                    return Err(Error::Config("uniform velocity length must equal dim".into()));
                }
            }
        }
        Ok(())
    }
}

/// Per-run context: evaluated symbol, dealias mask, hyperviscosity table.
struct StepContext<'a> {
    cfg: &'a SolverConfig,
    symbol: Option<std::sync::Arc<crate::multiplier::EvaluatedSymbol>>,
    mask: Option<Vec<bool>>,
    hyper: Option<Vec<f64>>,
}

impl<'a> StepContext<'a> {
    fn new(cfg: &'a SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let symbol = match &cfg.coupling {
            Coupling::Active(s) => Some(s.on_grid(cfg.grid)?),
            _ => None,
        };
        let mask = if cfg.dealias {
            let cut = (cfg.grid.n() / 3) as i64;
            Some(
                (0..cfg.grid.points())
                    .map(|flat| {
                        let m = cfg.grid.mode(flat);
                        m[0].abs() <= cut && m[1].abs() <= cut
                    })
                    .collect(),
            )
        } else {
            None
        };
        let hyper = if cfg.nu > 0.0 {
            let order = cfg.hyper_order as i32;
            Some(
                (0..cfg.grid.points())
                    .map(|flat| {
                        let k2 = {
                            let m = cfg.grid.mode(flat);
                            (m[0] * m[0] + m[1] * m[1]) as f64
                        };
                        cfg.nu * (4.0 * std::f64::consts::PI * std::f64::consts::PI * k2).powi(order)
                    })
                    .collect(),
            )
        } else {
            None
        };
        Ok(StepContext {
            cfg,
            symbol,
            mask,
            hyper,
        })
    }

    fn truncate(&self, f: &ScalarField) -> ScalarField {
        match &self.mask {
            None => f.clone(),
            Some(mask) => {
                let coeffs: Vec<Complex64> = f
                    .coeffs()
                    .iter()
                    .zip(mask)
                    .map(|(c, &keep)| if keep { *c } else { Complex64::new(0.0, 0.0) })
                    .collect();
                ScalarField::from_coeffs_unchecked(f.grid(), coeffs)
            }
        }
    }

    fn velocity(&self, theta: &ScalarField) -> Result<VectorField> {
        match &self.cfg.coupling {
            Coupling::Active(_) => self.symbol.as_ref().unwrap().apply(theta),
            Coupling::Prescribed(u) => Ok(u.clone()),
            Coupling::Uniform(c) => VectorField::uniform(self.cfg.grid, c),
        }
    }

    /// −u·∇θ (dealiased) − ν(−Δ)^order θ, projected onto mean zero.
    fn rhs(&self, theta: &ScalarField) -> Result<ScalarField> {
        let theta = self.truncate(theta);
        let u = self.velocity(&theta)?;
        let grid = self.cfg.grid;
        let mut advect = vec![0.0; grid.points()];
        for axis in 0..grid.dim() {
            let du = theta.derivative(axis)?;
            let uc = self.truncate(&u.components()[axis]);
            for ((a, &uv), &dv) in advect.iter_mut().zip(uc.values()).zip(du.values()) {
                *a += uv * dv;
            }
        }
        let product = ScalarField::from_values(grid, advect)?;
        let mut coeffs = self.truncate(&product).coeffs().to_vec();
        for (flat, c) in coeffs.iter_mut().enumerate() {
            *c = -*c;
            if let Some(h) = &self.hyper {
                *c -= h[flat] * theta.coeffs()[flat];
            }
        }
        coeffs[0] = Complex64::new(0.0, 0.0); // advection of mean-zero data stays mean-zero
        Ok(ScalarField::from_coeffs_unchecked(grid, coeffs))
    }

    /// CFL number dt·max|u|·n of the current state.
    fn cfl(&self, theta: &ScalarField) -> Result<f64> {
        let u = self.velocity(&self.truncate(theta))?;
        Ok(self.cfg.dt * u.max_abs() * self.cfg.grid.n() as f64)
    }

    fn step(&self, theta: &ScalarField, step_index: usize) -> Result<ScalarField> {
        let cfl = self.cfl(theta)?;
        if cfl >= 2.0 {
            return Err(Error::Cfl(format!(
                "dt·max|u|·n = {cfl:.3} >= 2 at step {step_index}"
            )));
        }
        let dt = self.cfg.dt;
        // stage combinations in coefficient space: the zero mode of every
        // stage is exactly zero, so the mean is conserved to the last bit
        let combine = |base: &ScalarField, terms: &[(f64, &ScalarField)]| -> ScalarField {
            let mut coeffs = base.coeffs().to_vec();
            for (w, f) in terms {
                for (c, k) in coeffs.iter_mut().zip(f.coeffs()) {
                    *c += *w * k;
                }
            }
            ScalarField::from_coeffs_unchecked(base.grid(), coeffs)
        };
        let k1 = self.rhs(theta)?;
        let k2 = self.rhs(&combine(theta, &[(dt / 2.0, &k1)]))?;
        let k3 = self.rhs(&combine(theta, &[(dt / 2.0, &k2)]))?;
        let k4 = self.rhs(&combine(theta, &[(dt, &k3)]))?;
        let out = combine(
            theta,
            &[
                (dt / 6.0, &k1),
                (dt / 3.0, &k2),
                (dt / 3.0, &k3),
                (dt / 6.0, &k4),
            ],
        );
        if out.values().iter().any(|v| !v.is_finite()) {
            return Err(Error::Blowup {
                step: step_index,
                detail: "non-finite field values after RK4 stage".into(),
            });
        }
        Ok(out)
    }
}

/// One evaluation of the advection right-hand side.
pub fn advect_rhs(theta: &ScalarField, config: &SolverConfig) -> Result<ScalarField> {
    StepContext::new(config)?.rhs(theta)
}

/// One RK4 step (velocity recomputed at each stage in active mode).
pub fn step_rk4(theta: &ScalarField, config: &SolverConfig) -> Result<ScalarField> {
    StepContext::new(config)?.step(theta, 0)
}

/// Norm series t ↦ ∫|θ(t)|^r recorded at every accepted step.
#[derive(Debug, Clone)]
pub struct NormSeries {
    pub times: Vec<f64>,
    pub exponents: Vec<f64>,
    /// `values[ri][ti]`.
    pub values: Vec<Vec<f64>>,
}

impl NormSeries {
    pub fn max_rel_drift(&self, r: f64) -> Option<f64> {
        let ri = self.exponents.iter().position(|&e| e == r)?;
        let base = self.values[ri][0];
        let denom = base.abs().max(1e-300);
        Some(
            self.values[ri]
                .iter()
                .map(|v| (v - base).abs() / denom)
                .fold(0.0, f64::max),
        )
    }

    /// CSV rows `t,r,lr_norm_to_r`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,r,lr_norm_to_r\n");
        for (ti, t) in self.times.iter().enumerate() {
            for (ri, r) in self.exponents.iter().enumerate() {
                out.push_str(&format!("{t},{r},{}\n", self.values[ri][ti]));
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct BlowupInfo {
    pub step: usize,
    pub detail: String,
}

/// Everything a run produces. On blow-up the partial trajectory up to the
/// failure is returned with `blowup` set.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub trajectory: SpaceTimeField,
    pub norms: NormSeries,
    pub warnings: Vec<String>,
    pub blowup: Option<BlowupInfo>,
}

fn record_norms(series: &mut NormSeries, t: f64, theta: &ScalarField) {
    let npts = theta.grid().points() as f64;
    let vals = theta.values();
    series.times.push(t);
    for (ri, &r) in series.exponents.clone().iter().enumerate() {
        let total: f64 = if r == 2.0 {
            vals.iter().map(|v| v * v).sum()
        } else if r == 3.0 {
            vals.iter().map(|v| v.abs().powi(3)).sum()
        } else if r == 4.0 {
            vals.iter().map(|v| v.powi(4)).sum()
        } else {
            vals.iter().map(|v| v.abs().powf(r)).sum()
        };
        series.values[ri].push(total / npts);
    }
}

/// Integrate from `theta0` to `t_end`, storing snapshots every
/// `snapshot_stride` steps.
pub fn run(theta0: &ScalarField, config: &SolverConfig) -> Result<RunReport> {
    let ctx = StepContext::new(config)?;
    if theta0.grid() != config.grid {
        return Err(Error::GridMismatch("initial data on wrong grid".into()));
    }
    if !theta0.is_mean_zero() {
        return Err(Error::Precondition("initial data must be mean-zero".into()));
    }
    let steps = (config.t_end / config.dt).round() as usize;
    if steps == 0 {
        return Err(Error::Config("t_end shorter than one step".into()));
    }
    let mut theta = ctx.truncate(theta0);
    {
        // pin the zero mode so conservation of the mean is exact
        let mut coeffs = theta.coeffs().to_vec();
        coeffs[0] = Complex64::new(0.0, 0.0);
        theta = ScalarField::from_coeffs_unchecked(config.grid, coeffs);
    }
    let mut warnings = Vec::new();
    let mut norms = NormSeries {
        times: Vec::new(),
        exponents: config.norm_exponents.clone(),
        values: vec![Vec::new(); config.norm_exponents.len()],
    };
    let mut snap_times = Vec::new();
    let mut snap_thetas = Vec::new();
    let mut snap_us: Option<Vec<VectorField>> = config.store_velocity.then(Vec::new);

    let snapshot = |t: f64,
                    theta: &ScalarField,
                    times: &mut Vec<f64>,
                    thetas: &mut Vec<ScalarField>,
                    us: &mut Option<Vec<VectorField>>|
     -> Result<()> {
        times.push(t);
        thetas.push(theta.clone());
        if let Some(store) = us {
            store.push(ctx.velocity(theta)?);
        }
        Ok(())
    };

    record_norms(&mut norms, 0.0, &theta);
    snapshot(0.0, &theta, &mut snap_times, &mut snap_thetas, &mut snap_us)?;

    let mut blowup = None;
    let mut warned_cfl = false;
    for step_index in 1..=steps {
        if !warned_cfl {
            let cfl = ctx.cfl(&theta)?;
            if cfl >= 0.5 && cfl < 2.0 {
                warnings.push(format!(
                    "advisory: CFL number {cfl:.3} >= 0.5 at step {step_index}"
                ));
                warned_cfl = true;
            }
        }
        match ctx.step(&theta, step_index) {
            Ok(next) => theta = next,
            Err(Error::Blowup { step, detail }) => {
                blowup = Some(BlowupInfo { step, detail });
                break;
            }
            Err(Error::Cfl(msg)) => {
                blowup = Some(BlowupInfo {
                    step: step_index,
                    detail: msg,
                });
                break;
            }
            Err(e) => return Err(e),
        }
        let t = step_index as f64 * config.dt;
        record_norms(&mut norms, t, &theta);
        if step_index % config.snapshot_stride == 0 {
            snapshot(t, &theta, &mut snap_times, &mut snap_thetas, &mut snap_us)?;
        }
    }

    // a partial trajectory still needs two snapshots to be a trajectory
    if snap_times.len() < 2 {
        let t = snap_times[0] + config.dt * config.snapshot_stride as f64;
        snapshot(t, &theta, &mut snap_times, &mut snap_thetas, &mut snap_us)?;
    }
    let trajectory = SpaceTimeField::from_samples(snap_times, snap_thetas, snap_us)?;
    Ok(RunReport {
        trajectory,
        norms,
        warnings,
        blowup,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;
    use std::f64::consts::PI;

    fn sqg_config(n: usize) -> SolverConfig {
        let grid = Grid::new(2, n).unwrap();
        SolverConfig::new(
            grid,
            Coupling::Active(MultiplierSymbol::builtin("sqg").unwrap()),
        )
    }

    #[test]
    fn single_mode_sqg_is_steady() {
        let cfg = sqg_config(64);
        let theta = synth::single_mode(cfg.grid, [1, 0], 1.0).unwrap();
        let rhs = advect_rhs(&theta, &cfg).unwrap();
        assert!(rhs.max_abs() <= 1e-14, "steady-state rhs {}", rhs.max_abs());

        let mut state = theta.clone();
        let mut cfg100 = cfg.clone();
        cfg100.dt = 1e-3;
        for _ in 0..100 {
            state = step_rk4(&state, &cfg100).unwrap();
        }
        let drift = state.sub(&theta).unwrap().max_abs();
        assert!(drift <= 1e-8, "steady-state drift {drift}");
    }

    #[test]
    fn zero_velocity_zero_rhs() {
        let g = Grid::new(2, 32).unwrap();
        let mut cfg = SolverConfig::new(g, Coupling::Uniform(vec![0.0, 0.0]));
        cfg.nu = 0.0;
        let theta = synth::random_band_limited(g, 8, 1).unwrap();
        assert_eq!(advect_rhs(&theta, &cfg).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn uniform_transport_is_exact_translation() {
        let g = Grid::new(1, 128).unwrap();
        let mut cfg = SolverConfig::new(g, Coupling::Uniform(vec![1.0]));
        cfg.dt = 5e-4;
        cfg.t_end = 0.5;
        cfg.snapshot_stride = 200;
        let theta0 = synth::random_band_limited(g, 3, 2).unwrap();

        // rhs is the exact translation generator −c ∂₁θ
        let rhs = advect_rhs(&theta0, &cfg).unwrap();
        let expect = theta0.derivative(0).unwrap().scaled(-1.0);
        assert!(rhs.sub(&expect).unwrap().max_abs() <= 1e-12 * expect.max_abs());

        let report = run(&theta0, &cfg).unwrap();
        assert!(report.blowup.is_none());
        let t = report.trajectory.t_end();
        // spectral phase-shift oracle: θ(t, x) = θ₀(x − ct)
        let shifted_coeffs: Vec<Complex64> = (0..g.points())
            .map(|flat| {
                let xi = g.mode(flat)[0] as f64;
                theta0.coeffs()[flat] * Complex64::from_polar(1.0, -2.0 * PI * xi * t)
            })
            .collect();
        let oracle = ScalarField::from_coeffs_unchecked(g, shifted_coeffs);
        let last = report.trajectory.theta(report.trajectory.len() - 1);
        let err = last.sub(&oracle).unwrap().max_abs();
        assert!(err <= 1e-8, "transport error {err}");
    }

    #[test]
    fn zero_field_stays_zero() {
        let cfg = sqg_config(32);
        let report = run(&ScalarField::zeros(cfg.grid), &cfg).unwrap();
        assert!(report.blowup.is_none());
        let last = report.trajectory.theta(report.trajectory.len() - 1);
        assert_eq!(last.max_abs(), 0.0);
    }

    #[test]
    fn mean_stays_zero_exactly() {
        let cfg = {
            let mut c = sqg_config(64);
            c.dt = 1e-3;
            c.t_end = 0.05;
            c
        };
        let theta0 = synth::smooth_random(cfg.grid, 8, 1.0, 3).unwrap();
        let report = run(&theta0, &cfg).unwrap();
        for i in 0..report.trajectory.len() {
            assert_eq!(report.trajectory.theta(i).coeffs()[0].norm(), 0.0);
        }
    }

    #[test]
    fn cfl_hard_violation() {
        let g = Grid::new(1, 128).unwrap();
        let mut cfg = SolverConfig::new(g, Coupling::Uniform(vec![100.0]));
        cfg.dt = 1.0;
        let theta = synth::single_mode(g, [1, 0], 1.0).unwrap();
        assert!(matches!(step_rk4(&theta, &cfg), Err(Error::Cfl(_))));
    }

    #[test]
    fn explicit_diffusion_instability_is_caught() {
        let g = Grid::new(1, 64).unwrap();
        let mut cfg = SolverConfig::new(g, Coupling::Uniform(vec![0.0]));
        cfg.nu = 1e9;
        cfg.hyper_order = 2;
        cfg.dt = 1e-2;
        cfg.t_end = 1.0;
        let theta = synth::single_mode(g, [8, 0], 1.0).unwrap();
        let report = run(&theta, &cfg).unwrap();
        let info = report.blowup.expect("run must blow up");
        assert!(info.step >= 1);
        // the partial trajectory is still usable for diagnosis
        assert!(report.trajectory.len() >= 2);
    }

    #[test]
    fn hyperviscosity_dissipates_energy() {
        let g = Grid::new(2, 32).unwrap();
        let mut cfg = SolverConfig::new(g, Coupling::Uniform(vec![0.0, 0.0]));
        cfg.nu = 1e-4;
        cfg.hyper_order = 1;
        cfg.dt = 1e-3;
        cfg.t_end = 0.2;
        let theta0 = synth::smooth_random(g, 8, 1.0, 4).unwrap();
        let report = run(&theta0, &cfg).unwrap();
        let ri = report.norms.exponents.iter().position(|&r| r == 2.0).unwrap();
        let series = &report.norms.values[ri];
        for w in series.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-12), "energy must not grow");
        }
        assert!(series.last().unwrap() < &(series[0] * 0.999));
    }

    #[test]
    fn active_mode_refuses_non_divergence_free_symbols() {
        let g = Grid::new(2, 32).unwrap();
        let cfg = SolverConfig::new(
            g,
            Coupling::Active(MultiplierSymbol::builtin("riesz_1").unwrap()),
        );
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));

        let mut cfg2 = sqg_config(32);
        cfg2.dealias = false;
        assert!(matches!(cfg2.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn conservation_well_resolved_sqg() {
        let mut cfg = sqg_config(128);
        cfg.dt = 1e-3;
        cfg.t_end = 0.25;
        cfg.snapshot_stride = 50;
        let theta0 = synth::smooth_random(cfg.grid, 8, 1.0, 7).unwrap();
        let report = run(&theta0, &cfg).unwrap();
        assert!(report.blowup.is_none());
        let d2 = report.norms.max_rel_drift(2.0).unwrap();
        let d3 = report.norms.max_rel_drift(3.0).unwrap();
        assert!(d2 <= 1e-9, "L² drift {d2}");
        assert!(d3 <= 1e-7, "L³ drift {d3}");
    }

    #[test]
    fn fourth_order_in_time() {
        let mut cfg = sqg_config(64);
        cfg.t_end = 0.25;
        cfg.snapshot_stride = 1000;
        let theta0 = synth::smooth_random(cfg.grid, 8, 3.0, 11).unwrap();
        let mut drifts = Vec::new();
        let dts = [2e-3, 1e-3];
        for &dt in &dts {
            cfg.dt = dt;
            let report = run(&theta0, &cfg).unwrap();
            drifts.push(report.norms.max_rel_drift(2.0).unwrap());
        }
        let order = (drifts[0] / drifts[1]).log2();
        assert!(
            (3.0..5.0).contains(&order),
            "halving dt gave order {order} (drifts {drifts:?})"
        );
    }
}
