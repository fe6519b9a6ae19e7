//! Commutator residual diagnostics for renormalized transport.
//!
//! For a scalar/velocity pair (θ, u) and mollification scale ε, the residual
//!
//!   R^ε = ∫∫ div_x(θ^ε u^ε − (θu)^ε) · z|θ^ε|^{z−1} sgn θ^ε · φ dx dt
//!
//! measures the chain-rule defect of |θ|^z under mollified transport. The
//! commutator splits pointwise as C = P − Q with
//!
//!   P = (θ^ε − θ)(u^ε − u),
//!   Q(x) = ∫ η^ε(y) [θ(x−y) − θ(x)] [u(x−y) − u(x)] dy
//!        = (θu)^ε − θ u^ε − u θ^ε + θu,
//!
//! and integrating by parts splits R^ε into four terms: the P/Q parts paired
//! against the test-function gradient (I1, J1) and against the gradient of
//! the renormalization weight (I2, J2). Gradients of sampled weight fields
//! are spectral, so I1 + I2 + J1 + J2 telescopes back to R^ε up to the
//! floating-point difference between C and P − Q; the weight-gradient terms
//! absorb the discrete product-rule remainder when a spatial factor χ is
//! present.
//!
//! Weak residuals F(z) = −∫∫ |θ|^z (∂_tφ + u·∇φ) dx dt and their mollified
//! counterparts F_ε(z) vanish for renormalized solutions; time quadrature is
//! the rectangle rule on the trajectory's uniform samples with ∂_tφ taken
//! from the closed-form bump derivative.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fft;
use crate::field::{ScalarField, VectorField};
use crate::grid::Grid;
use crate::mollifier::Mollifier;
use crate::ratefit::RateFit;
use crate::renorm::{RenormPower, TestFunction};
use crate::spacetime::SpaceTimeField;

/// θ^ε u^ε − (θu)^ε, componentwise.
pub fn commutator_field(theta: &ScalarField, u: &VectorField, eps: f64) -> Result<VectorField> {
    if theta.grid() != u.grid() {
        return Err(Error::GridMismatch("scalar and velocity grids differ".into()));
    }
    let m = Mollifier::build(theta.grid(), eps)?;
    let theta_eps = m.apply(theta)?;
    let comps = u
        .components()
        .iter()
        .map(|uc| {
            let smooth_product = theta_eps.mul_pointwise(&m.apply(uc)?)?;
            let product_smooth = m.apply(&theta.mul_pointwise(uc)?)?;
            smooth_product.sub(&product_smooth)
        })
        .collect::<Result<Vec<_>>>()?;
    VectorField::from_components(comps)
}

fn complex_gradient(grid: Grid, g: &[Complex64]) -> Vec<Vec<Complex64>> {
    let coeffs = fft::forward_complex(grid, g);
    let half = (grid.n() / 2) as i64;
    (0..grid.dim())
        .map(|axis| {
            let d: Vec<Complex64> = (0..coeffs.len())
                .map(|flat| {
                    let xi = grid.mode(flat)[axis];
                    if xi == half {
                        Complex64::new(0.0, 0.0)
                    } else {
                        Complex64::new(0.0, 2.0 * PI * xi as f64) * coeffs[flat]
                    }
                })
                .collect();
            fft::inverse_complex(grid, &d)
        })
        .collect()
}

/// The four split terms; `sum()` reproduces the residual.
#[derive(Debug, Clone, Copy)]
pub struct ResidualSplit {
    pub i1: Complex64,
    pub i2: Complex64,
    pub j1: Complex64,
    pub j2: Complex64,
}

impl ResidualSplit {
    pub fn sum(&self) -> Complex64 {
        self.i1 + self.i2 + self.j1 + self.j2
    }
}

struct SpatialParts {
    r: Complex64,
    i1: Complex64,
    i2: Complex64,
    j1: Complex64,
    j2: Complex64,
}

/// Everything that depends on (θ, u, ε, z) but not on time.
fn spatial_parts(
    theta: &ScalarField,
    u: &VectorField,
    moll: &Mollifier,
    power: RenormPower,
    chi: Option<&ScalarField>,
) -> Result<SpatialParts> {
    let grid = theta.grid();
    let npts = grid.points() as f64;
    let theta_eps = moll.apply(theta)?;
    let u_eps = moll.apply_vector(u)?;

    // weight field w = z|θ^ε|^{z-1} sgn θ^ε and G = wχ
    let w: Vec<Complex64> = theta_eps.values().iter().map(|&v| power.weight(v)).collect();
    let g: Vec<Complex64> = match chi {
        None => w.clone(),
        Some(c) => w.iter().zip(c.values()).map(|(wv, &cv)| wv * cv).collect(),
    };
    let grad_g = complex_gradient(grid, &g);
    let dchi: Option<Vec<ScalarField>> = match chi {
        None => None,
        Some(c) => Some(
            (0..grid.dim())
                .map(|axis| c.derivative(axis))
                .collect::<Result<Vec<_>>>()?,
        ),
    };

    let mut i1 = Complex64::new(0.0, 0.0);
    let mut i2 = Complex64::new(0.0, 0.0);
    let mut j1 = Complex64::new(0.0, 0.0);
    let mut j2 = Complex64::new(0.0, 0.0);

    let mut div_c = ScalarField::zeros(grid);
    for (axis, uc) in u.components().iter().enumerate() {
        let uc_eps = &u_eps.components()[axis];
        let c_axis = theta_eps
            .mul_pointwise(uc_eps)?
            .sub(&moll.apply(&theta.mul_pointwise(uc)?)?)?;
        div_c = div_c.add(&c_axis.derivative(axis)?)?;

        // P and Q components for the split
        let p_axis = theta_eps
            .sub(theta)?
            .mul_pointwise(&uc_eps.sub(uc)?)?;
        let q_axis = {
            let a = moll.apply(&theta.mul_pointwise(uc)?)?;
            let b = theta.mul_pointwise(uc_eps)?;
            let c = uc.mul_pointwise(&theta_eps)?;
            let d = theta.mul_pointwise(uc)?;
            a.sub(&b)?.sub(&c)?.add(&d)?
        };

        let gamma_axis: Vec<Complex64> = match &dchi {
            None => grad_g[axis].clone(),
            Some(dc) => grad_g[axis]
                .iter()
                .zip(w.iter())
                .zip(dc[axis].values())
                .map(|((gg, wv), &dv)| gg - wv * dv)
                .collect(),
        };

        let pv = p_axis.values();
        let qv = q_axis.values();
        let mut acc_i1 = Complex64::new(0.0, 0.0);
        let mut acc_i2 = Complex64::new(0.0, 0.0);
        let mut acc_j1 = Complex64::new(0.0, 0.0);
        let mut acc_j2 = Complex64::new(0.0, 0.0);
        if let Some(dc) = &dchi {
            let dv = dc[axis].values();
            for j in 0..grid.points() {
                let wd = w[j] * dv[j];
                acc_i1 += pv[j] * wd;
                acc_j1 += qv[j] * wd;
            }
        }
        for j in 0..grid.points() {
            acc_i2 += pv[j] * gamma_axis[j];
            acc_j2 += qv[j] * gamma_axis[j];
        }
        i1 -= acc_i1 / npts;
        i2 -= acc_i2 / npts;
        j1 += acc_j1 / npts;
        j2 += acc_j2 / npts;
    }

    let dv = div_c.values();
    let mut acc_r = Complex64::new(0.0, 0.0);
    for j in 0..grid.points() {
        acc_r += dv[j] * g[j];
    }
    let r = acc_r / npts;

    Ok(SpatialParts { r, i1, i2, j1, j2 })
}

fn check_residual_preconditions(
    stf: &SpaceTimeField,
    eps: f64,
    z: Complex64,
    phi: &TestFunction,
) -> Result<()> {
    if z.re <= 1.0 {
        return Err(Error::Precondition(format!(
            "renormalization weight needs Re z > 1, got {}",
            z.re
        )));
    }
    if eps > phi.margin() {
        return Err(Error::SupportMargin(format!(
            "mollification scale {eps} exceeds the test-function margin {}",
            phi.margin()
        )));
    }
    if !stf.has_velocity() {
        return Err(Error::Precondition(
            "residuals need velocity snapshots attached to the trajectory".into(),
        ));
    }
    if let Some(chi) = phi.chi() {
        if chi.grid() != stf.grid() {
            return Err(Error::GridMismatch("spatial test factor on wrong grid".into()));
        }
    }
    Ok(())
}

/// Rectangle-rule weight of snapshot i under ψ.
fn time_weights(stf: &SpaceTimeField, phi: &TestFunction) -> Vec<f64> {
    let dt = stf.dt();
    stf.times().iter().map(|&t| phi.psi(t) * dt).collect()
}

fn time_aggregate<T>(
    stf: &SpaceTimeField,
    phi: &TestFunction,
    mut per_snapshot: impl FnMut(usize) -> Result<T>,
    scale_add: impl Fn(&mut T, f64, &T),
    zero: T,
) -> Result<T>
where
    T: Clone,
{
    let weights = time_weights(stf, phi);
    let mut acc = zero;
    if stf.is_frozen() {
        let part = per_snapshot(0)?;
        let total: f64 = weights.iter().sum();
        scale_add(&mut acc, total, &part);
        return Ok(acc);
    }
    for (i, &wt) in weights.iter().enumerate() {
        if wt == 0.0 {
            continue;
        }
        let part = per_snapshot(i)?;
        scale_add(&mut acc, wt, &part);
    }
    Ok(acc)
}

/// Space-time residual R^ε for one (ε, z).
pub fn residual_r(
    stf: &SpaceTimeField,
    eps: f64,
    z: Complex64,
    phi: &TestFunction,
) -> Result<Complex64> {
    Ok(residual_parts(stf, eps, z, phi)?.0)
}

/// The I1/I2/J1/J2 split of R^ε.
pub fn residual_split(
    stf: &SpaceTimeField,
    eps: f64,
    z: Complex64,
    phi: &TestFunction,
) -> Result<ResidualSplit> {
    Ok(residual_parts(stf, eps, z, phi)?.1)
}

/// Residual and split in one pass.
pub fn residual_parts(
    stf: &SpaceTimeField,
    eps: f64,
    z: Complex64,
    phi: &TestFunction,
) -> Result<(Complex64, ResidualSplit)> {
    check_residual_preconditions(stf, eps, z, phi)?;
    let moll = Mollifier::build(stf.grid(), eps)?;
    let power = RenormPower::new(z);
    let zero = (
        Complex64::new(0.0, 0.0),
        ResidualSplit {
            i1: Complex64::new(0.0, 0.0),
            i2: Complex64::new(0.0, 0.0),
            j1: Complex64::new(0.0, 0.0),
            j2: Complex64::new(0.0, 0.0),
        },
    );
    time_aggregate(
        stf,
        phi,
        |i| {
            let parts = spatial_parts(
                stf.theta(i),
                stf.velocity(i).expect("velocity checked"),
                &moll,
                power,
                phi.chi(),
            )?;
            Ok((
                parts.r,
                ResidualSplit {
                    i1: parts.i1,
                    i2: parts.i2,
                    j1: parts.j1,
                    j2: parts.j2,
                },
            ))
        },
        |acc, wt, part| {
            acc.0 += wt * part.0;
            acc.1.i1 += wt * part.1.i1;
            acc.1.i2 += wt * part.1.i2;
            acc.1.j1 += wt * part.1.j1;
            acc.1.j2 += wt * part.1.j2;
        },
        zero,
    )
}

/// F(z) = −∫∫ |θ|^z (∂_tφ + u·∇φ) dx dt.
///
/// With χ ≡ 1 the advective part vanishes identically and no velocity
/// snapshots are needed.
pub fn weak_residual(stf: &SpaceTimeField, z: Complex64, phi: &TestFunction) -> Result<Complex64> {
    weak_residual_impl(stf, None, z, phi)
}

/// F_ε(z): the weak residual of the mollified pair (θ^ε, u^ε).
pub fn mollified_weak_residual(
    stf: &SpaceTimeField,
    eps: f64,
    z: Complex64,
    phi: &TestFunction,
) -> Result<Complex64> {
    if eps > phi.margin() {
        return Err(Error::SupportMargin(format!(
            "mollification scale {eps} exceeds the test-function margin {}",
            phi.margin()
        )));
    }
    let moll = Mollifier::build(stf.grid(), eps)?;
    weak_residual_impl(stf, Some(&moll), z, phi)
}

fn weak_residual_impl(
    stf: &SpaceTimeField,
    moll: Option<&Mollifier>,
    z: Complex64,
    phi: &TestFunction,
) -> Result<Complex64> {
    if let Some(chi) = phi.chi() {
        if chi.grid() != stf.grid() {
            return Err(Error::GridMismatch("spatial test factor on wrong grid".into()));
        }
        if !stf.has_velocity() {
            return Err(Error::Precondition(
                "weak residual with non-constant χ needs velocity snapshots".into(),
            ));
        }
    }
    let power = RenormPower::new(z);
    let grid = stf.grid();
    let npts = grid.points() as f64;
    let dt = stf.dt();
    let grad_chi: Option<Vec<ScalarField>> = match phi.chi() {
        None => None,
        Some(c) => Some(
            (0..grid.dim())
                .map(|axis| c.derivative(axis))
                .collect::<Result<Vec<_>>>()?,
        ),
    };

    // per-snapshot spatial integrals: a = ∫|θ|^z χ dx, b = ∫|θ|^z u·∇χ dx
    let spatial = |i: usize| -> Result<(Complex64, Complex64)> {
        let theta = match moll {
            None => stf.theta(i).clone(),
            Some(m) => m.apply(stf.theta(i))?,
        };
        let pw: Vec<Complex64> = theta.values().iter().map(|&v| power.power(v)).collect();
        let mut a = Complex64::new(0.0, 0.0);
        match phi.chi() {
            None => {
                for p in &pw {
                    a += p;
                }
            }
            Some(c) => {
                for (p, &cv) in pw.iter().zip(c.values()) {
                    a += p * cv;
                }
            }
        }
        a /= npts;
        let mut b = Complex64::new(0.0, 0.0);
        if let Some(dchi) = &grad_chi {
            let u = stf.velocity(i).expect("velocity checked");
            let u = match moll {
                None => u.clone(),
                Some(m) => m.apply_vector(u)?,
            };
            for (axis, dc) in dchi.iter().enumerate() {
                let uv = u.components()[axis].values();
                for j in 0..grid.points() {
                    b += pw[j] * (uv[j] * dc.values()[j]);
                }
            }
            b /= npts;
        }
        Ok((a, b))
    };

    let mut total = Complex64::new(0.0, 0.0);
    if stf.is_frozen() {
        let (a, b) = spatial(0)?;
        let sum_dpsi: f64 = stf.times().iter().map(|&t| phi.psi_prime(t)).sum::<f64>() * dt;
        let sum_psi: f64 = stf.times().iter().map(|&t| phi.psi(t)).sum::<f64>() * dt;
        total = -(a * sum_dpsi + b * sum_psi);
    } else {
        for (i, &t) in stf.times().iter().enumerate() {
            let (dpsi, psi) = (phi.psi_prime(t), phi.psi(t));
            if dpsi == 0.0 && psi == 0.0 {
                continue;
            }
            let (a, b) = spatial(i)?;
            total -= dt * (a * dpsi + b * psi);
        }
    }
    Ok(total)
}

/// Time series of ∫|θ(t)|^r dx per requested exponent, with max relative drift.
#[derive(Debug, Clone)]
pub struct ConservationReport {
    pub times: Vec<f64>,
    pub exponents: Vec<f64>,
    /// `series[ri][ti]` = ∫ |θ(t_i)|^{r_ri} dx.
    pub series: Vec<Vec<f64>>,
    pub max_rel_drift: Vec<f64>,
}

impl ConservationReport {
    /// CSV rows `t,r,lr_norm_to_r` in time-major order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,r,lr_norm_to_r\n");
        for (ti, t) in self.times.iter().enumerate() {
            for (ri, r) in self.exponents.iter().enumerate() {
                out.push_str(&format!("{t},{r},{}\n", self.series[ri][ti]));
            }
        }
        out
    }
}

pub fn conservation_report(stf: &SpaceTimeField, r_list: &[f64]) -> Result<ConservationReport> {
    if r_list.iter().any(|&r| r < 1.0) {
        return Err(Error::Argument("conservation exponents must satisfy r >= 1".into()));
    }
    let npts = stf.grid().points() as f64;
    let mut series = vec![Vec::with_capacity(stf.len()); r_list.len()];
    for i in 0..stf.len() {
        let vals = stf.theta(i).values();
        for (ri, &r) in r_list.iter().enumerate() {
            let total: f64 = if r == 2.0 {
                vals.iter().map(|v| v * v).sum()
            } else if r == 3.0 {
                vals.iter().map(|v| v.abs().powi(3)).sum()
            } else {
                vals.iter().map(|v| v.abs().powf(r)).sum()
            };
            series[ri].push(total / npts);
        }
    }
    let max_rel_drift = series
        .iter()
        .map(|s| {
            let base = s[0];
            let denom = base.abs().max(1e-300);
            s.iter().map(|v| (v - base).abs() / denom).fold(0.0, f64::max)
        })
        .collect();
    Ok(ConservationReport {
        times: stf.times().to_vec(),
        exponents: r_list.to_vec(),
        series,
        max_rel_drift,
    })
}

/// One sweep evaluation at (ε, z).
#[derive(Debug, Clone, Copy)]
pub struct SweepPoint {
    pub eps: f64,
    pub z: Complex64,
    pub abs_r: f64,
    pub i1: f64,
    pub i2: f64,
    pub j1: f64,
    pub j2: f64,
    pub abs_f_eps: f64,
    /// |I1+I2+J1+J2 − R| / |R|.
    pub split_defect_rel: f64,
}

/// Fit summary for one z across the ε sweep.
#[derive(Debug, Clone, Serialize)]
pub struct FitSummary {
    pub re_z: f64,
    pub im_z: f64,
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub predicted_exponent: Option<f64>,
    pub pass: Option<bool>,
}

/// Known regularity of the pair, used to predict the decay exponent
/// 2α + β − 1 − d(Re z − 2)/p.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExponentPrediction {
    pub alpha: f64,
    pub beta: f64,
    pub p: f64,
}

impl ExponentPrediction {
    pub fn exponent(&self, dim: usize, z: Complex64) -> f64 {
        2.0 * self.alpha + self.beta - 1.0 - dim as f64 * (z.re - 2.0) / self.p
    }
}

#[derive(Debug, Clone)]
pub struct ResidualSweep {
    pub points: Vec<SweepPoint>,
    pub fits: Vec<FitSummary>,
}

impl ResidualSweep {
    /// CSV rows `eps,re_z,im_z,abs_R,I1,I2,J1,J2,abs_F_eps`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("eps,re_z,im_z,abs_R,I1,I2,J1,J2,abs_F_eps\n");
        for p in &self.points {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                p.eps, p.z.re, p.z.im, p.abs_r, p.i1, p.i2, p.j1, p.j2, p.abs_f_eps
            ));
        }
        out
    }
}

/// Evaluate R^ε, its split, and F_ε over an (ε, z) sweep and fit |R^ε|
/// against ε per z.
pub fn residual_sweep(
    stf: &SpaceTimeField,
    eps_list: &[f64],
    z_list: &[Complex64],
    phi: &TestFunction,
    prediction: Option<ExponentPrediction>,
) -> Result<ResidualSweep> {
    crate::ratefit::validate_sweep(eps_list, 3, 1.0)?;
    let mut points = Vec::new();
    let mut fits = Vec::new();
    for &z in z_list {
        let mut abs_rs = Vec::with_capacity(eps_list.len());
        for &eps in eps_list {
            let (r, split) = residual_parts(stf, eps, z, phi)?;
            let f_eps = mollified_weak_residual(stf, eps, z, phi)?;
            let defect = (split.sum() - r).norm() / r.norm().max(1e-300);
            points.push(SweepPoint {
                eps,
                z,
                abs_r: r.norm(),
                i1: split.i1.norm(),
                i2: split.i2.norm(),
                j1: split.j1.norm(),
                j2: split.j2.norm(),
                abs_f_eps: f_eps.norm(),
                split_defect_rel: defect,
            });
            abs_rs.push(r.norm());
        }
        let fit = RateFit::fit(eps_list, &abs_rs)?;
        fits.push(FitSummary {
            re_z: z.re,
            im_z: z.im,
            slope: fit.slope,
            intercept: fit.intercept,
            r2: fit.r_squared,
            predicted_exponent: prediction.map(|p| p.exponent(stf.grid().dim(), z)),
            pass: None,
        });
    }
    Ok(ResidualSweep { points, fits })
}
