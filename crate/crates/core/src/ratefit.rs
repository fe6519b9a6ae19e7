//! Log-log least-squares slope fits for scaling sweeps, with CSV export.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Values whose magnitude never exceeds this are treated as numerically zero;
/// a sweep of such values produces a degenerate (flagged) fit instead of NaN.
pub const DEGENERATE_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone)]
pub struct RateFit {
    /// (epsilon, value) pairs actually used by the fit.
    pub points: Vec<(f64, f64)>,
    /// Slope of log(value) against log(epsilon).
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Set when all values sit below [`DEGENERATE_FLOOR`]; slope fields are 0.
    pub degenerate: bool,
}

impl RateFit {
    /// Least-squares fit of ln v against ln ε.
    pub fn fit(eps: &[f64], values: &[f64]) -> Result<RateFit> {
        if eps.len() != values.len() {
            return Err(Error::Argument("epsilon/value length mismatch".into()));
        }
        if eps.len() < 2 {
            return Err(Error::Argument("rate fit needs at least two points".into()));
        }
        if eps.iter().any(|&e| e <= 0.0) {
            return Err(Error::Argument("epsilons must be positive".into()));
        }
        let points: Vec<(f64, f64)> = eps.iter().copied().zip(values.iter().copied()).collect();
        if values.iter().all(|v| v.abs() <= DEGENERATE_FLOOR) {
            return Ok(RateFit {
                points,
                slope: 0.0,
                intercept: 0.0,
                r_squared: 0.0,
                degenerate: true,
            });
        }
        let usable: Vec<(f64, f64)> = points
            .iter()
            .filter(|(_, v)| *v > DEGENERATE_FLOOR)
            .map(|&(e, v)| (e.ln(), v.ln()))
            .collect();
        if usable.len() < 2 {
            return Ok(RateFit {
                points,
                slope: 0.0,
                intercept: 0.0,
                r_squared: 0.0,
                degenerate: true,
            });
        }
        let n = usable.len() as f64;
        let mean_x = usable.iter().map(|p| p.0).sum::<f64>() / n;
        let mean_y = usable.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = usable.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
        let sxy: f64 = usable.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
        let syy: f64 = usable.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
        let slope = sxy / sxx;
        let intercept = mean_y - slope * mean_x;
        let ss_res: f64 = usable
            .iter()
            .map(|p| (p.1 - (intercept + slope * p.0)).powi(2))
            .sum();
        // flat data fits its own mean perfectly
        let r_squared = if syy <= 1e-30 { 1.0 } else { 1.0 - ss_res / syy };
        Ok(RateFit {
            points,
            slope,
            intercept,
            r_squared,
            degenerate: false,
        })
    }

    /// CSV rows `epsilon,value,log_eps,log_value` (natural log) followed by a
    /// `slope,intercept,r_squared` footer.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epsilon,value,log_eps,log_value\n");
        for (e, v) in &self.points {
            let (le, lv) = if *v > 0.0 {
                (e.ln().to_string(), v.ln().to_string())
            } else {
                (e.ln().to_string(), String::from("nan"))
            };
            out.push_str(&format!("{e},{v},{le},{lv}\n"));
        }
        out.push_str(&format!(
            "slope,{},intercept,{},r_squared,{}\n",
            self.slope, self.intercept, self.r_squared
        ));
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut file = std::fs::File::create(path)?;
        file.write_all(self.to_csv().as_bytes())?;
        Ok(())
    }
}

/// Dyadic sweep ε_k = 2^{−k} for k in `kmin..=kmax`.
pub fn dyadic_eps(kmin: u32, kmax: u32) -> Vec<f64> {
    (kmin..=kmax).map(|k| 2.0f64.powi(-(k as i32))).collect()
}

/// Validate a sweep: at least `min_points` values spanning `min_octaves`.
pub fn validate_sweep(eps: &[f64], min_points: usize, min_octaves: f64) -> Result<()> {
    if eps.len() < min_points {
        return Err(Error::Argument(format!(
            "sweep needs at least {min_points} epsilons, got {}",
            eps.len()
        )));
    }
    let max = eps.iter().copied().fold(f64::MIN, f64::max);
    let min = eps.iter().copied().fold(f64::MAX, f64::min);
    if min <= 0.0 {
        return Err(Error::Argument("epsilons must be positive".into()));
    }
    if (max / min).log2() < min_octaves {
        return Err(Error::Argument(format!(
            "sweep must span at least {min_octaves} octaves"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_power_law() {
        let eps = dyadic_eps(1, 6);
        let values: Vec<f64> = eps.iter().map(|e| 3.0 * e.powf(0.7)).collect();
        let fit = RateFit::fit(&eps, &values).unwrap();
        assert!((fit.slope - 0.7).abs() < 1e-12);
        assert!((fit.intercept - 3.0f64.ln()).abs() < 1e-12);
        assert!(fit.r_squared > 1.0 - 1e-12);
        assert!(!fit.degenerate);
    }

    #[test]
    fn degenerate_sweep_is_flagged() {
        let eps = dyadic_eps(1, 5);
        let values = vec![0.0; eps.len()];
        let fit = RateFit::fit(&eps, &values).unwrap();
        assert!(fit.degenerate);
        assert!(fit.slope == 0.0 && !fit.slope.is_nan());
    }

    #[test]
    fn csv_has_footer() {
        let eps = dyadic_eps(1, 3);
        let values = vec![1.0, 0.5, 0.25];
        let fit = RateFit::fit(&eps, &values).unwrap();
        let csv = fit.to_csv();
        assert!(csv.starts_with("epsilon,value,log_eps,log_value\n"));
        assert!(csv.lines().last().unwrap().starts_with("slope,"));
    }

    #[test]
    fn sweep_validation() {
        assert!(validate_sweep(&dyadic_eps(3, 9), 5, 2.0).is_ok());
        assert!(validate_sweep(&[0.5, 0.4, 0.3, 0.25, 0.2], 5, 2.0).is_err());
        assert!(validate_sweep(&dyadic_eps(3, 5), 5, 2.0).is_err());
    }
}
