//! Fourier multiplier couplings u = T[θ]: û_c(ξ) = m_c(ξ) θ̂(ξ) on Z²\{0}.
//!
//! Built-in symbols:
//!   sqg             m(ξ) = i(−ξ₂, ξ₁)/|ξ|        divergence-free, |m| = 1
//!   ipm             m(ξ) = (ξ₁ξ₂, −ξ₁²)/|ξ|²     divergence-free, |m| ≤ 1
//!                   (gravity along −x₂)
//!   riesz_1/riesz_2 m_j(ξ) = −i ξ_j/|ξ|, other component 0 (not div-free)
//!   identity_vector m(ξ) = (1, 1)                 (not div-free)
//!
//! Symbols that are not divergence-free carry a warning flag; applying them
//! is allowed for diagnostics but the advection solver refuses them.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::grid::Grid;
use crate::littlewood_paley::besov_norm_lp;

#[derive(Debug, Clone)]
enum SymbolKind {
    Sqg,
    Ipm,
    Riesz(usize),
    IdentityVector,
    Table(Arc<HashMap<[i64; 2], [Complex64; 2]>>),
}

#[derive(Debug, Clone)]
pub struct MultiplierSymbol {
    name: String,
    kind: SymbolKind,
    // evaluated tables cached per grid size
    cache: Arc<Mutex<HashMap<usize, Arc<EvaluatedSymbol>>>>,
}

/// Builtin symbols factor as m(ξ) = s(ξ)·v(ξ) with an integer vector v, so
/// algebraic identities like ξ·m = s·(ξ·v) can be checked in exact integer
/// arithmetic.
fn builtin_factored(kind: &SymbolKind, xi: [i64; 2]) -> Option<(Complex64, [i64; 2])> {
    let norm_sq = (xi[0] * xi[0] + xi[1] * xi[1]) as f64;
    if norm_sq == 0.0 {
        return Some((Complex64::new(0.0, 0.0), [0, 0]));
    }
    match kind {
        SymbolKind::Sqg => Some((
            Complex64::new(0.0, 1.0 / norm_sq.sqrt()),
            [-xi[1], xi[0]],
        )),
        SymbolKind::Ipm => Some((
            Complex64::new(1.0 / norm_sq, 0.0),
            [xi[0] * xi[1], -xi[0] * xi[0]],
        )),
        SymbolKind::Riesz(j) => {
            let mut v = [0i64, 0];
            v[*j] = xi[*j];
            Some((Complex64::new(0.0, -1.0 / norm_sq.sqrt()), v))
        }
        SymbolKind::IdentityVector => Some((Complex64::new(1.0, 0.0), [1, 1])),
        SymbolKind::Table(_) => None,
    }
}

fn builtin_value(kind: &SymbolKind, xi: [i64; 2]) -> Option<[Complex64; 2]> {
    if let Some((s, v)) = builtin_factored(kind, xi) {
        return Some([s * v[0] as f64, s * v[1] as f64]);
    }
    match kind {
        SymbolKind::Table(t) => t.get(&xi).copied(),
        _ => unreachable!("builtin kinds are always factored"),
    }
}

impl MultiplierSymbol {
    pub fn builtin(name: &str) -> Result<Self> {
        let kind = match name {
            "sqg" => SymbolKind::Sqg,
            "ipm" => SymbolKind::Ipm,
            "riesz_1" => SymbolKind::Riesz(0),
            "riesz_2" => SymbolKind::Riesz(1),
            "identity_vector" => SymbolKind::IdentityVector,
            other => {
                return Err(Error::Argument(format!(
                    "unknown symbol '{other}' (expected sqg, ipm, riesz_1, riesz_2, identity_vector)"
                )))
            }
        };
        Ok(MultiplierSymbol {
            name: name.to_string(),
            kind,
            cache: Arc::new(Mutex::new(HashMap::new())),
        })
    }

    /// Build from explicit (ξ, m(ξ)) rows with automatic Hermitian completion:
    /// missing −ξ entries become conjugates, conflicting ones are rejected.
    pub fn from_table(name: &str, rows: &[([i64; 2], [Complex64; 2])]) -> Result<Self> {
        let mut table: HashMap<[i64; 2], [Complex64; 2]> = HashMap::new();
        for (xi, m) in rows {
            if *xi == [0, 0] {
                return Err(Error::Symbol("symbols are defined on Z^2 \\ {0}".into()));
            }
            if let Some(prev) = table.get(xi) {
                if (prev[0] - m[0]).norm() > 1e-12 || (prev[1] - m[1]).norm() > 1e-12 {
                    return Err(Error::Symbol(format!("conflicting entries at ξ = {xi:?}")));
                }
                continue;
            }
            table.insert(*xi, *m);
        }
        let keys: Vec<[i64; 2]> = table.keys().copied().collect();
        for xi in keys {
            let neg = [-xi[0], -xi[1]];
            let conj = {
                let m = table[&xi];
                [m[0].conj(), m[1].conj()]
            };
            match table.get(&neg) {
                None => {
                    table.insert(neg, conj);
                }
                Some(existing) => {
                    if (existing[0] - conj[0]).norm() > 1e-12
                        || (existing[1] - conj[1]).norm() > 1e-12
                    {
                        return Err(Error::Symbol(format!(
                            "entries at ±{xi:?} violate Hermitian symmetry"
                        )));
                    }
                }
            }
        }
        Ok(MultiplierSymbol {
            name: name.to_string(),
            kind: SymbolKind::Table(Arc::new(table)),
            cache: Arc::new(Mutex::new(HashMap::new())),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Symbol value at a frequency, `None` if undefined (table symbols only).
    pub fn eval(&self, xi: [i64; 2]) -> Option<[Complex64; 2]> {
        if xi == [0, 0] {
            return Some([Complex64::new(0.0, 0.0); 2]);
        }
        builtin_value(&self.kind, xi)
    }

    /// Evaluate (and cache) the symbol on the resolvable modes of a grid.
    pub fn on_grid(&self, grid: Grid) -> Result<Arc<EvaluatedSymbol>> {
        if grid.dim() != 2 {
            return Err(Error::Argument("multiplier symbols act on d = 2 grids".into()));
        }
        let mut cache = self.cache.lock().unwrap();
        if let Some(hit) = cache.get(&grid.n()) {
            return Ok(hit.clone());
        }
        let mut table = vec![[Complex64::new(0.0, 0.0); 2]; grid.points()];
        let mut defined = vec![true; grid.points()];
        for flat in 1..grid.points() {
            if grid.is_nyquist(flat) {
                continue; // outside the resolvable band; modes stay zeroed
            }
            match self.eval(grid.mode(flat)) {
                Some(m) => table[flat] = m,
                None => defined[flat] = false,
            }
        }
        let eval = Arc::new(EvaluatedSymbol {
            grid,
            name: self.name.clone(),
            table,
            defined,
        });
        cache.insert(grid.n(), eval.clone());
        Ok(eval)
    }

    /// max_ξ |ξ·m(ξ)| over the resolvable band. Builtin symbols contract
    /// ξ·m through their exact integer factorization, so divergence-free
    /// builtins report exactly 0.
    pub fn divergence_defect(&self, grid: Grid) -> Result<f64> {
        if grid.dim() != 2 {
            return Err(Error::Argument("multiplier symbols act on d = 2 grids".into()));
        }
        let eval = self.on_grid(grid)?;
        let mut worst = 0.0f64;
        for flat in 1..grid.points() {
            if grid.is_nyquist(flat) || !eval.defined[flat] {
                continue;
            }
            let xi = grid.mode(flat);
            let defect = match builtin_factored(&self.kind, xi) {
                Some((s, v)) => s.norm() * (xi[0] * v[0] + xi[1] * v[1]).abs() as f64,
                None => {
                    let m = eval.table[flat];
                    (m[0] * xi[0] as f64 + m[1] * xi[1] as f64).norm()
                }
            };
            worst = worst.max(defect);
        }
        Ok(worst)
    }

    pub fn is_divergence_free(&self, grid: Grid) -> Result<bool> {
        let defect = self.divergence_defect(grid)?;
        let sup = self.sup_abs(grid)?;
        Ok(defect <= 1e-12 * sup.max(1e-300) * grid.n() as f64)
    }

    /// max_ξ |m(ξ)| over the resolvable band.
    pub fn sup_abs(&self, grid: Grid) -> Result<f64> {
        let eval = self.on_grid(grid)?;
        let mut sup = 0.0f64;
        for flat in 1..grid.points() {
            if grid.is_nyquist(flat) || !eval.defined[flat] {
                continue;
            }
            let m = eval.table[flat];
            sup = sup.max((m[0].norm_sqr() + m[1].norm_sqr()).sqrt());
        }
        Ok(sup)
    }

    /// max_ξ |m(−ξ) − conj m(ξ)|; 0 means real inputs map to real outputs.
    pub fn reality_defect(&self, grid: Grid) -> Result<f64> {
        let eval = self.on_grid(grid)?;
        let mut worst = 0.0f64;
        for flat in 1..grid.points() {
            if grid.is_nyquist(flat) || !eval.defined[flat] {
                continue;
            }
            let partner = grid.conj_index(flat);
            if !eval.defined[partner] {
                continue;
            }
            let a = eval.table[flat];
            let b = eval.table[partner];
            worst = worst.max((b[0] - a[0].conj()).norm().max((b[1] - a[1].conj()).norm()));
        }
        Ok(worst)
    }

    /// CSV rows `xi1,xi2,re_m1,im_m1,re_m2,im_m2` over the resolvable band.
    pub fn to_csv(&self, grid: Grid) -> Result<String> {
        let eval = self.on_grid(grid)?;
        let mut out = String::from("xi1,xi2,re_m1,im_m1,re_m2,im_m2\n");
        for flat in 1..grid.points() {
            if grid.is_nyquist(flat) || !eval.defined[flat] {
                continue;
            }
            let xi = grid.mode(flat);
            let m = eval.table[flat];
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                xi[0], xi[1], m[0].re, m[0].im, m[1].re, m[1].im
            ));
        }
        Ok(out)
    }

    /// Parse the CSV schema written by [`to_csv`].
    pub fn from_csv(name: &str, csv: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (idx, line) in csv.lines().enumerate() {
            if idx == 0 || line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 6 {
                return Err(Error::Symbol(format!(
                    "symbol CSV line {} has {} columns, expected 6",
                    idx + 1,
                    cols.len()
                )));
            }
            let parse = |s: &str| -> Result<f64> {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Symbol(format!("bad number '{s}': {e}")))
            };
            let xi = [
                cols[0]
                    .trim()
                    .parse::<i64>()
                    .map_err(|e| Error::Symbol(format!("bad frequency '{}': {e}", cols[0])))?,
                cols[1]
                    .trim()
                    .parse::<i64>()
                    .map_err(|e| Error::Symbol(format!("bad frequency '{}': {e}", cols[1])))?,
            ];
            rows.push((
                xi,
                [
                    Complex64::new(parse(cols[2])?, parse(cols[3])?),
                    Complex64::new(parse(cols[4])?, parse(cols[5])?),
                ],
            ));
        }
        MultiplierSymbol::from_table(name, &rows)
    }
}

/// A symbol evaluated on the modes of one grid.
#[derive(Debug)]
pub struct EvaluatedSymbol {
    grid: Grid,
    name: String,
    table: Vec<[Complex64; 2]>,
    defined: Vec<bool>,
}

impl EvaluatedSymbol {
    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// u = T[θ]: componentwise coefficient products.
    pub fn apply(&self, theta: &ScalarField) -> Result<VectorField> {
        if theta.grid() != self.grid {
            return Err(Error::GridMismatch("field and symbol grids differ".into()));
        }
        if !theta.is_mean_zero() {
            return Err(Error::Precondition(
                "multiplier couplings act on mean-zero fields".into(),
            ));
        }
        let coeffs = theta.coeffs();
        // undefined symbol entries only matter where the field has content
        let scale = coeffs.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
        for flat in 1..self.grid.points() {
            if !self.defined[flat] && coeffs[flat].norm() > 1e-13 * scale.max(1e-300) {
                return Err(Error::Symbol(format!(
                    "symbol '{}' undefined at resolvable mode {:?}",
                    self.name,
                    self.grid.mode(flat)
                )));
            }
        }
        let comps = (0..2)
            .map(|c| {
                let out: Vec<Complex64> = (0..self.grid.points())
                    .map(|flat| {
                        if self.grid.is_nyquist(flat) {
                            Complex64::new(0.0, 0.0)
                        } else {
                            coeffs[flat] * self.table[flat][c]
                        }
                    })
                    .collect();
                ScalarField::from_coeffs_unchecked(self.grid, out)
            })
            .collect();
        VectorField::from_components(comps)
    }
}

/// u = T[θ] with a per-call symbol evaluation (cached inside the symbol).
pub fn apply_multiplier(symbol: &MultiplierSymbol, theta: &ScalarField) -> Result<VectorField> {
    symbol.on_grid(theta.grid())?.apply(theta)
}

/// Empirical operator-norm report over a field family.
#[derive(Debug, Clone)]
pub struct BoundednessReport {
    /// Per-field max over components of ‖T f‖_{Ḃ}/‖f‖_{Ḃ}.
    pub besov_ratios: Vec<f64>,
    /// Per-field max over components of ‖(Tf)_c‖_{L^p}/‖f‖_{L^p}.
    pub lp_ratios: Vec<f64>,
    pub max_besov_ratio: f64,
    pub max_lp_ratio: f64,
    /// Members skipped because their norms vanished.
    pub skipped: usize,
}

pub fn boundedness_check(
    symbol: &MultiplierSymbol,
    p: f64,
    alpha: f64,
    family: &[ScalarField],
) -> Result<BoundednessReport> {
    if family.is_empty() {
        return Err(Error::Argument("empty field family".into()));
    }
    let mut besov_ratios = Vec::new();
    let mut lp_ratios = Vec::new();
    let mut skipped = 0usize;
    for f in family {
        let bf = besov_norm_lp(f, alpha, p)?.value;
        let lf = f.lp_norm(p)?;
        if bf <= 1e-14 || lf <= 1e-14 {
            skipped += 1;
            continue;
        }
        let u = apply_multiplier(symbol, f)?;
        let mut rb = 0.0f64;
        let mut rl = 0.0f64;
        for c in u.components() {
            rb = rb.max(besov_norm_lp(c, alpha, p)?.value / bf);
            rl = rl.max(c.lp_norm(p)? / lf);
        }
        besov_ratios.push(rb);
        lp_ratios.push(rl);
    }
    let max_besov_ratio = besov_ratios.iter().copied().fold(0.0, f64::max);
    let max_lp_ratio = lp_ratios.iter().copied().fold(0.0, f64::max);
    Ok(BoundednessReport {
        besov_ratios,
        lp_ratios,
        max_besov_ratio,
        max_lp_ratio,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::littlewood_paley::dyadic_block;
    use crate::mollifier::Mollifier;
    use crate::synth;
    use std::f64::consts::PI;

    fn grid() -> Grid {
        Grid::new(2, 64).unwrap()
    }

    #[test]
    fn builtin_symbol_values() {
        let sqg = MultiplierSymbol::builtin("sqg").unwrap();
        let m = sqg.eval([1, 0]).unwrap();
        assert!((m[0] - Complex64::new(0.0, 0.0)).norm() < 1e-15);
        assert!((m[1] - Complex64::new(0.0, 1.0)).norm() < 1e-15);

        let ipm = MultiplierSymbol::builtin("ipm").unwrap();
        let m = ipm.eval([0, 1]).unwrap();
        assert_eq!(m[0], Complex64::new(0.0, 0.0));
        assert_eq!(m[1], Complex64::new(0.0, 0.0));

        assert!(matches!(
            MultiplierSymbol::builtin("navier"),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn builtin_invariants_on_grid() {
        let g = grid();
        for name in ["sqg", "ipm"] {
            let sym = MultiplierSymbol::builtin(name).unwrap();
            assert_eq!(sym.divergence_defect(g).unwrap(), 0.0, "{name} div");
            assert!(sym.reality_defect(g).unwrap() <= 1e-15, "{name} reality");
            assert!(sym.sup_abs(g).unwrap() <= 1.0 + 1e-12, "{name} bound");
            assert!(sym.is_divergence_free(g).unwrap());
        }
        for name in ["riesz_1", "riesz_2", "identity_vector"] {
            let sym = MultiplierSymbol::builtin(name).unwrap();
            assert!(!sym.is_divergence_free(g).unwrap(), "{name} must flag");
        }
    }

    #[test]
    fn zero_field_maps_to_zero() {
        let g = grid();
        let sqg = MultiplierSymbol::builtin("sqg").unwrap();
        let u = apply_multiplier(&sqg, &ScalarField::zeros(g)).unwrap();
        assert_eq!(u.max_abs(), 0.0);
    }

    #[test]
    fn sqg_single_mode_hand_computation() {
        // θ = cos(2πx₁) → u = (0, −sin(2πx₁))
        let g = grid();
        let theta = synth::single_mode(g, [1, 0], 1.0).unwrap();
        let u = apply_multiplier(&MultiplierSymbol::builtin("sqg").unwrap(), &theta).unwrap();
        assert_eq!(u.component(0).max_abs(), 0.0, "u₁ must vanish identically");
        let expect = ScalarField::from_fn(g, |x| -(2.0 * PI * x[0]).sin());
        let err = u.component(1).sub(&expect).unwrap().max_abs();
        assert!(err < 1e-12, "u₂ error {err}");
        assert!(u.is_divergence_free());
    }

    #[test]
    fn output_is_real() {
        let g = grid();
        let theta = synth::random_band_limited(g, 20, 3).unwrap();
        for name in ["sqg", "ipm"] {
            let u = apply_multiplier(&MultiplierSymbol::builtin(name).unwrap(), &theta).unwrap();
            // reality shows up as Hermitian coefficient tables; values are
            // produced through the real inverse transform, so check the
            // synthesized coefficients instead
            for c in u.components() {
                let rebuilt = ScalarField::from_values(g, c.values().to_vec()).unwrap();
                let err: f64 = rebuilt
                    .coeffs()
                    .iter()
                    .zip(c.coeffs())
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max);
                assert!(err <= 1e-12 * c.max_abs().max(1e-300));
            }
        }
    }

    #[test]
    fn mean_nonzero_rejected() {
        let g = grid();
        let theta = ScalarField::constant(g, 1.0);
        assert!(matches!(
            apply_multiplier(&MultiplierSymbol::builtin("sqg").unwrap(), &theta),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn commutes_with_mollification_and_blocks() {
        let g = grid();
        let theta = synth::random_band_limited(g, 20, 9).unwrap();
        let sqg = MultiplierSymbol::builtin("sqg").unwrap();
        let m = Mollifier::build(g, 0.1).unwrap();

        let a = apply_multiplier(&sqg, &m.apply(&theta).unwrap()).unwrap();
        let b = m
            .apply_vector(&apply_multiplier(&sqg, &theta).unwrap())
            .unwrap();
        let scale = b.max_abs().max(1e-300);
        for c in 0..2 {
            let err = a.component(c).sub(b.component(c)).unwrap().max_abs();
            assert!(err <= 1e-12 * scale, "mollification commutation {err}");
        }

        let k = 3usize;
        let a = apply_multiplier(&sqg, &dyadic_block(&theta, k).unwrap()).unwrap();
        let full = apply_multiplier(&sqg, &theta).unwrap();
        for c in 0..2 {
            let b = dyadic_block(full.component(c), k).unwrap();
            let err = a.component(c).sub(&b).unwrap().max_abs();
            assert!(err <= 1e-12 * scale, "block commutation {err}");
        }
    }

    #[test]
    fn boundedness_identity_and_sqg() {
        let g = grid();
        let ident = MultiplierSymbol::builtin("identity_vector").unwrap();
        let f = synth::lacunary(g, 0.5, 4, 0).unwrap();
        let rep = boundedness_check(&ident, 3.0, 0.5, &[f.clone()]).unwrap();
        assert!((rep.max_besov_ratio - 1.0).abs() < 1e-12);
        assert!((rep.max_lp_ratio - 1.0).abs() < 1e-12);

        let sqg = MultiplierSymbol::builtin("sqg").unwrap();
        let mode = synth::single_mode(g, [4, 0], 1.0).unwrap();
        let rep = boundedness_check(&sqg, 3.0, 0.5, &[mode]).unwrap();
        // |m| = 1 and a single mode maps to a single sinusoid: ratio 1
        assert!((rep.max_besov_ratio - 1.0).abs() < 1e-10, "{}", rep.max_besov_ratio);

        let family: Vec<ScalarField> = (0..10)
            .map(|seed| synth::lacunary(g, 0.5, 4, seed).unwrap())
            .collect();
        let rep = boundedness_check(&sqg, 3.0, 0.5, &family).unwrap();
        assert!(rep.max_besov_ratio <= 4.0, "family ratio {}", rep.max_besov_ratio);
        assert_eq!(rep.skipped, 0);
    }

    #[test]
    fn zero_member_skipped() {
        let g = grid();
        let family = vec![ScalarField::zeros(g), synth::lacunary(g, 0.5, 3, 1).unwrap()];
        let rep = boundedness_check(
            &MultiplierSymbol::builtin("sqg").unwrap(),
            3.0,
            0.5,
            &family,
        )
        .unwrap();
        assert_eq!(rep.skipped, 1);
        assert_eq!(rep.besov_ratios.len(), 1);
    }

    #[test]
    fn table_symbols_round_trip_and_complete() {
        let rows = vec![(
            [1i64, 0i64],
            [Complex64::new(0.0, 0.5), Complex64::new(0.25, -0.25)],
        )];
        let sym = MultiplierSymbol::from_table("custom", &rows).unwrap();
        // Hermitian completion provides −ξ
        let m = sym.eval([-1, 0]).unwrap();
        assert!((m[0] - Complex64::new(0.0, -0.5)).norm() < 1e-15);

        let g = grid();
        let csv_sqg = MultiplierSymbol::builtin("sqg").unwrap().to_csv(g).unwrap();
        let back = MultiplierSymbol::from_csv("sqg_copy", &csv_sqg).unwrap();
        let theta = synth::random_band_limited(g, 10, 2).unwrap();
        let a = apply_multiplier(&MultiplierSymbol::builtin("sqg").unwrap(), &theta).unwrap();
        let b = apply_multiplier(&back, &theta).unwrap();
        for c in 0..2 {
            let err = a.component(c).sub(b.component(c)).unwrap().max_abs();
            assert!(err <= 1e-10 * a.max_abs().max(1e-300));
        }
    }

    #[test]
    fn undefined_mode_is_an_error_only_when_hit() {
        let rows = vec![(
            [1i64, 0i64],
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        )];
        let sym = MultiplierSymbol::from_table("sparse", &rows).unwrap();
        let g = grid();
        // field supported on the defined mode: fine
        let ok_field = synth::single_mode(g, [1, 0], 1.0).unwrap();
        assert!(apply_multiplier(&sym, &ok_field).is_ok());
        // field with content at undefined modes: symbol error
        let bad_field = synth::single_mode(g, [2, 0], 1.0).unwrap();
        assert!(matches!(
            apply_multiplier(&sym, &bad_field),
            Err(Error::Symbol(_))
        ));
    }

    #[test]
    fn conflicting_table_rejected() {
        let rows = vec![
            (
                [1i64, 0i64],
                [Complex64::new(0.0, 0.5), Complex64::new(0.0, 0.0)],
            ),
            (
                [-1i64, 0i64],
                [Complex64::new(7.0, 0.0), Complex64::new(0.0, 0.0)],
            ),
        ];
        assert!(matches!(
            MultiplierSymbol::from_table("bad", &rows),
            Err(Error::Symbol(_))
        ));
    }
}
