//! Dyadic frequency decomposition: the radial cutoff ω, annular bump
//! φ(ξ) = ω(ξ/2) − ω(ξ), blocks Δ_k f = F^{-1}(φ(λ_k^{-1}ξ) f̂) with
//! λ_k = 2^k, exact reconstruction for mean-zero fields, and the block-side
//! Besov norm sup_k 2^{kα} ‖Δ_k f‖_{L^p}.
//!
//! On a finite grid the spectrum is finite, so the decomposition uses every
//! block whose annulus meets the resolvable band and the telescoping sum is
//! exact rather than truncated.

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::grid::Grid;
use crate::smooth::plateau;

/// Radial cutoff: 1 on |ξ| ≤ 1/2, 0 on |ξ| ≥ 1.
pub fn omega(r: f64) -> f64 {
    plateau(r)
}

/// Annular bump φ(r) = ω(r/2) − ω(r), supported on 1/2 ≤ r ≤ 2.
pub fn phi(r: f64) -> f64 {
    omega(r / 2.0) - omega(r)
}

/// Weight φ(|ξ|/2^k) applied by block k at radius `mode_norm`.
pub fn block_weight(mode_norm: f64, k: usize) -> f64 {
    phi(mode_norm / (1u64 << k) as f64)
}

/// Largest block index whose annulus [2^{k-1}, 2^{k+1}] intersects the
/// resolvable band; blocks 0..=K reconstruct every resolvable mode exactly.
pub fn max_block_index(grid: Grid) -> usize {
    let max_norm = grid.max_mode_norm();
    let mut k = 0usize;
    // need 2^K >= max |ξ| so that ω(ξ / 2^{K+1}) = 1 on the whole band
    while ((1u64 << k) as f64) < max_norm {
        k += 1;
    }
    k
}

/// Max over resolvable nonzero modes of |ω(ξ) + Σ_k φ(λ_k^{-1}ξ) − 1|.
pub fn partition_deviation(grid: Grid) -> f64 {
    let kmax = max_block_index(grid);
    let mut worst = 0.0f64;
    for flat in 1..grid.points() {
        if grid.is_nyquist(flat) {
            continue;
        }
        let r = grid.mode_norm(flat);
        let mut sum = omega(r);
        for k in 0..=kmax {
            sum += block_weight(r, k);
        }
        worst = worst.max((sum - 1.0).abs());
    }
    worst
}

fn source_checksum(f: &ScalarField) -> u64 {
    f.values()
        .iter()
        .fold(0xcbf29ce484222325u64, |acc, v| {
            (acc ^ v.to_bits()).wrapping_mul(0x100000001b3)
        })
}

/// One frequency-localized piece Δ_k f together with its provenance.
#[derive(Debug, Clone)]
pub struct DyadicBlock {
    pub k: usize,
    pub field: ScalarField,
    source: u64,
}

impl DyadicBlock {
    pub fn lambda(&self) -> f64 {
        (1u64 << self.k) as f64
    }
}

/// Ordered list of blocks of a single source field.
#[derive(Debug, Clone)]
pub struct DyadicDecomposition {
    grid: Grid,
    blocks: Vec<DyadicBlock>,
}

impl DyadicDecomposition {
    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn blocks(&self) -> &[DyadicBlock] {
        &self.blocks
    }

    /// Reassemble blocks produced elsewhere, refusing mixtures of sources.
    pub fn from_blocks(blocks: Vec<DyadicBlock>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::Argument("decomposition needs at least one block".into()));
        }
        let grid = blocks[0].field.grid();
        let source = blocks[0].source;
        for b in &blocks {
            if b.field.grid() != grid {
                return Err(Error::GridMismatch("blocks on different grids".into()));
            }
            if b.source != source {
                return Err(Error::Consistency(
                    "blocks do not originate from a single source field".into(),
                ));
            }
        }
        Ok(DyadicDecomposition { grid, blocks })
    }
}

/// Single block Δ_k f. Errors when the annulus of block k lies entirely
/// beyond the resolvable band.
pub fn dyadic_block(f: &ScalarField, k: usize) -> Result<ScalarField> {
    let grid = f.grid();
    if k > max_block_index(grid) {
        return Err(Error::Resolution(format!(
            "block {k} has no support on n = {} (max useful block {})",
            grid.n(),
            max_block_index(grid)
        )));
    }
    let mut out = f.radial_multiplier(|r| block_weight(r, k));
    // φ vanishes at the origin but pin the mean mode anyway
    let mut coeffs = out.coeffs().to_vec();
    coeffs[0] = num_complex::Complex64::new(0.0, 0.0);
    out = ScalarField::from_coeffs_unchecked(grid, coeffs);
    Ok(out)
}

/// All blocks 0..=K(grid) of `f`.
pub fn decompose(f: &ScalarField) -> Result<DyadicDecomposition> {
    let grid = f.grid();
    let source = source_checksum(f);
    let blocks = (0..=max_block_index(grid))
        .map(|k| {
            Ok(DyadicBlock {
                k,
                field: dyadic_block(f, k)?,
                source,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DyadicDecomposition { grid, blocks })
}

/// Σ_k Δ_k f; equals the source to machine precision for mean-zero fields.
pub fn reconstruct(dec: &DyadicDecomposition) -> Result<ScalarField> {
    let mut acc = ScalarField::zeros(dec.grid);
    for b in &dec.blocks {
        acc = acc.add(&b.field)?;
    }
    Ok(acc)
}

/// Block-side Besov norm report.
#[derive(Debug, Clone)]
pub struct BesovNorm {
    /// max_k 2^{kα} ‖Δ_k f‖_{L^p} over the resolvable blocks.
    pub value: f64,
    /// Block index attaining the max.
    pub argmax_k: usize,
    /// Set when α lies outside (0,1); the value is still computed.
    pub alpha_warning: bool,
    /// Per-block (k, λ_k, ‖Δ_k f‖_p, 2^{kα}‖Δ_k f‖_p).
    pub profile: Vec<(usize, f64, f64, f64)>,
}

impl BesovNorm {
    /// CSV rows `k,lambda_k,block_lp_norm,weighted_norm`.
    pub fn profile_csv(&self) -> String {
        let mut out = String::from("k,lambda_k,block_lp_norm,weighted_norm\n");
        for (k, lambda, norm, weighted) in &self.profile {
            out.push_str(&format!("{k},{lambda},{norm},{weighted}\n"));
        }
        out
    }
}

/// sup_k 2^{kα} ‖Δ_k f‖_{L^p} for mean-zero f.
pub fn besov_norm_lp(f: &ScalarField, alpha: f64, p: f64) -> Result<BesovNorm> {
    if !f.is_mean_zero() {
        return Err(Error::Precondition(
            "block Besov norm requires a mean-zero field".into(),
        ));
    }
    let alpha_warning = !(alpha > 0.0 && alpha < 1.0);
    let dec = decompose(f)?;
    let mut value = 0.0f64;
    let mut argmax_k = 0usize;
    let mut profile = Vec::with_capacity(dec.blocks.len());
    for b in &dec.blocks {
        let norm = b.field.lp_norm(p)?;
        let weighted = 2.0f64.powf(b.k as f64 * alpha) * norm;
        profile.push((b.k, b.lambda(), norm, weighted));
        if weighted > value {
            value = weighted;
            argmax_k = b.k;
        }
    }
    Ok(BesovNorm {
        value,
        argmax_k,
        alpha_warning,
        profile,
    })
}

/// Embedding diagnostic: ‖f‖ in the target space over ‖f‖ in the source
/// space, with target smoothness α − d(1/p1 − 1/p2).
#[derive(Debug, Clone)]
pub struct EmbeddingReport {
    pub source_norm: f64,
    pub target_norm: f64,
    pub target_alpha: f64,
    pub ratio: f64,
}

pub fn embedding_check(f: &ScalarField, p1: f64, p2: f64, alpha: f64) -> Result<EmbeddingReport> {
    if p1 > p2 {
        return Err(Error::Argument(format!(
            "embedding requires p1 <= p2, got {p1} > {p2}"
        )));
    }
    let d = f.grid().dim() as f64;
    let target_alpha = alpha - d * (1.0 / p1 - 1.0 / p2);
    let source = besov_norm_lp(f, alpha, p1)?.value;
    let target = besov_norm_lp(f, target_alpha, p2)?.value;
    let ratio = if source > 0.0 { target / source } else { 0.0 };
    Ok(EmbeddingReport {
        source_norm: source,
        target_norm: target,
        target_alpha,
        ratio,
    })
}

/// Linear fit of −log2 ‖Δ_k f‖_p against k over blocks carrying real content:
/// an estimator of the field's Besov regularity.
pub fn fit_block_regularity(f: &ScalarField, p: f64) -> Result<(f64, f64)> {
    let dec = decompose(f)?;
    let norms: Vec<(usize, f64)> = dec
        .blocks
        .iter()
        .map(|b| b.field.lp_norm(p).map(|n| (b.k, n)))
        .collect::<Result<Vec<_>>>()?;
    let floor = norms.iter().map(|(_, n)| *n).fold(0.0f64, f64::max) * 1e-10;
    let pts: Vec<(f64, f64)> = norms
        .iter()
        .filter(|(_, n)| *n > floor && *n > 0.0)
        .map(|(k, n)| (*k as f64, n.log2()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::Argument(
            "not enough active blocks to estimate regularity".into(),
        ));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let ss_res: f64 = pts
        .iter()
        .map(|p| (p.1 - (my + slope * (p.0 - mx))).powi(2))
        .sum();
    let r2 = if syy <= 1e-30 { 1.0 } else { 1.0 - ss_res / syy };
    Ok((-slope, r2))
}
