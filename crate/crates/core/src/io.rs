//! On-disk formats.
//!
//! Field files are a pair `<stem>.json` + `<stem>.bin` (or `<stem>.csv`):
//! the JSON header is `{"dim": d, "n": n, "mean_zero": bool}` and the data
//! holds the real samples in row-major order, either little-endian f64
//! (binary) or one CSV line per grid row with shortest-round-trip decimal
//! formatting. Both round-trip losslessly at double precision.
//!
//! A trajectory store is a directory with `manifest.json` (config echo,
//! snapshot times, norm series, file list), one field file pair per
//! snapshot, and `norms.csv` with rows `t,r,lr_norm_to_r`.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::grid::Grid;
use crate::solver::RunReport;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldHeader {
    pub dim: usize,
    pub n: usize,
    pub mean_zero: bool,
}

fn header_of(field: &ScalarField) -> FieldHeader {
    FieldHeader {
        dim: field.grid().dim(),
        n: field.grid().n(),
        mean_zero: field.is_mean_zero(),
    }
}

/// Write `<stem>.json` + `<stem>.bin` (little-endian f64, row-major).
pub fn write_field_binary(stem: &Path, field: &ScalarField) -> Result<()> {
    let header = header_of(field);
    fs::write(
        stem.with_extension("json"),
        serde_json::to_string_pretty(&header)?,
    )?;
    let mut bytes = Vec::with_capacity(field.values().len() * 8);
    for v in field.values() {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(stem.with_extension("bin"), bytes)?;
    Ok(())
}

/// Write `<stem>.json` + `<stem>.csv` (one line per grid row).
pub fn write_field_csv(stem: &Path, field: &ScalarField) -> Result<()> {
    let header = header_of(field);
    fs::write(
        stem.with_extension("json"),
        serde_json::to_string_pretty(&header)?,
    )?;
    let n = field.grid().n();
    let rows = if field.grid().dim() == 1 { 1 } else { n };
    let mut out = String::new();
    for r in 0..rows {
        let row = &field.values()[r * n..(r + 1) * n];
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    fs::write(stem.with_extension("csv"), out)?;
    Ok(())
}

fn read_header(stem: &Path) -> Result<(Grid, FieldHeader)> {
    let text = fs::read_to_string(stem.with_extension("json"))?;
    let header: FieldHeader = serde_json::from_str(&text)?;
    let grid = Grid::new(header.dim, header.n)?;
    Ok((grid, header))
}

/// Read a field written by [`write_field_binary`].
pub fn read_field_binary(stem: &Path) -> Result<ScalarField> {
    let (grid, _) = read_header(stem)?;
    let mut bytes = Vec::new();
    fs::File::open(stem.with_extension("bin"))?.read_to_end(&mut bytes)?;
    if bytes.len() != grid.points() * 8 {
        return Err(Error::Consistency(format!(
            "binary payload holds {} bytes, header implies {}",
            bytes.len(),
            grid.points() * 8
        )));
    }
    let values: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    ScalarField::from_values(grid, values)
}

/// Read a field written by [`write_field_csv`].
pub fn read_field_csv(stem: &Path) -> Result<ScalarField> {
    let (grid, _) = read_header(stem)?;
    let text = fs::read_to_string(stem.with_extension("csv"))?;
    let mut values = Vec::with_capacity(grid.points());
    for line in text.lines() {
        if line.trim().is_empty() {
            continue;
        }
        for tok in line.split(',') {
            values.push(
                tok.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Consistency(format!("bad CSV sample '{tok}': {e}")))?,
            );
        }
    }
    ScalarField::from_values(grid, values)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrajectoryManifest {
    pub config: serde_json::Value,
    pub times: Vec<f64>,
    pub norm_exponents: Vec<f64>,
    /// `norm_series[ri][ti]` matches `times` of the norm recording (per step).
    pub norm_times: Vec<f64>,
    pub norm_series: Vec<Vec<f64>>,
    pub snapshots: Vec<String>,
    pub blowup_step: Option<usize>,
    pub warnings: Vec<String>,
}

/// Write a run into `dir`: manifest, per-snapshot binary fields, norm CSV.
pub fn write_trajectory_store(
    dir: &Path,
    report: &RunReport,
    config_echo: serde_json::Value,
) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let traj = &report.trajectory;
    let mut snapshots = Vec::new();
    for i in 0..traj.len() {
        let stem_name = format!("snap_{i:06}");
        write_field_binary(&dir.join(&stem_name), traj.theta(i))?;
        snapshots.push(stem_name);
    }
    let manifest = TrajectoryManifest {
        config: config_echo,
        times: traj.times().to_vec(),
        norm_exponents: report.norms.exponents.clone(),
        norm_times: report.norms.times.clone(),
        norm_series: report.norms.values.clone(),
        snapshots,
        blowup_step: report.blowup.as_ref().map(|b| b.step),
        warnings: report.warnings.clone(),
    };
    let manifest_path = dir.join("manifest.json");
    fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)?)?;
    let mut norms = fs::File::create(dir.join("norms.csv"))?;
    norms.write_all(report.norms.to_csv().as_bytes())?;
    Ok(manifest_path)
}
