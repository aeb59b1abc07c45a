//! On-disk formats. See `FORMATS.md` at the repository root.

use std::fs;
use std::io::Write;
use std::path::Path;

use lpmhd_core::littlewood_paley::{ANNULUS_INNER, ANNULUS_OUTER};
use lpmhd_core::{FilterBank, Field, FrequencyGrid, TimeSeriesField};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const FIELD_MAGIC: &[u8; 8] = b"LPMHD001";
const HEADER_LEN: usize = 8 + 4 + 4 + 8 + 4;

pub fn encode_field(field: &Field) -> Vec<u8> {
    let grid = field.grid();
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * field.samples().len());
    out.extend_from_slice(FIELD_MAGIC);
    out.extend_from_slice(&(grid.dim() as u32).to_le_bytes());
    out.extend_from_slice(&(grid.points() as u32).to_le_bytes());
    out.extend_from_slice(&grid.length().to_le_bytes());
    out.extend_from_slice(&(field.components() as u32).to_le_bytes());
    for x in field.samples() {
        out.extend_from_slice(&x.to_le_bytes());
    }
    out
}

/// Parses a field; `path` only labels errors.
pub fn decode_field(bytes: &[u8], path: &Path) -> Result<Field> {
    if bytes.len() < 8 || &bytes[..8] != FIELD_MAGIC {
        return Err(Error::format(path, "bad magic, expected LPMHD001"));
    }
    if bytes.len() < HEADER_LEN {
        return Err(Error::format(
            path,
            format!("truncated header: {} of {HEADER_LEN} bytes", bytes.len()),
        ));
    }
    let u32_at = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4 bytes"));
    let dim = u32_at(8) as usize;
    let points = u32_at(12) as usize;
    let length = f64::from_le_bytes(bytes[16..24].try_into().expect("8 bytes"));
    let components = u32_at(24) as usize;
    let grid = FrequencyGrid::new(dim, points, length).map_err(|e| Error::format(path, e.to_string()))?;
    if components == 0 {
        return Err(Error::format(path, "zero components"));
    }
    let expected = components * grid.len() * 8;
    let body = &bytes[HEADER_LEN..];
    if body.len() < expected {
        return Err(Error::format(
            path,
            format!("truncated samples: {} of {expected} bytes", body.len()),
        ));
    }
    if body.len() > expected {
        return Err(Error::format(
            path,
            format!("{} trailing bytes after the samples", body.len() - expected),
        ));
    }
    let samples = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    Ok(Field::from_samples(grid, components, samples)?)
}

pub fn write_field(path: &Path, field: &Field) -> Result<()> {
    write_bytes(path, &encode_field(field))
}

pub fn read_field(path: &Path) -> Result<Field> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_field(&bytes, path)
}

/// Reads a field and checks it lives on `grid` with `components` components.
pub fn read_field_on(path: &Path, grid: &FrequencyGrid, components: usize) -> Result<Field> {
    let field = read_field(path)?;
    if field.grid() != grid {
        return Err(Error::format(
            path,
            format!(
                "grid (d = {}, N = {}, L = {}) does not match the expected (d = {}, N = {}, L = {})",
                field.grid().dim(),
                field.grid().points(),
                field.grid().length(),
                grid.dim(),
                grid.points(),
                grid.length()
            ),
        ));
    }
    if field.components() != components {
        return Err(Error::format(
            path,
            format!("{} components, expected {components}", field.components()),
        ));
    }
    Ok(field)
}

pub(crate) fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(bytes).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_bytes(path, text.as_bytes())
}

pub(crate) fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::format(path, e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dimension: usize,
    pub points: usize,
    pub box_length: f64,
}

impl From<&FrequencyGrid> for GridSpec {
    fn from(g: &FrequencyGrid) -> Self {
        Self {
            dimension: g.dim(),
            points: g.points(),
            box_length: g.length(),
        }
    }
}

/// Index of a stored time series: one field file per snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub problem: String,
    pub grid: GridSpec,
    pub dt: f64,
    pub horizon: f64,
    pub cadence: usize,
    pub seeds: Vec<u64>,
    pub times: Vec<f64>,
    pub files: Vec<String>,
}

pub const MANIFEST_FILE: &str = "manifest.json";

fn snapshot_name(i: usize) -> String {
    format!("snap_{i:05}.bin")
}

/// Writes `series` into `dir` as `snap_NNNNN.bin` files plus `manifest.json`.
pub fn write_series(
    dir: &Path,
    problem: &str,
    series: &TimeSeriesField,
    dt: f64,
    cadence: usize,
    seeds: Vec<u64>,
) -> Result<RunManifest> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = Vec::with_capacity(series.len());
    for (i, snap) in series.snapshots().iter().enumerate() {
        let name = snapshot_name(i);
        write_field(&dir.join(&name), snap)?;
        files.push(name);
    }
    let manifest = RunManifest {
        problem: problem.to_string(),
        grid: GridSpec::from(series.first().grid()),
        dt,
        horizon: series.horizon(),
        cadence,
        seeds,
        times: series.times().to_vec(),
        files,
    };
    write_json(&dir.join(MANIFEST_FILE), &manifest)?;
    Ok(manifest)
}

pub fn read_series(dir: &Path) -> Result<(RunManifest, TimeSeriesField)> {
    let manifest: RunManifest = read_json(&dir.join(MANIFEST_FILE))?;
    if manifest.files.len() != manifest.times.len() {
        return Err(Error::format(dir.join(MANIFEST_FILE), "times and files differ in length"));
    }
    let snapshots = manifest
        .files
        .iter()
        .map(|f| read_field(&dir.join(f)))
        .collect::<Result<Vec<_>>>()?;
    let series = TimeSeriesField::new(manifest.times.clone(), snapshots)?;
    Ok((manifest, series))
}

/// Filter-bank description for cross-implementation comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterBankExport {
    pub grid: GridSpec,
    pub j_min: i32,
    pub j_max: i32,
    pub annulus_inner: f64,
    pub annulus_outer: f64,
    /// SHA-256 of every tabulated `φ_j` value, little-endian, block by block
    /// from `j_min`, lattice points in row-major order.
    pub phi_sha256: String,
}

pub fn export_filter_bank(bank: &FilterBank) -> FilterBankExport {
    FilterBankExport {
        grid: GridSpec::from(bank.grid()),
        j_min: bank.j_min(),
        j_max: bank.j_max(),
        annulus_inner: ANNULUS_INNER,
        annulus_outer: ANNULUS_OUTER,
        phi_sha256: hex::encode(Sha256::digest(bank.value_bytes())),
    }
}

pub fn write_filter_bank(path: &Path, bank: &FilterBank) -> Result<()> {
    write_json(path, &export_filter_bank(bank))
}
