//! Diagnostics persistence: iteration CSV, estimate-report CSV and the
//! uniqueness JSON. Floats are written as shortest round-trip decimals.

use std::path::Path;

use lpmhd_core::mhd::{DiagnosticsRow, UniquenessReport};
use lpmhd_core::EstimateReport;

use crate::error::{Error, Result};
use crate::format::{read_json, write_bytes, write_json};

pub const DIAGNOSTICS_HEADER: [&str; 8] = ["n", "T", "E0", "H1_lhs", "H1_rhs", "H2_lhs", "H2_rhs", "D_n"];

/// Shortest decimal that parses back to the same `f64`.
pub fn float(x: f64) -> String {
    format!("{x:?}")
}

fn csv_bytes<I: IntoIterator<Item = Vec<String>>>(header: &[&str], rows: I) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.into_inner().map_err(|e| Error::Config(e.to_string()))
}

pub fn diagnostics_csv(rows: &[DiagnosticsRow]) -> Result<Vec<u8>> {
    csv_bytes(
        &DIAGNOSTICS_HEADER,
        rows.iter().map(|r| {
            vec![
                r.n.to_string(),
                float(r.horizon),
                float(r.e0),
                float(r.bounds.h1_lhs),
                float(r.bounds.h1_rhs),
                float(r.bounds.h2_lhs),
                float(r.bounds.h2_rhs),
                r.d_n.map(float).unwrap_or_default(),
            ]
        }),
    )
}

/// The deterministic diagnostics table: one row per iterate, `D_n` empty on
/// the last one.
pub fn write_diagnostics(path: &Path, rows: &[DiagnosticsRow]) -> Result<()> {
    write_bytes(path, &diagnostics_csv(rows)?)
}

/// The wallclock sidecar: `n, wallclock_s` with seconds since the run started.
pub fn write_wallclock(path: &Path, rows: &[(usize, f64)]) -> Result<()> {
    let bytes = csv_bytes(
        &["n", "wallclock_s"],
        rows.iter().map(|(n, s)| vec![n.to_string(), float(*s)]),
    )?;
    write_bytes(path, &bytes)
}

/// Parses a diagnostics CSV back into `(n, [T, E0, H1_lhs, H1_rhs, H2_lhs, H2_rhs], D_n)`.
pub fn read_diagnostics(path: &Path) -> Result<Vec<(usize, [f64; 6], Option<f64>)>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::format(path, e.to_string()))?;
    let header = r.headers()?.clone();
    if header.iter().collect::<Vec<_>>() != DIAGNOSTICS_HEADER {
        return Err(Error::format(path, "unexpected diagnostics header"));
    }
    let parse = |s: &str| s.parse::<f64>().map_err(|e| Error::format(path, e.to_string()));
    r.records()
        .map(|rec| {
            let rec = rec?;
            let n = rec[0].parse::<usize>().map_err(|e| Error::format(path, e.to_string()))?;
            let mut vals = [0.0; 6];
            for (i, v) in vals.iter_mut().enumerate() {
                *v = parse(&rec[i + 1])?;
            }
            let d = if rec[7].is_empty() { None } else { Some(parse(&rec[7])?) };
            Ok((n, vals, d))
        })
        .collect()
}

fn named_list(pairs: &[(String, f64)]) -> String {
    pairs
        .iter()
        .map(|(n, v)| format!("{n}={}", float(*v)))
        .collect::<Vec<_>>()
        .join(";")
}

/// One row per report: `variant, indices, lhs, factors, ratio, seed`, with
/// indices and factors written as `name=value` lists joined by `;`.
pub fn estimate_csv(reports: &[(EstimateReport, u64)]) -> Result<Vec<u8>> {
    csv_bytes(
        &["variant", "indices", "lhs", "factors", "ratio", "seed"],
        reports.iter().map(|(r, seed)| {
            vec![
                r.variant.clone(),
                named_list(&r.indices),
                float(r.lhs),
                named_list(&r.factors),
                float(r.ratio),
                seed.to_string(),
            ]
        }),
    )
}

pub fn write_estimates(path: &Path, reports: &[(EstimateReport, u64)]) -> Result<()> {
    write_bytes(path, &estimate_csv(reports)?)
}

pub fn write_uniqueness(path: &Path, report: &UniquenessReport) -> Result<()> {
    write_json(path, report)
}

pub fn read_uniqueness(path: &Path) -> Result<UniquenessReport> {
    read_json(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use lpmhd_core::mhd::{OsgoodVerdict, UniformBounds};

    fn row(n: usize, d: Option<f64>) -> DiagnosticsRow {
        DiagnosticsRow {
            n,
            horizon: 0.058,
            e0: 0.1 + 0.2,
            bounds: UniformBounds {
                h1_lhs: 1e-300,
                h1_rhs: 1.5,
                h2_lhs: 0.0,
                h2_rhs: 0.1,
            },
            d_n: d,
        }
    }

    #[test]
    fn empty_run_is_header_only() {
        let bytes = diagnostics_csv(&[]).unwrap();
        assert_eq!(String::from_utf8(bytes).unwrap(), "n,T,E0,H1_lhs,H1_rhs,H2_lhs,H2_rhs,D_n\n");
    }

    #[test]
    fn diagnostics_round_trip_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        let rows = [row(0, Some(1.0 / 3.0)), row(1, None)];
        write_diagnostics(&path, &rows).unwrap();
        let back = read_diagnostics(&path).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[0].1[1], 0.1 + 0.2);
        assert_eq!(back[0].1[2], 1e-300);
        assert_eq!(back[0].2, Some(1.0 / 3.0));
        assert_eq!(back[1].2, None);
        let one = diagnostics_csv(&rows[..1]).unwrap();
        assert_eq!(String::from_utf8(one).unwrap().lines().count(), 2);
    }

    #[test]
    fn estimate_rows() {
        let r = EstimateReport::new(
            "full",
            vec![("s1".into(), 0.5), ("p".into(), f64::INFINITY)],
            2.0,
            vec![("f".into(), 1.0), ("g".into(), 4.0)],
        );
        let text = String::from_utf8(estimate_csv(&[(r, 9)]).unwrap()).unwrap();
        assert_eq!(text.lines().nth(1).unwrap(), "full,s1=0.5;p=inf,2.0,f=1.0;g=4.0,0.5,9");
    }

    #[test]
    fn uniqueness_json_round_trip_keeps_non_finite_values() {
        let report = UniquenessReport {
            perturbation: 1e-4,
            seed: 3,
            horizon: 0.058,
            times: vec![0.0, 0.002],
            rho: vec![0.0, 1.0 / 7.0],
            delta_b: vec![0.5, 0.25],
            delta_b0: 0.5,
            a_t: f64::INFINITY,
            c_t: 2.0,
            constants: vec![("c_magnetic".into(), f64::INFINITY), ("c_velocity".into(), 0.1)],
            offset: 1e-7,
            verdict: OsgoodVerdict {
                pass: true,
                worst_margin: 1e-9,
                worst_time: 0.002,
            },
            scale: 3.0,
            flagged: false,
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("u.json");
        write_uniqueness(&path, &report).unwrap();
        assert_eq!(read_uniqueness(&path).unwrap(), report);
    }
}
