//! Run configuration: a flat TOML document whose keys mirror the command
//! line flags. Unknown and duplicate keys are rejected.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use lpmhd_core::mhd::{IterationConfig, MhdInitialData};
use lpmhd_core::random::{normalized, random_solenoidal, seeded};
use lpmhd_core::{FilterBank, FrequencyGrid};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::read_field_on;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialKind {
    /// `u0 = a(sin x1 cos x2, -cos x1 sin x2)`, `B0 = a(cos x1 sin x2, -sin x1 cos x2)`.
    TaylorGreen,
    /// Seeded random solenoidal fields with `1 ≤ |k| ≤ 4`, each scaled to L² norm `amplitude`.
    Random,
    /// Read from `u0_file` and `b0_file`.
    Files,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub dimension: usize,
    pub points: usize,
    pub box_length: f64,
    pub p: f64,
    pub dt: f64,
    pub t_max: f64,
    pub cadence: usize,
    pub eta: f64,
    pub c0: f64,
    pub max_iterations: usize,
    pub tolerance: f64,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub threads: Option<usize>,
    pub amplitude: f64,
    pub initial: InitialKind,
    pub u0_file: Option<PathBuf>,
    pub b0_file: Option<PathBuf>,
    /// Corpus size of the verification suites.
    pub samples: usize,
    /// Regularity indices for the product suite; unset means 1/2.
    pub s1: Option<f64>,
    pub s2: Option<f64>,
    /// L² size of the twin-run perturbation.
    pub perturbation: f64,
    /// Fixed horizon; unset selects it from the smallness condition.
    pub horizon: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let iteration = IterationConfig::default();
        Self {
            dimension: 2,
            points: 64,
            box_length: 2.0 * PI,
            p: iteration.p,
            dt: iteration.dt,
            t_max: iteration.t_max,
            cadence: iteration.cadence,
            eta: iteration.eta,
            c0: iteration.c0,
            max_iterations: iteration.max_iterations,
            tolerance: iteration.tolerance,
            seed: iteration.seed,
            output_dir: PathBuf::from("lpmhd-out"),
            threads: None,
            amplitude: 0.05,
            initial: InitialKind::TaylorGreen,
            u0_file: None,
            b0_file: None,
            samples: 100,
            s1: None,
            s2: None,
            perturbation: 1e-4,
            horizon: None,
        }
    }
}

/// Parses and validates a configuration document, after applying
/// `overrides` on top of it.
pub fn load_config_with(text: &str, overrides: toml::Table) -> Result<RunConfig> {
    let parse_error = |e: toml::de::Error| Error::Config(e.to_string());
    // Typed parse of the file alone, so its errors carry line numbers.
    toml::from_str::<RunConfig>(text).map_err(parse_error)?;
    let mut table: toml::Table = text.parse().map_err(parse_error)?;
    table.extend(overrides);
    let config: RunConfig = table.try_into().map_err(parse_error)?;
    config.validate()?;
    Ok(config)
}

pub fn load_config(text: &str) -> Result<RunConfig> {
    load_config_with(text, toml::Table::new())
}

/// Reads `path` (or starts from defaults when `None`) and applies overrides.
pub fn load_config_file(path: Option<&Path>, overrides: toml::Table) -> Result<RunConfig> {
    let text = match path {
        Some(p) => fs::read_to_string(p).map_err(|e| Error::io(p, e))?,
        None => String::new(),
    };
    load_config_with(&text, overrides)
}

fn bad(field: &str, why: impl std::fmt::Display) -> Error {
    Error::Config(format!("{field}: {why}"))
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let grid = self.grid().map_err(|e| bad("grid", e))?;
        FilterBank::resolved(grid).map_err(|e| bad("points", e))?;
        self.iteration_config()
            .validate(self.dimension)
            .map_err(|e| bad("iteration", e))?;
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            return Err(bad("amplitude", format!("{} must be finite and nonnegative", self.amplitude)));
        }
        if !(self.perturbation >= 0.0 && self.perturbation.is_finite()) {
            return Err(bad("perturbation", format!("{} must be finite and nonnegative", self.perturbation)));
        }
        if self.samples == 0 {
            return Err(bad("samples", "must be at least 1"));
        }
        if self.threads == Some(0) {
            return Err(bad("threads", "must be at least 1"));
        }
        for (name, v) in [("s1", self.s1), ("s2", self.s2)] {
            if v.is_some_and(|v| !v.is_finite()) {
                return Err(bad(name, "must be finite"));
            }
        }
        if self.initial == InitialKind::Files && (self.u0_file.is_none() || self.b0_file.is_none()) {
            return Err(bad("initial", "\"files\" needs both u0_file and b0_file"));
        }
        Ok(())
    }

    /// Creates the output directory and checks that it accepts files.
    pub fn ensure_output_dir(&self) -> Result<()> {
        let dir = &self.output_dir;
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let probe = dir.join(".lpmhd-write-probe");
        fs::write(&probe, b"").map_err(|e| Error::io(&probe, e))?;
        fs::remove_file(&probe).map_err(|e| Error::io(&probe, e))
    }

    pub fn grid(&self) -> Result<FrequencyGrid> {
        Ok(FrequencyGrid::new(self.dimension, self.points, self.box_length)?)
    }

    pub fn bank(&self) -> Result<FilterBank> {
        Ok(FilterBank::resolved(self.grid()?)?)
    }

    pub fn iteration_config(&self) -> IterationConfig {
        IterationConfig {
            p: self.p,
            dt: self.dt,
            t_max: self.t_max,
            cadence: self.cadence,
            eta: self.eta,
            c0: self.c0,
            max_iterations: self.max_iterations,
            tolerance: self.tolerance,
            seed: self.seed,
            horizon: self.horizon,
        }
    }

    pub fn initial_data(&self) -> Result<MhdInitialData> {
        let grid = self.grid()?;
        match self.initial {
            InitialKind::TaylorGreen => {
                if grid.dim() != 2 {
                    return Err(bad("initial", "taylor-green data is two-dimensional"));
                }
                Ok(MhdInitialData::taylor_green(grid, self.amplitude))
            }
            InitialKind::Random => {
                let mut rng = seeded(self.seed);
                let k0 = grid.fundamental();
                let mut draw = || normalized(&random_solenoidal(&grid, k0, 4.0 * k0, &mut rng), self.amplitude);
                let u0 = draw();
                let b0 = draw();
                Ok(MhdInitialData::new(u0, b0)?)
            }
            InitialKind::Files => {
                let d = grid.dim();
                let u0 = read_field_on(self.u0_file.as_deref().expect("validated"), &grid, d)?;
                let b0 = read_field_on(self.b0_file.as_deref().expect("validated"), &grid, d)?;
                Ok(MhdInitialData::new(u0, b0)?)
            }
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        let c = load_config("").unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!((c.eta, c.c0), (0.1, 16.0));
    }

    #[test]
    fn exponent_range_error_names_the_bound() {
        let err = load_config("dimension = 2\np = 5.0\n").unwrap_err().to_string();
        assert!(err.contains("[1, 2d]") && err.contains("p = 5"), "{err}");
    }

    #[test]
    fn duplicate_and_unknown_keys_are_parse_errors() {
        let err = load_config("p = 2.0\np = 3.0\n").unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
        let err = load_config("colour = 1\n").unwrap_err().to_string();
        assert!(err.contains("colour"), "{err}");
        let err = load_config("points = \"many\"\n").unwrap_err().to_string();
        assert!(err.contains("line 1"), "{err}");
    }

    #[test]
    fn overrides_win_and_are_validated() {
        let mut o = toml::Table::new();
        o.insert("points".into(), toml::Value::Integer(32));
        let c = load_config_with("points = 64\n", o).unwrap();
        assert_eq!(c.points, 32);
        let mut o = toml::Table::new();
        o.insert("points".into(), toml::Value::Integer(30));
        assert!(load_config_with("", o).is_err());
    }

    #[test]
    fn serialized_config_reloads() {
        let c = RunConfig {
            s1: Some(0.25),
            horizon: Some(0.1),
            initial: InitialKind::Random,
            ..RunConfig::default()
        };
        assert_eq!(load_config(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn files_need_paths_and_data_builds() {
        assert!(load_config("initial = \"files\"\n").is_err());
        let c = load_config("initial = \"random\"\npoints = 32\n").unwrap();
        let d = c.initial_data().unwrap();
        assert_eq!(d.u0.components(), 2);
    }

    #[test]
    fn output_dir_is_checked() {
        let dir = tempfile::tempdir().unwrap();
        let c = RunConfig {
            output_dir: dir.path().join("a/b"),
            ..RunConfig::default()
        };
        c.ensure_output_dir().unwrap();
        assert!(dir.path().join("a/b").is_dir());
        let file = dir.path().join("plain");
        fs::write(&file, b"x").unwrap();
        let c = RunConfig {
            output_dir: file.join("sub"),
            ..RunConfig::default()
        };
        assert!(c.ensure_output_dir().is_err());
    }
}
