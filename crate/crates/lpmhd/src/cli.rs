//! The `lpmhd` command line. Exit codes: 0 when every check passes, 1 when
//! a check fails, 2 for usage, configuration and input errors.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lpmhd_core::littlewood_paley::{block_norms, TimeSeriesField};
use lpmhd_core::mhd::{run_iteration_with, twin_run_uniqueness};
use lpmhd_core::solvers::{
    heat_estimate_report, solve_heat, solve_transport, transport_estimate_report, HeatProblem, TransportProblem,
};
use lpmhd_core::FilterBank;

use crate::config::{load_config_file, RunConfig};
use crate::error::{Error, Result};
use crate::format::{read_field, read_field_on, read_series, write_bytes, write_filter_bank, write_json, write_series};
use crate::report::{write_diagnostics, write_estimates, write_uniqueness, write_wallclock};
use crate::verify::{record_bernstein_baseline, record_transport_baseline, run_suite, Suite};

pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "lpmhd", version, about = "Littlewood-Paley toolkit and iterative solver for non-resistive MHD")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a seeded verification suite.
    Verify {
        #[arg(value_enum)]
        suite: SuiteArg,
        /// Write a freshly measured baseline instead of checking against the committed one.
        #[arg(long)]
        record_baseline: bool,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Solve a single heat or transport problem from field files.
    Solve {
        #[arg(value_enum)]
        problem: ProblemArg,
        /// Initial data (field file).
        #[arg(long)]
        input: PathBuf,
        /// Steady velocity for transport (field file).
        #[arg(long)]
        velocity: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Run the MHD iteration and write its diagnostics.
    Iterate {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Twin-run uniqueness gauge.
    Unique {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Print Besov norms of field files, or Chemin-Lerner norms of series directories.
    Norms {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        #[arg(long, allow_hyphen_values = true)]
        s: f64,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        /// Time exponent for series directories.
        #[arg(long, default_value_t = f64::INFINITY)]
        q: f64,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SuiteArg {
    Bernstein,
    Bony,
    Products,
    Loginterp,
    Heat,
    Transport,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Bernstein => Suite::Bernstein,
            SuiteArg::Bony => Suite::Bony,
            SuiteArg::Products => Suite::Products,
            SuiteArg::Loginterp => Suite::Loginterp,
            SuiteArg::Heat => Suite::Heat,
            SuiteArg::Transport => Suite::Transport,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ProblemArg {
    Heat,
    Transport,
}

/// `--key value` overrides, one per configuration key.
#[derive(Args, Debug, Default)]
struct ConfigArgs {
    /// Configuration file (TOML); defaults apply without one.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    dimension: Option<i64>,
    #[arg(long)]
    points: Option<i64>,
    #[arg(long)]
    box_length: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    cadence: Option<i64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    c0: Option<f64>,
    #[arg(long)]
    max_iterations: Option<i64>,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    seed: Option<i64>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    threads: Option<i64>,
    #[arg(long)]
    amplitude: Option<f64>,
    #[arg(long)]
    initial: Option<String>,
    #[arg(long)]
    u0_file: Option<PathBuf>,
    #[arg(long)]
    b0_file: Option<PathBuf>,
    #[arg(long)]
    samples: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    s1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    s2: Option<f64>,
    #[arg(long)]
    perturbation: Option<f64>,
    #[arg(long)]
    horizon: Option<f64>,
}

impl ConfigArgs {
    fn overrides(&self) -> toml::Table {
        use toml::Value;
        let mut t = toml::Table::new();
        let mut put = |k: &str, v: Option<Value>| {
            if let Some(v) = v {
                t.insert(k.to_string(), v);
            }
        };
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| Value::String(p.to_string_lossy().into_owned()));
        put("dimension", self.dimension.map(Value::Integer));
        put("points", self.points.map(Value::Integer));
        put("box_length", self.box_length.map(Value::Float));
        put("p", self.p.map(Value::Float));
        put("dt", self.dt.map(Value::Float));
        put("t_max", self.t_max.map(Value::Float));
        put("cadence", self.cadence.map(Value::Integer));
        put("eta", self.eta.map(Value::Float));
        put("c0", self.c0.map(Value::Float));
        put("max_iterations", self.max_iterations.map(Value::Integer));
        put("tolerance", self.tolerance.map(Value::Float));
        put("seed", self.seed.map(Value::Integer));
        put("output_dir", path(&self.output_dir));
        put("threads", self.threads.map(Value::Integer));
        put("amplitude", self.amplitude.map(Value::Float));
        put("initial", self.initial.clone().map(Value::String));
        put("u0_file", path(&self.u0_file));
        put("b0_file", path(&self.b0_file));
        put("samples", self.samples.map(Value::Integer));
        put("s1", self.s1.map(Value::Float));
        put("s2", self.s2.map(Value::Float));
        put("perturbation", self.perturbation.map(Value::Float));
        put("horizon", self.horizon.map(Value::Float));
        t
    }

    fn load(&self) -> Result<RunConfig> {
        let config = load_config_file(self.config.as_deref(), self.overrides())?;
        config.ensure_output_dir()?;
        if let Some(n) = config.threads {
            // Only the first call in a process takes effect.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        Ok(config)
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run_from<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    match dispatch(cli.command) {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_FAIL,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn status(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn dispatch(command: Command) -> Result<bool> {
    match command {
        Command::Verify {
            suite,
            record_baseline,
            config,
        } => verify(suite.into(), record_baseline, &config.load()?),
        Command::Solve {
            problem,
            input,
            velocity,
            config,
        } => solve(problem, &input, velocity.as_deref(), &config.load()?),
        Command::Iterate { config } => iterate(&config.load()?),
        Command::Unique { config } => unique(&config.load()?),
        Command::Norms { paths, s, p, r, q } => norms(&paths, s, p, r, q),
    }
}

fn verify(suite: Suite, record: bool, config: &RunConfig) -> Result<bool> {
    let dir = &config.output_dir;
    if record {
        let path = dir.join(format!("baseline_{}.json", suite.name()));
        match suite {
            Suite::Bernstein => write_json(&path, &record_bernstein_baseline(config)?)?,
            Suite::Transport => write_json(&path, &record_transport_baseline(config)?)?,
            other => {
                return Err(Error::Config(format!("suite {} has no baseline", other.name())));
            }
        }
        println!("baseline written to {}", path.display());
        return Ok(true);
    }
    let report = run_suite(suite, config)?;
    report.write(dir)?;
    for c in &report.checks {
        println!("{} {}: {:e} (limit {:e})", status(c.pass), c.name, c.value, c.limit);
    }
    println!("{} suite {}", status(report.pass()), suite.name());
    Ok(report.pass())
}

fn solve(problem: ProblemArg, input: &Path, velocity: Option<&Path>, config: &RunConfig) -> Result<bool> {
    let grid = config.grid()?;
    let bank = config.bank()?;
    let f0 = read_field(input)?;
    if f0.grid() != &grid {
        return Err(Error::format(input, "field grid does not match the configured grid"));
    }
    let dir = &config.output_dir;
    let d = grid.dim();
    let s = d as f64 / config.p - 1.0;
    match problem {
        ProblemArg::Heat => {
            let p = HeatProblem::new(f0, None, config.t_max, config.dt, config.cadence)?;
            let sol = solve_heat(&p)?;
            write_series(&dir.join("heat"), "heat", &sol, config.dt, config.cadence, vec![config.seed])?;
            let report = heat_estimate_report(&bank, &p, &sol, f64::INFINITY, 1.0, s, config.p, 1.0)?;
            println!("heat estimate ratio {:e}", report.ratio);
            write_estimates(&dir.join("heat_estimate.csv"), &[(report, config.seed)])?;
        }
        ProblemArg::Transport => {
            let vpath = velocity.ok_or_else(|| Error::Config("transport needs --velocity".into()))?;
            let v = read_field_on(vpath, &grid, d)?;
            let steady = TimeSeriesField::constant(v, vec![0.0, config.t_max])?;
            let p = TransportProblem::new(f0, steady, None, config.t_max, config.dt, config.cadence)?;
            let sol = solve_transport(&p)?;
            write_series(&dir.join("transport"), "transport", &sol, config.dt, config.cadence, vec![config.seed])?;
            let (report, monitor) = transport_estimate_report(&bank, &p, &sol, s, config.p, 1.0)?;
            println!("transport estimate constant {:e}", monitor.constant);
            write_estimates(&dir.join("transport_estimate.csv"), &[(report, config.seed)])?;
            write_json(&dir.join("transport_monitor.json"), &monitor)?;
        }
    }
    Ok(true)
}

/// Largest fitted successive-difference ratio accepted by `iterate`.
pub const DECAY_LIMIT: f64 = 0.5;

fn iterate(config: &RunConfig) -> Result<bool> {
    let bank = config.bank()?;
    let data = config.initial_data()?;
    let dir = &config.output_dir;
    let start = Instant::now();
    let mut wallclock = Vec::new();
    let diag = run_iteration_with(&bank, &data, &config.iteration_config(), |row| {
        wallclock.push((row.n, start.elapsed().as_secs_f64()));
    })?;
    write_diagnostics(&dir.join("diagnostics.csv"), &diag.rows)?;
    write_wallclock(&dir.join("wallclock.csv"), &wallclock)?;
    write_filter_bank(&dir.join("filter_bank.json"), &bank)?;
    write_bytes(&dir.join("config.toml"), config.to_toml().as_bytes())?;
    let state = &diag.final_state;
    write_series(&dir.join("final_u"), "mhd-u", &state.u, config.dt, config.cadence, vec![config.seed])?;
    write_series(&dir.join("final_b"), "mhd-b", &state.b, config.dt, config.cadence, vec![config.seed])?;

    let flagged = state.horizon_selection.as_ref().is_some_and(|s| s.flagged);
    let bounds = diag.bounds_hold();
    let decay_ok = diag.decay.is_none_or(|f| f.ratio <= DECAY_LIMIT);
    let converged_ok = config.tolerance == 0.0 || diag.converged();
    println!("horizon T = {} ({} iterates)", state.horizon, diag.rows.len());
    println!("{} horizon selection{}", status(!flagged), if flagged { " (flagged)" } else { "" });
    println!("{} uniform bounds on every iterate", status(bounds));
    match diag.decay {
        Some(fit) => println!("{} fitted decay ratio {:e} over {} points", status(decay_ok), fit.ratio, fit.points),
        None => println!("PASS no decay fit (fewer than two differences above roundoff)"),
    }
    if config.tolerance > 0.0 {
        println!("{} convergence to tolerance {:e}", status(converged_ok), config.tolerance);
    }
    Ok(!flagged && bounds && decay_ok && converged_ok)
}

fn unique(config: &RunConfig) -> Result<bool> {
    let bank = config.bank()?;
    let data = config.initial_data()?;
    let report = twin_run_uniqueness(&bank, &data, &config.iteration_config(), config.perturbation, config.seed)?;
    write_uniqueness(&config.output_dir.join("uniqueness.json"), &report)?;
    println!(
        "rho(T) = {:e}, scale {:e}, A_T = {:e}, C_T = {:e}, offset {:e}",
        report.rho_final(),
        report.scale,
        report.a_t,
        report.c_t,
        report.offset
    );
    println!(
        "{} Osgood inequality (worst margin {:e} at t = {})",
        status(report.verdict.pass),
        report.verdict.worst_margin,
        report.verdict.worst_time
    );
    Ok(report.verdict.pass)
}

fn norms(paths: &[PathBuf], s: f64, p: f64, r: f64, q: f64) -> Result<bool> {
    for path in paths {
        if path.is_dir() {
            let (_, series) = read_series(path)?;
            let bank = FilterBank::resolved(*series.first().grid())?;
            let norms = series.block_norms(&bank, p)?;
            println!(
                "{}: chemin-lerner {:e}, bochner {:e}",
                path.display(),
                norms.chemin_lerner(s, q, r),
                norms.lebesgue_besov(s, q, r)
            );
        } else {
            let field = read_field(path)?;
            let bank = FilterBank::resolved(*field.grid())?;
            let b = block_norms(&bank, &field, p)?;
            println!("{}: besov {:e}, mean {:?}", path.display(), b.besov(s, r), b.mean);
        }
    }
    Ok(true)
}
