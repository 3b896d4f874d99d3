//! `backsec` command line: `solve`, `sweep` and `validate`.
//!
//! Exit codes: 0 on success, 2 for configuration or usage errors (including
//! unsupported scheme/dimension combinations and unwritable outputs), 3 for
//! numerical failures.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::model::Instance;
use crate::montecarlo::{generate_channels, run_sweep};
use crate::schemes::{run_scheme, Scheme};
use crate::validate::{run_suite, Suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "backsec", version, about = "Secrecy-rate optimization with artificial noise for backscatter links")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one random channel realization with one scheme.
    Solve(SolveArgs),
    /// Run a Monte-Carlo parameter sweep and write CSV.
    Sweep(SweepArgs),
    /// Check solver components against brute-force references.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
struct ConfigArgs {
    /// `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a configuration key; may be repeated.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl ConfigArgs {
    fn load(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::from_file(p)?,
            None => RunConfig::default(),
        };
        for pair in &self.set {
            cfg.set_pair(pair)?;
        }
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// general, nbs_an, nsi_an, no_an, single_optimal or single_nullspace.
    #[arg(long, default_value = "general")]
    scheme: String,
    /// Master seed (defaults to the configured one).
    #[arg(long)]
    seed: Option<u64>,
    /// Channel realization index under the seed.
    #[arg(long, default_value_t = 0)]
    trial: u64,
    /// Reader transmit antennas.
    #[arg(long)]
    m: Option<usize>,
    /// Reader receive antennas.
    #[arg(long)]
    n: Option<usize>,
    /// Tag antennas.
    #[arg(long)]
    l: Option<usize>,
    /// Eavesdropper antennas.
    #[arg(long)]
    k: Option<usize>,
    /// Total transmit power in dBm.
    #[arg(long = "p-dbm", allow_negative_numbers = true)]
    p_dbm: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// Write the AN covariance as CSV (one matrix row per line, `re,im` per cell).
    #[arg(long = "dump-solution", value_name = "PATH")]
    dump_solution: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// CSV destination (overrides `output`; standard output when neither is set).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Worker threads (the CSV does not depend on it).
    #[arg(long)]
    threads: Option<usize>,
    /// Channel realizations per sweep point.
    #[arg(long)]
    trials: Option<usize>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    /// gradients, projection, single_tag, equivalence, monotonicity or all.
    #[arg(long, default_value = "all")]
    suite: String,
    /// Random instances per check.
    #[arg(long, default_value_t = 20)]
    instances: usize,
    /// Seed for the random instances.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Parses `args` (program name first) and runs the command, writing normal
/// output to `out` and diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_CONFIG
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    let result = match cli.command {
        Command::Solve(a) => solve(a, out),
        Command::Sweep(a) => sweep(a, out, err),
        Command::Validate(a) => validate(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_config() {
                EXIT_CONFIG
            } else {
                EXIT_NUMERICAL
            }
        }
    }
}

fn solve(a: SolveArgs, out: &mut dyn Write) -> Result<i32> {
    let mut cfg = a.config.load()?;
    let flags = [
        ("m_tx", a.m.map(|v| v.to_string())),
        ("n_rx", a.n.map(|v| v.to_string())),
        ("l_tag", a.l.map(|v| v.to_string())),
        ("k_eve", a.k.map(|v| v.to_string())),
        ("p_dbm", a.p_dbm.map(|v| v.to_string())),
        ("alpha", a.alpha.map(|v| v.to_string())),
        ("beta", a.beta.map(|v| v.to_string())),
        ("seed", a.seed.map(|v| v.to_string())),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            cfg.set(key, &v)?;
        }
    }
    let scheme: Scheme = a.scheme.parse()?;
    let params = cfg.sweep.params.clone();
    params.validate()?;
    cfg.sweep.geometry.validate()?;
    scheme.check_compatible(&params)?;
    cfg.sweep.options.solver.validate()?;

    let channels = generate_channels(&params, &cfg.sweep.geometry, cfg.sweep.seed, a.trial);
    let inst = Instance::new(channels, params)?;
    let o = run_scheme(&inst, scheme, &cfg.sweep.options, None)?;
    writeln!(out, "scheme = {scheme}")?;
    writeln!(out, "seed = {}", cfg.sweep.seed)?;
    writeln!(out, "trial = {}", a.trial)?;
    writeln!(out, "secrecy_rate_bps_hz = {}", o.secrecy_rate)?;
    writeln!(out, "p_s_w = {}", o.solution.p_cw)?;
    writeln!(out, "an_power_w = {}", o.solution.an_power())?;
    writeln!(out, "outer_iterations = {}", o.outer_iterations)?;
    writeln!(out, "inner_iterations = {}", o.inner_iterations)?;
    if let Some(w) = o.warm_start {
        writeln!(out, "warm_start = {w}")?;
    }
    if let Some(path) = a.dump_solution {
        let mut text = String::new();
        for row in o.solution.an_cov.row_iter() {
            let cells: Vec<String> = row.iter().map(|z| format!("{},{}", z.re, z.im)).collect();
            text.push_str(&cells.join(","));
            text.push('\n');
        }
        std::fs::write(&path, text).map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(EXIT_OK)
}

fn sweep(a: SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let mut cfg = a.config.load()?;
    if let Some(t) = a.threads {
        cfg.threads = t;
    }
    if let Some(t) = a.trials {
        cfg.sweep.trials = t;
    }
    if let Some(s) = a.seed {
        cfg.sweep.seed = s;
    }
    if a.output.is_some() {
        cfg.output = a.output;
    }
    cfg.validate()?;
    // Fail on an unwritable destination before spending time on the sweep.
    let file = match &cfg.output {
        Some(p) => Some(
            std::fs::File::create(p).map_err(|e| Error::Config(format!("cannot write {}: {e}", p.display())))?,
        ),
        None => None,
    };
    let result = run_sweep(&cfg.sweep, cfg.threads)?;
    let log: &mut dyn Write = match file {
        Some(f) => {
            result.write_csv(std::io::BufWriter::new(f))?;
            out
        }
        None => {
            result.write_csv(&mut *out)?;
            err
        }
    };
    let failures: usize = result.rows.iter().map(|r| r.failures).sum();
    writeln!(log, "config_hash = {}", result.config_hash)?;
    writeln!(log, "rows = {}", result.rows.len())?;
    writeln!(log, "failures = {failures}")?;
    if let Some(f) = &result.first_failure {
        writeln!(log, "first_failure = {f}")?;
    }
    if result.degraded {
        writeln!(log, "degraded: more than 1% of the trials failed at some point")?;
        return Ok(EXIT_NUMERICAL);
    }
    Ok(EXIT_OK)
}

fn validate(a: ValidateArgs, out: &mut dyn Write) -> Result<i32> {
    let suite: Suite = a.suite.parse()?;
    if a.instances == 0 {
        return Err(Error::Config("--instances must be at least 1".into()));
    }
    let checks = run_suite(suite, a.instances, a.seed)?;
    for c in &checks {
        writeln!(out, "{c}")?;
    }
    Ok(if checks.iter().all(|c| c.passed) {
        EXIT_OK
    } else {
        EXIT_NUMERICAL
    })
}
