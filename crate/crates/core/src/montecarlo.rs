//! Random channel generation and parameter sweeps.
//!
//! Every trial owns a ChaCha stream selected by `(seed, trial)`, so results
//! do not depend on the number of worker threads or on scheduling. The same
//! stream is used at every sweep point: each trial is one channel realization
//! followed across the whole sweep axis, which keeps per-realization
//! comparisons between points meaningful.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::{CMat, C64};
use crate::model::{dbm_to_watts, watts_to_dbm, Instance, Solution, SystemChannels, SystemParams};
use crate::schemes::{run_scheme, solve_general_from, Scheme, SchemeOptions, WarmStart};

/// Distances (meters) and path-loss exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryParams {
    pub d_tp: f64,
    pub d_pr: f64,
    pub d_pe: f64,
    pub d_te: f64,
    pub gamma: f64,
}

impl Default for GeometryParams {
    fn default() -> Self {
        Self {
            d_tp: 2.0,
            d_pr: 2.0,
            d_pe: 2.0,
            d_te: 2.0,
            gamma: 2.0,
        }
    }
}

impl GeometryParams {
    pub fn validate(&self) -> Result<()> {
        for (name, d) in [("d_tp", self.d_tp), ("d_pr", self.d_pr), ("d_pe", self.d_pe), ("d_te", self.d_te)] {
            if !(d > 0.0 && d.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {d}")));
            }
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!("gamma must be nonnegative, got {}", self.gamma)));
        }
        Ok(())
    }

    fn amplitude(&self, d: f64) -> f64 {
        d.powf(-self.gamma / 2.0)
    }
}

/// Random number stream of one trial.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// `rows×cols` i.i.d. circularly-symmetric complex Gaussian entries of
/// variance `scale²`.
pub fn complex_gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> CMat {
    let s = scale * std::f64::consts::FRAC_1_SQRT_2;
    CMat::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(s * re, s * im)
    })
}

/// Rayleigh channels with path loss `d^{-γ/2}` on the four links that involve
/// the tag or the eavesdropper; the self-interference channel is unscaled.
pub fn generate_channels(params: &SystemParams, geometry: &GeometryParams, seed: u64, trial: u64) -> SystemChannels {
    let (m, n, l, k) = (params.m_tx, params.n_rx, params.l_tag, params.k_eve);
    let mut rng = trial_rng(seed, trial);
    // Column-major fill: each matrix is drawn in full before the next one.
    let h_reader_to_tag = complex_gaussian(&mut rng, l, m, geometry.amplitude(geometry.d_tp));
    let h_tag_to_reader = complex_gaussian(&mut rng, n, l, geometry.amplitude(geometry.d_pr));
    let h_self_interference = complex_gaussian(&mut rng, n, m, 1.0);
    let h_tag_to_eve = complex_gaussian(&mut rng, k, l, geometry.amplitude(geometry.d_pe));
    let h_reader_to_eve = complex_gaussian(&mut rng, k, m, geometry.amplitude(geometry.d_te));
    SystemChannels {
        h_reader_to_tag,
        h_tag_to_reader,
        h_self_interference,
        h_tag_to_eve,
        h_reader_to_eve,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    TotalPowerDbm,
    Alpha,
    Beta,
    MTx,
    KEve,
    DPe,
}

impl SweepVariable {
    pub const ALL: [SweepVariable; 6] = [
        SweepVariable::TotalPowerDbm,
        SweepVariable::Alpha,
        SweepVariable::Beta,
        SweepVariable::MTx,
        SweepVariable::KEve,
        SweepVariable::DPe,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SweepVariable::TotalPowerDbm => "total_power_dbm",
            SweepVariable::Alpha => "alpha",
            SweepVariable::Beta => "beta",
            SweepVariable::MTx => "m_tx",
            SweepVariable::KEve => "k_eve",
            SweepVariable::DPe => "d_pe",
        }
    }

    /// Sets the swept quantity to `value`.
    pub fn apply(&self, params: &mut SystemParams, geometry: &mut GeometryParams, value: f64) -> Result<()> {
        let count = |v: f64| -> Result<usize> {
            if v >= 1.0 && v.fract() == 0.0 && v <= 1024.0 {
                Ok(v as usize)
            } else {
                Err(Error::Config(format!("{} values must be positive integers, got {v}", self.name())))
            }
        };
        match self {
            SweepVariable::TotalPowerDbm => params.total_power = dbm_to_watts(value),
            SweepVariable::Alpha => params.alpha = value,
            SweepVariable::Beta => params.beta = value,
            SweepVariable::MTx => params.m_tx = count(value)?,
            SweepVariable::KEve => params.k_eve = count(value)?,
            SweepVariable::DPe => geometry.d_pe = value,
        }
        Ok(())
    }

    /// Current value of the swept quantity (power in dBm).
    pub fn read(&self, params: &SystemParams, geometry: &GeometryParams) -> f64 {
        match self {
            SweepVariable::TotalPowerDbm => watts_to_dbm(params.total_power),
            SweepVariable::Alpha => params.alpha,
            SweepVariable::Beta => params.beta,
            SweepVariable::MTx => params.m_tx as f64,
            SweepVariable::KEve => params.k_eve as f64,
            SweepVariable::DPe => geometry.d_pe,
        }
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SweepVariable::ALL.into_iter().find(|v| v.name() == s).ok_or_else(|| {
            let names: Vec<_> = SweepVariable::ALL.iter().map(|v| v.name()).collect();
            Error::Config(format!("unknown swept variable `{s}` (expected one of {})", names.join(", ")))
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub params: SystemParams,
    pub geometry: GeometryParams,
    pub options: SchemeOptions,
    pub swept: SweepVariable,
    pub values: Vec<f64>,
    pub trials: usize,
    pub schemes: Vec<Scheme>,
    pub seed: u64,
    /// Report wall-clock time per solve. Off by default so that output files
    /// are reproducible byte for byte.
    pub record_timing: bool,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            params: SystemParams::default(),
            geometry: GeometryParams::default(),
            options: SchemeOptions::default(),
            swept: SweepVariable::TotalPowerDbm,
            values: vec![10.0],
            trials: 1000,
            schemes: vec![Scheme::General, Scheme::NbsAn, Scheme::NsiAn, Scheme::NoAn],
            seed: 0,
            record_timing: false,
        }
    }
}

impl SweepSpec {
    /// Parameters at sweep point `index`.
    pub fn point(&self, index: usize) -> Result<(SystemParams, GeometryParams)> {
        let mut params = self.params.clone();
        let mut geometry = self.geometry.clone();
        self.swept.apply(&mut params, &mut geometry, self.values[index])?;
        Ok((params, geometry))
    }

    /// Checks every point and every scheme's dimension requirements.
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.values.is_empty() {
            return Err(Error::Config("swept_values must not be empty".into()));
        }
        if self.schemes.is_empty() {
            return Err(Error::Config("schemes must not be empty".into()));
        }
        for (i, s) in self.schemes.iter().enumerate() {
            if self.schemes[..i].contains(s) {
                return Err(Error::Config(format!("scheme {s} is listed twice")));
            }
        }
        if let Some(v) = self.values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Config(format!("swept value {v} is not finite")));
        }
        self.options.solver.validate()?;
        if self.options.grid_points < 2 {
            return Err(Error::Config("grid_points must be at least 2".into()));
        }
        for i in 0..self.values.len() {
            let (params, geometry) = self.point(i)?;
            params.validate()?;
            geometry.validate()?;
            for s in &self.schemes {
                s.check_compatible(&params)?;
            }
        }
        Ok(())
    }

    /// Short SHA-256 digest of the full specification.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(format!("{self:?}").as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Outcome of one scheme at one point of one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub secrecy_rate: f64,
    pub solve_ms: f64,
}

/// `samples[point][scheme]`, in the order of `values` and `schemes`.
#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub trial: u64,
    pub samples: Vec<Vec<std::result::Result<Sample, String>>>,
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Runs every scheme at every sweep point on the channels of `trial`.
///
/// The general design is warm-started from the best of `(P, 0)`, the
/// nullspace designs at this point, and its own solution at the previous
/// point when that is still feasible. When the nullspace schemes are part of
/// the sweep their solutions are reused, and their solve time is charged to
/// the general design as well.
pub fn run_trial(spec: &SweepSpec, trial: u64) -> Result<TrialOutcome> {
    let mut samples = Vec::with_capacity(spec.values.len());
    let mut previous_general: Option<Solution> = None;
    for point in 0..spec.values.len() {
        let (params, geometry) = spec.point(point)?;
        let channels = generate_channels(&params, &geometry, spec.seed, trial);
        let inst = Instance::new(channels, params)?;
        let mut row: Vec<Option<std::result::Result<Sample, String>>> = vec![None; spec.schemes.len()];
        let mut starts: Vec<(WarmStart, Solution)> = Vec::new();
        let mut start_ms = 0.0;
        for (i, &scheme) in spec.schemes.iter().enumerate() {
            if scheme == Scheme::General {
                continue;
            }
            let t0 = Instant::now();
            let out = run_scheme(&inst, scheme, &spec.options, None);
            let ms = elapsed_ms(t0);
            if let Ok(o) = &out {
                let kind = match scheme {
                    Scheme::NbsAn => Some(crate::nullspace::NullspaceKind::NoBackscatter),
                    Scheme::NsiAn => Some(crate::nullspace::NullspaceKind::NoSelfInterference),
                    _ => None,
                };
                if let Some(kind) = kind {
                    starts.push((WarmStart::Nullspace(kind), o.solution.clone()));
                    start_ms += ms;
                }
            }
            row[i] = Some(out.map(|o| Sample { secrecy_rate: o.secrecy_rate, solve_ms: ms }).map_err(|e| e.to_string()));
        }
        if let Some(i) = spec.schemes.iter().position(|&s| s == Scheme::General) {
            let t0 = Instant::now();
            let out = general_at_point(&inst, spec, &mut starts, previous_general.take());
            let ms = elapsed_ms(t0) + start_ms;
            row[i] = Some(match out {
                Ok(sol) => {
                    let rate = inst.secrecy_rate(&sol).map_err(|e| e.to_string());
                    previous_general = Some(sol);
                    rate.map(|r| Sample { secrecy_rate: r, solve_ms: ms })
                }
                Err(e) => Err(e.to_string()),
            });
        }
        samples.push(row.into_iter().map(|s| s.expect("every scheme ran")).collect());
    }
    Ok(TrialOutcome { trial, samples })
}

fn general_at_point(
    inst: &Instance,
    spec: &SweepSpec,
    starts: &mut Vec<(WarmStart, Solution)>,
    previous: Option<Solution>,
) -> Result<Solution> {
    let cfg = &spec.options.solver;
    for (kind, scheme) in [
        (crate::nullspace::NullspaceKind::NoBackscatter, Scheme::NbsAn),
        (crate::nullspace::NullspaceKind::NoSelfInterference, Scheme::NsiAn),
    ] {
        if spec.schemes.contains(&scheme) || scheme.check_compatible(&inst.params).is_err() {
            continue;
        }
        let r = crate::nullspace::solve_srm_nullspace(inst, kind, cfg)?;
        starts.push((WarmStart::Nullspace(kind), r.report.solution));
    }
    if let Some(prev) = previous {
        starts.push((WarmStart::Provided, prev));
    }
    Ok(solve_general_from(inst, cfg, starts)?.report.solution)
}

/// Aggregate of one scheme at one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub scheme: Scheme,
    pub swept_value: f64,
    pub mean_cs: f64,
    pub stderr_cs: f64,
    pub trials: usize,
    pub failures: usize,
    pub mean_solve_ms: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub swept: SweepVariable,
    pub seed: u64,
    pub config_hash: String,
    /// Ordered by scheme, then point.
    pub rows: Vec<SweepRow>,
    /// `rates[scheme][point][trial]`, `None` for failed solves.
    pub rates: Vec<Vec<Vec<Option<f64>>>>,
    /// Some point lost more than 1% of its trials to solver failures.
    pub degraded: bool,
    /// First failure message, if any.
    pub first_failure: Option<String>,
}

pub const CSV_HEADER: &str = "scheme,swept_name,swept_value,mean_cs_bps_hz,stderr_cs,trials,failures,mean_solve_ms,seed";

impl SweepResult {
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{CSV_HEADER}")?;
        for r in &self.rows {
            let ms = match r.mean_solve_ms {
                Some(v) => format!("{v}"),
                None => "nan".to_string(),
            };
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{}",
                r.scheme, self.swept, r.swept_value, r.mean_cs, r.stderr_cs, r.trials, r.failures, ms, self.seed
            )?;
        }
        Ok(())
    }

    pub fn row(&self, scheme: Scheme, point: usize) -> Option<&SweepRow> {
        self.rows.iter().filter(|r| r.scheme == scheme).nth(point)
    }
}

/// Runs the sweep on a pool of `threads` workers (at least one).
pub fn run_sweep(spec: &SweepSpec, threads: usize) -> Result<SweepResult> {
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let outcomes: Vec<TrialOutcome> = pool.install(|| {
        (0..spec.trials as u64)
            .into_par_iter()
            .map(|t| run_trial(spec, t))
            .collect::<Result<Vec<_>>>()
    })?;

    let mut rows = Vec::new();
    let mut rates = Vec::new();
    let mut degraded = false;
    let mut first_failure = None;
    for (si, &scheme) in spec.schemes.iter().enumerate() {
        let mut per_point = Vec::new();
        for (pi, &value) in spec.values.iter().enumerate() {
            let mut vals = Vec::with_capacity(spec.trials);
            let mut ms = Vec::with_capacity(spec.trials);
            let mut column = Vec::with_capacity(spec.trials);
            for o in &outcomes {
                match &o.samples[pi][si] {
                    Ok(s) => {
                        vals.push(s.secrecy_rate);
                        ms.push(s.solve_ms);
                        column.push(Some(s.secrecy_rate));
                    }
                    Err(e) => {
                        first_failure.get_or_insert_with(|| format!("{scheme}, point {pi}, trial {}: {e}", o.trial));
                        column.push(None);
                    }
                }
            }
            let failures = spec.trials - vals.len();
            degraded |= failures * 100 > spec.trials;
            let (mean_cs, stderr_cs) = mean_and_stderr(&vals);
            rows.push(SweepRow {
                scheme,
                swept_value: value,
                mean_cs,
                stderr_cs,
                trials: spec.trials,
                failures,
                mean_solve_ms: spec.record_timing.then(|| mean_and_stderr(&ms).0),
            });
            per_point.push(column);
        }
        rates.push(per_point);
    }
    Ok(SweepResult {
        swept: spec.swept,
        seed: spec.seed,
        config_hash: spec.hash(),
        rows,
        rates,
        degraded,
        first_failure,
    })
}

/// Sample mean and standard error of the mean (`0` with fewer than two values).
pub fn mean_and_stderr(v: &[f64]) -> (f64, f64) {
    if v.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
