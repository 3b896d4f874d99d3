//! Flat `key = value` run configuration.
//!
//! Lines are `key = value`; `#` starts a comment; blank lines are ignored.
//! Every key is optional. Powers are given in dBm and converted to watts
//! here. Lists are comma separated; numeric lists also accept
//! `start:step:stop` ranges, e.g. `swept_values = -3:2:13`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::model::{dbm_to_watts, watts_to_dbm, SystemParams};
use crate::montecarlo::{GeometryParams, SweepSpec, SweepVariable};
use crate::schemes::{Scheme, SchemeOptions};
use crate::solver::SolverConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub sweep: SweepSpec,
    /// Worker threads for sweeps.
    pub threads: usize,
    /// Sweep CSV destination; standard output when unset.
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            sweep: SweepSpec::default(),
            threads: 1,
            output: None,
        }
    }
}

pub const KEYS: &[&str] = &[
    "m_tx",
    "n_rx",
    "l_tag",
    "k_eve",
    "p_dbm",
    "sigma2_reader_dbm",
    "sigma2_eve_dbm",
    "alpha",
    "beta",
    "d_tp",
    "d_pr",
    "d_pe",
    "d_te",
    "gamma",
    "eps_outer",
    "eps_inner",
    "mu0",
    "shrink",
    "delta",
    "max_outer",
    "max_inner",
    "max_backtrack",
    "grid_points",
    "swept_name",
    "swept_values",
    "trials",
    "schemes",
    "seed",
    "threads",
    "record_timing",
    "output",
];

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Config(format!("invalid value `{v}` for `{key}`")))
}

fn float(key: &str, v: &str) -> Result<f64> {
    let x: f64 = num(key, v)?;
    if !x.is_finite() {
        return Err(Error::Config(format!("`{key}` must be finite, got `{v}`")));
    }
    Ok(x)
}

fn float_list(key: &str, v: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for item in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let parts: Vec<&str> = item.split(':').map(str::trim).collect();
        match parts.as_slice() {
            [x] => out.push(float(key, x)?),
            [start, step, stop] => {
                let (start, step, stop) = (float(key, start)?, float(key, step)?, float(key, stop)?);
                if step <= 0.0 {
                    return Err(Error::Config(format!("`{key}` range step must be positive")));
                }
                let count = ((stop - start) / step + 1e-9).floor();
                if !(0.0..=1e6).contains(&count) {
                    return Err(Error::Config(format!("`{key}` range `{item}` is empty or too long")));
                }
                out.extend((0..=count as usize).map(|i| start + i as f64 * step));
            }
            _ => return Err(Error::Config(format!("invalid list item `{item}` for `{key}`"))),
        }
    }
    if out.is_empty() {
        return Err(Error::Config(format!("`{key}` must list at least one value")));
    }
    Ok(out)
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", i + 1)))?;
            cfg.set(key.trim(), value.trim())
                .map_err(|e| Error::Config(format!("line {}: {}", i + 1, strip_prefix(e))))?;
        }
        Ok(cfg)
    }

    /// Applies one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let s = &mut self.sweep;
        let p = &mut s.params;
        let g = &mut s.geometry;
        let sol = &mut s.options.solver;
        match key {
            "m_tx" => p.m_tx = num(key, value)?,
            "n_rx" => p.n_rx = num(key, value)?,
            "l_tag" => p.l_tag = num(key, value)?,
            "k_eve" => p.k_eve = num(key, value)?,
            "p_dbm" => p.total_power = dbm_to_watts(float(key, value)?),
            "sigma2_reader_dbm" => p.sigma2_reader = dbm_to_watts(float(key, value)?),
            "sigma2_eve_dbm" => p.sigma2_eve = dbm_to_watts(float(key, value)?),
            "alpha" => p.alpha = float(key, value)?,
            "beta" => p.beta = float(key, value)?,
            "d_tp" => g.d_tp = float(key, value)?,
            "d_pr" => g.d_pr = float(key, value)?,
            "d_pe" => g.d_pe = float(key, value)?,
            "d_te" => g.d_te = float(key, value)?,
            "gamma" => g.gamma = float(key, value)?,
            "eps_outer" => sol.eps_outer = float(key, value)?,
            "eps_inner" => sol.eps_inner = float(key, value)?,
            "mu0" => sol.mu0 = float(key, value)?,
            "shrink" => sol.shrink = float(key, value)?,
            "delta" => sol.delta = float(key, value)?,
            "max_outer" => sol.max_outer = num(key, value)?,
            "max_inner" => sol.max_inner = num(key, value)?,
            "max_backtrack" => sol.max_backtrack = num(key, value)?,
            "grid_points" => s.options.grid_points = num(key, value)?,
            "swept_name" => s.swept = value.parse()?,
            "swept_values" => s.values = float_list(key, value)?,
            "trials" => s.trials = num(key, value)?,
            "schemes" => {
                s.schemes = value
                    .split(',')
                    .map(str::trim)
                    .filter(|x| !x.is_empty())
                    .map(str::parse)
                    .collect::<Result<_>>()?
            }
            "seed" => s.seed = num(key, value)?,
            "threads" => self.threads = num(key, value)?,
            "record_timing" => s.record_timing = num(key, value)?,
            "output" => self.output = (!value.is_empty()).then(|| PathBuf::from(value)),
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Applies a `key=value` override as given on the command line.
    pub fn set_pair(&mut self, pair: &str) -> Result<()> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("expected key=value, got `{pair}`")))?;
        self.set(k.trim(), v.trim())
    }

    /// Checks everything a sweep needs, plus `threads`.
    pub fn validate(&self) -> Result<()> {
        if self.threads == 0 {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        self.sweep.validate().map_err(|e| match e {
            Error::InvalidParameter(m) => Error::Config(m),
            other => other,
        })
    }

    /// Canonical dump in the input format; parsing it back gives the same
    /// configuration up to dBm round-off.
    pub fn render(&self) -> String {
        let s = &self.sweep;
        let p = &s.params;
        let g = &s.geometry;
        let sol: &SolverConfig = &s.options.solver;
        let opts: &SchemeOptions = &s.options;
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        kv("m_tx", p.m_tx.to_string());
        kv("n_rx", p.n_rx.to_string());
        kv("l_tag", p.l_tag.to_string());
        kv("k_eve", p.k_eve.to_string());
        kv("p_dbm", watts_to_dbm(p.total_power).to_string());
        kv("sigma2_reader_dbm", watts_to_dbm(p.sigma2_reader).to_string());
        kv("sigma2_eve_dbm", watts_to_dbm(p.sigma2_eve).to_string());
        kv("alpha", p.alpha.to_string());
        kv("beta", p.beta.to_string());
        kv("d_tp", g.d_tp.to_string());
        kv("d_pr", g.d_pr.to_string());
        kv("d_pe", g.d_pe.to_string());
        kv("d_te", g.d_te.to_string());
        kv("gamma", g.gamma.to_string());
        kv("eps_outer", sol.eps_outer.to_string());
        kv("eps_inner", sol.eps_inner.to_string());
        kv("mu0", sol.mu0.to_string());
        kv("shrink", sol.shrink.to_string());
        kv("delta", sol.delta.to_string());
        kv("max_outer", sol.max_outer.to_string());
        kv("max_inner", sol.max_inner.to_string());
        kv("max_backtrack", sol.max_backtrack.to_string());
        kv("grid_points", opts.grid_points.to_string());
        kv("swept_name", s.swept.to_string());
        kv("swept_values", join(s.values.iter()));
        kv("trials", s.trials.to_string());
        kv("schemes", join(s.schemes.iter()));
        kv("seed", s.seed.to_string());
        kv("threads", self.threads.to_string());
        kv("record_timing", s.record_timing.to_string());
        if let Some(o) = &self.output {
            kv("output", o.display().to_string());
        }
        out
    }

    pub fn params(&self) -> &SystemParams {
        &self.sweep.params
    }

    pub fn geometry(&self) -> &GeometryParams {
        &self.sweep.geometry
    }

    pub fn swept(&self) -> SweepVariable {
        self.sweep.swept
    }

    pub fn schemes(&self) -> &[Scheme] {
        &self.sweep.schemes
    }
}

fn join<T: ToString>(items: impl Iterator<Item = T>) -> String {
    items.map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

fn strip_prefix(e: Error) -> String {
    match e {
        Error::Config(m) => m,
        other => other.to_string(),
    }
}
