//! The AN designs compared in the experiments, behind one entry point.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{Instance, SystemParams, Solution};
use crate::nullspace::{solve_srm_nullspace, NullspaceKind};
use crate::single_tag::{mrc_rates, solve_single, solve_single_nullspace, SingleTagInstance};
use crate::solver::{solve_srm, SolverConfig, SolverReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    /// Unrestricted AN covariance, warm-started from the best simple design.
    General,
    NbsAn,
    NsiAn,
    /// All power on the carrier.
    NoAn,
    /// Global optimum for `L = 1` against an MRC eavesdropper.
    SingleOptimal,
    /// `L = 1`, AN in the nullspace of the reader→tag channel.
    SingleNullspace,
}

impl Scheme {
    pub const ALL: [Scheme; 6] = [
        Scheme::General,
        Scheme::NbsAn,
        Scheme::NsiAn,
        Scheme::NoAn,
        Scheme::SingleOptimal,
        Scheme::SingleNullspace,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::General => "general",
            Scheme::NbsAn => "nbs_an",
            Scheme::NsiAn => "nsi_an",
            Scheme::NoAn => "no_an",
            Scheme::SingleOptimal => "single_optimal",
            Scheme::SingleNullspace => "single_nullspace",
        }
    }

    /// Dimension preconditions of the scheme.
    pub fn check_compatible(&self, p: &SystemParams) -> Result<()> {
        let fail = |msg: String| Err(Error::Unsupported(format!("{self}: {msg}")));
        match self {
            Scheme::NbsAn if p.m_tx <= p.l_tag => {
                fail(format!("requires M > L (got M = {}, L = {})", p.m_tx, p.l_tag))
            }
            Scheme::NsiAn if p.m_tx <= p.n_rx => {
                fail(format!("requires M > N (got M = {}, N = {})", p.m_tx, p.n_rx))
            }
            Scheme::SingleOptimal | Scheme::SingleNullspace if p.l_tag != 1 => {
                fail(format!("requires L = 1 (got L = {})", p.l_tag))
            }
            Scheme::SingleNullspace if p.m_tx < 2 => fail("requires M > 1".into()),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|sch| sch.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Scheme::ALL.iter().map(|s| s.name()).collect();
                Error::Config(format!("unknown scheme `{s}` (expected one of {})", names.join(", ")))
            })
    }
}

/// Which starting point the general design was launched from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WarmStart {
    NoAn,
    Nullspace(NullspaceKind),
    /// A caller-supplied point, e.g. the solution at the previous sweep value.
    Provided,
}

impl fmt::Display for WarmStart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WarmStart::NoAn => f.write_str("no_an"),
            WarmStart::Nullspace(k) => write!(f, "{k}"),
            WarmStart::Provided => f.write_str("provided"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GeneralOutcome {
    pub report: SolverReport,
    pub warm_start: WarmStart,
}

/// Runs the general design from `(P, 0)` and from every feasible candidate
/// and keeps the best final point (highest secrecy rate, ties by the signed
/// rate, then by order). Infeasible or misshapen candidates are skipped.
pub fn solve_general_from(
    inst: &Instance,
    cfg: &SolverConfig,
    candidates: &[(WarmStart, Solution)],
) -> Result<GeneralOutcome> {
    let p = inst.params.total_power;
    let base = (WarmStart::NoAn, Solution::no_an(p, inst.m()));
    let mut best: Option<(GeneralOutcome, (f64, f64))> = None;
    for (start, sol) in std::iter::once(&base).chain(candidates.iter()) {
        if sol.an_cov.shape() != (inst.m(), inst.m()) || sol.check_feasible(p).is_err() {
            continue;
        }
        let report = solve_srm(inst, sol, cfg)?;
        let key = (report.rates.secrecy(), report.rates.signed());
        if best.as_ref().is_none_or(|b| key > b.1) {
            best = Some((GeneralOutcome { report, warm_start: *start }, key));
        }
    }
    Ok(best.expect("the no-AN start is always feasible").0)
}

/// General design started from `(P, 0)` and from whichever nullspace designs
/// the dimensions allow.
pub fn solve_general(inst: &Instance, cfg: &SolverConfig) -> Result<GeneralOutcome> {
    solve_general_from(inst, cfg, &nullspace_starts(inst, cfg)?)
}

fn nullspace_starts(inst: &Instance, cfg: &SolverConfig) -> Result<Vec<(WarmStart, Solution)>> {
    let mut out = Vec::new();
    for kind in [NullspaceKind::NoBackscatter, NullspaceKind::NoSelfInterference] {
        match solve_srm_nullspace(inst, kind, cfg) {
            Ok(r) => out.push((WarmStart::Nullspace(kind), r.report.solution)),
            Err(Error::Unsupported(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct SchemeOutcome {
    pub scheme: Scheme,
    pub solution: Solution,
    pub secrecy_rate: f64,
    pub outer_iterations: usize,
    pub inner_iterations: usize,
    /// Only set for the general design.
    pub warm_start: Option<WarmStart>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeOptions {
    pub solver: SolverConfig,
    /// `t` grid size of the single-tag global search.
    pub grid_points: usize,
}

impl Default for SchemeOptions {
    fn default() -> Self {
        Self {
            solver: SolverConfig::default(),
            grid_points: 2001,
        }
    }
}

fn from_report(scheme: Scheme, report: SolverReport, warm_start: Option<WarmStart>) -> SchemeOutcome {
    SchemeOutcome {
        scheme,
        secrecy_rate: report.secrecy_rate(),
        outer_iterations: report.outer_iterations(),
        inner_iterations: report.inner_iterations(),
        solution: report.solution,
        warm_start,
    }
}

/// Solves `inst` with `scheme`. `extra_start` is offered to the general
/// design as an additional warm start and ignored by the other schemes.
pub fn run_scheme(
    inst: &Instance,
    scheme: Scheme,
    opts: &SchemeOptions,
    extra_start: Option<&Solution>,
) -> Result<SchemeOutcome> {
    scheme.check_compatible(&inst.params)?;
    let cfg = &opts.solver;
    match scheme {
        Scheme::General => {
            let mut candidates = nullspace_starts(inst, cfg)?;
            if let Some(s) = extra_start {
                candidates.push((WarmStart::Provided, s.clone()));
            }
            let out = solve_general_from(inst, cfg, &candidates)?;
            Ok(from_report(scheme, out.report, Some(out.warm_start)))
        }
        Scheme::NbsAn | Scheme::NsiAn => {
            let kind = if scheme == Scheme::NbsAn {
                NullspaceKind::NoBackscatter
            } else {
                NullspaceKind::NoSelfInterference
            };
            let out = solve_srm_nullspace(inst, kind, cfg)?;
            Ok(from_report(scheme, out.report, None))
        }
        Scheme::NoAn => {
            let solution = Solution::no_an(inst.params.total_power, inst.m());
            Ok(SchemeOutcome {
                scheme,
                secrecy_rate: inst.secrecy_rate(&solution)?,
                solution,
                outer_iterations: 0,
                inner_iterations: 0,
                warm_start: None,
            })
        }
        Scheme::SingleOptimal | Scheme::SingleNullspace => {
            let single = SingleTagInstance::from_instance(inst)?;
            let out = if scheme == Scheme::SingleOptimal {
                solve_single(&single, opts.grid_points)?
            } else {
                solve_single_nullspace(&single)?
            };
            let rate = mrc_rates(&single, &out.solution)?.secrecy();
            Ok(SchemeOutcome {
                scheme,
                solution: out.solution,
                secrecy_rate: rate,
                outer_iterations: 0,
                inner_iterations: 0,
                warm_start: None,
            })
        }
    }
}
