//! Self-checks against brute-force references, run by `backsec validate`.
//!
//! Each suite draws random instances at the default parameters and compares a
//! solver component with a slow but obvious computation: central finite
//! differences, bisection, dense grids, or a second construction of the same
//! quantity.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, C64};
use crate::model::{Instance, Solution, SystemParams};
use crate::montecarlo::{complex_gaussian, generate_channels, trial_rng, GeometryParams};
use crate::single_tag::{ratio_objective, solve_single, SingleTagInstance, TCoordinates};
use crate::solver::{
    project_feasible, solve_srm, surrogate_gradient, surrogate_value, waterfill_level, Gradient, SolverConfig,
    SurrogateContext, TaylorSurrogate,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Gradients,
    Projection,
    SingleTag,
    Equivalence,
    Monotonicity,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 6] = ["gradients", "projection", "single_tag", "equivalence", "monotonicity", "all"];

    fn members(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![
                Suite::Gradients,
                Suite::Projection,
                Suite::SingleTag,
                Suite::Equivalence,
                Suite::Monotonicity,
            ],
            s => vec![s],
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "gradients" => Suite::Gradients,
            "projection" => Suite::Projection,
            "single_tag" => Suite::SingleTag,
            "equivalence" => Suite::Equivalence,
            "monotonicity" => Suite::Monotonicity,
            "all" => Suite::All,
            _ => {
                return Err(Error::Config(format!(
                    "unknown suite `{s}` (expected one of {})",
                    Suite::NAMES.join(", ")
                )))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {}: {}", self.name, self.detail)
    }
}

/// Random instance at the default parameters (with `params` overrides).
pub fn random_instance(params: &SystemParams, seed: u64, trial: u64) -> Result<Instance> {
    let ch = generate_channels(params, &GeometryParams::default(), seed, trial);
    Instance::new(ch, params.clone())
}

/// A random feasible point that uses a random fraction of the budget, with a
/// full-rank AN covariance.
pub fn random_feasible_point(rng: &mut ChaCha8Rng, m: usize, total_power: f64) -> Solution {
    let used: f64 = rng.random_range(0.2..1.0);
    let share: f64 = rng.random_range(0.05..0.95);
    let g = complex_gaussian(rng, m, m, 1.0);
    let mut lambda = &g * g.adjoint() + linalg::identity(m).scale(0.1);
    let tr = linalg::real_trace(&lambda);
    lambda = linalg::hermitian_part(&lambda.scale(used * (1.0 - share) * total_power / tr));
    Solution {
        p_cw: used * share * total_power,
        an_cov: lambda,
    }
}

/// Central finite-difference gradient of `f` in the real coordinates of
/// `(P_s, Λ)`, laid out like [`Gradient`]: diagonal entries, then
/// `(Re, Im)` of each upper off-diagonal entry.
pub fn finite_difference_gradient(x: &Solution, h: f64, f: impl Fn(&Solution) -> Result<f64>) -> Result<Gradient> {
    let m = x.an_cov.nrows();
    let diff = |dps: f64, dl: &CMat| -> Result<f64> {
        let plus = Solution {
            p_cw: x.p_cw + h * dps,
            an_cov: &x.an_cov + dl.scale(h),
        };
        let minus = Solution {
            p_cw: x.p_cw - h * dps,
            an_cov: &x.an_cov - dl.scale(h),
        };
        Ok((f(&plus)? - f(&minus)?) / (2.0 * h))
    };
    let zero = CMat::zeros(m, m);
    let ps = diff(1.0, &zero)?;
    let mut lambda = CMat::zeros(m, m);
    for j in 0..m {
        let mut e = zero.clone();
        e[(j, j)] = C64::new(1.0, 0.0);
        lambda[(j, j)] = C64::new(diff(0.0, &e)?, 0.0);
        for k in (j + 1)..m {
            let mut sym = zero.clone();
            sym[(j, k)] = C64::new(1.0, 0.0);
            sym[(k, j)] = C64::new(1.0, 0.0);
            let mut asym = zero.clone();
            asym[(j, k)] = C64::new(0.0, 1.0);
            asym[(k, j)] = C64::new(0.0, -1.0);
            // A Hermitian step in the (j, k) pair moves the pairing by twice
            // the entry of the gradient.
            let re = diff(0.0, &sym)? / 2.0;
            let im = diff(0.0, &asym)? / 2.0;
            lambda[(j, k)] = C64::new(re, im);
            lambda[(k, j)] = C64::new(re, -im);
        }
    }
    Ok(Gradient { ps, lambda })
}

fn max_rel_error(a: &Gradient, b: &Gradient) -> f64 {
    let diff = Gradient {
        ps: a.ps - b.ps,
        lambda: &a.lambda - &b.lambda,
    };
    diff.max_abs() / b.max_abs().max(f64::MIN_POSITIVE)
}

fn check_gradients(n: usize, seed: u64) -> Result<Check> {
    let params = SystemParams::default();
    let mut worst: f64 = 0.0;
    for i in 0..n as u64 {
        let inst = random_instance(&params, seed, i)?;
        let mut rng = trial_rng(seed ^ 0x9e37, i);
        let anchor = random_feasible_point(&mut rng, inst.m(), params.total_power);
        let x = random_feasible_point(&mut rng, inst.m(), params.total_power);
        let ctx = SurrogateContext::new(&inst, &anchor)?;
        let an = surrogate_gradient(&inst, &ctx, &x)?;
        let fd = finite_difference_gradient(&x, 1e-6 * params.total_power, |y| surrogate_value(&inst, &ctx, y))?;
        worst = worst.max(max_rel_error(&fd, &an));
    }
    Ok(Check {
        name: "surrogate gradient vs central differences",
        passed: worst <= 1e-4,
        detail: format!("{n} points, max relative error {worst:.3e} (limit 1e-4)"),
    })
}

fn bisection_level(v: &[f64], p: f64) -> f64 {
    let used = |lvl: f64| v.iter().map(|x| (x - lvl).max(0.0)).sum::<f64>();
    if used(0.0) <= p {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, v.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if used(mid) > p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn check_projection(n: usize, seed: u64) -> Result<Vec<Check>> {
    let mut rng = trial_rng(seed, 0x5052);
    let mut worst_level: f64 = 0.0;
    for _ in 0..n * 20 {
        let len = rng.random_range(1..7usize);
        let v: Vec<f64> = (0..len).map(|_| rng.random_range(-2.0..3.0)).collect();
        let p: f64 = rng.random_range(0.0..4.0);
        let a = waterfill_level(&v, p);
        worst_level = worst_level.max((a - bisection_level(&v, p)).abs());
    }
    let mut worst_vi: f64 = f64::NEG_INFINITY;
    for _ in 0..n {
        let m = rng.random_range(1..5usize);
        let p: f64 = rng.random_range(0.1..2.0);
        let g = complex_gaussian(&mut rng, m, m, 1.0);
        let target_l = linalg::hermitian_part(&g);
        let target_p: f64 = rng.random_range(-1.0..2.0);
        let proj = project_feasible(p, target_p, &target_l)?;
        for _ in 0..50 {
            let y = random_feasible_point(&mut rng, m, p);
            let vi = (target_p - proj.p_cw) * (y.p_cw - proj.p_cw)
                + linalg::real_inner(&(&target_l - &proj.an_cov), &(&y.an_cov - &proj.an_cov));
            worst_vi = worst_vi.max(vi);
        }
    }
    Ok(vec![
        Check {
            name: "water-filling level vs bisection",
            passed: worst_level <= 1e-10,
            detail: format!("{} vectors, max deviation {worst_level:.3e} (limit 1e-10)", n * 20),
        },
        Check {
            name: "projection variational inequality",
            passed: worst_vi <= 1e-8,
            detail: format!("{n} targets x 50 feasible points, max inner product {worst_vi:.3e} (limit 1e-8)"),
        },
    ])
}

fn check_single_tag(n: usize, seed: u64) -> Result<Vec<Check>> {
    let params = SystemParams {
        l_tag: 1,
        ..SystemParams::default()
    };
    let grid = 400;
    let mut worst_gap: f64 = 0.0;
    let mut worst_excess: f64 = 0.0;
    for i in 0..n as u64 {
        let inst = random_instance(&params, seed, i)?;
        let single = SingleTagInstance::from_instance(&inst)?;
        let tc = TCoordinates::new(&single)?;
        let sol = solve_single(&single, 2001)?;
        let mut best = f64::NEG_INFINITY;
        for a in 0..=grid {
            // Uniform in θ with t = sin²θ, which resolves both ends of [0, 1].
            let t = (std::f64::consts::FRAC_PI_2 * a as f64 / grid as f64).sin().powi(2).min(1.0);
            for b in 0..=grid {
                let ps = params.total_power * b as f64 / grid as f64;
                best = best.max(ratio_objective(&single, &tc, ps, t)?);
            }
        }
        let grid_rate = best.log2().max(0.0);
        let scale = grid_rate.max(sol.secrecy_rate).max(f64::MIN_POSITIVE);
        worst_gap = worst_gap.max((sol.secrecy_rate - grid_rate).abs() / scale);
        worst_excess = worst_excess.max((grid_rate - sol.secrecy_rate) / scale);
    }
    Ok(vec![
        Check {
            name: "single-tag optimum vs dense grid",
            passed: worst_gap <= 1e-3,
            detail: format!("{n} instances, {0}x{0} grid, max relative rate gap {worst_gap:.3e} (limit 1e-3)", grid + 1),
        },
        Check {
            name: "single-tag optimum never below the grid",
            passed: worst_excess <= 1e-9,
            detail: format!("largest relative grid excess {worst_excess:.3e} (limit 1e-9)"),
        },
    ])
}

fn check_equivalence(n: usize, seed: u64) -> Result<Check> {
    let params = SystemParams::default();
    let mut worst: f64 = 0.0;
    for i in 0..n as u64 {
        let inst = random_instance(&params, seed, i)?;
        let mut rng = trial_rng(seed ^ 0xe0, i);
        let anchor = random_feasible_point(&mut rng, inst.m(), params.total_power);
        let x = random_feasible_point(&mut rng, inst.m(), params.total_power);
        let ctx = SurrogateContext::new(&inst, &anchor)?;
        let taylor = TaylorSurrogate::new(&inst, &anchor)?;
        worst = worst.max(max_rel_error(&taylor.gradient(&x)?, &surrogate_gradient(&inst, &ctx, &x)?));
    }
    Ok(Check {
        name: "closed-form vs linearized subproblem gradients",
        passed: worst <= 1e-10,
        detail: format!("{n} points, max relative difference {worst:.3e} (limit 1e-10)"),
    })
}

fn check_monotonicity(n: usize, seed: u64) -> Result<Check> {
    let params = SystemParams::default();
    let cfg = SolverConfig::default();
    let mut worst_drop: f64 = 0.0;
    let mut max_outer = 0;
    for i in 0..n as u64 {
        let inst = random_instance(&params, seed, i)?;
        let report = solve_srm(&inst, &Solution::no_an(params.total_power, inst.m()), &cfg)?;
        for w in report.iterates.windows(2) {
            worst_drop = worst_drop.max(w[0].secrecy_rate - w[1].secrecy_rate);
        }
        max_outer = max_outer.max(report.outer_iterations());
    }
    Ok(Check {
        name: "nondecreasing outer secrecy-rate traces",
        passed: worst_drop <= 1e-9 && max_outer < cfg.max_outer,
        detail: format!("{n} instances, largest decrease {worst_drop:.3e}, most outer iterations {max_outer}"),
    })
}

/// Runs `suite` on `n` random instances drawn from `seed`.
pub fn run_suite(suite: Suite, n: usize, seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for s in suite.members() {
        match s {
            Suite::Gradients => out.push(check_gradients(n, seed)?),
            Suite::Projection => out.extend(check_projection(n, seed)?),
            Suite::SingleTag => out.extend(check_single_tag(n, seed)?),
            Suite::Equivalence => out.push(check_equivalence(n, seed)?),
            Suite::Monotonicity => out.push(check_monotonicity(n, seed)?),
            Suite::All => unreachable!(),
        }
    }
    Ok(out)
}
