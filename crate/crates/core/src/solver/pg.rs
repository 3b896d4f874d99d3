use crate::error::Result;
use crate::model::{Instance, Solution};

use super::projection::project_feasible;
use super::surrogate::{surrogate_gradient, surrogate_value, Gradient, SurrogateContext};
use super::{relative_change, AnSubspace, IterateRecord, SolverConfig, SolverReport, Termination};

#[derive(Debug, Clone)]
pub struct ArmijoOutcome {
    pub next: Solution,
    /// Surrogate value at `next`.
    pub value: f64,
    pub mu: f64,
    pub backtracks: usize,
    /// No step was accepted; `next` is the input point.
    pub stalled: bool,
}

/// One projected-gradient step with backtracking on `μ` in the full space.
pub fn armijo_step(
    inst: &Instance,
    ctx: &SurrogateContext,
    x_k: &Solution,
    grad: &Gradient,
    cfg: &SolverConfig,
) -> Result<ArmijoOutcome> {
    let g_k = surrogate_value(inst, ctx, x_k)?;
    armijo_step_in(inst, ctx, &AnSubspace::Full, x_k, g_k, grad, cfg)
}

/// Same as [`armijo_step`], with `x_k` and `grad` expressed in `space`.
pub(crate) fn armijo_step_in(
    inst: &Instance,
    ctx: &SurrogateContext,
    space: &AnSubspace,
    x_k: &Solution,
    g_k: f64,
    grad: &Gradient,
    cfg: &SolverConfig,
) -> Result<ArmijoOutcome> {
    let budget = inst.params.total_power;
    let stalled = |backtracks| ArmijoOutcome {
        next: x_k.clone(),
        value: g_k,
        mu: 0.0,
        backtracks,
        stalled: true,
    };
    let mut mu = cfg.mu0;
    for j in 0..cfg.max_backtrack {
        let cand = project_feasible(
            budget,
            x_k.p_cw + mu * grad.ps,
            &(&x_k.an_cov + grad.lambda.scale(mu)),
        )?;
        let dps = cand.p_cw - x_k.p_cw;
        let dl = &cand.an_cov - &x_k.an_cov;
        if dps == 0.0 && dl.iter().all(|z| z.re == 0.0 && z.im == 0.0) {
            // Π(x + μ∇) = x for one μ > 0 holds for all μ > 0: stationary.
            return Ok(stalled(j));
        }
        let value = surrogate_value(inst, ctx, &space.lift_solution(&cand))?;
        if value > g_k + cfg.delta * grad.pair(dps, &dl) {
            return Ok(ArmijoOutcome {
                next: cand,
                value,
                mu,
                backtracks: j,
                stalled: false,
            });
        }
        mu *= cfg.shrink;
    }
    Ok(stalled(cfg.max_backtrack))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerExit {
    Converged,
    Stalled,
    MaxIterations,
}

#[derive(Debug, Clone)]
pub struct InnerOutcome {
    /// Final iterate, lifted to the full `M×M` covariance.
    pub solution: Solution,
    /// Final iterate in the solver's own coordinates.
    pub reduced: Solution,
    pub iterations: usize,
    /// Surrogate values, starting point first. Nondecreasing.
    pub values: Vec<f64>,
    pub exit: InnerExit,
}

impl InnerOutcome {
    pub fn value(&self) -> f64 {
        *self.values.last().expect("inner trace holds the start value")
    }
}

/// Maximizes the surrogate in `ctx` over the full feasible set.
pub fn solve_inner(
    inst: &Instance,
    ctx: &SurrogateContext,
    x_start: &Solution,
    cfg: &SolverConfig,
) -> Result<InnerOutcome> {
    solve_inner_in(inst, ctx, &AnSubspace::Full, x_start, cfg)
}

pub(crate) fn solve_inner_in(
    inst: &Instance,
    ctx: &SurrogateContext,
    space: &AnSubspace,
    start: &Solution,
    cfg: &SolverConfig,
) -> Result<InnerOutcome> {
    let mut x = start.clone();
    let mut g = surrogate_value(inst, ctx, &space.lift_solution(&x))?;
    let mut values = vec![g];
    let mut exit = InnerExit::MaxIterations;
    let mut iterations = 0;
    while iterations < cfg.max_inner {
        let full = surrogate_gradient(inst, ctx, &space.lift_solution(&x))?;
        let grad = Gradient {
            ps: full.ps,
            lambda: space.restrict(&full.lambda),
        };
        let step = armijo_step_in(inst, ctx, space, &x, g, &grad, cfg)?;
        if step.stalled {
            exit = InnerExit::Stalled;
            break;
        }
        iterations += 1;
        let change = relative_change(step.value, g);
        x = step.next;
        g = step.value;
        values.push(g);
        if change <= cfg.eps_inner {
            exit = InnerExit::Converged;
            break;
        }
    }
    Ok(InnerOutcome {
        solution: space.lift_solution(&x),
        reduced: x,
        iterations,
        values,
        exit,
    })
}

/// Outer loop over the full covariance cone, started at `x_init`.
pub fn solve_srm(inst: &Instance, x_init: &Solution, cfg: &SolverConfig) -> Result<SolverReport> {
    solve_srm_in(inst, &AnSubspace::Full, x_init, cfg)
}

pub(crate) fn solve_srm_in(
    inst: &Instance,
    space: &AnSubspace,
    init: &Solution,
    cfg: &SolverConfig,
) -> Result<SolverReport> {
    cfg.validate()?;
    let budget = inst.params.total_power;
    init.check_feasible(budget)?;
    let mut x = init.clone();
    let mut lifted = space.lift_solution(&x);
    let mut rates = inst.rates(&lifted)?;
    let mut iterates = vec![IterateRecord {
        outer: 0,
        inner_iterations: 0,
        surrogate: None,
        secrecy_rate: rates.secrecy(),
        signed_rate: rates.signed(),
    }];
    let mut termination = Termination::MaxOuterHit;
    let mut inner_capped = false;
    for outer in 1..=cfg.max_outer {
        let ctx = SurrogateContext::new(inst, &lifted)?;
        let inner = solve_inner_in(inst, &ctx, space, &x, cfg)?;
        inner_capped |= inner.exit == InnerExit::MaxIterations;
        let new_rates = inst.rates(&inner.solution)?;
        iterates.push(IterateRecord {
            outer,
            inner_iterations: inner.iterations,
            surrogate: Some(inner.value()),
            secrecy_rate: new_rates.secrecy(),
            signed_rate: new_rates.signed(),
        });
        let change = super::relative_change(new_rates.signed(), rates.signed());
        x = inner.reduced;
        lifted = inner.solution;
        rates = new_rates;
        if change <= cfg.eps_outer {
            termination = if inner_capped {
                Termination::MaxInnerHit
            } else {
                Termination::Converged
            };
            break;
        }
    }
    Ok(SolverReport {
        iterates,
        reduced: match space {
            AnSubspace::Full => None,
            AnSubspace::Basis(_) => Some(x.an_cov),
        },
        solution: lifted,
        rates,
        termination,
    })
}
