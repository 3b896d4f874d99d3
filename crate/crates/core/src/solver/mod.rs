//! Secrecy-rate maximization by successive concave surrogates.
//!
//! Each outer step rebuilds the surrogate around the previous solution (the
//! closed-form auxiliary matrices of the alternating method coincide with the
//! first-order Taylor linearization, so one code path serves both views) and
//! maximizes it with projected gradient ascent: Armijo backtracking on the
//! step length along the projection arc, full step otherwise.

mod pg;
mod projection;
mod surrogate;

pub use pg::{armijo_step, solve_inner, solve_srm, ArmijoOutcome, InnerExit, InnerOutcome};
pub(crate) use pg::solve_srm_in;
pub use projection::{project_feasible, waterfill_level};
pub use surrogate::{
    concave_part, surrogate_gradient, surrogate_value, Gradient, SurrogateContext, TaylorSurrogate,
};

use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::model::{Rates, Solution};

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Relative secrecy-rate change that ends the outer loop.
    pub eps_outer: f64,
    /// Relative surrogate change that ends an inner loop.
    pub eps_inner: f64,
    /// Initial trial step of every line search.
    pub mu0: f64,
    /// Backtracking factor.
    pub shrink: f64,
    /// Armijo sufficient-increase fraction.
    pub delta: f64,
    pub max_outer: usize,
    pub max_inner: usize,
    pub max_backtrack: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            eps_outer: 1e-3,
            eps_inner: 1e-5,
            mu0: 1.0,
            shrink: 0.5,
            delta: 0.1,
            max_outer: 200,
            max_inner: 2000,
            max_backtrack: 60,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(what.to_string()));
        if !(self.eps_outer > 0.0 && self.eps_inner > 0.0) {
            return bad("eps_outer and eps_inner must be positive");
        }
        if !(self.mu0 > 0.0 && self.mu0.is_finite()) {
            return bad("mu0 must be positive");
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return bad("shrink must lie in (0, 1)");
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad("delta must lie in (0, 1)");
        }
        if self.max_outer == 0 || self.max_inner == 0 || self.max_backtrack == 0 {
            return bad("iteration caps must be positive");
        }
        Ok(())
    }
}

/// Where the AN covariance lives: the full `M×M` cone or `Λ = V W V^H` for an
/// orthonormal basis `V`.
#[derive(Debug, Clone)]
pub enum AnSubspace {
    Full,
    Basis(CMat),
}

impl AnSubspace {
    pub fn lift(&self, w: &CMat) -> CMat {
        match self {
            AnSubspace::Full => w.clone(),
            AnSubspace::Basis(v) => crate::linalg::hermitian_part(&(v * w * v.adjoint())),
        }
    }

    /// Chain rule: `∇_W g = V^H ∇_Λ g V`.
    pub fn restrict(&self, grad: &CMat) -> CMat {
        match self {
            AnSubspace::Full => grad.clone(),
            AnSubspace::Basis(v) => crate::linalg::hermitian_part(&(v.adjoint() * grad * v)),
        }
    }

    pub fn lift_solution(&self, reduced: &Solution) -> Solution {
        Solution {
            p_cw: reduced.p_cw,
            an_cov: self.lift(&reduced.an_cov),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    MaxOuterHit,
    MaxInnerHit,
}

/// One row of the outer trace. Row 0 is the starting point.
#[derive(Debug, Clone, PartialEq)]
pub struct IterateRecord {
    pub outer: usize,
    pub inner_iterations: usize,
    /// Surrogate value reached by the inner solve; `None` for the start.
    pub surrogate: Option<f64>,
    pub secrecy_rate: f64,
    pub signed_rate: f64,
}

#[derive(Debug, Clone)]
pub struct SolverReport {
    pub iterates: Vec<IterateRecord>,
    pub solution: Solution,
    /// Reduced covariance `W` when solved in a subspace.
    pub reduced: Option<CMat>,
    pub rates: Rates,
    pub termination: Termination,
}

impl SolverReport {
    pub fn secrecy_rate(&self) -> f64 {
        self.rates.secrecy()
    }

    pub fn outer_iterations(&self) -> usize {
        self.iterates.len() - 1
    }

    pub fn inner_iterations(&self) -> usize {
        self.iterates.iter().map(|r| r.inner_iterations).sum()
    }
}

/// `|(v - prev) / prev|` with the denominator floored at `1e-12`.
pub(crate) fn relative_change(v: f64, prev: f64) -> f64 {
    (v - prev).abs() / prev.abs().max(1e-12)
}
