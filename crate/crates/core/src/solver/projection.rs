//! Euclidean projection onto `{P_s >= 0, Λ ⪰ 0, P_s + Tr Λ <= P}`.
//!
//! The Frobenius norm is unitarily invariant, so projecting `(P̃_s, Λ̃)` reduces
//! to projecting `[P̃_s, eig(Λ̃)]` onto the capped simplex and reassembling with
//! the eigenvectors of `Λ̃`. The simplex part is a water-filling problem: shift
//! every entry down by the smallest level `λ* >= 0` that makes the clipped sum
//! fit the budget.

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::model::Solution;

/// Smallest `λ >= 0` with `Σ max(v_i - λ, 0) <= p_total`.
///
/// Exact, via the sorted-breakpoint method.
pub fn waterfill_level(v: &[f64], p_total: f64) -> f64 {
    let positive: f64 = v.iter().filter(|x| **x > 0.0).sum();
    if positive <= p_total {
        return 0.0;
    }
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    // The active prefix is the longest one whose last entry still sits at or
    // above the level it induces.
    let mut prefix = 0.0;
    let mut level = 0.0;
    for (k, &vk) in sorted.iter().enumerate() {
        prefix += vk;
        let candidate = (prefix - p_total) / (k + 1) as f64;
        if vk >= candidate {
            level = candidate;
        } else {
            break;
        }
    }
    level.max(0.0)
}

/// Projection of `(ps_tilde, lambda_tilde)` onto the feasible set for budget
/// `p_total`. The matrix part is symmetrized before the eigen-decomposition.
pub fn project_feasible(p_total: f64, ps_tilde: f64, lambda_tilde: &CMat) -> Result<Solution> {
    if p_total.is_nan() || p_total < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "projection budget must be nonnegative, got {p_total}"
        )));
    }
    if !ps_tilde.is_finite() || !linalg::is_finite(lambda_tilde) {
        return Err(Error::NonFinite("projection input"));
    }
    let eig = linalg::eigh(lambda_tilde);
    let mut v = Vec::with_capacity(eig.values.len() + 1);
    v.push(ps_tilde);
    v.extend_from_slice(&eig.values);
    let level = waterfill_level(&v, p_total);
    let clipped: Vec<f64> = v.iter().map(|x| (x - level).max(0.0)).collect();
    Ok(Solution {
        p_cw: clipped[0],
        an_cov: linalg::from_eigen(&eig.vectors, &clipped[1..]),
    })
}
