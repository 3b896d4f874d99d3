//! Global solver for a single-antenna tag.
//!
//! Assumes the eavesdropper combines with MRC (it is unaware of the AN) and
//! that the reader cancels its self-interference (`β = 0`). Under these
//! assumptions the optimal AN is rank one and uses the remaining power, so
//! `Λ = (P - P_s) v v^H`. Writing `t = |d_1^H v|²` for the share of AN that
//! reaches the tag, the best direction for a given `t` and the resulting
//! eavesdropper leakage `r(t)` have closed forms, and for each `t` the best
//! carrier power is a root of a quadratic or the full budget. What remains is
//! a one-dimensional search over `t ∈ [0, 1]`.

use std::f64::consts::{FRAC_PI_2, LN_2, PI};

use crate::error::{Error, Result};
use crate::linalg::{CMat, CVec, C64};
use crate::model::{Instance, Rates, Solution};

/// Channels of a single-antenna tag and the scalar parameters the global
/// solver needs. `β` is identically zero here.
#[derive(Debug, Clone)]
pub struct SingleTagInstance {
    /// `h_tp`, so that the reader→tag channel is `h_tp^H` (`M`).
    pub h_tp: CVec,
    /// Tag→reader (`N`).
    pub h_pr: CVec,
    /// Tag→eavesdropper (`K`).
    pub h_pe: CVec,
    /// Reader→eavesdropper (`K×M`).
    pub h_te: CMat,
    pub alpha: f64,
    pub sigma2_reader: f64,
    pub sigma2_eve: f64,
    pub total_power: f64,
    /// `√(1/M) h_tp^H 1_M`.
    pub d_tp: C64,
}

impl SingleTagInstance {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        h_tp: CVec,
        h_pr: CVec,
        h_pe: CVec,
        h_te: CMat,
        alpha: f64,
        sigma2_reader: f64,
        sigma2_eve: f64,
        total_power: f64,
    ) -> Result<Self> {
        let m = h_tp.len();
        if m == 0 || h_pr.is_empty() || h_pe.is_empty() {
            return Err(Error::InvalidParameter("antenna counts must be positive".into()));
        }
        if h_te.shape() != (h_pe.len(), m) {
            return Err(Error::DimensionMismatch {
                context: "h_te",
                expected: (h_pe.len(), m),
                found: h_te.shape(),
            });
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidParameter(format!("alpha must lie in [0, 1], got {alpha}")));
        }
        if !(sigma2_reader > 0.0 && sigma2_eve > 0.0) {
            return Err(Error::InvalidParameter("noise variances must be positive".into()));
        }
        if !(total_power >= 0.0 && total_power.is_finite()) {
            return Err(Error::InvalidParameter(format!("total_power must be nonnegative, got {total_power}")));
        }
        let d_tp = h_tp.iter().map(|z| z.conj()).sum::<C64>() * (1.0 / m as f64).sqrt();
        Ok(Self {
            h_tp,
            h_pr,
            h_pe,
            h_te,
            alpha,
            sigma2_reader,
            sigma2_eve,
            total_power,
            d_tp,
        })
    }

    /// Extracts the single-tag view of a general instance with `L = 1`. The
    /// instance's `β` is not used.
    pub fn from_instance(inst: &Instance) -> Result<Self> {
        let p = &inst.params;
        if p.l_tag != 1 {
            return Err(Error::Unsupported(format!(
                "single-antenna tag schemes require L = 1 (got L = {})",
                p.l_tag
            )));
        }
        let ch = &inst.channels;
        Self::new(
            ch.h_reader_to_tag.row(0).adjoint(),
            ch.h_tag_to_reader.column(0).into_owned(),
            ch.h_tag_to_eve.column(0).into_owned(),
            ch.h_reader_to_eve.clone(),
            p.alpha,
            p.sigma2_reader,
            p.sigma2_eve,
            p.total_power,
        )
    }

    pub fn m(&self) -> usize {
        self.h_tp.len()
    }

    fn eve_direction(&self) -> CVec {
        self.h_te.adjoint() * &self.h_pe
    }
}

/// Geometry of the two directions that matter for the AN.
#[derive(Debug, Clone)]
pub struct TCoordinates {
    /// `h_tp / ‖h_tp‖`.
    pub d1: CVec,
    /// `H_te^H h_pe / ‖H_te^H h_pe‖`, or a unit vector orthogonal to `d1`
    /// when the eavesdropper receives no direct AN.
    pub d2: CVec,
    /// `|d_1^H d_2|`.
    pub kappa: f64,
    /// `arg(d_2^H d_1)` in `(-π, π]`.
    pub phi: f64,
}

const ALIGNMENT_TOL: f64 = 1e-10;

impl TCoordinates {
    pub fn new(inst: &SingleTagInstance) -> Result<Self> {
        let tp_norm = inst.h_tp.norm();
        if tp_norm < 1e-300 {
            return Err(Error::VanishingDenominator("‖h_tp‖"));
        }
        let d1 = inst.h_tp.unscale(tp_norm);
        let eve = inst.eve_direction();
        let eve_norm = eve.norm();
        let d2 = if eve_norm > 1e-300 {
            eve.unscale(eve_norm)
        } else {
            orthogonal_unit(&d1).unwrap_or_else(|| d1.clone())
        };
        let inner = d2.dotc(&d1);
        let mut phi = inner.im.atan2(inner.re);
        if phi <= -PI {
            phi = PI;
        }
        Ok(Self {
            kappa: inner.norm().min(1.0),
            phi,
            d1,
            d2,
        })
    }

    /// `κ = 1` within tolerance: `d_1` and `d_2` span a single direction.
    pub fn is_aligned(&self) -> bool {
        1.0 - self.kappa <= ALIGNMENT_TOL
    }

    fn check(&self, t: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidParameter(format!("t must lie in [0, 1], got {t}")));
        }
        if self.is_aligned() {
            return Err(Error::DegenerateAlignment { kappa: self.kappa });
        }
        Ok(())
    }

    /// Largest `|d_2^H v|²` over unit `v` with `|d_1^H v|² = t`; errs when `κ = 1`.
    pub fn r_of_t(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        let k = self.kappa;
        let s = k * (1.0 - t).sqrt() - ((1.0 - k * k) * t).sqrt();
        Ok((1.0 - s * s).clamp(0.0, 1.0))
    }

    /// The maximizing direction behind [`TCoordinates::r_of_t`].
    pub fn v_of_t(&self, t: f64) -> Result<CVec> {
        self.check(t)?;
        let k = self.kappa;
        let s = ((1.0 - t) / (1.0 - k * k)).sqrt();
        let phase = C64::from_polar(1.0, PI - self.phi);
        Ok(self.d1.scale(1.0) * (phase * (k * s - t.sqrt())) + self.d2.map(|z| z * s))
    }

    /// `(r(t), v(t))`, falling back to the aligned case when `κ = 1`: then
    /// `|d_2^H v|² = |d_1^H v|²` for every `v`, so `r(t) = t` and any unit `v`
    /// with the right tag share is optimal. With `M = 1` only `t = 1` exists.
    fn profile(&self, t: f64) -> Result<(f64, CVec)> {
        if !self.is_aligned() {
            return Ok((self.r_of_t(t)?, self.v_of_t(t)?));
        }
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidParameter(format!("t must lie in [0, 1], got {t}")));
        }
        match orthogonal_unit(&self.d1) {
            Some(u) => Ok((t, self.d1.map(|z| z * t.sqrt()) + u.map(|z| z * (1.0 - t).sqrt()))),
            None if t == 1.0 => Ok((1.0, self.d1.clone())),
            None => Err(Error::Unsupported("a single transmit antenna cannot steer AN away from the tag".into())),
        }
    }
}

/// A unit vector orthogonal to `d` (unit), or `None` in one dimension.
fn orthogonal_unit(d: &CVec) -> Option<CVec> {
    if d.len() < 2 {
        return None;
    }
    let j = (0..d.len())
        .min_by(|&a, &b| d[a].norm().total_cmp(&d[b].norm()))
        .expect("nonempty");
    let mut e = CVec::zeros(d.len());
    e[j] = C64::new(1.0, 0.0);
    let u = &e - d * d.dotc(&e);
    let n = u.norm();
    Some(u.unscale(n))
}

/// Coefficients of `y^t(P_s) = (1 + a P_s / (1 + b P_s)) / (1 + c P_s / (1 + d P_s))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub l1: f64,
    pub l2: f64,
}

impl PowerCoefficients {
    pub fn new(inst: &SingleTagInstance, t: f64, r: f64) -> Self {
        let p = inst.total_power;
        let dtp2 = inst.d_tp.norm_sqr();
        let pr2 = inst.h_pr.norm_squared();
        let pe2 = inst.h_pe.norm_squared();
        let tp2 = inst.h_tp.norm_squared();
        let l1 = inst.alpha * pr2 * tp2 * t;
        let l2 = if pe2 > 0.0 {
            pe2 * tp2 * t + inst.eve_direction().norm_squared() * r / pe2
        } else {
            0.0
        };
        let den_r = inst.sigma2_reader + p * l1;
        let den_e = inst.sigma2_eve + p * l2;
        Self {
            a: dtp2 * pr2 / den_r,
            b: -l1 / den_r,
            c: dtp2 * pe2 / den_e,
            d: -l2 / den_e,
            l1,
            l2,
        }
    }

    pub fn eval(&self, ps: f64) -> f64 {
        (1.0 + self.a * ps / (1.0 + self.b * ps)) / (1.0 + self.c * ps / (1.0 + self.d * ps))
    }

    /// Stationary points of `y^t` (roots of its derivative's numerator).
    pub fn stationary_points(&self) -> Vec<f64> {
        let PowerCoefficients { a, b, c, d, .. } = *self;
        let lead = a * d * d + a * c * d - a * b * c - b * b * c;
        let lead_scale = (a * d * d).abs() + (a * c * d).abs() + (a * b * c).abs() + (b * b * c).abs();
        let lin = a * d - b * c;
        let lin_scale = (a * d).abs() + (b * c).abs();
        if lead.abs() > 1e-14 * lead_scale {
            let disc = a * c * (b - d) * (a + b - c - d);
            if disc < 0.0 {
                return Vec::new();
            }
            let den = b * b * c + a * (b * c - d * (c + d));
            let root = disc.sqrt();
            vec![(lin + root) / den, (lin - root) / den]
        } else if lin.abs() > 1e-14 * lin_scale {
            vec![-(a - c) / (2.0 * lin)]
        } else {
            Vec::new()
        }
    }
}

/// `y(P_s, t)` written out directly from the rate ratio.
pub fn ratio_objective(inst: &SingleTagInstance, tc: &TCoordinates, ps: f64, t: f64) -> Result<f64> {
    let (r, _) = tc.profile(t)?;
    let p_an = inst.total_power - ps;
    let dtp2 = inst.d_tp.norm_sqr();
    let pr2 = inst.h_pr.norm_squared();
    let pe2 = inst.h_pe.norm_squared();
    let tp2 = inst.h_tp.norm_squared();
    let reader = 1.0 + ps * dtp2 * pr2 / (inst.alpha * pr2 * tp2 * p_an * t + inst.sigma2_reader);
    let eve = if pe2 > 0.0 {
        let leak = inst.eve_direction().norm_squared() * p_an * r / pe2;
        1.0 + ps * dtp2 * pe2 / (pe2 * tp2 * p_an * t + leak + inst.sigma2_eve)
    } else {
        1.0
    };
    Ok(reader / eve)
}

/// `{P_s,1, P_s,2, P} ∩ [0, P]` for the given `t`.
pub fn ps_candidates(inst: &SingleTagInstance, tc: &TCoordinates, t: f64) -> Result<Vec<f64>> {
    let (r, _) = tc.profile(t)?;
    let p = inst.total_power;
    let coef = PowerCoefficients::new(inst, t, r);
    let mut out: Vec<f64> = coef
        .stationary_points()
        .into_iter()
        .filter(|x| x.is_finite() && (0.0..=p).contains(x))
        .collect();
    out.push(p);
    Ok(out)
}

/// Best `(y, P_s)` for a fixed `t`, also trying `P_s = 0`.
fn best_power(inst: &SingleTagInstance, tc: &TCoordinates, t: f64) -> Result<(f64, f64)> {
    let (r, _) = tc.profile(t)?;
    let coef = PowerCoefficients::new(inst, t, r);
    let mut best = (coef.eval(0.0), 0.0);
    for ps in ps_candidates(inst, tc, t)? {
        let y = coef.eval(ps);
        if !y.is_finite() {
            return Err(Error::NonFinite("single-tag objective"));
        }
        if y > best.0 {
            best = (y, ps);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone)]
pub struct SingleTagSolution {
    pub solution: Solution,
    pub secrecy_rate: f64,
    pub t_star: f64,
    /// Optimal rate ratio `(1 + SINR_r) / (1 + SINR_e)`.
    pub ratio: f64,
}

fn assemble(inst: &SingleTagInstance, tc: &TCoordinates, t: f64, ps: f64, ratio: f64) -> Result<SingleTagSolution> {
    let (_, v) = tc.profile(t)?;
    let p_an = (inst.total_power - ps).max(0.0);
    let an_cov = (&v * v.adjoint()).scale(p_an);
    Ok(SingleTagSolution {
        solution: Solution {
            p_cw: ps,
            an_cov: crate::linalg::hermitian_part(&an_cov),
        },
        secrecy_rate: (ratio.log2()).max(0.0),
        t_star: t,
        ratio,
    })
}

fn zero_power(inst: &SingleTagInstance) -> SingleTagSolution {
    let m = inst.m();
    SingleTagSolution {
        solution: Solution {
            p_cw: 0.0,
            an_cov: CMat::zeros(m, m),
        },
        secrecy_rate: 0.0,
        t_star: 0.0,
        ratio: 1.0,
    }
}

/// Global optimum: uniform grid of `grid_points` angles `θ ∈ [0, π/2]` with
/// `t = sin²θ`, then a golden-section refinement (tolerance `1e-9` in `θ`)
/// around the best one. In `θ` the leakage `r = 1 - cos²(θ + θ_0)` is smooth,
/// while in `t` it has square-root kinks at both ends where the optimum
/// often sits.
pub fn solve_single(inst: &SingleTagInstance, grid_points: usize) -> Result<SingleTagSolution> {
    if grid_points < 2 {
        return Err(Error::InvalidParameter("the t grid needs at least two points".into()));
    }
    if inst.total_power == 0.0 {
        return Ok(zero_power(inst));
    }
    let tc = TCoordinates::new(inst)?;
    if inst.m() == 1 {
        let (y, ps) = best_power(inst, &tc, 1.0)?;
        return assemble(inst, &tc, 1.0, ps, y);
    }
    let t_of = |theta: f64| theta.sin().powi(2).clamp(0.0, 1.0);
    let step = FRAC_PI_2 / (grid_points - 1) as f64;
    let angle = |i: usize| if i + 1 == grid_points { FRAC_PI_2 } else { i as f64 * step };
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    let mut best_idx = 0;
    for i in 0..grid_points {
        let t = t_of(angle(i));
        let (y, ps) = best_power(inst, &tc, t)?;
        if y > best.0 {
            best = (y, ps, t);
            best_idx = i;
        }
    }
    let lo = angle(best_idx.saturating_sub(1));
    let hi = angle((best_idx + 1).min(grid_points - 1));
    let refined = t_of(golden_max(lo, hi, 1e-9, |th| best_power(inst, &tc, t_of(th)).map(|b| b.0))?);
    let (y, ps) = best_power(inst, &tc, refined)?;
    if y > best.0 {
        best = (y, ps, refined);
    }
    assemble(inst, &tc, best.2, best.1, best.0)
}

/// AN restricted to the nullspace of `h_tp^H`: `t = 0`, only `P_s` is chosen.
pub fn solve_single_nullspace(inst: &SingleTagInstance) -> Result<SingleTagSolution> {
    if inst.total_power == 0.0 {
        return Ok(zero_power(inst));
    }
    if inst.m() == 1 {
        return Err(Error::Unsupported("nullspace AN requires M > 1".into()));
    }
    let tc = TCoordinates::new(inst)?;
    let (y, ps) = best_power(inst, &tc, 0.0)?;
    assemble(inst, &tc, 0.0, ps, y)
}

/// Reader (MMSE) and eavesdropper (MRC) rates of an arbitrary operating point,
/// evaluated directly from the covariance.
pub fn mrc_rates(inst: &SingleTagInstance, s: &Solution) -> Result<Rates> {
    let m = inst.m();
    if s.an_cov.shape() != (m, m) {
        return Err(Error::DimensionMismatch {
            context: "an_cov",
            expected: (m, m),
            found: s.an_cov.shape(),
        });
    }
    let dtp2 = inst.d_tp.norm_sqr();
    let pr2 = inst.h_pr.norm_squared();
    let pe2 = inst.h_pe.norm_squared();
    let at_tag = inst.h_tp.dotc(&(&s.an_cov * &inst.h_tp)).re;
    let reader_sinr = s.p_cw * dtp2 * pr2 / (inst.alpha * pr2 * at_tag + inst.sigma2_reader);
    let eve_sinr = if pe2 > 0.0 {
        let g = &inst.h_te.adjoint() * &inst.h_pe;
        let direct = g.dotc(&(&s.an_cov * &g)).re / pe2;
        s.p_cw * dtp2 * pe2 / (pe2 * at_tag + direct + inst.sigma2_eve)
    } else {
        0.0
    };
    Ok(Rates {
        reader: (1.0 + reader_sinr).ln() / LN_2,
        eve: (1.0 + eve_sinr).ln() / LN_2,
    })
}

/// Golden-section search for a maximum of `f` on `[lo, hi]`.
fn golden_max(mut lo: f64, mut hi: f64, tol: f64, f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1)?;
        }
    }
    Ok(0.5 * (lo + hi))
}
