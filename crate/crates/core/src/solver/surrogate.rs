//! Concave surrogate of the secrecy rate around an anchor point.
//!
//! With `S_0 = R_r(anchor)^{-1}` and `S_1 = (R_e(anchor) + P_s(anchor) B)^{-1}`,
//!
//! ```text
//! g(x) = ln det(R_r + P_s A) + ln det(R_e) - Tr(S_0 R_r) - Tr(S_1 (R_e + P_s B))
//! ```
//!
//! is concave in `x = (P_s, Λ)` and touches the secrecy rate (in nats, up to
//! a constant) at the anchor, so maximizing it never decreases the rate.
//!
//! Gradients use the real pairing `<G, Δ> = Re Tr(G^H Δ)` on Hermitian
//! matrices, i.e. `dg = grad_ps dP_s + Re Tr(grad_lambda^H dΛ)`.

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, C64};
use crate::model::{scale_columns, Instance, Solution};

/// Linearization data of the outer iteration.
#[derive(Debug, Clone)]
pub struct SurrogateContext {
    pub s0: CMat,
    pub s1: CMat,
    pub anchor: Solution,
}

impl SurrogateContext {
    pub fn new(inst: &Instance, anchor: &Solution) -> Result<Self> {
        let rr = inst.interference_cov_reader(&anchor.an_cov)?;
        let re = inst.interference_cov_eve(&anchor.an_cov)?;
        let s0 = linalg::inv_hpd(&rr, "R_r at anchor")?;
        let s1 = linalg::inv_hpd(&(re + inst.effective.b_mat.scale(anchor.p_cw)), "R_e + P_s B at anchor")?;
        Ok(Self {
            s0,
            s1,
            anchor: anchor.clone(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub ps: f64,
    pub lambda: CMat,
}

impl Gradient {
    /// `<self, (dps, dlambda)>`.
    pub fn pair(&self, dps: f64, dlambda: &CMat) -> f64 {
        self.ps * dps + linalg::real_inner(&self.lambda, dlambda)
    }

    pub fn max_abs(&self) -> f64 {
        self.lambda.iter().map(|z| z.norm()).fold(self.ps.abs(), f64::max)
    }
}

/// `f_0 = ln det(R_r + P_s A) + ln det(R_e)`.
pub fn concave_part(inst: &Instance, x: &Solution) -> Result<f64> {
    let rr = inst.interference_cov_reader(&x.an_cov)?;
    let re = inst.interference_cov_eve(&x.an_cov)?;
    Ok(linalg::logdet_hpd(&(rr + inst.effective.a_mat.scale(x.p_cw)), "R_r + P_s A")?
        + linalg::logdet_hpd(&re, "R_e")?)
}

pub fn surrogate_value(inst: &Instance, ctx: &SurrogateContext, x: &Solution) -> Result<f64> {
    let rr = inst.interference_cov_reader(&x.an_cov)?;
    let re = inst.interference_cov_eve(&x.an_cov)?;
    let eff = &inst.effective;
    let f0 = linalg::logdet_hpd(&(&rr + eff.a_mat.scale(x.p_cw)), "R_r + P_s A")?
        + linalg::logdet_hpd(&re, "R_e")?;
    let g = f0 - linalg::real_inner(&ctx.s0, &rr) - linalg::real_inner(&ctx.s1, &(re + eff.b_mat.scale(x.p_cw)));
    if !g.is_finite() {
        return Err(Error::NonFinite("surrogate value"));
    }
    Ok(g)
}

/// Adjoint of `Λ ↦ (R_r(Λ) - σ_r² I, R_e(Λ) - σ_e² I)` applied to the weights
/// `(xr, xe)`: the Hermitian `G` with
/// `Re Tr(xr ΔR_r) + Re Tr(xe ΔR_e) = Re Tr(G ΔΛ)`.
pub(crate) fn covariance_adjoint(inst: &Instance, xr: &CMat, xe: &CMat) -> CMat {
    let ch = &inst.channels;
    let p = &inst.params;
    let hpr = &ch.h_tag_to_reader;
    let hpe = &ch.h_tag_to_eve;
    let l = ch.h_reader_to_tag.nrows();
    // w_i = α Tr(xr C_i) + Tr(xe D_i), with C_i, D_i the rank-one tag-antenna terms.
    let wr = hpr.adjoint() * xr * hpr;
    let we = hpe.adjoint() * xe * hpe;
    let w = nalgebra::DVector::from_iterator(l, (0..l).map(|i| p.alpha * wr[(i, i)].re + we[(i, i)].re));
    let g_tag = ch.h_reader_to_tag.adjoint();
    let backscatter = scale_columns(&g_tag, &w) * &ch.h_reader_to_tag;
    let htr = &ch.h_self_interference;
    let hte = &ch.h_reader_to_eve;
    let g = (htr.adjoint() * xr * htr).scale(p.beta) + hte.adjoint() * xe * hte + backscatter;
    linalg::hermitian_part(&g)
}

pub fn surrogate_gradient(inst: &Instance, ctx: &SurrogateContext, x: &Solution) -> Result<Gradient> {
    let rr = inst.interference_cov_reader(&x.an_cov)?;
    let re = inst.interference_cov_eve(&x.an_cov)?;
    let eff = &inst.effective;
    let f_inv = linalg::inv_hpd(&(rr + eff.a_mat.scale(x.p_cw)), "F = R_r + P_s A")?;
    let re_inv = linalg::inv_hpd(&re, "R_e")?;
    let ps = linalg::real_inner(&f_inv, &eff.a_mat) - linalg::real_inner(&ctx.s1, &eff.b_mat);
    let lambda = covariance_adjoint(inst, &(&f_inv - &ctx.s0), &(re_inv - &ctx.s1));
    if !ps.is_finite() || !linalg::is_finite(&lambda) {
        return Err(Error::NonFinite("surrogate gradient"));
    }
    Ok(Gradient { ps, lambda })
}

/// The same subproblem built the other way: `f_0` minus first-order Taylor
/// upper bounds of `ln det R_r` and `ln det(R_e + P_s B)` around the anchor.
///
/// Kept independent of [`SurrogateContext`]: the inverses come from a general
/// LU inverse and the gradient of the linearized terms is read off by probing
/// the (exactly affine) Taylor expressions along a Hermitian basis.
#[derive(Debug, Clone)]
pub struct TaylorSurrogate {
    inst: Instance,
    anchor: Solution,
    reader_inv: CMat,
    eve_inv: CMat,
    reader_logdet: f64,
    eve_logdet: f64,
}

impl TaylorSurrogate {
    pub fn new(inst: &Instance, anchor: &Solution) -> Result<Self> {
        let r0 = inst.interference_cov_reader(&anchor.an_cov)?;
        let e0 = inst.interference_cov_eve(&anchor.an_cov)? + inst.effective.b_mat.scale(anchor.p_cw);
        let inv = |m: &CMat, ctx: &'static str| -> Result<CMat> {
            m.clone().try_inverse().ok_or(Error::NotPositiveDefinite {
                context: ctx,
                min_eig: f64::NAN,
                max_eig: f64::NAN,
            })
        };
        Ok(Self {
            inst: inst.clone(),
            anchor: anchor.clone(),
            reader_inv: inv(&r0, "Taylor R_r")?,
            eve_inv: inv(&e0, "Taylor R_e + P_s B")?,
            reader_logdet: linalg::logdet_hpd(&r0, "Taylor R_r")?,
            eve_logdet: linalg::logdet_hpd(&e0, "Taylor R_e + P_s B")?,
        })
    }

    /// Increment of `(R_r, R_e + P_s B)` for a step `(dps, dlambda)`, written
    /// out term by term with an explicit Hadamard mask.
    fn increments(&self, dps: f64, dlambda: &CMat) -> (CMat, CMat) {
        let ch = &self.inst.channels;
        let p = &self.inst.params;
        let h_tp = ch.h_reader_to_tag.adjoint();
        let full = h_tp.adjoint() * dlambda * &h_tp;
        let masked = CMat::from_fn(full.nrows(), full.ncols(), |i, j| if i == j { full[(i, j)] } else { C64::new(0.0, 0.0) });
        let d_r = (&ch.h_tag_to_reader * &masked * ch.h_tag_to_reader.adjoint()).scale(p.alpha)
            + (&ch.h_self_interference * dlambda * ch.h_self_interference.adjoint()).scale(p.beta);
        let d_e = &ch.h_tag_to_eve * &masked * ch.h_tag_to_eve.adjoint()
            + &ch.h_reader_to_eve * dlambda * ch.h_reader_to_eve.adjoint()
            + self.inst.effective.b_mat.scale(dps);
        (d_r, d_e)
    }

    /// First-order part `Tr(X_0^{-1} ΔX_0) + Tr(X_1^{-1} ΔX_1)`.
    fn linear_part(&self, dps: f64, dlambda: &CMat) -> f64 {
        let (d_r, d_e) = self.increments(dps, dlambda);
        (&self.reader_inv * d_r).trace().re + (&self.eve_inv * d_e).trace().re
    }

    /// Taylor bound on `ln det R_r(x)`.
    pub fn reader_bound(&self, x: &Solution) -> f64 {
        let (d_r, _) = self.increments(0.0, &(&x.an_cov - &self.anchor.an_cov));
        self.reader_logdet + (&self.reader_inv * d_r).trace().re
    }

    pub fn value(&self, x: &Solution) -> Result<f64> {
        let f0 = concave_part(&self.inst, x)?;
        let dps = x.p_cw - self.anchor.p_cw;
        let dl = &x.an_cov - &self.anchor.an_cov;
        Ok(f0 - self.reader_logdet - self.eve_logdet - self.linear_part(dps, &dl))
    }

    pub fn gradient(&self, x: &Solution) -> Result<Gradient> {
        let inst = &self.inst;
        let eff = &inst.effective;
        let rr = inst.interference_cov_reader(&x.an_cov)?;
        let re = inst.interference_cov_eve(&x.an_cov)?;
        let f_inv = linalg::inv_hpd(&(rr + eff.a_mat.scale(x.p_cw)), "F = R_r + P_s A")?;
        let re_inv = linalg::inv_hpd(&re, "R_e")?;
        let f0_ps = linalg::real_inner(&f_inv, &eff.a_mat);
        let f0_lambda = covariance_adjoint(inst, &f_inv, &re_inv);

        let m = x.an_cov.nrows();
        let zero = CMat::zeros(m, m);
        let lin_ps = self.linear_part(1.0, &zero);
        let mut lin = CMat::zeros(m, m);
        for j in 0..m {
            let mut e = zero.clone();
            e[(j, j)] = C64::new(1.0, 0.0);
            lin[(j, j)] = C64::new(self.linear_part(0.0, &e), 0.0);
            for k in (j + 1)..m {
                let mut sym = zero.clone();
                sym[(j, k)] = C64::new(1.0, 0.0);
                sym[(k, j)] = C64::new(1.0, 0.0);
                let mut asym = zero.clone();
                asym[(j, k)] = C64::new(0.0, 1.0);
                asym[(k, j)] = C64::new(0.0, -1.0);
                let re_part = 0.5 * self.linear_part(0.0, &sym);
                let im_part = 0.5 * self.linear_part(0.0, &asym);
                lin[(j, k)] = C64::new(re_part, im_part);
                lin[(k, j)] = C64::new(re_part, -im_part);
            }
        }
        Ok(Gradient {
            ps: f0_ps - lin_ps,
            lambda: f0_lambda - lin,
        })
    }
}
