//! Channel and system model of the backscatter wiretap link.
//!
//! The reader sends a constant carrier of power `p_cw` spread equally over its
//! `M` transmit antennas plus artificial noise with covariance `an_cov`. The
//! tag modulates the carrier by switching its `L` antenna loads; the reader
//! (`N` antennas) and a passive eavesdropper (`K` antennas) both receive the
//! backscattered signal. Rates are evaluated with the residual AN treated as
//! Gaussian interference, and the expectation over the noise realization is
//! used in its exact closed form `(H_tp^H Λ H_tp) ∘ I`.
//!
//! All powers are linear watts. Rates are in bits/s/Hz.

use std::f64::consts::LN_2;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec, C64};

/// `10^((dBm - 30) / 10)`.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

/// Powers, noise floors, attenuation factors and antenna counts.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    /// Reader transmit antennas `M`.
    pub m_tx: usize,
    /// Reader receive antennas `N`.
    pub n_rx: usize,
    /// Tag antennas `L`.
    pub l_tag: usize,
    /// Eavesdropper antennas `K`.
    pub k_eve: usize,
    /// Total reader power budget `P` in watts.
    pub total_power: f64,
    pub sigma2_reader: f64,
    pub sigma2_eve: f64,
    /// Fraction of the backscattered AN the reader fails to cancel.
    pub alpha: f64,
    /// Fraction of the self-interference the reader fails to cancel.
    pub beta: f64,
}

impl Default for SystemParams {
    /// `M=3, N=2, L=2, K=3`, `P = 10 dBm`, `σ² = -20 dBm`, `α = 0.6`, `β = 0.3`.
    fn default() -> Self {
        Self {
            m_tx: 3,
            n_rx: 2,
            l_tag: 2,
            k_eve: 3,
            total_power: dbm_to_watts(10.0),
            sigma2_reader: dbm_to_watts(-20.0),
            sigma2_eve: dbm_to_watts(-20.0),
            alpha: 0.6,
            beta: 0.3,
        }
    }
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("m_tx", self.m_tx),
            ("n_rx", self.n_rx),
            ("l_tag", self.l_tag),
            ("k_eve", self.k_eve),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(Error::InvalidParameter(format!("{name} must be positive")));
            }
        }
        if !(self.total_power.is_finite() && self.total_power >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "total_power must be a nonnegative finite number, got {}",
                self.total_power
            )));
        }
        for (name, v) in [("sigma2_reader", self.sigma2_reader), ("sigma2_eve", self.sigma2_eve)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParameter(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        Ok(())
    }
}

/// The five channel matrices of the reader / tag / eavesdropper geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemChannels {
    /// `H_tp^H`, reader to tag, `L×M`.
    pub h_reader_to_tag: CMat,
    /// `H_pr`, tag to reader, `N×L`.
    pub h_tag_to_reader: CMat,
    /// `H_tr`, reader transmitter to reader receiver, `N×M`.
    pub h_self_interference: CMat,
    /// `H_pe`, tag to eavesdropper, `K×L`.
    pub h_tag_to_eve: CMat,
    /// `H_te`, reader to eavesdropper, `K×M`.
    pub h_reader_to_eve: CMat,
}

impl SystemChannels {
    /// Checks every shape against the declared antenna counts and that all
    /// entries are finite.
    pub fn check(&self, p: &SystemParams) -> Result<()> {
        let (m, n, l, k) = (p.m_tx, p.n_rx, p.l_tag, p.k_eve);
        let shapes = [
            ("h_reader_to_tag", &self.h_reader_to_tag, (l, m)),
            ("h_tag_to_reader", &self.h_tag_to_reader, (n, l)),
            ("h_self_interference", &self.h_self_interference, (n, m)),
            ("h_tag_to_eve", &self.h_tag_to_eve, (k, l)),
            ("h_reader_to_eve", &self.h_reader_to_eve, (k, m)),
        ];
        for (context, mat, expected) in shapes {
            if mat.shape() != expected {
                return Err(Error::DimensionMismatch {
                    context,
                    expected,
                    found: mat.shape(),
                });
            }
            if !linalg::is_finite(mat) {
                return Err(Error::NonFinite(context));
            }
        }
        Ok(())
    }
}

/// Candidate operating point: carrier power plus AN covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub p_cw: f64,
    pub an_cov: CMat,
}

impl Solution {
    /// All power on the carrier, no AN.
    pub fn no_an(total_power: f64, m_tx: usize) -> Self {
        Self {
            p_cw: total_power,
            an_cov: CMat::zeros(m_tx, m_tx),
        }
    }

    pub fn an_power(&self) -> f64 {
        linalg::real_trace(&self.an_cov)
    }

    /// Checks `p_cw >= 0`, `an_cov` Hermitian PSD, and the power budget.
    pub fn check_feasible(&self, total_power: f64) -> Result<()> {
        if !(self.p_cw.is_finite() && self.p_cw >= 0.0) {
            return Err(Error::InvalidParameter(format!("p_cw must be nonnegative, got {}", self.p_cw)));
        }
        if !self.an_cov.is_square() {
            return Err(Error::DimensionMismatch {
                context: "an_cov",
                expected: (self.an_cov.nrows(), self.an_cov.nrows()),
                found: self.an_cov.shape(),
            });
        }
        if !linalg::is_finite(&self.an_cov) {
            return Err(Error::NonFinite("an_cov"));
        }
        if linalg::hermitian_defect(&self.an_cov) > 1e-12 {
            return Err(Error::InvalidParameter("an_cov is not Hermitian".into()));
        }
        let trace = self.an_power();
        let min_eig = linalg::min_eigenvalue(&self.an_cov);
        if min_eig < -1e-10 * trace.abs().max(f64::MIN_POSITIVE) {
            return Err(Error::InvalidParameter(format!(
                "an_cov is not positive semidefinite (min eigenvalue {min_eig:e})"
            )));
        }
        if self.p_cw + trace > total_power + 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "power budget exceeded: {} + {} > {}",
                self.p_cw, trace, total_power
            )));
        }
        Ok(())
    }
}

/// Quantities that depend only on the channels.
#[derive(Debug, Clone)]
pub struct EffectiveMatrices {
    /// Diagonal of `D_tp = diag{√(1/M) H_tp^H 1_M}`.
    pub d_tp: CVec,
    /// `A = H_pr D_tp D_tp^H H_pr^H`.
    pub a_mat: CMat,
    /// `B = H_pe D_tp D_tp^H H_pe^H`.
    pub b_mat: CMat,
}

impl EffectiveMatrices {
    pub fn new(ch: &SystemChannels) -> Self {
        let g = &ch.h_reader_to_tag;
        let scale = (1.0 / g.ncols() as f64).sqrt();
        let d_tp = CVec::from_iterator(g.nrows(), g.row_iter().map(|r| r.sum() * scale));
        let d = CMat::from_diagonal(&d_tp);
        let hd_r = &ch.h_tag_to_reader * &d;
        let hd_e = &ch.h_tag_to_eve * &d;
        Self {
            a_mat: linalg::hermitian_part(&(&hd_r * hd_r.adjoint())),
            b_mat: linalg::hermitian_part(&(&hd_e * hd_e.adjoint())),
            d_tp,
        }
    }
}

/// `diag(h Λ h^H)` as a real vector; these are the per-tag-antenna AN powers.
pub fn backscatter_powers(h: &CMat, lambda: &CMat) -> Result<DVector<f64>> {
    if lambda.nrows() != h.ncols() || lambda.ncols() != h.ncols() {
        return Err(Error::DimensionMismatch {
            context: "backscatter_diag_cov",
            expected: (h.ncols(), h.ncols()),
            found: lambda.shape(),
        });
    }
    let hl = h * lambda;
    Ok(DVector::from_iterator(
        h.nrows(),
        (0..h.nrows()).map(|i| {
            let v: C64 = hl.row(i).iter().zip(h.row(i).iter()).map(|(a, b)| a * b.conj()).sum();
            v.re.max(0.0)
        }),
    ))
}

/// `(h Λ h^H) ∘ I`: the expected backscatter covariance of the AN at the tag.
pub fn backscatter_diag_cov(h: &CMat, lambda: &CMat) -> Result<CMat> {
    Ok(linalg::diag_from_real(&backscatter_powers(h, lambda)?))
}

/// Achievable rates of the reader and the eavesdropper.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rates {
    pub reader: f64,
    pub eve: f64,
}

impl Rates {
    /// `C_r - C_e`, possibly negative.
    pub fn signed(&self) -> f64 {
        self.reader - self.eve
    }

    /// `[C_r - C_e]^+`.
    pub fn secrecy(&self) -> f64 {
        self.signed().max(0.0)
    }
}

/// Validated channels and parameters together with their derived matrices.
#[derive(Debug, Clone)]
pub struct Instance {
    pub channels: SystemChannels,
    pub params: SystemParams,
    pub effective: EffectiveMatrices,
}

impl Instance {
    pub fn new(channels: SystemChannels, params: SystemParams) -> Result<Self> {
        params.validate()?;
        channels.check(&params)?;
        let effective = EffectiveMatrices::new(&channels);
        Ok(Self {
            channels,
            params,
            effective,
        })
    }

    pub fn m(&self) -> usize {
        self.params.m_tx
    }

    pub fn n(&self) -> usize {
        self.params.n_rx
    }

    pub fn k(&self) -> usize {
        self.params.k_eve
    }

    /// Same channels under different scalar parameters (α, β, P, σ²).
    pub fn with_params(&self, params: SystemParams) -> Result<Self> {
        Self::new(self.channels.clone(), params)
    }

    fn check_an(&self, an_cov: &CMat) -> Result<()> {
        let m = self.m();
        if an_cov.shape() != (m, m) {
            return Err(Error::DimensionMismatch {
                context: "an_cov",
                expected: (m, m),
                found: an_cov.shape(),
            });
        }
        Ok(())
    }

    /// `R_r = α H_pr ((H_tp^H Λ H_tp) ∘ I) H_pr^H + β H_tr Λ H_tr^H + σ_r² I`.
    pub fn interference_cov_reader(&self, an_cov: &CMat) -> Result<CMat> {
        self.check_an(an_cov)?;
        let ch = &self.channels;
        let p = &self.params;
        let q = backscatter_powers(&ch.h_reader_to_tag, an_cov)?;
        let hq = scale_columns(&ch.h_tag_to_reader, &q);
        let htr = &ch.h_self_interference;
        let r = (&hq * ch.h_tag_to_reader.adjoint()).scale(p.alpha)
            + (htr * an_cov * htr.adjoint()).scale(p.beta)
            + linalg::identity(self.n()).scale(p.sigma2_reader);
        Ok(linalg::hermitian_part(&r))
    }

    /// `R_e = H_pe ((H_tp^H Λ H_tp) ∘ I) H_pe^H + H_te Λ H_te^H + σ_e² I`.
    pub fn interference_cov_eve(&self, an_cov: &CMat) -> Result<CMat> {
        self.check_an(an_cov)?;
        let ch = &self.channels;
        let q = backscatter_powers(&ch.h_reader_to_tag, an_cov)?;
        let hq = scale_columns(&ch.h_tag_to_eve, &q);
        let hte = &ch.h_reader_to_eve;
        let r = &hq * ch.h_tag_to_eve.adjoint()
            + hte * an_cov * hte.adjoint()
            + linalg::identity(self.k()).scale(self.params.sigma2_eve);
        Ok(linalg::hermitian_part(&r))
    }

    /// Reader and eavesdropper rates at `s`, each evaluated as
    /// `log2 det(R + P_s A) - log2 det(R)`.
    pub fn rates(&self, s: &Solution) -> Result<Rates> {
        let rr = self.interference_cov_reader(&s.an_cov)?;
        let re = self.interference_cov_eve(&s.an_cov)?;
        let eff = &self.effective;
        let reader = (linalg::logdet_hpd(&(&rr + eff.a_mat.scale(s.p_cw)), "R_r + P_s A")?
            - linalg::logdet_hpd(&rr, "R_r")?)
            / LN_2;
        let eve = (linalg::logdet_hpd(&(&re + eff.b_mat.scale(s.p_cw)), "R_e + P_s B")?
            - linalg::logdet_hpd(&re, "R_e")?)
            / LN_2;
        Ok(Rates { reader, eve })
    }

    /// `[C_r - C_e]^+` in bits/s/Hz.
    pub fn secrecy_rate(&self, s: &Solution) -> Result<f64> {
        Ok(self.rates(s)?.secrecy())
    }
}

/// `H diag(q)`.
pub(crate) fn scale_columns(h: &CMat, q: &DVector<f64>) -> CMat {
    let mut out = h.clone();
    for (j, &w) in q.iter().enumerate() {
        out.column_mut(j).scale_mut(w);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one() -> CMat {
        CMat::from_element(1, 1, C64::new(1.0, 0.0))
    }

    fn scalar_params(alpha: f64, beta: f64) -> SystemParams {
        SystemParams {
            m_tx: 1,
            n_rx: 1,
            l_tag: 1,
            k_eve: 1,
            total_power: 10.0,
            sigma2_reader: 1.0,
            sigma2_eve: 1.0,
            alpha,
            beta,
        }
    }

    fn scalar_instance(alpha: f64, beta: f64) -> Instance {
        let ch = SystemChannels {
            h_reader_to_tag: one(),
            h_tag_to_reader: one(),
            h_self_interference: one(),
            h_tag_to_eve: one(),
            h_reader_to_eve: one(),
        };
        Instance::new(ch, scalar_params(alpha, beta)).unwrap()
    }

    fn scalar_an(v: f64) -> CMat {
        CMat::from_element(1, 1, C64::new(v, 0.0))
    }

    #[test]
    fn dbm_conversion() {
        assert!((dbm_to_watts(10.0) - 0.01).abs() < 1e-15);
        assert!((dbm_to_watts(-20.0) - 1e-5).abs() < 1e-18);
        assert!((watts_to_dbm(0.01) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn backscatter_cov_zero_and_scalar() {
        let h = CMat::from_fn(2, 3, |i, j| C64::new(i as f64 + 1.0, j as f64));
        let z = backscatter_diag_cov(&h, &CMat::zeros(3, 3)).unwrap();
        assert_eq!(z, CMat::zeros(2, 2));
        let s = backscatter_diag_cov(&one(), &scalar_an(2.0)).unwrap();
        assert_eq!(s[(0, 0)], C64::new(2.0, 0.0));
    }

    #[test]
    fn backscatter_cov_rejects_bad_shape() {
        let h = CMat::zeros(2, 3);
        assert!(matches!(
            backscatter_diag_cov(&h, &CMat::zeros(2, 2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn scalar_covariances() {
        let inst = scalar_instance(1.0, 1.0);
        let rr = inst.interference_cov_reader(&scalar_an(2.0)).unwrap();
        assert!((rr[(0, 0)].re - 5.0).abs() < 1e-15);
        // Two AN terms (backscattered and direct) plus noise.
        let re = inst.interference_cov_eve(&scalar_an(2.0)).unwrap();
        assert!((re[(0, 0)].re - 5.0).abs() < 1e-15);
        let r0 = inst.interference_cov_reader(&scalar_an(0.0)).unwrap();
        assert_eq!(r0[(0, 0)].re, 1.0);
    }

    #[test]
    fn scalar_rates() {
        let inst = scalar_instance(0.0, 0.0);
        let s = Solution { p_cw: 3.0, an_cov: scalar_an(0.0) };
        let r = inst.rates(&s).unwrap();
        assert!((r.reader - 2.0).abs() < 1e-14);
        assert!((r.eve - 2.0).abs() < 1e-14);
        assert_eq!(inst.secrecy_rate(&s).unwrap(), 0.0);

        let mut ch = inst.channels.clone();
        ch.h_tag_to_eve = CMat::zeros(1, 1);
        let inst = Instance::new(ch, scalar_params(0.0, 0.0)).unwrap();
        let r = inst.rates(&s).unwrap();
        assert_eq!(r.eve, 0.0);
        assert!((r.secrecy() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn zero_carrier_gives_zero_rates() {
        let inst = scalar_instance(0.6, 0.3);
        let r = inst.rates(&Solution { p_cw: 0.0, an_cov: scalar_an(1.0) }).unwrap();
        assert_eq!(r.reader, 0.0);
        assert_eq!(r.eve, 0.0);
    }

    #[test]
    fn params_validation() {
        let mut p = SystemParams::default();
        assert!(p.validate().is_ok());
        p.alpha = 1.5;
        assert!(p.validate().is_err());
        p.alpha = 0.5;
        p.sigma2_eve = 0.0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn channel_shape_checked() {
        let mut ch = scalar_instance(0.0, 0.0).channels;
        ch.h_reader_to_eve = CMat::zeros(2, 1);
        assert!(matches!(
            Instance::new(ch, scalar_params(0.0, 0.0)),
            Err(Error::DimensionMismatch { context: "h_reader_to_eve", .. })
        ));
    }

    #[test]
    fn feasibility_check() {
        let ok = Solution { p_cw: 1.0, an_cov: scalar_an(2.0) };
        assert!(ok.check_feasible(3.0).is_ok());
        assert!(ok.check_feasible(2.5).is_err());
        let neg = Solution { p_cw: 1.0, an_cov: scalar_an(-0.5) };
        assert!(neg.check_feasible(3.0).is_err());
    }
}
