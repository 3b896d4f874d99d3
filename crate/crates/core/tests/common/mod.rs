//! Reference computations for the integration tests. Nothing here calls the
//! library's numerics: covariances are assembled term by term, log-dets come
//! from eigenvalues, and searches are brute force.

#![allow(dead_code)]

use backscatter_secrecy::linalg::{CMat, CVec, C64};
use backscatter_secrecy::model::{Instance, Solution, SystemChannels, SystemParams};
use backscatter_secrecy::montecarlo::{generate_channels, GeometryParams};
use nalgebra::SymmetricEigen;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Complex Gaussian entry with unit variance.
pub fn cn(rng: &mut ChaCha20Rng) -> C64 {
    // Box-Muller keeps the oracle independent of the library's sampler.
    let u1: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.random_range(0.0..1.0);
    let r = (-u1.ln()).sqrt();
    let th = 2.0 * std::f64::consts::PI * u2;
    c(r * th.cos(), r * th.sin())
}

pub fn cn_mat(rng: &mut ChaCha20Rng, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| cn(rng))
}

/// Channels with i.i.d. unit-variance entries scaled by `scale`, drawn
/// from the test RNG.
pub fn random_channels(rng: &mut ChaCha20Rng, p: &SystemParams, scale: f64) -> SystemChannels {
    let (m, n, l, k) = (p.m_tx, p.n_rx, p.l_tag, p.k_eve);
    SystemChannels {
        h_reader_to_tag: cn_mat(rng, l, m).scale(scale),
        h_tag_to_reader: cn_mat(rng, n, l).scale(scale),
        h_self_interference: cn_mat(rng, n, m),
        h_tag_to_eve: cn_mat(rng, k, l).scale(scale),
        h_reader_to_eve: cn_mat(rng, k, m).scale(scale),
    }
}

/// Instance drawn from the library's channel generator (the generator is
/// tested separately; here it only supplies realistic channels).
pub fn sample_instance(params: &SystemParams, seed: u64, trial: u64) -> Instance {
    let ch = generate_channels(params, &GeometryParams::default(), seed, trial);
    Instance::new(ch, params.clone()).unwrap()
}

pub fn hermitian(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn eigenvalues(m: &CMat) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(hermitian(m)).eigenvalues.iter().cloned().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn logdet(m: &CMat) -> f64 {
    eigenvalues(m)
        .iter()
        .map(|&l| {
            assert!(l > 0.0, "matrix not positive definite: eigenvalue {l}");
            l.ln()
        })
        .sum()
}

/// Random feasible `(P_s, Λ)` using a random share of the budget.
pub fn feasible_point(rng: &mut ChaCha20Rng, m: usize, total: f64) -> (f64, CMat) {
    let used: f64 = rng.random_range(0.1..1.0);
    let share: f64 = rng.random_range(0.0..1.0);
    let rank = rng.random_range(1..=m);
    let g = cn_mat(rng, m, rank);
    let lam = &g * g.adjoint();
    let tr: f64 = (0..m).map(|i| lam[(i, i)].re).sum();
    let lam = hermitian(&lam.scale(used * (1.0 - share) * total / tr));
    (used * share * total, lam)
}

/// Covariances built as explicit sums over tag antennas:
/// the backscattered AN at antenna `i` has power `h_i^H Λ h_i` with `h_i^H`
/// the i-th row of the reader→tag channel.
pub struct OracleCovariances {
    pub reader: CMat,
    pub eve: CMat,
    /// `A`, `B`.
    pub a: CMat,
    pub b: CMat,
}

pub fn oracle_covariances(ch: &SystemChannels, p: &SystemParams, lam: &CMat) -> OracleCovariances {
    let (m, n, l, k) = (p.m_tx, p.n_rx, p.l_tag, p.k_eve);
    let mut reader = CMat::identity(n, n).scale(p.sigma2_reader);
    let mut eve = CMat::identity(k, k).scale(p.sigma2_eve);
    let mut d = CVec::zeros(l);
    for i in 0..l {
        let row = ch.h_reader_to_tag.row(i);
        let q = (row * lam * row.adjoint())[(0, 0)].re;
        let pr = ch.h_tag_to_reader.column(i);
        let pe = ch.h_tag_to_eve.column(i);
        reader += (pr * pr.adjoint()).scale(p.alpha * q);
        eve += (pe * pe.adjoint()).scale(q);
        // Carrier spread equally over the M antennas: its gain at tag
        // antenna i is the row sum of H_tp^H over √M.
        d[i] = row.iter().sum::<C64>() / (m as f64).sqrt();
    }
    reader += (&ch.h_self_interference * lam * ch.h_self_interference.adjoint()).scale(p.beta);
    eve += &ch.h_reader_to_eve * lam * ch.h_reader_to_eve.adjoint();
    let a = {
        let x = &ch.h_tag_to_reader * CMat::from_diagonal(&d);
        &x * x.adjoint()
    };
    let b = {
        let x = &ch.h_tag_to_eve * CMat::from_diagonal(&d);
        &x * x.adjoint()
    };
    OracleCovariances { reader, eve, a, b }
}

/// `(C_r, C_e)` in bits from eigenvalue log-dets.
pub fn oracle_rates(ch: &SystemChannels, p: &SystemParams, ps: f64, lam: &CMat) -> (f64, f64) {
    let o = oracle_covariances(ch, p, lam);
    let ln2 = std::f64::consts::LN_2;
    let cr = (logdet(&(&o.reader + o.a.scale(ps))) - logdet(&o.reader)) / ln2;
    let ce = (logdet(&(&o.eve + o.b.scale(ps))) - logdet(&o.eve)) / ln2;
    (cr, ce)
}

pub fn oracle_secrecy(ch: &SystemChannels, p: &SystemParams, ps: f64, lam: &CMat) -> f64 {
    let (cr, ce) = oracle_rates(ch, p, ps, lam);
    (cr - ce).max(0.0)
}

/// Central finite differences of `f(P_s, Λ)` along the real coordinates:
/// returns `(d/dP_s, G)` with `G_jj = ∂/∂Λ_jj` and, for `j < k`,
/// `Re G_jk`, `Im G_jk` from symmetric / antisymmetric Hermitian steps.
pub fn fd_gradient(ps: f64, lam: &CMat, h: f64, f: impl Fn(f64, &CMat) -> f64) -> (f64, CMat) {
    let m = lam.nrows();
    let dps = (f(ps + h, lam) - f(ps - h, lam)) / (2.0 * h);
    let mut g = CMat::zeros(m, m);
    let along = |dir: &CMat| (f(ps, &(lam + dir.scale(h))) - f(ps, &(lam - dir.scale(h)))) / (2.0 * h);
    for j in 0..m {
        let mut e = CMat::zeros(m, m);
        e[(j, j)] = c(1.0, 0.0);
        g[(j, j)] = c(along(&e), 0.0);
        for k in (j + 1)..m {
            let mut s = CMat::zeros(m, m);
            s[(j, k)] = c(1.0, 0.0);
            s[(k, j)] = c(1.0, 0.0);
            let mut a = CMat::zeros(m, m);
            a[(j, k)] = c(0.0, 1.0);
            a[(k, j)] = c(0.0, -1.0);
            let re = along(&s) / 2.0;
            let im = along(&a) / 2.0;
            g[(j, k)] = c(re, im);
            g[(k, j)] = c(re, -im);
        }
    }
    (dps, g)
}

/// `max |a - b| / max |b|` over the scalar and matrix parts.
pub fn rel_error(a: (f64, &CMat), b: (f64, &CMat)) -> f64 {
    let diff = a.1 - b.1;
    let num = diff.iter().map(|z| z.norm()).fold((a.0 - b.0).abs(), f64::max);
    let den = b.1.iter().map(|z| z.norm()).fold(b.0.abs(), f64::max);
    num / den
}

/// Water level by bisection: the `λ >= 0` with `Σ max(v_i - λ, 0) = p`, or 0
/// when the budget is slack.
pub fn bisection_level(v: &[f64], p: f64) -> f64 {
    let used = |lvl: f64| v.iter().map(|x| (x - lvl).max(0.0)).sum::<f64>();
    if used(0.0) <= p {
        return 0.0;
    }
    let mut lo = 0.0;
    let mut hi = v.iter().cloned().fold(0.0, f64::max);
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if used(mid) > p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `P_s² + ‖Λ‖_F²` distance squared between two points.
pub fn dist2(a: (f64, &CMat), b: (f64, &CMat)) -> f64 {
    (a.0 - b.0).powi(2) + (a.1 - b.1).norm_squared()
}

/// Brute-force Euclidean projection of `(p_t, L_t)` (2×2 Hermitian target)
/// onto `{P_s >= 0, Λ ⪰ 0, P_s + Tr Λ <= p}`: grid over
/// `Λ = [[a, z], [z*, b]]` with `steps` values per real coordinate, the
/// optimal `P_s` for each `Λ` in closed form. Returns the best point and its
/// squared distance.
pub fn brute_project_2x2(p: f64, p_t: f64, l_t: &CMat, steps: usize) -> ((f64, CMat), f64) {
    let mut best = ((0.0, CMat::zeros(2, 2)), f64::INFINITY);
    let h = p / (steps - 1) as f64;
    // |z|² <= ab <= (p/2)², so the off-diagonal grid spans ±p/2 in steps of h/2.
    let half = steps as i64 - 1;
    for ia in 0..steps {
        let a = ia as f64 * h;
        for ib in 0..steps - ia {
            let b = ib as f64 * h;
            let r2 = a * b;
            for ir in -half..=half {
                let re = ir as f64 * h / 2.0;
                for ii in -half..=half {
                    let im = ii as f64 * h / 2.0;
                    if re * re + im * im > r2 {
                        continue;
                    }
                    let lam = CMat::from_row_slice(2, 2, &[c(a, 0.0), c(re, im), c(re, -im), c(b, 0.0)]);
                    let ps = p_t.min(p - a - b).max(0.0);
                    let d = dist2((ps, &lam), (p_t, l_t));
                    if d < best.1 {
                        best = ((ps, lam), d);
                    }
                }
            }
        }
    }
    best
}

/// Secrecy rate of a single-antenna tag (`L = 1`) with an MRC eavesdropper
/// and a self-interference-free reader, from the raw channels: the reader
/// rate from eigenvalue log-dets, the eavesdropper SINR after combining with
/// `h_pe / ‖h_pe‖`. AN through the tag and direct AN are uncorrelated (the
/// tag symbol randomizes the phase), so their powers add.
pub fn oracle_mrc_rates(ch: &SystemChannels, p: &SystemParams, ps: f64, lam: &CMat) -> (f64, f64) {
    let n = ch.h_tag_to_reader.nrows();
    let row = ch.h_reader_to_tag.row(0).into_owned();
    let q = (&row * lam * row.adjoint())[(0, 0)].re;
    let dtp2 = (row.iter().sum::<C64>() / (row.len() as f64).sqrt()).norm_sqr();
    let hpr = ch.h_tag_to_reader.column(0).into_owned();
    let outer = &hpr * hpr.adjoint();
    let noise = CMat::identity(n, n).scale(p.sigma2_reader) + outer.scale(p.alpha * q);
    let ln2 = std::f64::consts::LN_2;
    let cr = (logdet(&(&noise + outer.scale(ps * dtp2))) - logdet(&noise)) / ln2;
    let hpe = ch.h_tag_to_eve.column(0).into_owned();
    let pe2 = hpe.norm_squared();
    if pe2 == 0.0 {
        return (cr, 0.0);
    }
    let w = hpe.unscale(pe2.sqrt());
    let direct = (w.adjoint() * &ch.h_reader_to_eve * lam * ch.h_reader_to_eve.adjoint() * &w)[(0, 0)].re;
    let sinr = ps * dtp2 * pe2 / (q * pe2 + direct + p.sigma2_eve);
    (cr, (1.0 + sinr).log2())
}

pub fn oracle_mrc_secrecy(ch: &SystemChannels, p: &SystemParams, ps: f64, lam: &CMat) -> f64 {
    let (cr, ce) = oracle_mrc_rates(ch, p, ps, lam);
    (cr - ce).max(0.0)
}

/// Best single-tag operating point on a grid, for `M = 2`: rank-one AN
/// `(P - P_s) v v^H` with `v = cos θ d + sin θ e^{iψ} u` (`d` along the
/// reader→tag channel, `u` its orthogonal complement), `θ` and `P_s`
/// uniform with `steps` points each, `ψ` with `phases`. Returns the best
/// secrecy rate and its `(θ, P_s)`.
pub fn grid_single_tag_m2(ch: &SystemChannels, p: &SystemParams, steps: usize, phases: usize) -> (f64, f64, f64) {
    let h = ch.h_reader_to_tag.row(0).adjoint();
    assert_eq!(h.len(), 2);
    let d = h.unscale(h.norm());
    let u = CVec::from_vec(vec![-d[1].conj(), d[0].conj()]);
    let total = p.total_power;
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for i in 0..steps {
        let th = std::f64::consts::FRAC_PI_2 * i as f64 / (steps - 1) as f64;
        for k in 0..phases {
            let psi = std::f64::consts::TAU * k as f64 / phases as f64;
            let v = d.scale(th.cos()) + &u * C64::from_polar(th.sin(), psi);
            let vv = &v * v.adjoint();
            for j in 0..steps {
                let ps = total * j as f64 / (steps - 1) as f64;
                let s = oracle_mrc_secrecy(ch, p, ps, &vv.scale(total - ps));
                if s > best.0 {
                    best = (s, th, ps);
                }
            }
        }
    }
    best
}

/// Surrogate value assembled from the oracle covariances.
pub fn oracle_surrogate(inst: &Instance, anchor: &Solution, ps: f64, lam: &CMat) -> f64 {
    let p = &inst.params;
    let ch = &inst.channels;
    let a0 = oracle_covariances(ch, p, &anchor.an_cov);
    let s0 = a0.reader.clone().try_inverse().unwrap();
    let s1 = (&a0.eve + a0.b.scale(anchor.p_cw)).try_inverse().unwrap();
    let o = oracle_covariances(ch, p, lam);
    logdet(&(&o.reader + o.a.scale(ps))) + logdet(&o.eve)
        - (&s0 * &o.reader).trace().re
        - (&s1 * (&o.eve + o.b.scale(ps))).trace().re
}
