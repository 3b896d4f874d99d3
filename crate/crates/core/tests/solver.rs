mod common;

use backscatter_secrecy::linalg::{CMat, C64};
use backscatter_secrecy::model::{Instance, Solution, SystemParams};
use backscatter_secrecy::schemes::solve_general;
use backscatter_secrecy::solver::{
    armijo_step, project_feasible, solve_inner, solve_srm, surrogate_gradient, surrogate_value, SolverConfig,
    SurrogateContext, TaylorSurrogate, Termination,
};
use common::*;
use proptest::prelude::*;

fn point(ps: f64, lam: CMat) -> Solution {
    Solution { p_cw: ps, an_cov: lam }
}

#[test]
fn surrogate_value_matches_oracle() {
    let params = SystemParams::default();
    let mut r = rng(10);
    for t in 0..10 {
        let inst = sample_instance(&params, 5, t);
        let (aps, alam) = feasible_point(&mut r, 3, params.total_power);
        let anchor = point(aps, alam);
        let ctx = SurrogateContext::new(&inst, &anchor).unwrap();
        let (ps, lam) = feasible_point(&mut r, 3, params.total_power);
        let want = oracle_surrogate(&inst, &anchor, ps, &lam);
        let got = surrogate_value(&inst, &ctx, &point(ps, lam)).unwrap();
        assert!((got - want).abs() < 1e-9 * want.abs().max(1.0), "{got} vs {want}");
    }
}

#[test]
fn gradient_matches_finite_differences_of_oracle() {
    let params = SystemParams::default();
    let mut r = rng(11);
    for t in 0..20 {
        let inst = sample_instance(&params, 6, t);
        let (aps, alam) = feasible_point(&mut r, 3, params.total_power);
        let anchor = point(aps, alam);
        let ctx = SurrogateContext::new(&inst, &anchor).unwrap();
        let (ps, lam) = feasible_point(&mut r, 3, params.total_power);
        let g = surrogate_gradient(&inst, &ctx, &point(ps, lam.clone())).unwrap();
        let h = 1e-6 * params.total_power;
        let (fps, flam) = fd_gradient(ps, &lam, h, |a, b| oracle_surrogate(&inst, &anchor, a, b));
        let err = rel_error((g.ps, &g.lambda), (fps, &flam));
        assert!(err < 1e-5, "trial {t}: relative error {err:e}");
    }
}

#[test]
fn minorizes_the_secrecy_rate_and_touches_at_anchor() {
    let params = SystemParams::default();
    let mut r = rng(12);
    let (n, k) = (params.n_rx as f64, params.k_eve as f64);
    for t in 0..10 {
        let inst = sample_instance(&params, 7, t);
        let (aps, alam) = feasible_point(&mut r, 3, params.total_power);
        let anchor = point(aps, alam);
        let ctx = SurrogateContext::new(&inst, &anchor).unwrap();
        let constant = -logdet(&inst.interference_cov_reader(&anchor.an_cov).unwrap())
            - logdet(&(inst.interference_cov_eve(&anchor.an_cov).unwrap() + inst.effective.b_mat.scale(anchor.p_cw)))
            + n
            + k;
        let nats = |x: &Solution| inst.rates(x).unwrap().signed() * std::f64::consts::LN_2;
        let at_anchor = surrogate_value(&inst, &ctx, &anchor).unwrap() + constant;
        assert!((nats(&anchor) - at_anchor).abs() < 1e-9, "{} vs {at_anchor}", nats(&anchor));
        for _ in 0..20 {
            let (ps, lam) = feasible_point(&mut r, 3, params.total_power);
            let x = point(ps, lam);
            let lower = surrogate_value(&inst, &ctx, &x).unwrap() + constant;
            assert!(nats(&x) >= lower - 1e-9, "{} < {lower}", nats(&x));
        }
    }
}

#[test]
fn taylor_bound_overestimates_reader_logdet() {
    let params = SystemParams::default();
    let mut r = rng(13);
    let inst = sample_instance(&params, 8, 0);
    let (aps, alam) = feasible_point(&mut r, 3, params.total_power);
    let taylor = TaylorSurrogate::new(&inst, &point(aps, alam.clone())).unwrap();
    let at = |lam: &CMat| logdet(&oracle_covariances(&inst.channels, &params, lam).reader);
    assert!((taylor.reader_bound(&point(aps, alam.clone())) - at(&alam)).abs() < 1e-10);
    for _ in 0..50 {
        let (ps, lam) = feasible_point(&mut r, 3, params.total_power);
        assert!(taylor.reader_bound(&point(ps, lam.clone())) >= at(&lam) - 1e-12);
    }
}

#[test]
fn both_subproblem_constructions_agree() {
    let params = SystemParams::default();
    let mut r = rng(14);
    for t in 0..10 {
        let inst = sample_instance(&params, 9, t);
        let (aps, alam) = feasible_point(&mut r, 3, params.total_power);
        let anchor = point(aps, alam);
        let ctx = SurrogateContext::new(&inst, &anchor).unwrap();
        let taylor = TaylorSurrogate::new(&inst, &anchor).unwrap();
        let offset = taylor.value(&anchor).unwrap() - surrogate_value(&inst, &ctx, &anchor).unwrap();
        for _ in 0..5 {
            let (ps, lam) = feasible_point(&mut r, 3, params.total_power);
            let x = point(ps, lam);
            let a = surrogate_gradient(&inst, &ctx, &x).unwrap();
            let b = taylor.gradient(&x).unwrap();
            assert!(rel_error((b.ps, &b.lambda), (a.ps, &a.lambda)) < 1e-10);
            let d = taylor.value(&x).unwrap() - surrogate_value(&inst, &ctx, &x).unwrap();
            assert!((d - offset).abs() < 1e-9 * offset.abs().max(1.0));
        }
    }
}

#[test]
fn armijo_step_is_feasible_ascent() {
    let params = SystemParams::default();
    let cfg = SolverConfig::default();
    let mut r = rng(15);
    for t in 0..10 {
        let inst = sample_instance(&params, 10, t);
        let (ps, lam) = feasible_point(&mut r, 3, params.total_power);
        let x = point(ps, lam);
        let ctx = SurrogateContext::new(&inst, &x).unwrap();
        let grad = surrogate_gradient(&inst, &ctx, &x).unwrap();
        let step = armijo_step(&inst, &ctx, &x, &grad, &cfg).unwrap();
        step.next.check_feasible(params.total_power).unwrap();
        assert!(step.value >= surrogate_value(&inst, &ctx, &x).unwrap());
        if !step.stalled {
            assert!(step.mu > 0.0 && step.mu <= cfg.mu0);
        }
    }
}

#[test]
fn inner_values_are_nondecreasing() {
    let params = SystemParams::default();
    let inst = sample_instance(&params, 11, 3);
    let x = Solution::no_an(params.total_power, 3);
    let ctx = SurrogateContext::new(&inst, &x).unwrap();
    let out = solve_inner(&inst, &ctx, &x, &SolverConfig::default()).unwrap();
    assert!(out.values.windows(2).all(|w| w[1] >= w[0]));
    assert_eq!(out.values.len(), out.iterations + 1);
}

#[test]
fn outer_traces_are_nondecreasing() {
    let params = SystemParams::default();
    for t in 0..20 {
        let inst = sample_instance(&params, 12, t);
        let rep = solve_srm(&inst, &Solution::no_an(params.total_power, 3), &SolverConfig::default()).unwrap();
        for w in rep.iterates.windows(2) {
            assert!(w[1].secrecy_rate >= w[0].secrecy_rate - 1e-9);
        }
        assert_eq!(rep.iterates[0].outer, 0);
        assert_eq!(rep.termination, Termination::Converged);
        rep.solution.check_feasible(params.total_power).unwrap();
        let (cr, ce) = oracle_rates(&inst.channels, &params, rep.solution.p_cw, &rep.solution.an_cov);
        assert!((rep.secrecy_rate() - (cr - ce).max(0.0)).abs() < 1e-9);
    }
}

#[test]
fn zero_budget_gives_zero_rate() {
    let params = SystemParams {
        total_power: 0.0,
        ..SystemParams::default()
    };
    let inst = sample_instance(&params, 13, 0);
    let rep = solve_srm(&inst, &Solution::no_an(0.0, 3), &SolverConfig::default()).unwrap();
    assert_eq!(rep.secrecy_rate(), 0.0);
    assert_eq!(rep.solution.p_cw, 0.0);
    assert_eq!(rep.solution.an_power(), 0.0);
}

#[test]
fn without_an_eavesdropper_channel_noise_is_switched_off() {
    let params = SystemParams::default();
    let mut inst = sample_instance(&params, 14, 0);
    inst.channels.h_tag_to_eve.fill(C64::new(0.0, 0.0));
    inst.channels.h_reader_to_eve.fill(C64::new(0.0, 0.0));
    let inst = Instance::new(inst.channels, params.clone()).unwrap();
    let p = params.total_power;
    let start = point(0.5 * p, CMat::identity(3, 3).scale(0.5 * p / 3.0));
    let rep = solve_srm(&inst, &start, &SolverConfig::default()).unwrap();
    assert!(rep.solution.an_power() < 1e-3 * p, "AN power {}", rep.solution.an_power());
    let best = inst.secrecy_rate(&Solution::no_an(p, 3)).unwrap();
    assert!(rep.secrecy_rate() > best * (1.0 - 1e-3));
}

#[test]
fn small_instance_beats_dense_grid() {
    // M = 2, N = K = L = 1: five real unknowns, small enough to grid.
    let params = SystemParams {
        m_tx: 2,
        n_rx: 1,
        l_tag: 1,
        k_eve: 1,
        ..SystemParams::default()
    };
    let p = params.total_power;
    for t in 0..4 {
        let inst = sample_instance(&params, 15, t);
        let out = solve_general(&inst, &SolverConfig::default()).unwrap();
        let steps = 13;
        let h = p / (steps - 1) as f64;
        let mut best: f64 = 0.0;
        for ia in 0..steps {
            for ib in 0..steps - ia {
                let (a, b) = (ia as f64 * h, ib as f64 * h);
                for ir in -(steps as i64 / 2)..=(steps as i64 / 2) {
                    for ii in -(steps as i64 / 2)..=(steps as i64 / 2) {
                        let (re, im) = (ir as f64 * h / 2.0, ii as f64 * h / 2.0);
                        if re * re + im * im > a * b {
                            continue;
                        }
                        let lam = CMat::from_row_slice(2, 2, &[c(a, 0.0), c(re, im), c(re, -im), c(b, 0.0)]);
                        let left = p - a - b;
                        for s in 0..=8 {
                            let ps = left * s as f64 / 8.0;
                            best = best.max(oracle_secrecy(&inst.channels, &params, ps, &lam));
                        }
                    }
                }
            }
        }
        let got = out.report.secrecy_rate();
        assert!(got >= best - 1e-3 * best.max(1e-3), "trial {t}: solver {got} < grid {best}");
    }
}

#[test]
fn terminal_point_is_nearly_stationary() {
    let params = SystemParams::default();
    let cfg = SolverConfig {
        eps_outer: 1e-6,
        eps_inner: 1e-8,
        max_outer: 2000,
        max_inner: 20000,
        ..SolverConfig::default()
    };
    for t in 0..5 {
        let inst = sample_instance(&params, 16, t);
        let rep = solve_srm(&inst, &Solution::no_an(params.total_power, 3), &cfg).unwrap();
        let x = &rep.solution;
        if inst.rates(x).unwrap().signed() <= 0.0 {
            continue;
        }
        // At the anchor the surrogate gradient is the true gradient.
        let ctx = SurrogateContext::new(&inst, x).unwrap();
        let g = surrogate_gradient(&inst, &ctx, x).unwrap();
        let mu = 1e-2 * params.total_power / g.max_abs();
        let y = project_feasible(params.total_power, x.p_cw + mu * g.ps, &(&x.an_cov + g.lambda.scale(mu))).unwrap();
        let moved = dist2((y.p_cw, &y.an_cov), (x.p_cw, &x.an_cov)).sqrt();
        assert!(moved < 1e-2 * mu * g.max_abs(), "trial {t}: step {moved:e} vs {:e}", mu * g.max_abs());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn surrogate_is_concave_along_segments(seed in 0u64..5000, w in 0.05f64..0.95) {
        let params = SystemParams::default();
        let mut r = rng(seed);
        let inst = sample_instance(&params, 17, seed);
        let (aps, alam) = feasible_point(&mut r, 3, params.total_power);
        let ctx = SurrogateContext::new(&inst, &point(aps, alam)).unwrap();
        let (p1, l1) = feasible_point(&mut r, 3, params.total_power);
        let (p2, l2) = feasible_point(&mut r, 3, params.total_power);
        let mid = point(w * p1 + (1.0 - w) * p2, l1.scale(w) + l2.scale(1.0 - w));
        let g1 = surrogate_value(&inst, &ctx, &point(p1, l1)).unwrap();
        let g2 = surrogate_value(&inst, &ctx, &point(p2, l2)).unwrap();
        let gm = surrogate_value(&inst, &ctx, &mid).unwrap();
        prop_assert!(gm >= w * g1 + (1.0 - w) * g2 - 1e-10 * gm.abs().max(1.0));
    }
}
