use std::f64::consts::TAU;

use bjss_core::bell::{self, optimal_phases, ProbabilityModel};
use bjss_core::closed_form::{asymptotic_p_plus, asymptotic_single};
use bjss_core::critical::{critical_eta, margin_fn, verify_region, SolverConfig};
use bjss_core::fock::{self, Setting, SiteOutcome, TruncationPolicy};
use bjss_core::{FormulaSource, ImperfectionParams, InequalityKind, Sign, Site};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = ImperfectionParams> {
    (0.0..=1.0f64, 0.0..=1.0f64, 0.5..40.0f64)
        .prop_map(|(eta, l, alpha2)| ImperfectionParams::new(eta, l, alpha2).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn channels_conserve_weight(p in params()) {
        let s = fock::imperfect_state(&p).unwrap();
        prop_assert!((s.total_weight() - 1.0).abs() < 1e-12);
        prop_assert!(s.components.iter().all(|(w, _)| *w >= 0.0));
    }

    #[test]
    fn channel_order_does_not_matter(p in params(), phi in 0.0..TAU) {
        let base = fock::build_post_pbs_state(p.alpha2).unwrap();
        let a = fock::apply_decoherence(&fock::apply_loss(&base, p.eta).unwrap(), p.l).unwrap();
        let b = fock::apply_loss(&fock::apply_decoherence(&base, p.l).unwrap(), p.eta).unwrap();
        let policy = TruncationPolicy::for_state(&a);
        for (sc, sd) in [(Sign::Plus, Sign::Plus), (Sign::Minus, Sign::Plus), (Sign::Minus, Sign::Minus)] {
            let x = fock::summed_joint(&a, Setting::new(sc, phi), Setting::new(sd, 0.0), &policy).unwrap().value;
            let y = fock::summed_joint(&b, Setting::new(sc, phi), Setting::new(sd, 0.0), &policy).unwrap().value;
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn no_signaling(p in params(), phi_c in 0.0..TAU, d1 in 0.0..TAU, d2 in 0.0..TAU) {
        let s = fock::imperfect_state(&p).unwrap();
        let policy = TruncationPolicy::for_state(&s);
        let marginal = |phi_d: f64| -> f64 {
            [SiteOutcome::Vacuum, SiteOutcome::Click(Setting::plus(phi_d)), SiteOutcome::Click(Setting::minus(phi_d))]
                .into_iter()
                .map(|od| fock::summed_joint_outcome(&s, SiteOutcome::Click(Setting::plus(phi_c)), od, &policy).unwrap().value)
                .sum()
        };
        prop_assert!((marginal(d1) - marginal(d2)).abs() < 1e-12);
    }

    #[test]
    fn marginal_is_phase_independent(p in params(), phi in 0.0..TAU) {
        let s = fock::imperfect_state(&p).unwrap();
        let policy = TruncationPolicy::for_state(&s);
        for site in [Site::C, Site::D] {
            let a = fock::summed_single(&s, site, Setting::plus(0.0), &policy).unwrap().value;
            let b = fock::summed_single(&s, site, Setting::plus(phi), &policy).unwrap().value;
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn doubling_cutoff_stays_within_certified_bound(p in params()) {
        let s = fock::imperfect_state(&p).unwrap();
        let policy = TruncationPolicy::for_state(&s);
        let wide = TruncationPolicy::new(2 * policy.n_max, policy.tail_bound).unwrap();
        let a = fock::summed_joint(&s, Setting::plus(1.0), Setting::minus(0.0), &policy).unwrap();
        let b = fock::summed_joint(&s, Setting::plus(1.0), Setting::minus(0.0), &wide).unwrap();
        prop_assert!((b.value - a.value).abs() <= a.error_bound + 1e-14);
    }

    #[test]
    fn global_phase_shift_leaves_margins(eta in 0.0..=1.0f64, l in 0.0..=1.0f64, shift in -10.0..10.0f64) {
        let p = ImperfectionParams::new(eta, l, 100.0).unwrap();
        for kind in [InequalityKind::Ch, InequalityKind::ChMixed, InequalityKind::WernerCh] {
            let s = optimal_phases(kind);
            let a = bell::evaluate(kind, &p, &s, FormulaSource::Derived).unwrap().value;
            let b = bell::evaluate(kind, &p, &s.shifted(shift).unwrap(), FormulaSource::Derived).unwrap().value;
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn correlations_are_bounded(eta in 0.0..=1.0f64, l in 0.0..=1.0f64, delta in 0.0..TAU) {
        let p = ImperfectionParams::new(eta, l, 100.0).unwrap();
        for source in FormulaSource::ALL {
            let e = bell::bjss_correlation(&p, delta, source).unwrap();
            prop_assert!(e.abs() <= 1.0 + 1e-12, "{source}: {e}");
        }
    }

    #[test]
    fn chsh_margin_never_exceeds_tsirelson(eta in 0.0..=1.0f64, l in 0.0..=1.0f64) {
        let p = ImperfectionParams::new(eta, l, 100.0).unwrap();
        let m = bell::optimal_margin(InequalityKind::Chsh, &p, FormulaSource::Derived).unwrap();
        prop_assert!(m.value <= bell::TSIRELSON + 1e-12);
    }

    #[test]
    fn single_click_grows_with_transmission(a in 0.0..=1.0f64, b in 0.0..=1.0f64, l in 0.0..=1.0f64) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let s = optimal_phases(InequalityKind::ChMixed);
        let x = bell::mixed_ch_probabilities(&ImperfectionParams::new(lo, l, 100.0).unwrap(), &s, FormulaSource::Derived).unwrap();
        let y = bell::mixed_ch_probabilities(&ImperfectionParams::new(hi, l, 100.0).unwrap(), &s, FormulaSource::Derived).unwrap();
        prop_assert!(y[4] >= x[4] && y[5] >= x[5]);
    }

    #[test]
    fn violation_region_is_upward_closed(
        eta in 0.0..=1.0f64, l in 0.0..=1.0f64, de in 0.0..=1.0f64, dl in 0.0..=1.0f64,
    ) {
        let eta2 = eta + (1.0 - eta) * de;
        let l2 = l + (1.0 - l) * dl;
        for kind in InequalityKind::ALL {
            if verify_region(kind, eta, l, 100.0, FormulaSource::Derived).unwrap() {
                prop_assert!(verify_region(kind, eta2, l2, 100.0, FormulaSource::Derived).unwrap(), "{kind}");
            }
        }
    }

    #[test]
    fn asymptotic_singles(eta in 0.0..=1.0f64) {
        let v = asymptotic_p_plus(eta);
        prop_assert!((0.0..=0.5).contains(&v));
        prop_assert!((asymptotic_single(eta, Sign::Plus) + asymptotic_single(eta, Sign::Minus) - 1.0).abs() < 1e-15);
    }
}

#[test]
fn roots_have_small_residuals() {
    let cfg = SolverConfig::default();
    for kind in InequalityKind::ALL {
        for l in [0.8, 0.9, 1.0] {
            let r = critical_eta(kind, l, &cfg, FormulaSource::Derived).unwrap();
            let m = margin_fn(kind, r.x, l, cfg.alpha2, FormulaSource::Derived).unwrap();
            assert!(m.abs() <= 10.0 * cfg.tol, "{kind} {l}: {m}");
        }
    }
}

#[test]
fn oracle_thresholds_near_asymptotic() {
    let cfg = SolverConfig::for_source(FormulaSource::Oracle);
    for kind in [InequalityKind::Ch, InequalityKind::Chsh, InequalityKind::ChMixed] {
        let o = critical_eta(kind, 1.0, &cfg, FormulaSource::Oracle).unwrap().x;
        let d = critical_eta(kind, 1.0, &SolverConfig::default(), FormulaSource::Derived).unwrap().x;
        assert!((o - d).abs() < 2e-2, "{kind}: oracle {o}, derived {d}");
    }
}

#[test]
fn oracle_model_matches_derived_at_large_amplitude() {
    let p = ImperfectionParams::new(0.8, 0.9, 400.0).unwrap();
    let o = ProbabilityModel::new(p, FormulaSource::Oracle).unwrap();
    let d = ProbabilityModel::new(p, FormulaSource::Derived).unwrap();
    for (sc, sd) in [(Sign::Plus, Sign::Plus), (Sign::Plus, Sign::Minus), (Sign::Minus, Sign::Minus)] {
        let a = o.joint(sc, 1.1, sd, 0.0).unwrap();
        let b = d.joint(sc, 1.1, sd, 0.0).unwrap();
        assert!((a - b).abs() < 5e-3, "{sc:?}{sd:?}: {a} vs {b}");
    }
}
