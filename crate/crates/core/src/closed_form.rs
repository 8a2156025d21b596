//! Closed-form detection probabilities.
//!
//! Per photon number, every probability is a product of one Poisson-like
//! weight per site,
//!
//! ```text
//! w(n) = e^{-a^2 eta} (a^2 eta)^{n-1} / ((n-1)! (1 + n/a^2)),
//! ```
//!
//! and a bracket that depends on the outcome signs and the phase difference.
//! For the `++` outcome the printed bracket is
//! `eta l (1+eta)^2/2 sin^2(d/2) + (1-l) eta + (1-eta) eta^2`, while the
//! Fock-space computation gives `eta^2 (2 - eta - l cos d)`; the two agree only
//! at `eta = 1`. Both are available through [`FormulaSource`].
//!
//! The large-amplitude forms replace the photon-number sums by the Poisson-sum
//! approximations of [`ApproxId`].

use serde::Serialize;

use crate::error::{check_positive, check_unit, Error, Result};
use crate::fock::{self, Certified, LocalProjector, Setting, TruncationPolicy};
use crate::numeric::{compensated_sum, poisson_ln_pmf, poisson_tail_bound, suggest_cutoff};
use crate::params::{FormulaSource, ImperfectionParams, Sign, Site};

fn check_n(n: usize) -> Result<()> {
    if n < 1 {
        return Err(Error::Domain {
            name: "n",
            value: n as f64,
            expected: "n >= 1",
        });
    }
    Ok(())
}

/// The per-site weight `w(n)` shared by all per-photon-number forms.
pub fn site_weight(params: &ImperfectionParams, n: usize) -> f64 {
    let mean = params.arriving_mean();
    let k = (n - 1) as u64;
    (poisson_ln_pmf(mean, k) - (1.0 + n as f64 / params.alpha2).ln()).exp()
}

/// Click probability of `|+, n, phi>` at one site; independent of `phi`.
pub fn p_plus_n(params: &ImperfectionParams, n: usize) -> Result<f64> {
    check_n(n)?;
    let eta = params.eta;
    Ok(0.5 * eta * (3.0 - eta) * site_weight(params, n))
}

/// Printed `++` bracket (half-angle form).
pub fn printed_joint_bracket(eta: f64, l: f64, delta: f64) -> f64 {
    let s = (0.5 * delta).sin();
    0.5 * eta * l * (1.0 + eta).powi(2) * s * s + (1.0 - l) * eta + (1.0 - eta) * eta * eta
}

/// `++` bracket confirmed by the Fock-space computation.
pub fn derived_joint_bracket(eta: f64, l: f64, delta: f64) -> f64 {
    eta * eta * (2.0 - eta - l * delta.cos())
}

/// Joint `++` probability at photon numbers `(n_c, n_d)` and `delta = phi_c - phi_d`.
pub fn p_joint_n(
    params: &ImperfectionParams,
    n_c: usize,
    n_d: usize,
    delta: f64,
    source: FormulaSource,
) -> Result<f64> {
    check_n(n_c)?;
    check_n(n_d)?;
    let weights = site_weight(params, n_c) * site_weight(params, n_d);
    match source {
        FormulaSource::Paper => Ok(weights * printed_joint_bracket(params.eta, params.l, delta)),
        FormulaSource::Derived => Ok(weights * derived_joint_bracket(params.eta, params.l, delta)),
        FormulaSource::Oracle => {
            let state = fock::imperfect_state(params)?;
            let a = state.reference_amp;
            fock::joint_probability(
                &state,
                &LocalProjector::new(Site::C, Sign::Plus, n_c, delta, a)?,
                &LocalProjector::new(Site::D, Sign::Plus, n_d, 0.0, a)?,
            )
        }
    }
}

/// Local overlap factors of one projector family in units of `sqrt(w(n))`:
/// `(|<.|0>|^2, |<.|1>|^2, <.|0><.|1>)` with the phase factor removed.
fn overlap_factors(sign: Sign, eta: f64, ratio_sq: f64) -> (f64, f64, f64) {
    match sign {
        Sign::Plus => (eta, 1.0, eta.sqrt()),
        Sign::Minus => (eta / ratio_sq, ratio_sq, -eta.sqrt()),
    }
}

/// Mixes the three state branches given the per-site overlap factors.
fn signed_bracket(eta: f64, l: f64, delta: f64, c: (f64, f64, f64), d: (f64, f64, f64)) -> f64 {
    let (u0c, u1c, xc) = c;
    let (u0d, u1d, xd) = d;
    let cross = u1c * u0d + u0c * u1d;
    0.5 * l * eta * (cross - 2.0 * xc * xd * delta.cos())
        + 0.5 * (1.0 - l) * eta * cross
        + (1.0 - eta) * u0c * u0d
}

/// Exact per-photon-number joint probability for any sign pair.
pub fn derived_signed_joint_n(
    params: &ImperfectionParams,
    sign_c: Sign,
    n_c: usize,
    sign_d: Sign,
    n_d: usize,
    delta: f64,
) -> Result<f64> {
    check_n(n_c)?;
    check_n(n_d)?;
    let (eta, l) = (params.eta, params.l);
    let c = overlap_factors(sign_c, eta, n_c as f64 / params.alpha2);
    let d = overlap_factors(sign_d, eta, n_d as f64 / params.alpha2);
    Ok(site_weight(params, n_c) * site_weight(params, n_d) * signed_bracket(eta, l, delta, c, d))
}

/// Exact per-photon-number single-site probability for either sign.
pub fn derived_single_n(params: &ImperfectionParams, sign: Sign, n: usize) -> Result<f64> {
    check_n(n)?;
    let eta = params.eta;
    let (u0, u1, _) = overlap_factors(sign, eta, n as f64 / params.alpha2);
    Ok(site_weight(params, n) * (0.5 * eta * u1 + (1.0 - 0.5 * eta) * u0))
}

fn certify_sum(params: &ImperfectionParams, sites: usize, policy: &TruncationPolicy) -> Result<f64> {
    let mean = params.arriving_mean();
    let bound = sites as f64 * poisson_tail_bound(mean, policy.n_max);
    if bound > policy.tail_bound {
        return Err(Error::Truncation {
            n_max: policy.n_max,
            bound,
            requested: policy.tail_bound,
            suggested: suggest_cutoff(mean, policy.tail_bound / sites as f64),
        });
    }
    Ok(bound)
}

/// `P_+(phi)` summed over photon numbers.
pub fn summed_p_plus(
    params: &ImperfectionParams,
    source: FormulaSource,
    policy: &TruncationPolicy,
) -> Result<Certified> {
    summed_single(params, Sign::Plus, source, policy)
}

/// Single-site probability of a sign summed over photon numbers. The printed
/// per-n form exists only for `+`; `Paper` with `-` is an error.
pub fn summed_single(
    params: &ImperfectionParams,
    sign: Sign,
    source: FormulaSource,
    policy: &TruncationPolicy,
) -> Result<Certified> {
    match source {
        FormulaSource::Oracle => {
            let state = fock::imperfect_state(params)?;
            fock::summed_single(&state, Site::C, Setting::new(sign, 0.0), policy)
        }
        FormulaSource::Paper if sign == Sign::Minus => Err(Error::Consistency(
            "no printed per-photon-number form for the `-` outcome".into(),
        )),
        FormulaSource::Paper | FormulaSource::Derived => {
            let error_bound = certify_sum(params, 1, policy)?;
            let terms: Result<Vec<f64>> = (1..=policy.n_max)
                .map(|n| match source {
                    FormulaSource::Paper => p_plus_n(params, n),
                    _ => derived_single_n(params, sign, n),
                })
                .collect();
            Ok(Certified { value: compensated_sum(terms?), error_bound })
        }
    }
}

/// `P_++(phi_c, phi_d)` summed over both photon numbers.
pub fn summed_p_joint(
    params: &ImperfectionParams,
    delta: f64,
    source: FormulaSource,
    policy: &TruncationPolicy,
) -> Result<Certified> {
    summed_signed_joint(params, Sign::Plus, Sign::Plus, delta, source, policy)
}

/// Joint probability of a sign pair summed over both photon numbers.
pub fn summed_signed_joint(
    params: &ImperfectionParams,
    sign_c: Sign,
    sign_d: Sign,
    delta: f64,
    source: FormulaSource,
    policy: &TruncationPolicy,
) -> Result<Certified> {
    match source {
        FormulaSource::Oracle => {
            let state = fock::imperfect_state(params)?;
            fock::summed_joint(&state, Setting::new(sign_c, delta), Setting::new(sign_d, 0.0), policy)
        }
        FormulaSource::Paper => {
            if (sign_c, sign_d) != (Sign::Plus, Sign::Plus) {
                return Err(Error::Consistency(
                    "no printed per-photon-number form for signed outcomes".into(),
                ));
            }
            let error_bound = certify_sum(params, 2, policy)?;
            let site: f64 = compensated_sum((1..=policy.n_max).map(|n| site_weight(params, n)));
            let value = site * site * printed_joint_bracket(params.eta, params.l, delta);
            Ok(Certified { value, error_bound })
        }
        FormulaSource::Derived => {
            let error_bound = certify_sum(params, 2, policy)?;
            let mut terms = Vec::with_capacity(policy.n_max * policy.n_max);
            for n_c in 1..=policy.n_max {
                for n_d in 1..=policy.n_max {
                    terms.push(derived_signed_joint_n(params, sign_c, n_c, sign_d, n_d, delta)?);
                }
            }
            Ok(Certified { value: compensated_sum(terms), error_bound })
        }
    }
}

/// Large-amplitude `P_+`: `eta (3 - eta) / (2 (1 + eta))`.
pub fn asymptotic_p_plus(eta: f64) -> f64 {
    eta * (3.0 - eta) / (2.0 * (1.0 + eta))
}

/// Large-amplitude single-site probability; the two signs sum to one.
pub fn asymptotic_single(eta: f64, sign: Sign) -> f64 {
    match sign {
        Sign::Plus => asymptotic_p_plus(eta),
        Sign::Minus => (2.0 - eta + eta * eta) / (2.0 * (1.0 + eta)),
    }
}

/// Site sums of the overlap factors after the Poisson-sum approximations,
/// in units of `1 / (1 + eta)`.
fn asymptotic_factors(sign: Sign, eta: f64) -> (f64, f64, f64) {
    match sign {
        Sign::Plus => (eta, 1.0, eta.sqrt()),
        Sign::Minus => (1.0, eta, -eta.sqrt()),
    }
}

/// Large-amplitude joint probability of any sign pair from the corrected brackets.
pub fn asymptotic_signed_joint(eta: f64, l: f64, sign_c: Sign, sign_d: Sign, delta: f64) -> f64 {
    let c = asymptotic_factors(sign_c, eta);
    let d = asymptotic_factors(sign_d, eta);
    signed_bracket(eta, l, delta, c, d) / (1.0 + eta).powi(2)
}

/// Large-amplitude `P_++`. `Paper` is the printed
/// `(2 - eta - l cos d) (eta / (1 + eta))^2`; `Derived` sums the corrected
/// per-n bracket with the Poisson-sum approximations.
pub fn asymptotic_p_joint(eta: f64, l: f64, delta: f64, source: FormulaSource) -> Result<f64> {
    check_unit("eta", eta)?;
    check_unit("l", l)?;
    match source {
        FormulaSource::Paper => Ok((2.0 - eta - l * delta.cos()) * (eta / (1.0 + eta)).powi(2)),
        FormulaSource::Derived => Ok(asymptotic_signed_joint(eta, l, Sign::Plus, Sign::Plus, delta)),
        FormulaSource::Oracle => Err(Error::Consistency(
            "the oracle has no large-amplitude limit; use summed_p_joint".into(),
        )),
    }
}

/// The printed per-n `++` bracket summed with the Poisson-sum approximation.
pub fn printed_bracket_asymptotic(eta: f64, l: f64, delta: f64) -> f64 {
    printed_joint_bracket(eta, l, delta) / (1.0 + eta).powi(2)
}

/// The four Poisson-sum approximations used for large coherent amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ApproxId {
    /// `Σ (1+n/a²)^-1 e^{-a²x} (a²x)^{n-1}/(n-1)! ≈ 1/(1+x)`
    Shifted,
    /// `Σ (1+n/a²)^-1 e^{-a²x} n (a²x)^n/(n! a²) ≈ x/(1+x)`
    Weighted,
    /// `Σ (1+n/a²)^-1 e^{-a²x} n (a²x)^{n-1}/((n-1)! a²) ≈ x/(1+x)`
    ShiftedWeighted,
    /// `Σ (1+n/a²)^-1 e^{-a²x} (a²x)^n/n! ≈ 1/(1+x)`
    Plain,
}

impl ApproxId {
    pub fn name(self) -> &'static str {
        match self {
            ApproxId::Shifted => "shifted",
            ApproxId::Weighted => "weighted",
            ApproxId::ShiftedWeighted => "shifted-weighted",
            ApproxId::Plain => "plain",
        }
    }

    pub const ALL: [ApproxId; 4] = [ApproxId::Shifted, ApproxId::Weighted, ApproxId::ShiftedWeighted, ApproxId::Plain];

    /// Short numeric id, 1 to 4 in declaration order.
    pub fn number(self) -> u8 {
        match self {
            ApproxId::Shifted => 1,
            ApproxId::Weighted => 2,
            ApproxId::ShiftedWeighted => 3,
            ApproxId::Plain => 4,
        }
    }

    pub fn rhs(self, x: f64) -> f64 {
        match self {
            ApproxId::Shifted | ApproxId::Plain => 1.0 / (1.0 + x),
            ApproxId::Weighted | ApproxId::ShiftedWeighted => x / (1.0 + x),
        }
    }

    fn ln_term(self, n: u64, x: f64, alpha2: f64) -> f64 {
        let mean = alpha2 * x;
        let damp = -(1.0 + n as f64 / alpha2).ln();
        let scale = (n as f64 / alpha2).ln();
        damp + match self {
            ApproxId::Shifted => poisson_ln_pmf(mean, n - 1),
            ApproxId::Weighted => scale + poisson_ln_pmf(mean, n),
            ApproxId::ShiftedWeighted => scale + poisson_ln_pmf(mean, n - 1),
            ApproxId::Plain => poisson_ln_pmf(mean, n),
        }
    }
}

fn check_x(x: f64) -> Result<f64> {
    if x > 0.0 && x <= 1.0 {
        Ok(x)
    } else {
        Err(Error::Domain {
            name: "x",
            value: x,
            expected: "0 < x <= 1",
        })
    }
}

/// Numerically summed left-hand side of one approximation. Every term is at
/// most a Poisson mass at `n - 1` or `n`, so the omitted part is bounded by
/// the Poisson tail beyond `n_max`.
pub fn approx_lhs(id: ApproxId, x: f64, alpha2: f64, policy: &TruncationPolicy) -> Result<Certified> {
    let x = check_x(x)?;
    let alpha2 = check_positive("alpha2", alpha2)?;
    let mean = alpha2 * x;
    let error_bound = poisson_tail_bound(mean, policy.n_max);
    if error_bound > policy.tail_bound {
        return Err(Error::Truncation {
            n_max: policy.n_max,
            bound: error_bound,
            requested: policy.tail_bound,
            suggested: suggest_cutoff(mean, policy.tail_bound),
        });
    }
    // smallest terms first
    let mut terms: Vec<f64> = (1..=policy.n_max as u64)
        .map(|n| id.ln_term(n, x, alpha2).exp())
        .collect();
    terms.sort_by(|a, b| a.total_cmp(b));
    Ok(Certified { value: compensated_sum(terms), error_bound })
}

/// One row of the approximation-accuracy table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApproxCheckRow {
    pub approx_id: u8,
    pub x: f64,
    pub alpha2: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

/// Ratios `lhs / rhs` for all four approximations over an `alpha2` grid,
/// ordered by approximation and then by grid position.
pub fn approx_ratio_table(x: f64, alpha2_grid: &[f64]) -> Result<Vec<ApproxCheckRow>> {
    let x = check_x(x)?;
    let mut rows = Vec::with_capacity(4 * alpha2_grid.len());
    for id in ApproxId::ALL {
        for &alpha2 in alpha2_grid {
            let policy = TruncationPolicy::for_mean(alpha2 * x);
            let lhs = approx_lhs(id, x, alpha2, &policy)?.value;
            let rhs = id.rhs(x);
            rows.push(ApproxCheckRow {
                approx_id: id.number(),
                x,
                alpha2,
                lhs,
                rhs,
                ratio: lhs / rhs,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn p(eta: f64, l: f64, alpha2: f64) -> ImperfectionParams {
        ImperfectionParams::new(eta, l, alpha2).unwrap()
    }

    #[test]
    fn p_plus_n_examples() {
        let v = p_plus_n(&p(1.0, 1.0, 1.0), 1).unwrap();
        assert!((v - (-1f64).exp() / 2.0).abs() < 1e-15);
        for n in 1..10 {
            assert_eq!(p_plus_n(&p(0.0, 0.5, 4.0), n).unwrap(), 0.0);
        }
        assert!(p_plus_n(&p(0.5, 0.5, 4.0), 0).is_err());
    }

    #[test]
    fn p_plus_n_large_n_finite() {
        for n in [1_000usize, 100_000, 1_000_000] {
            let v = p_plus_n(&p(0.9, 1.0, 1e5), n).unwrap();
            assert!(v.is_finite() && v >= 0.0);
            let j = p_joint_n(&p(0.9, 0.8, 1e5), n, n, 1.0, FormulaSource::Paper).unwrap();
            assert!(j.is_finite() && j >= 0.0);
        }
    }

    #[test]
    fn p_joint_n_examples() {
        for (n_c, n_d) in [(1, 1), (3, 7)] {
            let v = p_joint_n(&p(1.0, 1.0, 4.0), n_c, n_d, 0.0, FormulaSource::Paper).unwrap();
            assert!(v.abs() < 1e-18);
        }
        let v = p_joint_n(&p(1.0, 1.0, 1.0), 1, 1, PI, FormulaSource::Paper).unwrap();
        assert!((v - (-2f64).exp() / 2.0).abs() < 1e-15);
        let d = p_joint_n(&p(1.0, 1.0, 1.0), 1, 1, PI, FormulaSource::Derived).unwrap();
        assert!((v - d).abs() < 1e-15);
    }

    #[test]
    fn derived_matches_oracle_per_n() {
        let prm = p(0.8, 0.9, 4.0);
        let delta = 3.0 * PI / 4.0;
        let oracle = p_joint_n(&prm, 4, 4, delta, FormulaSource::Oracle).unwrap();
        let derived = p_joint_n(&prm, 4, 4, delta, FormulaSource::Derived).unwrap();
        let paper = p_joint_n(&prm, 4, 4, delta, FormulaSource::Paper).unwrap();
        // mpmath: 0.01456126246765206, printed bracket 0.01491177502700899
        assert!((oracle - 0.014_561_262_467_652_063).abs() < 1e-16);
        assert!((derived - oracle).abs() < 1e-16);
        assert!((paper - 0.014_911_775_027_008_993).abs() < 1e-16);
    }

    #[test]
    fn signed_per_n_forms_match_oracle() {
        let prm = p(0.63, 0.41, 6.5);
        let state = fock::imperfect_state(&prm).unwrap();
        let a = state.reference_amp;
        for sc in Sign::BOTH {
            for sd in Sign::BOTH {
                for (n_c, n_d) in [(1, 1), (2, 9), (7, 4)] {
                    let oracle = fock::joint_probability(
                        &state,
                        &LocalProjector::new(Site::C, sc, n_c, 1.3, a).unwrap(),
                        &LocalProjector::new(Site::D, sd, n_d, 0.0, a).unwrap(),
                    )
                    .unwrap();
                    let derived = derived_signed_joint_n(&prm, sc, n_c, sd, n_d, 1.3).unwrap();
                    assert!((oracle - derived).abs() < 1e-15, "{sc:?}{sd:?} {n_c},{n_d}");
                }
            }
            for n in [1, 3, 12] {
                let oracle = fock::single_probability(
                    &state,
                    &LocalProjector::new(Site::D, sc, n, 0.2, a).unwrap(),
                )
                .unwrap();
                assert!((oracle - derived_single_n(&prm, sc, n).unwrap()).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn summed_p_plus_sources_agree() {
        let prm = p(0.8, 0.6, 25.0);
        let policy = TruncationPolicy::for_mean(prm.arriving_mean());
        let paper = summed_p_plus(&prm, FormulaSource::Paper, &policy).unwrap().value;
        let oracle = summed_p_plus(&prm, FormulaSource::Oracle, &policy).unwrap().value;
        let derived = summed_p_plus(&prm, FormulaSource::Derived, &policy).unwrap().value;
        assert!((paper - oracle).abs() < 1e-13);
        assert!((derived - oracle).abs() < 1e-13);
    }

    #[test]
    fn asymptotic_values() {
        assert_eq!(asymptotic_p_plus(1.0), 0.5);
        assert_eq!(asymptotic_p_plus(0.0), 0.0);
        let at_crit = asymptotic_p_plus(0.7324);
        assert!((at_crit - 0.479_332_209_651_350_8).abs() < 1e-12);
        assert!(at_crit > 1.0 / (1.0 + 2f64.sqrt()));
        for k in 0..=100 {
            let eta = k as f64 / 100.0;
            let v = asymptotic_p_plus(eta);
            assert!((0.0..=0.5).contains(&v));
            assert!((asymptotic_single(eta, Sign::Plus) + asymptotic_single(eta, Sign::Minus) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn asymptotic_joint_examples() {
        let v = asymptotic_p_joint(1.0, 1.0, PI, FormulaSource::Paper).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
        let q = asymptotic_p_joint(1.0, 1.0, PI / 2.0, FormulaSource::Paper).unwrap();
        assert!((q - 0.25).abs() < 1e-15);
        // ideal relation with the half angle: 2 sin^2(d/2) P_+^2
        assert!((q - 2.0 * (PI / 4.0).sin().powi(2) * 0.25).abs() < 1e-15);

        let paper = asymptotic_p_joint(0.8, 1.0, PI, FormulaSource::Paper).unwrap();
        assert!((paper - 0.434_567_901_234_567_9).abs() < 1e-12);
        let derived = asymptotic_p_joint(0.8, 1.0, PI, FormulaSource::Derived).unwrap();
        assert!((paper - derived).abs() < 1e-15);
        let bracket = printed_bracket_asymptotic(0.8, 1.0, PI);
        assert!((bracket - paper).abs() > 1e-3);
        assert!(asymptotic_p_joint(0.8, 1.0, PI, FormulaSource::Oracle).is_err());
    }

    #[test]
    fn approx_lhs_examples() {
        let policy = TruncationPolicy::for_mean(400.0);
        let v = approx_lhs(ApproxId::Shifted, 1.0, 400.0, &policy).unwrap().value;
        assert!((v - 0.5).abs() < 1e-2);
        assert!(approx_lhs(ApproxId::Shifted, 0.0, 400.0, &policy).is_err());
        assert!(approx_lhs(ApproxId::Shifted, 1.5, 400.0, &policy).is_err());
        let short = TruncationPolicy::new(410, 1e-12).unwrap();
        assert!(matches!(approx_lhs(ApproxId::Plain, 1.0, 400.0, &short), Err(Error::Truncation { .. })));
    }

    #[test]
    fn approx_small_mean_is_far_off() {
        for id in ApproxId::ALL {
            let policy = TruncationPolicy::for_mean(0.5);
            let ratio = approx_lhs(id, 0.1, 5.0, &policy).unwrap().value / id.rhs(0.1);
            assert!((ratio - 1.0).abs() > 0.05, "{id:?} {ratio}");
        }
    }

    #[test]
    fn approx_table_shape() {
        let rows = approx_ratio_table(0.2, &[10.0, 20.0, 50.0, 100.0, 200.0]).unwrap();
        assert_eq!(rows.len(), 20);
        assert!(rows.iter().all(|r| r.ratio > 0.0));
        assert!(approx_ratio_table(0.2, &[]).unwrap().is_empty());
        // mpmath: fourth sum at x = 0.2, alpha^2 = 50
        let r16 = rows.iter().find(|r| r.approx_id == 4 && r.alpha2 == 50.0).unwrap();
        assert!((r16.ratio - 1.002_699_966_306_679_4).abs() < 1e-12);
    }

    #[test]
    fn larger_x_converges_faster() {
        let dev = |id: ApproxId, x: f64, alpha2: f64| {
            let policy = TruncationPolicy::for_mean(alpha2 * x);
            (approx_lhs(id, x, alpha2, &policy).unwrap().value / id.rhs(x) - 1.0).abs()
        };
        for alpha2 in [50.0, 100.0, 200.0] {
            for id in [ApproxId::Shifted, ApproxId::Weighted, ApproxId::ShiftedWeighted] {
                assert!(dev(id, 1.0, alpha2) < dev(id, 0.2, alpha2), "{id:?} {alpha2}");
            }
            // the plain sum crosses its estimate near alpha2 = 30 at x = 0.2
            assert!(dev(ApproxId::Plain, 1.0, alpha2) > dev(ApproxId::Plain, 0.2, alpha2));
        }
    }
}
