//! Printed formulas that disagree with the Fock-space computation, each
//! evaluated at a point where the disagreement is visible.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use serde::Serialize;

use crate::bell::{self, InequalityKind};
use crate::closed_form;
use crate::critical::{self, SolverConfig};
use crate::error::Result;
use crate::fock::{self, LocalProjector, Setting, TruncationPolicy};
use crate::numeric::bisect;
use crate::params::{FormulaSource, ImperfectionParams, Sign, Site};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LedgerEntry {
    pub key: &'static str,
    pub topic: &'static str,
    pub printed_expr: &'static str,
    pub derived_expr: &'static str,
    pub point: String,
    pub printed_value: f64,
    pub derived_value: f64,
    /// Fock-space value at `alpha2`, where one exists.
    pub oracle_value: Option<f64>,
    pub alpha2: f64,
    /// Printed and derived values agree within `1e-6`.
    pub agree: bool,
}

const AGREE_TOL: f64 = 1e-6;

#[allow(clippy::too_many_arguments)]
fn entry(
    key: &'static str,
    topic: &'static str,
    printed_expr: &'static str,
    derived_expr: &'static str,
    point: String,
    printed_value: f64,
    derived_value: f64,
    oracle_value: Option<f64>,
    alpha2: f64,
) -> LedgerEntry {
    LedgerEntry {
        key,
        topic,
        printed_expr,
        derived_expr,
        point,
        printed_value,
        derived_value,
        oracle_value,
        alpha2,
        agree: (printed_value - derived_value).abs() <= AGREE_TOL,
    }
}

/// Threshold coherence from the printed simplification of the CH critical equation.
pub fn printed_ch_l_crit(eta: f64) -> f64 {
    (3.0 - 2.0 * eta + eta * eta) / (2.0 * SQRT_2 * eta * eta)
}

/// Threshold coherence from the displayed numerator
/// `-eta^3 + 2 eta^2 l (1 + sqrt 2) - 3 eta = 0`.
pub fn numerator_ch_l_crit(eta: f64) -> f64 {
    (eta * eta + 3.0) / (2.0 * (1.0 + SQRT_2) * eta)
}

/// Printed closed form of the CHSH threshold transmission, `3 sqrt 2 / (4 + sqrt 2)`.
pub fn printed_chsh_eta_closed_form() -> f64 {
    3.0 * SQRT_2 / (4.0 + SQRT_2)
}

/// Root in `eta` of `l = (-eta^3 + 3 eta^2 - eta + 1) / (2 sqrt 2 eta^2)` at `l = 1`.
pub fn chsh_cubic_root() -> Result<f64> {
    Ok(bisect(|eta| Ok(1.0 - critical::chsh_l_crit(eta)), 0.5, 1.0, 1e-14, 200)?.x)
}

/// Printed mixed-CH threshold coherence `(3 - eta) / (2 sqrt 2)`.
pub fn printed_mixed_l_crit(eta: f64) -> f64 {
    (3.0 - eta) / (2.0 * SQRT_2)
}

/// Every ledger entry, with oracle values at `alpha2`.
pub fn discrepancy_ledger(alpha2: f64) -> Result<Vec<LedgerEntry>> {
    let oracle_cfg = SolverConfig { alpha2, ..SolverConfig::for_source(FormulaSource::Oracle) };
    let oracle = FormulaSource::Oracle;
    let mut out = Vec::new();

    let eta = 0.9;
    out.push(entry(
        "ch-critical-simplification",
        "CH threshold coherence: printed simplification",
        "l = (3 - 2 eta + eta^2) / (2 sqrt2 eta^2)",
        "l = (3 - 2 eta + eta^2) / (2 sqrt2 eta)",
        format!("eta = {eta}"),
        printed_ch_l_crit(eta),
        critical::derived_ch_l_crit(eta),
        Some(critical::critical_l(InequalityKind::Ch, eta, &oracle_cfg, oracle)?.x),
        alpha2,
    ));

    out.push(entry(
        "ch-critical-numerator",
        "CH threshold coherence: displayed numerator of the critical equation",
        "-eta^3 + 2 eta^2 l (1 + sqrt2) - 3 eta = 0",
        "-eta^2 + 2 eta + 2 sqrt2 l eta - 3 = 0",
        "eta = 1".to_string(),
        numerator_ch_l_crit(1.0),
        critical::derived_ch_l_crit(1.0),
        Some(critical::critical_l(InequalityKind::Ch, 1.0, &oracle_cfg, oracle)?.x),
        alpha2,
    ));

    let printed_eta_at_l1 = bisect(|e| Ok(printed_ch_l_crit(e) - 1.0), 0.5, 1.0, 1e-14, 200)?.x;
    let derived_eta_at_l1 = 1.0 + SQRT_2 - 2f64.powf(0.75);
    out.push(entry(
        "ch-critical-eta",
        "CH threshold transmission at l = 1 from the printed simplification",
        "root of (3 - 2 eta + eta^2) / (2 sqrt2 eta^2) = 1",
        "1 + sqrt2 - 2^(3/4)",
        "l = 1".to_string(),
        printed_eta_at_l1,
        derived_eta_at_l1,
        Some(critical::critical_eta(InequalityKind::Ch, 1.0, &oracle_cfg, oracle)?.x),
        alpha2,
    ));

    let (eta, l, delta) = (0.9, 0.8, PI / 4.0);
    let prm = ImperfectionParams::new(eta, l, alpha2)?;
    out.push(entry(
        "chsh-correlation-missing-l",
        "CHSH correlation function",
        "((1-eta)/(1+eta))^2 (1 - 2 eta) + (2 eta/(1+eta))^2 cos d",
        "((1-eta)/(1+eta))^2 (1 - 2 eta) - l (2 eta/(1+eta))^2 cos d",
        format!("eta = {eta}, l = {l}, d = pi/4"),
        bell::printed_correlation(eta, delta),
        bell::derived_correlation(eta, l, delta),
        Some(bell::bjss_correlation(&prm, delta, oracle)?),
        alpha2,
    ));

    out.push(entry(
        "chsh-threshold-closed-form",
        "CHSH threshold transmission at l = 1",
        "3 sqrt2 / (4 + sqrt2)",
        "root of -eta^3 + 3 eta^2 - eta + 1 = 2 sqrt2 eta^2",
        "l = 1".to_string(),
        printed_chsh_eta_closed_form(),
        chsh_cubic_root()?,
        Some(critical::critical_eta(InequalityKind::Chsh, 1.0, &oracle_cfg, oracle)?.x),
        alpha2,
    ));

    let delta = FRAC_PI_2;
    let ideal = ImperfectionParams::new(1.0, 1.0, alpha2)?;
    let state = fock::imperfect_state(&ideal)?;
    let policy = TruncationPolicy::for_state(&state);
    let p_plus = closed_form::asymptotic_p_plus(1.0);
    out.push(entry(
        "half-angle",
        "ideal joint probability relation",
        "P++ = 2 sin^2(d) P+ P+",
        "P++ = 2 sin^2(d/2) P+ P+",
        "eta = 1, l = 1, d = pi/2".to_string(),
        2.0 * delta.sin().powi(2) * p_plus * p_plus,
        2.0 * (0.5 * delta).sin().powi(2) * p_plus * p_plus,
        Some(fock::summed_joint(&state, Setting::plus(delta), Setting::plus(0.0), &policy)?.value),
        alpha2,
    ));

    let (eta, l, delta, n) = (0.8, 0.9, 3.0 * PI / 4.0, 4usize);
    let small = ImperfectionParams::new(eta, l, 4.0)?;
    let small_state = fock::imperfect_state(&small)?;
    let a = small_state.reference_amp;
    out.push(entry(
        "joint-bracket",
        "per-photon-number joint probability bracket",
        "eta l (1+eta)^2/2 sin^2(d/2) + (1-l) eta + (1-eta) eta^2",
        "eta^2 (2 - eta - l cos d)",
        format!("eta = {eta}, l = {l}, d = 3pi/4, n_c = n_d = {n}, alpha2 = 4"),
        closed_form::p_joint_n(&small, n, n, delta, FormulaSource::Paper)?,
        closed_form::p_joint_n(&small, n, n, delta, FormulaSource::Derived)?,
        Some(fock::joint_probability(
            &small_state,
            &LocalProjector::new(Site::C, Sign::Plus, n, delta, a)?,
            &LocalProjector::new(Site::D, Sign::Plus, n, 0.0, a)?,
        )?),
        4.0,
    ));

    let ideal_model = bell::ProbabilityModel::new(ideal, oracle)?;
    out.push(entry(
        "mixed-ch-probabilities",
        "mixed-projector joint probability P-+",
        "eta/(1+eta)^2 (eta^2 - eta + 2 + l cos d)",
        "eta/(1+eta)^2 ((eta^2 - 2 eta + 3)/2 + l eta cos d)",
        "eta = 1, l = 1, d = 0".to_string(),
        bell::printed_mixed_joint(1.0, 1.0, Sign::Minus, Sign::Plus, 0.0),
        closed_form::asymptotic_signed_joint(1.0, 1.0, Sign::Minus, Sign::Plus, 0.0),
        Some(ideal_model.joint(Sign::Minus, 0.0, Sign::Plus, 0.0)?),
        alpha2,
    ));

    let eta = 0.9;
    out.push(entry(
        "mixed-ch-threshold",
        "mixed-projector CH threshold coherence",
        "l = (3 - eta) / (2 sqrt2)",
        "l = (-eta^3 + 3 eta^2 - eta + 1) / (2 sqrt2 eta^2)",
        format!("eta = {eta}"),
        printed_mixed_l_crit(eta),
        critical::chsh_l_crit(eta),
        Some(critical::critical_l(InequalityKind::ChMixed, eta, &oracle_cfg, oracle)?.x),
        alpha2,
    ));

    Ok(out)
}
