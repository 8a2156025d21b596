//! CH, CHSH and mixed-projector CH expressions, optimal phase settings and
//! the two-qubit Werner baseline.
//!
//! The CH combination is
//! `P(c,d) + P(c,d') + P(c',d) - P(c',d') - P(c) - P(d) <= 0` and the CHSH one
//! `|E(c,d) + E(c,d') + E(c',d) - E(c',d')| <= 2`. In the mixed variant the
//! primed settings monitor the `-` projector family instead of `+`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2, TAU};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::closed_form::{asymptotic_signed_joint, asymptotic_single};
use crate::error::{check_unit, Error, Result};
use crate::fock::{self, MixtureState, Setting, SiteOutcome, TruncationPolicy};
use crate::params::{FormulaSource, ImperfectionParams, Sign};

const PROB_SLACK: f64 = 1e-12;

/// Four local phases, stored as canonical representatives in `[0, 2pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseSettings {
    pub phi_c: f64,
    pub phi_c_prime: f64,
    pub phi_d: f64,
    pub phi_d_prime: f64,
}

fn canonical(phi: f64) -> Result<f64> {
    if !phi.is_finite() {
        return Err(Error::Domain {
            name: "phi",
            value: phi,
            expected: "finite",
        });
    }
    let r = phi.rem_euclid(TAU);
    Ok(if r >= TAU { 0.0 } else { r })
}

impl PhaseSettings {
    pub fn new(phi_c: f64, phi_c_prime: f64, phi_d: f64, phi_d_prime: f64) -> Result<Self> {
        Ok(Self {
            phi_c: canonical(phi_c)?,
            phi_c_prime: canonical(phi_c_prime)?,
            phi_d: canonical(phi_d)?,
            phi_d_prime: canonical(phi_d_prime)?,
        })
    }

    /// Phase differences in CH/CHSH slot order: `(c,d), (c,d'), (c',d), (c',d')`.
    pub fn deltas(&self) -> [f64; 4] {
        [
            self.phi_c - self.phi_d,
            self.phi_c - self.phi_d_prime,
            self.phi_c_prime - self.phi_d,
            self.phi_c_prime - self.phi_d_prime,
        ]
    }

    /// The pairs of local phases in slot order.
    pub fn pairs(&self) -> [(f64, f64); 4] {
        [
            (self.phi_c, self.phi_d),
            (self.phi_c, self.phi_d_prime),
            (self.phi_c_prime, self.phi_d),
            (self.phi_c_prime, self.phi_d_prime),
        ]
    }

    /// All four phases shifted by the same amount.
    pub fn shifted(&self, theta: f64) -> Result<Self> {
        Self::new(
            self.phi_c + theta,
            self.phi_c_prime + theta,
            self.phi_d + theta,
            self.phi_d_prime + theta,
        )
    }

    /// Both of Daniel's phases shifted by `pi`, which flips the sign of every cosine.
    pub fn with_d_flipped(&self) -> Result<Self> {
        Self::new(self.phi_c, self.phi_c_prime, self.phi_d + PI, self.phi_d_prime + PI)
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.phi_c, self.phi_c_prime, self.phi_d, self.phi_d_prime]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum InequalityKind {
    Ch,
    Chsh,
    ChMixed,
    WernerCh,
    WernerChsh,
}

impl InequalityKind {
    pub const ALL: [InequalityKind; 5] = [
        InequalityKind::Ch,
        InequalityKind::Chsh,
        InequalityKind::ChMixed,
        InequalityKind::WernerCh,
        InequalityKind::WernerChsh,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            InequalityKind::Ch => "ch",
            InequalityKind::Chsh => "chsh",
            InequalityKind::ChMixed => "ch-mixed",
            InequalityKind::WernerCh => "werner-ch",
            InequalityKind::WernerChsh => "werner-chsh",
        }
    }

    pub fn is_chsh(self) -> bool {
        matches!(self, InequalityKind::Chsh | InequalityKind::WernerChsh)
    }

    pub fn is_werner(self) -> bool {
        matches!(self, InequalityKind::WernerCh | InequalityKind::WernerChsh)
    }

    pub fn bound(self) -> f64 {
        if self.is_chsh() {
            2.0
        } else {
            0.0
        }
    }

    /// The cosine combination that the optimal phases push to `2 sqrt 2`,
    /// with `c = [cos d1, cos d2, cos d3, cos d4]` in slot order.
    pub fn cosine_objective(self, settings: &PhaseSettings) -> f64 {
        let c = settings.deltas().map(f64::cos);
        match self {
            InequalityKind::Ch | InequalityKind::WernerCh | InequalityKind::WernerChsh => {
                -c[0] - c[1] - c[2] + c[3]
            }
            InequalityKind::ChMixed => -c[0] + c[1] + c[2] + c[3],
            InequalityKind::Chsh => c[0] + c[1] + c[2] - c[3],
        }
    }
}

impl fmt::Display for InequalityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InequalityKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        InequalityKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| {
                format!("unknown inequality `{s}` (expected ch, chsh, ch-mixed, werner-ch or werner-chsh)")
            })
    }
}

/// Value of a Bell expression next to its local-realistic bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Margin {
    pub value: f64,
    pub bound: f64,
    pub violated: bool,
}

impl Margin {
    fn ch(value: f64) -> Self {
        Margin { value, bound: 0.0, violated: value > 0.0 }
    }

    fn chsh(value: f64) -> Self {
        Margin { value, bound: 2.0, violated: value > 2.0 }
    }

    /// `value - bound`; positive iff violated.
    pub fn excess(&self) -> f64 {
        self.value - self.bound
    }
}

fn check_prob(name: &'static str, p: f64) -> Result<()> {
    if (-PROB_SLACK..=1.0 + PROB_SLACK).contains(&p) {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value: p,
            expected: "0 <= p <= 1",
        })
    }
}

/// `P(a,b) + P(a,b') + P(a',b) - P(a',b') - P(a) - P(b)` against 0.
pub fn ch_value(p_joint: [f64; 4], p_single_c: f64, p_single_d: f64) -> Result<Margin> {
    for p in p_joint {
        check_prob("p_joint", p)?;
    }
    check_prob("p_single_c", p_single_c)?;
    check_prob("p_single_d", p_single_d)?;
    Ok(Margin::ch(
        p_joint[0] + p_joint[1] + p_joint[2] - p_joint[3] - p_single_c - p_single_d,
    ))
}

/// `|E1 + E2 + E3 - E4|` against 2.
pub fn chsh_value(e: [f64; 4]) -> Result<Margin> {
    for v in e {
        if !(v.abs() <= 1.0 + 1e-9) {
            return Err(Error::Domain {
                name: "E",
                value: v,
                expected: "|E| <= 1",
            });
        }
    }
    Ok(Margin::chsh((e[0] + e[1] + e[2] - e[3]).abs()))
}

/// Mixed-projector CH: slots are `P++(c,d), P+-(c,d'), P-+(c',d), P--(c',d'),
/// P+(c), P+(d)`.
pub fn mixed_ch_value(p: [f64; 6]) -> Result<Margin> {
    ch_value([p[0], p[1], p[2], p[3]], p[4], p[5])
}

/// Printed large-amplitude correlation function; contains no `l`.
pub fn printed_correlation(eta: f64, delta: f64) -> f64 {
    let a = ((1.0 - eta) / (1.0 + eta)).powi(2) * (1.0 - 2.0 * eta);
    a + (2.0 * eta / (1.0 + eta)).powi(2) * delta.cos()
}

/// Large-amplitude correlation function with the decoherence parameter
/// restored: `((1-eta)/(1+eta))^2 (1-2 eta) - l (2 eta/(1+eta))^2 cos d`.
pub fn derived_correlation(eta: f64, l: f64, delta: f64) -> f64 {
    let a = ((1.0 - eta) / (1.0 + eta)).powi(2) * (1.0 - 2.0 * eta);
    a - l * (2.0 * eta / (1.0 + eta)).powi(2) * delta.cos()
}

/// Printed mixed-projector joint probabilities for a sign pair.
pub fn printed_mixed_joint(eta: f64, l: f64, sign_c: Sign, sign_d: Sign, delta: f64) -> f64 {
    let cos = delta.cos();
    let sq = (eta / (1.0 + eta)).powi(2);
    match (sign_c, sign_d) {
        (Sign::Plus, Sign::Plus) => sq * (2.0 - eta - l * cos),
        (Sign::Minus, Sign::Minus) => sq * (1.0 - l * cos),
        _ => eta / (1.0 + eta).powi(2) * (eta * eta - eta + 2.0 + l * cos),
    }
}

/// Probabilities of the single-photon scheme under one formula source.
///
/// `Paper` uses the printed large-amplitude forms, `Derived` the corrected
/// ones and `Oracle` the truncated Fock-space sums at the given `alpha2`.
#[derive(Debug, Clone)]
pub struct ProbabilityModel {
    params: ImperfectionParams,
    source: FormulaSource,
    oracle: Option<(MixtureState, TruncationPolicy)>,
}

impl ProbabilityModel {
    pub fn new(params: ImperfectionParams, source: FormulaSource) -> Result<Self> {
        let oracle = match source {
            FormulaSource::Oracle => {
                let state = fock::imperfect_state(&params)?;
                let policy = TruncationPolicy::for_state(&state);
                Some((state, policy))
            }
            _ => None,
        };
        Ok(Self { params, source, oracle })
    }

    pub fn with_policy(params: ImperfectionParams, policy: TruncationPolicy) -> Result<Self> {
        let state = fock::imperfect_state(&params)?;
        Ok(Self {
            params,
            source: FormulaSource::Oracle,
            oracle: Some((state, policy)),
        })
    }

    pub fn params(&self) -> &ImperfectionParams {
        &self.params
    }

    pub fn source(&self) -> FormulaSource {
        self.source
    }

    pub fn single(&self, sign: Sign, phi: f64) -> Result<f64> {
        let eta = self.params.eta;
        match &self.oracle {
            Some((state, policy)) => Ok(fock::summed_single(
                state,
                crate::params::Site::C,
                Setting::new(sign, phi),
                policy,
            )?
            .value),
            None => Ok(asymptotic_single(eta, sign)),
        }
    }

    pub fn joint(&self, sign_c: Sign, phi_c: f64, sign_d: Sign, phi_d: f64) -> Result<f64> {
        let (eta, l) = (self.params.eta, self.params.l);
        let delta = phi_c - phi_d;
        match (&self.oracle, self.source) {
            (Some((state, policy)), _) => Ok(fock::summed_joint(
                state,
                Setting::new(sign_c, phi_c),
                Setting::new(sign_d, phi_d),
                policy,
            )?
            .value),
            (None, FormulaSource::Paper) => Ok(printed_mixed_joint(eta, l, sign_c, sign_d, delta)),
            (None, _) => Ok(asymptotic_signed_joint(eta, l, sign_c, sign_d, delta)),
        }
    }

    /// Correlation function with the no-click outcome counted as `+1`.
    pub fn correlation(&self, phi_c: f64, phi_d: f64) -> Result<f64> {
        let (eta, l) = (self.params.eta, self.params.l);
        let delta = phi_c - phi_d;
        match (&self.oracle, self.source) {
            (Some((state, policy)), _) => oracle_correlation(state, phi_c, phi_d, policy),
            (None, FormulaSource::Paper) => Ok(printed_correlation(eta, delta)),
            (None, _) => Ok(derived_correlation(eta, l, delta)),
        }
    }
}

fn outcome_value(o: SiteOutcome) -> f64 {
    match o {
        SiteOutcome::Vacuum => 1.0,
        SiteOutcome::Click(s) => s.sign.value(),
    }
}

fn oracle_correlation(
    state: &MixtureState,
    phi_c: f64,
    phi_d: f64,
    policy: &TruncationPolicy,
) -> Result<f64> {
    let outcomes = |phi| {
        [
            SiteOutcome::Vacuum,
            SiteOutcome::Click(Setting::plus(phi)),
            SiteOutcome::Click(Setting::minus(phi)),
        ]
    };
    let mut terms = Vec::with_capacity(9);
    for oc in outcomes(phi_c) {
        for od in outcomes(phi_d) {
            let p = fock::summed_joint_outcome(state, oc, od, policy)?.value;
            terms.push(outcome_value(oc) * outcome_value(od) * p);
        }
    }
    Ok(crate::numeric::compensated_sum(terms))
}

/// Correlation function of the scheme at phase difference `delta`.
pub fn bjss_correlation(params: &ImperfectionParams, delta: f64, source: FormulaSource) -> Result<f64> {
    ProbabilityModel::new(*params, source)?.correlation(delta, 0.0)
}

/// The six mixed-CH probabilities, in [`mixed_ch_value`] slot order.
pub fn mixed_ch_probabilities(
    params: &ImperfectionParams,
    settings: &PhaseSettings,
    source: FormulaSource,
) -> Result<[f64; 6]> {
    mixed_ch_probabilities_with(&ProbabilityModel::new(*params, source)?, settings)
}

pub fn mixed_ch_probabilities_with(model: &ProbabilityModel, s: &PhaseSettings) -> Result<[f64; 6]> {
    Ok([
        model.joint(Sign::Plus, s.phi_c, Sign::Plus, s.phi_d)?,
        model.joint(Sign::Plus, s.phi_c, Sign::Minus, s.phi_d_prime)?,
        model.joint(Sign::Minus, s.phi_c_prime, Sign::Plus, s.phi_d)?,
        model.joint(Sign::Minus, s.phi_c_prime, Sign::Minus, s.phi_d_prime)?,
        model.single(Sign::Plus, s.phi_c)?,
        model.single(Sign::Plus, s.phi_d)?,
    ])
}

/// Canonical optimal phases `(phi_c, phi_c', phi_d, phi_d')`, with
/// `phi_c = 0` and `phi_c' = pi/2`.
pub fn optimal_phases(kind: InequalityKind) -> PhaseSettings {
    let (d, dp) = match kind {
        InequalityKind::Ch | InequalityKind::WernerCh | InequalityKind::WernerChsh => {
            (5.0 * FRAC_PI_4, 3.0 * FRAC_PI_4)
        }
        InequalityKind::ChMixed => (3.0 * FRAC_PI_4, FRAC_PI_4),
        InequalityKind::Chsh => (FRAC_PI_4, 7.0 * FRAC_PI_4),
    };
    PhaseSettings {
        phi_c: 0.0,
        phi_c_prime: FRAC_PI_2,
        phi_d: d,
        phi_d_prime: dp,
    }
}

/// Two-qubit Werner baseline: `(eta^2 (1 - l cos d)/4, eta/2)`.
pub fn werner_probabilities(eta: f64, l: f64, delta: f64) -> Result<(f64, f64)> {
    check_unit("eta", eta)?;
    check_unit("l", l)?;
    Ok((eta * eta * (1.0 - l * delta.cos()) / 4.0, eta / 2.0))
}

/// Correlation seen with detectors of efficiency `eta` when a no-click counts as `+1`.
pub fn werner_effective_correlation(e: f64, eta: f64) -> Result<f64> {
    check_unit("eta", eta)?;
    if !(e.abs() <= 1.0 + 1e-12) {
        return Err(Error::Domain {
            name: "E",
            value: e,
            expected: "|E| <= 1",
        });
    }
    Ok(eta * eta * e + (1.0 - eta).powi(2))
}

/// A complete Bell-test configuration. The no-click outcome of the
/// correlation-function tests is always counted as `+1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BellScenario {
    pub kind: InequalityKind,
    pub settings: PhaseSettings,
    pub source: FormulaSource,
    pub no_click_value: f64,
}

impl BellScenario {
    pub fn new(kind: InequalityKind, settings: PhaseSettings, source: FormulaSource) -> Self {
        Self { kind, settings, source, no_click_value: 1.0 }
    }

    pub fn optimal(kind: InequalityKind, source: FormulaSource) -> Self {
        Self::new(kind, optimal_phases(kind), source)
    }

    pub fn evaluate(&self, params: &ImperfectionParams) -> Result<Margin> {
        evaluate(self.kind, params, &self.settings, self.source)
    }
}

/// Margin of one inequality at the given settings.
pub fn evaluate(
    kind: InequalityKind,
    params: &ImperfectionParams,
    settings: &PhaseSettings,
    source: FormulaSource,
) -> Result<Margin> {
    let (eta, l) = (params.eta, params.l);
    match kind {
        InequalityKind::WernerCh => {
            let mut joints = [0.0; 4];
            for (j, d) in joints.iter_mut().zip(settings.deltas()) {
                *j = werner_probabilities(eta, l, d)?.0;
            }
            ch_value(joints, eta / 2.0, eta / 2.0)
        }
        InequalityKind::WernerChsh => {
            let mut e = [0.0; 4];
            for (v, d) in e.iter_mut().zip(settings.deltas()) {
                *v = werner_effective_correlation(-l * d.cos(), eta)?;
            }
            chsh_value(e)
        }
        _ => evaluate_with(kind, &ProbabilityModel::new(*params, source)?, settings),
    }
}

/// Margin of one single-photon inequality with a prepared probability model.
pub fn evaluate_with(kind: InequalityKind, model: &ProbabilityModel, s: &PhaseSettings) -> Result<Margin> {
    match kind {
        InequalityKind::Ch => {
            let mut joints = [0.0; 4];
            for (j, (pc, pd)) in joints.iter_mut().zip(s.pairs()) {
                *j = model.joint(Sign::Plus, pc, Sign::Plus, pd)?;
            }
            ch_value(joints, model.single(Sign::Plus, s.phi_c)?, model.single(Sign::Plus, s.phi_d)?)
        }
        InequalityKind::ChMixed => mixed_ch_value(mixed_ch_probabilities_with(model, s)?),
        InequalityKind::Chsh => {
            let mut e = [0.0; 4];
            for (v, (pc, pd)) in e.iter_mut().zip(s.pairs()) {
                *v = model.correlation(pc, pd)?;
            }
            chsh_value(e)
        }
        InequalityKind::WernerCh | InequalityKind::WernerChsh => {
            evaluate(kind, model.params(), s, model.source())
        }
    }
}

/// Best margin over the canonical optimal phases. For CHSH-type tests the
/// phases with Daniel's settings shifted by `pi` are tried as well, since the
/// sign of the cosine term depends on the parameters.
pub fn optimal_margin(kind: InequalityKind, params: &ImperfectionParams, source: FormulaSource) -> Result<Margin> {
    let settings = optimal_phases(kind);
    if kind.is_werner() {
        let m = evaluate(kind, params, &settings, source)?;
        if kind.is_chsh() {
            let f = evaluate(kind, params, &settings.with_d_flipped()?, source)?;
            return Ok(if f.value > m.value { f } else { m });
        }
        return Ok(m);
    }
    let model = ProbabilityModel::new(*params, source)?;
    let m = evaluate_with(kind, &model, &settings)?;
    if kind.is_chsh() {
        let f = evaluate_with(kind, &model, &settings.with_d_flipped()?)?;
        return Ok(if f.value > m.value { f } else { m });
    }
    Ok(m)
}

/// Maximum of the cosine objective over the phase grid `k * 2pi / steps`
/// with `phi_c = 0`, refined by coordinate search. Used to confirm that the
/// canonical settings are optimal.
pub fn search_cosine_optimum(kind: InequalityKind, steps: usize) -> (f64, PhaseSettings) {
    let step = TAU / steps as f64;
    let at = |a: f64, b: f64, c: f64| PhaseSettings {
        phi_c: 0.0,
        phi_c_prime: a,
        phi_d: b,
        phi_d_prime: c,
    };
    let mut best = (f64::NEG_INFINITY, at(0.0, 0.0, 0.0));
    for i in 0..steps {
        for j in 0..steps {
            for k in 0..steps {
                let s = at(i as f64 * step, j as f64 * step, k as f64 * step);
                let v = kind.cosine_objective(&s);
                if v > best.0 {
                    best = (v, s);
                }
            }
        }
    }
    let mut h = step;
    while h > 1e-12 {
        let mut improved = false;
        for axis in 0..3 {
            for dir in [-1.0, 1.0] {
                let mut p = [best.1.phi_c_prime, best.1.phi_d, best.1.phi_d_prime];
                p[axis] += dir * h;
                let s = at(p[0], p[1], p[2]);
                let v = kind.cosine_objective(&s);
                if v > best.0 {
                    best = (v, s);
                    improved = true;
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    best
}

/// `2 sqrt 2`, the value of the optimal cosine combination.
pub const TSIRELSON: f64 = 2.0 * SQRT_2;
