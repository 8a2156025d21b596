//! Exact representation of the four-mode field behind the polarizing beam
//! splitter and truncated Fock-space evaluation of detection probabilities.
//!
//! Every site carries two modes: the mode that may hold the single photon and
//! the mode filled by the coherent local oscillator. Local kets are written
//! `|s, m>` with `s` the single-photon occupation and `m` the number of
//! coherent-mode photons, in that order at both sites.
//!
//! States are kept symbolically: a [`MixtureState`] is a weighted list of
//! [`PureComponent`]s, each a superposition of at most two single-photon
//! branches times a product of coherent states. Photon-number coefficients of
//! the coherent states are only expanded inside the probability kernels.
//!
//! Measurement projectors are defined with the nominal local-oscillator
//! amplitude `alpha`, while the field reaching the detectors has amplitude
//! `alpha * sqrt(eta)`. With that pairing the per-photon-number click
//! probability carries the `eta (3 - eta) / 2` and `1 + n / alpha^2` factors of
//! the known closed form.

use num_complex::Complex64;

use crate::error::{check_positive, check_unit, Error, Result};
use crate::numeric::{poisson_tail_bound, suggest_cutoff, CompensatedSum};
use crate::params::{ImperfectionParams, Sign, Site};

const AMP_REL_TOL: f64 = 1e-12;

/// Occupation of the two single-photon modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModePattern {
    pub c_single: u8,
    pub d_single: u8,
}

impl ModePattern {
    pub const VACUUM: ModePattern = ModePattern { c_single: 0, d_single: 0 };
    pub const AT_C: ModePattern = ModePattern { c_single: 1, d_single: 0 };
    pub const AT_D: ModePattern = ModePattern { c_single: 0, d_single: 1 };

    pub fn new(c_single: u8, d_single: u8) -> Result<Self> {
        if c_single > 1 || d_single > 1 || c_single + d_single > 1 {
            return Err(Error::Consistency(format!(
                "mode pattern ({c_single}, {d_single}) holds more than one single photon"
            )));
        }
        Ok(Self { c_single, d_single })
    }

    pub fn photons(self) -> u8 {
        self.c_single + self.d_single
    }

    pub fn at(self, site: Site) -> u8 {
        match site {
            Site::C => self.c_single,
            Site::D => self.d_single,
        }
    }
}

/// Superposition of single-photon branches times `|coherent_amp_c>|coherent_amp_d>`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureComponent {
    pub branches: Vec<(Complex64, ModePattern)>,
    pub coherent_amp_c: f64,
    pub coherent_amp_d: f64,
}

impl PureComponent {
    pub fn vacuum(coherent_amp_c: f64, coherent_amp_d: f64) -> Self {
        Self {
            branches: vec![(Complex64::new(1.0, 0.0), ModePattern::VACUUM)],
            coherent_amp_c,
            coherent_amp_d,
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.branches.iter().map(|(a, _)| a.norm_sqr()).sum()
    }

    pub fn coherent_amp(&self, site: Site) -> f64 {
        match site {
            Site::C => self.coherent_amp_c,
            Site::D => self.coherent_amp_d,
        }
    }

    /// Common single-photon number of all branches, if they share one.
    fn photon_number(&self) -> Option<u8> {
        let first = self.branches.first()?.1.photons();
        self.branches
            .iter()
            .all(|(_, p)| p.photons() == first)
            .then_some(first)
    }

    fn scaled_amps(&self, factor: f64) -> Self {
        Self {
            branches: self.branches.clone(),
            coherent_amp_c: self.coherent_amp_c * factor,
            coherent_amp_d: self.coherent_amp_d * factor,
        }
    }

    fn same_state(&self, other: &Self) -> bool {
        self.coherent_amp_c == other.coherent_amp_c
            && self.coherent_amp_d == other.coherent_amp_d
            && self.branches.len() == other.branches.len()
            && self
                .branches
                .iter()
                .zip(&other.branches)
                .all(|((a, p), (b, q))| p == q && (a - b).norm() < 1e-15)
    }
}

/// Weighted mixture of pure components.
///
/// `reference_amp` is the nominal local-oscillator amplitude the measurement
/// projectors are built with; channels never change it.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureState {
    pub components: Vec<(f64, PureComponent)>,
    pub reference_amp: f64,
}

impl MixtureState {
    pub fn total_weight(&self) -> f64 {
        self.components.iter().map(|(w, _)| w).sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.components.is_empty() {
            return Err(Error::Consistency("mixture has no components".into()));
        }
        for (w, c) in &self.components {
            if !(*w >= 0.0 && *w <= 1.0 + 1e-12) {
                return Err(Error::Consistency(format!("component weight {w} not in [0, 1]")));
            }
            if (c.norm_sqr() - 1.0).abs() > 1e-12 {
                return Err(Error::Consistency(format!(
                    "component is not normalized (norm^2 = {})",
                    c.norm_sqr()
                )));
            }
            if c.photon_number().is_none() {
                return Err(Error::Consistency(
                    "component mixes single-photon numbers".into(),
                ));
            }
        }
        let total = self.total_weight();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Consistency(format!("weights sum to {total}")));
        }
        Ok(())
    }

    /// Largest mean coherent photon number at `site` over all components.
    pub fn max_mean_photons(&self, site: Site) -> f64 {
        self.components
            .iter()
            .map(|(_, c)| c.coherent_amp(site).powi(2))
            .fold(0.0, f64::max)
    }

    fn merged(components: Vec<(f64, PureComponent)>, reference_amp: f64) -> Self {
        let mut out: Vec<(f64, PureComponent)> = Vec::with_capacity(components.len());
        for (w, c) in components {
            if w == 0.0 {
                continue;
            }
            match out.iter_mut().find(|(_, o)| o.same_state(&c)) {
                Some((ow, _)) => *ow += w,
                None => out.push((w, c)),
            }
        }
        Self { components: out, reference_amp }
    }
}

/// `(|1>_c|0>_d - |0>_c|1>_d)/sqrt(2)` times coherent states of amplitude
/// `sqrt(alpha2)` in both local-oscillator modes. Propagation phases are zero.
pub fn build_post_pbs_state(alpha2: f64) -> Result<MixtureState> {
    let alpha = check_positive("alpha2", alpha2)?.sqrt();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    Ok(MixtureState {
        components: vec![(
            1.0,
            PureComponent {
                branches: vec![
                    (Complex64::new(r, 0.0), ModePattern::AT_C),
                    (Complex64::new(-r, 0.0), ModePattern::AT_D),
                ],
                coherent_amp_c: alpha,
                coherent_amp_d: alpha,
            },
        )],
        reference_amp: alpha,
    })
}

/// Beam splitters of transmittivity `eta` in both output arms.
///
/// Coherent amplitudes shrink by `sqrt(eta)`; a single-photon component
/// survives with probability `eta` and otherwise leaves the vacuum behind.
pub fn apply_loss(state: &MixtureState, eta: f64) -> Result<MixtureState> {
    let eta = check_unit("eta", eta)?;
    let s = eta.sqrt();
    let mut out = Vec::with_capacity(state.components.len() + 1);
    for (w, c) in &state.components {
        match c.photon_number() {
            Some(0) => out.push((*w, c.scaled_amps(s))),
            Some(1) => {
                out.push((w * eta, c.scaled_amps(s)));
                out.push((
                    w * (1.0 - eta),
                    PureComponent::vacuum(c.coherent_amp_c * s, c.coherent_amp_d * s),
                ));
            }
            _ => {
                return Err(Error::Consistency(
                    "loss channel needs components with a definite photon number <= 1".into(),
                ))
            }
        }
    }
    Ok(MixtureState::merged(out, state.reference_amp))
}

/// Dephasing of the single-photon branches: coherence between branches is kept
/// with weight `l`, the rest collapses onto the individual branches.
pub fn apply_decoherence(state: &MixtureState, l: f64) -> Result<MixtureState> {
    let l = check_unit("l", l)?;
    let mut out = Vec::with_capacity(state.components.len() + 2);
    for (w, c) in &state.components {
        if c.branches.len() < 2 {
            out.push((*w, c.clone()));
            continue;
        }
        out.push((w * l, c.clone()));
        for (a, p) in &c.branches {
            out.push((
                w * (1.0 - l) * a.norm_sqr(),
                PureComponent {
                    branches: vec![(Complex64::new(1.0, 0.0), *p)],
                    coherent_amp_c: c.coherent_amp_c,
                    coherent_amp_d: c.coherent_amp_d,
                },
            ));
        }
    }
    Ok(MixtureState::merged(out, state.reference_amp))
}

/// The post-beam-splitter state after loss and decoherence.
pub fn imperfect_state(params: &ImperfectionParams) -> Result<MixtureState> {
    let s = build_post_pbs_state(params.alpha2)?;
    apply_decoherence(&apply_loss(&s, params.eta)?, params.l)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedLocalState {
    /// Occupation probability of the local single-photon mode.
    pub p1: f64,
    pub coherent_amp: f64,
}

/// Reduced state of one site: a diagonal single-photon mode times a coherent state.
pub fn reduced_local_state(state: &MixtureState, site: Site) -> Result<ReducedLocalState> {
    state.validate()?;
    let amp = state.components[0].1.coherent_amp(site);
    if state
        .components
        .iter()
        .any(|(_, c)| (c.coherent_amp(site) - amp).abs() > AMP_REL_TOL * amp.max(1.0))
    {
        return Err(Error::Consistency(
            "components carry different coherent amplitudes at this site".into(),
        ));
    }
    let p1 = state
        .components
        .iter()
        .map(|(w, c)| {
            w * c
                .branches
                .iter()
                .filter(|(_, p)| p.at(site) == 1)
                .map(|(a, _)| a.norm_sqr())
                .sum::<f64>()
        })
        .sum();
    Ok(ReducedLocalState { p1, coherent_amp: amp })
}

/// A local `n`-photon measurement state `|sign, n, phi>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalProjector {
    pub site: Site,
    pub sign: Sign,
    pub n: usize,
    pub phi: f64,
    /// Nominal coherent amplitude the projector family is defined with.
    pub alpha: f64,
}

impl LocalProjector {
    pub fn new(site: Site, sign: Sign, n: usize, phi: f64, alpha: f64) -> Result<Self> {
        projector_state(sign, n, phi, alpha)?;
        Ok(Self { site, sign, n, phi, alpha })
    }

    pub fn coefficients(&self) -> [Complex64; 2] {
        projector_coefficients(self.sign, self.n, self.phi, self.alpha)
    }
}

/// Coefficients of `|sign, n, phi>` on `|0, n>` and `|1, n-1>`.
///
/// `|+> ∝ (sqrt(n)/alpha)|0,n> + e^{i phi}|1,n-1>` and
/// `|-> ∝ |0,n> - e^{i phi}(sqrt(n)/alpha)|1,n-1>`.
pub fn projector_state(sign: Sign, n: usize, phi: f64, alpha: f64) -> Result<[Complex64; 2]> {
    if n < 1 {
        return Err(Error::Domain {
            name: "n",
            value: n as f64,
            expected: "n >= 1",
        });
    }
    check_positive("alpha", alpha)?;
    Ok(projector_coefficients(sign, n, phi, alpha))
}

fn projector_coefficients(sign: Sign, n: usize, phi: f64, alpha: f64) -> [Complex64; 2] {
    let ratio = (n as f64).sqrt() / alpha;
    let norm = 1.0 / (1.0 + ratio * ratio).sqrt();
    let phase = Complex64::from_polar(1.0, phi);
    match sign {
        Sign::Plus => [Complex64::new(norm * ratio, 0.0), phase * norm],
        Sign::Minus => [Complex64::new(norm, 0.0), -phase * norm * ratio],
    }
}

/// Photon-number amplitude `<m|amp>` of a real coherent state.
fn coherent_amplitude(amp: f64, m: usize) -> f64 {
    if amp == 0.0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    let ln_fact: f64 = (2..=m).map(|k| (k as f64).ln()).sum();
    (-0.5 * amp * amp + m as f64 * amp.ln() - 0.5 * ln_fact).exp()
}

/// `<m|amp>` for `m = 0..=m_max`.
fn coherent_amplitudes(amp: f64, m_max: usize) -> Vec<f64> {
    let mut out = vec![0.0; m_max + 1];
    if amp == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let ln_amp = amp.ln();
    let mut ln_c = -0.5 * amp * amp;
    out[0] = ln_c.exp();
    for (m, slot) in out.iter_mut().enumerate().skip(1) {
        ln_c += ln_amp - 0.5 * (m as f64).ln();
        *slot = ln_c.exp();
    }
    out
}

/// `<proj| s, amp>` for the local single-photon occupation `s`.
fn projector_overlap(coeffs: &[Complex64; 2], n: usize, s: u8, coh: impl Fn(usize) -> f64) -> Complex64 {
    match s {
        0 => coeffs[0].conj() * coh(n),
        _ => coeffs[1].conj() * coh(n - 1),
    }
}

fn check_projector_amp(state: &MixtureState, proj: &LocalProjector) -> Result<()> {
    let r = state.reference_amp;
    if (proj.alpha - r).abs() > AMP_REL_TOL * r.max(1.0) {
        return Err(Error::Consistency(format!(
            "projector alpha {} does not match the state's reference amplitude {r}",
            proj.alpha
        )));
    }
    Ok(())
}

/// Probability of the joint outcome `proj_c ⊗ proj_d` at fixed photon numbers.
pub fn joint_probability(
    state: &MixtureState,
    proj_c: &LocalProjector,
    proj_d: &LocalProjector,
) -> Result<f64> {
    if proj_c.site != Site::C || proj_d.site != Site::D {
        return Err(Error::Consistency("projectors must be given as (site c, site d)".into()));
    }
    check_projector_amp(state, proj_c)?;
    check_projector_amp(state, proj_d)?;
    let (kc, kd) = (proj_c.coefficients(), proj_d.coefficients());
    let mut total = CompensatedSum::default();
    for (w, comp) in &state.components {
        let amp: Complex64 = comp
            .branches
            .iter()
            .map(|(a, p)| {
                a * projector_overlap(&kc, proj_c.n, p.c_single, |m| {
                    coherent_amplitude(comp.coherent_amp_c, m)
                }) * projector_overlap(&kd, proj_d.n, p.d_single, |m| {
                    coherent_amplitude(comp.coherent_amp_d, m)
                })
            })
            .sum();
        total.add(w * amp.norm_sqr());
    }
    Ok(total.value())
}

/// One-sided probability, the other site traced out.
pub fn single_probability(state: &MixtureState, proj: &LocalProjector) -> Result<f64> {
    check_projector_amp(state, proj)?;
    let k = proj.coefficients();
    Ok(site_probability(state, proj.site, |comp, s| {
        projector_overlap(&k, proj.n, s, |m| coherent_amplitude(comp.coherent_amp(proj.site), m))
    }))
}

/// Probability that no photon at all arrives at `site`.
pub fn vacuum_probability(state: &MixtureState, site: Site) -> f64 {
    site_probability(state, site, |comp, s| {
        if s == 0 {
            Complex64::new(coherent_amplitude(comp.coherent_amp(site), 0), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// `Σ_w Σ_{other-site pattern} |Σ_b a_b overlap(b)|²`; branches that differ at
/// the traced-out site are orthogonal there.
fn site_probability<F>(state: &MixtureState, site: Site, overlap: F) -> f64
where
    F: Fn(&PureComponent, u8) -> Complex64,
{
    let other = match site {
        Site::C => Site::D,
        Site::D => Site::C,
    };
    let mut total = CompensatedSum::default();
    for (w, comp) in &state.components {
        let local = [overlap(comp, 0), overlap(comp, 1)];
        let mut groups = [Complex64::new(0.0, 0.0); 2];
        for (a, p) in &comp.branches {
            groups[p.at(other) as usize] += a * local[p.at(site) as usize];
        }
        total.add(w * (groups[0].norm_sqr() + groups[1].norm_sqr()));
    }
    total.value()
}

/// Weight of the state on the sector with `n_c` photons at c and `n_d` at d.
pub fn sector_weight(state: &MixtureState, n_c: usize, n_d: usize) -> f64 {
    let mut total = CompensatedSum::default();
    for (w, comp) in &state.components {
        for (a, p) in &comp.branches {
            let (sc, sd) = (p.c_single as usize, p.d_single as usize);
            if n_c < sc || n_d < sd {
                continue;
            }
            let cc = coherent_amplitude(comp.coherent_amp_c, n_c - sc);
            let cd = coherent_amplitude(comp.coherent_amp_d, n_d - sd);
            total.add(w * a.norm_sqr() * (cc * cd).powi(2));
        }
    }
    total.value()
}

/// A click setting: projector family sign and local phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Setting {
    pub sign: Sign,
    pub phi: f64,
}

impl Setting {
    pub fn new(sign: Sign, phi: f64) -> Self {
        Self { sign, phi }
    }

    pub fn plus(phi: f64) -> Self {
        Self::new(Sign::Plus, phi)
    }

    pub fn minus(phi: f64) -> Self {
        Self::new(Sign::Minus, phi)
    }
}

/// Local measurement record summed over photon numbers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SiteOutcome {
    /// No photon reached the site.
    Vacuum,
    /// Projection onto `Σ_{n>=1} |sign, n, phi><sign, n, phi|`.
    Click(Setting),
}

/// Photon-number cutoff for the infinite sums and the omitted mass it may leave.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    pub n_max: usize,
    pub tail_bound: f64,
}

impl TruncationPolicy {
    pub const DEFAULT_TAIL: f64 = 1e-12;

    pub fn new(n_max: usize, tail_bound: f64) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::Domain {
                name: "n_max",
                value: n_max as f64,
                expected: "n_max >= 1",
            });
        }
        check_positive("tail_bound", tail_bound)?;
        Ok(Self { n_max, tail_bound })
    }

    /// `n_max = ceil(mean + 12 sqrt(mean) + 20)` with a `1e-12` tail budget.
    pub fn for_mean(mean: f64) -> Self {
        let n_max = (mean + 12.0 * mean.sqrt() + 20.0).ceil() as usize;
        Self { n_max, tail_bound: Self::DEFAULT_TAIL }
    }

    pub fn for_state(state: &MixtureState) -> Self {
        Self::for_mean(state.max_mean_photons(Site::C).max(state.max_mean_photons(Site::D)))
    }
}

/// A truncated sum together with a guaranteed bound on the omitted mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certified {
    pub value: f64,
    pub error_bound: f64,
}

/// Mass omitted at one site by stopping at `n_max`: a count above `n_max`
/// needs at least `n_max` coherent photons.
fn site_tail(state: &MixtureState, site: Site, n_max: usize) -> f64 {
    poisson_tail_bound(state.max_mean_photons(site), n_max)
}

fn certify(state: &MixtureState, clicks: &[Site], policy: &TruncationPolicy) -> Result<f64> {
    let bound: f64 = clicks.iter().map(|&s| site_tail(state, s, policy.n_max)).sum();
    if bound > policy.tail_bound {
        let mean = clicks
            .iter()
            .map(|&s| state.max_mean_photons(s))
            .fold(0.0, f64::max);
        return Err(Error::Truncation {
            n_max: policy.n_max,
            bound,
            requested: policy.tail_bound,
            suggested: suggest_cutoff(mean, policy.tail_bound / clicks.len() as f64),
        });
    }
    Ok(bound)
}

/// Per-photon-number overlaps `[<o|0,·>, <o|1,·>]` of one site outcome.
fn outcome_table(
    outcome: &SiteOutcome,
    coh: &[f64],
    alpha: f64,
    n_max: usize,
) -> Vec<[Complex64; 2]> {
    match outcome {
        SiteOutcome::Vacuum => vec![[Complex64::new(coh[0], 0.0), Complex64::new(0.0, 0.0)]],
        SiteOutcome::Click(set) => (1..=n_max)
            .map(|n| {
                let k = projector_coefficients(set.sign, n, set.phi, alpha);
                [k[0].conj() * coh[n], k[1].conj() * coh[n - 1]]
            })
            .collect(),
    }
}

/// Probability of `outcome` at `site` summed over photon numbers.
pub fn summed_single(
    state: &MixtureState,
    site: Site,
    setting: Setting,
    policy: &TruncationPolicy,
) -> Result<Certified> {
    let error_bound = certify(state, &[site], policy)?;
    let other = match site {
        Site::C => Site::D,
        Site::D => Site::C,
    };
    let mut total = CompensatedSum::default();
    for (w, comp) in &state.components {
        let coh = coherent_amplitudes(comp.coherent_amp(site), policy.n_max);
        let table = outcome_table(&SiteOutcome::Click(setting), &coh, state.reference_amp, policy.n_max);
        let mut part = CompensatedSum::default();
        for row in &table {
            let mut groups = [Complex64::new(0.0, 0.0); 2];
            for (a, p) in &comp.branches {
                groups[p.at(other) as usize] += a * row[p.at(site) as usize];
            }
            part.add(groups[0].norm_sqr() + groups[1].norm_sqr());
        }
        total.add(w * part.value());
    }
    Ok(Certified { value: total.value(), error_bound })
}

/// Joint click probability summed over both photon numbers.
pub fn summed_joint(
    state: &MixtureState,
    c: Setting,
    d: Setting,
    policy: &TruncationPolicy,
) -> Result<Certified> {
    summed_joint_outcome(state, SiteOutcome::Click(c), SiteOutcome::Click(d), policy)
}

/// Joint probability of two site outcomes, either of which may be the vacuum.
pub fn summed_joint_outcome(
    state: &MixtureState,
    c: SiteOutcome,
    d: SiteOutcome,
    policy: &TruncationPolicy,
) -> Result<Certified> {
    let clicks: Vec<Site> = [(Site::C, &c), (Site::D, &d)]
        .into_iter()
        .filter(|(_, o)| matches!(o, SiteOutcome::Click(_)))
        .map(|(s, _)| s)
        .collect();
    let error_bound = if clicks.is_empty() { 0.0 } else { certify(state, &clicks, policy)? };
    let alpha = state.reference_amp;
    let mut total = CompensatedSum::default();
    for (w, comp) in &state.components {
        let tc = outcome_table(&c, &coherent_amplitudes(comp.coherent_amp_c, policy.n_max), alpha, policy.n_max);
        let td = outcome_table(&d, &coherent_amplitudes(comp.coherent_amp_d, policy.n_max), alpha, policy.n_max);
        // The double sum of |Σ_b a_b x_b(n_c) y_b(n_d)|^2 factorizes into
        // Σ_{b,b'} a_b a_b'^* X_{bb'} Y_{bb'} with per-site Gram sums.
        let gram = |table: &[[Complex64; 2]], slot: &dyn Fn(&ModePattern) -> usize| {
            let mut g = vec![Complex64::new(0.0, 0.0); comp.branches.len() * comp.branches.len()];
            let nb = comp.branches.len();
            for row in table {
                for (i, (_, pi)) in comp.branches.iter().enumerate() {
                    for (j, (_, pj)) in comp.branches.iter().enumerate() {
                        g[i * nb + j] += row[slot(pi)] * row[slot(pj)].conj();
                    }
                }
            }
            g
        };
        let gc = gram(&tc, &|p| p.c_single as usize);
        let gd = gram(&td, &|p| p.d_single as usize);
        let nb = comp.branches.len();
        let mut part = CompensatedSum::default();
        for (i, (ai, _)) in comp.branches.iter().enumerate() {
            for (j, (aj, _)) in comp.branches.iter().enumerate() {
                part.add((ai * aj.conj() * gc[i * nb + j] * gd[i * nb + j]).re);
            }
        }
        total.add(w * part.value().max(0.0));
    }
    Ok(Certified { value: total.value(), error_bound })
}
