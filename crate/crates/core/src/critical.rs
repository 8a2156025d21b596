//! Critical transmission and coherence thresholds by bisection, and curve
//! tracing over either parameter.

use rayon::prelude::*;
use serde::Serialize;

use crate::bell::{optimal_margin, InequalityKind};
use crate::error::{Error, Result};
use crate::numeric::bisect;
pub use crate::numeric::Root;
use crate::params::{FormulaSource, ImperfectionParams};

/// Bisection settings. `alpha2` is only used by oracle-backed margins.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub bracket: (f64, f64),
    pub alpha2: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 200,
            bracket: (1e-6, 1.0),
            alpha2: 100.0,
        }
    }
}

impl SolverConfig {
    /// Defaults with the tolerance matched to the source: `1e-6` for the
    /// oracle, `1e-10` otherwise.
    pub fn for_source(source: FormulaSource) -> Self {
        let mut c = Self::default();
        if source == FormulaSource::Oracle {
            c.tol = 1e-6;
        }
        c
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.bracket;
        if !(self.tol > 0.0) {
            return Err(Error::Domain {
                name: "tol",
                value: self.tol,
                expected: "tol > 0",
            });
        }
        if !(0.0 <= lo && lo < hi && hi <= 1.0) {
            return Err(Error::Domain {
                name: "bracket",
                value: lo,
                expected: "0 <= lo < hi <= 1",
            });
        }
        Ok(())
    }
}

/// Inequality value minus its bound at the optimal phases; positive means violation.
pub fn margin_fn(kind: InequalityKind, eta: f64, l: f64, alpha2: f64, source: FormulaSource) -> Result<f64> {
    let params = ImperfectionParams::new(eta, l, alpha2)?;
    Ok(optimal_margin(kind, &params, source)?.excess())
}

/// Threshold transmission at fixed `l`.
pub fn critical_eta(kind: InequalityKind, l: f64, config: &SolverConfig, source: FormulaSource) -> Result<Root> {
    config.validate()?;
    let (lo, hi) = config.bracket;
    bisect(|eta| margin_fn(kind, eta, l, config.alpha2, source), lo, hi, config.tol, config.max_iter)
}

/// Threshold coherence at fixed `eta`.
pub fn critical_l(kind: InequalityKind, eta: f64, config: &SolverConfig, source: FormulaSource) -> Result<Root> {
    config.validate()?;
    let (lo, hi) = config.bracket;
    bisect(|l| margin_fn(kind, eta, l, config.alpha2, source), lo, hi, config.tol, config.max_iter)
}

/// Independent variable of a traced curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    /// Grid over `eta`, solving for `l`.
    Eta,
    /// Grid over `l`, solving for `eta`.
    L,
}

impl Axis {
    pub fn as_str(self) -> &'static str {
        match self {
            Axis::Eta => "eta",
            Axis::L => "l",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveSample {
    pub x: f64,
    pub critical: f64,
    pub residual: f64,
    pub iterations: usize,
}

impl CurveSample {
    /// `(eta, l)` of the sample, whatever the axis.
    pub fn point(&self, axis: Axis) -> (f64, f64) {
        match axis {
            Axis::Eta => (self.x, self.critical),
            Axis::L => (self.critical, self.x),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Skipped {
    pub x: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalCurve {
    pub kind: InequalityKind,
    pub axis: Axis,
    pub source: FormulaSource,
    pub config: SolverConfig,
    pub samples: Vec<CurveSample>,
    pub skipped: Vec<Skipped>,
}

/// Thresholds over a grid of the independent variable. Grid points are
/// sorted and deduplicated; points without a sign change are listed in
/// `skipped`.
pub fn trace_curve(
    kind: InequalityKind,
    grid: &[f64],
    axis: Axis,
    config: &SolverConfig,
    source: FormulaSource,
) -> CriticalCurve {
    let mut xs: Vec<f64> = grid.to_vec();
    xs.sort_by(|a, b| a.total_cmp(b));
    xs.dedup();
    let results: Vec<(f64, Result<Root>)> = xs
        .par_iter()
        .map(|&x| {
            let r = match axis {
                Axis::Eta => critical_l(kind, x, config, source),
                Axis::L => critical_eta(kind, x, config, source),
            };
            (x, r)
        })
        .collect();
    let mut samples = Vec::new();
    let mut skipped = Vec::new();
    for (x, r) in results {
        match r {
            Ok(root) => samples.push(CurveSample {
                x,
                critical: root.x,
                residual: root.residual,
                iterations: root.iterations,
            }),
            Err(e) => skipped.push(Skipped { x, reason: e.to_string() }),
        }
    }
    CriticalCurve {
        kind,
        axis,
        source,
        config: *config,
        samples,
        skipped,
    }
}

/// Whether `(eta, l)` lies strictly inside the violation region.
pub fn verify_region(kind: InequalityKind, eta: f64, l: f64, alpha2: f64, source: FormulaSource) -> Result<bool> {
    Ok(margin_fn(kind, eta, l, alpha2, source)? > 0.0)
}

/// Closed-form threshold coherence derived from the large-amplitude CH
/// probabilities: `(3 - 2 eta + eta^2) / (2 sqrt 2 eta)`.
pub fn derived_ch_l_crit(eta: f64) -> f64 {
    (3.0 - 2.0 * eta + eta * eta) / (2.0 * std::f64::consts::SQRT_2 * eta)
}

/// Threshold coherence of the CHSH test:
/// `(-eta^3 + 3 eta^2 - eta + 1) / (2 sqrt 2 eta^2)`.
pub fn chsh_l_crit(eta: f64) -> f64 {
    (-eta.powi(3) + 3.0 * eta * eta - eta + 1.0) / (2.0 * std::f64::consts::SQRT_2 * eta * eta)
}

/// Werner threshold transmission `2 / (sqrt 2 l + 1)`.
pub fn werner_eta_crit(l: f64) -> f64 {
    2.0 / (std::f64::consts::SQRT_2 * l + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

    const D: FormulaSource = FormulaSource::Derived;

    #[test]
    fn ch_margin_signs() {
        assert!(margin_fn(InequalityKind::Ch, 1.0, 1.0, 100.0, D).unwrap() > 0.0);
        assert!(margin_fn(InequalityKind::Ch, 1.0, FRAC_1_SQRT_2, 100.0, D).unwrap().abs() < 1e-12);
    }

    #[test]
    fn werner_thresholds() {
        let cfg = SolverConfig::default();
        let r = critical_eta(InequalityKind::WernerCh, 1.0, &cfg, D).unwrap();
        assert!((r.x - 2.0 / (SQRT_2 + 1.0)).abs() < 1e-9);
        let r = critical_eta(InequalityKind::WernerChsh, 1.0, &cfg, D).unwrap();
        assert!((r.x - 2.0 / (SQRT_2 + 1.0)).abs() < 1e-9);
    }

    #[test]
    fn ch_thresholds() {
        let cfg = SolverConfig::default();
        let r = critical_eta(InequalityKind::Ch, 1.0, &cfg, D).unwrap();
        let expected = 1.0 + SQRT_2 - 2f64.powf(0.75);
        assert!((r.x - expected).abs() < 1e-9);
        assert!(r.residual.abs() <= 10.0 * cfg.tol);
        let r = critical_l(InequalityKind::Ch, 1.0, &cfg, D).unwrap();
        assert!((r.x - FRAC_1_SQRT_2).abs() < 1e-9);
        for eta in [0.75, 0.8, 0.9] {
            let r = critical_l(InequalityKind::Ch, eta, &cfg, D).unwrap();
            assert!((r.x - derived_ch_l_crit(eta)).abs() < 1e-9);
        }
    }

    #[test]
    fn chsh_threshold_matches_cubic() {
        let cfg = SolverConfig::default();
        for eta in [0.75, 0.85, 1.0] {
            let r = critical_l(InequalityKind::Chsh, eta, &cfg, D).unwrap();
            assert!((r.x - chsh_l_crit(eta)).abs() < 1e-9, "{eta}");
        }
        let r = critical_eta(InequalityKind::Chsh, 1.0, &cfg, D).unwrap();
        assert!((r.x - 0.718_132_018_6).abs() < 1e-9);
    }

    #[test]
    fn no_threshold_below_inverse_sqrt2() {
        let cfg = SolverConfig::default();
        let e = critical_eta(InequalityKind::Ch, 0.5, &cfg, D).unwrap_err();
        assert!(matches!(e, Error::NoSignChange { .. }));
    }

    #[test]
    fn traced_werner_curve_decreases() {
        let cfg = SolverConfig::default();
        let c = trace_curve(InequalityKind::WernerCh, &[1.0, 0.71, 0.9, 0.8, 0.9], Axis::L, &cfg, D);
        assert_eq!(c.samples.len(), 4);
        assert!(c.skipped.is_empty());
        assert!(c.samples.windows(2).all(|w| w[0].x < w[1].x && w[0].critical > w[1].critical));
    }

    #[test]
    fn ch_curve_below_werner() {
        let cfg = SolverConfig::default();
        let grid: Vec<f64> = (0..30).map(|i| 0.72 + 0.28 * i as f64 / 29.0).collect();
        let ch = trace_curve(InequalityKind::Ch, &grid, Axis::L, &cfg, D);
        let w = trace_curve(InequalityKind::WernerCh, &grid, Axis::L, &cfg, D);
        for s in &ch.samples {
            let other = w.samples.iter().find(|t| t.x == s.x).unwrap();
            assert!(s.critical < other.critical);
        }
    }

    #[test]
    fn empty_region_gives_empty_curve() {
        let cfg = SolverConfig::default();
        let c = trace_curve(InequalityKind::Ch, &[0.5], Axis::L, &cfg, D);
        assert!(c.samples.is_empty());
        assert_eq!(c.skipped.len(), 1);
    }

    #[test]
    fn region_examples() {
        assert!(verify_region(InequalityKind::Ch, 0.9, 0.9, 100.0, D).unwrap());
        assert!(!verify_region(InequalityKind::Ch, 0.5, 1.0, 100.0, D).unwrap());
    }

    #[test]
    fn invalid_config() {
        let mut cfg = SolverConfig { bracket: (0.5, 0.2), ..SolverConfig::default() };
        assert!(critical_eta(InequalityKind::Ch, 1.0, &cfg, D).is_err());
        cfg = SolverConfig { tol: 0.0, ..SolverConfig::default() };
        assert!(critical_eta(InequalityKind::Ch, 1.0, &cfg, D).is_err());
    }
}
