//! Numerical analysis of the BJSS single-photon Bell test with photon loss
//! and decoherence.
//!
//! A single photon and a coherent local-oscillator beam are mixed on a
//! polarizing beam splitter; each output port is measured by an observer who
//! projects onto photon-number-resolved states that interfere the single
//! photon with the coherent field. This crate provides
//!
//! * [`fock`]: an exact, symbolic representation of the lossy/decohered state
//!   and truncated Fock-space evaluation of every detection probability. It is
//!   the reference against which every closed form is checked.
//! * [`closed_form`]: per-photon-number and large-amplitude closed forms, both
//!   as printed in the literature and in corrected form, plus the Poisson-sum
//!   approximations and their convergence tables.
//! * [`bell`]: CH, CHSH and mixed-projector CH expressions, optimal phase
//!   settings and the two-qubit Werner-state baseline.
//! * [`critical`]: bisection solvers and curve tracing for critical
//!   efficiency/decoherence thresholds.
//! * [`ledger`]: side-by-side evaluation of printed and corrected expressions.
//! * [`reproduce`]: the quantitative checks behind `bjss reproduce`.

pub mod bell;
pub mod closed_form;
pub mod critical;
pub mod error;
pub mod fock;
pub mod ledger;
pub mod numeric;
pub mod params;
pub mod reproduce;

pub use bell::{BellScenario, InequalityKind, Margin, PhaseSettings};
pub use closed_form::{ApproxCheckRow, ApproxId};
pub use critical::{Axis, CriticalCurve, CurveSample, SolverConfig};
pub use numeric::Root;
pub use error::{Error, Result};
pub use fock::{
    LocalProjector, MixtureState, ModePattern, PureComponent, Setting, SiteOutcome,
    TruncationPolicy,
};
pub use params::{FormulaSource, ImperfectionParams, Sign, Site};
