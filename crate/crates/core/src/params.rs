use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{check_positive, check_unit, Result};

/// Channel transmission `eta`, coherence `l` and mean photon number `alpha2`
/// of each coherent mode behind the beam splitter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImperfectionParams {
    pub eta: f64,
    pub l: f64,
    pub alpha2: f64,
}

impl ImperfectionParams {
    pub fn new(eta: f64, l: f64, alpha2: f64) -> Result<Self> {
        Ok(Self {
            eta: check_unit("eta", eta)?,
            l: check_unit("l", l)?,
            alpha2: check_positive("alpha2", alpha2)?,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha2.sqrt()
    }

    /// Mean photon number of each coherent mode reaching the detectors.
    pub fn arriving_mean(&self) -> f64 {
        self.alpha2 * self.eta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Site {
    C,
    D,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Which formula family produces a probability.
///
/// `Paper` evaluates the printed expressions verbatim, `Derived` the corrected
/// closed forms validated against the Fock-space computation, and `Oracle`
/// the Fock-space computation itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum FormulaSource {
    Paper,
    #[default]
    Derived,
    Oracle,
}

impl FormulaSource {
    pub const ALL: [FormulaSource; 3] = [
        FormulaSource::Paper,
        FormulaSource::Derived,
        FormulaSource::Oracle,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FormulaSource::Paper => "paper",
            FormulaSource::Derived => "derived",
            FormulaSource::Oracle => "oracle",
        }
    }
}

impl fmt::Display for FormulaSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FormulaSource {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "paper" => Ok(FormulaSource::Paper),
            "derived" => Ok(FormulaSource::Derived),
            "oracle" => Ok(FormulaSource::Oracle),
            other => Err(format!(
                "unknown formula source `{other}` (expected paper, derived or oracle)"
            )),
        }
    }
}
