use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value} is outside its domain ({expected})")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error(
        "n_max = {n_max} certifies a tail of {bound:e}, above the requested {requested:e}; \
         use n_max >= {suggested}"
    )]
    Truncation {
        n_max: usize,
        bound: f64,
        requested: f64,
        suggested: usize,
    },

    #[error("inconsistent inputs: {0}")]
    Consistency(String),

    #[error("no threshold in [{lo}, {hi}]: margin is {f_lo:e} and {f_hi:e} at the ends")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_unit(name: &'static str, value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::Domain {
            name,
            value,
            expected: "0 <= x <= 1",
        })
    }
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Domain {
            name,
            value,
            expected: "finite and > 0",
        })
    }
}
