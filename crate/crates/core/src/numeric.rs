//! Small numerical helpers shared by the closed forms and the solvers.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().value()
}

pub fn ln_factorial(n: u64) -> f64 {
    if n < 2 {
        0.0
    } else {
        ln_gamma(n as f64 + 1.0)
    }
}

/// `ln P(X = k)` for `X ~ Poisson(mean)`; `-inf` where the mass is zero.
pub fn poisson_ln_pmf(mean: f64, k: u64) -> f64 {
    if mean == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    -mean + k as f64 * mean.ln() - ln_factorial(k)
}

/// Chernoff upper bound on `P(X >= k)` for `X ~ Poisson(mean)`.
pub fn poisson_tail_bound(mean: f64, k: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if mean == 0.0 {
        return 0.0;
    }
    let k = k as f64;
    if k <= mean {
        return 1.0;
    }
    (-mean + k * (1.0 + mean.ln() - k.ln())).exp().min(1.0)
}

/// Smallest `k` whose Chernoff tail bound does not exceed `tail`.
pub fn suggest_cutoff(mean: f64, tail: f64) -> usize {
    let mut k = mean.ceil() as usize + 1;
    while poisson_tail_bound(mean, k) > tail {
        k += 1 + k / 64;
    }
    k
}

/// A bracketed root together with the solver diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Root {
    pub x: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Bisection on `[lo, hi]` until the bracket is narrower than `tol`.
pub fn bisect<F>(mut f: F, lo: f64, hi: f64, tol: f64, max_iter: usize) -> Result<Root>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = (lo, hi);
    let fa = f(a)?;
    let fb = f(b)?;
    if fa == 0.0 {
        return Ok(Root { x: a, residual: 0.0, iterations: 0 });
    }
    if fb == 0.0 {
        return Ok(Root { x: b, residual: 0.0, iterations: 0 });
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(Error::NoSignChange { lo, hi, f_lo: fa, f_hi: fb });
    }
    let neg_at_a = fa < 0.0;
    let mut iterations = 0;
    while b - a > tol && iterations < max_iter {
        let mid = 0.5 * (a + b);
        let fm = f(mid)?;
        iterations += 1;
        if fm == 0.0 {
            return Ok(Root { x: mid, residual: 0.0, iterations });
        }
        if (fm < 0.0) == neg_at_a {
            a = mid;
        } else {
            b = mid;
        }
    }
    let x = 0.5 * (a + b);
    Ok(Root { x, residual: f(x)?, iterations })
}
