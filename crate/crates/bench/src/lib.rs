//! Fixtures shared by the benchmarks.

use bjss_core::fock::{self, MixtureState, TruncationPolicy};
use bjss_core::ImperfectionParams;

/// Coherence grid used for curve benchmarks.
pub fn l_grid(points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| 0.72 + 0.28 * i as f64 / (points - 1).max(1) as f64)
        .collect()
}

/// Imperfect state at `(eta, l, alpha2)` with its default truncation.
pub fn state(eta: f64, l: f64, alpha2: f64) -> (MixtureState, TruncationPolicy) {
    let params = ImperfectionParams::new(eta, l, alpha2).expect("valid parameters");
    let state = fock::imperfect_state(&params).expect("state");
    let policy = TruncationPolicy::for_state(&state);
    (state, policy)
}
