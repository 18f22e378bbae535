//! End-to-end Monte Carlo of the link and the statistics read off it: bit
//! error rates, mutual information, capacity, SNR scaling and the
//! no-signaling comparison between amplifier models.
//!
//! Every trial draws its randomness from streams keyed by the master seed and
//! the trial index, so results are identical for any number of worker threads.

mod info;
mod link;
mod nosignal;
mod sweep;

pub use info::{
    binary_entropy, capacity_blahut_arimoto, mutual_information, mutual_information_estimate, wilson_interval,
    Capacity, MiEstimate, Z_95,
};
pub use link::{
    estimate_channel, run_trial, simulate, snr, ChannelEstimate, Link, NonCoincidencePolicy, RunConfig, Simulation,
    SourceKind, TrialRecord,
};
pub use nosignal::{no_signaling_test, NoSignalingReport};
pub use sweep::{amplifier_at, log_log_slope, sweep_m, SweepReport, SweepRow};

use crate::devices::{binomial_pmf, default_threshold};

/// Exact `P(readout = 0 | sent 1)` for the deterministic amplifier behind a
/// Bell source: the `2m+1` and `m` photon groups sit at ±45° to the counter
/// axes, so `n_r ~ Binomial(3m+1, ½)`.
pub fn paper_ber_exact(m: u64, threshold: u64) -> f64 {
    let n = 3 * m + 1;
    binomial_pmf(n, 0.5)
        .iter()
        .enumerate()
        .filter(|(k, _)| (2 * *k as i64 - n as i64).unsigned_abs() >= threshold)
        .map(|(_, p)| p)
        .sum()
}

/// [`paper_ber_exact`] at the default threshold.
pub fn paper_ber_default(m: u64) -> f64 {
    paper_ber_exact(m, default_threshold(m))
}
