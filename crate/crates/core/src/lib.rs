//! Simulation of an entangled-photon signalling scheme whose receiver
//! amplifies the incoming photon and compares two polarization-resolved
//! photon counts.
//!
//! The crate reproduces the scheme's own amplifier arithmetic (a photon is
//! turned into `2m+1` parallel and `m` perpendicular photons) and contrasts
//! it with an exact polarization-covariant amplifier built from two-mode
//! squeezers on a truncated Fock space.
//!
//! * [`fock`]: truncated Fock-space states, operators and count statistics.
//! * [`states`]: photon-pair sources, Born-rule polarization measurement, CHSH.
//! * [`devices`]: encoder, the three amplifier models, detectors, decoder.
//! * [`channel`]: end-to-end Monte Carlo, information measures, no-signaling test.
//! * [`cli`]: the `photon-link` command-line front end.

pub mod channel;
pub mod cli;
pub mod devices;
pub mod error;
pub mod fock;
pub mod rng;
pub mod states;

pub use error::{Error, Result};
