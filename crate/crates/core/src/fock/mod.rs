//! Exact linear algebra on truncated multi-mode Fock spaces.
//!
//! States are dense amplitude vectors over a [`ModeLayout`]. Every operation
//! that can push amplitude above the occupation cap either fails
//! ([`apply_ladder`], rotations) or measures the lost norm and fails past a
//! tolerance ([`two_mode_squeeze`]); nothing is clipped silently.

mod counts;
mod density;
mod layout;
mod ops;
mod rotation;
mod state;

pub use counts::{CountDistribution, CountSampler};
pub use density::DensityOperator;
pub use layout::ModeLayout;
pub use ops::{
    apply_annihilation_combination, apply_creation_combination, apply_ladder, single_photon, squeeze_for_gain,
    two_mode_squeeze, Evolved, Ladder, DEFAULT_LEAKAGE_TOL,
};
pub use rotation::{cos_sin_deg, PolarizationRotation, RotationBlocks};
pub use state::FockStateVector;
