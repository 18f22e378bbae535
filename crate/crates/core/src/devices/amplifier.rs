use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;

use super::covariant::CovariantParams;

/// Receiver-side optical amplifier.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AmplifierModel {
    /// Exactly `2m+1` photons along the input and `m` perpendicular to it.
    PaperDeterministic { m: u64 },
    /// Adds `3m` photons one at a time with Bose-enhanced class weights.
    EmissionUrn { m: u64 },
    /// Equal-gain two-mode squeezing of each polarization mode.
    CovariantSqueezer(CovariantParams),
}

impl AmplifierModel {
    pub fn name(&self) -> &'static str {
        match self {
            AmplifierModel::PaperDeterministic { .. } => "paper",
            AmplifierModel::EmissionUrn { .. } => "urn",
            AmplifierModel::CovariantSqueezer(_) => "covariant",
        }
    }

    /// The `m` of the `(2m+1, m)` composition; `G − 1` for the squeezer.
    pub fn nominal_m(&self) -> f64 {
        match self {
            AmplifierModel::PaperDeterministic { m } | AmplifierModel::EmissionUrn { m } => *m as f64,
            AmplifierModel::CovariantSqueezer(p) => p.gain - 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BeamGroup {
    pub angle_deg: f64,
    pub photons: u64,
}

/// Photon content of the amplified beam after the spatial filter: groups of
/// photons sharing a linear polarization.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Beam {
    groups: Vec<BeamGroup>,
}

impl Beam {
    pub fn new(groups: Vec<BeamGroup>) -> Self {
        Self { groups }
    }

    pub fn groups(&self) -> &[BeamGroup] {
        &self.groups
    }

    pub fn total_photons(&self) -> u64 {
        self.groups.iter().map(|g| g.photons).sum()
    }

    /// Photons along `angle_deg` (modulo 180°).
    pub fn photons_at(&self, angle_deg: f64) -> u64 {
        self.groups
            .iter()
            .filter(|g| (g.angle_deg - angle_deg).rem_euclid(180.0) == 0.0)
            .map(|g| g.photons)
            .sum()
    }

    fn split(input_angle: f64, parallel: u64, perpendicular: u64) -> Self {
        Self::new(vec![
            BeamGroup {
                angle_deg: input_angle.rem_euclid(180.0),
                photons: parallel,
            },
            BeamGroup {
                angle_deg: (input_angle + 90.0).rem_euclid(180.0),
                photons: perpendicular,
            },
        ])
    }
}

pub fn amplify_paper(input_angle_deg: f64, m: u64) -> Beam {
    Beam::split(input_angle_deg, 2 * m + 1, m)
}

/// Bose-enhanced urn: each of `3m` added photons joins the parallel class with
/// probability `(n_∥ + 1)/(n_∥ + n_⊥ + 2)`, starting from the single input photon.
pub fn amplify_urn<R: Rng + ?Sized>(input_angle_deg: f64, m: u64, rng: &mut R) -> Beam {
    let (mut par, mut perp) = (1u64, 0u64);
    for _ in 0..3 * m {
        let p = (par + 1) as f64 / (par + perp + 2) as f64;
        if rng.random::<f64>() < p {
            par += 1;
        } else {
            perp += 1;
        }
    }
    Beam::split(input_angle_deg, par, perp)
}

/// Exact urn pmf indexed by the perpendicular count `n_⊥ ∈ 0..=3m`
/// (the parallel count is `3m + 1 − n_⊥`).
pub fn urn_pmf(m: u64) -> Vec<f64> {
    let steps = (3 * m) as usize;
    let mut probs = vec![1.0];
    for step in 0..steps {
        // After `step` additions: par = 1 + step − perp.
        let mut next = vec![0.0; step + 2];
        for (perp, &p) in probs.iter().enumerate() {
            let par = 1 + step - perp;
            let total = (par + perp + 2) as f64;
            next[perp] += p * (par + 1) as f64 / total;
            next[perp + 1] += p * (perp + 1) as f64 / total;
        }
        probs = next;
    }
    probs
}

/// [`urn_pmf`] in exact rational arithmetic.
pub fn urn_pmf_exact(m: u64) -> Vec<BigRational> {
    let steps = (3 * m) as usize;
    let int = |x: usize| BigInt::from(x);
    let mut probs = vec![BigRational::one()];
    for step in 0..steps {
        let mut next = vec![BigRational::zero(); step + 2];
        for (perp, p) in probs.iter().enumerate() {
            let par = 1 + step - perp;
            let total = int(par + perp + 2);
            next[perp] += p * BigRational::new(int(par + 1), total.clone());
            next[perp + 1] += p * BigRational::new(int(perp + 1), total);
        }
        probs = next;
    }
    probs
}
