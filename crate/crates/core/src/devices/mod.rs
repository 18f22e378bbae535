//! Protocol hardware: the sender's switchable two-channel encoder, the
//! receiver's amplifier, and the polarizing prism with its two counters.
//!
//! The spatial filter passes exactly the amplifier's output modes with no
//! loss, and all detectors are ideal photon counters.

mod amplifier;
mod covariant;

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::Serialize;

pub use amplifier::{amplify_paper, amplify_urn, urn_pmf, urn_pmf_exact, AmplifierModel, Beam, BeamGroup};
pub use covariant::{
    amplify_covariant, CovariantAmplifier, CovariantOutput, CovariantParams, PolarizationDensity, PARALLEL,
    PERPENDICULAR,
};

use crate::error::{Error, Result};
use crate::fock::{CountDistribution, CountSampler};
use crate::states::{
    event_class_sample, measure_polarization, EventClass, MeasurementOutcome, Outcome, PairState, Party, Polarization,
    PolarizationBasis,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Bit {
    Zero,
    One,
}

impl Bit {
    pub fn as_u8(self) -> u8 {
        match self {
            Bit::Zero => 0,
            Bit::One => 1,
        }
    }

    pub fn index(self) -> usize {
        self.as_u8() as usize
    }
}

impl TryFrom<u8> for Bit {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            0 => Ok(Bit::Zero),
            1 => Ok(Bit::One),
            _ => Err(Error::InvalidParameter(format!("bit must be 0 or 1, got {v}"))),
        }
    }
}

/// Mirror position of the encoder. Position `k` routes the sender photon to
/// channel `k`; channel 0 analyzes at 0°, channel 1 at 45°.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EncoderSetting {
    pub bit: Bit,
}

impl EncoderSetting {
    pub fn new(bit: Bit) -> Self {
        Self { bit }
    }

    pub fn basis(&self) -> PolarizationBasis {
        match self.bit {
            Bit::Zero => PolarizationBasis::horizontal(),
            Bit::One => PolarizationBasis::diagonal(),
        }
    }

    /// Sender detector that fires for `outcome`: D0/D0′ behind the 0° prism,
    /// D1 (+45°) / D1′ (−45°) behind the rotated one.
    pub fn detector_label(&self, outcome: Outcome) -> &'static str {
        match (self.bit, outcome) {
            (Bit::Zero, Outcome::Parallel) => "D0",
            (Bit::Zero, Outcome::Perpendicular) => "D0'",
            (Bit::One, Outcome::Parallel) => "D1",
            (Bit::One, Outcome::Perpendicular) => "D1'",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum EncodeResult {
    /// One photon reached the sender and was detected; the receiver photon collapsed.
    Detected(MeasurementOutcome),
    /// The pair did not split one photon per side.
    NonCoincidence(EventClass),
}

/// Routes the sender photon through channel `setting.bit` and measures it.
pub fn encode<R: Rng + ?Sized>(setting: EncoderSetting, pair: &PairState, rng: &mut R) -> Result<EncodeResult> {
    match event_class_sample(pair, rng) {
        EventClass::Coincidence => {
            let branch = pair.coincidence_branch();
            let outcome = measure_polarization(&branch, Party::Sender, setting.basis(), rng)?;
            Ok(EncodeResult::Detected(outcome))
        }
        other => Ok(EncodeResult::NonCoincidence(other)),
    }
}

/// Counts at `D_r` (parallel to the receiver basis) and `D′_r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PhotonCounts {
    pub n_r: u64,
    pub n_r_prime: u64,
}

impl PhotonCounts {
    pub fn total(&self) -> u64 {
        self.n_r + self.n_r_prime
    }

    pub fn difference(&self) -> i64 {
        self.n_r as i64 - self.n_r_prime as i64
    }
}

/// `cos²(δ)` with exact values at multiples of 45°.
pub fn malus(delta_deg: f64) -> f64 {
    let r = delta_deg.rem_euclid(180.0);
    if r == 0.0 {
        1.0
    } else if r == 90.0 {
        0.0
    } else if r == 45.0 || r == 135.0 {
        0.5
    } else {
        r.to_radians().cos().powi(2)
    }
}

/// Each photon of each group reaches `D_r` independently with Malus-law probability.
pub fn detect_counts<R: Rng + ?Sized>(beam: &Beam, basis: PolarizationBasis, rng: &mut R) -> PhotonCounts {
    let mut n_r = 0;
    for g in beam.groups() {
        let p = malus(g.angle_deg - basis.theta());
        n_r += if p == 1.0 {
            g.photons
        } else if p == 0.0 || g.photons == 0 {
            0
        } else {
            Binomial::new(g.photons, p)
                .expect("valid binomial parameters")
                .sample(rng)
        };
    }
    PhotonCounts {
        n_r,
        n_r_prime: beam.total_photons() - n_r,
    }
}

/// Draws counts from an exact `(parallel, perpendicular)` pmf.
pub fn detect_from_pmf<R: Rng + ?Sized>(sampler: &CountSampler, rng: &mut R) -> PhotonCounts {
    let occ = sampler.sample(rng);
    PhotonCounts {
        n_r: occ[0] as u64,
        n_r_prime: occ[1] as u64,
    }
}

/// Binomial pmf over `0..=n`, evaluated in log space so large `n` does not underflow.
pub fn binomial_pmf(n: u64, p: f64) -> Vec<f64> {
    let len = n as usize + 1;
    if p <= 0.0 {
        let mut v = vec![0.0; len];
        v[0] = 1.0;
        return v;
    }
    if p >= 1.0 {
        let mut v = vec![0.0; len];
        v[len - 1] = 1.0;
        return v;
    }
    let (lp, lq) = (p.ln(), (1.0 - p).ln());
    let mut log_choose = 0.0;
    let mut out = Vec::with_capacity(len);
    for k in 0..=n {
        if k > 0 {
            log_choose += ((n - k + 1) as f64).ln() - (k as f64).ln();
        }
        out.push((log_choose + k as f64 * lp + (n - k) as f64 * lq).exp());
    }
    out
}

/// Exact `(n_r, n_r′)` pmf of a discrete beam measured in `basis`.
pub fn beam_count_distribution(beam: &Beam, basis: PolarizationBasis) -> CountDistribution {
    let mut conv = vec![1.0];
    for g in beam.groups() {
        let pmf = binomial_pmf(g.photons, malus(g.angle_deg - basis.theta()));
        let mut next = vec![0.0; conv.len() + pmf.len() - 1];
        for (i, a) in conv.iter().enumerate() {
            if *a == 0.0 {
                continue;
            }
            for (j, b) in pmf.iter().enumerate() {
                next[i + j] += a * b;
            }
        }
        conv = next;
    }
    let total = beam.total_photons() as usize;
    CountDistribution::from_entries(
        vec![PARALLEL.into(), PERPENDICULAR.into()],
        conv.into_iter().enumerate().map(|(k, p)| (vec![k, total - k], p)),
    )
}

/// Returns 0 when `|n_r − n_r′| ≥ threshold`, else 1.
pub fn decode(counts: PhotonCounts, threshold: u64) -> Bit {
    if counts.difference().unsigned_abs() >= threshold {
        Bit::Zero
    } else {
        Bit::One
    }
}

/// `⌈(m+1)/2⌉`, halfway between the bit-0 signature `m+1` and zero.
pub fn default_threshold(m: u64) -> u64 {
    (m + 2) / 2
}

fn angle_key(p: Polarization) -> u64 {
    (p.angle_deg() * 1e6).round() as u64
}

/// Amplifier, spatial filter, polarizing prism and the two counters, prepared
/// for repeated use. Exact pmfs for the covariant model are computed once per
/// expected input polarization and are read-only afterwards.
#[derive(Debug, Clone)]
pub struct Receiver {
    model: AmplifierModel,
    basis: PolarizationBasis,
    covariant: Option<CovariantState>,
}

#[derive(Debug, Clone)]
struct CovariantState {
    amplifier: CovariantAmplifier,
    cache: BTreeMap<u64, (CountDistribution, CountSampler)>,
}

impl Receiver {
    pub fn new(model: AmplifierModel, basis: PolarizationBasis, expected_inputs: &[Polarization]) -> Result<Self> {
        let covariant = match &model {
            AmplifierModel::CovariantSqueezer(params) => {
                let amplifier = CovariantAmplifier::new(*params)?;
                let mut unique: BTreeMap<u64, Polarization> = BTreeMap::new();
                for &p in expected_inputs {
                    unique.entry(angle_key(p)).or_insert(p);
                }
                let densities: Vec<PolarizationDensity> =
                    unique.values().map(|p| PolarizationDensity::pure(*p)).collect();
                let pmfs = amplifier.count_distributions(&densities, basis)?;
                let cache = unique
                    .into_keys()
                    .zip(pmfs)
                    .map(|(k, pmf)| {
                        let sampler = pmf.sampler();
                        (k, (pmf, sampler))
                    })
                    .collect();
                Some(CovariantState { amplifier, cache })
            }
            _ => None,
        };
        Ok(Self {
            model,
            basis,
            covariant,
        })
    }

    pub fn model(&self) -> &AmplifierModel {
        &self.model
    }

    pub fn basis(&self) -> PolarizationBasis {
        self.basis
    }

    /// Truncation leakage of the covariant model; zero for the others.
    pub fn leakage(&self) -> f64 {
        self.covariant.as_ref().map_or(0.0, |c| c.amplifier.leakage())
    }

    /// Amplifies one photon and samples the two counts.
    pub fn receive<R: Rng + ?Sized>(&self, photon: Polarization, rng: &mut R) -> Result<PhotonCounts> {
        Ok(match &self.model {
            AmplifierModel::PaperDeterministic { m } => {
                detect_counts(&amplify_paper(photon.angle_deg(), *m), self.basis, rng)
            }
            AmplifierModel::EmissionUrn { m } => {
                detect_counts(&amplify_urn(photon.angle_deg(), *m, rng), self.basis, rng)
            }
            AmplifierModel::CovariantSqueezer(_) => {
                let state = self.covariant.as_ref().expect("covariant receiver is prepared");
                match state.cache.get(&angle_key(photon)) {
                    Some((_, sampler)) => detect_from_pmf(sampler, rng),
                    None => {
                        let pmf = state
                            .amplifier
                            .count_distribution(&PolarizationDensity::pure(photon), self.basis)?;
                        detect_from_pmf(&pmf.sampler(), rng)
                    }
                }
            }
        })
    }

    /// Exact `(n_r, n_r′)` pmf for one input photon.
    pub fn count_distribution(&self, photon: Polarization) -> Result<CountDistribution> {
        match &self.model {
            AmplifierModel::PaperDeterministic { m } => Ok(beam_count_distribution(
                &amplify_paper(photon.angle_deg(), *m),
                self.basis,
            )),
            AmplifierModel::EmissionUrn { m } => {
                let angle = photon.angle_deg();
                let total = 3 * m + 1;
                let parts: Vec<(f64, CountDistribution)> = urn_pmf(*m)
                    .into_iter()
                    .enumerate()
                    .filter(|(_, w)| *w > 0.0)
                    .map(|(perp, w)| {
                        let beam = Beam::new(vec![
                            BeamGroup {
                                angle_deg: angle,
                                photons: total - perp as u64,
                            },
                            BeamGroup {
                                angle_deg: angle + 90.0,
                                photons: perp as u64,
                            },
                        ]);
                        (w, beam_count_distribution(&beam, self.basis))
                    })
                    .collect();
                CountDistribution::mixture(parts.iter().map(|(w, d)| (*w, d)))
            }
            AmplifierModel::CovariantSqueezer(_) => {
                let state = self.covariant.as_ref().expect("covariant receiver is prepared");
                match state.cache.get(&angle_key(photon)) {
                    Some((pmf, _)) => Ok(pmf.clone()),
                    None => state
                        .amplifier
                        .count_distribution(&PolarizationDensity::pure(photon), self.basis),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{Purpose, StreamFactory};
    use crate::states::bell_pair;

    #[test]
    fn aligned_beam_counts_are_deterministic() {
        let mut rng = StreamFactory::new(5).stream(Purpose::Auxiliary, 0);
        let beam = amplify_paper(0.0, 3);
        for _ in 0..50 {
            let c = detect_counts(&beam, PolarizationBasis::horizontal(), &mut rng);
            assert_eq!((c.n_r, c.n_r_prime), (7, 3));
        }
    }

    #[test]
    fn single_photon_at_45_degrees() {
        let mut rng = StreamFactory::new(6).stream(Purpose::Auxiliary, 0);
        let beam = amplify_paper(0.0, 0);
        let basis = PolarizationBasis::diagonal();
        let n = 20_000;
        let mut hits = 0;
        for _ in 0..n {
            let c = detect_counts(&beam, basis, &mut rng);
            assert_eq!(c.total(), 1);
            hits += c.n_r;
        }
        let f = hits as f64 / n as f64;
        assert!((f - 0.5).abs() < 4.0 * (0.25 / n as f64).sqrt());
        let exact = beam_count_distribution(&beam, basis);
        assert_eq!(exact.probability(&[1, 0]), 0.5);
        assert_eq!(exact.probability(&[0, 1]), 0.5);
    }

    #[test]
    fn decode_rule() {
        let m = 10;
        let t = default_threshold(m);
        assert_eq!(t, 6);
        let zero = PhotonCounts {
            n_r: 2 * m + 1,
            n_r_prime: m,
        };
        assert_eq!(decode(zero, t), Bit::Zero);
        for k in [0, 1, 17] {
            assert_eq!(decode(PhotonCounts { n_r: k, n_r_prime: k }, t), Bit::One);
        }
        assert_eq!(default_threshold(0), 1);
        assert_eq!(default_threshold(100), 51);
    }

    #[test]
    fn encoder_bases_and_labels() {
        let s1 = EncoderSetting::new(Bit::One);
        assert_eq!(s1.basis().theta(), 45.0);
        assert_eq!(s1.detector_label(Outcome::Parallel), "D1");
        assert_eq!(s1.detector_label(Outcome::Perpendicular), "D1'");
        assert_eq!(EncoderSetting::new(Bit::Zero).basis().theta(), 0.0);
        assert!(Bit::try_from(2).is_err());
    }

    #[test]
    fn bell_encoding_collapses_to_the_analyzer_axes() {
        let mut rng = StreamFactory::new(8).stream(Purpose::Auxiliary, 0);
        let pair = bell_pair();
        for bit in [Bit::Zero, Bit::One] {
            let setting = EncoderSetting::new(bit);
            let base = setting.basis().theta();
            for _ in 0..100 {
                let EncodeResult::Detected(out) = encode(setting, &pair, &mut rng).unwrap() else {
                    panic!("bell pairs always split");
                };
                let angle = out.collapsed_remote.angle_deg();
                assert!(angle == base || angle == (base + 90.0) % 180.0);
                assert!((out.probability - 0.5).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn binomial_pmf_sums_to_one_for_large_n() {
        let pmf = binomial_pmf(3073, 0.5);
        assert!((pmf.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        assert_eq!(binomial_pmf(3, 1.0), vec![0.0, 0.0, 0.0, 1.0]);
    }
}
