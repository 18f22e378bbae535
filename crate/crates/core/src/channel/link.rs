use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::info::{capacity_blahut_arimoto, mutual_information_estimate, wilson_interval, Z_95};
use crate::devices::{
    decode, default_threshold, encode, AmplifierModel, Bit, EncodeResult, EncoderSetting, PhotonCounts, Receiver,
};
use crate::error::{Error, Result};
use crate::fock::CountDistribution;
use crate::rng::{Purpose, StreamFactory};
use crate::states::{
    bell_pair, measurement_branches, spdc_unentangled, EventClass, PairState, Party, PolarizationBasis,
};

const CAPACITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    Bell,
    SpdcUnentangled,
}

impl SourceKind {
    pub fn pair(self) -> Result<PairState> {
        match self {
            SourceKind::Bell => Ok(bell_pair()),
            SourceKind::SpdcUnentangled => spdc_unentangled(2),
        }
    }
}

/// What the receiver reads out when the pair did not split one photon per side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NonCoincidencePolicy {
    /// A fair coin stands in for the readout.
    #[default]
    RandomBit,
    /// The trial is excluded from the confusion matrix.
    DropTrial,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub source: SourceKind,
    pub amplifier: AmplifierModel,
    pub trials: u64,
    pub master_seed: u64,
    /// `None` selects [`default_threshold`] for the amplifier's nominal `m`.
    pub threshold: Option<u64>,
    pub policy: NonCoincidencePolicy,
}

impl RunConfig {
    pub fn new(source: SourceKind, amplifier: AmplifierModel, trials: u64, master_seed: u64) -> Self {
        Self {
            source,
            amplifier,
            trials,
            master_seed,
            threshold: None,
            policy: NonCoincidencePolicy::default(),
        }
    }

    pub fn resolved_threshold(&self) -> u64 {
        self.threshold
            .unwrap_or_else(|| default_threshold(self.amplifier.nominal_m().round().max(0.0) as u64))
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be ≥ 1".into()));
        }
        if self.threshold == Some(0) {
            return Err(Error::InvalidParameter("threshold must be ≥ 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial_index: u64,
    pub sent_bit: Bit,
    pub event_class: EventClass,
    /// Absent when the receiver never measured a lone photon.
    pub counts: Option<PhotonCounts>,
    /// Absent for trials dropped by the policy.
    pub readout_bit: Option<Bit>,
    pub policy_intervened: bool,
    /// Stream id shared by all of this trial's random streams.
    pub stream_id: u64,
}

/// Prepared source, receiver and random streams for one [`RunConfig`].
#[derive(Debug, Clone)]
pub struct Link {
    config: RunConfig,
    threshold: u64,
    pair: PairState,
    receiver: Receiver,
    streams: StreamFactory,
}

impl Link {
    pub fn new(config: &RunConfig) -> Result<Self> {
        config.validate()?;
        let pair = config.source.pair()?;
        let branch = pair.coincidence_branch();
        let mut expected = Vec::new();
        for bit in [Bit::Zero, Bit::One] {
            let basis = EncoderSetting::new(bit).basis();
            for b in measurement_branches(&branch, Party::Sender, basis)? {
                expected.push(b.collapsed_remote);
            }
        }
        let receiver = Receiver::new(config.amplifier.clone(), PolarizationBasis::horizontal(), &expected)?;
        Ok(Self {
            threshold: config.resolved_threshold(),
            config: config.clone(),
            pair,
            receiver,
            streams: StreamFactory::new(config.master_seed),
        })
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn threshold(&self) -> u64 {
        self.threshold
    }

    pub fn receiver(&self) -> &Receiver {
        &self.receiver
    }

    pub fn pair(&self) -> &PairState {
        &self.pair
    }

    /// Uniform message bit of trial `index`.
    pub fn message_bit(&self, index: u64) -> Bit {
        if self.streams.stream(Purpose::Message, index).random::<bool>() {
            Bit::One
        } else {
            Bit::Zero
        }
    }

    pub fn run_trial(&self, sent_bit: Bit, index: u64) -> Result<TrialRecord> {
        let mut rng = self.streams.stream(Purpose::Physics, index);
        let setting = EncoderSetting::new(sent_bit);
        let mut record = TrialRecord {
            trial_index: index,
            sent_bit,
            event_class: EventClass::Coincidence,
            counts: None,
            readout_bit: None,
            policy_intervened: false,
            stream_id: index,
        };
        match encode(setting, &self.pair, &mut rng)? {
            EncodeResult::Detected(outcome) => {
                let counts = self.receiver.receive(outcome.collapsed_remote, &mut rng)?;
                record.counts = Some(counts);
                record.readout_bit = Some(decode(counts, self.threshold));
            }
            EncodeResult::NonCoincidence(class) => {
                record.event_class = class;
                record.policy_intervened = true;
                if self.config.policy == NonCoincidencePolicy::RandomBit {
                    let coin = self.streams.stream(Purpose::Auxiliary, index).random::<bool>();
                    record.readout_bit = Some(if coin { Bit::One } else { Bit::Zero });
                }
            }
        }
        Ok(record)
    }

    /// All trials in index order. Work is spread over the current rayon pool;
    /// the result does not depend on its size.
    pub fn run_all(&self) -> Result<Vec<TrialRecord>> {
        (0..self.config.trials)
            .into_par_iter()
            .map(|i| self.run_trial(self.message_bit(i), i))
            .collect()
    }

    /// Exact receiver count pmf for sent `bit`, conditioned on a coincidence.
    pub fn receiver_distribution(&self, bit: Bit) -> Result<CountDistribution> {
        let basis = EncoderSetting::new(bit).basis();
        let branches = measurement_branches(&self.pair.coincidence_branch(), Party::Sender, basis)?;
        let parts = branches
            .iter()
            .filter(|b| b.probability > 0.0)
            .map(|b| Ok((b.probability, self.receiver.count_distribution(b.collapsed_remote)?)))
            .collect::<Result<Vec<_>>>()?;
        CountDistribution::mixture(parts.iter().map(|(w, d)| (*w, d)))
    }

    /// Exact `P(readout ≠ sent | sent)` on the coincidence branch, indexed by sent bit.
    pub fn coincidence_error_rates(&self) -> Result<[f64; 2]> {
        let mut out = [0.0; 2];
        for bit in [Bit::Zero, Bit::One] {
            let pmf = self.receiver_distribution(bit)?;
            out[bit.index()] = pmf
                .iter()
                .filter(|(occ, _)| decode(counts_of(occ), self.threshold) != bit)
                .map(|(_, p)| p)
                .sum();
        }
        Ok(out)
    }

    /// Exact overall BER for uniform message bits under the configured policy.
    pub fn exact_ber(&self) -> Result<f64> {
        let [e0, e1] = self.coincidence_error_rates()?;
        let coincident = 0.5 * (e0 + e1);
        let c = self.pair.event_probabilities().coincidence;
        Ok(match self.config.policy {
            NonCoincidencePolicy::RandomBit => c * coincident + (1.0 - c) * 0.5,
            NonCoincidencePolicy::DropTrial => coincident,
        })
    }
}

fn counts_of(occ: &[usize]) -> PhotonCounts {
    PhotonCounts {
        n_r: occ[0] as u64,
        n_r_prime: occ[1] as u64,
    }
}

pub fn run_trial(config: &RunConfig, sent_bit: Bit, trial_index: u64) -> Result<TrialRecord> {
    Link::new(config)?.run_trial(sent_bit, trial_index)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelEstimate {
    /// `confusion[sent][readout]` over retained trials.
    pub confusion: [[u64; 2]; 2],
    pub trials: u64,
    pub retained: u64,
    pub ber: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Miller–Madow corrected plug-in estimate, in bits per use.
    pub mi: f64,
    pub mi_plug_in: f64,
    /// Capacity of the row-normalized confusion matrix.
    pub capacity: f64,
    /// `(m+1)/√(3m+1)` at the amplifier's nominal `m`.
    pub snr: f64,
    pub threshold: u64,
    /// BER restricted to trials where the pair split one photon per side.
    pub coincidence_ber: Option<f64>,
    pub non_coincidence_fraction: f64,
}

impl ChannelEstimate {
    pub fn from_records(records: &[TrialRecord], threshold: u64, nominal_m: f64) -> Result<Self> {
        let mut confusion = [[0u64; 2]; 2];
        let (mut coinc, mut coinc_err, mut non_coinc) = (0u64, 0u64, 0u64);
        for r in records {
            if r.event_class == EventClass::Coincidence {
                coinc += 1;
            } else {
                non_coinc += 1;
            }
            if let Some(out) = r.readout_bit {
                confusion[r.sent_bit.index()][out.index()] += 1;
                if r.event_class == EventClass::Coincidence && out != r.sent_bit {
                    coinc_err += 1;
                }
            }
        }
        let retained: u64 = confusion.iter().flatten().sum();
        let errors = confusion[0][1] + confusion[1][0];
        let (ber, (ci_low, ci_high)) = if retained == 0 {
            (0.0, (0.0, 1.0))
        } else {
            (errors as f64 / retained as f64, wilson_interval(errors, retained, Z_95))
        };
        let (mi, mi_plug_in) = if retained == 0 {
            (0.0, 0.0)
        } else {
            let est = mutual_information_estimate(&confusion.map(|r| r.to_vec()))?;
            (est.miller_madow, est.plug_in)
        };
        let rows: Vec<Vec<f64>> = confusion
            .iter()
            .filter(|r| r[0] + r[1] > 0)
            .map(|r| {
                let t = (r[0] + r[1]) as f64;
                vec![r[0] as f64 / t, r[1] as f64 / t]
            })
            .collect();
        let capacity = if rows.is_empty() {
            0.0
        } else {
            capacity_blahut_arimoto(&rows, CAPACITY_TOL)?.bits
        };
        Ok(Self {
            confusion,
            trials: records.len() as u64,
            retained,
            ber,
            ci_low,
            ci_high,
            mi,
            mi_plug_in,
            capacity,
            snr: snr(nominal_m),
            threshold,
            coincidence_ber: (coinc > 0).then(|| coinc_err as f64 / coinc as f64),
            non_coincidence_fraction: non_coinc as f64 / records.len().max(1) as f64,
        })
    }
}

/// Signature separation over fluctuation scale, `(m+1)/√(3m+1)`.
pub fn snr(m: f64) -> f64 {
    (m + 1.0) / (3.0 * m + 1.0).sqrt()
}

/// Trial records together with their summary.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub records: Vec<TrialRecord>,
    pub estimate: ChannelEstimate,
}

pub fn simulate(config: &RunConfig) -> Result<Simulation> {
    let link = Link::new(config)?;
    let records = link.run_all()?;
    let estimate = ChannelEstimate::from_records(&records, link.threshold(), config.amplifier.nominal_m())?;
    Ok(Simulation { records, estimate })
}

pub fn estimate_channel(config: &RunConfig) -> Result<ChannelEstimate> {
    simulate(config).map(|s| s.estimate)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper(m: u64) -> AmplifierModel {
        AmplifierModel::PaperDeterministic { m }
    }

    #[test]
    fn bell_zero_is_always_decoded() {
        let link = Link::new(&RunConfig::new(SourceKind::Bell, paper(5), 10, 1)).unwrap();
        for i in 0..200 {
            let r = link.run_trial(Bit::Zero, i).unwrap();
            assert_eq!(r.readout_bit, Some(Bit::Zero));
            assert_eq!(r.counts.unwrap().difference().unsigned_abs(), 6);
            assert!(!r.policy_intervened);
        }
    }

    #[test]
    fn trials_are_reproducible() {
        let cfg = RunConfig::new(SourceKind::SpdcUnentangled, paper(3), 10, 77);
        let a = run_trial(&cfg, Bit::One, 12).unwrap();
        let b = run_trial(&cfg, Bit::One, 12).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn drop_policy_removes_non_coincidences() {
        let mut cfg = RunConfig::new(SourceKind::SpdcUnentangled, paper(3), 2000, 3);
        cfg.policy = NonCoincidencePolicy::DropTrial;
        let sim = simulate(&cfg).unwrap();
        let dropped = sim.records.iter().filter(|r| r.readout_bit.is_none()).count() as u64;
        assert!(dropped > 0);
        assert_eq!(sim.estimate.retained + dropped, 2000);
        assert!(sim
            .records
            .iter()
            .all(|r| r.policy_intervened == r.readout_bit.is_none()));
    }

    #[test]
    fn exact_ber_for_paper_model() {
        let link = Link::new(&RunConfig::new(SourceKind::Bell, paper(100), 1, 0)).unwrap();
        let [e0, e1] = link.coincidence_error_rates().unwrap();
        assert_eq!(e0, 0.0);
        assert!((e1 - 0.003_878_989_637_523_781).abs() < 1e-12, "{e1}");
    }

    #[test]
    fn rejects_bad_config() {
        let mut cfg = RunConfig::new(SourceKind::Bell, paper(1), 0, 0);
        assert!(Link::new(&cfg).is_err());
        cfg.trials = 1;
        cfg.threshold = Some(0);
        assert!(Link::new(&cfg).is_err());
    }

    #[test]
    fn snr_formula() {
        assert_eq!(snr(0.0), 1.0);
        assert_eq!(snr(1.0), 1.0);
        assert!((snr(16.0) - 17.0 / 7.0).abs() < 1e-15);
    }
}
