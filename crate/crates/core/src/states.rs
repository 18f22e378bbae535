//! Photon-pair sources and polarization measurements.
//!
//! Two sources are modelled. [`bell_pair`] is the polarization-entangled pair
//! `(|HH⟩ + |VV⟩)/√2`. [`spdc_unentangled`] is the two-photon state
//! `½(b₁†b₁† + b₂†b₂†)|0⟩`, whose modes feed the signal and idler beams as
//!
//! ```text
//! A_s = (b₁ e_v − b₂ e_h)/√2        A_i = (b₂ e_v + b₁ e_h)/√2
//! ```
//!
//! (overall constants and plane-wave phases dropped). Resolved into physical
//! beam modes this is `b₁† = (s_v† + i_h†)/√2`, `b₂† = (−s_h† + i_v†)/√2`.
//! The signal beam goes to the sender and the idler beam to the receiver.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{
    apply_annihilation_combination, apply_creation_combination, cos_sin_deg, FockStateVector, ModeLayout,
};

pub const MODE_B1: &str = "b1";
pub const MODE_B2: &str = "b2";
pub const SIGNAL_H: &str = "s_h";
pub const SIGNAL_V: &str = "s_v";
pub const IDLER_H: &str = "i_h";
pub const IDLER_V: &str = "i_v";

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Analyzer orientation in degrees from horizontal, kept in `[0, 180)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolarizationBasis {
    theta: f64,
}

impl PolarizationBasis {
    pub fn new(theta_deg: f64) -> Result<Self> {
        if !theta_deg.is_finite() {
            return Err(Error::InvalidParameter("basis angle must be finite".into()));
        }
        Ok(Self {
            theta: theta_deg.rem_euclid(180.0),
        })
    }

    pub fn horizontal() -> Self {
        Self { theta: 0.0 }
    }

    pub fn diagonal() -> Self {
        Self { theta: 45.0 }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Unit vectors along the parallel and perpendicular outcomes.
    pub fn axes(&self) -> ([f64; 2], [f64; 2]) {
        let (c, s) = cos_sin_deg(self.theta);
        ([c, s], [-s, c])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Parallel,
    Perpendicular,
}

impl Outcome {
    pub fn sign(self) -> f64 {
        match self {
            Outcome::Parallel => 1.0,
            Outcome::Perpendicular => -1.0,
        }
    }
}

/// Real Jones vector of a single photon, `(h, v)`, unit norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Polarization {
    h: f64,
    v: f64,
}

impl Polarization {
    pub fn at(angle_deg: f64) -> Self {
        let (h, v) = cos_sin_deg(angle_deg);
        Self { h, v }
    }

    pub fn horizontal() -> Self {
        Self { h: 1.0, v: 0.0 }
    }

    pub fn vertical() -> Self {
        Self { h: 0.0, v: 1.0 }
    }

    pub fn from_components(h: f64, v: f64) -> Result<Self> {
        let norm = h.hypot(v);
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidParameter("polarization vector must be nonzero".into()));
        }
        Ok(Self {
            h: h / norm,
            v: v / norm,
        })
    }

    pub fn components(&self) -> [f64; 2] {
        [self.h, self.v]
    }

    /// Orientation in `[0, 180)` degrees; the overall sign is a global phase.
    pub fn angle_deg(&self) -> f64 {
        let a = self.v.atan2(self.h).to_degrees().rem_euclid(180.0);
        // Snap rounding noise so collapsed states key cleanly.
        let snapped = (a * 1e9).round() / 1e9;
        if snapped >= 180.0 {
            0.0
        } else {
            snapped
        }
    }

    /// Born probability of the parallel outcome in `basis` (Malus law).
    pub fn parallel_probability(&self, basis: PolarizationBasis) -> f64 {
        let (par, _) = basis.axes();
        (par[0] * self.h + par[1] * self.v).powi(2)
    }
}

/// Two-photon polarization state, amplitudes ordered `HH, HV, VH, VV` with
/// the sender photon first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationPair {
    amplitudes: [f64; 4],
}

impl PolarizationPair {
    pub fn new(amplitudes: [f64; 4]) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a * a).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidParameter("pair amplitudes must be nonzero".into()));
        }
        Ok(Self {
            amplitudes: amplitudes.map(|a| a / norm),
        })
    }

    pub fn amplitudes(&self) -> [f64; 4] {
        self.amplitudes
    }

    #[inline]
    fn amp(&self, sender: usize, receiver: usize) -> f64 {
        self.amplitudes[2 * sender + receiver]
    }

    /// Applies the same real rotation to both photons.
    pub fn rotated(&self, angle_deg: f64) -> Self {
        let (c, s) = cos_sin_deg(angle_deg);
        let r = [[c, -s], [s, c]];
        let mut out = [0.0; 4];
        for (i, o) in out.iter_mut().enumerate() {
            let (a, b) = (i / 2, i % 2);
            for j in 0..4 {
                let (x, y) = (j / 2, j % 2);
                *o += r[a][x] * r[b][y] * self.amplitudes[j];
            }
        }
        Self { amplitudes: out }
    }

    /// Unnormalized state of the far photon after projecting `party` onto `axis`.
    fn project(&self, party: Party, axis: [f64; 2]) -> [f64; 2] {
        let mut remote = [0.0; 2];
        for (far, slot) in remote.iter_mut().enumerate() {
            *slot = (0..2)
                .map(|near| {
                    let amp = match party {
                        Party::Sender => self.amp(near, far),
                        Party::Receiver => self.amp(far, near),
                    };
                    axis[near] * amp
                })
                .sum();
        }
        remote
    }

    /// Joint outcome probabilities `[[pp, p⊥], [⊥p, ⊥⊥]]` (sender first).
    pub fn joint_probabilities(&self, sender: PolarizationBasis, receiver: PolarizationBasis) -> [[f64; 2]; 2] {
        let (sp, sq) = sender.axes();
        let (rp, rq) = receiver.axes();
        let mut out = [[0.0; 2]; 2];
        for (i, s_axis) in [sp, sq].into_iter().enumerate() {
            let remote = self.project(Party::Sender, s_axis);
            for (j, r_axis) in [rp, rq].into_iter().enumerate() {
                let amp = r_axis[0] * remote[0] + r_axis[1] * remote[1];
                out[i][j] = amp * amp;
            }
        }
        out
    }

    /// Correlation `E = P(same) − P(different)`.
    pub fn correlation(&self, sender: PolarizationBasis, receiver: PolarizationBasis) -> f64 {
        let p = self.joint_probabilities(sender, receiver);
        p[0][0] + p[1][1] - p[0][1] - p[1][0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Party {
    Sender,
    Receiver,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EventClass {
    Coincidence,
    BothSignal,
    BothIdler,
}

impl EventClass {
    pub fn as_str(self) -> &'static str {
        match self {
            EventClass::Coincidence => "coincidence",
            EventClass::BothSignal => "both_signal",
            EventClass::BothIdler => "both_idler",
        }
    }
}

/// Exact probabilities of the three ways the two photons can split between beams.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EventProbabilities {
    pub coincidence: f64,
    pub both_signal: f64,
    pub both_idler: f64,
}

impl EventProbabilities {
    fn certain_coincidence() -> Self {
        Self {
            coincidence: 1.0,
            both_signal: 0.0,
            both_idler: 0.0,
        }
    }
}

/// The two-photon state `½(b₁†b₁† + b₂†b₂†)|0⟩`, kept both in its own modes
/// and resolved onto the signal/idler polarization modes.
#[derive(Debug, Clone)]
pub struct SpdcPair {
    modes: FockStateVector,
    beams: FockStateVector,
    events: EventProbabilities,
    coincidence: PolarizationPair,
}

impl SpdcPair {
    /// State over modes `(b1, b2)`.
    pub fn mode_state(&self) -> &FockStateVector {
        &self.modes
    }

    /// State over `(s_h, s_v, i_h, i_v)`.
    pub fn beam_state(&self) -> &FockStateVector {
        &self.beams
    }

    pub fn events(&self) -> EventProbabilities {
        self.events
    }

    /// Polarization state conditioned on one photon per beam.
    pub fn coincidence_pair(&self) -> PolarizationPair {
        self.coincidence
    }
}

#[derive(Debug, Clone)]
pub enum PairState {
    Bell(PolarizationPair),
    SpdcUnentangled(Box<SpdcPair>),
    /// An SPDC pair post-selected on one photon in each beam.
    CoincidenceBranch(PolarizationPair),
}

impl PairState {
    pub fn kind_name(&self) -> &'static str {
        match self {
            PairState::Bell(_) => "bell",
            PairState::SpdcUnentangled(_) => "spdc_unentangled",
            PairState::CoincidenceBranch(_) => "coincidence_branch",
        }
    }

    /// The polarization pair when each side carries exactly one photon.
    pub fn polarization_pair(&self) -> Result<PolarizationPair> {
        match self {
            PairState::Bell(p) | PairState::CoincidenceBranch(p) => Ok(*p),
            PairState::SpdcUnentangled(_) => Err(Error::NotSingularlyOccupied),
        }
    }

    pub fn event_probabilities(&self) -> EventProbabilities {
        match self {
            PairState::SpdcUnentangled(s) => s.events,
            _ => EventProbabilities::certain_coincidence(),
        }
    }

    /// Post-selects one photon per beam. Pairs that already satisfy this are returned as is.
    pub fn coincidence_branch(&self) -> PairState {
        match self {
            PairState::SpdcUnentangled(s) => PairState::CoincidenceBranch(s.coincidence),
            other => other.clone(),
        }
    }
}

pub fn bell_pair() -> PairState {
    PairState::Bell(PolarizationPair {
        amplitudes: [FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2],
    })
}

/// Builds `½(b₁†b₁† + b₂†b₂†)|0⟩` with occupation cap `n_max`.
pub fn spdc_unentangled(n_max: usize) -> Result<PairState> {
    if n_max < 2 {
        return Err(Error::TruncationOverflow {
            mode: MODE_B1.into(),
            n_max,
        });
    }
    let mode_layout = ModeLayout::new([MODE_B1, MODE_B2], n_max)?;
    let b1 = [(MODE_B1, 1.0)];
    let b2 = [(MODE_B2, 1.0)];
    let modes = half_sum_of_squares(&mode_layout, &b1, &b2)?;

    let beam_layout = ModeLayout::new([SIGNAL_H, SIGNAL_V, IDLER_H, IDLER_V], n_max)?;
    let b1_beams = [(SIGNAL_V, FRAC_1_SQRT_2), (IDLER_H, FRAC_1_SQRT_2)];
    let b2_beams = [(SIGNAL_H, -FRAC_1_SQRT_2), (IDLER_V, FRAC_1_SQRT_2)];
    let beams = half_sum_of_squares(&beam_layout, &b1_beams, &b2_beams)?;

    let events = beam_events(&beams)?;
    let coincidence = PolarizationPair::new([
        beams.amplitude(&[1, 0, 1, 0]).re,
        beams.amplitude(&[1, 0, 0, 1]).re,
        beams.amplitude(&[0, 1, 1, 0]).re,
        beams.amplitude(&[0, 1, 0, 1]).re,
    ])?;
    Ok(PairState::SpdcUnentangled(Box::new(SpdcPair {
        modes,
        beams,
        events,
        coincidence,
    })))
}

/// `½(B₁†B₁† + B₂†B₂†)|0⟩` for creation combinations `B₁†`, `B₂†`.
fn half_sum_of_squares(layout: &ModeLayout, first: &[(&str, f64)], second: &[(&str, f64)]) -> Result<FockStateVector> {
    let vac = FockStateVector::vacuum(layout);
    let one = apply_creation_combination(&vac, first)?;
    let two = apply_creation_combination(&one, first)?;
    let other = apply_creation_combination(&vac, second)?;
    let other_two = apply_creation_combination(&other, second)?;
    Ok(two.add(&other_two)?.scaled(num_complex::Complex64::new(0.5, 0.0)))
}

fn beam_events(beams: &FockStateVector) -> Result<EventProbabilities> {
    let counts = beams.count_distribution(&[SIGNAL_H, SIGNAL_V, IDLER_H, IDLER_V])?;
    let mut ev = EventProbabilities {
        coincidence: 0.0,
        both_signal: 0.0,
        both_idler: 0.0,
    };
    for (occ, p) in counts.iter() {
        match (occ[0] + occ[1], occ[2] + occ[3]) {
            (1, 1) => ev.coincidence += p,
            (2, 0) => ev.both_signal += p,
            (0, 2) => ev.both_idler += p,
            _ => return Err(Error::InvalidParameter("source is not a photon pair".into())),
        }
    }
    Ok(ev)
}

/// Which output beam of the SPDC source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpdcBeam {
    Signal,
    Idler,
}

/// Positive-frequency field of one beam as a list of polarization
/// components, each a linear combination of annihilation operators.
#[derive(Debug, Clone)]
pub struct BeamOperator {
    components: Vec<Vec<(&'static str, f64)>>,
}

impl BeamOperator {
    /// The beam field written in the source modes `b1`, `b2`.
    pub fn in_source_modes(beam: SpdcBeam) -> Self {
        let h = FRAC_1_SQRT_2;
        let components = match beam {
            // (b₁ e_v − b₂ e_h)/√2
            SpdcBeam::Signal => vec![vec![(MODE_B1, h)], vec![(MODE_B2, -h)]],
            // (b₂ e_v + b₁ e_h)/√2
            SpdcBeam::Idler => vec![vec![(MODE_B2, h)], vec![(MODE_B1, h)]],
        };
        Self { components }
    }

    /// The beam field written in the physical beam modes.
    pub fn in_beam_modes(beam: SpdcBeam) -> Self {
        let components = match beam {
            SpdcBeam::Signal => vec![vec![(SIGNAL_V, 1.0)], vec![(SIGNAL_H, 1.0)]],
            SpdcBeam::Idler => vec![vec![(IDLER_V, 1.0)], vec![(IDLER_H, 1.0)]],
        };
        Self { components }
    }

    /// `Σ_jk ‖A_j A_k |ψ⟩‖²`, the normally ordered two-photon intensity of the
    /// beam. For a two-photon state the probability that both photons land
    /// in this beam is half of it.
    pub fn double_detection(&self, state: &FockStateVector) -> Result<f64> {
        let mut total = 0.0;
        for first in &self.components {
            let once = apply_annihilation_combination(state, first)?;
            for second in &self.components {
                total += apply_annihilation_combination(&once, second)?.norm_sqr();
            }
        }
        Ok(total)
    }
}

/// Two-photon intensity of `beam` for the pair, computed with the beam field in
/// the source modes. Pairs with one photon per side give exactly zero.
pub fn double_detection_amplitude(pair: &PairState, beam: SpdcBeam) -> Result<f64> {
    match pair {
        PairState::SpdcUnentangled(s) => BeamOperator::in_source_modes(beam).double_detection(&s.modes),
        _ => Ok(0.0),
    }
}

/// Samples how the two photons split between the beams.
pub fn event_class_sample<R: Rng + ?Sized>(pair: &PairState, rng: &mut R) -> EventClass {
    let ev = pair.event_probabilities();
    if ev.coincidence >= 1.0 {
        return EventClass::Coincidence;
    }
    let u: f64 = rng.random();
    if u < ev.coincidence {
        EventClass::Coincidence
    } else if u < ev.coincidence + ev.both_signal {
        EventClass::BothSignal
    } else {
        EventClass::BothIdler
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasurementOutcome {
    pub outcome: Outcome,
    pub collapsed_remote: Polarization,
    pub probability: f64,
}

/// Both branches of a polarization measurement on one photon of the pair:
/// `[parallel, perpendicular]`, each with its probability and the far photon's
/// collapsed state.
pub fn measurement_branches(
    pair: &PairState,
    party: Party,
    basis: PolarizationBasis,
) -> Result<[MeasurementOutcome; 2]> {
    let pp = pair.polarization_pair()?;
    let (par, perp) = basis.axes();
    let branch = |outcome: Outcome, axis: [f64; 2]| -> MeasurementOutcome {
        let remote = pp.project(party, axis);
        let probability = remote[0] * remote[0] + remote[1] * remote[1];
        let collapsed_remote = Polarization::from_components(remote[0], remote[1])
            // A zero-probability branch has no collapsed state; any unit vector will do.
            .unwrap_or(Polarization { h: axis[0], v: axis[1] });
        MeasurementOutcome {
            outcome,
            collapsed_remote,
            probability,
        }
    };
    Ok([branch(Outcome::Parallel, par), branch(Outcome::Perpendicular, perp)])
}

/// Born-rule measurement of `party`'s photon with collapse of the other one.
pub fn measure_polarization<R: Rng + ?Sized>(
    pair: &PairState,
    party: Party,
    basis: PolarizationBasis,
    rng: &mut R,
) -> Result<MeasurementOutcome> {
    let [par, perp] = measurement_branches(pair, party, basis)?;
    let u: f64 = rng.random();
    Ok(if u < par.probability { par } else { perp })
}

/// Measures a lone photon; returns the outcome and its probability.
pub fn measure_photon<R: Rng + ?Sized>(photon: Polarization, basis: PolarizationBasis, rng: &mut R) -> (Outcome, f64) {
    let p = photon.parallel_probability(basis);
    if rng.random::<f64>() < p {
        (Outcome::Parallel, p)
    } else {
        (Outcome::Perpendicular, 1.0 - p)
    }
}

/// Analyzer settings `(a, b, a′, b′)`: `a`, `a′` on the sender side, `b`, `b′` on the receiver side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChshAngles {
    pub a: f64,
    pub b: f64,
    pub a_prime: f64,
    pub b_prime: f64,
}

impl ChshAngles {
    pub fn new(angles: [f64; 4]) -> Self {
        let [a, b, a_prime, b_prime] = angles;
        Self { a, b, a_prime, b_prime }
    }

    /// 0°, 22.5°, 45°, 67.5°.
    pub fn standard() -> Self {
        Self::new([0.0, 22.5, 45.0, 67.5])
    }
}

/// `S = E(a,b) − E(a,b′) + E(a′,b) + E(a′,b′)` from exact probabilities.
///
/// SPDC pairs are conditioned on the coincidence branch first.
pub fn chsh_value(pair: &PairState, angles: ChshAngles) -> Result<f64> {
    let pp = pair.coincidence_branch().polarization_pair()?;
    let e =
        |s: f64, r: f64| -> Result<f64> { Ok(pp.correlation(PolarizationBasis::new(s)?, PolarizationBasis::new(r)?)) };
    Ok(e(angles.a, angles.b)? - e(angles.a, angles.b_prime)?
        + e(angles.a_prime, angles.b)?
        + e(angles.a_prime, angles.b_prime)?)
}
