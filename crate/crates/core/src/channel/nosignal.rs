use std::collections::BTreeSet;

use serde::Serialize;

use super::info::capacity_blahut_arimoto;
use super::link::{Link, RunConfig, SourceKind};
use crate::devices::{AmplifierModel, Bit};
use crate::error::Result;
use crate::fock::CountDistribution;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoSignalingReport {
    /// Total-variation distance between the receiver's count pmfs under the two settings.
    pub tv_distance: f64,
    /// Capacity of the setting → counts channel, in bits.
    pub mi_upper: f64,
    pub setting0_pmf: CountDistribution,
    pub setting1_pmf: CountDistribution,
    /// Truncation leakage of the amplifier model; zero unless it is the squeezer.
    pub leakage: f64,
}

/// Can the receiver, looking only at its own counts, tell which encoder
/// setting the sender chose? Bell source, receiver analyzer at 0°, sender
/// settings 0° and 45°, sender outcomes marginalized.
pub fn no_signaling_test(amplifier: &AmplifierModel) -> Result<NoSignalingReport> {
    let link = Link::new(&RunConfig::new(SourceKind::Bell, amplifier.clone(), 1, 0))?;
    let p0 = link.receiver_distribution(Bit::Zero)?;
    let p1 = link.receiver_distribution(Bit::One)?;
    let tv_distance = p0.tv_distance(&p1)?;

    let support: BTreeSet<&[usize]> = p0.support().iter().chain(p1.support()).map(Vec::as_slice).collect();
    let rows: Vec<Vec<f64>> = [&p0, &p1]
        .iter()
        .map(|d| support.iter().map(|occ| d.probability(occ)).collect())
        .collect();
    let mi_upper = capacity_blahut_arimoto(&rows, 1e-12)?.bits;

    Ok(NoSignalingReport {
        tv_distance,
        mi_upper,
        setting0_pmf: p0,
        setting1_pmf: p1,
        leakage: link.receiver().leakage(),
    })
}
