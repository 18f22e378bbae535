use serde::Serialize;

use super::link::{simulate, snr, Link, RunConfig};
use crate::devices::{AmplifierModel, CovariantParams};
use crate::error::{Error, Result};

/// Largest `m` for which the urn model's exact pmf is enumerated during a sweep.
const URN_EXACT_LIMIT: u64 = 128;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub m: u64,
    pub threshold: u64,
    pub ber: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub ber_exact: Option<f64>,
    pub snr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    /// Least-squares slope of `ln snr` against `ln m` over rows with `m > 0`.
    pub snr_slope: f64,
}

/// The same amplifier family at another `m`. The squeezer keeps its tolerance
/// and grows its truncation when the new gain needs it.
pub fn amplifier_at(model: &AmplifierModel, m: u64) -> AmplifierModel {
    match model {
        AmplifierModel::PaperDeterministic { .. } => AmplifierModel::PaperDeterministic { m },
        AmplifierModel::EmissionUrn { .. } => AmplifierModel::EmissionUrn { m },
        AmplifierModel::CovariantSqueezer(p) => {
            let gain = (m + 1) as f64;
            AmplifierModel::CovariantSqueezer(CovariantParams {
                gain,
                n_max: p.n_max.max(CovariantParams::suggested_n_max(gain, p.leakage_tol)),
                leakage_tol: p.leakage_tol,
            })
        }
    }
}

/// Slope of the least-squares line through `(ln x, ln y)`.
pub fn log_log_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 || points.iter().any(|(x, y)| *x <= 0.0 || *y <= 0.0) {
        return Err(Error::InvalidParameter("log-log fit needs ≥ 2 positive points".into()));
    }
    let n = points.len() as f64;
    let logs: Vec<(f64, f64)> = points.iter().map(|(x, y)| (x.ln(), y.ln())).collect();
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = logs.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter(
            "log-log fit needs two distinct m values".into(),
        ));
    }
    Ok(sxy / sxx)
}

/// Runs `config` at each `m`, always with the default threshold for that `m`.
pub fn sweep_m(config: &RunConfig, m_values: &[u64]) -> Result<SweepReport> {
    if m_values.len() < 2 {
        return Err(Error::InvalidParameter("sweep needs at least two m values".into()));
    }
    let mut rows = Vec::with_capacity(m_values.len());
    for &m in m_values {
        let mut cfg = config.clone();
        cfg.amplifier = amplifier_at(&config.amplifier, m);
        cfg.threshold = None;
        let est = simulate(&cfg)?.estimate;
        let exact = match cfg.amplifier {
            AmplifierModel::EmissionUrn { m } if m > URN_EXACT_LIMIT => None,
            _ => Some(Link::new(&cfg)?.exact_ber()?),
        };
        rows.push(SweepRow {
            m,
            threshold: est.threshold,
            ber: est.ber,
            ci_low: est.ci_low,
            ci_high: est.ci_high,
            ber_exact: exact,
            snr: snr(m as f64),
        });
    }
    let positive: Vec<(f64, f64)> = rows.iter().filter(|r| r.m > 0).map(|r| (r.m as f64, r.snr)).collect();
    Ok(SweepReport {
        snr_slope: log_log_slope(&positive)?,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law_slope() {
        let pts: Vec<(f64, f64)> = [1.0, 4.0, 9.0].iter().map(|x: &f64| (*x, x.sqrt())).collect();
        assert!((log_log_slope(&pts).unwrap() - 0.5).abs() < 1e-14);
        assert!(log_log_slope(&[(1.0, 1.0)]).is_err());
        assert!(log_log_slope(&[(2.0, 1.0), (2.0, 3.0)]).is_err());
    }

    #[test]
    fn amplifier_family_is_kept() {
        let cov = AmplifierModel::CovariantSqueezer(CovariantParams::from_m(0, 16));
        let AmplifierModel::CovariantSqueezer(p) = amplifier_at(&cov, 3) else {
            panic!("family changed");
        };
        assert_eq!(p.gain, 4.0);
        assert!(p.n_max > 16);
        assert_eq!(
            amplifier_at(&AmplifierModel::EmissionUrn { m: 1 }, 9),
            AmplifierModel::EmissionUrn { m: 9 }
        );
    }
}
