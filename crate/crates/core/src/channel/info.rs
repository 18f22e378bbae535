//! Information measures for small discrete channels.

use serde::Serialize;

use crate::error::{Error, Result};

const STOCHASTIC_TOL: f64 = 1e-9;

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}

/// Mutual information in bits between input drawn from `prior` and output of
/// the channel whose rows are the (unnormalized) rows of `confusion`.
pub fn mutual_information(confusion: &[Vec<f64>], prior: &[f64]) -> Result<f64> {
    if confusion.len() != prior.len() || confusion.is_empty() {
        return Err(Error::InvalidParameter("prior length must match confusion rows".into()));
    }
    let mut rows = Vec::with_capacity(confusion.len());
    for (i, row) in confusion.iter().enumerate() {
        let total: f64 = row.iter().sum();
        if total <= 0.0 {
            return Err(Error::DegenerateMatrix(i));
        }
        rows.push(row.iter().map(|c| c / total).collect::<Vec<f64>>());
    }
    let prior_total: f64 = prior.iter().sum();
    if prior.iter().any(|p| *p < 0.0) || prior_total <= 0.0 {
        return Err(Error::InvalidParameter(
            "prior must be a nonnegative, nonzero vector".into(),
        ));
    }
    let prior: Vec<f64> = prior.iter().map(|p| p / prior_total).collect();
    Ok(mi_bits(&rows, &prior))
}

fn mi_bits(rows: &[Vec<f64>], prior: &[f64]) -> f64 {
    let n_out = rows[0].len();
    let q: Vec<f64> = (0..n_out)
        .map(|y| rows.iter().zip(prior).map(|(r, p)| p * r[y]).sum())
        .collect();
    let mut mi = 0.0;
    for (row, p) in rows.iter().zip(prior) {
        if *p == 0.0 {
            continue;
        }
        for (w, qy) in row.iter().zip(&q) {
            if *w > 0.0 {
                mi += p * w * (w / qy).log2();
            }
        }
    }
    mi.max(0.0)
}

/// Plug-in and Miller–Madow estimates of mutual information from a joint count table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MiEstimate {
    pub plug_in: f64,
    /// Plug-in minus the first-order entropy bias, clamped at zero.
    pub miller_madow: f64,
    /// The subtracted first-order bias, `(K_xy − K_x − K_y + 1) / (2N ln 2)`.
    pub bias: f64,
}

pub fn mutual_information_estimate(counts: &[Vec<u64>]) -> Result<MiEstimate> {
    let n: u64 = counts.iter().flatten().sum();
    if n == 0 {
        return Err(Error::InvalidParameter("empty count table".into()));
    }
    let nf = n as f64;
    let n_cols = counts.first().map_or(0, Vec::len);
    let row_tot: Vec<u64> = counts.iter().map(|r| r.iter().sum()).collect();
    let col_tot: Vec<u64> = (0..n_cols).map(|j| counts.iter().map(|r| r[j]).sum()).collect();

    let entropy = |cells: &mut dyn Iterator<Item = u64>| -> (f64, usize) {
        let mut h = 0.0;
        let mut k = 0;
        for c in cells.filter(|c| *c > 0) {
            let p = c as f64 / nf;
            h -= p * p.log2();
            k += 1;
        }
        (h, k)
    };
    let (hx, kx) = entropy(&mut row_tot.iter().copied());
    let (hy, ky) = entropy(&mut col_tot.iter().copied());
    let (hxy, kxy) = entropy(&mut counts.iter().flatten().copied());

    let plug_in = (hx + hy - hxy).max(0.0);
    // H_MM = H + (K − 1)/(2N) nats for each of the three entropies.
    let bias = (kxy as f64 - kx as f64 - ky as f64 + 1.0) / (2.0 * nf * std::f64::consts::LN_2);
    Ok(MiEstimate {
        plug_in,
        miller_madow: (plug_in - bias).max(0.0),
        bias,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Capacity {
    pub bits: f64,
    pub prior: Vec<f64>,
    pub iterations: usize,
}

/// Channel capacity by Blahut–Arimoto. Iterates until the gap between the
/// standard upper and lower capacity bounds drops below `tol` bits.
pub fn capacity_blahut_arimoto(transition: &[Vec<f64>], tol: f64) -> Result<Capacity> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter("tolerance must be positive".into()));
    }
    let n_out = transition.first().map_or(0, Vec::len);
    if n_out == 0 {
        return Err(Error::NonStochasticRows);
    }
    for row in transition {
        let total: f64 = row.iter().sum();
        if row.len() != n_out
            || row.iter().any(|w| !(w.is_finite() && *w >= 0.0))
            || (total - 1.0).abs() > STOCHASTIC_TOL
        {
            return Err(Error::NonStochasticRows);
        }
    }
    let n_in = transition.len();
    let mut prior = vec![1.0 / n_in as f64; n_in];
    let max_iter = 1_000_000;
    for it in 1..=max_iter {
        let q: Vec<f64> = (0..n_out)
            .map(|y| transition.iter().zip(&prior).map(|(r, p)| p * r[y]).sum())
            .collect();
        // D(W_x || q) in bits for each input.
        let div: Vec<f64> = transition
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&q)
                    .filter(|(w, _)| **w > 0.0)
                    .map(|(w, qy)| w * (w / qy).log2())
                    .sum::<f64>()
            })
            .collect();
        let weights: Vec<f64> = prior.iter().zip(&div).map(|(p, d)| p * d.exp2()).collect();
        let z: f64 = weights.iter().sum();
        let lower = z.log2();
        let upper = div.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prior = weights.iter().map(|w| w / z).collect();
        if upper - lower < tol {
            return Ok(Capacity {
                bits: lower.max(0.0),
                prior,
                iterations: it,
            });
        }
    }
    Err(Error::InvalidParameter("Blahut–Arimoto did not converge".into()))
}

/// Wilson score interval for `k` successes out of `n`.
pub fn wilson_interval(k: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = k as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let centre = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    let lo = if k == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if k == n { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bsc(p: f64) -> Vec<Vec<f64>> {
        vec![vec![1.0 - p, p], vec![p, 1.0 - p]]
    }

    #[test]
    fn mi_closed_forms() {
        let uniform = [0.5, 0.5];
        let id = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        assert!((mutual_information(&id, &uniform).unwrap() - 1.0).abs() < 1e-15);
        let flat = vec![vec![1.0, 1.0], vec![1.0, 1.0]];
        assert_eq!(mutual_information(&flat, &uniform).unwrap(), 0.0);
        let v = mutual_information(&bsc(0.25), &uniform).unwrap();
        assert!((v - 0.188_721_875_540_867_2).abs() < 1e-12, "{v}");
    }

    #[test]
    fn mi_degenerate_row() {
        let m = vec![vec![3.0, 1.0], vec![0.0, 0.0]];
        assert_eq!(mutual_information(&m, &[0.5, 0.5]), Err(Error::DegenerateMatrix(1)));
    }

    #[test]
    fn capacity_closed_forms() {
        let id = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        assert!((capacity_blahut_arimoto(&id, 1e-12).unwrap().bits - 1.0).abs() < 1e-12);
        let same = vec![vec![0.3, 0.7], vec![0.3, 0.7]];
        assert!(capacity_blahut_arimoto(&same, 1e-12).unwrap().bits.abs() < 1e-12);
        let c = capacity_blahut_arimoto(&bsc(0.11), 1e-12).unwrap();
        assert!((c.bits - 0.500_084_041_835_472).abs() < 1e-10, "{}", c.bits);
        assert!((c.prior[0] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn capacity_z_channel_prior_is_skewed() {
        // Z channel with crossover 0.5: capacity log2(5/4), optimal P(x=1) = 2/5.
        let z = vec![vec![1.0, 0.0], vec![0.5, 0.5]];
        let c = capacity_blahut_arimoto(&z, 1e-12).unwrap();
        assert!((c.bits - (1.25f64).log2()).abs() < 1e-10);
        assert!((c.prior[1] - 0.4).abs() < 1e-6);
    }

    #[test]
    fn capacity_rejects_bad_rows() {
        let bad = vec![vec![0.5, 0.6], vec![0.5, 0.5]];
        assert_eq!(capacity_blahut_arimoto(&bad, 1e-9), Err(Error::NonStochasticRows));
        let neg = vec![vec![1.5, -0.5]];
        assert_eq!(capacity_blahut_arimoto(&neg, 1e-9), Err(Error::NonStochasticRows));
    }

    #[test]
    fn miller_madow_bias_for_full_2x2() {
        let est = mutual_information_estimate(&[vec![250, 250], vec![250, 250]]).unwrap();
        assert_eq!(est.plug_in, 0.0);
        assert!((est.bias - 1.0 / (2.0 * 1000.0 * std::f64::consts::LN_2)).abs() < 1e-15);
        assert_eq!(est.miller_madow, 0.0);
    }

    #[test]
    fn wilson_bounds() {
        let (lo, hi) = wilson_interval(0, 100, Z_95);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.03 && hi < 0.04);
        let (lo, hi) = wilson_interval(50, 100, Z_95);
        assert!(lo < 0.5 && hi > 0.5 && (0.5 - lo - (hi - 0.5)).abs() < 1e-12);
    }
}
