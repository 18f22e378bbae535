use std::collections::BTreeMap;

use rand::Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Joint pmf over photon-count tuples.
///
/// Support tuples are kept sorted lexicographically and only entries with
/// positive probability are stored, so two distributions built from the
/// same numbers compare and serialize identically.
#[derive(Debug, Clone, PartialEq)]
pub struct CountDistribution {
    modes: Vec<String>,
    support: Vec<Vec<usize>>,
    probabilities: Vec<f64>,
}

impl CountDistribution {
    /// Accumulates `(occupations, weight)` entries; repeated tuples add up.
    pub fn from_entries<I>(modes: Vec<String>, entries: I) -> Self
    where
        I: IntoIterator<Item = (Vec<usize>, f64)>,
    {
        let mut acc: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        for (occ, p) in entries {
            debug_assert_eq!(occ.len(), modes.len());
            *acc.entry(occ).or_insert(0.0) += p;
        }
        let (support, probabilities) = acc.into_iter().filter(|(_, p)| *p > 0.0).unzip();
        Self {
            modes,
            support,
            probabilities,
        }
    }

    pub fn point(modes: Vec<String>, occupations: Vec<usize>) -> Self {
        Self::from_entries(modes, [(occupations, 1.0)])
    }

    pub fn modes(&self) -> &[String] {
        &self.modes
    }

    pub fn support(&self) -> &[Vec<usize>] {
        &self.support
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[usize], f64)> {
        self.support
            .iter()
            .map(Vec::as_slice)
            .zip(self.probabilities.iter().copied())
    }

    pub fn probability(&self, occupations: &[usize]) -> f64 {
        self.support
            .binary_search_by(|s| s.as_slice().cmp(occupations))
            .map_or(0.0, |i| self.probabilities[i])
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    pub fn normalized(&self) -> Result<Self> {
        let total = self.total();
        if total <= 0.0 {
            return Err(Error::InvalidParameter("empty count distribution".into()));
        }
        Ok(Self {
            modes: self.modes.clone(),
            support: self.support.clone(),
            probabilities: self.probabilities.iter().map(|p| p / total).collect(),
        })
    }

    /// Mean occupation of the `k`-th mode of this distribution.
    pub fn mean(&self, k: usize) -> f64 {
        self.iter().map(|(occ, p)| occ[k] as f64 * p).sum()
    }

    pub fn variance(&self, k: usize) -> f64 {
        let mean = self.mean(k);
        self.iter().map(|(occ, p)| (occ[k] as f64 - mean).powi(2) * p).sum()
    }

    /// Marginal over the listed positions of this distribution's mode list.
    pub fn marginal(&self, keep: &[usize]) -> Self {
        let modes = keep.iter().map(|&k| self.modes[k].clone()).collect();
        Self::from_entries(
            modes,
            self.iter().map(|(occ, p)| (keep.iter().map(|&k| occ[k]).collect(), p)),
        )
    }

    /// Weighted sum of distributions over the same modes.
    pub fn mixture<'a, I>(parts: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, &'a CountDistribution)>,
    {
        let mut modes: Option<Vec<String>> = None;
        let mut entries = Vec::new();
        for (w, d) in parts {
            match &modes {
                None => modes = Some(d.modes.clone()),
                Some(m) if *m != d.modes => return Err(Error::LayoutMismatch),
                Some(_) => {}
            }
            entries.extend(d.iter().map(|(occ, p)| (occ.to_vec(), w * p)));
        }
        let modes = modes.ok_or_else(|| Error::InvalidParameter("empty mixture".into()))?;
        Ok(Self::from_entries(modes, entries))
    }

    /// Half the L1 distance over the union of supports.
    pub fn tv_distance(&self, other: &Self) -> Result<f64> {
        if self.modes.len() != other.modes.len() {
            return Err(Error::LayoutMismatch);
        }
        let mut diff: BTreeMap<&[usize], f64> = BTreeMap::new();
        for (occ, p) in self.iter() {
            *diff.entry(occ).or_insert(0.0) += p;
        }
        for (occ, p) in other.iter() {
            *diff.entry(occ).or_insert(0.0) -= p;
        }
        Ok(0.5 * diff.values().map(|d| d.abs()).sum::<f64>())
    }

    pub fn sampler(&self) -> CountSampler {
        let mut cdf = Vec::with_capacity(self.probabilities.len());
        let mut acc = 0.0;
        for p in &self.probabilities {
            acc += p;
            cdf.push(acc);
        }
        CountSampler {
            support: self.support.clone(),
            cdf,
        }
    }
}

impl Serialize for CountDistribution {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry<'a> {
            counts: &'a [usize],
            p: f64,
        }
        #[derive(Serialize)]
        struct Repr<'a> {
            modes: &'a [String],
            entries: Vec<Entry<'a>>,
        }
        Repr {
            modes: &self.modes,
            entries: self.iter().map(|(counts, p)| Entry { counts, p }).collect(),
        }
        .serialize(serializer)
    }
}

/// Inverse-CDF sampler over a [`CountDistribution`].
#[derive(Debug, Clone)]
pub struct CountSampler {
    support: Vec<Vec<usize>>,
    cdf: Vec<f64>,
}

impl CountSampler {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> &[usize] {
        let total = *self.cdf.last().expect("sampler over empty distribution");
        let u = rng.random::<f64>() * total;
        let i = self.cdf.partition_point(|&c| c <= u);
        &self.support[i.min(self.support.len() - 1)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("m{i}")).collect()
    }

    #[test]
    fn entries_merge_and_sort() {
        let d = CountDistribution::from_entries(
            names(2),
            [
                (vec![1, 0], 0.25),
                (vec![0, 1], 0.5),
                (vec![1, 0], 0.25),
                (vec![2, 2], 0.0),
            ],
        );
        assert_eq!(d.support(), &[vec![0, 1], vec![1, 0]]);
        assert_eq!(d.probability(&[1, 0]), 0.5);
        assert_eq!(d.probability(&[2, 2]), 0.0);
        assert_eq!(d.total(), 1.0);
    }

    #[test]
    fn tv_distance_disjoint_and_equal() {
        let a = CountDistribution::point(names(1), vec![0]);
        let b = CountDistribution::point(names(1), vec![1]);
        assert_eq!(a.tv_distance(&b).unwrap(), 1.0);
        assert_eq!(a.tv_distance(&a).unwrap(), 0.0);
    }

    #[test]
    fn sampler_frequencies() {
        let d = CountDistribution::from_entries(names(1), [(vec![0], 0.2), (vec![1], 0.8)]);
        let s = d.sampler();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 40_000;
        let ones = (0..n).filter(|_| s.sample(&mut rng)[0] == 1).count();
        let f = ones as f64 / n as f64;
        assert!((f - 0.8).abs() < 4.0 * (0.8f64 * 0.2 / n as f64).sqrt());
    }
}
