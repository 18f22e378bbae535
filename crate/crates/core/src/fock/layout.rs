use crate::error::{Error, Result};

/// Ordered set of bosonic modes sharing one occupation cap.
///
/// Basis states are enumerated in row-major order of the mode list: the
/// first mode is the most significant digit in base `n_max + 1`. Serialized
/// amplitude arrays depend on this order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModeLayout {
    modes: Vec<String>,
    n_max: usize,
    strides: Vec<usize>,
    dim: usize,
}

impl ModeLayout {
    pub fn new<I, S>(modes: I, n_max: usize) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let modes: Vec<String> = modes.into_iter().map(Into::into).collect();
        if modes.is_empty() {
            return Err(Error::InvalidParameter("layout needs at least one mode".into()));
        }
        if n_max == 0 {
            return Err(Error::InvalidParameter("n_max must be at least 1".into()));
        }
        for (i, name) in modes.iter().enumerate() {
            if modes[..i].contains(name) {
                return Err(Error::InvalidParameter(format!("duplicate mode `{name}`")));
            }
        }
        let base = n_max + 1;
        let dim = u32::try_from(modes.len())
            .ok()
            .and_then(|k| base.checked_pow(k))
            .ok_or_else(|| Error::InvalidParameter("basis dimension overflows".into()))?;
        let mut strides = vec![1; modes.len()];
        for i in (0..modes.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * base;
        }
        Ok(Self {
            modes,
            n_max,
            strides,
            dim,
        })
    }

    pub fn modes(&self) -> &[String] {
        &self.modes
    }

    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Basis dimension, `(n_max + 1)^modes`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mode_index(&self, name: &str) -> Result<usize> {
        self.modes
            .iter()
            .position(|m| m == name)
            .ok_or_else(|| Error::UnknownMode(name.to_string()))
    }

    pub fn stride(&self, mode: usize) -> usize {
        self.strides[mode]
    }

    /// Occupation of `mode` in basis element `index`.
    #[inline]
    pub fn occupation(&self, index: usize, mode: usize) -> usize {
        (index / self.strides[mode]) % (self.n_max + 1)
    }

    pub fn occupations(&self, index: usize) -> Vec<usize> {
        (0..self.modes.len()).map(|m| self.occupation(index, m)).collect()
    }

    /// Basis index of an occupation tuple, or `None` if any entry exceeds the cap.
    pub fn index(&self, occupations: &[usize]) -> Option<usize> {
        if occupations.len() != self.modes.len() || occupations.iter().any(|&n| n > self.n_max) {
            return None;
        }
        Some(occupations.iter().zip(&self.strides).map(|(n, s)| n * s).sum())
    }
}
