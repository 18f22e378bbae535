use num_complex::Complex64;

use super::counts::CountDistribution;
use super::layout::ModeLayout;
use crate::error::{Error, Result};

/// Pure state on a truncated multi-mode Fock space.
///
/// Amplitudes are stored densely, indexed by [`ModeLayout::index`].
#[derive(Debug, Clone, PartialEq)]
pub struct FockStateVector {
    layout: ModeLayout,
    amplitudes: Vec<Complex64>,
}

impl FockStateVector {
    pub fn vacuum(layout: &ModeLayout) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); layout.dim()];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Self {
            layout: layout.clone(),
            amplitudes,
        }
    }

    pub fn zeros(layout: &ModeLayout) -> Self {
        Self {
            layout: layout.clone(),
            amplitudes: vec![Complex64::new(0.0, 0.0); layout.dim()],
        }
    }

    /// Number state with the given occupations, in layout mode order.
    pub fn basis(layout: &ModeLayout, occupations: &[usize]) -> Result<Self> {
        let index = layout.index(occupations).ok_or_else(|| {
            Error::InvalidParameter(format!(
                "occupations {occupations:?} do not fit layout {:?} with n_max {}",
                layout.modes(),
                layout.n_max()
            ))
        })?;
        let mut state = Self::zeros(layout);
        state.amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(state)
    }

    pub fn from_amplitudes(layout: &ModeLayout, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != layout.dim() {
            return Err(Error::InvalidParameter(format!(
                "expected {} amplitudes, got {}",
                layout.dim(),
                amplitudes.len()
            )));
        }
        Ok(Self {
            layout: layout.clone(),
            amplitudes,
        })
    }

    pub fn layout(&self) -> &ModeLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn amplitude(&self, occupations: &[usize]) -> Complex64 {
        self.layout
            .index(occupations)
            .map_or(Complex64::new(0.0, 0.0), |i| self.amplitudes[i])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm_sqr().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidParameter("cannot normalize the zero vector".into()));
        }
        Ok(self.scaled(Complex64::new(1.0 / norm, 0.0)))
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            layout: self.layout.clone(),
            amplitudes: self.amplitudes.iter().map(|a| a * factor).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_layout(other)?;
        Ok(Self {
            layout: self.layout.clone(),
            amplitudes: self
                .amplitudes
                .iter()
                .zip(&other.amplitudes)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// `<self|other>`
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check_layout(other)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub(crate) fn check_layout(&self, other: &Self) -> Result<()> {
        if self.layout != other.layout {
            return Err(Error::LayoutMismatch);
        }
        Ok(())
    }

    /// Iterator over `(basis index, amplitude)` for the populated basis elements.
    pub fn populated(&self) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(_, a)| a.re != 0.0 || a.im != 0.0)
            .map(|(i, a)| (i, *a))
    }

    /// Joint photon-count pmf of `modes`, marginalizing every other mode.
    ///
    /// Probabilities are taken relative to the state's own squared norm.
    pub fn count_distribution(&self, modes: &[&str]) -> Result<CountDistribution> {
        let idx: Vec<usize> = modes.iter().map(|m| self.layout.mode_index(m)).collect::<Result<_>>()?;
        let total = self.norm_sqr();
        if total == 0.0 {
            return Err(Error::InvalidParameter("zero state has no count distribution".into()));
        }
        let entries = self.populated().map(|(i, a)| {
            let occ: Vec<usize> = idx.iter().map(|&m| self.layout.occupation(i, m)).collect();
            (occ, a.norm_sqr() / total)
        });
        Ok(CountDistribution::from_entries(
            modes.iter().map(|m| m.to_string()).collect(),
            entries,
        ))
    }
}
