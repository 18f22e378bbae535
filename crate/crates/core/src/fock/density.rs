use nalgebra::DMatrix;
use num_complex::Complex64;

use super::counts::CountDistribution;
use super::layout::ModeLayout;
use super::state::FockStateVector;
use crate::error::{Error, Result};

/// Mixed state over a [`ModeLayout`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    layout: ModeLayout,
    matrix: DMatrix<Complex64>,
}

impl DensityOperator {
    /// `|ψ⟩⟨ψ|` for a normalized copy of `state`.
    pub fn from_pure(state: &FockStateVector) -> Result<Self> {
        let psi = state.normalized()?;
        let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
        Ok(Self {
            layout: psi.layout().clone(),
            matrix: &v * v.adjoint(),
        })
    }

    pub fn from_matrix(layout: &ModeLayout, matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != layout.dim() || matrix.ncols() != layout.dim() {
            return Err(Error::InvalidParameter(format!(
                "density matrix must be {0}x{0}",
                layout.dim()
            )));
        }
        Ok(Self {
            layout: layout.clone(),
            matrix,
        })
    }

    /// Convex combination `Σ w_i ρ_i`; weights are used as given.
    pub fn mixture(parts: &[(f64, &DensityOperator)]) -> Result<Self> {
        let (_, first) = parts
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty mixture".into()))?;
        let mut matrix = DMatrix::zeros(first.layout.dim(), first.layout.dim());
        for (w, rho) in parts {
            if rho.layout != first.layout {
                return Err(Error::LayoutMismatch);
            }
            matrix += rho.matrix.map(|z| z * *w);
        }
        Self::from_matrix(&first.layout, matrix)
    }

    pub fn layout(&self) -> &ModeLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn purity(&self) -> f64 {
        // Tr ρ² = Σ |ρ_ij|² for Hermitian ρ.
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let herm = (&self.matrix + self.matrix.adjoint()).map(|z| z * 0.5);
        let mut vals: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
        vals.sort_by(f64::total_cmp);
        vals
    }

    /// Reduced state on `keep`, in the order given.
    pub fn partial_trace(&self, keep: &[&str]) -> Result<DensityOperator> {
        if keep.is_empty() {
            return Err(Error::InvalidParameter(
                "partial trace must keep at least one mode".into(),
            ));
        }
        let kept: Vec<usize> = keep.iter().map(|m| self.layout.mode_index(m)).collect::<Result<_>>()?;
        let reduced_layout = ModeLayout::new(keep.iter().copied(), self.layout.n_max())?;
        let traced: Vec<usize> = (0..self.layout.mode_count()).filter(|m| !kept.contains(m)).collect();

        let split = |i: usize| -> (usize, usize) {
            let occ = self.layout.occupations(i);
            let k: Vec<usize> = kept.iter().map(|&m| occ[m]).collect();
            let env = traced
                .iter()
                .fold(0, |acc, &m| acc * (self.layout.n_max() + 1) + occ[m]);
            (reduced_layout.index(&k).expect("kept occupations fit"), env)
        };
        let labels: Vec<(usize, usize)> = (0..self.layout.dim()).map(split).collect();

        let d = reduced_layout.dim();
        let mut out = DMatrix::zeros(d, d);
        for (i, &(ri, ei)) in labels.iter().enumerate() {
            for (j, &(rj, ej)) in labels.iter().enumerate() {
                if ei == ej {
                    out[(ri, rj)] += self.matrix[(i, j)];
                }
            }
        }
        Self::from_matrix(&reduced_layout, out)
    }

    /// Diagonal of the reduced operator on `modes` in the occupation basis.
    pub fn count_distribution(&self, modes: &[&str]) -> Result<CountDistribution> {
        let idx: Vec<usize> = modes.iter().map(|m| self.layout.mode_index(m)).collect::<Result<_>>()?;
        let trace = self.trace();
        if trace <= 0.0 {
            return Err(Error::InvalidParameter("density operator has zero trace".into()));
        }
        let entries = (0..self.layout.dim()).map(|i| {
            let occ: Vec<usize> = idx.iter().map(|&m| self.layout.occupation(i, m)).collect();
            (occ, (self.matrix[(i, i)].re / trace).max(0.0))
        });
        Ok(CountDistribution::from_entries(
            modes.iter().map(|m| m.to_string()).collect(),
            entries,
        ))
    }
}
