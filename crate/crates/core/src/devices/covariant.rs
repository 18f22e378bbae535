//! Polarization-covariant amplifier.
//!
//! Each polarization mode `a_h`, `a_v` is coupled to its own vacuum idler by a
//! two-mode squeezer of equal gain `G = cosh² r`, and the idlers are traced
//! out. With one input photon the four-mode output state is
//!
//! ```text
//! c_h |φ₁⟩_h |φ₀⟩_v + c_v |φ₀⟩_h |φ₁⟩_v
//! ```
//!
//! where `φ₀ = S|0,0⟩` and `φ₁ = S|1,0⟩` are two-mode states. The count pmf
//! in any analyzer frame is assembled from `φ₀`, `φ₁` and the polarization
//! rotation blocks, which avoids materializing the four-mode space.

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{
    squeeze_for_gain, two_mode_squeeze, CountDistribution, FockStateVector, ModeLayout, RotationBlocks,
    DEFAULT_LEAKAGE_TOL,
};
use crate::states::{Polarization, PolarizationBasis};

pub const PARALLEL: &str = "parallel";
pub const PERPENDICULAR: &str = "perpendicular";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CovariantParams {
    /// Intensity gain `G ≥ 1`.
    pub gain: f64,
    /// Occupation cap of each amplified mode and each idler.
    pub n_max: usize,
    pub leakage_tol: f64,
}

impl CovariantParams {
    /// `G = m + 1`, which makes the mean output `(2m+1, m)` for a single photon.
    pub fn from_m(m: u64, n_max: usize) -> Self {
        Self {
            gain: (m + 1) as f64,
            n_max,
            leakage_tol: DEFAULT_LEAKAGE_TOL,
        }
    }

    /// Smallest cap whose thermal tail estimate `(N+2)·λ^N` sits a decade
    /// below the leakage tolerance, with `λ = (G−1)/G`. Never below 16.
    pub fn suggested_n_max(gain: f64, leakage_tol: f64) -> usize {
        let lambda = (gain - 1.0) / gain;
        if lambda <= 0.0 {
            return 16;
        }
        let target = leakage_tol / 10.0;
        let mut n = 16usize;
        while ((n + 2) as f64) * lambda.powi(n as i32) > target && n < 100_000 {
            n += 1;
        }
        n
    }
}

/// Single-photon polarization density matrix over `(h, v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarizationDensity(Matrix2<Complex64>);

impl PolarizationDensity {
    pub fn pure(p: Polarization) -> Self {
        let [h, v] = p.components();
        let psi = nalgebra::Vector2::new(Complex64::new(h, 0.0), Complex64::new(v, 0.0));
        Self(psi * psi.adjoint())
    }

    pub fn maximally_mixed() -> Self {
        Self(Matrix2::identity().map(|z: Complex64| z * 0.5))
    }

    pub fn from_matrix(m: Matrix2<Complex64>) -> Result<Self> {
        let herm = (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let trace = m.trace();
        if herm > 1e-12 || (trace.re - 1.0).abs() > 1e-12 || trace.im.abs() > 1e-12 {
            return Err(Error::InvalidParameter("not a unit-trace Hermitian matrix".into()));
        }
        let d = Self(m);
        if d.branches().iter().any(|(w, _)| *w < -1e-12) {
            return Err(Error::InvalidParameter(
                "density matrix has a negative eigenvalue".into(),
            ));
        }
        Ok(d)
    }

    /// Mixture `Σ w_i |ψ_i⟩⟨ψ_i|` of equal-weight pure polarizations.
    pub fn uniform_mixture(photons: &[Polarization]) -> Result<Self> {
        if photons.is_empty() {
            return Err(Error::InvalidParameter("empty mixture".into()));
        }
        let w = 1.0 / photons.len() as f64;
        let m = photons.iter().map(|p| Self::pure(*p).0 * Complex64::new(w, 0.0)).sum();
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &Matrix2<Complex64> {
        &self.0
    }

    /// Spectral decomposition into weighted pure input states.
    pub fn branches(&self) -> Vec<(f64, [Complex64; 2])> {
        let eig = self.0.symmetric_eigen();
        (0..2)
            .map(|k| {
                let col = eig.eigenvectors.column(k);
                (eig.eigenvalues[k], [col[0], col[1]])
            })
            .collect()
    }
}

/// Count pmf produced by the covariant amplifier, with the truncation leakage it incurred.
#[derive(Debug, Clone, PartialEq)]
pub struct CovariantOutput {
    pub pmf: CountDistribution,
    pub leakage: f64,
}

/// Prepared squeezer responses `φ₀`, `φ₁` for one set of parameters.
#[derive(Debug, Clone)]
pub struct CovariantAmplifier {
    params: CovariantParams,
    /// `⟨n, n|φ₀⟩`
    vacuum_response: Vec<f64>,
    /// `⟨n+1, n|φ₁⟩`
    photon_response: Vec<f64>,
    leakage: f64,
}

impl CovariantAmplifier {
    pub fn new(params: CovariantParams) -> Result<Self> {
        if params.n_max < 1 {
            return Err(Error::InvalidParameter("covariant truncation must be ≥ 1".into()));
        }
        let r = squeeze_for_gain(params.gain)?;
        let layout = ModeLayout::new(["amp", "idler"], params.n_max)?;
        // The combined check below is the binding one; each squeeze only
        // needs to stay inside the same budget.
        let phi0 = two_mode_squeeze(&FockStateVector::vacuum(&layout), "amp", "idler", r, params.leakage_tol)?;
        let one = FockStateVector::basis(&layout, &[1, 0])?;
        let phi1 = two_mode_squeeze(&one, "amp", "idler", r, params.leakage_tol)?;

        let n = params.n_max;
        let vacuum_response = (0..=n).map(|k| phi0.state.amplitude(&[k, k]).re).collect();
        let photon_response = (0..n).map(|k| phi1.state.amplitude(&[k + 1, k]).re).collect();
        // φ₀ and φ₁ live in different (n_amp − n_idler) sectors, so the
        // four-mode norm is the product of the two-mode norms.
        let leakage = 1.0 - (1.0 - phi0.leakage) * (1.0 - phi1.leakage);
        if leakage > params.leakage_tol {
            return Err(Error::LeakageExceeded {
                leakage,
                tolerance: params.leakage_tol,
            });
        }
        Ok(Self {
            params,
            vacuum_response,
            photon_response,
            leakage,
        })
    }

    pub fn params(&self) -> CovariantParams {
        self.params
    }

    pub fn leakage(&self) -> f64 {
        self.leakage
    }

    /// Joint `(parallel, perpendicular)` count pmf in `basis` for input `rho`,
    /// renormalized after the leakage check.
    pub fn count_distribution(&self, rho: &PolarizationDensity, basis: PolarizationBasis) -> Result<CountDistribution> {
        let blocks = RotationBlocks::new(basis.theta(), 2 * self.params.n_max);
        self.count_distribution_in(rho, &blocks)
    }

    /// [`Self::count_distribution`] for several inputs sharing one analyzer basis.
    pub fn count_distributions(
        &self,
        inputs: &[PolarizationDensity],
        basis: PolarizationBasis,
    ) -> Result<Vec<CountDistribution>> {
        let blocks = RotationBlocks::new(basis.theta(), 2 * self.params.n_max);
        inputs
            .iter()
            .map(|rho| self.count_distribution_in(rho, &blocks))
            .collect()
    }

    fn count_distribution_in(&self, rho: &PolarizationDensity, blocks: &RotationBlocks) -> Result<CountDistribution> {
        let side = 2 * self.params.n_max + 1;
        let mut grid = vec![0.0f64; side * side];
        for (weight, amps) in rho.branches() {
            if weight <= 1e-15 {
                continue;
            }
            self.accumulate_pure(amps, weight, blocks, &mut grid, side);
        }
        let entries = grid
            .iter()
            .enumerate()
            .filter(|(_, p)| **p > 0.0)
            .map(|(i, p)| (vec![i / side, i % side], *p));
        CountDistribution::from_entries(vec![PARALLEL.into(), PERPENDICULAR.into()], entries).normalized()
    }

    fn accumulate_pure(
        &self,
        amps: [Complex64; 2],
        weight: f64,
        blocks: &RotationBlocks,
        grid: &mut [f64],
        side: usize,
    ) {
        let n = self.params.n_max;
        let t = &self.vacuum_response;
        let u = &self.photon_response;
        let mut column = Vec::with_capacity(2 * n + 2);
        for idler_h in 0..=n {
            for idler_v in 0..=n {
                // Photon entered h: signal occupations (idler_h + 1, idler_v).
                let from_h = if idler_h < n {
                    amps[0] * (u[idler_h] * t[idler_v])
                } else {
                    Complex64::new(0.0, 0.0)
                };
                // Photon entered v: signal occupations (idler_h, idler_v + 1).
                let from_v = if idler_v < n {
                    amps[1] * (t[idler_h] * u[idler_v])
                } else {
                    Complex64::new(0.0, 0.0)
                };
                if from_h == Complex64::new(0.0, 0.0) && from_v == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let total = idler_h + idler_v + 1;
                let block = blocks.block(total);
                column.clear();
                column.extend((0..=total).map(|k| from_h * block[(k, idler_h + 1)] + from_v * block[(k, idler_h)]));
                for (k, amp) in column.iter().enumerate() {
                    grid[k * side + (total - k)] += weight * amp.norm_sqr();
                }
            }
        }
    }
}

/// Amplifies a single photon in state `input` and returns the exact count pmf in `basis`.
pub fn amplify_covariant(
    input: &PolarizationDensity,
    params: CovariantParams,
    basis: PolarizationBasis,
) -> Result<CovariantOutput> {
    let amp = CovariantAmplifier::new(params)?;
    Ok(CovariantOutput {
        pmf: amp.count_distribution(input, basis)?,
        leakage: amp.leakage(),
    })
}
