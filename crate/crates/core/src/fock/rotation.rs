use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::density::DensityOperator;
use super::state::FockStateVector;
use crate::error::{Error, Result};

/// Mass below this is treated as rounding noise when checking whether a
/// rotation left the truncated space.
const ROTATION_SPILL_EPS: f64 = 1e-20;

/// `(cos θ, sin θ)` for an angle in degrees, exact at multiples of 90°.
pub fn cos_sin_deg(theta_deg: f64) -> (f64, f64) {
    let reduced = theta_deg.rem_euclid(360.0);
    if reduced == 0.0 {
        (1.0, 0.0)
    } else if reduced == 90.0 {
        (0.0, 1.0)
    } else if reduced == 180.0 {
        (-1.0, 0.0)
    } else if reduced == 270.0 {
        (0.0, -1.0)
    } else {
        let rad = reduced.to_radians();
        (rad.cos(), rad.sin())
    }
}

/// Polarization rotation restricted to each fixed-photon-number block.
///
/// The rotation relabels the `(h, v)` mode pair as the pair parallel and
/// perpendicular to `theta`: `a_θ = a_h cos θ + a_v sin θ`,
/// `a_⊥ = −a_h sin θ + a_v cos θ`. Block `N` maps `|j, N−j⟩` (j photons on
/// `h`) to `Σ_k R[k, j] |k, N−k⟩` in the rotated labelling.
///
/// Each block is `exp(θ K)` with `K = a_h†a_v − a_v†a_h`. Conjugating `iK` by
/// `diag(iʲ)` gives a real symmetric tridiagonal matrix whose eigenvalues are
/// exactly `N − 2m`, so the block is assembled from its eigenvectors with
/// exact phases. Building blocks by repeated creation operators instead
/// loses orthogonality geometrically in `N`.
#[derive(Debug, Clone)]
pub struct RotationBlocks {
    theta_deg: f64,
    blocks: Vec<DMatrix<f64>>,
}

impl RotationBlocks {
    pub fn new(theta_deg: f64, max_total: usize) -> Self {
        let (c, s) = cos_sin_deg(theta_deg);
        let theta = s.atan2(c);
        let blocks = (0..=max_total).map(|n| block(n, theta, c, s)).collect();
        Self { theta_deg, blocks }
    }

    pub fn theta_deg(&self) -> f64 {
        self.theta_deg
    }

    pub fn max_total(&self) -> usize {
        self.blocks.len() - 1
    }

    /// Block for total photon number `n`; column `j` is the image of `|j, n−j⟩`.
    pub fn block(&self, n: usize) -> &DMatrix<f64> {
        &self.blocks[n]
    }
}

fn block(n: usize, theta: f64, c: f64, s: f64) -> DMatrix<f64> {
    if n == 0 {
        return DMatrix::from_element(1, 1, 1.0);
    }
    if s == 0.0 || c == 0.0 {
        return quarter_turn(n, c, s);
    }
    let d = n + 1;
    let mut t = DMatrix::<f64>::zeros(d, d);
    for j in 0..n {
        let b = (((j + 1) * (n - j)) as f64).sqrt();
        t[(j + 1, j)] = b;
        t[(j, j + 1)] = b;
    }
    let eig = t.symmetric_eigen();
    let w = &eig.eigenvectors;
    // exp(θK)[k, j] = i^(k−j) Σ_m W[k,m] W[j,m] e^(−iθλ_m), with λ_m ∈ {n, n−2, …, −n}.
    let (mut wc, mut ws) = (w.clone(), w.clone());
    for (m, l) in eig.eigenvalues.iter().enumerate() {
        let exact = ((l + n as f64) / 2.0).round() * 2.0 - n as f64;
        wc.column_mut(m).scale_mut((theta * exact).cos());
        ws.column_mut(m).scale_mut((theta * exact).sin());
    }
    let (re, im) = (&wc * w.transpose(), -(&ws * w.transpose()));
    // Multiply re + i·im by i^(k−j) and keep the real part.
    DMatrix::from_fn(d, d, |k, j| match (k as i64 - j as i64).rem_euclid(4) {
        0 => re[(k, j)],
        1 => -im[(k, j)],
        2 => -re[(k, j)],
        _ => im[(k, j)],
    })
}

/// Rotations by multiples of 90° are signed permutations.
fn quarter_turn(n: usize, c: f64, s: f64) -> DMatrix<f64> {
    let d = n + 1;
    let mut out = DMatrix::zeros(d, d);
    for j in 0..d {
        if s == 0.0 {
            // c = ±1: |j, n−j⟩ → c^n |j, n−j⟩
            out[(j, j)] = c.powi(n as i32);
        } else {
            // a_h† → −s a_v†, a_v† → s a_h†: |j, n−j⟩ → (−s)^j s^(n−j) |n−j, j⟩
            out[(n - j, j)] = (-s).powi(j as i32) * s.powi((n - j) as i32);
        }
    }
    out
}

/// Basis change of a polarization mode pair into the frame at `theta`.
///
/// After rotation, counting `mode_h` measures photons polarized along
/// `theta` and `mode_v` those along `theta + 90°`. Rotations compose
/// additively. Fails with [`Error::TruncationOverflow`] if any amplitude
/// would need an occupation above the cap.
pub trait PolarizationRotation: Sized {
    fn rotate_polarization(&self, mode_h: &str, mode_v: &str, theta_deg: f64) -> Result<Self>;
}

impl PolarizationRotation for FockStateVector {
    fn rotate_polarization(&self, mode_h: &str, mode_v: &str, theta_deg: f64) -> Result<Self> {
        rotate_amplitudes(self, mode_h, mode_v, theta_deg)
    }
}

impl PolarizationRotation for DensityOperator {
    fn rotate_polarization(&self, mode_h: &str, mode_v: &str, theta_deg: f64) -> Result<Self> {
        // U ρ U† column by column, then row by row through the adjoint.
        let layout = self.layout();
        let rotate_columns = |m: &DMatrix<Complex64>| -> Result<DMatrix<Complex64>> {
            let mut out = DMatrix::zeros(m.nrows(), m.ncols());
            for j in 0..m.ncols() {
                let col = FockStateVector::from_amplitudes(layout, m.column(j).iter().copied().collect())?;
                let rotated = rotate_amplitudes(&col, mode_h, mode_v, theta_deg)?;
                out.column_mut(j).copy_from_slice(rotated.amplitudes());
            }
            Ok(out)
        };
        let half = rotate_columns(self.matrix())?;
        let full = rotate_columns(&half.adjoint())?.adjoint();
        DensityOperator::from_matrix(layout, full)
    }
}

fn rotate_amplitudes(state: &FockStateVector, mode_h: &str, mode_v: &str, theta_deg: f64) -> Result<FockStateVector> {
    if !theta_deg.is_finite() {
        return Err(Error::InvalidParameter("rotation angle must be finite".into()));
    }
    let layout = state.layout();
    let h = layout.mode_index(mode_h)?;
    let v = layout.mode_index(mode_v)?;
    if h == v {
        return Err(Error::InvalidParameter("rotation needs two distinct modes".into()));
    }
    let n_max = layout.n_max();
    let (sh, sv) = (layout.stride(h), layout.stride(v));
    let blocks = RotationBlocks::new(theta_deg, 2 * n_max);
    let mut out = FockStateVector::zeros(layout);
    let mut spill: HashMap<(usize, usize), Complex64> = HashMap::new();
    {
        let target = out.amplitudes_mut();
        for (i, amp) in state.populated() {
            let (nh, nv) = (layout.occupation(i, h), layout.occupation(i, v));
            let total = nh + nv;
            let base = i - nh * sh - nv * sv;
            let block = blocks.block(total);
            for k in 0..=total {
                let r = block[(k, nh)];
                if r == 0.0 {
                    continue;
                }
                if k <= n_max && total - k <= n_max {
                    target[base + k * sh + (total - k) * sv] += amp * r;
                } else {
                    *spill.entry((base, k + (total << 32))).or_default() += amp * r;
                }
            }
        }
    }
    let spilled: f64 = spill.values().map(|a| a.norm_sqr()).sum();
    if spilled > ROTATION_SPILL_EPS * state.norm_sqr().max(1.0) {
        return Err(Error::TruncationOverflow {
            mode: format!("{mode_h}/{mode_v}"),
            n_max,
        });
    }
    Ok(out)
}
