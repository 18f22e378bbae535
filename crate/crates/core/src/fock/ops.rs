use num_complex::Complex64;

use super::layout::ModeLayout;
use super::state::FockStateVector;
use crate::error::{Error, Result};

/// Default bound on the squared-norm deficit tolerated after a truncated evolution.
pub const DEFAULT_LEAKAGE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Creation,
    Annihilation,
}

/// Raw image of `state` under `a†` or `a` on `mode`, with the usual `√n`
/// factors. The result is not renormalized.
pub fn apply_ladder(state: &FockStateVector, mode: &str, kind: Ladder) -> Result<FockStateVector> {
    let layout = state.layout();
    let m = layout.mode_index(mode)?;
    let stride = layout.stride(m);
    let mut out = FockStateVector::zeros(layout);
    let target = out.amplitudes_mut();
    for (i, amp) in state.populated() {
        let n = layout.occupation(i, m);
        match kind {
            Ladder::Creation => {
                if n == layout.n_max() {
                    return Err(Error::TruncationOverflow {
                        mode: mode.to_string(),
                        n_max: layout.n_max(),
                    });
                }
                target[i + stride] += amp * ((n + 1) as f64).sqrt();
            }
            Ladder::Annihilation => {
                if n > 0 {
                    target[i - stride] += amp * (n as f64).sqrt();
                }
            }
        }
    }
    Ok(out)
}

/// Applies `Σ_k c_k a_k†` for a linear combination of creation operators.
pub fn apply_creation_combination(state: &FockStateVector, terms: &[(&str, f64)]) -> Result<FockStateVector> {
    combine(state, terms, Ladder::Creation)
}

/// Applies `Σ_k c_k a_k` for a linear combination of annihilation operators.
pub fn apply_annihilation_combination(state: &FockStateVector, terms: &[(&str, f64)]) -> Result<FockStateVector> {
    combine(state, terms, Ladder::Annihilation)
}

fn combine(state: &FockStateVector, terms: &[(&str, f64)], kind: Ladder) -> Result<FockStateVector> {
    let mut acc = FockStateVector::zeros(state.layout());
    for &(mode, c) in terms {
        let image = apply_ladder(state, mode, kind)?;
        acc = acc.add(&image.scaled(Complex64::new(c, 0.0)))?;
    }
    Ok(acc)
}

/// Result of a truncated evolution: the state projected onto the truncated
/// space and the squared norm that fell outside it, relative to the input norm.
#[derive(Debug, Clone)]
pub struct Evolved {
    pub state: FockStateVector,
    pub leakage: f64,
}

/// Applies the two-mode squeezer `exp(r (a†b† − ab))` to `state`.
///
/// The operator is applied exactly through its normal-ordered factorization
/// `exp(t a†b†) · cosh(r)^-(n_a + n_b + 1) · exp(−t ab)` with `t = tanh r`,
/// so the output is the exact evolved state projected onto the truncated
/// space. Fails with [`Error::LeakageExceeded`] when the lost squared norm
/// exceeds `leakage_tol`.
pub fn two_mode_squeeze(
    state: &FockStateVector,
    mode_a: &str,
    mode_b: &str,
    r: f64,
    leakage_tol: f64,
) -> Result<Evolved> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "squeezing r must be finite and ≥ 0, got {r}"
        )));
    }
    let layout = state.layout();
    let a = layout.mode_index(mode_a)?;
    let b = layout.mode_index(mode_b)?;
    if a == b {
        return Err(Error::InvalidParameter("squeezer needs two distinct modes".into()));
    }
    if r == 0.0 {
        return Ok(Evolved {
            state: state.clone(),
            leakage: 0.0,
        });
    }
    let t = r.tanh();
    let inv_cosh = 1.0 / r.cosh();
    let input_norm = state.norm_sqr();

    // exp(−t ab), then the diagonal cosh factor.
    let mut lowered = FockStateVector::zeros(layout);
    {
        let out = lowered.amplitudes_mut();
        for (i, amp) in state.populated() {
            let (na, nb) = (layout.occupation(i, a), layout.occupation(i, b));
            let step = layout.stride(a) + layout.stride(b);
            let mut coeff = 1.0;
            for k in 0..=na.min(nb) {
                if k > 0 {
                    coeff *= -t / k as f64 * (((na - k + 1) * (nb - k + 1)) as f64).sqrt();
                }
                let n_total = na + nb - 2 * k;
                out[i - k * step] += amp * coeff * inv_cosh.powi(n_total as i32 + 1);
            }
        }
    }

    // exp(t a†b†), dropping terms beyond the cap.
    let mut raised = FockStateVector::zeros(layout);
    {
        let out = raised.amplitudes_mut();
        let n_max = layout.n_max();
        for (i, amp) in lowered.populated() {
            let (na, nb) = (layout.occupation(i, a), layout.occupation(i, b));
            let step = layout.stride(a) + layout.stride(b);
            let mut coeff = 1.0;
            for k in 0..=(n_max - na.max(nb)) {
                if k > 0 {
                    coeff *= t / k as f64 * (((na + k) * (nb + k)) as f64).sqrt();
                }
                out[i + k * step] += amp * coeff;
            }
        }
    }

    let leakage = if input_norm > 0.0 {
        ((input_norm - raised.norm_sqr()) / input_norm).max(0.0)
    } else {
        0.0
    };
    if leakage > leakage_tol {
        return Err(Error::LeakageExceeded {
            leakage,
            tolerance: leakage_tol,
        });
    }
    Ok(Evolved { state: raised, leakage })
}

/// Squeezing parameter `r` giving intensity gain `G = cosh² r`.
pub fn squeeze_for_gain(gain: f64) -> Result<f64> {
    if !(gain.is_finite() && gain >= 1.0) {
        return Err(Error::InvalidParameter(format!("gain must be ≥ 1, got {gain}")));
    }
    Ok(gain.sqrt().acosh())
}

/// Single-photon occupation states over a layout, used by tests and the
/// state builders: `|1⟩` on `mode`, vacuum elsewhere.
pub fn single_photon(layout: &ModeLayout, mode: &str) -> Result<FockStateVector> {
    apply_ladder(&FockStateVector::vacuum(layout), mode, Ladder::Creation)
}
