//! Naive dense-matrix reference operators built from Kronecker products.
//! Mode 0 is the most significant factor, matching the library's indexing.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use photon_link::fock::{FockStateVector, ModeLayout};
use rand::Rng;

/// Single-mode annihilation operator on `0..=cap`.
pub fn single_annihilation(cap: usize) -> DMatrix<f64> {
    let d = cap + 1;
    let mut a = DMatrix::zeros(d, d);
    for n in 1..d {
        a[(n - 1, n)] = (n as f64).sqrt();
    }
    a
}

/// Annihilation operator of mode `k` among `modes` modes, each capped at `cap`.
pub fn annihilation(modes: usize, k: usize, cap: usize) -> DMatrix<f64> {
    let id = DMatrix::<f64>::identity(cap + 1, cap + 1);
    let a = single_annihilation(cap);
    (0..modes).fold(DMatrix::from_element(1, 1, 1.0), |acc, j| {
        acc.kronecker(if j == k { &a } else { &id })
    })
}

/// `exp(r (a†b† − ab))` on a two-mode space capped at `cap`.
pub fn dense_squeezer(r: f64, cap: usize) -> DMatrix<f64> {
    let a = annihilation(2, 0, cap);
    let b = annihilation(2, 1, cap);
    let gen = a.transpose() * b.transpose() - &a * &b;
    (gen * r).exp()
}

/// `exp(θ (a_h† a_v − a_v† a_h))`: maps `a_h† → cos θ a_h† − sin θ a_v†`.
pub fn dense_rotation(modes: usize, h: usize, v: usize, theta_deg: f64, cap: usize) -> DMatrix<f64> {
    let ah = annihilation(modes, h, cap);
    let av = annihilation(modes, v, cap);
    let gen = ah.transpose() * &av - av.transpose() * &ah;
    (gen * theta_deg.to_radians()).exp()
}

pub fn apply_real(m: &DMatrix<f64>, v: &[Complex64]) -> Vec<Complex64> {
    let re = DVector::from_iterator(v.len(), v.iter().map(|z| z.re));
    let im = DVector::from_iterator(v.len(), v.iter().map(|z| z.im));
    let (re, im) = (m * re, m * im);
    re.iter().zip(im.iter()).map(|(a, b)| Complex64::new(*a, *b)).collect()
}

/// Copies `state` into a layout with the same modes and a larger cap.
pub fn embed(state: &FockStateVector, big: &ModeLayout) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); big.dim()];
    for (i, amp) in state.amplitudes().iter().enumerate() {
        let occ = state.layout().occupations(i);
        out[big.index(&occ).unwrap()] = *amp;
    }
    out
}

/// Reads the entries of a big-cap vector that fit inside `small`.
pub fn project(v: &[Complex64], big: &ModeLayout, small: &ModeLayout) -> Vec<Complex64> {
    (0..small.dim())
        .map(|i| v[big.index(&small.occupations(i)).unwrap()])
        .collect()
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Random normalized state supported on occupation tuples whose total is at most `max_total`.
pub fn random_state<R: Rng>(layout: &ModeLayout, max_total: usize, rng: &mut R) -> FockStateVector {
    let amps = (0..layout.dim())
        .map(|i| {
            if layout.occupations(i).iter().sum::<usize>() <= max_total {
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    FockStateVector::from_amplitudes(layout, amps)
        .unwrap()
        .normalized()
        .unwrap()
}
