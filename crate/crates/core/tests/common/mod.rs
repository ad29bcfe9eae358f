#![allow(dead_code)]

use nonunital::matrix::ComplexMatrix;
use nonunital::objects::{su2_gate, DensityMatrix, Gate};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub fn ginibre<R: Rng>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let data = (0..dim * dim)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    ComplexMatrix::new(dim, data).unwrap()
}

/// Random full-rank mixed state `G G^dag / tr`.
pub fn random_state<R: Rng>(rng: &mut R, n_qubits: usize) -> DensityMatrix {
    let g = ginibre(rng, 1 << n_qubits);
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(m.scale_real(1.0 / tr)).unwrap()
}

/// Random pure state.
pub fn random_pure<R: Rng>(rng: &mut R, n_qubits: usize) -> DensityMatrix {
    let dim = 1 << n_qubits;
    let v: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let v: Vec<Complex64> = v.iter().map(|z| z / norm).collect();
    DensityMatrix::pure(&v).unwrap()
}

pub fn random_hermitian<R: Rng>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let g = ginibre(rng, dim);
    (&g + &g.adjoint()).scale_real(0.5)
}

pub fn random_gate<R: Rng>(rng: &mut R) -> Gate {
    let tau = std::f64::consts::TAU;
    su2_gate(rng.random::<f64>() * tau, rng.random::<f64>() * tau, rng.random::<f64>() * tau)
}

pub fn eta_grid() -> Vec<f64> {
    (0..=20).map(|k| k as f64 * 0.05).collect()
}
