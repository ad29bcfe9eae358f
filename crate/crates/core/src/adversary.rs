//! Adversarial minimization of the output negativity over local unitaries
//! inserted just before the CNOT stage.
//!
//! Each gate is parameterized by [`su2_gate`] angles (global phase dropped).
//! The search is multi-start Nelder–Mead with starts drawn uniformly from
//! `[0, 2pi)^d`; restarts run in parallel on independent seeded streams and
//! the reduction to the best outcome does not depend on completion order.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{check_unit_interval, Result};
use crate::metrics::negativity;
use crate::objects::{apply_gate, su2_gate, DensityMatrix, Gate};
use crate::optimize::{nelder_mead, NelderMeadOptions};
use crate::protocols::{
    activate_four_qubit, four_qubit_cut, noise_block, run_two_qubit, DiagonalInputParams, NoiseBlock,
};

/// Restarts whose minima agree with the best one within this count toward convergence.
pub const AGREEMENT_TOL: f64 = 1e-6;
pub const MIN_AGREEING_RESTARTS: usize = 3;
const POLISH_ROUNDS: usize = 8;

#[derive(Debug, Clone, Copy)]
pub struct SearchSettings {
    pub restarts: usize,
    pub seed: u64,
    pub max_evals_per_start: usize,
    pub spread_tol: f64,
}

impl SearchSettings {
    pub fn new(restarts: usize, seed: u64) -> Self {
        Self { restarts: restarts.max(1), seed, max_evals_per_start: 2000, spread_tol: 1e-10 }
    }
}

impl Default for SearchSettings {
    fn default() -> Self {
        Self::new(32, 0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdversaryOutcome {
    pub min_negativity: f64,
    /// `(theta, phi, lam)` for A, followed by the triple for B in the
    /// four-qubit search.
    pub best_angles: Vec<f64>,
    pub restarts_used: usize,
    pub converged: bool,
}

impl AdversaryOutcome {
    /// Gates encoded by `best_angles`, in register order.
    pub fn gates(&self) -> Vec<Gate> {
        self.best_angles.chunks(3).map(|a| su2_gate(a[0], a[1], a[2])).collect()
    }
}

/// Negativity of the two-qubit output with `su2_gate(angles)` applied to A.
pub fn attacked_negativity_2q(block: &NoiseBlock, angles: &[f64]) -> Result<f64> {
    let eve = su2_gate(angles[0], angles[1], angles[2]);
    Ok(run_two_qubit(block, Some(&eve))?.negativity)
}

/// Negativity of the four-qubit output for a post-noise AB state and
/// adversary angles `[A triple, B triple]`.
pub fn attacked_negativity_4q(rho_ab: &DensityMatrix, angles: &[f64]) -> Result<f64> {
    let va = su2_gate(angles[0], angles[1], angles[2]);
    let vb = su2_gate(angles[3], angles[4], angles[5]);
    let rho = apply_gate(&va, rho_ab, &[0])?;
    let rho = apply_gate(&vb, &rho, &[1])?;
    negativity(&activate_four_qubit(&rho)?, &four_qubit_cut())
}

fn multi_start<F>(dims: usize, settings: &SearchSettings, objective: F) -> AdversaryOutcome
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let opts = NelderMeadOptions {
        initial_step: 0.5,
        max_evals: settings.max_evals_per_start,
        f_spread_tol: settings.spread_tol,
    };
    let restarts = settings.restarts.max(1);
    let runs: Vec<(Vec<f64>, f64)> = (0..restarts)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
            rng.set_stream(k as u64);
            let x0: Vec<f64> = (0..dims).map(|_| rng.random::<f64>() * TAU).collect();
            let r = nelder_mead(&objective, &x0, &opts);
            (r.x, r.f)
        })
        .collect();

    // doing nothing is always available to the adversary
    let idle = vec![0.0; dims];
    let idle_value = objective(&idle);

    let (best_x, best_f) = runs
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(x, f)| (x.clone(), *f))
        .expect("at least one restart");
    let agreeing = runs.iter().filter(|(_, f)| *f <= best_f + AGREEMENT_TOL).count();

    // restart from the incumbent with a fresh, smaller simplex until it stops moving
    let polish_opts = NelderMeadOptions { initial_step: 0.05, ..opts };
    let (mut best_x, mut best_f) = (best_x, best_f);
    for _ in 0..POLISH_ROUNDS {
        let r = nelder_mead(&objective, &best_x, &polish_opts);
        if r.f >= best_f - settings.spread_tol {
            break;
        }
        best_x = r.x;
        best_f = r.f;
    }
    let (best_angles, min_negativity) = if idle_value < best_f { (idle, idle_value) } else { (best_x, best_f) };

    AdversaryOutcome {
        min_negativity: min_negativity.max(0.0),
        best_angles: best_angles.into_iter().map(|a| a.rem_euclid(TAU)).collect(),
        restarts_used: restarts,
        converged: agreeing >= MIN_AGREEING_RESTARTS,
    }
}

/// Minimizes the two-qubit output negativity over a gate on A.
pub fn minimize_negativity_2q(eta: f64, settings: &SearchSettings) -> Result<AdversaryOutcome> {
    check_unit_interval("eta", eta)?;
    let block = noise_block(eta)?;
    Ok(multi_start(3, settings, |x| {
        attacked_negativity_2q(&block, x).unwrap_or(f64::INFINITY)
    }))
}

/// Minimizes the AB|CD output negativity over gates on A and B.
pub fn minimize_negativity_4q(
    params: &DiagonalInputParams,
    eta: f64,
    settings: &SearchSettings,
) -> Result<AdversaryOutcome> {
    check_unit_interval("eta", eta)?;
    let rho_ab = noise_block(eta)?.apply(&params.state(), 0)?;
    Ok(multi_start(6, settings, |x| {
        attacked_negativity_4q(&rho_ab, x).unwrap_or(f64::INFINITY)
    }))
}
