//! Beam-splitter and attenuation-filter realization of amplitude damping,
//! and an unbalanced-splitter model of the protocols.
//!
//! A qubit state `(1-b)|0><0| + b|1><1| + g|0><1| + g*|1><0|` sent through
//! the two-splitter, three-filter arrangement leaves, conditioned on photon
//! survival,
//!
//! ```text
//! xi [ (1-b) T a0 + b R^2 a1 ] |0><0| + xi b T a2 |1><1|
//!   + xi g T sqrt(a0 a2) |0><1| + h.c.,
//! 1/xi = (1-b) T a0 + b R^2 a1 + b T a2.
//! ```
//!
//! Setting `a0 = R^2/T`, `a1 = eta`, `a2 = a0 (1 - eta)` makes this exactly
//! the amplitude damping channel with parameter `eta`.

use num_complex::Complex64;

use crate::error::{check_unit_interval, Error, Result};
use crate::matrix::ComplexMatrix;
use crate::objects::{DensityMatrix, Gate};
use crate::protocols::{run_four_qubit, run_two_qubit, DiagonalInputParams, NoiseBlock, ProtocolResult};

pub const MEASURED_TRANSMISSION: f64 = 0.575;
pub const MEASURED_REFLECTION: f64 = 0.425;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterTransmissions {
    pub alpha0: f64,
    pub alpha1: f64,
    pub alpha2: f64,
}

/// Splitter intensity coefficients and filter transmissions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalParams {
    pub transmission: f64,
    pub reflection: f64,
    pub filters: FilterTransmissions,
}

fn check_open_unit(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange { name, value: v, range: "(0, 1)" })
    }
}

fn check_splitter(t: f64, r: f64) -> Result<()> {
    check_open_unit("T", t)?;
    check_open_unit("R", r)?;
    if t + r > 1.0 + 1e-9 {
        return Err(Error::OutOfRange { name: "T + R", value: t + r, range: "at most 1" });
    }
    Ok(())
}

impl OpticalParams {
    pub fn new(transmission: f64, reflection: f64, filters: FilterTransmissions) -> Result<Self> {
        check_splitter(transmission, reflection)?;
        check_unit_interval("alpha0", filters.alpha0)?;
        check_unit_interval("alpha1", filters.alpha1)?;
        check_unit_interval("alpha2", filters.alpha2)?;
        Ok(Self { transmission, reflection, filters })
    }

    /// Filters tuned so the arrangement realizes damping `eta`.
    pub fn calibrated(eta: f64, transmission: f64, reflection: f64) -> Result<Self> {
        let filters = calibrate_filters(eta, transmission, reflection)?;
        Self::new(transmission, reflection, filters)
    }
}

/// `a0 = R^2/T`, `a1 = eta`, `a2 = (R^2/T)(1 - eta)`.
pub fn calibrate_filters(eta: f64, transmission: f64, reflection: f64) -> Result<FilterTransmissions> {
    check_unit_interval("eta", eta)?;
    check_splitter(transmission, reflection)?;
    let alpha0 = reflection * reflection / transmission;
    if alpha0 > 1.0 {
        return Err(Error::InfeasibleCalibration(alpha0));
    }
    Ok(FilterTransmissions { alpha0, alpha1: eta, alpha2: alpha0 * (1.0 - eta) })
}

fn excited_population(rho: &DensityMatrix) -> Result<f64> {
    if rho.n_qubits() != 1 {
        return Err(Error::DimensionMismatch("optical channel acts on a single path qubit".into()));
    }
    Ok(rho.matrix()[(1, 1)].re)
}

/// Unnormalized trace `1/xi` of the filtered output: the probability that
/// the photon is not absorbed.
pub fn survival_probability(rho: &DensityMatrix, params: &OpticalParams) -> Result<f64> {
    let beta = excited_population(rho)?;
    let OpticalParams { transmission: t, reflection: r, filters: f } = *params;
    Ok((1.0 - beta) * t * f.alpha0 + beta * r * r * f.alpha1 + beta * t * f.alpha2)
}

/// The post-selected output state of the optical arrangement.
pub fn physical_channel(rho: &DensityMatrix, params: &OpticalParams) -> Result<DensityMatrix> {
    let survival = survival_probability(rho, params)?;
    if survival <= 1e-15 {
        return Err(Error::ZeroSurvival);
    }
    let xi = 1.0 / survival;
    let beta = excited_population(rho)?;
    let gamma = rho.matrix()[(0, 1)];
    let OpticalParams { transmission: t, reflection: r, filters: f } = *params;
    let coherence = gamma * (xi * t * (f.alpha0 * f.alpha2).sqrt());
    let m = ComplexMatrix::from_rows(&[
        [Complex64::new(xi * ((1.0 - beta) * t * f.alpha0 + beta * r * r * f.alpha1), 0.0), coherence],
        [coherence.conj(), Complex64::new(xi * beta * t * f.alpha2, 0.0)],
    ]);
    DensityMatrix::new(m)
}

/// Lossless completion of a splitter with intensity coefficients `T`, `R`:
/// the real reflection `[[sqrt T, sqrt R], [sqrt R, -sqrt T]] / sqrt(T+R)`.
/// It squares to the identity and equals the Hadamard at `T = R`.
pub fn unbalanced_splitter(transmission: f64, reflection: f64) -> Result<Gate> {
    check_splitter(transmission, reflection)?;
    let norm = (transmission + reflection).sqrt();
    let (a, b) = (transmission.sqrt() / norm, reflection.sqrt() / norm);
    Gate::new(ComplexMatrix::from_real_rows(&[[a, b], [b, -a]]))
}

/// Four-qubit scheme with both Hadamards replaced by unbalanced splitters.
/// Output is labelled `model:unbalanced-bs` downstream; it is a model of
/// splitter imbalance only.
pub fn imperfect_protocol(
    params: &DiagonalInputParams,
    eta: f64,
    transmission: f64,
    reflection: f64,
) -> Result<ProtocolResult> {
    let block = NoiseBlock::with_mixer(eta, unbalanced_splitter(transmission, reflection)?)?;
    run_four_qubit(&block, params, None, None)
}

/// Two-qubit scheme with unbalanced splitters.
pub fn imperfect_two_qubit(eta: f64, transmission: f64, reflection: f64) -> Result<ProtocolResult> {
    let block = NoiseBlock::with_mixer(eta, unbalanced_splitter(transmission, reflection)?)?;
    run_two_qubit(&block, None)
}
