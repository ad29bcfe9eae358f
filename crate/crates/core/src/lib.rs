//! Density-matrix simulation of entanglement generation from classically
//! correlated inputs by a local non-unital noise element followed by CNOT
//! activation, with adversarial, optical-calibration and finite-statistics
//! analyses.
//!
//! Register convention: qubits are ordered A, B, C, D and A is the most
//! significant bit of a basis index (see [`matrix`]).

pub mod adversary;
pub mod error;
pub mod matrix;
pub mod measurement;
pub mod metrics;
pub mod objects;
pub mod optics;
pub mod optimize;
pub mod pauli;
pub mod protocols;

pub use error::{Error, Result};
pub use matrix::{hermitian_eig, kron, partial_trace, partial_transpose, Bipartition, ComplexMatrix};
pub use objects::{amplitude_damping, apply_channel, apply_gate, is_unital, su2_gate, DensityMatrix, Gate, KrausChannel};

/// Library version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
