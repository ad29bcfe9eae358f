//! Validated states, gates and Kraus channels on small qubit registers.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{check_unit_interval, Error, Result};
use crate::matrix::{hermitian_eig, ComplexMatrix, HERMITIAN_TOL};

pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-10;
pub const UNITARY_TOL: f64 = 1e-10;

const MAX_QUBITS: usize = 4;

fn qubit_count(dim: usize) -> Result<usize> {
    if !dim.is_power_of_two() || dim > 1 << MAX_QUBITS {
        return Err(Error::UnsupportedDim(dim));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// A density operator on `n_qubits` qubits: Hermitian, unit trace and
/// positive semidefinite within tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
    n_qubits: usize,
}

impl DensityMatrix {
    /// Full validation, including the eigenvalue check.
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        let state = Self::checked_hermitian_unit_trace(mat)?;
        let lowest = hermitian_eig(&state.mat)?.values[0];
        if lowest < -PSD_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {lowest:e}")));
        }
        Ok(state)
    }

    /// Hermiticity and trace only. Used for outputs of completely positive
    /// maps applied to already-validated states, where positivity is
    /// inherited.
    fn checked_hermitian_unit_trace(mat: ComplexMatrix) -> Result<Self> {
        let n_qubits = qubit_count(mat.dim())?;
        let herr = mat.hermiticity_error();
        if herr > HERMITIAN_TOL {
            return Err(Error::NotHermitian(herr));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}")));
        }
        Ok(Self { mat, n_qubits })
    }

    /// Re-runs the full validation on an existing state.
    pub fn validate(&self) -> Result<()> {
        Self::new(self.mat.clone()).map(|_| ())
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1 << n_qubits;
        Self {
            mat: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
            n_qubits,
        }
    }

    /// Computational basis state `|index><index|`.
    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let dim = 1 << n_qubits;
        assert!(index < dim, "basis index out of range");
        let mut diag = vec![0.0; dim];
        diag[index] = 1.0;
        Self { mat: ComplexMatrix::from_diagonal(&diag), n_qubits }
    }

    /// Diagonal state with the given populations.
    pub fn diagonal(populations: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::from_diagonal(populations))
    }

    /// `|psi><psi|` for a normalized ket.
    pub fn pure(ket: &[Complex64]) -> Result<Self> {
        Self::new(ComplexMatrix::outer(ket))
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix {
            mat: self.mat.kron(&other.mat),
            n_qubits: self.n_qubits + other.n_qubits,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn populations(&self) -> Vec<f64> {
        self.mat.diagonal().iter().map(|z| z.re).collect()
    }

    /// Trace distance `1/2 ||a - b||_1`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch("trace distance between different registers".into()));
        }
        let diff = &self.mat - &other.mat;
        let eig = hermitian_eig(&diff)?;
        Ok(0.5 * eig.values.iter().map(|v| v.abs()).sum::<f64>())
    }
}

/// A unitary acting on `arity` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    mat: ComplexMatrix,
    arity: usize,
}

impl Gate {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        let arity = qubit_count(mat.dim())?;
        let err = mat.unitarity_error();
        if err >= UNITARY_TOL {
            return Err(Error::NotUnitary(err));
        }
        Ok(Self { mat, arity })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn identity() -> Self {
        Self { mat: ComplexMatrix::identity(2), arity: 1 }
    }

    pub fn hadamard() -> Self {
        let h = FRAC_1_SQRT_2;
        Self { mat: ComplexMatrix::from_real_rows(&[[h, h], [h, -h]]), arity: 1 }
    }

    pub fn pauli_x() -> Self {
        Self { mat: crate::pauli::Pauli::X.matrix(), arity: 1 }
    }

    pub fn pauli_y() -> Self {
        Self { mat: crate::pauli::Pauli::Y.matrix(), arity: 1 }
    }

    pub fn pauli_z() -> Self {
        Self { mat: crate::pauli::Pauli::Z.matrix(), arity: 1 }
    }

    /// Phase gate `diag(1, i)`.
    pub fn phase_s() -> Self {
        let mut m = ComplexMatrix::identity(2);
        m[(1, 1)] = Complex64::new(0.0, 1.0);
        Self { mat: m, arity: 1 }
    }

    /// Controlled NOT; the first target is the control.
    pub fn cnot() -> Self {
        Self {
            mat: ComplexMatrix::from_real_rows(&[
                [1.0, 0.0, 0.0, 0.0],
                [0.0, 1.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, 1.0],
                [0.0, 0.0, 1.0, 0.0],
            ]),
            arity: 2,
        }
    }

    pub fn adjoint(&self) -> Self {
        Self { mat: self.mat.adjoint(), arity: self.arity }
    }

    /// Whether `self = e^{i phi} other` for some global phase.
    pub fn equals_up_to_phase(&self, other: &Gate, tol: f64) -> bool {
        if self.mat.dim() != other.mat.dim() {
            return false;
        }
        let overlap = self.mat.adjoint().matmul(&other.mat).expect("same dim").trace();
        if overlap.norm() < 1e-12 {
            return false;
        }
        let phase = overlap / overlap.norm();
        self.mat.scale(phase).max_abs_diff(&other.mat) < tol
    }
}

/// General single-qubit unitary
/// `[[cos(t/2), -e^{i lam} sin(t/2)], [e^{i phi} sin(t/2), e^{i(phi+lam)} cos(t/2)]]`.
pub fn su2_gate(theta: f64, phi: f64, lam: f64) -> Gate {
    let (s, c) = (theta / 2.0).sin_cos();
    let e = |a: f64| Complex64::from_polar(1.0, a);
    let mat = ComplexMatrix::from_rows(&[
        [Complex64::new(c, 0.0), -e(lam) * s],
        [e(phi) * s, e(phi + lam) * c],
    ]);
    Gate { mat, arity: 1 }
}

/// Kraus representation of a trace-preserving channel.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    ops: Vec<ComplexMatrix>,
    label: String,
}

impl KrausChannel {
    pub fn new(ops: Vec<ComplexMatrix>, label: impl Into<String>) -> Result<Self> {
        let first = ops
            .first()
            .ok_or_else(|| Error::DimensionMismatch("channel needs at least one Kraus operator".into()))?;
        let dim = first.dim();
        if ops.iter().any(|a| a.dim() != dim) {
            return Err(Error::DimensionMismatch("Kraus operators differ in size".into()));
        }
        let sum = ops
            .iter()
            .fold(ComplexMatrix::zeros(dim), |acc, a| &acc + &(&a.adjoint() * a));
        let dev = sum.max_abs_diff(&ComplexMatrix::identity(dim));
        if dev >= 1e-10 {
            return Err(Error::NotTracePreserving(dev));
        }
        Ok(Self { ops, label: label.into() })
    }

    pub fn identity() -> Self {
        Self { ops: vec![ComplexMatrix::identity(2)], label: "identity".into() }
    }

    pub fn unitary(gate: &Gate) -> Self {
        Self { ops: vec![gate.matrix().clone()], label: "unitary".into() }
    }

    pub fn ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.ops[0].dim()
    }

    /// Applies the channel to a bare matrix of matching size.
    pub fn apply_local(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        self.ops
            .iter()
            .fold(ComplexMatrix::zeros(rho.dim()), |acc, a| &acc + &rho.conjugate_by(a).expect("dim"))
    }
}

/// Amplitude damping toward `|0>`: `A1 = |0><0| + sqrt(1-eta)|1><1|`,
/// `A2 = sqrt(eta)|0><1|`. At `eta = 0` the vanishing `A2` is dropped.
pub fn amplitude_damping(eta: f64) -> Result<KrausChannel> {
    check_unit_interval("eta", eta)?;
    let a1 = ComplexMatrix::from_real_rows(&[[1.0, 0.0], [0.0, (1.0 - eta).sqrt()]]);
    let a2 = ComplexMatrix::from_real_rows(&[[0.0, eta.sqrt()], [0.0, 0.0]]);
    let ops = if eta == 0.0 { vec![a1] } else { vec![a1, a2] };
    KrausChannel::new(ops, format!("amplitude-damping(eta={eta})"))
}

/// Lifts an operator on `targets` (first target most significant) to the
/// full `n_qubits` register.
pub fn embed_operator(op: &ComplexMatrix, n_qubits: usize, targets: &[usize]) -> Result<ComplexMatrix> {
    let arity = qubit_count(op.dim())?;
    if arity != targets.len() {
        return Err(Error::DimensionMismatch(format!(
            "{arity}-qubit operator given {} targets",
            targets.len()
        )));
    }
    for (i, &t) in targets.iter().enumerate() {
        if t >= n_qubits {
            return Err(Error::DimensionMismatch(format!("target {t} outside {n_qubits}-qubit register")));
        }
        if targets[..i].contains(&t) {
            return Err(Error::DuplicateTarget(t));
        }
    }
    if arity == n_qubits && targets.iter().enumerate().all(|(i, &t)| i == t) {
        return Ok(op.clone());
    }
    let dim = 1usize << n_qubits;
    // bit position of qubit k in the flat index (qubit 0 is most significant)
    let shift = |k: usize| n_qubits - 1 - k;
    let target_mask: usize = targets.iter().map(|&t| 1 << shift(t)).sum();
    let sub_index = |full: usize| {
        targets
            .iter()
            .fold(0usize, |acc, &t| (acc << 1) | ((full >> shift(t)) & 1))
    };
    let mut out = ComplexMatrix::zeros(dim);
    for row in 0..dim {
        for col in 0..dim {
            if row & !target_mask != col & !target_mask {
                continue;
            }
            out[(row, col)] = op[(sub_index(row), sub_index(col))];
        }
    }
    Ok(out)
}

fn check_register(rho: &DensityMatrix, targets: &[usize]) -> Result<()> {
    if let Some(&t) = targets.iter().find(|&&t| t >= rho.n_qubits) {
        return Err(Error::DimensionMismatch(format!(
            "target {t} outside {}-qubit register",
            rho.n_qubits
        )));
    }
    Ok(())
}

/// `rho -> sum_i A_i rho A_i^dag` with each single-qubit `A_i` acting on `target`.
pub fn apply_channel(ch: &KrausChannel, rho: &DensityMatrix, target: usize) -> Result<DensityMatrix> {
    if ch.dim() != 2 {
        return Err(Error::DimensionMismatch("only single-qubit channels can be embedded".into()));
    }
    check_register(rho, &[target])?;
    let mut out = ComplexMatrix::zeros(rho.dim());
    for a in ch.ops() {
        let full = embed_operator(a, rho.n_qubits, &[target])?;
        out = &out + &rho.mat.conjugate_by(&full)?;
    }
    DensityMatrix::checked_hermitian_unit_trace(out)
}

/// `rho -> U rho U^dag` with the gate acting on `targets` in order.
pub fn apply_gate(g: &Gate, rho: &DensityMatrix, targets: &[usize]) -> Result<DensityMatrix> {
    if g.arity != targets.len() {
        return Err(Error::DimensionMismatch(format!(
            "{}-qubit gate given {} targets",
            g.arity,
            targets.len()
        )));
    }
    check_register(rho, targets)?;
    let full = embed_operator(&g.mat, rho.n_qubits, targets)?;
    DensityMatrix::checked_hermitian_unit_trace(rho.mat.conjugate_by(&full)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitalityCheck {
    pub unital: bool,
    /// Spectral norm of `sum_i A_i A_i^dag - I`.
    pub deviation: f64,
}

pub fn is_unital(ch: &KrausChannel, tol: f64) -> UnitalityCheck {
    let dim = ch.dim();
    let sum = ch
        .ops()
        .iter()
        .fold(ComplexMatrix::zeros(dim), |acc, a| &acc + &(a * &a.adjoint()));
    let deviation = (&sum - &ComplexMatrix::identity(dim))
        .hermitian_op_norm()
        .expect("sum of A A^dag is Hermitian");
    UnitalityCheck { unital: deviation < tol, deviation }
}
