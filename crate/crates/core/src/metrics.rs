//! Negativity and entanglement witnesses.
//!
//! Negativity is reported for any cut. It is a faithful entanglement test
//! only for 2x2 and 2x3 systems; for larger cuts such as AB|CD a zero value
//! does not certify separability, and nothing in this module claims it does.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{hermitian_eig, partial_transpose, Bipartition, ComplexMatrix, HERMITIAN_TOL};
use crate::objects::DensityMatrix;
use crate::pauli::{pauli_decompose, PauliString};

/// Eigenvalues of the partial transpose at or above `-NEGATIVE_EIG_TOL` count as zero.
pub const NEGATIVE_EIG_TOL: f64 = 1e-10;

/// Sum of `|lambda|` over eigenvalues of `rho^{T_cut}` below `-1e-10`.
pub fn negativity(rho: &DensityMatrix, part: &Bipartition) -> Result<f64> {
    let pt = partial_transpose(rho.matrix(), part)?;
    let eig = hermitian_eig(&pt)?;
    Ok(eig
        .values
        .iter()
        .filter(|&&v| v < -NEGATIVE_EIG_TOL)
        .fold(0.0, |acc, v| acc - v))
}

/// Whether the partial transpose is positive semidefinite within tolerance.
pub fn is_ppt(rho: &DensityMatrix, part: &Bipartition) -> Result<bool> {
    let pt = partial_transpose(rho.matrix(), part)?;
    Ok(hermitian_eig(&pt)?.values[0] >= -NEGATIVE_EIG_TOL)
}

/// Hermitian observable together with its Pauli expansion.
#[derive(Debug, Clone)]
pub struct WitnessOperator {
    mat: ComplexMatrix,
    pauli_terms: Vec<(f64, PauliString)>,
}

impl WitnessOperator {
    pub fn from_pauli_terms(terms: Vec<(f64, PauliString)>) -> Result<Self> {
        let n = terms
            .first()
            .map(|(_, s)| s.n_qubits())
            .ok_or_else(|| Error::DimensionMismatch("witness needs at least one term".into()))?;
        if terms.iter().any(|(_, s)| s.n_qubits() != n) {
            return Err(Error::DimensionMismatch("Pauli strings of different lengths".into()));
        }
        let mat = expand_terms(&terms, 1 << n);
        Ok(Self { mat, pauli_terms: terms })
    }

    pub fn from_matrix(mat: ComplexMatrix) -> Result<Self> {
        let herr = mat.hermiticity_error();
        if herr > HERMITIAN_TOL {
            return Err(Error::NotHermitian(herr));
        }
        let pauli_terms = pauli_decompose(&mat, 1e-14)?;
        Ok(Self { mat, pauli_terms })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn pauli_terms(&self) -> &[(f64, PauliString)] {
        &self.pauli_terms
    }

    /// Matrix rebuilt from the Pauli expansion.
    pub fn expand(&self) -> ComplexMatrix {
        expand_terms(&self.pauli_terms, self.mat.dim())
    }
}

fn expand_terms(terms: &[(f64, PauliString)], dim: usize) -> ComplexMatrix {
    terms.iter().fold(ComplexMatrix::zeros(dim), |acc, (c, s)| {
        &acc + &s.matrix().scale_real(*c)
    })
}

/// The AB|CD witness
/// `1/8 (II - XX + YY - ZZ)_{AC} (x) (II + ZZ)_{BD}`, written on the ABCD register.
///
/// Its non-identity terms need only the settings XZXZ, YZYZ and ZZZZ.
pub fn build_witness_abcd() -> WitnessOperator {
    let ac = [(1.0, 'I', 'I'), (-1.0, 'X', 'X'), (1.0, 'Y', 'Y'), (-1.0, 'Z', 'Z')];
    let bd = [(1.0, 'I', 'I'), (1.0, 'Z', 'Z')];
    let mut terms = Vec::with_capacity(8);
    for &(c1, a, c) in &ac {
        for &(c2, b, d) in &bd {
            let s: PauliString = [a, b, c, d].iter().collect::<String>().parse().expect("valid symbols");
            terms.push((c1 * c2 / 8.0, s));
        }
    }
    WitnessOperator::from_pauli_terms(terms).expect("fixed four-qubit terms")
}

/// `(sum_k |v_k><v_k|)^{T_cut}` over every eigenvector of `rho^{T_cut}` with a
/// negative eigenvalue. Whole eigenspaces are included, so the projector does
/// not depend on the eigenbasis chosen inside a degenerate eigenspace.
pub fn witness_from_negative_subspace(rho: &DensityMatrix, part: &Bipartition) -> Result<WitnessOperator> {
    let pt = partial_transpose(rho.matrix(), part)?;
    let eig = hermitian_eig(&pt)?;
    let dim = pt.dim();
    let mut projector = ComplexMatrix::zeros(dim);
    let mut found = false;
    for (k, &value) in eig.values.iter().enumerate() {
        if value < -NEGATIVE_EIG_TOL {
            projector = &projector + &ComplexMatrix::outer(&eig.vector(k));
            found = true;
        }
    }
    if !found {
        return Err(Error::NoNegativeEigenvalues);
    }
    WitnessOperator::from_matrix(partial_transpose(&projector, part)?)
}

/// `Re tr(W rho)`; fails if the imaginary part exceeds `1e-10`.
pub fn expectation(op: &WitnessOperator, rho: &DensityMatrix) -> Result<f64> {
    let m = op.matrix();
    if m.dim() != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "operator is {0}x{0}, state is {1}x{1}",
            m.dim(),
            rho.dim()
        )));
    }
    let r = rho.matrix();
    let n = m.dim();
    let mut tr = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            tr += m[(i, k)] * r[(k, i)];
        }
    }
    if tr.im.abs() >= 1e-10 {
        return Err(Error::NonrealExpectation(tr.im));
    }
    Ok(tr.re)
}
