//! Pauli operators and Pauli strings.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{kron_all, ComplexMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> ComplexMatrix {
        let o = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            Pauli::I => ComplexMatrix::identity(2),
            Pauli::X => ComplexMatrix::from_rows(&[[o, one], [one, o]]),
            Pauli::Y => ComplexMatrix::from_rows(&[[o, -i], [i, o]]),
            Pauli::Z => ComplexMatrix::from_rows(&[[one, o], [o, -one]]),
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Tensor product of single-qubit Paulis, qubit 0 leftmost.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString(pub Vec<Pauli>);

impl PauliString {
    pub fn n_qubits(&self) -> usize {
        self.0.len()
    }

    pub fn matrix(&self) -> ComplexMatrix {
        let mats: Vec<ComplexMatrix> = self.0.iter().map(|p| p.matrix()).collect();
        kron_all(&mats)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&p| p == Pauli::I)
    }

    /// All 4^n strings in lexicographic I < X < Y < Z order.
    pub fn all(n: usize) -> Vec<PauliString> {
        let mut out = vec![PauliString(Vec::with_capacity(n))];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|s| {
                    Pauli::ALL.iter().map(move |&p| {
                        let mut next = s.0.clone();
                        next.push(p);
                        PauliString(next)
                    })
                })
                .collect();
        }
        out
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            write!(f, "{}", p.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|ch| match ch.to_ascii_uppercase() {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::InvalidRecord(format!("'{other}' is not a Pauli symbol"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(PauliString)
    }
}

/// Real coefficients `c_P = tr(P M) / 2^n` of a Hermitian matrix in the
/// Pauli basis; terms with `|c_P| <= cutoff` are dropped.
pub fn pauli_decompose(m: &ComplexMatrix, cutoff: f64) -> Result<Vec<(f64, PauliString)>> {
    let dim = m.dim();
    if !dim.is_power_of_two() {
        return Err(Error::UnsupportedDim(dim));
    }
    let n = dim.trailing_zeros() as usize;
    let mut terms = Vec::new();
    for s in PauliString::all(n) {
        let coeff = s.matrix().matmul(m)?.trace() / dim as f64;
        if coeff.re.abs() > cutoff {
            terms.push((coeff.re, s));
        }
    }
    Ok(terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let s: PauliString = "xzXz".parse().unwrap();
        assert_eq!(s.to_string(), "XZXZ");
        assert!("XQ".parse::<PauliString>().is_err());
    }

    #[test]
    fn decomposition_round_trip() {
        let s: PauliString = "XY".parse().unwrap();
        let m = &s.matrix().scale_real(0.25) + &ComplexMatrix::identity(4).scale_real(0.5);
        let terms = pauli_decompose(&m, 1e-14).unwrap();
        assert_eq!(terms.len(), 2);
        assert_eq!(terms[0], (0.5, "II".parse().unwrap()));
        assert_eq!(terms[1], (0.25, s));
    }

    #[test]
    fn all_strings() {
        let all = PauliString::all(2);
        assert_eq!(all.len(), 16);
        assert_eq!(all[0].to_string(), "II");
        assert_eq!(all[15].to_string(), "ZZ");
    }
}
