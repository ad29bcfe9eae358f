//! The two- and four-qubit activation circuits and their closed-form
//! predictions.
//!
//! Two-qubit register: A = 0, C = 1. Input `I/2 (x) |0><0|`, noise block on
//! A, optional adversary gate on A, CNOT A -> C; negativity across A|C.
//!
//! Four-qubit register: A = 0, B = 1, C = 2, D = 3. Input
//! `rho^d_AB (x) |00><00|_CD`, noise block on A, optional adversary gates on
//! A and B, CNOTs A -> C and B -> D; negativity across AB|CD.

use num_complex::Complex64;

use crate::error::{check_unit_interval, Error, Result};
use crate::matrix::{Bipartition, ComplexMatrix};
use crate::metrics::{build_witness_abcd, expectation, negativity};
use crate::objects::{amplitude_damping, apply_channel, apply_gate, DensityMatrix, Gate, KrausChannel};
use crate::pauli::Pauli;

pub const QUBIT_A: usize = 0;
pub const QUBIT_B: usize = 1;
pub const QUBIT_C: usize = 2;
pub const QUBIT_D: usize = 3;

/// Diagonal two-qubit input
/// `p sigma (x) |0><0| + (1-p) tau (x) |1><1|` with
/// `sigma = q|0><0| + (1-q)|1><1|`, `tau = r|0><0| + (1-r)|1><1|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagonalInputParams {
    pub p: f64,
    pub q: f64,
    pub r: f64,
}

impl Default for DiagonalInputParams {
    /// The experimental input `p|00><00| + (1-p)|11><11|` with `p = 0.5`.
    fn default() -> Self {
        Self { p: 0.5, q: 1.0, r: 0.0 }
    }
}

impl DiagonalInputParams {
    pub fn new(p: f64, q: f64, r: f64) -> Result<Self> {
        check_unit_interval("p", p)?;
        check_unit_interval("q", q)?;
        check_unit_interval("r", r)?;
        Ok(Self { p, q, r })
    }

    /// The input state on AB.
    pub fn state(&self) -> DensityMatrix {
        let Self { p, q, r } = *self;
        // basis |AB>: 00, 01, 10, 11
        DensityMatrix::diagonal(&[p * q, (1.0 - p) * r, p * (1.0 - q), (1.0 - p) * (1.0 - r)])
            .expect("unit-interval parameters give a valid diagonal state")
    }

    /// Whether the input is a product state (`p in {0,1}` or `q = r`).
    pub fn is_factorized(&self) -> bool {
        self.p == 0.0 || self.p == 1.0 || self.q == self.r
    }
}

/// `mixer . Lambda_eta . mixer` on one qubit. The mixer is the Hadamard for
/// the ideal protocol.
#[derive(Debug, Clone)]
pub struct NoiseBlock {
    eta: f64,
    mixer: Gate,
    damping: KrausChannel,
}

impl NoiseBlock {
    pub fn with_mixer(eta: f64, mixer: Gate) -> Result<Self> {
        if mixer.arity() != 1 {
            return Err(Error::DimensionMismatch("noise block mixer must act on one qubit".into()));
        }
        Ok(Self { eta, mixer, damping: amplitude_damping(eta)? })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn apply(&self, rho: &DensityMatrix, target: usize) -> Result<DensityMatrix> {
        let rho = apply_gate(&self.mixer, rho, &[target])?;
        let rho = apply_channel(&self.damping, &rho, target)?;
        apply_gate(&self.mixer, &rho, &[target])
    }
}

/// `H Lambda_eta H`.
pub fn noise_block(eta: f64) -> Result<NoiseBlock> {
    NoiseBlock::with_mixer(eta, Gate::hadamard())
}

/// Gates chosen by the adversary, inserted just before the CNOT stage.
#[derive(Debug, Clone, PartialEq)]
pub struct AdversaryGates {
    pub on_a: Option<Gate>,
    pub on_b: Option<Gate>,
}

#[derive(Debug, Clone)]
pub struct ProtocolResult {
    pub rho_out: DensityMatrix,
    pub negativity: f64,
    /// Expectation of the AB|CD witness; four-qubit runs only.
    pub witness_expectation: Option<f64>,
    pub eta: f64,
    pub adversary_gates: Option<AdversaryGates>,
}

pub fn two_qubit_cut() -> Bipartition {
    Bipartition::qubits(2, &[0]).expect("fixed cut")
}

pub fn four_qubit_cut() -> Bipartition {
    Bipartition::qubits(4, &[QUBIT_A, QUBIT_B]).expect("fixed cut")
}

/// State of A entering the CNOT in the two-qubit scheme.
pub fn two_qubit_pre_cnot(block: &NoiseBlock, eve: Option<&Gate>) -> Result<DensityMatrix> {
    let rho = block.apply(&DensityMatrix::maximally_mixed(1), 0)?;
    match eve {
        Some(g) => apply_gate(g, &rho, &[0]),
        None => Ok(rho),
    }
}

/// Runs the two-qubit scheme for an arbitrary noise block.
pub fn run_two_qubit(block: &NoiseBlock, eve: Option<&Gate>) -> Result<ProtocolResult> {
    let a = two_qubit_pre_cnot(block, eve)?;
    let rho = a.tensor(&DensityMatrix::basis(1, 0));
    let rho_out = apply_gate(&Gate::cnot(), &rho, &[0, 1])?;
    let negativity = negativity(&rho_out, &two_qubit_cut())?;
    Ok(ProtocolResult {
        rho_out,
        negativity,
        witness_expectation: None,
        eta: block.eta(),
        adversary_gates: eve.map(|g| AdversaryGates { on_a: Some(g.clone()), on_b: None }),
    })
}

pub fn two_qubit_protocol(eta: f64, eve: Option<&Gate>) -> Result<ProtocolResult> {
    run_two_qubit(&noise_block(eta)?, eve)
}

/// AB state entering the CNOT stage of the four-qubit scheme.
pub fn four_qubit_pre_cnot(
    block: &NoiseBlock,
    params: &DiagonalInputParams,
    eve_a: Option<&Gate>,
    eve_b: Option<&Gate>,
) -> Result<DensityMatrix> {
    let mut rho = block.apply(&params.state(), 0)?;
    if let Some(g) = eve_a {
        rho = apply_gate(g, &rho, &[0])?;
    }
    if let Some(g) = eve_b {
        rho = apply_gate(g, &rho, &[1])?;
    }
    Ok(rho)
}

/// Appends `|00><00|_CD` and applies CNOT A -> C and B -> D.
pub fn activate_four_qubit(rho_ab: &DensityMatrix) -> Result<DensityMatrix> {
    if rho_ab.n_qubits() != 2 {
        return Err(Error::DimensionMismatch("activation expects a two-qubit AB state".into()));
    }
    let rho = rho_ab.tensor(&DensityMatrix::basis(2, 0));
    let rho = apply_gate(&Gate::cnot(), &rho, &[QUBIT_A, QUBIT_C])?;
    apply_gate(&Gate::cnot(), &rho, &[QUBIT_B, QUBIT_D])
}

/// Runs the four-qubit scheme for an arbitrary noise block.
pub fn run_four_qubit(
    block: &NoiseBlock,
    params: &DiagonalInputParams,
    eve_a: Option<&Gate>,
    eve_b: Option<&Gate>,
) -> Result<ProtocolResult> {
    let rho_ab = four_qubit_pre_cnot(block, params, eve_a, eve_b)?;
    let rho_out = activate_four_qubit(&rho_ab)?;
    let negativity = negativity(&rho_out, &four_qubit_cut())?;
    let witness = expectation(&build_witness_abcd(), &rho_out)?;
    let adversary_gates = (eve_a.is_some() || eve_b.is_some()).then(|| AdversaryGates {
        on_a: eve_a.cloned(),
        on_b: eve_b.cloned(),
    });
    Ok(ProtocolResult {
        rho_out,
        negativity,
        witness_expectation: Some(witness),
        eta: block.eta(),
        adversary_gates,
    })
}

pub fn four_qubit_protocol(
    params: &DiagonalInputParams,
    eta: f64,
    eve_a: Option<&Gate>,
    eve_b: Option<&Gate>,
) -> Result<ProtocolResult> {
    run_four_qubit(&noise_block(eta)?, params, eve_a, eve_b)
}

/// Output negativity predicted from the state entering the CNOT stage:
/// `|rho_01|` for one qubit, `sum_{i<j} |rho_ij|` for two.
pub fn analytic_negativity_offdiag(rho_in: &DensityMatrix) -> Result<f64> {
    let m = rho_in.matrix();
    match m.dim() {
        2 | 4 => {
            let n = m.dim();
            Ok((0..n)
                .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
                .map(|(i, j)| m[(i, j)].norm())
                .sum())
        }
        d => Err(Error::UnsupportedDim(d)),
    }
}

/// `1/2 (I + eta X + (2x - 1) sqrt(1 - eta) Z)`: the noise block applied to
/// `x|0><0| + (1-x)|1><1|`.
pub fn rho_prime_a(x: f64, eta: f64) -> ComplexMatrix {
    let z = (2.0 * x - 1.0) * (1.0 - eta).sqrt();
    let half = |v: f64| Complex64::new(0.5 * v, 0.0);
    ComplexMatrix::from_rows(&[[half(1.0 + z), half(eta)], [half(eta), half(1.0 - z)]])
}

/// Closed form of the AB state after the noise block on A:
/// `p rho'_A(q) (x) |0><0| + (1-p) rho'_A(r) (x) |1><1|`.
pub fn rho_prime_ab(params: &DiagonalInputParams, eta: f64) -> Result<DensityMatrix> {
    check_unit_interval("eta", eta)?;
    let ket0 = ComplexMatrix::from_diagonal(&[1.0, 0.0]);
    let ket1 = ComplexMatrix::from_diagonal(&[0.0, 1.0]);
    let m = &rho_prime_a(params.q, eta).kron(&ket0).scale_real(params.p)
        + &rho_prime_a(params.r, eta).kron(&ket1).scale_real(1.0 - params.p);
    DensityMatrix::new(m)
}

/// `[rho'_A(q), rho'_A(r)]` computed by direct matrix products.
pub fn commutator_matrix(params: &DiagonalInputParams, eta: f64) -> Result<ComplexMatrix> {
    check_unit_interval("eta", eta)?;
    rho_prime_a(params.q, eta).commutator(&rho_prime_a(params.r, eta))
}

/// `i eta sqrt(1 - eta) (q - r) Y`.
pub fn commutator_closed_form(params: &DiagonalInputParams, eta: f64) -> ComplexMatrix {
    let k = eta * (1.0 - eta).sqrt() * (params.q - params.r);
    Pauli::Y.matrix().scale(Complex64::new(0.0, k))
}

/// Spectral norm of `[rho'_A(q), rho'_A(r)]`, equal to
/// `eta sqrt(1 - eta) |q - r|`. Zero exactly when the post-noise AB state is
/// diagonal in a product basis.
pub fn commutator_deviation(params: &DiagonalInputParams, eta: f64) -> Result<f64> {
    let comm = commutator_matrix(params, eta)?;
    debug_assert!(comm.max_abs_diff(&commutator_closed_form(params, eta)) < 1e-12);
    // the commutator of Hermitian matrices is anti-Hermitian; -i C is Hermitian
    comm.scale(Complex64::new(0.0, -1.0)).hermitian_op_norm()
}

/// Output of the four-qubit scheme for the input `p|00><00| + (1-p)|11><11|`
/// in block form `p rho+_AC (x) |00><00|_BD + (1-p) rho-_AC (x) |11><11|_BD`,
/// laid out on the ABCD register.
pub fn block_form_output(p: f64, eta: f64) -> Result<DensityMatrix> {
    check_unit_interval("p", p)?;
    check_unit_interval("eta", eta)?;
    let root = (1.0 - eta).sqrt();
    // rho_pm restricted to the AC support {|00>, |11>}
    let block = |sign: f64| [[0.5 * (1.0 + sign * root), 0.5 * eta], [0.5 * eta, 0.5 * (1.0 - sign * root)]];
    let idx = |a: usize, b: usize| (a << 3) | (b << 2) | (a << 1) | b;
    let mut m = ComplexMatrix::zeros(16);
    for (b, weight, sign) in [(0usize, p, 1.0), (1usize, 1.0 - p, -1.0)] {
        let rho = block(sign);
        for a in 0..2 {
            for a2 in 0..2 {
                m[(idx(a, b), idx(a2, b))] = Complex64::new(weight * rho[a][a2], 0.0);
            }
        }
    }
    DensityMatrix::new(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::witness_from_negative_subspace;
    use crate::matrix::{hermitian_eig, partial_trace, partial_transpose};

    fn eta_grid() -> impl Iterator<Item = f64> {
        (0..=20).map(|k| k as f64 * 0.05)
    }

    #[test]
    fn noise_block_examples() {
        let mixed = DensityMatrix::maximally_mixed(1);
        let rho = DensityMatrix::new(ComplexMatrix::from_real_rows(&[[0.3, 0.1], [0.1, 0.7]])).unwrap();
        let id = noise_block(0.0).unwrap().apply(&rho, 0).unwrap();
        assert!(id.matrix().max_abs_diff(rho.matrix()) < 1e-15);
        for eta in eta_grid() {
            let out = noise_block(eta).unwrap().apply(&mixed, 0).unwrap();
            let want = ComplexMatrix::from_real_rows(&[[0.5, eta / 2.0], [eta / 2.0, 0.5]]);
            assert!(out.matrix().max_abs_diff(&want) < 1e-15, "eta={eta}");
        }
        assert!(noise_block(1.2).is_err());
    }

    #[test]
    fn two_qubit_examples() {
        assert_eq!(two_qubit_protocol(0.0, None).unwrap().negativity, 0.0);
        for eta in eta_grid() {
            let r = two_qubit_protocol(eta, None).unwrap();
            assert!((r.negativity - eta / 2.0).abs() < 1e-10);
            let attacked = two_qubit_protocol(eta, Some(&Gate::hadamard())).unwrap();
            assert!(attacked.negativity < 1e-12);
            assert!(attacked.adversary_gates.is_some());
        }
    }

    #[test]
    fn four_qubit_headline_value() {
        let r = four_qubit_protocol(&DiagonalInputParams::default(), 0.6, None, None).unwrap();
        assert!((r.negativity - 0.3).abs() < 1e-10);
        assert!((r.witness_expectation.unwrap() + 0.3).abs() < 1e-10);
        let r1 = four_qubit_protocol(&DiagonalInputParams::default(), 1.0, None, None).unwrap();
        assert!((r1.negativity - 0.5).abs() < 1e-10);
    }

    #[test]
    fn four_qubit_noiseless_is_unentangled() {
        for params in [
            DiagonalInputParams::new(0.3, 0.8, 0.1).unwrap(),
            DiagonalInputParams::default(),
            DiagonalInputParams::new(1.0, 0.5, 0.5).unwrap(),
        ] {
            assert_eq!(four_qubit_protocol(&params, 0.0, None, None).unwrap().negativity, 0.0);
        }
    }

    #[test]
    fn reduced_ab_state_at_zero_noise() {
        let r = four_qubit_protocol(&DiagonalInputParams::default(), 0.0, None, None).unwrap();
        let part = four_qubit_cut();
        let ab = partial_trace(r.rho_out.matrix(), &part, &[QUBIT_A, QUBIT_B]).unwrap();
        assert!(ab.max_abs_diff(&ComplexMatrix::from_diagonal(&[0.5, 0.0, 0.0, 0.5])) < 1e-15);
    }

    #[test]
    fn negative_eigenvalues_of_block_form() {
        let rho = block_form_output(0.5, 0.6).unwrap();
        let pt = partial_transpose(rho.matrix(), &four_qubit_cut()).unwrap();
        let neg: Vec<f64> = hermitian_eig(&pt).unwrap().values.into_iter().filter(|v| *v < -1e-10).collect();
        assert_eq!(neg.len(), 2);
        for v in neg {
            assert!((v + 0.15).abs() < 1e-12);
        }
    }

    #[test]
    fn general_witness_reduces_to_fixed_witness() {
        let r = four_qubit_protocol(&DiagonalInputParams::default(), 0.5, None, None).unwrap();
        let w = witness_from_negative_subspace(&r.rho_out, &four_qubit_cut()).unwrap();
        assert!(w.matrix().max_abs_diff(build_witness_abcd().matrix()) < 1e-10);
    }

    #[test]
    fn offdiag_formula_examples() {
        assert_eq!(analytic_negativity_offdiag(&DiagonalInputParams::default().state()).unwrap(), 0.0);
        let half = DensityMatrix::new(rho_prime_a(0.5, 0.4)).unwrap();
        assert!((analytic_negativity_offdiag(&half).unwrap() - 0.2).abs() < 1e-15);
        let params = DiagonalInputParams::new(0.3, 0.9, 0.2).unwrap();
        let prime = rho_prime_ab(&params, 0.7).unwrap();
        assert!((analytic_negativity_offdiag(&prime).unwrap() - 0.35).abs() < 1e-15);
        assert!(matches!(
            analytic_negativity_offdiag(&DensityMatrix::maximally_mixed(3)),
            Err(Error::UnsupportedDim(8))
        ));
    }

    #[test]
    fn rho_prime_limits() {
        let params = DiagonalInputParams::new(0.3, 0.9, 0.2).unwrap();
        let at0 = rho_prime_ab(&params, 0.0).unwrap();
        assert!(at0.matrix().max_abs_diff(params.state().matrix()) < 1e-15);
        let at1 = rho_prime_ab(&params, 1.0).unwrap();
        let plus = ComplexMatrix::from_real_rows(&[[0.5, 0.5], [0.5, 0.5]]);
        let want = plus.kron(&ComplexMatrix::from_diagonal(&[0.3, 0.7]));
        assert!(at1.matrix().max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn commutator_examples() {
        let qr = DiagonalInputParams::new(0.4, 0.6, 0.6).unwrap();
        assert!(commutator_deviation(&qr, 0.5).unwrap() < 1e-15);
        let p = DiagonalInputParams::default();
        assert!(commutator_deviation(&p, 0.0).unwrap() < 1e-15);
        assert!(commutator_deviation(&p, 1.0).unwrap() < 1e-15);
        let d = commutator_deviation(&p, 0.5).unwrap();
        assert!((d - 0.5 * 0.5f64.sqrt()).abs() < 1e-12);
        assert!((d - 0.353_553_390_593_273_8).abs() < 1e-12);
    }

    #[test]
    fn factorized_inputs() {
        assert!(DiagonalInputParams::new(0.0, 0.2, 0.9).unwrap().is_factorized());
        assert!(DiagonalInputParams::new(0.5, 0.4, 0.4).unwrap().is_factorized());
        assert!(!DiagonalInputParams::default().is_factorized());
        assert!(DiagonalInputParams::new(0.5, 1.1, 0.0).is_err());
    }
}
