use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (max |A - A^dag| = {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not unitary (max |U^dag U - I| = {0:e})")]
    NotUnitary(f64),

    #[error("Kraus operators are not trace preserving (max deviation {0:e})")]
    NotTracePreserving(f64),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("non-finite matrix entry at ({0}, {1})")]
    NonFinite(usize, usize),

    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("duplicate target qubit {0}")]
    DuplicateTarget(usize),

    #[error("invalid bipartition: {0}")]
    InvalidBipartition(String),

    #[error("partial transpose has no negative eigenvalues; state is PPT across this cut")]
    NoNegativeEigenvalues,

    #[error("expectation value has imaginary part {0:e}")]
    NonrealExpectation(f64),

    #[error("unsupported dimension {0}")]
    UnsupportedDim(usize),

    #[error("filter calibration infeasible: R^2/T = {0} exceeds 1")]
    InfeasibleCalibration(f64),

    #[error("no photon survives the optical channel")]
    ZeroSurvival,

    #[error("missing measurement setting {0}")]
    MissingSetting(String),

    #[error("invalid count record: {0}")]
    InvalidRecord(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_unit_interval(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name,
            value,
            range: "[0, 1]",
        })
    }
}
