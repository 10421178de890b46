use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max |m - m^dag| = {max_dev:.3e} at ({row}, {col})")]
    NotHermitian { max_dev: f64, row: usize, col: usize },

    #[error("matrix is not unitary: max |u^dag u - 1| = {0:.3e}")]
    NotUnitary(f64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("function undefined on eigenvalue {0:.3e}")]
    DomainError(f64),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("X-state positivity violated: {0}")]
    PositivityViolation(String),

    #[error("qubit state is not diagonal in the energy basis (max coherence {0:.3e})")]
    NotDiagonal(f64),

    #[error("Hamiltonian is proportional to the identity; entropy does not depend on beta")]
    DegenerateHamiltonian,

    #[error("entropies differ by {0:.3e}")]
    EntropyMismatch(f64),

    #[error("marginals have beta = 0; identity with a 1/beta factor is not applicable")]
    BetaZero,

    #[error("state has ergotropy {0:.3e}; condition requires zero ergotropy")]
    NotZeroErgotropy(f64),

    #[error("support violation: weight {0:.3e} outside the reference support")]
    SupportViolation(f64),

    #[error("time step too large; use dt <= {suggested:.3e}")]
    StepTooLarge { suggested: f64 },

    #[error("no steady state reached by t = {0}")]
    NotConverged(f64),

    #[error("propagator lost unitarity: deviation {0:.3e}")]
    UnitarityLoss(f64),

    #[error("time-averaged energy variance vanishes while the Bures angle is {0:.3e}")]
    ZeroVariance(f64),

    #[error("self-Hamiltonian has negative eigenvalue {0:.3e} and shifting is disabled")]
    NegativeSpectrum(f64),

    #[error("input state is passive; power bound is vacuous")]
    PassiveInput,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
