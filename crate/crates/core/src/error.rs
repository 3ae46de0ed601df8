use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("insufficient stencil support: {n_points} points, need at least {required}")]
    InsufficientStencil { n_points: usize, required: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("sigma3 weight is only defined for two-component spinors")]
    Sigma3RequiresSpinor2,

    #[error("requested {count} eigenpairs but the discretization has dimension {dim}")]
    CountExceedsDimension { count: usize, dim: usize },

    #[error("eigensolver failed: {0}")]
    EigenSolver(String),

    #[error("x = {x} is a singular point of the potential")]
    SingularPoint { x: f64 },

    #[error("ground state of index n = {n} is non-normalizable")]
    NonNormalizable { n: u32 },

    #[error("hierarchy index n = {n} out of range (minimum {min})")]
    IndexOutOfRange { n: u32, min: u32 },

    #[error("level (n = {n}, k = {k}) is outside the discrete spectrum")]
    OutsideSpectrum { n: u32, k: u32 },

    #[error("state (k = {k}, sign = {sign}) is absent from the spectrum")]
    StateAbsent { k: u32, sign: &'static str },

    #[error("imaginary shifted mass at n = {n} (shift index {n0})")]
    ImaginaryShiftedMass { n: u32, n0: u32 },

    #[error("{0}")]
    InvalidArgument(String),

    #[error("unknown model '{0}'")]
    UnknownModel(String),

    #[error("unknown check '{id}'; known checks: {known}")]
    UnknownCheck { id: String, known: String },

    #[error("check '{id}' is not applicable: {reason}")]
    NotApplicable { id: String, reason: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
