use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degree overflow: {0} + {1} > 8")]
    DegreeOverflow(usize, usize),
    #[error("invalid index tuple {0:?}")]
    InvalidIndex(Vec<usize>),
    #[error("expected a form of degree {expected}, got {got}")]
    WrongDegree { expected: usize, got: usize },
    #[error("triple is not orthonormal: {0}")]
    NonOrthonormal(String),
    #[error("4-form failed admissibility validation: {0}")]
    NotAdmissible(String),
    #[error("scale must be positive, got {0}")]
    NonPositiveScale(f64),
    #[error("grid spacing {h} exceeds bound {bound}")]
    GridTooCoarse { h: f64, bound: f64 },
    #[error("fields live on incompatible grids: {0}")]
    IncompatibleGrids(String),
    #[error("instanton must be centred at the origin")]
    NotCentred,
    #[error("lambda {lambda} outside the admissible range (0, {max})")]
    LambdaOutOfRange { lambda: f64, max: f64 },
    #[error("invalid gluing configuration: {0}")]
    InvalidGluing(String),
    #[error("at least {needed} values required, got {got}")]
    TooFewValues { needed: usize, got: usize },
    #[error("perturbation too large: norm {0} >= 1")]
    PerturbationTooLarge(f64),
    #[error("empty sample set")]
    EmptyField,
    #[error("weighted norm requires delta < 0, got {0}")]
    NonNegativeDelta(f64),
    #[error("iteration did not converge after {iterations} steps (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("input has kernel component {fraction:.3e} above threshold {threshold:.3e}")]
    KernelComponent { fraction: f64, threshold: f64 },
    #[error("smallness gate failed: |Re| = {re_norm:e} > 1/(10c) = {gate:e}")]
    SmallnessGate { re_norm: f64, gate: f64 },
    #[error("fixed-point iteration diverged at step {0}")]
    Divergence(usize),
    #[error("ledger is missing field `{0}`")]
    MissingField(&'static str),
    #[error("ledger inconsistent: index {0} is not an integer")]
    NonIntegerIndex(String),
    #[error("inconsistent ledgers: {0}")]
    InconsistentLedger(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
