use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("D = {0} must be a squarefree integer greater than 1")]
    InvalidDiscriminant(i64),

    #[error("elements belong to different fields (D = {0} and D = {1})")]
    FieldMismatch(i64, i64),

    #[error("zero element where a nonzero element is required")]
    ZeroElement,

    #[error("no power of the totally positive unit up to {bound} is congruent to 1 modulo {m}*sqrt({d})")]
    NoCongruentUnit { d: i64, m: u64, bound: u64 },

    #[error("continued fraction expansion did not reach a unit within {0} steps")]
    UnitSearchExhausted(usize),

    #[error("invalid ideal basis: {0}")]
    InvalidIdeal(String),

    #[error("{0} does not lie in the dual lattice")]
    NotInDual(String),

    #[error("{0} does not lie in the coset")]
    NotInCoset(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("orbit representative is not canonical for t0^2 = {0}")]
    NonCanonical(String),

    #[error("t2/t1 is not an exact positive power of eps_L")]
    NotUnitPower,

    #[error("lattice sum needs more than {0} terms")]
    TermBudgetExceeded(usize),

    #[error("unknown {kind} '{name}'")]
    Unknown { kind: &'static str, name: String },

    #[error("malformed descriptor: {0}")]
    Descriptor(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
