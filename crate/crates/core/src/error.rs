use thiserror::Error;

/// Errors raised by state construction, verification and generation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid system shape: {0}")]
    InvalidShape(String),

    #[error("states live on different system shapes")]
    ShapeMismatch,

    #[error("basis state does not fit the shape: {0}")]
    BasisMismatch(String),

    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),

    #[error(
        "HW index condition violated: sum_i j_i N_i = {weighted} is not 0 mod {modes} \
         (the simultaneous HW operator would not leave the class eigenstates invariant)"
    )]
    HwIndexCondition { weighted: u64, modes: usize },

    #[error("expected {expected} HW indices (one per party), got {found}")]
    HwIndexCount { expected: usize, found: usize },

    #[error(
        "eigenphase index k = {k} is not a multiple of M/|X| = {step}; \
         the uniform superposition over the class vanishes"
    )]
    InvalidEigenIndex { k: usize, step: usize },

    #[error("party index {party} out of range for {parties} parties")]
    PartyOutOfRange { party: usize, parties: usize },

    #[error("matrix is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("matrix must be square with dimension {expected}, got {rows}x{cols}")]
    MatrixShape {
        expected: usize,
        rows: usize,
        cols: usize,
    },

    #[error("cannot sample from an empty distribution")]
    EmptyDistribution,

    #[error("invalid source: {0}")]
    InvalidSource(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "measurement labels {l} and {l_prime} are not complementary on party {party}: \
         gcd(j (l - l') N |X| / M, |X|) != 1 for class size {cardinality}"
    )]
    NotComplementary {
        l: usize,
        l_prime: usize,
        party: usize,
        cardinality: usize,
    },

    #[error("state has zero norm")]
    ZeroNorm,

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
