use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vector norm {norm:e} is below the degeneracy threshold")]
    ZeroVector { norm: f64 },

    #[error("{what} = {value} is outside its domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("resultant norm {norm:e} is too small to define a mean direction")]
    DegenerateSum { norm: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid minibatch spec: batch size {m} with {n} examples")]
    InvalidSpec { m: usize, n: usize },

    #[error("C({n},{m}) subsets exceeds the enumeration cap of {cap}")]
    TooManySubsets { n: usize, m: usize, cap: u64 },

    #[error("anchor {index} lies within {distance:e} of the current point")]
    AnchorTooClose { index: usize, distance: f64 },

    #[error("perturbation norm {norm:e} is not below the threshold {threshold:e}")]
    PerturbationTooLarge { norm: f64, threshold: f64 },

    #[error("index {index} out of range for {len} elements")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("matrix is not symmetric positive definite: {0}")]
    NotSpd(String),

    #[error("learning rate must be positive and finite, got {0}")]
    InvalidLearningRate(f64),

    #[error("bad IDX magic number {found:#010x}, expected {expected:#010x}")]
    BadMagic { expected: u32, found: u32 },

    #[error("truncated IDX file: need {needed} bytes, found {found}")]
    TruncatedFile { needed: usize, found: usize },

    #[error("image count {images} does not match label count {labels}")]
    CountMismatch { images: usize, labels: usize },

    #[error("label {label} at index {index} is out of range 0..{classes}")]
    LabelOutOfRange {
        index: usize,
        label: u8,
        classes: usize,
    },

    #[error("non-finite loss {loss} at epoch {epoch}, batch {batch}")]
    NonFiniteLoss { epoch: usize, batch: usize, loss: f64 },

    #[error("need at least {needed} rows, found {found}")]
    InsufficientRows { needed: usize, found: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// True for failures caused by malformed input data (files, rows),
    /// as opposed to numeric breakdowns.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::BadMagic { .. }
                | Error::TruncatedFile { .. }
                | Error::CountMismatch { .. }
                | Error::LabelOutOfRange { .. }
                | Error::InsufficientRows { .. }
                | Error::Io(_)
                | Error::Csv(_)
                | Error::Json(_)
        )
    }
}
