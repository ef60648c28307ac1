use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    /// An index or multi-index component lies outside its declared range.
    #[error("domain error: {0}")]
    Domain(String),

    /// TT cores do not chain, boundary ranks are not 1, or d < 2.
    #[error("structural error at {location}: {detail}")]
    Structure { location: String, detail: String },

    #[error("numeric error: {0}")]
    Numeric(String),

    /// The matrix has numerical rank 0, so no compact SVD exists.
    #[error("rank-0 matrix: compact SVD undefined")]
    RankZero,

    /// A sampled block lost rank; its pseudoinverse is unbounded.
    #[error("singular: numerical rank {rank} < {required} columns")]
    Singular { rank: usize, required: usize },

    #[error("capacity exceeded: {requested} entries > cap {cap}")]
    Capacity { requested: usize, cap: usize },

    #[error("sampling error: cannot draw {requested} from a pool of {available}")]
    Sampling { requested: usize, available: usize },

    #[error("generation failed after {attempts} attempts: {detail}")]
    Generation { attempts: usize, detail: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no column set of rank {target} found (best {found})")]
    Search { target: usize, found: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
