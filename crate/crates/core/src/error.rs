use thiserror::Error;

use crate::search::SearchResult;

#[derive(Debug, Error)]
pub enum Error {
    /// Fewer than four points, or the points do not span 3-space.
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("points {0} and {1} coincide")]
    DuplicatePoint(usize, usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The refinement apex sees faces other than the one being refined.
    #[error("refinement height {epsilon} is too large: apex sees face {face}")]
    EpsilonTooLarge { epsilon: f64, face: usize },

    #[error("no sign change of the polynomial on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("search budget exhausted before an admissible shape was found (best quality {})", .0.quality)]
    BudgetExhausted(Box<SearchResult>),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
