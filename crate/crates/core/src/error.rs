use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("sample has {rows} rows, at least {min} are required")]
    InputSize { rows: usize, min: usize },

    #[error("row {row} has {found} values, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("projection onto {n_basis} basis functions is ill-posed on a {k}-point grid")]
    IllPosedProjection { n_basis: usize, k: usize },

    #[error("incompatible inputs: {0}")]
    Incompatible(String),

    #[error("frequency index {index} out of range 0..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("degenerate statistic: {0}")]
    Degenerate(String),

    #[error("invalid spectral estimate: {0}")]
    InvalidEstimate(String),

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("no bandwidth in the grid yields a finite cross-validation score")]
    NoValidBandwidth,
}

pub type Result<T> = core::result::Result<T, Error>;
