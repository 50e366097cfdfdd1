use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("transform size {0} is not a power of two >= 2")]
    InvalidSize(usize),

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("expected length {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("matrix dimensions {rows}x{cols} do not match the expected {expected_rows}x{expected_cols}")]
    ShapeMismatch {
        rows: usize,
        cols: usize,
        expected_rows: usize,
        expected_cols: usize,
    },

    #[error("leading DC response entry vanishes at stage {stage}; reflection angle undefined")]
    DegenerateDcResponse { stage: usize },

    #[error("matrix is not orthonormal (residual {residual:e})")]
    NotOrthonormal { residual: f64 },

    #[error("expected exactly one vanishing singular value at stage {stage}, found {count}")]
    NullSpaceDimension { stage: usize, count: usize },

    #[error("null vector residual {residual:e} exceeds tolerance at stage {stage}")]
    NullResidual { stage: usize, residual: f64 },

    #[error("correlation coefficient {0} outside (-1, 1)")]
    InvalidRho(f64),

    #[error("image {width}x{height} is not divisible into {block}x{block} blocks")]
    BlockMismatch {
        width: usize,
        height: usize,
        block: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of a numerical check rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotOrthonormal { .. }
                | Error::NullSpaceDimension { .. }
                | Error::NullResidual { .. }
                | Error::DegenerateDcResponse { .. }
        )
    }
}
