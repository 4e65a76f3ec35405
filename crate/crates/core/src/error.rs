use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected} coordinates, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("parameter {t} lies outside the domain [{lo}, {hi}]")]
    Domain { t: f64, lo: f64, hi: f64 },

    /// The logarithm between two points is not defined or too close to the cut locus.
    #[error("logarithm is ill-posed: {0}")]
    CutLocus(String),

    #[error("cannot lift datum {data_index} into the tangent space of anchor {anchor} (datum {anchor_data_index}): {reason}")]
    Lift {
        data_index: usize,
        anchor: usize,
        anchor_data_index: usize,
        reason: String,
    },

    #[error("linear system is singular or not positive definite (pivot {pivot} at row {row})")]
    Singular { row: usize, pivot: f64 },
}

impl Error {
    /// True for errors caused by the geometry (cut locus) rather than by malformed input.
    pub fn is_well_posedness(&self) -> bool {
        matches!(self, Error::CutLocus(_) | Error::Lift { .. })
    }
}
