use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("frequency must be positive, got {0} GHz")]
    NonPositiveFrequency(f64),

    #[error("reflection matrix is not passive at {frequency_ghz} GHz (largest singular value {sigma_max})")]
    NotPassive { frequency_ghz: f64, sigma_max: f64 },

    /// The conversion parameter only exists for models without x/y cross-coupling.
    #[error("conversion parameter undefined: model has cross-polarization coupling")]
    ConversionParameterUndefined,

    #[error("invalid {what}: {reason}")]
    InvalidParameter { what: &'static str, reason: &'static str },

    #[error("observation point coincides with the source point")]
    CoincidentPoints,

    #[error("observation points must lie strictly above the array plane (z > 0)")]
    ObservationNotAboveArray,

    #[error("no observation points given")]
    NoObservationPoints,

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("frequency selection is empty")]
    EmptySelection,

    #[error("row index {index} out of range for a matrix with {rows} rows")]
    IndexOutOfRange { index: usize, rows: usize },

    #[error("sharpening exponent must be at least 1")]
    ZeroExponent,

    #[error("noise sigma must be non-negative, got {0}")]
    NegativeSigma(f64),

    #[error("matrix is empty")]
    EmptyMatrix,
}

impl Error {
    pub(crate) fn invalid(what: &'static str, reason: &'static str) -> Self {
        Error::InvalidParameter { what, reason }
    }
}
