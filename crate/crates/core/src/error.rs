use thiserror::Error;

/// Everything that can go wrong across the library.
///
/// Variants are grouped loosely by lifecycle: shape/validation problems first,
/// then numeric failures, then file I/O. The CLI maps these onto exit codes,
/// so keep the split between `is_numeric` and `is_io` stable.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("volume of {elements} elements exceeds the addressable limit")]
    Oversize { elements: u128 },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("non-finite value at flat index {index}")]
    NonFinite { index: usize },

    #[error("need at least {needed} frames, got {got}")]
    InsufficientFrames { needed: usize, got: usize },

    #[error("measurement count K={k} exceeds ambient dimension D={d}")]
    Rank { k: usize, d: usize },

    #[error("expected measurement derivative order {expected}, got {got}")]
    DerivativeOrder { expected: u8, got: u8 },

    #[error("{what} has no energy to normalize")]
    ZeroEnergy { what: &'static str },

    #[error("singular synthesis denominator at frequency bin ({u1}, {u2}, {u3})")]
    SingularDenominator { u1: usize, u2: usize, u3: usize },

    #[error("inverse transform input is not conjugate-symmetric: imaginary residue {residue:.3e} exceeds {tolerance:.3e} (relative)")]
    ConjugateSymmetry { residue: f64, tolerance: f64 },

    #[error("affine matrix is singular (|det| = {det:.3e})")]
    SingularView { det: f64 },

    #[error("training labels collapse to a single class")]
    DegenerateLabels,

    #[error("length mismatch: {left_name} has {left}, {right_name} has {right}")]
    Alignment {
        left_name: &'static str,
        left: usize,
        right_name: &'static str,
        right: usize,
    },

    #[error("pooling needs every response dimension >= {min}, got ({d0}, {d1}, {d2})")]
    PoolingResolution {
        min: usize,
        d0: usize,
        d1: usize,
        d2: usize,
    },

    #[error("{path}: bad magic, expected {expected:?}")]
    BadMagic { path: String, expected: &'static str },

    #[error("{path}: truncated or oversized, expected {expected} bytes after the header, found {actual}")]
    PayloadSize {
        path: String,
        expected: u64,
        actual: u64,
    },

    #[error("{path}: {detail}")]
    Format { path: String, detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the numeric contracts (as opposed to bad files or
    /// bad shapes fed in by the caller).
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::NonFinite { .. }
                | Error::SingularDenominator { .. }
                | Error::ConjugateSymmetry { .. }
                | Error::SingularView { .. }
                | Error::ZeroEnergy { .. }
        )
    }

    /// True for failures reading or writing artifacts.
    pub fn is_io(&self) -> bool {
        matches!(
            self,
            Error::Io(_)
                | Error::BadMagic { .. }
                | Error::PayloadSize { .. }
                | Error::Format { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
