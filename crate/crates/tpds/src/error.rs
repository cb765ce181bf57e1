//! Error type shared by every module in the crate.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, TpdsError>;

/// Errors surfaced by tensor algebra, decompositions, data generation,
/// informativity checks, benchmarking, and file I/O.
#[derive(Debug, thiserror::Error)]
pub enum TpdsError {
    /// Input shapes are inconsistent with the operation's contract.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// Modes of two operands do not conform (inner dimension or third mode).
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A matrix claimed to be block-circulant deviates from the pattern.
    #[error("not block-circulant: max deviation {max_dev:.6e} exceeds tolerance {tol:.6e}")]
    NotCirculant { max_dev: f64, tol: f64 },

    /// A Fourier block is numerically singular; `block` is the frequency index.
    #[error("singular Fourier block {block}: smallest singular value {min_sv:.6e}")]
    Singular { block: usize, min_sv: f64 },

    /// A Fourier block's eigenvector matrix is numerically singular;
    /// the eigendecomposition factors are unavailable (eigenvalues are not).
    #[error("defective Fourier block {block}: eigenvector condition number {cond:.3e} exceeds {limit:.3e}")]
    DefectiveBlock { block: usize, cond: f64, limit: f64 },

    /// An inverse transform expected to be real carried too much imaginary mass.
    #[error("imaginary residual {max_imag:.6e} exceeds tolerance {tol:.6e}")]
    ImaginaryResidualExceeded { max_imag: f64, tol: f64 },

    /// Too few records for a statistic (e.g. slope fit needs three points).
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A benchmark point exceeded its configured wall-clock cap.
    #[error("over time budget: {0}")]
    OutOfBudget(String),

    /// Fourier and dense paths disagreed where they must not; indicates a bug.
    #[error("method disagreement: {0}")]
    MethodDisagreement(String),

    /// Text-format parse failure with location diagnostics.
    #[error("parse error at {path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    /// A dense decomposition failed to converge.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
