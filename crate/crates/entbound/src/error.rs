use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("matrix is not Hermitian (max entrywise deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPsd(f64),
    #[error("trace deviates from one by {0:.3e}")]
    TraceNotOne(f64),
    #[error("invalid subsystem index {index} for {count} subsystems")]
    BadSubsystem { index: usize, count: usize },
    #[error("basis is not orthonormal (max deviation {0:.3e})")]
    NotOrthonormal(f64),
    #[error("invalid probabilities: {0}")]
    BadProbs(String),
    #[error("POVM does not sum to identity (max entrywise deviation {0:.3e})")]
    PovmIncomplete(f64),
    #[error("scalar function undefined on eigenvalue {0:.6e}")]
    FnUndefined(f64),
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("unsupported Ohmicity s = {0} (supported: s in {{2, 3}}, or s > 2 in best-effort mode)")]
    UnsupportedOhmicity(f64),
    #[error("Fock truncation did not converge: {0}")]
    FockTruncation(String),
    #[error("dimension {dim} exceeds the separable-search cap {cap}")]
    DimTooLarge { dim: usize, cap: usize },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("linear algebra backend failure: {0}")]
    Backend(String),
    #[error("numerical sanity check failed: {0}")]
    Numerics(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<ndarray_linalg::error::LinalgError> for Error {
    fn from(e: ndarray_linalg::error::LinalgError) -> Self {
        Error::Backend(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
