use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A dense construction would exceed the configured memory budget.
    #[error("budget exceeded: {what} requires {required} > cap {cap}")]
    BudgetExceeded {
        what: &'static str,
        required: u128,
        cap: u128,
    },

    /// Gram-Schmidt hit a vector with norm below the independence cutoff
    /// where a new independent vector was required.
    #[error("numeric degeneracy while orthonormalising {context}: norm {norm:.3e} < {cutoff:.3e}")]
    NumericDegeneracy {
        context: String,
        norm: f64,
        cutoff: f64,
    },

    /// Parameter vectors passed to a Reck mesh do not match the mode count.
    #[error("parameter count mismatch: expected {expected} {kind}, got {got}")]
    ParamCount {
        kind: &'static str,
        expected: usize,
        got: usize,
    },

    /// Permanent (or other size-capped routine) asked for a matrix above cap.
    #[error("size cap exceeded: {what} of size {size} > cap {cap}")]
    SizeCap {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    /// A transform was used with data built for different (N, d).
    #[error("transform mismatch: transform is for N={t_photons}, d={t_modes}, input has N={photons}, d={modes}")]
    TransformMismatch {
        t_photons: usize,
        t_modes: usize,
        photons: usize,
        modes: usize,
    },

    /// Dimension or occupation inconsistency in user input.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("cache file not found: {0}")]
    CacheMissing(std::path::PathBuf),

    #[error("cache checksum mismatch: stored {stored:#018x}, computed {computed:#018x}")]
    ChecksumMismatch { stored: u64, computed: u64 },

    #[error("cache format version mismatch: file has {found}, expected {expected}")]
    VersionMismatch { found: u32, expected: u32 },

    #[error("malformed cache file: {0}")]
    CacheFormat(String),

    /// Symmetrised Fock-array state has mass outside the paired Schur-Weyl
    /// structure; indicates an internal basis-convention bug.
    #[error("non-symmetric residual {0:.3e} above tolerance")]
    NonSymmetricResidual(f64),

    /// A probability came out more negative than rounding can explain.
    #[error("internal consistency: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
