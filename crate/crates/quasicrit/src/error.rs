use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A constructor or operation received a parameter outside its supported range.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// The requested operation is not defined for this input (e.g. dual partner
    /// of a non-AAH chain).
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Matrix/vector dimensions do not match.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// An input matrix violated the symmetric contract.
    #[error("matrix not symmetric: max |H_ij - H_ji| = {max_asym:.3e}")]
    NotSymmetric { max_asym: f64 },

    /// The eigensolver failed to converge; the offending matrix is identified
    /// by its content hash so the run can be reproduced.
    #[error("eigensolver did not converge at row {row} (matrix hash {matrix_hash:#018x}, dim {dim})")]
    NoConvergence {
        row: usize,
        dim: usize,
        matrix_hash: u64,
    },

    /// An input state violated a normalization or shape contract.
    #[error("contract violation: {0}")]
    Contract(String),

    /// A windowed average was requested over an empty selection.
    #[error("empty energy window [{emin}, {emax}]")]
    EmptyWindow { emin: f64, emax: f64 },

    /// Finite-size fit with fewer than 3 samples or a degenerate abscissa.
    #[error("scaling fit error: {0}")]
    Fit(String),

    /// Green's function evaluated at a spectral branch point |E| = 2.
    #[error("branch point: |E| = 2 is not in the analytic domain (E = {e})")]
    BranchPoint { e: f64 },

    /// Resolvent probed within 1e-9 of a ring eigenvalue with no regularization.
    #[error("resolvent pole: E = {e} within {dist:.3e} of ring level k-index {k} (E_k = {ek})")]
    PoleProximity { e: f64, k: usize, ek: f64, dist: f64 },

    /// Cache container is malformed or from an incompatible version.
    #[error("cache format error: {0}")]
    CacheFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
