//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Grid construction parameters violate the invariants.
    #[error("invalid frequency grid: {0}")]
    InvalidGrid(String),

    /// Two grid-based objects do not share the same frequency grid.
    #[error("frequency grid mismatch: {0}")]
    GridMismatch(String),

    /// Gram-Schmidt hit a vector with post-projection norm below tolerance.
    #[error("degenerate mode set: mode {index} has residual norm {norm:.3e} after projection")]
    DegenerateModeSet { index: usize, norm: f64 },

    /// Fock-space dimension would exceed the configured cap.
    #[error("Fock dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    /// Empty or inverted time window.
    #[error("invalid time window: {0}")]
    InvalidWindow(String),

    /// Matrix dimensions do not match the shared basis.
    #[error("dimension mismatch: expected {expected}, got {got} ({context})")]
    DimensionMismatch {
        expected: usize,
        got: usize,
        context: String,
    },

    /// A computed probability or trace fell outside its tolerance band.
    #[error("numerical inconsistency: {0}")]
    NumericalInconsistency(String),

    /// Element trace too small for trace-normalized quantities.
    #[error("POVM element '{0}' has (near-)zero trace")]
    ZeroTraceElement(String),

    /// Basis was truncated at N_max = 0; no one-photon sector exists.
    #[error("basis has no single-photon sector (N_max = 0)")]
    NoSinglePhotonSector,

    /// Total single-photon bandwidth vanishes; posteriors undefined.
    #[error("zero single-photon bandwidth: {0}")]
    ZeroBandwidth(String),

    /// Requested bin width under-resolves the sampling grid.
    #[error("bin width {bin:.6e} is below twice the grid spacing {spacing:.6e}")]
    BinTooFine { bin: f64, spacing: f64 },

    /// Bisection could not match the entropy target within grid limits.
    #[error("resolution bisection failed: {0}")]
    ResolutionUnresolvable(String),

    /// All photon-number weights vanish for the requested (outcome, mode).
    #[error("empty photon-number support for outcome '{label}' in mode {mode}")]
    EmptyNumberSupport { label: String, mode: usize },

    /// Non-positive detector-on duration.
    #[error("invalid duration {0} s; must be > 0")]
    InvalidDuration(f64),

    /// Basis was truncated below two photons; joint detection undefined.
    #[error("basis has no two-photon sector (N_max = {0})")]
    NoTwoPhotonSector(usize),

    /// Single-photon detection probability too small for a response scan.
    #[error("mode is insensitive: P(0) = {0:.3e} below threshold")]
    InsensitiveMode(f64),

    /// Mode function is not contained in the span of the stored basis.
    #[error("mode outside basis span: projection deficit {0:.3e}")]
    ModeOutsideSpan(f64),

    /// Model parameter outside its physical range.
    #[error("invalid model parameter: {0}")]
    InvalidParameter(String),

    /// Pixel composition requested on non-commuting structures.
    #[error("unsupported pixel composition: {0}")]
    UnsupportedComposition(String),

    /// Requested modes leak outside the frequency grid.
    #[error("spectral leakage: {0}")]
    SpectralLeakage(String),

    /// File could not be parsed.
    #[error("parse error at byte {offset}: {message}")]
    ParseError { offset: u64, message: String },

    /// A loaded POVM violated an invariant.
    #[error("validation failed for element '{label}': {reason}")]
    ValidationFailed { label: String, reason: String },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}
