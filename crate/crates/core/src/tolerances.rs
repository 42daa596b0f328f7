//! Numerical tolerances used across validation and the merit computations.
//!
//! Kept in one place so reports can cite the exact values they were
//! produced with.

/// Max allowed |Π - Π†| entry for a matrix to count as Hermitian.
pub const HERMITICITY: f64 = 1e-10;

/// Eigenvalues of POVM elements may dip this far below zero.
pub const PSD_FLOOR: f64 = -1e-9;

/// Eigenvalues of POVM elements and of the click sum may exceed 1 by this much.
pub const EIGENVALUE_CEILING: f64 = 1.0 + 1e-9;

/// Mode functions must be normalized to 1 within this tolerance.
pub const MODE_NORM: f64 = 1e-10;

/// Pairwise mode inner products must match δ_ij within this tolerance.
pub const MODE_ORTHOGONALITY: f64 = 1e-8;

/// Residual norm below which Gram-Schmidt declares rank deficiency.
pub const GRAM_SCHMIDT_RANK: f64 = 1e-10;

/// Traces below this are treated as zero when normalizing an element.
pub const ZERO_TRACE: f64 = 1e-12;

/// Relative weight below which eigenvalues are dropped from entropy sums.
pub const ENTROPY_WEIGHT_DROP: f64 = 1e-12;

/// Projection deficit above which a mode is considered outside the span.
pub const SPAN_DEFICIT: f64 = 1e-6;

/// Density-matrix trace must equal 1 within this tolerance.
pub const STATE_TRACE: f64 = 1e-10;

/// Default cap on the Fock-space dimension (keeps dense solves tractable).
pub const DIMENSION_CAP: usize = 5000;

/// Entropy bisection stops once |H - target| falls below this many bits.
pub const RESOLUTION_BITS: f64 = 0.01;

/// Maximum bisection iterations for the resolution search.
pub const RESOLUTION_MAX_ITERS: usize = 60;

/// Relative τ accuracy of the response-time crossing refinement.
pub const RESPONSE_TAU_REL: f64 = 1e-4;

/// P(0) below this aborts a response scan as insensitive.
pub const RESPONSE_P0_MIN: f64 = 1e-9;

/// Heterodyne truncation defect (on the protected number sector) that
/// triggers a warning.
pub const HETERODYNE_TRUNCATION_WARN: f64 = 0.05;

/// Hermitian eigensolver residual target, relative to the matrix norm.
pub const EIGEN_RESIDUAL: f64 = 1e-8;
