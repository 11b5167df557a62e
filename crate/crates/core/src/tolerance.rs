//! Numerical tolerances shared across the crate.
//!
//! All values are absolute and assume unit-trace states.

/// Norm deviation allowed for a `StateVector`.
pub const NORM: f64 = 1e-12;

/// Max entrywise deviation from Hermiticity.
pub const HERMITIAN: f64 = 1e-12;

/// Trace deviation allowed for a `DensityMatrix`.
pub const TRACE: f64 = 1e-12;

/// Most negative eigenvalue accepted as positive semidefinite.
pub const PSD: f64 = -1e-10;

/// Eigenvalues below this are numerical zero when counting rank.
pub const RANK_CUTOFF: f64 = 1e-10;

/// Eigenvalues of a unit-trace density matrix below this are treated as
/// eigensolver noise when building a square-root factor. Without it a rank
/// deficient input leaks `sqrt(1e-16) ~ 1e-8` into spin-flip spectra.
pub const FACTOR_FLOOR: f64 = 1e-14;

/// Slack allowed when clamping a measure into its admissible range.
pub const MEASURE_CLAMP: f64 = 1e-10;

/// Residual tolerance for exact (closed-form) monogamy checks.
pub const RESIDUAL: f64 = 1e-9;

/// Slack granted to heuristic convex-roof oracle values.
pub const ORACLE_SLACK: f64 = 2e-3;

/// Tolerance for the LU-invariant certificate of a canonical form.
pub const CERTIFICATE: f64 = 1e-8;

/// Tolerance for the algebraic identities of the Acín-form bound.
pub const IDENTITY: f64 = 1e-12;
