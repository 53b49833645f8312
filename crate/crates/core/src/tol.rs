//! Numeric tolerances used across the crate.
//!
//! The identities checked here are exact in real arithmetic; thresholds
//! only absorb double-precision rounding at matrix dimensions <= 16.

/// Anticommutation, hermiticity and spinor-metric residuals of gamma
/// representations.  These are finite products of exact matrices.
pub const GAMMA_RESIDUAL: f64 = 1e-12;

/// Involution and Krein-self-adjointness residuals of fundamental
/// symmetries.
pub const FUND_SYM: f64 = 1e-10;

/// Smallest eigenvalue (relative to the largest) accepted when a Gram
/// matrix must be positive definite.
pub const POSDEF_MIN_EIG: f64 = 1e-10;

/// Rank / degeneracy cutoff in pivoted Gram-Schmidt.
pub const GRAM_SCHMIDT: f64 = 1e-10;

/// Pseudo-orthogonality, determinant and polar-reconstruction residuals.
pub const POLAR_RESIDUAL: f64 = 1e-10;

/// Agreement between the polar route and closed forms for the shift factor.
pub const DSF_CLOSED_FORM: f64 = 1e-10;

/// Shift-factor values this close to 1 (from below) are clamped rather
/// than rejected when fed to the Lorentzian closed form.
pub const TIMELIKE_SLACK: f64 = 1e-9;

/// Unit-normalization slack for timelike vector fields.
pub const UNIT_TIMELIKE: f64 = 1e-8;

/// Construction-failure threshold for the intertwining property of spin
/// lifts (checked for both generator sign conventions).
pub const AD_CONSTRUCTION: f64 = 1e-6;

/// Relative tolerance when matching or deduplicating eigenvalue sets.
pub const SPECTRUM_MATCH: f64 = 1e-8;

/// Two subspaces are considered equal when their metric projectors agree
/// to this tolerance.
pub const SUBSPACE_COINCIDE: f64 = 1e-8;

/// Growth verdict: minimal slope of the best log-linear fit.
pub const GROWTH_SLOPE: f64 = 0.05;

/// Growth verdict: maximal range-normalized rms misfit of that fit.
pub const GROWTH_RESIDUAL_CAP: f64 = 0.1;

/// Largest tolerated escape of bump mass outside the quadrature grid.
pub const BUMP_MASS_ESCAPE: f64 = 1e-6;
