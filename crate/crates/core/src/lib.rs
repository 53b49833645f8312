//! Numerical machinery for comparing the spinor norms induced by different
//! space/time splittings of an indefinite metric space.
//!
//! The crate is layered bottom-up:
//!
//! - [`clifford`] — gamma-matrix representations of Clifford algebras
//!   `Cl(p,q)` in even total dimension, together with the compatible
//!   spinor metric.
//! - [`doppler`] — maximal negative definite subspaces, the indefinite
//!   polar decomposition of the pseudo-orthogonal maps connecting them,
//!   and the generalized Doppler shift factor.
//! - [`krein`] — Krein products, fundamental symmetries built from
//!   splittings, and the positive scalar products / operator norms they
//!   induce on spinor space.
//! - [`spin_lift`] — lifts of pseudo-orthogonal maps to the spinor
//!   representation, their operator norms and adjoint-action spectra.
//! - [`field`] — pointwise shift-factor sweeps over sampled domains,
//!   boundedness verdicts, and quadrature demonstrations.
//! - [`report`] — JSON report payloads shared with the command-line tool.

pub mod clifford;
pub mod doppler;
pub mod field;
pub mod krein;
pub mod linalg;
pub mod report;
pub mod spin_lift;
pub mod tol;

use thiserror::Error;

/// Crate-wide error type.
///
/// `Invalid` covers caller-supplied inputs that violate a precondition
/// (shape mismatches, indefinite bases, malformed configs).  `Internal`
/// signals that a structural identity which must hold by construction
/// failed, which always indicates a bug rather than bad input.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub use clifford::{
    build_gamma_rep, build_gamma_rep_for_signs, build_spinor_metric, multivector_action, GammaRep,
    Signature, SpinorMetric,
};
pub use doppler::{
    connecting_map, dsf, dsf_lorentzian, make_splitting, polar_decompose, DsfResult, MetricSpace,
    PolarParts, Splitting,
};
pub use krein::{
    check_t_quadratic, fundamental_symmetry, krein_product, norm, operator_norm, scalar_product,
    FundSym, KreinProductSpace,
};
pub use spin_lift::{
    ad_spectrum, lift, lift_norm, pseudo_unitary_spectrum_check, AdSpectrumReport, LiftNormReport,
    PairingReport, SpinLift,
};
