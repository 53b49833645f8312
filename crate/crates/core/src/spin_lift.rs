//! Lifts of pseudo-orthogonal maps to the spinor representation, their
//! operator norms, and adjoint-action spectra.
//!
//! The canonical positive factor `L` of an indefinite polar decomposition
//! has a well-defined real logarithm `B` (its spectrum is positive).  The
//! corresponding spinor generator is the quadratic element
//! `beta = 1/4 sum_{a,b} B~^{ab} g_a g_b` with the second index of `B`
//! raised by the metric; then `exp(beta)` intertwines the vector action:
//! `exp(beta) rho(v) exp(-beta) = rho(e^B v)`.  The construction is
//! self-calibrating: if the intertwining residual indicates the opposite
//! generator normalization, the sign of `beta` is flipped, and failure of
//! both signs is reported as a construction error.
//!
//! The adjoint action of the lift on the Clifford algebra is diagonal on
//! ordered basis products, with eigenvalue the product of the matching
//! eigenvalues of `L`; its spectrum is therefore the set of subset
//! products of the spectrum of `L`.  The spectral radius of the lift is
//! the square root of the adjoint spectral radius, which gives the closed
//! form `(prod_{lambda > 1} lambda)^{1/2}` for the lift norm.

use rand::Rng;

use crate::clifford::GammaRep;
use crate::doppler::PolarParts;
use crate::krein::{operator_norm, to_orthonormal_frame, FundSym, KreinProductSpace};
use crate::linalg::{self, CMat, CVec, RMat, C64};
use crate::{tol, Error, Result};

/// A lift of the canonical positive factor to the spinor space.
#[derive(Clone, Debug)]
pub struct SpinLift {
    tilde_l: CMat,
    tilde_l_inv: CMat,
    /// `B` in the Lie algebra of `SO(g)` with `L = exp(B)`.
    bivector_base: RMat,
    /// Spinor generator whose exponential is the lift.
    generator: CMat,
    /// Intertwining residual of the returned lift.
    ad_residual: f64,
    /// Whether the generator sign had to be flipped during calibration.
    sign_flipped: bool,
    source: PolarParts,
}

impl SpinLift {
    pub fn tilde_l(&self) -> &CMat {
        &self.tilde_l
    }

    pub fn tilde_l_inv(&self) -> &CMat {
        &self.tilde_l_inv
    }

    pub fn bivector_base(&self) -> &RMat {
        &self.bivector_base
    }

    pub fn generator(&self) -> &CMat {
        &self.generator
    }

    pub fn ad_residual(&self) -> f64 {
        self.ad_residual
    }

    pub fn sign_flipped(&self) -> bool {
        self.sign_flipped
    }

    pub fn source(&self) -> &PolarParts {
        &self.source
    }
}

fn ad_defect(rep: &GammaRep, l: &RMat, tilde: &CMat, tilde_inv: &CMat) -> f64 {
    let mut worst: f64 = 0.0;
    for mu in 0..rep.dim() {
        let lhs = tilde * rep.gamma(mu) * tilde_inv;
        let target = rep.vector_action(&l.column(mu).into_owned());
        worst = worst.max((lhs - &target).norm() / (1.0 + target.norm()));
    }
    worst
}

/// Lifts the positive polar factor of `polar` to the spinor space of `rep`.
///
/// Requires the representation metric to match the metric the polar parts
/// were computed against (diagonal, entries +-1).
pub fn lift(rep: &GammaRep, polar: &PolarParts) -> Result<SpinLift> {
    let n = rep.dim();
    if polar.metric().nrows() != n {
        return Err(Error::Invalid("representation and polar dimensions differ".into()));
    }
    for i in 0..n {
        for j in 0..n {
            let want = if i == j { rep.metric_signs()[i] } else { 0.0 };
            if (polar.metric()[(i, j)] - want).abs() > 1e-10 {
                return Err(Error::Invalid(
                    "lift requires the polar metric to equal the representation's diagonal metric"
                        .into(),
                ));
            }
        }
    }

    // Real logarithm of L in the adapted frame, where L is symmetric
    // positive definite.
    let l_frame = &polar.frame2_inv * &polar.l * &polar.frame2;
    let m = linalg::symmetrize(&l_frame);
    if (&l_frame - &m).norm() > 1e-7 * (1.0 + m.norm()) {
        return Err(Error::Invalid("positive factor is not twisted-self-adjoint".into()));
    }
    let log_frame = linalg::spd_map(&m, f64::ln, "logarithm of the positive factor")?;
    let b = &polar.frame2 * log_frame * &polar.frame2_inv;

    // Structural checks on B: in the Lie algebra of SO(g), symmetric for
    // the twisted metric.
    let banti = (b.transpose() * polar.metric() + polar.metric() * &b).norm() / (1.0 + b.norm());
    if banti > 1e-7 {
        return Err(Error::Internal(format!(
            "logarithm is not metric-antisymmetric (defect {banti:.3e})"
        )));
    }

    // Spinor generator: raise the second index and contract with gamma
    // pairs.
    let b_raised = &b * &polar.g_inv;
    let d = rep.spinor_dim();
    let mut beta = CMat::zeros(d, d);
    for a in 0..n {
        for c in 0..n {
            if b_raised[(a, c)] != 0.0 {
                beta += rep.gamma(a) * rep.gamma(c) * C64::new(0.25 * b_raised[(a, c)], 0.0);
            }
        }
    }

    let mut sign_flipped = false;
    let mut tilde = beta.exp();
    let mut tilde_inv = (-&beta).exp();
    let mut residual = ad_defect(rep, &polar.l, &tilde, &tilde_inv);
    if residual > tol::AD_CONSTRUCTION {
        sign_flipped = true;
        beta = -beta;
        tilde = beta.exp();
        tilde_inv = (-&beta).exp();
        residual = ad_defect(rep, &polar.l, &tilde, &tilde_inv);
        if residual > tol::AD_CONSTRUCTION {
            return Err(Error::Internal(format!(
                "lift construction failed for both generator signs (residual {residual:.3e})"
            )));
        }
    }

    Ok(SpinLift {
        tilde_l: tilde,
        tilde_l_inv: tilde_inv,
        bivector_base: b,
        generator: beta,
        ad_residual: residual,
        sign_flipped,
        source: polar.clone(),
    })
}

/// Subset products of a positive spectrum (the adjoint-action spectrum),
/// deduplicated to relative tolerance.
pub fn subset_products(spectrum: &[f64]) -> Vec<f64> {
    let n = spectrum.len();
    assert!(n <= 20, "subset enumeration limited to small dimensions");
    let mut out = Vec::with_capacity(1 << n);
    for mask in 0u32..(1u32 << n) {
        let mut prod = 1.0;
        for (k, &lam) in spectrum.iter().enumerate() {
            if mask & (1 << k) != 0 {
                prod *= lam;
            }
        }
        out.push(prod);
    }
    linalg::dedup_sorted_rel(out, tol::SPECTRUM_MATCH)
}

/// Norms of a lift together with the spectral identities they satisfy.
#[derive(Clone, Debug, serde::Serialize)]
pub struct LiftNormReport {
    /// Operator norm of the lift in the scalar product of the target
    /// fundamental symmetry.
    pub lift_norm: f64,
    /// Base operator norm (spectral radius of `L`).
    pub base_norm: f64,
    /// Spectral radius of the adjoint action, from subset enumeration.
    pub ad_spectral_radius: f64,
    /// `(prod over spectrum entries > 1)^(1/2)`.
    pub product_formula_value: f64,
    /// `base_norm^(1/2)`.
    pub lower_bound: f64,
    /// `base_norm^(min(p,q)/2)`.
    pub upper_bound: f64,
    /// Commutator defect of the lift in orthonormal coordinates of the
    /// target scalar product.
    pub normality_defect: f64,
}

/// Computes the lift norm and the closed-form quantities it must match.
pub fn lift_norm(space: &KreinProductSpace, fs2: &FundSym, sl: &SpinLift) -> Result<LiftNormReport> {
    let lift_norm = operator_norm(space, fs2, sl.tilde_l())?;
    let spectrum = &sl.source.spectrum_l;
    let base_norm = sl.source.spectral_radius();
    let ad_spectral_radius = subset_products(spectrum).last().copied().unwrap_or(1.0);
    let product: f64 = spectrum.iter().filter(|&&x| x > 1.0).product();
    let product_formula_value = product.sqrt();
    let min_pq = space.rep().sig().min_pq() as f64;

    let w = to_orthonormal_frame(fs2, sl.tilde_l());
    let normality_defect = (&w * w.adjoint() - w.adjoint() * &w).norm();

    Ok(LiftNormReport {
        lift_norm,
        base_norm,
        ad_spectral_radius,
        product_formula_value,
        lower_bound: base_norm.sqrt(),
        upper_bound: base_norm.powf(min_pq / 2.0),
        normality_defect,
    })
}

/// Adjoint-action spectrum of a lift: subset-product enumeration plus, in
/// low dimension, two independent numerical routes.
#[derive(Clone, Debug, serde::Serialize)]
pub struct AdSpectrumReport {
    /// Deduplicated subset products of the spectrum of `L`.
    pub enumerated: Vec<f64>,
    /// Moduli of the eigenvalues of the conjugation operator
    /// `X -> tilde_L X tilde_L^{-1}` (only for base dimension <= 6).
    pub numerical: Option<Vec<f64>>,
    /// Hausdorff mismatch between `enumerated` and `numerical`.
    pub numerical_defect: Option<f64>,
    /// Mismatch between `enumerated` and the pairwise quotients of the
    /// eigenvalues of the lift itself.
    pub quotient_defect: f64,
}

/// Enumerates the adjoint spectrum and cross-checks it numerically.
///
/// The conjugation operator is assembled as a Kronecker product and fed to
/// a dense eigensolver when the base dimension is at most 6; in dimension
/// 8 the 256^2-sized conjugation operator is skipped and only the quotient
/// route is used.
pub fn ad_spectrum(sl: &SpinLift, spectrum_l: &[f64]) -> Result<AdSpectrumReport> {
    let enumerated = subset_products(spectrum_l);
    let base_dim = sl.source.metric().nrows();

    let lift_eigs = linalg::complex_eigenvalues(sl.tilde_l())?;
    let mut quotients: Vec<f64> = Vec::with_capacity(lift_eigs.len() * lift_eigs.len());
    for a in &lift_eigs {
        for b in &lift_eigs {
            quotients.push((a / b).norm());
        }
    }
    let quotients = linalg::dedup_sorted_rel(quotients, tol::SPECTRUM_MATCH);
    let quotient_defect = linalg::hausdorff_rel(&enumerated, &quotients);

    let (numerical, numerical_defect) = if base_dim <= 6 {
        let conj_op = sl.tilde_l_inv().transpose().kronecker(sl.tilde_l());
        let eigs = linalg::complex_eigenvalues(&conj_op)?;
        let mods: Vec<f64> = eigs.iter().map(|z| z.norm()).collect();
        let mods = linalg::dedup_sorted_rel(mods, tol::SPECTRUM_MATCH);
        let defect = linalg::hausdorff_rel(&enumerated, &mods);
        if defect > 1e-6 {
            return Err(Error::Internal(format!(
                "enumerated and numerical adjoint spectra disagree (defect {defect:.3e})"
            )));
        }
        (Some(mods), Some(defect))
    } else {
        (None, None)
    };

    Ok(AdSpectrumReport { enumerated, numerical, numerical_defect, quotient_defect })
}

/// Result of matching a spectrum against its image under `z -> 1/conj(z)`.
#[derive(Clone, Debug, serde::Serialize)]
pub struct PairingReport {
    /// Largest matching distance, relative per eigenvalue.
    pub max_defect: f64,
    /// The computed spectrum (re, im pairs).
    pub eigenvalues: Vec<(f64, f64)>,
}

/// Checks that the spectrum of a pseudo-unitary matrix (`M^+ G M = G` for
/// an indefinite Hermitian `G`) is invariant under `z -> 1/conj(z)` with
/// multiplicity, by greedy nearest matching.
pub fn pseudo_unitary_spectrum_check(m: &CMat, gram: &CMat) -> Result<PairingReport> {
    if m.nrows() != m.ncols() || gram.nrows() != m.nrows() || gram.ncols() != m.ncols() {
        return Err(Error::Invalid("matrix and Gram dimensions must agree and be square".into()));
    }
    if linalg::hermitian_defect(gram) > 1e-8 * (1.0 + gram.norm()) {
        return Err(Error::Invalid("Gram matrix is not Hermitian".into()));
    }
    let unitary_defect = (m.adjoint() * gram * m - gram).norm() / (1.0 + gram.norm());
    if unitary_defect > 1e-8 * (1.0 + m.norm_squared()) {
        return Err(Error::Invalid(format!(
            "matrix is not pseudo-unitary for the given Gram matrix (defect {unitary_defect:.3e})"
        )));
    }

    let eigs = linalg::complex_eigenvalues(m)?;
    let targets: Vec<C64> = eigs.iter().map(|z| z.conj().inv()).collect();
    let mut used = vec![false; targets.len()];
    let mut order: Vec<usize> = (0..eigs.len()).collect();
    order.sort_by(|&a, &b| eigs[b].norm().partial_cmp(&eigs[a].norm()).unwrap());
    let mut max_defect: f64 = 0.0;
    for &i in &order {
        let mut best = f64::INFINITY;
        let mut best_j = usize::MAX;
        for (j, t) in targets.iter().enumerate() {
            if used[j] {
                continue;
            }
            let d = (eigs[i] - t).norm() / eigs[i].norm().max(1.0);
            if d < best {
                best = d;
                best_j = j;
            }
        }
        used[best_j] = true;
        max_defect = max_defect.max(best);
    }

    Ok(PairingReport { max_defect, eigenvalues: eigs.iter().map(|z| (z.re, z.im)).collect() })
}

/// Random pseudo-unitary matrix for an indefinite Hermitian Gram matrix,
/// via the Cayley transform of a `G`-anti-Hermitian generator.
pub fn random_pseudo_unitary(gram: &CMat, rng: &mut impl Rng, amplitude: f64) -> Result<CMat> {
    let n = gram.nrows();
    let g_inv = gram
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Invalid("Gram matrix is singular".into()))?;
    for _ in 0..8 {
        let s = {
            let raw = CMat::from_fn(n, n, |_, _| {
                C64::new(rng.gen_range(-amplitude..=amplitude), rng.gen_range(-amplitude..=amplitude))
            });
            linalg::hermitize(&raw)
        };
        // K = i G^{-1} S satisfies K^+ G = -G K.
        let k = &g_inv * s * C64::new(0.0, 1.0);
        let half = &k * C64::new(0.5, 0.0);
        let id = CMat::identity(n, n);
        if let Some(inv) = (&id - &half).try_inverse() {
            let m = inv * (&id + &half);
            let defect = (m.adjoint() * gram * &m - gram).norm() / (1.0 + gram.norm());
            if defect < 1e-10 * (1.0 + m.norm_squared()) {
                return Ok(m);
            }
        }
    }
    Err(Error::Internal("failed to draw a pseudo-unitary matrix".into()))
}

/// Spinor generator of a base-space isometry generator `r` (an element of
/// the Lie algebra of `SO(g)`), for composing lifted stabilizers in tests.
pub fn spinor_generator(rep: &GammaRep, g_inv: &RMat, r: &RMat) -> CMat {
    let n = rep.dim();
    let d = rep.spinor_dim();
    let raised = r * g_inv;
    let mut beta = CMat::zeros(d, d);
    for a in 0..n {
        for c in 0..n {
            if raised[(a, c)] != 0.0 {
                beta += rep.gamma(a) * rep.gamma(c) * C64::new(0.25 * raised[(a, c)], 0.0);
            }
        }
    }
    beta
}

/// Euclidean norm of a complex vector difference, used by tests.
pub fn spinor_distance(a: &CVec, b: &CVec) -> f64 {
    (a - b).norm()
}
