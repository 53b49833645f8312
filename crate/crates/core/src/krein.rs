//! Krein products on spinor space, fundamental symmetries built from
//! splittings, and the positive scalar products and operator norms they
//! induce.
//!
//! The Krein product is the indefinite pairing `(a, b) = a^+ H b` with `H`
//! the spinor metric.  A splitting of the base space determines a
//! fundamental symmetry `n` on spinors: an involution, self-adjoint for
//! the Krein product, such that `(., n .)` is positive definite.  It is
//! realized as `i^r` times the ordered Clifford product of a
//! pseudo-orthonormal basis of either the negative subspace `V` or its
//! orthocomplement.
//!
//! Which of the two sources applies, and which power of `i`, is not
//! guessed from a parity rule: all candidates (2 sources x 4 phases) are
//! tested against the three defining properties and the unique survivor is
//! returned.  In practice the search lands on the basis of `V` when `q` is
//! even and on the basis of the orthocomplement when `q` is odd, with the
//! overall sign fixed by positivity.

use crate::clifford::{build_spinor_metric, GammaRep, SpinorMetric};
use crate::doppler::Splitting;
use crate::linalg::{
    self, hermitian_defect, hermitize, i_pow, max_singular_value, CMat, CVec, RVec, C64,
};
use crate::{tol, Error, Result};

/// A gamma representation together with its spinor metric: the pointwise
/// indefinite product space.
#[derive(Clone, Debug)]
pub struct KreinProductSpace {
    rep: GammaRep,
    metric: SpinorMetric,
}

impl KreinProductSpace {
    pub fn new(rep: GammaRep) -> Result<Self> {
        let metric = build_spinor_metric(&rep)?;
        Ok(KreinProductSpace { rep, metric })
    }

    pub fn rep(&self) -> &GammaRep {
        &self.rep
    }

    pub fn h(&self) -> &CMat {
        self.metric.h()
    }

    pub fn spinor_metric(&self) -> &SpinorMetric {
        &self.metric
    }

    pub fn spinor_dim(&self) -> usize {
        self.rep.spinor_dim()
    }
}

/// Indefinite pairing `a^+ H b`.
pub fn krein_product(space: &KreinProductSpace, a: &CVec, b: &CVec) -> Result<C64> {
    let n = space.spinor_dim();
    if a.len() != n || b.len() != n {
        return Err(Error::Invalid(format!(
            "spinor dimension mismatch: expected {n}, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok((a.adjoint() * space.h() * b)[(0, 0)])
}

/// A fundamental symmetry tied to a splitting.
#[derive(Clone, Debug)]
pub struct FundSym {
    n: CMat,
    r_phase: usize,
    from_orthocomplement: bool,
    gram: CMat,
    gram_sqrt: CMat,
    gram_invsqrt: CMat,
    timelike_vector: Option<RVec>,
}

impl FundSym {
    pub fn n(&self) -> &CMat {
        &self.n
    }

    /// Power of `i` on the winning candidate (0..4; 2 or 3 indicate the
    /// orientation-reversed basis).
    pub fn r_phase(&self) -> usize {
        self.r_phase
    }

    /// True when the winning product ran over the orthocomplement basis.
    pub fn from_orthocomplement(&self) -> bool {
        self.from_orthocomplement
    }

    /// Gram matrix `H n` of the induced positive scalar product.
    pub fn gram(&self) -> &CMat {
        &self.gram
    }

    /// When the generating basis is a single vector, the oriented vector
    /// `u` with `n = i^(r mod 2) rho(u)`.
    pub fn timelike_vector(&self) -> Option<&RVec> {
        self.timelike_vector.as_ref()
    }

    /// Involution defect `|| n^2 - I ||`.
    pub fn involution_defect(&self) -> f64 {
        let d = self.n.nrows();
        (&self.n * &self.n - CMat::identity(d, d)).norm()
    }

    /// Krein-self-adjointness defect `|| H n - (H n)^+ ||`.
    pub fn krein_self_adjoint_defect(&self) -> f64 {
        hermitian_defect(&self.gram)
    }

    /// Smallest eigenvalue of the Gram matrix (positive definiteness).
    pub fn gram_min_eigenvalue(&self) -> f64 {
        linalg::herm_eigen(&self.gram).values.first().copied().unwrap_or(0.0)
    }
}

fn ordered_product(rep: &GammaRep, basis: &nalgebra::DMatrix<f64>) -> CMat {
    let n = rep.spinor_dim();
    let mut acc = CMat::identity(n, n);
    for j in 0..basis.ncols() {
        acc *= rep.vector_action(&basis.column(j).into_owned());
    }
    acc
}

/// Builds the fundamental symmetry of a splitting by exhaustive candidate
/// search.  Exactly one candidate may pass all three properties (up to the
/// sign resolved by positivity); anything else is an internal error.
pub fn fundamental_symmetry(space: &KreinProductSpace, split: &Splitting) -> Result<FundSym> {
    let rep = space.rep();
    let diag: Vec<f64> = rep.metric_signs().to_vec();
    let ms_ok = {
        let g = split.metric();
        g.nrows() == diag.len() && {
            let mut ok = true;
            for i in 0..g.nrows() {
                for j in 0..g.ncols() {
                    let want = if i == j { diag[i] } else { 0.0 };
                    if (g[(i, j)] - want).abs() > 1e-10 {
                        ok = false;
                    }
                }
            }
            ok
        }
    };
    if !ms_ok {
        return Err(Error::Invalid(
            "splitting metric does not match the representation's diagonal metric".into(),
        ));
    }

    let d = rep.spinor_dim();
    let id = CMat::identity(d, d);
    let h = space.h();
    let mut winners: Vec<(CMat, usize, bool)> = Vec::new();
    for (basis, from_perp) in [(split.basis_v(), false), (split.basis_perp(), true)] {
        let prod = ordered_product(rep, basis);
        for r in 0..4usize {
            let cand = &prod * i_pow(r);
            if (&cand * &cand - &id).norm() > tol::FUND_SYM {
                continue;
            }
            let gram = h * &cand;
            if hermitian_defect(&gram) > tol::FUND_SYM {
                continue;
            }
            let eig = linalg::herm_eigen(&gram);
            let min = eig.values.first().copied().unwrap_or(0.0);
            let max = eig.values.last().copied().unwrap_or(0.0);
            if !(min > tol::POSDEF_MIN_EIG * max.max(1.0)) {
                continue;
            }
            winners.push((cand, r, from_perp));
        }
    }
    // Collapse numerically identical candidates.
    let scale = (d as f64).sqrt();
    let mut distinct: Vec<(CMat, usize, bool)> = Vec::new();
    for w in winners {
        if !distinct.iter().any(|d0| (&d0.0 - &w.0).norm() < 1e-6 * scale) {
            distinct.push(w);
        }
    }
    if distinct.len() != 1 {
        return Err(Error::Internal(format!(
            "fundamental-symmetry search found {} essentially distinct candidates (expected 1)",
            distinct.len()
        )));
    }
    let (n, r_phase, from_orthocomplement) = distinct.pop().unwrap();

    let gram = hermitize(&(h * &n));
    let (gram_sqrt, gram_invsqrt) = linalg::hpd_sqrt_invsqrt(&gram, "fundamental-symmetry Gram")
        .map_err(|e| Error::Internal(e.to_string()))?;

    let source_basis = if from_orthocomplement { split.basis_perp() } else { split.basis_v() };
    let timelike_vector = if source_basis.ncols() == 1 {
        let u = source_basis.column(0).into_owned();
        Some(if r_phase >= 2 { -u } else { u })
    } else {
        None
    };

    Ok(FundSym { n, r_phase, from_orthocomplement, gram, gram_sqrt, gram_invsqrt, timelike_vector })
}

/// Positive scalar product `<a, b> = a^+ H n b`.
pub fn scalar_product(space: &KreinProductSpace, fs: &FundSym, a: &CVec, b: &CVec) -> Result<C64> {
    let n = space.spinor_dim();
    if a.len() != n || b.len() != n {
        return Err(Error::Invalid(format!(
            "spinor dimension mismatch: expected {n}, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok((a.adjoint() * &fs.gram * b)[(0, 0)])
}

/// Norm induced by the scalar product.
pub fn norm(space: &KreinProductSpace, fs: &FundSym, a: &CVec) -> Result<f64> {
    let v = scalar_product(space, fs, a, a)?;
    if v.im.abs() > 1e-9 * (1.0 + v.re.abs()) || v.re < -1e-12 {
        return Err(Error::Internal(format!("norm-square is not a nonnegative real: {v}")));
    }
    Ok(v.re.max(0.0).sqrt())
}

/// Operator norm with respect to the scalar product of `fs`: the largest
/// singular value of `G^{1/2} A G^{-1/2}`.
pub fn operator_norm(space: &KreinProductSpace, fs: &FundSym, a: &CMat) -> Result<f64> {
    let n = space.spinor_dim();
    if a.nrows() != n || a.ncols() != n {
        return Err(Error::Invalid(format!(
            "operator dimension mismatch: expected {n}x{n}, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(max_singular_value(&(&fs.gram_sqrt * a * &fs.gram_invsqrt)))
}

/// Same computation from an explicit Hermitian positive definite Gram
/// matrix; fails when the Gram matrix is not positive definite.
pub fn operator_norm_with_gram(gram: &CMat, a: &CMat) -> Result<f64> {
    if gram.nrows() != a.nrows() || gram.ncols() != a.ncols() {
        return Err(Error::Invalid("Gram and operator dimensions differ".into()));
    }
    let (s, si) = linalg::hpd_sqrt_invsqrt(&hermitize(gram), "operator-norm Gram")?;
    Ok(max_singular_value(&(s * a * si)))
}

/// Conjugate of the operator `m` into the orthonormal coordinates of the
/// `fs` scalar product (`G^{1/2} m G^{-1/2}`), where adjoints become plain
/// conjugate transposes.
pub fn to_orthonormal_frame(fs: &FundSym, m: &CMat) -> CMat {
    &fs.gram_sqrt * m * &fs.gram_invsqrt
}

/// Structural report for the product `T = n2 n1` of two timelike-type
/// fundamental symmetries (Lorentzian or anti-Lorentzian signature).
#[derive(Clone, Debug, serde::Serialize)]
pub struct TQuadraticReport {
    /// `|g(v1, v2)|` recovered from the oriented timelike generators.
    pub g12: f64,
    /// `|| T^2 - 2 g12 T + I ||`.
    pub residual: f64,
    /// The roots `g12 +- sqrt(g12^2 - 1)` the spectrum must consist of.
    pub predicted_eigenvalues: (f64, f64),
    /// Mismatch between the numerical spectrum of `T` and the roots.
    pub eigenvalue_defect: f64,
    /// Operator norm of `T` in the scalar product of `n2`.
    pub t_norm: f64,
}

/// Verifies the quadratic relation satisfied by `T = n2 n1` when both
/// fundamental symmetries come from timelike lines, and compares the
/// spectrum of `T` with its two predicted roots.
pub fn check_t_quadratic(
    space: &KreinProductSpace,
    fs1: &FundSym,
    fs2: &FundSym,
) -> Result<TQuadraticReport> {
    let sig = space.rep().sig();
    if sig.min_pq() != 1 {
        return Err(Error::Invalid(format!(
            "timelike-pair check requires Lorentzian or anti-Lorentzian signature, got ({},{})",
            sig.p(),
            sig.q()
        )));
    }
    let (v1, v2) = match (fs1.timelike_vector(), fs2.timelike_vector()) {
        (Some(a), Some(b)) => (a.clone(), b.clone()),
        _ => {
            return Err(Error::Internal(
                "fundamental symmetries do not carry single-vector generators".into(),
            ))
        }
    };
    let g = space.rep().metric_signs();
    let mut g12 = 0.0;
    for (k, &s) in g.iter().enumerate() {
        g12 += s * v1[k] * v2[k];
    }
    let c = g12.abs();

    let d = space.spinor_dim();
    let t = fs2.n() * fs1.n();
    let residual = (&t * &t - &t * C64::new(2.0 * c, 0.0) + CMat::identity(d, d)).norm();

    let disc = (c * c - 1.0).max(0.0).sqrt();
    let predicted = (c + disc, c - disc);

    let w = to_orthonormal_frame(fs2, &t);
    let eig = linalg::herm_eigen(&w);
    let spectrum: Vec<f64> = linalg::dedup_sorted_rel(eig.values.clone(), tol::SPECTRUM_MATCH);
    let eigenvalue_defect =
        linalg::hausdorff_rel(&spectrum, &linalg::dedup_sorted_rel(vec![predicted.0, predicted.1], tol::SPECTRUM_MATCH));
    let t_norm = eig.values.iter().fold(0.0f64, |a, &v| a.max(v.abs()));

    Ok(TQuadraticReport { g12: c, residual, predicted_eigenvalues: predicted, eigenvalue_defect, t_norm })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::{basis_spinor, build_gamma_rep, Signature};
    use crate::doppler::{
        boost_matrix, make_splitting, random_splitting, reference_splitting,
        timelike_complement_splitting, MetricSpace,
    };
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mink_space() -> (MetricSpace, KreinProductSpace) {
        let sig = Signature::new(1, 3).unwrap();
        let ms = MetricSpace::canonical(sig);
        let space = KreinProductSpace::new(build_gamma_rep(sig)).unwrap();
        (ms, space)
    }

    #[test]
    fn rest_fundamental_symmetry_is_gamma0() {
        let (ms, space) = mink_space();
        let split = reference_splitting(&ms).unwrap();
        let fs = fundamental_symmetry(&space, &split).unwrap();
        assert!((fs.n() - space.rep().gamma(0)).norm() < 1e-12);
        assert_eq!(fs.r_phase() % 2, 0);
        assert!(fs.from_orthocomplement());
        let v = fs.timelike_vector().unwrap();
        assert_relative_eq!(v[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn boosted_fundamental_symmetry_closed_form() {
        let (ms, space) = mink_space();
        let x0 = 0.8f64;
        let boost = boost_matrix(4, 0, 1, x0).unwrap();
        let split = make_splitting(&ms, &(&boost * reference_splitting(&ms).unwrap().basis_v())).unwrap();
        let fs = fundamental_symmetry(&space, &split).unwrap();
        let want = space.rep().gamma(0) * C64::new(x0.cosh(), 0.0)
            + space.rep().gamma(1) * C64::new(x0.sinh(), 0.0);
        assert!((fs.n() - want).norm() < 1e-10);
    }

    #[test]
    fn split_signature_fundamental_symmetry_properties() {
        let sig = Signature::new(2, 2).unwrap();
        let ms = MetricSpace::canonical(sig);
        let space = KreinProductSpace::new(build_gamma_rep(sig)).unwrap();
        let split = reference_splitting(&ms).unwrap();
        let fs = fundamental_symmetry(&space, &split).unwrap();
        assert!(fs.involution_defect() <= tol::FUND_SYM);
        assert!(fs.krein_self_adjoint_defect() <= tol::FUND_SYM);
        assert!(fs.gram_min_eigenvalue() > 0.0);
        assert!(!fs.from_orthocomplement(), "q even: product runs over the negative basis");
    }

    #[test]
    fn krein_product_diagonal_values() {
        let (ms, space) = mink_space();
        let _ = ms;
        let e1 = basis_spinor(4, 0);
        let e2 = basis_spinor(4, 1);
        let e3 = basis_spinor(4, 2);
        assert_relative_eq!(krein_product(&space, &e1, &e1).unwrap().re, 1.0, epsilon = 1e-14);
        assert_relative_eq!(krein_product(&space, &e3, &e3).unwrap().re, -1.0, epsilon = 1e-14);
        let cross = krein_product(&space, &e1, &e2).unwrap();
        assert!(cross.norm() < 1e-14);
        let bad = CVec::zeros(3);
        assert!(krein_product(&space, &bad, &e1).is_err());
    }

    #[test]
    fn scalar_product_examples() {
        let (ms, space) = mink_space();
        let split = reference_splitting(&ms).unwrap();
        let fs = fundamental_symmetry(&space, &split).unwrap();
        let e3 = basis_spinor(4, 2);
        assert_relative_eq!(norm(&space, &fs, &e3).unwrap(), 1.0, epsilon = 1e-12);

        // Boosted symmetry: the first basis spinor picks up cosh(x0).
        let x0 = 1.3f64;
        let boost = boost_matrix(4, 0, 1, x0).unwrap();
        let bsplit = make_splitting(&ms, &(&boost * split.basis_v())).unwrap();
        let bfs = fundamental_symmetry(&space, &bsplit).unwrap();
        let e1 = basis_spinor(4, 0);
        let got = scalar_product(&space, &bfs, &e1, &e1).unwrap();
        assert_relative_eq!(got.re, x0.cosh(), epsilon = 1e-10);
        assert!(got.im.abs() < 1e-12);
    }

    #[test]
    fn scalar_product_positive_and_hermitian_on_random_spinors() {
        let (ms, space) = mink_space();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let boost = boost_matrix(4, 0, 1, 0.9).unwrap();
        let split = make_splitting(&ms, &(&boost * reference_splitting(&ms).unwrap().basis_v())).unwrap();
        let fs = fundamental_symmetry(&space, &split).unwrap();
        for _ in 0..1000 {
            let a = CVec::from_fn(4, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let b = CVec::from_fn(4, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let aa = scalar_product(&space, &fs, &a, &a).unwrap();
            assert!(aa.re > 0.0);
            assert!(aa.im.abs() <= 1e-12 * (1.0 + aa.re));
            let ab = scalar_product(&space, &fs, &a, &b).unwrap();
            let ba = scalar_product(&space, &fs, &b, &a).unwrap();
            assert!((ab - ba.conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn operator_norm_examples() {
        let (ms, space) = mink_space();
        let split = reference_splitting(&ms).unwrap();
        let fs = fundamental_symmetry(&space, &split).unwrap();
        let id = CMat::identity(4, 4);
        assert_relative_eq!(operator_norm(&space, &fs, &id).unwrap(), 1.0, epsilon = 1e-12);

        // Explicit singular values through an identity Gram matrix.
        let a = CMat::from_diagonal(&CVec::from_vec(vec![
            C64::new(2.0, 0.0),
            C64::new(0.5, 0.0),
            C64::new(1.0, 0.0),
            C64::new(1.0, 0.0),
        ]));
        assert_relative_eq!(operator_norm_with_gram(&id, &a).unwrap(), 2.0, epsilon = 1e-12);

        let bad_gram = CMat::from_diagonal(&CVec::from_vec(vec![
            C64::new(1.0, 0.0),
            C64::new(-1.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(1.0, 0.0),
        ]));
        assert!(operator_norm_with_gram(&bad_gram, &a).is_err());
    }

    #[test]
    fn operator_norm_of_t_matches_closed_form() {
        let (ms, space) = mink_space();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..100 {
            let v1 = crate::doppler::random_unit_timelike(&ms, &mut rng, 2.5).unwrap();
            let v2 = crate::doppler::random_unit_timelike(&ms, &mut rng, 2.5).unwrap();
            let fs1 = fundamental_symmetry(&space, &timelike_complement_splitting(&ms, &v1).unwrap()).unwrap();
            let fs2 = fundamental_symmetry(&space, &timelike_complement_splitting(&ms, &v2).unwrap()).unwrap();
            let t = fs2.n() * fs1.n();
            let got = operator_norm(&space, &fs2, &t).unwrap();
            let g12 = ms.inner(&v1, &v2);
            let want = g12 + (g12 * g12 - 1.0).sqrt();
            assert!((got - want).abs() <= tol::DSF_CLOSED_FORM * want, "{got} vs {want}");
        }
    }

    #[test]
    fn operator_norm_submultiplicative() {
        let (ms, space) = mink_space();
        let split = reference_splitting(&ms).unwrap();
        let fs = fundamental_symmetry(&space, &split).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..100 {
            let a = CMat::from_fn(4, 4, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let b = CMat::from_fn(4, 4, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let na = operator_norm(&space, &fs, &a).unwrap();
            let nb = operator_norm(&space, &fs, &b).unwrap();
            let nab = operator_norm(&space, &fs, &(&a * &b)).unwrap();
            assert!(nab <= na * nb * (1.0 + 1e-12));
        }
    }

    #[test]
    fn t_quadratic_relation() {
        let (ms, space) = mink_space();
        let split = reference_splitting(&ms).unwrap();
        let fs1 = fundamental_symmetry(&space, &split).unwrap();
        // Same splitting: T = I, residual of I - 2I + I = 0.
        let rep0 = check_t_quadratic(&space, &fs1, &fs1).unwrap();
        assert!(rep0.residual < 1e-12);
        assert_relative_eq!(rep0.t_norm, 1.0, epsilon = 1e-12);

        let xi = 0.5f64;
        let v2 = RVec::from_vec(vec![xi.cosh(), xi.sinh(), 0.0, 0.0]);
        let fs2 = fundamental_symmetry(&space, &timelike_complement_splitting(&ms, &v2).unwrap()).unwrap();
        let rep = check_t_quadratic(&space, &fs1, &fs2).unwrap();
        assert!(rep.residual <= 1e-12 * 10.0);
        assert_relative_eq!(rep.g12, xi.cosh(), epsilon = 1e-12);
        assert_relative_eq!(rep.predicted_eigenvalues.0, xi.exp(), epsilon = 1e-12);
        assert_relative_eq!(rep.predicted_eigenvalues.1, (-xi).exp(), epsilon = 1e-12);
        assert!(rep.eigenvalue_defect <= 1e-10);
        assert_relative_eq!(rep.t_norm, xi.exp(), epsilon = 1e-10);

        // Non-Lorentzian signatures are rejected.
        let sig = Signature::new(2, 2).unwrap();
        let ms22 = MetricSpace::canonical(sig);
        let sp22 = KreinProductSpace::new(build_gamma_rep(sig)).unwrap();
        let f22 = fundamental_symmetry(&sp22, &reference_splitting(&ms22).unwrap()).unwrap();
        assert!(check_t_quadratic(&sp22, &f22, &f22).is_err());
    }

    #[test]
    fn triple_property_on_random_splittings() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for (p, q) in [(1usize, 1usize), (1, 3), (2, 2), (2, 4), (3, 3)] {
            let sig = Signature::new(p, q).unwrap();
            let ms = MetricSpace::canonical(sig);
            let space = KreinProductSpace::new(build_gamma_rep(sig)).unwrap();
            let reference = reference_splitting(&ms).unwrap();
            for _ in 0..500 {
                let split = random_splitting(&ms, &reference, &mut rng, 1.5).unwrap();
                let fs = fundamental_symmetry(&space, &split).unwrap();
                assert!(fs.involution_defect() <= tol::FUND_SYM, "sig ({p},{q})");
                assert!(fs.krein_self_adjoint_defect() <= tol::FUND_SYM);
                assert!(fs.gram_min_eigenvalue() > 0.0);
            }
        }
    }

    #[test]
    fn metric_mismatch_rejected() {
        let (_, space) = mink_space();
        let other = MetricSpace::canonical(Signature::new(2, 2).unwrap());
        let split = reference_splitting(&other).unwrap();
        assert!(fundamental_symmetry(&space, &split).is_err());
    }
}
