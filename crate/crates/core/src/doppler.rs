//! Maximal negative definite subspaces of an indefinite metric space, the
//! indefinite polar decomposition, and the generalized Doppler shift
//! factor.
//!
//! A splitting is a subspace `V` on which the metric `g` is negative
//! definite, of maximal dimension `q`.  It induces the orthogonal symmetry
//! `s` (+1 on the complement, -1 on `V`) and the positive definite twisted
//! metric `g_s(u,v) = g(su,v)`.  For two splittings `V1, V2` and any
//! special pseudo-orthogonal map `lambda` with `lambda V1 = V2`, the shift
//! factor is the `g_2`-operator norm of `lambda`; it is independent of the
//! choice of `lambda` and equals the spectral radius of the positive
//! factor `L` in the indefinite polar decomposition `lambda = O L`.
//!
//! Numerically everything is conjugated into the adapted pseudo-orthonormal
//! frame of the target splitting, where the twisted metric is exactly the
//! identity.  This avoids forming Gram-matrix square roots whose condition
//! number grows with the square of the relative rapidity.

use rand::Rng;

use crate::clifford::Signature;
use crate::linalg::{self, symmetric_defect, RMat, RVec};
use crate::{tol, Error, Result};

/// A real vector space with a nondegenerate symmetric bilinear form.
#[derive(Clone, Debug)]
pub struct MetricSpace {
    g: RMat,
    g_inv: RMat,
    sig: Signature,
}

impl MetricSpace {
    /// Validates symmetry and nondegeneracy and computes the inertia.
    pub fn new(g: RMat) -> Result<Self> {
        if g.nrows() != g.ncols() {
            return Err(Error::Invalid("metric matrix must be square".into()));
        }
        let scale = g.norm().max(1.0);
        if symmetric_defect(&g) > 1e-10 * scale {
            return Err(Error::Invalid("metric matrix must be symmetric".into()));
        }
        let g = linalg::symmetrize(&g);
        let eig = linalg::sym_eigen(&g);
        let max_abs = eig.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let mut p = 0;
        let mut q = 0;
        for &v in &eig.values {
            if v.abs() <= 1e-10 * max_abs {
                return Err(Error::Invalid("metric matrix is degenerate".into()));
            }
            if v > 0.0 {
                p += 1;
            } else {
                q += 1;
            }
        }
        let sig = Signature::new(p, q)?;
        let n = g.nrows();
        let d_inv = RMat::from_diagonal(&RVec::from_iterator(n, eig.values.iter().map(|&v| 1.0 / v)));
        let g_inv = &eig.vectors * d_inv * eig.vectors.transpose();
        Ok(MetricSpace { g, g_inv, sig })
    }

    pub fn from_diag(diag: &[f64]) -> Result<Self> {
        Self::new(RMat::from_diagonal(&RVec::from_vec(diag.to_vec())))
    }

    /// Minkowski metric `diag(+1, -1, ..., -1)` of the given dimension.
    pub fn minkowski(dim: usize) -> Result<Self> {
        let mut diag = vec![-1.0; dim];
        diag[0] = 1.0;
        Self::from_diag(&diag)
    }

    /// Canonical metric `diag(+1 x p, -1 x q)`.
    pub fn canonical(sig: Signature) -> Self {
        let mut diag = vec![1.0; sig.dim()];
        for d in diag.iter_mut().skip(sig.p()) {
            *d = -1.0;
        }
        Self::new(RMat::from_diagonal(&RVec::from_vec(diag))).expect("canonical metric is valid")
    }

    pub fn g(&self) -> &RMat {
        &self.g
    }

    pub fn g_inv(&self) -> &RMat {
        &self.g_inv
    }

    pub fn sig(&self) -> Signature {
        self.sig
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    pub fn inner(&self, u: &RVec, v: &RVec) -> f64 {
        (u.transpose() * &self.g * v)[(0, 0)]
    }

    /// True when `g` is diagonal with entries matching `signs`.
    pub fn matches_diag_signs(&self, signs: &[f64]) -> bool {
        if signs.len() != self.dim() {
            return false;
        }
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                let want = if i == j { signs[i] } else { 0.0 };
                if (self.g[(i, j)] - want).abs() > 1e-10 {
                    return false;
                }
            }
        }
        true
    }
}

/// Pivoted modified Gram-Schmidt in the inner product
/// `<a,b> = orientation * a^T form b`, which must be positive definite on
/// the span of the kept vectors.
fn pivoted_gram_schmidt(
    mut cols: Vec<RVec>,
    form: &RMat,
    orientation: f64,
    keep: usize,
    what: &str,
) -> Result<Vec<RVec>> {
    let ip = |a: &RVec, b: &RVec| orientation * (a.transpose() * form * b)[(0, 0)];
    let scale = cols.iter().map(|c| ip(c, c).abs()).fold(1.0f64, f64::max);
    let mut out: Vec<RVec> = Vec::with_capacity(keep);
    for _ in 0..keep {
        let (idx, best) = cols
            .iter()
            .enumerate()
            .map(|(i, c)| (i, ip(c, c)))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .ok_or_else(|| Error::Invalid(format!("{what}: not enough candidate vectors")))?;
        if best <= tol::GRAM_SCHMIDT * scale {
            return Err(Error::Invalid(format!(
                "{what}: candidate span is degenerate or of the wrong definiteness"
            )));
        }
        let u = cols.swap_remove(idx) / best.sqrt();
        for c in cols.iter_mut() {
            let pr = ip(&u, c);
            *c -= &u * pr;
        }
        out.push(u);
    }
    Ok(out)
}

fn cols_to_matrix(cols: &[RVec], n: usize) -> RMat {
    let k = cols.len();
    let mut m = RMat::zeros(n, k);
    for (j, c) in cols.iter().enumerate() {
        m.set_column(j, c);
    }
    m
}

/// A maximal negative definite subspace with its derived data.
///
/// `basis_v` holds a `g`-orthonormal basis of `V` (Gram `-I`), `basis_perp`
/// one of the orthocomplement (Gram `+I`).  `symmetry` is the orthogonal
/// symmetry `s`, `twisted` the positive definite matrix of `g_s`.
#[derive(Clone, Debug)]
pub struct Splitting {
    metric: RMat,
    basis_v: RMat,
    basis_perp: RMat,
    symmetry: RMat,
    twisted: RMat,
    frame: RMat,
    frame_inv: RMat,
}

impl Splitting {
    pub fn metric(&self) -> &RMat {
        &self.metric
    }

    pub fn basis_v(&self) -> &RMat {
        &self.basis_v
    }

    pub fn basis_perp(&self) -> &RMat {
        &self.basis_perp
    }

    pub fn symmetry(&self) -> &RMat {
        &self.symmetry
    }

    /// Matrix of the positive definite twisted metric `g_s`.
    pub fn twisted(&self) -> &RMat {
        &self.twisted
    }

    /// Adapted pseudo-orthonormal frame `[basis_perp | basis_v]` whose
    /// columns are also `g_s`-orthonormal.
    pub fn frame(&self) -> &RMat {
        &self.frame
    }

    pub fn frame_inv(&self) -> &RMat {
        &self.frame_inv
    }

    pub fn dim(&self) -> usize {
        self.metric.nrows()
    }

    pub fn neg_dim(&self) -> usize {
        self.basis_v.ncols()
    }

    /// The `g`-orthogonal projector onto `V`.
    pub fn projector_v(&self) -> RMat {
        -(&self.basis_v * self.basis_v.transpose() * &self.metric)
    }

    /// Frobenius distance between the projectors of two splittings; zero
    /// exactly when the subspaces coincide.
    pub fn subspace_defect(&self, other: &Splitting) -> f64 {
        (self.projector_v() - other.projector_v()).norm()
    }

    /// Operator norm with respect to the twisted metric.  In the adapted
    /// frame `g_s` is the identity, so this is a plain largest singular
    /// value after conjugation.
    pub fn op_norm_twisted(&self, m: &RMat) -> f64 {
        linalg::max_singular_value_real(&(&self.frame_inv * m * &self.frame))
    }
}

/// Builds a [`Splitting`] from a candidate basis (columns spanning `V`).
///
/// The candidate is orthonormalized against `-g`; the call rejects spans
/// that are not negative definite and bases whose column count differs
/// from the negative inertia index `q`.
pub fn make_splitting(ms: &MetricSpace, candidate: &RMat) -> Result<Splitting> {
    let n = ms.dim();
    let q = ms.sig().q();
    if candidate.nrows() != n {
        return Err(Error::Invalid(format!(
            "candidate basis has {} rows, metric dimension is {n}",
            candidate.nrows()
        )));
    }
    if candidate.ncols() != q {
        return Err(Error::Invalid(format!(
            "candidate basis has {} columns; a maximal negative definite subspace has dimension {q}",
            candidate.ncols()
        )));
    }
    if q > 0 {
        let gram = candidate.transpose() * ms.g() * candidate;
        let eig = linalg::sym_eigen(&gram);
        let scale = eig.values.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        if eig.values.iter().any(|&v| v >= -tol::GRAM_SCHMIDT * scale) {
            return Err(Error::Invalid(
                "candidate span is not negative definite under the metric".into(),
            ));
        }
    }
    let cand_cols: Vec<RVec> = (0..q).map(|j| candidate.column(j).into_owned()).collect();
    let v_cols = pivoted_gram_schmidt(cand_cols, ms.g(), -1.0, q, "negative-definite basis")?;
    let basis_v = cols_to_matrix(&v_cols, n);

    // g-orthogonal projector onto the complement, fed column by column.
    let p_perp = RMat::identity(n, n) + &basis_v * basis_v.transpose() * ms.g();
    let perp_cols: Vec<RVec> = (0..n).map(|j| p_perp.column(j).into_owned()).collect();
    let w_cols = pivoted_gram_schmidt(perp_cols, ms.g(), 1.0, ms.sig().p(), "orthocomplement basis")?;
    let basis_perp = cols_to_matrix(&w_cols, n);

    let symmetry = RMat::identity(n, n) + (&basis_v * basis_v.transpose() * ms.g()).scale(2.0);
    let twisted = linalg::symmetrize(&(symmetry.transpose() * ms.g()));

    let mut frame = RMat::zeros(n, n);
    for j in 0..ms.sig().p() {
        frame.set_column(j, &basis_perp.column(j));
    }
    for j in 0..q {
        frame.set_column(ms.sig().p() + j, &basis_v.column(j));
    }
    let frame_inv = frame
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Internal("adapted frame is singular".into()))?;

    let split = Splitting { metric: ms.g().clone(), basis_v, basis_perp, symmetry, twisted, frame, frame_inv };

    // Structural sanity: s^2 = I and g_s positive definite.
    let s2 = split.symmetry() * split.symmetry();
    if (s2 - RMat::identity(n, n)).norm() > 1e-8 {
        return Err(Error::Internal("orthogonal symmetry does not square to the identity".into()));
    }
    Ok(split)
}

/// The deterministic reference splitting: for a diagonal metric the span
/// of the negative coordinate axes, otherwise the span of the negative
/// eigenvectors.
pub fn reference_splitting(ms: &MetricSpace) -> Result<Splitting> {
    let n = ms.dim();
    let mut diag_ok = true;
    for i in 0..n {
        for j in 0..n {
            if i != j && ms.g()[(i, j)].abs() > 1e-12 {
                diag_ok = false;
            }
        }
    }
    let q = ms.sig().q();
    let mut cols: Vec<RVec> = Vec::with_capacity(q);
    if diag_ok {
        for i in 0..n {
            if ms.g()[(i, i)] < 0.0 {
                let mut e = RVec::zeros(n);
                e[i] = 1.0;
                cols.push(e);
            }
        }
    } else {
        let eig = linalg::sym_eigen(ms.g());
        for (k, &v) in eig.values.iter().enumerate() {
            if v < 0.0 {
                cols.push(eig.vectors.column(k).into_owned());
            }
        }
    }
    make_splitting(ms, &cols_to_matrix(&cols, n))
}

/// Splitting of a Lorentzian space (`p = 1`) orthogonal to a timelike
/// vector: `V = v^perp`.  The vector need not be normalized, only
/// timelike (`g(v,v) > 0`).
pub fn timelike_complement_splitting(ms: &MetricSpace, v: &RVec) -> Result<Splitting> {
    if ms.sig().p() != 1 {
        return Err(Error::Invalid(
            "timelike-complement splittings require exactly one positive direction".into(),
        ));
    }
    let vv = ms.inner(v, v);
    if vv <= tol::GRAM_SCHMIDT {
        return Err(Error::Invalid(format!("vector is not timelike: g(v,v) = {vv:.6e}")));
    }
    let n = ms.dim();
    let u = v / vv.sqrt();
    let mut cols: Vec<RVec> = Vec::with_capacity(n);
    for i in 0..n {
        let mut e = RVec::zeros(n);
        e[i] = 1.0;
        let pr = ms.inner(&u, &e);
        cols.push(e - &u * pr);
    }
    let picked = pivoted_gram_schmidt(cols, ms.g(), -1.0, ms.sig().q(), "timelike complement")?;
    make_splitting(ms, &cols_to_matrix(&picked, n))
}

/// Builds `lambda` in `SO(g)` mapping one splitting onto another by
/// sending the adapted frame of the first onto that of the second; a
/// determinant of -1 is corrected by flipping one orthocomplement frame
/// vector.
pub fn connecting_map(ms: &MetricSpace, s1: &Splitting, s2: &Splitting) -> Result<RMat> {
    let mut frame2 = s2.frame().clone();
    let lambda = &frame2 * s1.frame_inv();
    if lambda.determinant() < 0.0 {
        // Flip one target frame vector; the frame ordering puts the
        // orthocomplement first, so for p > 0 this stays inside V2-perp
        // and the map still sends V1 onto V2.
        let col = frame2.column(0).into_owned();
        frame2.set_column(0, &(-col));
        let lambda = &frame2 * s1.frame_inv();
        return check_connecting(ms, s1, s2, lambda);
    }
    check_connecting(ms, s1, s2, lambda)
}

fn check_connecting(ms: &MetricSpace, s1: &Splitting, s2: &Splitting, lambda: RMat) -> Result<RMat> {
    let defect = (lambda.transpose() * ms.g() * &lambda - ms.g()).norm();
    let scale = ms.g().norm().max(1.0);
    if defect > 1e-8 * scale {
        return Err(Error::Internal(format!(
            "connecting map is not pseudo-orthogonal (defect {defect:.3e})"
        )));
    }
    let det = lambda.determinant();
    if (det - 1.0).abs() > 1e-8 {
        return Err(Error::Internal(format!("connecting map determinant {det} is not +1")));
    }
    let mapped = &lambda * s1.projector_v() * lambda
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Internal("connecting map is singular".into()))?;
    if (mapped - s2.projector_v()).norm() > 1e-7 {
        return Err(Error::Internal("connecting map does not send V1 onto V2".into()));
    }
    Ok(lambda)
}

/// Residuals recorded during a polar decomposition, all Frobenius norms.
#[derive(Clone, Debug, serde::Serialize)]
pub struct PolarResiduals {
    pub reconstruction: f64,
    pub lambda_pseudo_orthogonal: f64,
    pub o_pseudo_orthogonal: f64,
    pub o_twisted_orthogonal: f64,
    pub l_pseudo_orthogonal: f64,
    pub det_defect: f64,
    pub spectrum_inversion: f64,
}

/// The indefinite polar decomposition `lambda = O L` relative to a target
/// splitting, with `O` in `SO(g) ∩ SO(g_2)` and `L` positive
/// `g_2`-self-adjoint.
#[derive(Clone, Debug)]
pub struct PolarParts {
    pub lambda: RMat,
    pub o: RMat,
    pub l: RMat,
    /// Eigenvalues of `L`, descending; closed under inversion.
    pub spectrum_l: Vec<f64>,
    pub residuals: PolarResiduals,
    pub(crate) metric: RMat,
    pub(crate) g_inv: RMat,
    pub(crate) frame2: RMat,
    pub(crate) frame2_inv: RMat,
}

impl PolarParts {
    /// Spectral radius of `L`, which is the shift factor.
    pub fn spectral_radius(&self) -> f64 {
        self.spectrum_l.first().copied().unwrap_or(1.0)
    }

    pub fn metric(&self) -> &RMat {
        &self.metric
    }
}

/// Computes `lambda = O L` in the adapted frame of `split2`, where the
/// twisted metric is the identity and `lambda* lambda` becomes a symmetric
/// positive definite matrix whose principal square root is `L`.
pub fn polar_decompose(ms: &MetricSpace, split2: &Splitting, lambda: &RMat) -> Result<PolarParts> {
    let n = ms.dim();
    let scale = ms.g().norm().max(1.0);
    let lambda_so = (lambda.transpose() * ms.g() * lambda - ms.g()).norm();
    if lambda_so > 1e-7 * scale {
        return Err(Error::Invalid(format!(
            "map is not pseudo-orthogonal for the given metric (defect {lambda_so:.3e})"
        )));
    }

    // In frame coordinates: adjoint with respect to g_2 is plain transpose.
    let lf = split2.frame_inv() * lambda * split2.frame();
    let c = lf.transpose() * &lf;
    let sym_def = symmetric_defect(&c);
    let m = linalg::symmetrize(&c);
    let eig = linalg::sym_eigen(&m);
    let max = eig.values.last().copied().unwrap_or(0.0);
    if sym_def > 1e-7 * max.max(1.0)
        || eig.values.first().copied().unwrap_or(0.0) <= tol::POSDEF_MIN_EIG * max.max(1.0)
    {
        return Err(Error::Invalid(
            "lambda*lambda is not positive in the twisted inner product; \
             the map does not connect two valid splittings"
                .into(),
        ));
    }
    let k = eig.values.len();
    let sqrt_d = RMat::from_diagonal(&RVec::from_iterator(k, eig.values.iter().map(|v| v.sqrt())));
    let inv_sqrt_d =
        RMat::from_diagonal(&RVec::from_iterator(k, eig.values.iter().map(|v| 1.0 / v.sqrt())));
    let l_frame = &eig.vectors * sqrt_d * eig.vectors.transpose();
    let l_inv_frame = &eig.vectors * inv_sqrt_d * eig.vectors.transpose();
    let o_frame = &lf * &l_inv_frame;

    let l = split2.frame() * &l_frame * split2.frame_inv();
    let o = split2.frame() * &o_frame * split2.frame_inv();

    let mut spectrum_l: Vec<f64> = eig.values.iter().map(|v| v.sqrt()).collect();
    spectrum_l.sort_by(|a, b| b.partial_cmp(a).unwrap());

    // Closure of the spectrum under inversion: sorted descending, the
    // k-th and (n-1-k)-th entries must multiply to 1.
    let mut inv_defect: f64 = 0.0;
    for i in 0..spectrum_l.len() {
        inv_defect = inv_defect.max((spectrum_l[i] * spectrum_l[spectrum_l.len() - 1 - i] - 1.0).abs());
    }

    let residuals = PolarResiduals {
        reconstruction: (&o * &l - lambda).norm() / (1.0 + lambda.norm()),
        lambda_pseudo_orthogonal: lambda_so,
        o_pseudo_orthogonal: (o.transpose() * ms.g() * &o - ms.g()).norm(),
        o_twisted_orthogonal: (o_frame.transpose() * &o_frame - RMat::identity(n, n)).norm(),
        l_pseudo_orthogonal: (l.transpose() * ms.g() * &l - ms.g()).norm()
            / (1.0 + (l.transpose() * ms.g() * &l).norm()),
        det_defect: (lambda.determinant() - 1.0).abs(),
        spectrum_inversion: inv_defect,
    };

    Ok(PolarParts {
        lambda: lambda.clone(),
        o,
        l,
        spectrum_l,
        residuals,
        metric: ms.g().clone(),
        g_inv: ms.g_inv().clone(),
        frame2: split2.frame().clone(),
        frame2_inv: split2.frame_inv().clone(),
    })
}

/// Shift factor between two splittings and its polar data.
#[derive(Clone, Debug)]
pub struct DsfResult {
    pub dsf: f64,
    pub rapidity: f64,
    pub polar: PolarParts,
    /// `|| lambda* lambda - s2 s1 ||`, an identity that holds exactly when
    /// `lambda` sends `V1` to `V2`.
    pub star_identity: f64,
    /// Distance between `L(V1)` and `V2`.
    pub l_maps_v1_to_v2: f64,
}

/// Doppler shift factor between two maximal negative definite subspaces:
/// the spectral radius of the canonical positive factor.
pub fn dsf(ms: &MetricSpace, s1: &Splitting, s2: &Splitting) -> Result<DsfResult> {
    let lambda = connecting_map(ms, s1, s2)?;
    let polar = polar_decompose(ms, s2, &lambda)?;

    let lf = s2.frame_inv() * &lambda * s2.frame();
    let c = lf.transpose() * &lf;
    let s2s1_frame = s2.frame_inv() * s2.symmetry() * s1.symmetry() * s2.frame();
    let star_identity = (c - s2s1_frame).norm();

    let l_inv = polar
        .l
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Internal("positive polar factor is singular".into()))?;
    let mapped = &polar.l * s1.projector_v() * l_inv;
    let l_maps = (mapped - s2.projector_v()).norm();

    let dsf = polar.spectral_radius();
    Ok(DsfResult { dsf, rapidity: dsf.max(1.0).ln(), polar, star_identity, l_maps_v1_to_v2: l_maps })
}

/// Lorentzian closed form: for co-oriented unit timelike vectors with
/// inner product `c >= 1` the shift factor is `c + sqrt(c^2 - 1)`.
pub fn dsf_lorentzian(g12: f64) -> Result<f64> {
    if g12 < 1.0 - tol::TIMELIKE_SLACK {
        return Err(Error::Invalid(format!(
            "inner product {g12} is below 1; vectors are not co-oriented unit timelike"
        )));
    }
    let c = g12.max(1.0);
    Ok(c + (c * c - 1.0).sqrt())
}

/// Hyperbolic rotation by `rapidity` in the plane of a +1 axis and a -1
/// axis of a diagonal metric; an element of `SO(g)`.
pub fn boost_matrix(dim: usize, plus_axis: usize, minus_axis: usize, rapidity: f64) -> Result<RMat> {
    if plus_axis >= dim || minus_axis >= dim || plus_axis == minus_axis {
        return Err(Error::Invalid("boost axes must be distinct and in range".into()));
    }
    let mut m = RMat::identity(dim, dim);
    m[(plus_axis, plus_axis)] = rapidity.cosh();
    m[(minus_axis, minus_axis)] = rapidity.cosh();
    m[(plus_axis, minus_axis)] = rapidity.sinh();
    m[(minus_axis, plus_axis)] = rapidity.sinh();
    Ok(m)
}

/// Random element of the Lie algebra of `SO(g)`: `g^{-1} A` with `A`
/// antisymmetric, entries uniform in `[-amplitude, amplitude]`.
pub fn random_so_g_generator(ms: &MetricSpace, rng: &mut impl Rng, amplitude: f64) -> RMat {
    let n = ms.dim();
    let mut a = RMat::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let x = rng.gen_range(-amplitude..=amplitude);
            a[(i, j)] = x;
            a[(j, i)] = -x;
        }
    }
    ms.g_inv() * a
}

/// Random pseudo-orthogonal map, `exp` of a random generator.
pub fn random_pseudo_orthogonal(ms: &MetricSpace, rng: &mut impl Rng, amplitude: f64) -> RMat {
    random_so_g_generator(ms, rng, amplitude).exp()
}

/// Random splitting: a random pseudo-orthogonal map applied to a
/// reference splitting.
pub fn random_splitting(
    ms: &MetricSpace,
    reference: &Splitting,
    rng: &mut impl Rng,
    amplitude: f64,
) -> Result<Splitting> {
    let lambda = random_pseudo_orthogonal(ms, rng, amplitude);
    make_splitting(ms, &(&lambda * reference.basis_v()))
}

/// Random generator of the stabilizer of a splitting inside
/// `SO(g) ∩ SO(g_s)`: block antisymmetric in the adapted frame.
pub fn random_stabilizer_generator(split: &Splitting, rng: &mut impl Rng, amplitude: f64) -> RMat {
    let n = split.dim();
    let p = n - split.neg_dim();
    let mut a = RMat::zeros(n, n);
    let mut fill = |lo: usize, hi: usize, a: &mut RMat| {
        for i in lo..hi {
            for j in (i + 1)..hi {
                let x = rng.gen_range(-amplitude..=amplitude);
                a[(i, j)] = x;
                a[(j, i)] = -x;
            }
        }
    };
    fill(0, p, &mut a);
    fill(p, n, &mut a);
    split.frame() * a * split.frame_inv()
}

/// Random element of `SO(g) ∩ SO(g_s)` stabilizing the splitting.
pub fn random_stabilizer(split: &Splitting, rng: &mut impl Rng, amplitude: f64) -> RMat {
    random_stabilizer_generator(split, rng, amplitude).exp()
}

/// Random future-directed unit timelike vector for a canonical Lorentzian
/// metric (`p = 1`, first axis positive): rapidity uniform in
/// `[0, max_rapidity]`, direction uniform on the sphere.
pub fn random_unit_timelike(ms: &MetricSpace, rng: &mut impl Rng, max_rapidity: f64) -> Result<RVec> {
    if ms.sig().p() != 1 {
        return Err(Error::Invalid("unit timelike draws require a Lorentzian metric".into()));
    }
    let mut signs = vec![-1.0; ms.dim()];
    signs[0] = 1.0;
    if !ms.matches_diag_signs(&signs) {
        return Err(Error::Invalid("unit timelike draws require the canonical diagonal metric".into()));
    }
    let q = ms.sig().q();
    let xi = rng.gen_range(0.0..=max_rapidity);
    let mut dir = RVec::zeros(q);
    loop {
        for k in 0..q {
            dir[k] = rng.gen_range(-1.0..=1.0);
        }
        let norm = dir.norm();
        if norm > 0.1 {
            dir /= norm;
            break;
        }
    }
    let mut v = RVec::zeros(ms.dim());
    v[0] = xi.cosh();
    for k in 0..q {
        v[1 + k] = xi.sinh() * dir[k];
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn mink4() -> MetricSpace {
        MetricSpace::minkowski(4).unwrap()
    }

    fn spatial_basis() -> RMat {
        let mut b = RMat::zeros(4, 3);
        b[(1, 0)] = 1.0;
        b[(2, 1)] = 1.0;
        b[(3, 2)] = 1.0;
        b
    }

    #[test]
    fn rest_splitting_has_expected_symmetry() {
        let ms = mink4();
        let s = make_splitting(&ms, &spatial_basis()).unwrap();
        let want = RMat::from_diagonal(&RVec::from_vec(vec![1.0, -1.0, -1.0, -1.0]));
        assert!((s.symmetry() - want).norm() < 1e-12);
        assert!((s.twisted() - RMat::identity(4, 4)).norm() < 1e-12);
    }

    #[test]
    fn boosted_splitting_symmetry_squares_to_identity() {
        let ms = mink4();
        let boost = boost_matrix(4, 0, 1, 0.8).unwrap();
        let s = make_splitting(&ms, &(&boost * spatial_basis())).unwrap();
        let s2 = s.symmetry() * s.symmetry();
        assert!((s2 - RMat::identity(4, 4)).norm() < 1e-12);
        let conj = &boost
            * RMat::from_diagonal(&RVec::from_vec(vec![1.0, -1.0, -1.0, -1.0]))
            * boost.try_inverse().unwrap();
        assert!((s.symmetry() - conj).norm() < 1e-10);
    }

    #[test]
    fn positive_direction_in_candidate_rejected() {
        let ms = mink4();
        let mut b = spatial_basis();
        b[(0, 0)] = 1.0;
        b[(1, 0)] = 0.0;
        assert!(make_splitting(&ms, &b).is_err());
    }

    #[test]
    fn wrong_column_count_rejected() {
        let ms = mink4();
        let b = spatial_basis().columns(0, 2).into_owned();
        assert!(make_splitting(&ms, &b).is_err());
    }

    #[test]
    fn identity_connects_equal_splittings() {
        let ms = mink4();
        let s = make_splitting(&ms, &spatial_basis()).unwrap();
        let lambda = connecting_map(&ms, &s, &s).unwrap();
        let d = dsf(&ms, &s, &s).unwrap();
        assert!((lambda.transpose() * ms.g() * &lambda - ms.g()).norm() < 1e-10);
        assert_relative_eq!(d.dsf, 1.0, epsilon = 1e-12);
        assert!((d.polar.l - RMat::identity(4, 4)).norm() < 1e-10);
    }

    #[test]
    fn lorentz_pair_matches_closed_form() {
        let ms = mink4();
        let xi = std::f64::consts::LN_2;
        let s1 = reference_splitting(&ms).unwrap();
        let boost = boost_matrix(4, 0, 1, xi).unwrap();
        let s2 = make_splitting(&ms, &(&boost * s1.basis_v())).unwrap();
        let d = dsf(&ms, &s1, &s2).unwrap();
        // g(v1, v2) = cosh(ln 2) = 1.25, shift factor 1.25 + 0.75 = 2.
        assert_relative_eq!(d.dsf, 2.0, epsilon = 1e-10);
        assert_relative_eq!(d.rapidity, xi, epsilon = 1e-10);
        let spec = &d.polar.spectrum_l;
        assert_relative_eq!(spec[0], 2.0, epsilon = 1e-10);
        assert_relative_eq!(spec[3], 0.5, epsilon = 1e-10);
        assert_relative_eq!(spec[1], 1.0, epsilon = 1e-10);
        assert!(d.star_identity < 1e-10);
        assert!(d.l_maps_v1_to_v2 < 1e-8);
    }

    #[test]
    fn two_plane_boost_in_split_signature() {
        let sig = Signature::new(2, 2).unwrap();
        let ms = MetricSpace::canonical(sig);
        let s2 = reference_splitting(&ms).unwrap();
        let lambda = boost_matrix(4, 0, 2, 0.3).unwrap() * boost_matrix(4, 1, 3, 0.7).unwrap();
        let s1 = make_splitting(&ms, &(lambda.clone().try_inverse().unwrap() * s2.basis_v())).unwrap();
        let d = dsf(&ms, &s1, &s2).unwrap();
        assert_relative_eq!(d.dsf, 0.7f64.exp(), epsilon = 1e-10);
        let want = [0.7f64.exp(), 0.3f64.exp(), (-0.3f64).exp(), (-0.7f64).exp()];
        for (got, want) in d.polar.spectrum_l.iter().zip(want) {
            assert_relative_eq!(*got, want, epsilon = 1e-10);
        }
        // Direct polar decomposition of the two-plane boost itself: it is
        // already positive, so L = lambda and O = I.
        let polar = polar_decompose(&ms, &s2, &lambda).unwrap();
        assert!((polar.o.clone() - RMat::identity(4, 4)).norm() < 1e-9);
        assert!((polar.l.clone() - &lambda).norm() < 1e-9);
    }

    #[test]
    fn dsf_closed_form_examples() {
        assert_relative_eq!(dsf_lorentzian(1.0).unwrap(), 1.0);
        assert_relative_eq!(dsf_lorentzian(1.25).unwrap(), 2.0, epsilon = 1e-14);
        assert!(dsf_lorentzian(0.5).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let xi: f64 = rng.gen_range(0.0..=5.0);
            let got = dsf_lorentzian(xi.cosh()).unwrap();
            assert_relative_eq!(got, xi.exp(), max_relative = 1e-12);
        }
    }

    #[test]
    fn random_pairs_symmetry_and_stability() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for sig in [Signature::new(1, 3).unwrap(), Signature::new(2, 2).unwrap()] {
            let ms = MetricSpace::canonical(sig);
            let reference = reference_splitting(&ms).unwrap();
            for _ in 0..40 {
                let a = random_splitting(&ms, &reference, &mut rng, 1.5).unwrap();
                let b = random_splitting(&ms, &reference, &mut rng, 1.5).unwrap();
                let fwd = dsf(&ms, &a, &b).unwrap();
                let bwd = dsf(&ms, &b, &a).unwrap();
                assert!(fwd.dsf >= 1.0 - 1e-12);
                assert!(
                    (fwd.dsf - bwd.dsf).abs() <= tol::DSF_CLOSED_FORM,
                    "symmetry defect {:.3e}",
                    (fwd.dsf - bwd.dsf).abs()
                );
                // Lemma-style independence: perturbing by a stabilizer of
                // the target leaves the norm unchanged.
                let o = random_stabilizer(&b, &mut rng, 0.8);
                let lambda = connecting_map(&ms, &a, &b).unwrap();
                let polar2 = polar_decompose(&ms, &b, &(&o * &lambda)).unwrap();
                assert!((polar2.spectral_radius() - fwd.dsf).abs() <= tol::DSF_CLOSED_FORM);
                // Operator-norm route agrees with the spectral radius.
                assert!((b.op_norm_twisted(&lambda) - fwd.dsf).abs() <= 1e-9 * fwd.dsf);
                // Eigenvalues above 1 cannot outnumber min(p, q).
                let above = fwd.polar.spectrum_l.iter().filter(|&&x| x > 1.0 + 1e-8).count();
                assert!(above <= sig.min_pq());
            }
        }
    }

    #[test]
    fn random_lorentzian_pairs_match_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let ms = mink4();
        for _ in 0..60 {
            let v1 = random_unit_timelike(&ms, &mut rng, 3.0).unwrap();
            let v2 = random_unit_timelike(&ms, &mut rng, 3.0).unwrap();
            let s1 = timelike_complement_splitting(&ms, &v1).unwrap();
            let s2 = timelike_complement_splitting(&ms, &v2).unwrap();
            let d = dsf(&ms, &s1, &s2).unwrap();
            let closed = dsf_lorentzian(ms.inner(&v1, &v2)).unwrap();
            assert!(
                (d.dsf - closed).abs() <= tol::DSF_CLOSED_FORM,
                "polar {} vs closed {}",
                d.dsf,
                closed
            );
        }
    }

    #[test]
    fn dsf_one_iff_subspaces_coincide() {
        let ms = mink4();
        let s1 = reference_splitting(&ms).unwrap();
        let boost = boost_matrix(4, 0, 1, 1e-3).unwrap();
        let s2 = make_splitting(&ms, &(&boost * s1.basis_v())).unwrap();
        let d = dsf(&ms, &s1, &s2).unwrap();
        assert!(d.dsf > 1.0 + 1e-4);
        assert!(s1.subspace_defect(&s2) > tol::SUBSPACE_COINCIDE);
        let d_same = dsf(&ms, &s1, &s1).unwrap();
        assert!(d_same.dsf <= 1.0 + 1e-12);
        assert!(s1.subspace_defect(&s1) <= tol::SUBSPACE_COINCIDE);
    }

    #[test]
    fn metric_space_rejects_bad_input() {
        assert!(MetricSpace::new(RMat::from_row_slice(2, 2, &[1.0, 0.5, -0.5, 1.0])).is_err());
        assert!(MetricSpace::from_diag(&[1.0, 0.0]).is_err());
        assert!(MetricSpace::from_diag(&[1.0, -1.0, 1.0]).is_err());
    }

    #[test]
    fn non_diagonal_metric_supported() {
        // Same bilinear form as Minkowski 2D but written in a sheared basis.
        let ms = MetricSpace::new(RMat::from_row_slice(2, 2, &[1.0, 0.5, 0.5, -0.75])).unwrap();
        assert_eq!(ms.sig().p(), 1);
        assert_eq!(ms.sig().q(), 1);
        let r = reference_splitting(&ms).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_splitting(&ms, &r, &mut rng, 1.0).unwrap();
        let b = random_splitting(&ms, &r, &mut rng, 1.0).unwrap();
        let fwd = dsf(&ms, &a, &b).unwrap();
        let bwd = dsf(&ms, &b, &a).unwrap();
        assert!((fwd.dsf - bwd.dsf).abs() < 1e-10);
    }
}
