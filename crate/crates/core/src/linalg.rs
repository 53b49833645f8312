//! Small dense linear-algebra helpers on top of `nalgebra`.
//!
//! Everything here is deterministic: identical inputs produce bit-identical
//! outputs, which the reporting layer relies on.

use nalgebra::{Complex, DMatrix, DVector};

use crate::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;
pub type RMat = DMatrix<f64>;
pub type RVec = DVector<f64>;

pub const IM: C64 = Complex::new(0.0, 1.0);
pub const ONE: C64 = Complex::new(1.0, 0.0);

/// i^r, r taken mod 4.
pub fn i_pow(r: usize) -> C64 {
    match r % 4 {
        0 => Complex::new(1.0, 0.0),
        1 => Complex::new(0.0, 1.0),
        2 => Complex::new(-1.0, 0.0),
        _ => Complex::new(0.0, -1.0),
    }
}

pub fn to_complex(m: &RMat) -> CMat {
    m.map(|x| Complex::new(x, 0.0))
}

pub fn to_complex_vec(v: &RVec) -> CVec {
    v.map(|x| Complex::new(x, 0.0))
}

/// Frobenius distance to the adjoint.
pub fn hermitian_defect(m: &CMat) -> f64 {
    (m - m.adjoint()).norm()
}

/// Frobenius distance to the transpose.
pub fn symmetric_defect(m: &RMat) -> f64 {
    (m - m.transpose()).norm()
}

pub fn hermitize(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

pub fn symmetrize(m: &RMat) -> RMat {
    (m + m.transpose()).scale(0.5)
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues sorted
/// ascending and eigenvector columns permuted to match.
pub struct HermEigen {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

pub fn herm_eigen(m: &CMat) -> HermEigen {
    let se = hermitize(m).symmetric_eigen();
    let n = se.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap());
    let values: Vec<f64> = order.iter().map(|&k| se.eigenvalues[k]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &se.eigenvectors.column(src));
    }
    HermEigen { values, vectors }
}

/// Real symmetric analogue of [`herm_eigen`].
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: RMat,
}

pub fn sym_eigen(m: &RMat) -> SymEigen {
    let se = symmetrize(m).symmetric_eigen();
    let n = se.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap());
    let values: Vec<f64> = order.iter().map(|&k| se.eigenvalues[k]).collect();
    let mut vectors = RMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &se.eigenvectors.column(src));
    }
    SymEigen { values, vectors }
}

/// Applies `f` to the spectrum of a symmetric positive definite matrix.
/// Fails when the smallest eigenvalue is not safely positive.
pub fn spd_map(m: &RMat, f: impl Fn(f64) -> f64, what: &str) -> Result<RMat> {
    let eig = sym_eigen(m);
    let max = eig.values.last().copied().unwrap_or(0.0);
    let min = eig.values.first().copied().unwrap_or(0.0);
    if !(min > crate::tol::POSDEF_MIN_EIG * max.max(1.0)) {
        return Err(Error::Invalid(format!(
            "{what}: matrix is not positive definite (eigenvalue range [{min:.3e}, {max:.3e}])"
        )));
    }
    let d = RMat::from_diagonal(&RVec::from_iterator(
        eig.values.len(),
        eig.values.iter().map(|&v| f(v)),
    ));
    Ok(&eig.vectors * d * eig.vectors.transpose())
}

/// Hermitian positive definite analogue of [`spd_map`].
pub fn hpd_map(m: &CMat, f: impl Fn(f64) -> f64, what: &str) -> Result<CMat> {
    let eig = herm_eigen(m);
    let max = eig.values.last().copied().unwrap_or(0.0);
    let min = eig.values.first().copied().unwrap_or(0.0);
    if !(min > crate::tol::POSDEF_MIN_EIG * max.max(1.0)) {
        return Err(Error::Invalid(format!(
            "{what}: matrix is not positive definite (eigenvalue range [{min:.3e}, {max:.3e}])"
        )));
    }
    let d = CMat::from_diagonal(&CVec::from_iterator(
        eig.values.len(),
        eig.values.iter().map(|&v| Complex::new(f(v), 0.0)),
    ));
    Ok(&eig.vectors * d * eig.vectors.adjoint())
}

/// Square root and inverse square root of a Hermitian positive definite
/// matrix, from a single eigen-decomposition.
pub fn hpd_sqrt_invsqrt(m: &CMat, what: &str) -> Result<(CMat, CMat)> {
    let eig = herm_eigen(m);
    let max = eig.values.last().copied().unwrap_or(0.0);
    let min = eig.values.first().copied().unwrap_or(0.0);
    if !(min > crate::tol::POSDEF_MIN_EIG * max.max(1.0)) {
        return Err(Error::Invalid(format!(
            "{what}: Gram matrix is not positive definite (eigenvalue range [{min:.3e}, {max:.3e}])"
        )));
    }
    let n = eig.values.len();
    let sq = CMat::from_diagonal(&CVec::from_iterator(
        n,
        eig.values.iter().map(|&v| Complex::new(v.sqrt(), 0.0)),
    ));
    let isq = CMat::from_diagonal(&CVec::from_iterator(
        n,
        eig.values.iter().map(|&v| Complex::new(1.0 / v.sqrt(), 0.0)),
    ));
    Ok((
        &eig.vectors * sq * eig.vectors.adjoint(),
        &eig.vectors * isq * eig.vectors.adjoint(),
    ))
}

/// Largest singular value of a complex matrix.
pub fn max_singular_value(m: &CMat) -> f64 {
    let sv = m.clone().svd(false, false).singular_values;
    sv.iter().copied().fold(0.0, f64::max)
}

/// Largest singular value of a real matrix.
pub fn max_singular_value_real(m: &RMat) -> f64 {
    let sv = m.clone().svd(false, false).singular_values;
    sv.iter().copied().fold(0.0, f64::max)
}

/// Eigenvalues of a general complex matrix, sorted by (re, im) for
/// reproducibility.
pub fn complex_eigenvalues(m: &CMat) -> Result<Vec<C64>> {
    let eig = m
        .clone()
        .schur()
        .eigenvalues()
        .ok_or_else(|| Error::Internal("complex Schur iteration failed to converge".into()))?;
    let mut out: Vec<C64> = eig.iter().copied().collect();
    out.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    Ok(out)
}

/// Eigenvalues of a general real matrix (possibly complex), sorted.
pub fn real_matrix_eigenvalues(m: &RMat) -> Vec<C64> {
    let eig = m.clone().complex_eigenvalues();
    let mut out: Vec<C64> = eig.iter().copied().collect();
    out.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    out
}

/// Sorts and merges values that agree to relative tolerance `rel`.
pub fn dedup_sorted_rel(mut vals: Vec<f64>, rel: f64) -> Vec<f64> {
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut out: Vec<f64> = Vec::with_capacity(vals.len());
    for v in vals {
        match out.last() {
            Some(&last) if (v - last).abs() <= rel * last.abs().max(1.0) => {}
            _ => out.push(v),
        }
    }
    out
}

/// Symmetric Hausdorff distance between two finite sets of reals,
/// normalized per point by max(1, |value|).
pub fn hausdorff_rel(a: &[f64], b: &[f64]) -> f64 {
    let one_sided = |xs: &[f64], ys: &[f64]| -> f64 {
        xs.iter()
            .map(|&x| {
                ys.iter()
                    .map(|&y| (x - y).abs() / x.abs().max(1.0))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    if a.is_empty() || b.is_empty() {
        return if a.len() == b.len() { 0.0 } else { f64::INFINITY };
    }
    one_sided(a, b).max(one_sided(b, a))
}

/// Ordinary least-squares line fit with quality diagnostics.
#[derive(Clone, Debug)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit.
    pub rms_residual: f64,
    /// Pearson correlation between abscissa and ordinate.
    pub correlation: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> LinearFit {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    if sxx <= 0.0 {
        return LinearFit { slope: 0.0, intercept: my, rms_residual: (syy / n).sqrt(), correlation: 0.0 };
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut ss = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        let r = y - (slope * x + intercept);
        ss += r * r;
    }
    let correlation = if syy > 0.0 { sxy / (sxx.sqrt() * syy.sqrt()) } else { 0.0 };
    LinearFit { slope, intercept, rms_residual: (ss / n).sqrt(), correlation }
}
