//! Gamma-matrix representations of Clifford algebras `Cl(p,q)` with a
//! diagonal metric, for even total dimension.
//!
//! The generators are built from an iterated 2x2 tensor-product ladder of
//! Pauli matrices: for total dimension `n = 2m` the Euclidean generators
//! are
//!
//! ```text
//! G_{2k}   = sx^{(x)k} (x) sz (x) I^{(x)(m-1-k)}
//! G_{2k+1} = sx^{(x)k} (x) sy (x) I^{(x)(m-1-k)}
//! ```
//!
//! which are Hermitian, square to +1 and pairwise anticommute; the first
//! generator comes out diagonal, `G_0 = diag(1, .., 1, -1, .., -1)`.  The
//! first `p` generators are kept as-is; the remaining `q` are multiplied
//! by `i`, making them anti-Hermitian with square -1.  The metric is the
//! diagonal `(+1 x p, -1 x q)`.
//!
//! The spinor metric `H` is the Hermitian invertible matrix intertwining
//! every generator with its adjoint, `H g_mu = g_mu^+ H`.  It is found by a
//! bounded search over two candidate products (all positive-square
//! generators, all negative-square generators) times four powers of `i`,
//! validated against hermiticity and the intertwining identity, rather
//! than hard-coded from a parity formula.

use serde::{Deserialize, Serialize};

use crate::linalg::{hermitian_defect, i_pow, CMat, CVec, RVec, C64, IM, ONE};
use crate::{tol, Error, Result};

/// Metric signature `(p, q)`: `p` directions of square +1, `q` of square -1.
///
/// Only even total dimensions >= 2 are representable here.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    p: usize,
    q: usize,
}

impl Signature {
    pub fn new(p: usize, q: usize) -> Result<Self> {
        let n = p + q;
        if n % 2 != 0 {
            return Err(Error::Invalid(format!(
                "even dimension only: signature ({p},{q}) has odd total dimension {n}"
            )));
        }
        if n < 2 {
            return Err(Error::Invalid("total dimension must be at least 2".into()));
        }
        Ok(Signature { p, q })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn dim(&self) -> usize {
        self.p + self.q
    }

    /// Dimension of the irreducible spinor space, `2^{(p+q)/2}`.
    pub fn spinor_dim(&self) -> usize {
        1 << (self.dim() / 2)
    }

    pub fn min_pq(&self) -> usize {
        self.p.min(self.q)
    }
}

/// An irreducible gamma-matrix representation of `Cl(p,q)` together with
/// the diagonal metric it represents.
#[derive(Clone, Debug)]
pub struct GammaRep {
    sig: Signature,
    gammas: Vec<CMat>,
    metric_signs: Vec<f64>,
}

impl GammaRep {
    pub fn sig(&self) -> Signature {
        self.sig
    }

    pub fn dim(&self) -> usize {
        self.metric_signs.len()
    }

    pub fn spinor_dim(&self) -> usize {
        self.sig.spinor_dim()
    }

    pub fn gamma(&self, mu: usize) -> &CMat {
        &self.gammas[mu]
    }

    pub fn gammas(&self) -> &[CMat] {
        &self.gammas
    }

    /// Diagonal of the metric, entries +-1, in generator order.
    pub fn metric_signs(&self) -> &[f64] {
        &self.metric_signs
    }

    /// Clifford action of a frame vector, `rho(v) = sum_mu v^mu g_mu`.
    pub fn vector_action(&self, v: &RVec) -> CMat {
        let n = self.spinor_dim();
        let mut out = CMat::zeros(n, n);
        for (mu, gamma) in self.gammas.iter().enumerate() {
            if v[mu] != 0.0 {
                out += gamma * C64::new(v[mu], 0.0);
            }
        }
        out
    }

    /// Largest deviation from the anticommutation relations
    /// `{g_mu, g_nu} = 2 g_{mu nu} I`.
    pub fn anticommutator_residual(&self) -> f64 {
        let n = self.spinor_dim();
        let id = CMat::identity(n, n);
        let mut worst: f64 = 0.0;
        for mu in 0..self.dim() {
            for nu in mu..self.dim() {
                let anti = &self.gammas[mu] * &self.gammas[nu] + &self.gammas[nu] * &self.gammas[mu];
                let target = if mu == nu {
                    &id * C64::new(2.0 * self.metric_signs[mu], 0.0)
                } else {
                    CMat::zeros(n, n)
                };
                worst = worst.max((anti - target).norm());
            }
        }
        worst
    }

    /// Largest deviation from the construction convention: Hermitian
    /// generators on +1 directions, anti-Hermitian on -1 directions.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (mu, gamma) in self.gammas.iter().enumerate() {
            let defect = if self.metric_signs[mu] > 0.0 {
                hermitian_defect(gamma)
            } else {
                (gamma + gamma.adjoint()).norm()
            };
            worst = worst.max(defect);
        }
        worst
    }
}

fn pauli() -> (CMat, CMat, CMat) {
    let z = C64::new(0.0, 0.0);
    let sx = CMat::from_row_slice(2, 2, &[z, ONE, ONE, z]);
    let sy = CMat::from_row_slice(2, 2, &[z, -IM, IM, z]);
    let sz = CMat::from_row_slice(2, 2, &[ONE, z, z, -ONE]);
    (sx, sy, sz)
}

fn ladder_factor(m: usize, k: usize, mid: &CMat) -> CMat {
    let (sx, _, _) = pauli();
    let mut acc = CMat::identity(1, 1);
    for _ in 0..k {
        acc = acc.kronecker(&sx);
    }
    acc = acc.kronecker(mid);
    for _ in 0..(m - 1 - k) {
        acc = acc.kronecker(&CMat::identity(2, 2));
    }
    acc
}

/// Builds the canonical representation for `sig`, metric `(+1 x p, -1 x q)`.
///
/// The construction is a fixed arithmetic circuit, so two calls with equal
/// signatures produce bit-identical matrices.
pub fn build_gamma_rep(sig: Signature) -> GammaRep {
    let m = sig.dim() / 2;
    let (_, sy, sz) = pauli();
    let mut euclid: Vec<CMat> = Vec::with_capacity(sig.dim());
    for k in 0..m {
        euclid.push(ladder_factor(m, k, &sz));
        euclid.push(ladder_factor(m, k, &sy));
    }
    let mut gammas = Vec::with_capacity(sig.dim());
    let mut metric_signs = Vec::with_capacity(sig.dim());
    for (mu, g) in euclid.into_iter().enumerate() {
        if mu < sig.p() {
            gammas.push(g);
            metric_signs.push(1.0);
        } else {
            gammas.push(g * IM);
            metric_signs.push(-1.0);
        }
    }
    GammaRep { sig, gammas, metric_signs }
}

/// Builds a representation whose metric diagonal follows `signs` in the
/// given order (each entry +-1).  The generators are the canonical ones,
/// reordered so that generator `mu` matches `signs[mu]`.
pub fn build_gamma_rep_for_signs(signs: &[f64]) -> Result<GammaRep> {
    let mut p = 0;
    let mut q = 0;
    for &s in signs {
        if (s - 1.0).abs() < 1e-12 {
            p += 1;
        } else if (s + 1.0).abs() < 1e-12 {
            q += 1;
        } else {
            return Err(Error::Invalid(format!("metric diagonal entries must be +-1, got {s}")));
        }
    }
    let sig = Signature::new(p, q)?;
    let canonical = build_gamma_rep(sig);
    let mut next_pos = 0;
    let mut next_neg = p;
    let mut gammas = Vec::with_capacity(signs.len());
    for &s in signs {
        if s > 0.0 {
            gammas.push(canonical.gammas[next_pos].clone());
            next_pos += 1;
        } else {
            gammas.push(canonical.gammas[next_neg].clone());
            next_neg += 1;
        }
    }
    Ok(GammaRep { sig, gammas, metric_signs: signs.to_vec() })
}

/// Ordered product of generators scaled by `scale`:
/// `scale * g_{i1} ... g_{ik}` for a strictly increasing index list.
/// The empty list yields `scale * I`.
pub fn multivector_action(rep: &GammaRep, blade: &[usize], scale: C64) -> Result<CMat> {
    for w in blade.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::Invalid(format!(
                "blade indices must be strictly increasing, got {:?}",
                blade
            )));
        }
    }
    if let Some(&last) = blade.last() {
        if last >= rep.dim() {
            return Err(Error::Invalid(format!(
                "blade index {last} out of range for dimension {}",
                rep.dim()
            )));
        }
    }
    let n = rep.spinor_dim();
    let mut acc = CMat::identity(n, n) * scale;
    for &idx in blade {
        acc *= &rep.gammas[idx];
    }
    Ok(acc)
}

/// The spinor metric: Hermitian, invertible, intertwining every generator
/// with its adjoint.
#[derive(Clone, Debug)]
pub struct SpinorMetric {
    h: CMat,
    r_phase: usize,
    from_positive_product: bool,
}

impl SpinorMetric {
    pub fn h(&self) -> &CMat {
        &self.h
    }

    /// Power of `i` applied to the winning candidate product.
    pub fn r_phase(&self) -> usize {
        self.r_phase
    }

    /// Whether the winning candidate was the product over +1-square
    /// generators (as opposed to the -1-square ones).
    pub fn from_positive_product(&self) -> bool {
        self.from_positive_product
    }

    /// max over mu of `|| H g_mu - g_mu^+ H ||`, plus hermiticity defect.
    pub fn residual(&self, rep: &GammaRep) -> f64 {
        intertwine_defect(rep, &self.h).max(hermitian_defect(&self.h))
    }

    /// Smallest singular value (the metric must be far from degenerate).
    pub fn min_singular_value(&self) -> f64 {
        let sv = self.h.clone().svd(false, false).singular_values;
        sv.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

fn intertwine_defect(rep: &GammaRep, h: &CMat) -> f64 {
    let mut worst: f64 = 0.0;
    for gamma in rep.gammas() {
        worst = worst.max((h * gamma - gamma.adjoint() * h).norm());
    }
    worst
}

/// Searches the two candidate products times four powers of `i` for the
/// spinor metric, in deterministic order (positive product first, `r`
/// ascending).  Failure to find one indicates a construction bug.
pub fn build_spinor_metric(rep: &GammaRep) -> Result<SpinorMetric> {
    let n = rep.spinor_dim();
    let mut pos_prod = CMat::identity(n, n);
    let mut neg_prod = CMat::identity(n, n);
    for (mu, gamma) in rep.gammas().iter().enumerate() {
        if rep.metric_signs[mu] > 0.0 {
            pos_prod = pos_prod * gamma;
        } else {
            neg_prod = neg_prod * gamma;
        }
    }
    for (prod, from_positive) in [(pos_prod, true), (neg_prod, false)] {
        for r in 0..4usize {
            let h = &prod * i_pow(r);
            if hermitian_defect(&h) > tol::GAMMA_RESIDUAL {
                continue;
            }
            if intertwine_defect(rep, &h) > tol::GAMMA_RESIDUAL {
                continue;
            }
            let metric = SpinorMetric { h, r_phase: r, from_positive_product: from_positive };
            if metric.min_singular_value() < 0.5 {
                continue;
            }
            return Ok(metric);
        }
    }
    Err(Error::Internal(format!(
        "no spinor-metric candidate passed for signature ({},{})",
        rep.sig.p(),
        rep.sig.q()
    )))
}

/// Standard basis spinor (all zeros, 1 in slot `k`).
pub fn basis_spinor(dim: usize, k: usize) -> CVec {
    let mut v = CVec::zeros(dim);
    v[k] = ONE;
    v
}
