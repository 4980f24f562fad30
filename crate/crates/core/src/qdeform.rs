//! q-deformed ladder algebra on the truncated number basis.
//!
//! With `λ = ln q` the deformed annihilator is
//! `A_q = A √(sinh(λN) / (N sinh λ))`, whose matrix elements are
//! `A_q[n−1, n] = √[n]` with `[n] = sinh(λn)/sinh λ`. It obeys
//! `A_q A_q† − q A_q† A_q = q^{−N}` because `[n+1] − q[n] = q^{−n}`.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::states::FockVector;

pub const MAX_LAMBDA: f64 = 5.0;
pub const MIN_LADDER_N_MAX: usize = 8;
pub const MAX_LADDER_N_MAX: usize = 512;
/// Unnormalized tail `|α|^{n_max}/√[n_max!]` accepted by [`qcoherent_coeffs`].
pub const QCOHERENT_TAIL_TOL: f64 = 1e-12;

/// Largest `λ n` for which `sinh(λ n)` is safely finite.
const OVERFLOW_GUARD: f64 = 700.0;
/// Below this `λ n` the bracket is evaluated from its Taylor series.
const SERIES_CUTOFF: f64 = 1e-4;

/// Deformation parameter `λ = ln q ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct QParam(f64);

impl TryFrom<f64> for QParam {
    type Error = Error;

    fn try_from(lambda: f64) -> Result<Self> {
        QParam::new(lambda)
    }
}

impl From<QParam> for f64 {
    fn from(q: QParam) -> f64 {
        q.0
    }
}

impl QParam {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && (0.0..=MAX_LAMBDA).contains(&lambda)) {
            return Err(Error::InvalidArgument(format!("λ must lie in [0, {MAX_LAMBDA}], got {lambda}")));
        }
        Ok(QParam(lambda))
    }

    pub fn from_q(q: f64) -> Result<Self> {
        Self::new(q.ln())
    }

    pub fn undeformed() -> Self {
        QParam(0.0)
    }

    pub fn lambda(&self) -> f64 {
        self.0
    }

    pub fn q(&self) -> f64 {
        self.0.exp()
    }
}

/// `[n] = sinh(λn)/sinh λ`, equal to `n` at `λ = 0`.
pub fn qbracket(n: usize, q: QParam) -> Result<f64> {
    let lambda = q.lambda();
    let nf = n as f64;
    if lambda * nf > OVERFLOW_GUARD {
        return Err(Error::Overflow(format!("λ·n = {} exceeds {OVERFLOW_GUARD}", lambda * nf)));
    }
    if lambda == 0.0 {
        return Ok(nf);
    }
    if lambda * nf.max(1.0) < SERIES_CUTOFF {
        let n2m1 = nf * nf - 1.0;
        let l2 = lambda * lambda;
        return Ok(nf * (1.0 + l2 * n2m1 / 6.0 + l2 * l2 * n2m1 * (3.0 * nf * nf - 7.0) / 360.0));
    }
    Ok((lambda * nf).sinh() / lambda.sinh())
}

/// `[n!] = [n][n−1]⋯[1]`, `[0!] = 1`.
pub fn qfactorial(n: usize, q: QParam) -> Result<f64> {
    let mut acc = 1.0f64;
    for k in 1..=n {
        acc *= qbracket(k, q)?;
        if !acc.is_finite() {
            return Err(Error::Overflow(format!("[{n}!] overflows double precision at k = {k}")));
        }
    }
    Ok(acc)
}

/// `|[n+1] − q[n] − q^{−n}|` relative to the largest of the three terms.
pub fn bracket_identity_residual(n: usize, q: QParam) -> Result<f64> {
    let lhs = qbracket(n + 1, q)?;
    let qn = q.q() * qbracket(n, q)?;
    let rhs = (-q.lambda() * n as f64).exp();
    Ok((lhs - qn - rhs).abs() / lhs.max(qn).max(rhs))
}

/// Ladder operators on the number basis `0..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderMatrices {
    pub n_max: usize,
    pub a: DMatrix<C64>,
    pub a_dag: DMatrix<C64>,
    pub num: DMatrix<C64>,
    pub a_q: DMatrix<C64>,
}

/// Builds `a`, `a†`, `N` and `A_q = a √f(N)` with `f(n) = [n]/n`, `f(0) = 1`.
pub fn ladder_matrices(n_max: usize, q: QParam) -> Result<LadderMatrices> {
    if !(MIN_LADDER_N_MAX..=MAX_LADDER_N_MAX).contains(&n_max) {
        return Err(Error::InvalidArgument(format!(
            "n_max must lie in [{MIN_LADDER_N_MAX}, {MAX_LADDER_N_MAX}], got {n_max}"
        )));
    }
    let dim = n_max + 1;
    let zero = C64::new(0.0, 0.0);
    let a = DMatrix::from_fn(dim, dim, |r, c| if c == r + 1 { C64::new((c as f64).sqrt(), 0.0) } else { zero });
    let a_dag = a.adjoint();
    let num = DMatrix::from_fn(dim, dim, |r, c| if r == c { C64::new(r as f64, 0.0) } else { zero });
    let mut factor = Vec::with_capacity(dim);
    for n in 0..dim {
        factor.push(if n == 0 { 1.0 } else { (qbracket(n, q)? / n as f64).sqrt() });
    }
    let sqrt_f = DMatrix::from_fn(dim, dim, |r, c| if r == c { C64::new(factor[r], 0.0) } else { zero });
    let a_q = &a * sqrt_f;
    Ok(LadderMatrices { n_max, a, a_dag, num, a_q })
}

fn interior(n_max: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n_max).flat_map(move |r| (0..n_max).map(move |c| (r, c)))
}

/// `max |[A, A†] − I|` over basis indices `0..n_max` (the boundary row and
/// column carry the truncation defect and are excluded).
pub fn commutator_residual(m: &LadderMatrices) -> f64 {
    let comm = &m.a * &m.a_dag - &m.a_dag * &m.a;
    interior(m.n_max)
        .map(|(r, c)| (comm[(r, c)] - if r == c { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }).norm())
        .fold(0.0, f64::max)
}

/// Absolute and scale-relative residuals of `A_q A_q† − q A_q† A_q − q^{−N}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QCommutatorResidual {
    /// `max |D_ij|`.
    pub absolute: f64,
    /// `max |D_ij| / max(|(A_qA_q†)_ij|, q|(A_q†A_q)_ij|, |q^{−N}_ij|)`.
    pub relative: f64,
}

/// Deformed commutator defect off the truncation boundary.
///
/// Entries of `A_q A_q†` grow like `q^n`, so the rounding floor of the
/// absolute defect grows with them; `relative` measures it in units of the
/// terms being cancelled.
pub fn qcommutator_defect(m: &LadderMatrices, q: QParam) -> QCommutatorResidual {
    let qv = q.q();
    let left = &m.a_q * m.a_q.adjoint();
    let right = m.a_q.adjoint() * &m.a_q;
    let mut absolute = 0.0f64;
    let mut relative = 0.0f64;
    for (r, c) in interior(m.n_max) {
        let qn = if r == c { (-q.lambda() * r as f64).exp() } else { 0.0 };
        let d = (left[(r, c)] - qv * right[(r, c)] - qn).norm();
        let scale = left[(r, c)].norm().max(qv * right[(r, c)].norm()).max(qn);
        absolute = absolute.max(d);
        if scale > 0.0 {
            relative = relative.max(d / scale);
        } else if d > 0.0 {
            relative = f64::INFINITY;
        }
    }
    QCommutatorResidual { absolute, relative }
}

/// Scale-relative deformed commutator residual.
pub fn qcommutator_residual(m: &LadderMatrices, q: QParam) -> f64 {
    qcommutator_defect(m, q).relative
}

/// Spectra and residuals of the ladder algebra, exported as JSON.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QReport {
    pub lambda: f64,
    pub q: f64,
    pub n_max: usize,
    pub commutator_residual: f64,
    pub qcommutator_residual: f64,
    pub qcommutator_residual_abs: f64,
    pub bracket_identity_residual: f64,
    /// Diagonal of `A†A`.
    pub number_spectrum: Vec<f64>,
    /// Diagonal of `A_q†A_q`, i.e. `[n]`.
    pub deformed_spectrum: Vec<f64>,
}

pub fn qreport(n_max: usize, q: QParam) -> Result<QReport> {
    let m = ladder_matrices(n_max, q)?;
    let defect = qcommutator_defect(&m, q);
    let mut identity = 0.0f64;
    for n in 0..n_max {
        identity = identity.max(bracket_identity_residual(n, q)?);
    }
    let num = &m.a_dag * &m.a;
    let deformed = m.a_q.adjoint() * &m.a_q;
    Ok(QReport {
        lambda: q.lambda(),
        q: q.q(),
        n_max,
        commutator_residual: commutator_residual(&m),
        qcommutator_residual: defect.relative,
        qcommutator_residual_abs: defect.absolute,
        bracket_identity_residual: identity,
        number_spectrum: (0..=n_max).map(|n| num[(n, n)].re).collect(),
        deformed_spectrum: (0..=n_max).map(|n| deformed[(n, n)].re).collect(),
    })
}

/// Coefficients `N_q αⁿ/√[n!]` of the eigenstate of `A_q`, with
/// `N_q = (Σ |α|^{2n}/[n!])^{−1/2}` summed to convergence.
pub fn qcoherent_coeffs(alpha: C64, q: QParam, n_max: usize) -> Result<FockVector> {
    let mut terms = Vec::with_capacity(n_max + 1);
    let mut t = C64::new(1.0, 0.0);
    terms.push(t);
    for n in 1..=n_max {
        t *= alpha / qbracket(n, q)?.sqrt();
        terms.push(t);
    }
    let tail = terms[n_max].norm();
    if !(tail < QCOHERENT_TAIL_TOL) {
        return Err(Error::TruncationTail { tail });
    }
    let mut sum: f64 = terms.iter().map(|c| c.norm_sqr()).sum();
    let mut n = n_max;
    let mut term = tail * tail;
    while term > 1e-18 * sum {
        n += 1;
        let b = match qbracket(n, q) {
            Ok(b) => b,
            Err(_) => break,
        };
        term *= alpha.norm_sqr() / b;
        sum += term;
    }
    let scale = sum.sqrt().recip();
    FockVector::new(terms.into_iter().map(|c| c * scale).collect())
}

/// `max_n |√[n+1] c_{n+1} − α cₙ|`: the eigen-equation of `A_q` in
/// coefficient space.
pub fn qcoherent_residual(coeffs: &FockVector, alpha: C64, q: QParam) -> Result<f64> {
    let c = coeffs.coeffs();
    let mut worst = 0.0f64;
    for n in 0..coeffs.n_max() {
        worst = worst.max((qbracket(n + 1, q)?.sqrt() * c[n + 1] - alpha * c[n]).norm());
    }
    Ok(worst)
}
