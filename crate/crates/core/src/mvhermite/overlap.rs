use std::f64::consts::PI;

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{quad_nd, QuadResult};

use super::hermite::{hermite_with_budget, mv_hermite};
use super::types::{MultiIndex, OverlapSpec, SymmetricMatrix, DEGREE_BUDGET};

/// Largest accepted `|ρ − ρᵀ|` (relative to `max(1, |ρ|_max)`) before
/// symmetrization.
pub const RHO_SYMMETRY_TOL: f64 = 1e-10;
/// Oracle limits: quadrature dimension and combined degree.
pub const ORACLE_MAX_DIM: usize = 2;
pub const ORACLE_DEGREE_BUDGET: usize = 8;
/// Oracle box half-width in standard deviations of the Gaussian weight.
const ORACLE_BOX_SIGMAS: f64 = 12.0;

/// Right-hand side `(y₁; y₂)` convention of the closed-form kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum YConvention {
    /// `y₁ = ¼(RM⁻¹ + M⁻¹R)c`, `y₂ = ¼(rΛM⁻¹ + M⁻¹Λᵀr)c + d`.
    Printed,
    /// `y₁ = ½RM⁻¹c`, `y₂ = ½rΛM⁻¹c + rd`, obtained by completing the
    /// square.
    Resolved,
}

/// `ρ`, the right-hand side `ρy`, the solved `y` and the Gaussian prefactor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RhoKernel {
    pub rho: SymmetricMatrix,
    /// `(y₁; y₂)`, the linear coefficient `ρy` of the generating exponent.
    pub rhs: Vec<f64>,
    pub y: Vec<f64>,
    pub prefactor: f64,
    pub convention: YConvention,
    /// `|ρ − ρᵀ|_max / max(1, |ρ|_max)` before symmetrization.
    pub symmetry_defect: f64,
    /// 2-norm condition number of `ρ` (infinite when singular).
    pub condition: f64,
}

pub(crate) struct KernelParts<T: ComplexField> {
    pub rho: DMatrix<T>,
    pub rhs: DVector<T>,
    pub prefactor: T,
    pub symmetry_defect: f64,
}

fn real<T: ComplexField>(v: f64) -> T {
    T::from_real(nalgebra::convert(v))
}

/// Block arithmetic of the closed form for real or complex parameters.
/// Complex `M` uses the principal square root of `det M`.
pub(crate) fn kernel_parts<T: ComplexField + Copy>(
    big_r: &DMatrix<T>,
    small_r: &DMatrix<T>,
    lambda: &DMatrix<T>,
    m_quad: &DMatrix<T>,
    c: &DVector<T>,
    d: &DVector<T>,
    convention: YConvention,
) -> Result<KernelParts<T>> {
    let n = big_r.nrows();
    let lu = m_quad.clone().lu();
    let m_inv = lu.try_inverse().ok_or_else(|| Error::Singular("M_quad".into()))?;
    let half: T = real(0.5);
    let quarter: T = real(0.25);

    let r1 = big_r - (big_r * &m_inv * big_r) * half;
    let r2 = small_r - (small_r * lambda * &m_inv * lambda.transpose() * small_r) * half;
    let r21 = (small_r * lambda * &m_inv * big_r) * (-half);
    let r12 = (big_r * &m_inv * lambda.transpose() * small_r) * (-half);

    let mut rho = DMatrix::<T>::zeros(2 * n, 2 * n);
    rho.view_mut((0, 0), (n, n)).copy_from(&r1);
    rho.view_mut((n, n), (n, n)).copy_from(&r2);
    rho.view_mut((n, 0), (n, n)).copy_from(&r21);
    rho.view_mut((0, n), (n, n)).copy_from(&r12);

    let scale = rho.iter().map(|v| v.modulus()).fold(nalgebra::convert::<f64, T::RealField>(1.0), |a, b| if b > a { b } else { a });
    let asym = (&rho - rho.transpose()).iter().map(|v| v.modulus()).fold(nalgebra::convert::<f64, T::RealField>(0.0), |a, b| if b > a { b } else { a });
    let symmetry_defect: f64 = nalgebra::try_convert(asym / scale).unwrap_or(f64::INFINITY);
    if !(symmetry_defect <= RHO_SYMMETRY_TOL) {
        return Err(Error::RhoAsymmetric { defect: symmetry_defect });
    }
    let rho = (&rho + rho.transpose()) * half;

    let (y1, y2) = match convention {
        YConvention::Printed => (
            (big_r * &m_inv + &m_inv * big_r) * c * quarter,
            (small_r * lambda * &m_inv + &m_inv * lambda.transpose() * small_r) * c * quarter + d,
        ),
        YConvention::Resolved => (big_r * &m_inv * c * half, small_r * lambda * &m_inv * c * half + small_r * d),
    };
    let mut rhs = DVector::<T>::zeros(2 * n);
    rhs.rows_mut(0, n).copy_from(&y1);
    rhs.rows_mut(n, n).copy_from(&y2);

    let det = lu.determinant();
    let quad_form = (c.transpose() * &m_inv * c)[(0, 0)];
    let prefactor = real::<T>(PI.powf(n as f64 / 2.0)) / det.sqrt() * (quad_form * quarter).exp();
    Ok(KernelParts { rho, rhs, prefactor, symmetry_defect })
}

/// Assembles `ρ`, `y = ρ⁻¹(y₁; y₂)` and `π^{N/2}/√det M · exp(¼cM⁻¹c)`.
///
/// The solve for `y` is skipped when `(y₁; y₂) = 0`; otherwise a singular
/// `ρ` is an error.
pub fn assemble_kernel(spec: &OverlapSpec, convention: YConvention) -> Result<RhoKernel> {
    let parts = kernel_parts(spec.big_r(), spec.small_r(), spec.lambda(), spec.m_quad(), spec.c(), spec.d(), convention)?;
    let svd = parts.rho.clone().svd(false, false);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let y = if parts.rhs.iter().all(|v| *v == 0.0) {
        DVector::zeros(parts.rhs.len())
    } else {
        parts
            .rho
            .clone()
            .lu()
            .solve(&parts.rhs)
            .ok_or_else(|| Error::Singular(format!("ρ is singular (condition {condition:e})")))?
    };
    Ok(RhoKernel {
        rho: SymmetricMatrix::new(parts.rho)?,
        rhs: parts.rhs.iter().copied().collect(),
        y: y.iter().copied().collect(),
        prefactor: parts.prefactor,
        convention,
        symmetry_defect: parts.symmetry_defect,
        condition,
    })
}

fn check_indices(spec: &OverlapSpec, n: &MultiIndex, m: &MultiIndex, budget: usize) -> Result<()> {
    if n.dim() != spec.dim() || m.dim() != spec.dim() {
        return Err(Error::Dimension(format!("indices must have {} entries", spec.dim())));
    }
    let total = n.total() + m.total();
    if total > budget {
        return Err(Error::DegreeBudget { total, limit: budget });
    }
    Ok(())
}

/// Closed form `prefactor · H^{ρ}_{(n,m)}(y)` under `convention`. The first
/// index block pairs with `R`, the second with `r`.
pub fn gaussian_overlap_with(spec: &OverlapSpec, n: &MultiIndex, m: &MultiIndex, convention: YConvention) -> Result<f64> {
    check_indices(spec, n, m, DEGREE_BUDGET)?;
    let kernel = assemble_kernel(spec, convention)?;
    let h = hermite_with_budget(kernel.rho.entries(), &n.concat(m), &kernel.rhs, DEGREE_BUDGET)?;
    Ok(kernel.prefactor * h)
}

/// `∫ H_n^{R}(x) H_m^{r}(Λx + d) exp(−xMx + cx) dᴺx` in closed form.
pub fn gaussian_overlap(spec: &OverlapSpec, n: &MultiIndex, m: &MultiIndex) -> Result<f64> {
    gaussian_overlap_with(spec, n, m, YConvention::Resolved)
}

/// The same integral by adaptive quadrature over a box of
/// `±12` standard deviations around the weight's peak `½M⁻¹c`, to absolute
/// tolerance `tol`.
pub fn overlap_oracle(spec: &OverlapSpec, n: &MultiIndex, m: &MultiIndex, tol: f64) -> Result<QuadResult> {
    if spec.dim() > ORACLE_MAX_DIM {
        return Err(Error::Dimension(format!("oracle quadrature supports N ≤ {ORACLE_MAX_DIM}, got {}", spec.dim())));
    }
    check_indices(spec, n, m, ORACLE_DEGREE_BUDGET)?;
    let m_inv = spec.m_quad().clone().try_inverse().ok_or_else(|| Error::Singular("M_quad".into()))?;
    let center = &m_inv * spec.c() * 0.5;
    let bounds: Vec<(f64, f64)> = (0..spec.dim())
        .map(|i| {
            let w = ORACLE_BOX_SIGMAS * (0.5 * m_inv[(i, i)]).sqrt();
            (center[i] - w, center[i] + w)
        })
        .collect();
    let big_r = SymmetricMatrix::new(spec.big_r().clone())?;
    let small_r = SymmetricMatrix::new(spec.small_r().clone())?;
    let integrand = |x: &[f64]| -> C64 {
        let xv = DVector::from_column_slice(x);
        let z = spec.lambda() * &xv + spec.d();
        let weight = (-(xv.transpose() * spec.m_quad() * &xv)[(0, 0)] + spec.c().dot(&xv)).exp();
        let hn = mv_hermite(&big_r, n, x).unwrap_or(f64::NAN);
        let hm = mv_hermite(&small_r, m, z.as_slice()).unwrap_or(f64::NAN);
        C64::new(hn * hm * weight, 0.0)
    };
    quad_nd(integrand, &bounds, tol)
}

/// `|a − b| / |b|`, or `|a − b|` when `b = 0`.
pub fn relative_error(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    if b == 0.0 {
        d
    } else {
        d / b.abs()
    }
}

/// Oracle tolerance: `1e-10` of the closed-form magnitude, floored at `1e-13`.
fn oracle_tol(closed: f64) -> f64 {
    (1e-10 * closed.abs()).max(1e-13)
}

/// Closed form, oracle and their relative disagreement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlapEvaluation {
    pub value: f64,
    pub oracle_value: f64,
    pub rel_err: f64,
}

pub fn evaluate_overlap(spec: &OverlapSpec, n: &MultiIndex, m: &MultiIndex) -> Result<OverlapEvaluation> {
    let value = gaussian_overlap(spec, n, m)?;
    let oracle_value = overlap_oracle(spec, n, m, oracle_tol(value))?.value.re;
    Ok(OverlapEvaluation { value, oracle_value, rel_err: relative_error(value, oracle_value) })
}

/// Both right-hand-side conventions measured against the oracle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscrepancyRow {
    pub n: MultiIndex,
    pub m: MultiIndex,
    pub oracle: f64,
    pub printed: Option<f64>,
    pub printed_rel_err: Option<f64>,
    /// Set when the printed convention could not be evaluated.
    pub printed_failure: Option<String>,
    pub resolved: f64,
    pub resolved_rel_err: f64,
}

pub fn discrepancy_row(spec: &OverlapSpec, n: &MultiIndex, m: &MultiIndex) -> Result<DiscrepancyRow> {
    let resolved = gaussian_overlap_with(spec, n, m, YConvention::Resolved)?;
    let oracle = overlap_oracle(spec, n, m, oracle_tol(resolved))?.value.re;
    let (printed, printed_failure) = match gaussian_overlap_with(spec, n, m, YConvention::Printed) {
        Ok(v) => (Some(v), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(DiscrepancyRow {
        n: n.clone(),
        m: m.clone(),
        oracle,
        printed_rel_err: printed.map(|p| relative_error(p, oracle)),
        printed,
        printed_failure,
        resolved,
        resolved_rel_err: relative_error(resolved, oracle),
    })
}

/// Residual pattern of the printed convention over a set of cases.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscrepancyReport {
    pub rows: Vec<DiscrepancyRow>,
    pub tolerance: f64,
    pub printed_failures: usize,
    pub resolved_failures: usize,
    pub max_printed_rel_err: f64,
    pub max_resolved_rel_err: f64,
}

impl DiscrepancyReport {
    pub fn from_rows(rows: Vec<DiscrepancyRow>, tolerance: f64) -> Self {
        let fails = |e: Option<f64>| !matches!(e, Some(v) if v < tolerance);
        let printed_failures = rows.iter().filter(|r| fails(r.printed_rel_err)).count();
        let resolved_failures = rows.iter().filter(|r| fails(Some(r.resolved_rel_err))).count();
        let max_printed_rel_err = rows.iter().map(|r| r.printed_rel_err.unwrap_or(f64::INFINITY)).fold(0.0, f64::max);
        let max_resolved_rel_err = rows.iter().map(|r| r.resolved_rel_err).fold(0.0, f64::max);
        DiscrepancyReport { rows, tolerance, printed_failures, resolved_failures, max_printed_rel_err, max_resolved_rel_err }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    fn idx(v: &[usize]) -> MultiIndex {
        MultiIndex::new(v.to_vec()).unwrap()
    }

    #[test]
    fn scalar_kernel() {
        let spec = OverlapSpec::scalar(2.0, 2.0, 1.0, 1.0, 0.0, 0.0).unwrap();
        let k = assemble_kernel(&spec, YConvention::Printed).unwrap();
        assert_eq!(k.rho.entries(), &dmatrix![0.0, -2.0; -2.0, 0.0]);
        assert_eq!(k.y, vec![0.0, 0.0]);
        assert!((k.prefactor - PI.sqrt()).abs() < 1e-15);
        assert!(k.symmetry_defect == 0.0);
    }

    #[test]
    fn trivial_overlaps() {
        let spec = OverlapSpec::scalar(1.3, 0.4, -0.7, 1.0, 0.0, 0.0).unwrap();
        assert!((gaussian_overlap(&spec, &idx(&[0]), &idx(&[0])).unwrap() - PI.sqrt()).abs() < 1e-15);
        let spec = OverlapSpec::scalar(2.0, 2.0, 1.0, 1.0, 0.0, 0.0).unwrap();
        let v = gaussian_overlap(&spec, &idx(&[1]), &idx(&[1])).unwrap();
        let o = overlap_oracle(&spec, &idx(&[1]), &idx(&[1]), 1e-12).unwrap().value.re;
        assert!(relative_error(o, 2.0 * PI.sqrt()) < 1e-10);
        assert!(relative_error(v, o) < 1e-10);
        let v = gaussian_overlap(&spec, &idx(&[2]), &idx(&[0])).unwrap();
        assert!(v.abs() < 1e-14);
        let o = overlap_oracle(&spec, &idx(&[2]), &idx(&[0]), 1e-12).unwrap().value.re;
        assert!(o.abs() < 1e-11);
    }

    #[test]
    fn completed_square() {
        let spec = OverlapSpec::scalar(2.0, 2.0, 1.0, 1.0, 1.0, 0.0).unwrap();
        let want = PI.sqrt() * 0.25f64.exp();
        let o = overlap_oracle(&spec, &idx(&[0]), &idx(&[0]), 1e-12).unwrap().value.re;
        assert!(relative_error(o, want) < 1e-10);
        assert!(relative_error(gaussian_overlap(&spec, &idx(&[0]), &idx(&[0])).unwrap(), want) < 1e-14);
    }

    #[test]
    fn shifted_argument() {
        let spec = OverlapSpec::scalar(1.5, 0.8, 0.6, 1.2, 0.4, -0.3).unwrap();
        for (n, m) in [(0, 1), (1, 2), (3, 1), (2, 2)] {
            let e = evaluate_overlap(&spec, &idx(&[n]), &idx(&[m])).unwrap();
            assert!(e.rel_err < 1e-8, "({n}, {m}): {e:?}");
        }
    }

    #[test]
    fn printed_convention_fails_with_shifted_argument() {
        let spec = OverlapSpec::scalar(1.5, 0.8, 0.6, 1.2, 0.0, -0.3).unwrap();
        let row = discrepancy_row(&spec, &idx(&[0]), &idx(&[1])).unwrap();
        assert!(row.resolved_rel_err < 1e-8);
        assert!(row.printed_rel_err.unwrap() > 1e-3);
    }

    #[test]
    fn conventions_agree_when_homogeneous() {
        let spec = OverlapSpec::new(
            SymmetricMatrix::from_rows(vec![vec![1.0, 0.3], vec![0.3, 2.0]]).unwrap(),
            SymmetricMatrix::from_rows(vec![vec![0.5, -0.2], vec![-0.2, 1.0]]).unwrap(),
            dmatrix![1.0, 0.2; -0.1, 0.9],
            SymmetricMatrix::from_rows(vec![vec![1.0, 0.1], vec![0.1, 0.8]]).unwrap(),
            DVector::zeros(2),
            DVector::zeros(2),
        )
        .unwrap();
        let (n, m) = (idx(&[1, 1]), idx(&[2, 0]));
        let a = gaussian_overlap_with(&spec, &n, &m, YConvention::Printed).unwrap();
        let b = gaussian_overlap_with(&spec, &n, &m, YConvention::Resolved).unwrap();
        assert_eq!(a, b);
        let o = overlap_oracle(&spec, &n, &m, 1e-11).unwrap().value.re;
        assert!(relative_error(b, o) < 1e-8);
    }

    #[test]
    fn index_checks() {
        let spec = OverlapSpec::scalar(2.0, 2.0, 1.0, 1.0, 0.0, 0.0).unwrap();
        assert!(gaussian_overlap(&spec, &idx(&[0, 0]), &idx(&[0])).is_err());
        assert!(matches!(gaussian_overlap(&spec, &idx(&[9]), &idx(&[8])), Err(Error::DegreeBudget { .. })));
        assert!(matches!(overlap_oracle(&spec, &idx(&[5]), &idx(&[4]), 1e-8), Err(Error::DegreeBudget { .. })));
    }

    #[test]
    fn report_counts() {
        let spec = OverlapSpec::scalar(1.5, 0.8, 0.6, 1.2, 0.5, -0.3).unwrap();
        let rows = vec![
            discrepancy_row(&spec, &idx(&[1]), &idx(&[1])).unwrap(),
            discrepancy_row(&spec, &idx(&[0]), &idx(&[2])).unwrap(),
        ];
        let report = DiscrepancyReport::from_rows(rows, 1e-6);
        assert_eq!(report.resolved_failures, 0);
        assert_eq!(report.printed_failures, 2);
    }
}
