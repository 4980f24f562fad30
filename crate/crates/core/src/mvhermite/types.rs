use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest total degree `|n|` accepted by the public evaluators.
pub const DEGREE_BUDGET: usize = 16;
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Nonnegative multi-index `n = (n₁, …, n_N)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct MultiIndex(Vec<usize>);

impl TryFrom<Vec<usize>> for MultiIndex {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        MultiIndex::new(v)
    }
}

impl From<MultiIndex> for Vec<usize> {
    fn from(m: MultiIndex) -> Vec<usize> {
        m.0
    }
}

impl MultiIndex {
    pub fn new(entries: Vec<usize>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Dimension("multi-index must have at least one entry".into()));
        }
        let total: usize = entries.iter().sum();
        if total > DEGREE_BUDGET {
            return Err(Error::DegreeBudget { total, limit: DEGREE_BUDGET });
        }
        Ok(MultiIndex(entries))
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(vec![0; dim])
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    /// `(self, other)` as one `dim + other.dim` index.
    pub fn concat(&self, other: &MultiIndex) -> Vec<usize> {
        self.0.iter().chain(&other.0).copied().collect()
    }
}

/// Real symmetric matrix, serialized row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct SymmetricMatrix(DMatrix<f64>);

impl TryFrom<Vec<Vec<f64>>> for SymmetricMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        SymmetricMatrix::new(matrix_from_rows(rows)?)
    }
}

impl From<SymmetricMatrix> for Vec<Vec<f64>> {
    fn from(m: SymmetricMatrix) -> Self {
        matrix_to_rows(&m.0)
    }
}

impl SymmetricMatrix {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        if !entries.is_square() || entries.nrows() == 0 {
            return Err(Error::Dimension(format!("expected a nonempty square matrix, got {}×{}", entries.nrows(), entries.ncols())));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index: entries.iter().position(|v| !v.is_finite()).unwrap_or(0) });
        }
        let defect = (&entries - entries.transpose()).amax();
        if defect > SYMMETRY_TOL {
            return Err(Error::InvalidArgument(format!("matrix is not symmetric: defect {defect:e}")));
        }
        Ok(SymmetricMatrix(entries))
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::try_from(rows)
    }

    pub fn identity(dim: usize, scale: f64) -> Self {
        SymmetricMatrix(DMatrix::identity(dim, dim) * scale)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.0
    }

    /// All leading principal minors positive.
    pub fn is_positive_definite(&self) -> bool {
        self.0.clone().cholesky().is_some()
    }
}

pub(crate) fn matrix_from_rows(rows: Vec<Vec<f64>>) -> Result<DMatrix<f64>> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != m) {
        return Err(Error::Dimension("ragged matrix rows".into()));
    }
    Ok(DMatrix::from_row_iterator(n, m, rows.into_iter().flatten()))
}

pub(crate) fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOverlapSpec {
    #[serde(rename = "R_her")]
    big_r: SymmetricMatrix,
    #[serde(rename = "r_her")]
    small_r: SymmetricMatrix,
    #[serde(rename = "Lambda")]
    lambda: Vec<Vec<f64>>,
    #[serde(rename = "M_quad")]
    m_quad: SymmetricMatrix,
    c: Vec<f64>,
    d: Vec<f64>,
}

/// Parameters of `∫ H_n^{R}(x) H_m^{r}(Λx + d) exp(−xMx + cx) dᴺx`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawOverlapSpec", into = "RawOverlapSpec")]
pub struct OverlapSpec {
    big_r: SymmetricMatrix,
    small_r: SymmetricMatrix,
    lambda: DMatrix<f64>,
    m_quad: SymmetricMatrix,
    c: DVector<f64>,
    d: DVector<f64>,
}

impl TryFrom<RawOverlapSpec> for OverlapSpec {
    type Error = Error;

    fn try_from(raw: RawOverlapSpec) -> Result<Self> {
        OverlapSpec::new(
            raw.big_r,
            raw.small_r,
            matrix_from_rows(raw.lambda)?,
            raw.m_quad,
            DVector::from_vec(raw.c),
            DVector::from_vec(raw.d),
        )
    }
}

impl From<OverlapSpec> for RawOverlapSpec {
    fn from(s: OverlapSpec) -> Self {
        RawOverlapSpec {
            lambda: matrix_to_rows(&s.lambda),
            c: s.c.iter().copied().collect(),
            d: s.d.iter().copied().collect(),
            big_r: s.big_r,
            small_r: s.small_r,
            m_quad: s.m_quad,
        }
    }
}

impl OverlapSpec {
    pub fn new(
        big_r: SymmetricMatrix,
        small_r: SymmetricMatrix,
        lambda: DMatrix<f64>,
        m_quad: SymmetricMatrix,
        c: DVector<f64>,
        d: DVector<f64>,
    ) -> Result<Self> {
        let n = big_r.dim();
        if small_r.dim() != n || m_quad.dim() != n || lambda.shape() != (n, n) || c.len() != n || d.len() != n {
            return Err(Error::Dimension(format!("all overlap parameters must share dimension {n}")));
        }
        if lambda.iter().chain(c.iter()).chain(d.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite overlap parameter".into()));
        }
        if !m_quad.is_positive_definite() {
            return Err(Error::NotPositiveDefinite("M_quad".into()));
        }
        Ok(OverlapSpec { big_r, small_r, lambda, m_quad, c, d })
    }

    /// One-dimensional spec from scalar parameters.
    pub fn scalar(big_r: f64, small_r: f64, lambda: f64, m_quad: f64, c: f64, d: f64) -> Result<Self> {
        Self::new(
            SymmetricMatrix::identity(1, big_r),
            SymmetricMatrix::identity(1, small_r),
            DMatrix::from_element(1, 1, lambda),
            SymmetricMatrix::identity(1, m_quad),
            DVector::from_element(1, c),
            DVector::from_element(1, d),
        )
    }

    pub fn dim(&self) -> usize {
        self.big_r.dim()
    }

    pub fn big_r(&self) -> &DMatrix<f64> {
        self.big_r.entries()
    }

    pub fn small_r(&self) -> &DMatrix<f64> {
        self.small_r.entries()
    }

    pub fn lambda(&self) -> &DMatrix<f64> {
        &self.lambda
    }

    pub fn m_quad(&self) -> &DMatrix<f64> {
        self.m_quad.entries()
    }

    pub fn c(&self) -> &DVector<f64> {
        &self.c
    }

    pub fn d(&self) -> &DVector<f64> {
        &self.d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multi_index_budget() {
        assert!(MultiIndex::new(vec![8, 8]).is_ok());
        assert!(matches!(MultiIndex::new(vec![9, 8]), Err(Error::DegreeBudget { total: 17, .. })));
        assert!(MultiIndex::new(vec![]).is_err());
        let a = MultiIndex::new(vec![1, 2]).unwrap();
        assert_eq!(a.concat(&MultiIndex::new(vec![3]).unwrap()), vec![1, 2, 3]);
    }

    #[test]
    fn symmetric_checks() {
        assert!(SymmetricMatrix::from_rows(vec![vec![1.0, 2.0], vec![2.0, 1.0]]).is_ok());
        assert!(SymmetricMatrix::from_rows(vec![vec![1.0, 2.0], vec![2.1, 1.0]]).is_err());
        assert!(SymmetricMatrix::from_rows(vec![vec![1.0, 2.0]]).is_err());
        assert!(SymmetricMatrix::from_rows(vec![vec![1.0, 2.0], vec![2.0]]).is_err());
        assert!(!SymmetricMatrix::from_rows(vec![vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap().is_positive_definite());
    }

    #[test]
    fn spec_json() {
        let text = r#"{"R_her":[[2.0]],"r_her":[[2.0]],"Lambda":[[1.0]],"M_quad":[[1.0]],"c":[0.5],"d":[0.0]}"#;
        let spec: OverlapSpec = serde_json::from_str(text).unwrap();
        assert_eq!(spec.dim(), 1);
        assert_eq!(spec.c()[0], 0.5);
        let back: OverlapSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
        let bad_m = r#"{"R_her":[[2.0]],"r_her":[[2.0]],"Lambda":[[1.0]],"M_quad":[[-1.0]],"c":[0.0],"d":[0.0]}"#;
        assert!(serde_json::from_str::<OverlapSpec>(bad_m).is_err());
        let extra = r#"{"R_her":[[2.0]],"r_her":[[2.0]],"Lambda":[[1.0]],"M_quad":[[1.0]],"c":[0.0],"d":[0.0],"x":1}"#;
        assert!(serde_json::from_str::<OverlapSpec>(extra).is_err());
        let dims = r#"{"R_her":[[2.0]],"r_her":[[2.0]],"Lambda":[[1.0]],"M_quad":[[1.0]],"c":[0.0,1.0],"d":[0.0]}"#;
        assert!(serde_json::from_str::<OverlapSpec>(dims).is_err());
    }
}
