use nalgebra::{ComplexField, DMatrix};

use crate::error::{Error, Result};

use super::types::{MultiIndex, SymmetricMatrix, DEGREE_BUDGET};

/// `H_n^{R}(x)` defined by `exp(−½aRa + aRx) = Σₙ H_n^{R}(x) aⁿ/n!`.
pub fn mv_hermite(r: &SymmetricMatrix, n: &MultiIndex, x: &[f64]) -> Result<f64> {
    let dim = r.dim();
    if n.dim() != dim || x.len() != dim {
        return Err(Error::Dimension(format!("R is {dim}×{dim} but n has {} entries and x has {}", n.dim(), x.len())));
    }
    let rm = r.entries();
    let s: Vec<f64> = (0..dim).map(|k| (0..dim).map(|j| rm[(k, j)] * x[j]).sum()).collect();
    mv_hermite_shifted(rm, n.entries(), &s)
}

/// `H_n^{R}` evaluated from `s = Rx` directly, so that `R` need not be
/// invertible and `x` never has to be formed.
pub fn mv_hermite_shifted<T: ComplexField + Copy>(r: &DMatrix<T>, n: &[usize], s: &[T]) -> Result<T> {
    hermite_with_budget(r, n, s, DEGREE_BUDGET)
}

pub(crate) fn hermite_with_budget<T: ComplexField + Copy>(r: &DMatrix<T>, n: &[usize], s: &[T], budget: usize) -> Result<T> {
    let dim = n.len();
    if dim == 0 || r.shape() != (dim, dim) || s.len() != dim {
        return Err(Error::Dimension(format!("index of length {dim} against a {:?} matrix and {} shifts", r.shape(), s.len())));
    }
    let total: usize = n.iter().sum();
    if total > budget {
        return Err(Error::DegreeBudget { total, limit: budget });
    }
    let table = hermite_table(r, s, n);
    Ok(*table.last().unwrap())
}

/// Every `H_k` with `0 ≤ k ≤ n` componentwise, in mixed-radix order with the
/// first coordinate running fastest.
///
/// `H_{k+e_j} = s_j H_k − Σᵢ R_{ji} kᵢ H_{k−eᵢ}`, stepping along the first
/// nonzero coordinate so every dependency has a smaller flat index.
fn hermite_table<T: ComplexField + Copy>(r: &DMatrix<T>, s: &[T], n: &[usize]) -> Vec<T> {
    let dim = n.len();
    let mut stride = vec![1usize; dim];
    for k in 1..dim {
        stride[k] = stride[k - 1] * (n[k - 1] + 1);
    }
    let size = stride[dim - 1] * (n[dim - 1] + 1);
    let mut table = vec![T::zero(); size];
    table[0] = T::one();
    let mut idx = vec![0usize; dim];
    for flat in 1..size {
        // advance the mixed-radix counter
        for k in 0..dim {
            if idx[k] < n[k] {
                idx[k] += 1;
                break;
            }
            idx[k] = 0;
        }
        let j = idx.iter().position(|&v| v > 0).unwrap();
        let base = flat - stride[j];
        let mut value = s[j] * table[base];
        for i in 0..dim {
            let ki = idx[i] - usize::from(i == j);
            if ki > 0 {
                value -= r[(j, i)] * T::from_real(nalgebra::convert(ki as f64)) * table[base - stride[i]];
            }
        }
        table[flat] = value;
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C64;

    fn physicists(n: usize, x: f64) -> f64 {
        let (mut a, mut b) = (1.0, 2.0 * x);
        if n == 0 {
            return a;
        }
        for k in 1..n {
            let c = 2.0 * x * b - 2.0 * k as f64 * a;
            a = b;
            b = c;
        }
        b
    }

    #[test]
    fn trivial_index() {
        let r = SymmetricMatrix::from_rows(vec![vec![1.3, -0.2], vec![-0.2, 0.7]]).unwrap();
        assert_eq!(mv_hermite(&r, &MultiIndex::zeros(2).unwrap(), &[0.4, -2.0]).unwrap(), 1.0);
    }

    #[test]
    fn reduces_to_physicists_hermite() {
        let r = SymmetricMatrix::identity(1, 2.0);
        assert_eq!(mv_hermite(&r, &MultiIndex::new(vec![2]).unwrap(), &[1.0]).unwrap(), 2.0);
        for n in 0..=16 {
            for x in [-1.7, 0.0, 0.3, 2.5] {
                let h = mv_hermite(&r, &MultiIndex::new(vec![n]).unwrap(), &[x]).unwrap();
                let e = physicists(n, x);
                assert!((h - e).abs() <= 1e-12 * e.abs().max(1.0), "n = {n}, x = {x}");
            }
        }
    }

    #[test]
    fn diagonal_factorizes() {
        let r = SymmetricMatrix::identity(2, 2.0);
        let (a, b) = (0.7, -1.1);
        let h = mv_hermite(&r, &MultiIndex::new(vec![1, 1]).unwrap(), &[a, b]).unwrap();
        assert!((h - 4.0 * a * b).abs() < 1e-14);
        let h = mv_hermite(&r, &MultiIndex::new(vec![3, 2]).unwrap(), &[a, b]).unwrap();
        assert!((h - physicists(3, a) * physicists(2, b)).abs() < 1e-12);
    }

    #[test]
    fn mixed_second_order() {
        // ∂a₁∂a₂ of the generating function: (Rx)₁(Rx)₂ − R₁₂
        let r = SymmetricMatrix::from_rows(vec![vec![1.0, 0.4], vec![0.4, 2.0]]).unwrap();
        let x = [0.3, -0.8];
        let s = [1.0 * 0.3 + 0.4 * -0.8, 0.4 * 0.3 + 2.0 * -0.8];
        let h = mv_hermite(&r, &MultiIndex::new(vec![1, 1]).unwrap(), &x).unwrap();
        assert!((h - (s[0] * s[1] - 0.4)).abs() < 1e-15);
    }

    #[test]
    fn complex_entries() {
        let r = DMatrix::from_element(1, 1, C64::new(2.0, 0.0));
        let z = C64::new(0.3, 0.4);
        let h = mv_hermite_shifted(&r, &[2], &[2.0 * z]).unwrap();
        assert!((h - (4.0 * z * z - 2.0)).norm() < 1e-15);
    }

    #[test]
    fn budget_and_dimensions() {
        let r = DMatrix::from_element(1, 1, 2.0);
        assert!(matches!(mv_hermite_shifted(&r, &[17], &[1.0]), Err(Error::DegreeBudget { .. })));
        assert!(mv_hermite_shifted(&r, &[1, 1], &[1.0]).is_err());
    }
}
