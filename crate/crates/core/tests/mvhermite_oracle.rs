use husimi::mvhermite::{
    discrepancy_row, evaluate_overlap, gaussian_overlap, mv_hermite, overlap_oracle, relative_error, DiscrepancyReport,
    MultiIndex, OverlapSpec, SymmetricMatrix,
};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_symmetric(rng: &mut ChaCha8Rng, n: usize, span: f64) -> SymmetricMatrix {
    let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-span..span));
    SymmetricMatrix::new((&a + a.transpose()) * 0.5).unwrap()
}

/// `M = Q diag(λ) Qᵀ` with eigenvalues in `[0.5, 2]`.
fn random_weight(rng: &mut ChaCha8Rng, n: usize) -> SymmetricMatrix {
    let angle: f64 = rng.gen_range(0.0..std::f64::consts::PI);
    let q = if n == 1 { DMatrix::identity(1, 1) } else { DMatrix::from_row_slice(2, 2, &[angle.cos(), -angle.sin(), angle.sin(), angle.cos()]) };
    let d = DMatrix::from_diagonal(&DVector::from_fn(n, |_, _| rng.gen_range(0.5..2.0)));
    let m = &q * d * q.transpose();
    SymmetricMatrix::new((&m + m.transpose()) * 0.5).unwrap()
}

fn random_spec(rng: &mut ChaCha8Rng, n: usize) -> OverlapSpec {
    OverlapSpec::new(
        random_symmetric(rng, n, 1.5),
        random_symmetric(rng, n, 1.5),
        DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0)),
        random_weight(rng, n),
        DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0)),
        DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0)),
    )
    .unwrap()
}

fn random_index(rng: &mut ChaCha8Rng, n: usize, max_total: usize) -> MultiIndex {
    loop {
        let v: Vec<usize> = (0..n).map(|_| rng.gen_range(0..=max_total)).collect();
        if v.iter().sum::<usize>() <= max_total {
            return MultiIndex::new(v).unwrap();
        }
    }
}

#[test]
fn randomized_suite_matches_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0019);
    let mut rows = Vec::new();
    for k in 0..20 {
        let dim = 1 + k % 2;
        let spec = random_spec(&mut rng, dim);
        for _ in 0..3 {
            let n = random_index(&mut rng, dim, 4);
            let m = random_index(&mut rng, dim, 4);
            rows.push(discrepancy_row(&spec, &n, &m).unwrap());
        }
    }
    let report = DiscrepancyReport::from_rows(rows, 1e-6);
    assert_eq!(report.resolved_failures, 0, "worst {:e}", report.max_resolved_rel_err);
    // generic shifts expose the printed right-hand side
    assert!(report.printed_failures > 0);
}

#[test]
fn printed_and_resolved_coincide_without_shifts() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for k in 0..6 {
        let dim = 1 + k % 2;
        let s = random_spec(&mut rng, dim);
        let spec = OverlapSpec::new(
            SymmetricMatrix::new(s.big_r().clone()).unwrap(),
            SymmetricMatrix::new(s.small_r().clone()).unwrap(),
            s.lambda().clone(),
            SymmetricMatrix::new(s.m_quad().clone()).unwrap(),
            DVector::zeros(dim),
            DVector::zeros(dim),
        )
        .unwrap();
        let n = random_index(&mut rng, dim, 3);
        let m = random_index(&mut rng, dim, 3);
        let row = discrepancy_row(&spec, &n, &m).unwrap();
        assert!(row.printed_rel_err.unwrap() < 1e-6 || row.oracle.abs() < 1e-12);
        assert!(row.resolved_rel_err < 1e-6 || row.oracle.abs() < 1e-12);
    }
}

#[test]
fn diagonal_two_dimensional_factorizes() {
    let spec2 = OverlapSpec::new(
        SymmetricMatrix::new(DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 1.3]))).unwrap(),
        SymmetricMatrix::new(DMatrix::from_diagonal(&DVector::from_vec(vec![0.7, 2.0]))).unwrap(),
        DMatrix::from_diagonal(&DVector::from_vec(vec![0.9, -0.6])),
        SymmetricMatrix::new(DMatrix::from_diagonal(&DVector::from_vec(vec![1.1, 0.8]))).unwrap(),
        DVector::from_vec(vec![0.3, -0.2]),
        DVector::from_vec(vec![0.1, 0.4]),
    )
    .unwrap();
    let a = OverlapSpec::scalar(2.0, 0.7, 0.9, 1.1, 0.3, 0.1).unwrap();
    let b = OverlapSpec::scalar(1.3, 2.0, -0.6, 0.8, -0.2, 0.4).unwrap();
    for (n, m) in [([1, 2], [0, 3]), ([2, 2], [1, 1]), ([0, 0], [0, 0]), ([3, 1], [2, 0])] {
        let joint = gaussian_overlap(&spec2, &MultiIndex::new(n.to_vec()).unwrap(), &MultiIndex::new(m.to_vec()).unwrap()).unwrap();
        let fa = gaussian_overlap(&a, &MultiIndex::new(vec![n[0]]).unwrap(), &MultiIndex::new(vec![m[0]]).unwrap()).unwrap();
        let fb = gaussian_overlap(&b, &MultiIndex::new(vec![n[1]]).unwrap(), &MultiIndex::new(vec![m[1]]).unwrap()).unwrap();
        assert!(relative_error(joint, fa * fb) < 1e-8, "{joint} vs {}", fa * fb);
    }
}

#[test]
fn oracle_examples() {
    let spec = OverlapSpec::scalar(2.0, 2.0, 1.0, 1.0, 0.0, 0.0).unwrap();
    let one = MultiIndex::new(vec![1]).unwrap();
    let e = evaluate_overlap(&spec, &one, &one).unwrap();
    assert!(relative_error(e.oracle_value, 2.0 * std::f64::consts::PI.sqrt()) < 1e-6);
    assert!(e.rel_err < 1e-6);
    let r = overlap_oracle(&spec, &MultiIndex::new(vec![2]).unwrap(), &MultiIndex::new(vec![0]).unwrap(), 1e-12).unwrap();
    assert!(r.value.norm() < 1e-10);
}

/// Central stencil weights for the `k`-th derivative, `k ≤ 4`, on offsets `−2..=2`.
fn stencil(k: usize) -> [f64; 5] {
    match k {
        0 => [0.0, 0.0, 1.0, 0.0, 0.0],
        1 => [0.0, -0.5, 0.0, 0.5, 0.0],
        2 => [0.0, 1.0, -2.0, 1.0, 0.0],
        3 => [-0.5, 1.0, 0.0, -1.0, 0.5],
        4 => [1.0, -4.0, 6.0, -4.0, 1.0],
        _ => unreachable!(),
    }
}

const FD_STEP: f64 = 0.3;

/// Mixed partial `∂ⁿ` of `exp(−½aRa + aRx)` at `a = 0` by tensor-product
/// central differences, Richardson-extrapolated over `h, h/2, h/4, h/8`.
fn generating_derivative(r: &DMatrix<f64>, x: &[f64], n: &[usize], h0: f64) -> f64 {
    let dim = n.len();
    let s = r * DVector::from_column_slice(x);
    let g = |a: &DVector<f64>| (-0.5 * (a.transpose() * r * a)[(0, 0)] + a.dot(&s)).exp();
    let estimate = |h: f64| -> f64 {
        let w: Vec<[f64; 5]> = n.iter().map(|&k| stencil(k)).collect();
        let mut total = 0.0;
        let count = 5usize.pow(dim as u32);
        for flat in 0..count {
            let mut a = DVector::zeros(dim);
            let mut weight = 1.0;
            let mut rest = flat;
            for i in 0..dim {
                let o = rest % 5;
                rest /= 5;
                weight *= w[i][o];
                a[i] = (o as f64 - 2.0) * h;
            }
            if weight != 0.0 {
                total += weight * g(&a);
            }
        }
        total / h.powi(n.iter().sum::<usize>() as i32)
    };
    let mut table: Vec<f64> = (0..4).map(|k| estimate(h0 / f64::powi(2.0, k))).collect();
    let mut factor = 4.0;
    while table.len() > 1 {
        table = table.windows(2).map(|w| (factor * w[1] - w[0]) / (factor - 1.0)).collect();
        factor *= 4.0;
    }
    table[0]
}

#[test]
fn generating_function_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for dim in [1usize, 2] {
        for _ in 0..4 {
            let r = random_symmetric(&mut rng, dim, 1.0);
            let x: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            for total in 0..=4usize {
                let indices: Vec<Vec<usize>> =
                    if dim == 1 { vec![vec![total]] } else { (0..=total).map(|a| vec![a, total - a]).collect() };
                for n in indices {
                    let exact = mv_hermite(&r, &MultiIndex::new(n.clone()).unwrap(), &x).unwrap();
                    let fd = generating_derivative(r.entries(), &x, &n, FD_STEP);
                    let scale = exact.abs();
                    if scale > 1e-3 {
                        worst = worst.max((fd - exact).abs() / scale);
                    } else {
                        assert!((fd - exact).abs() < 1e-9, "n = {n:?}: {fd} vs {exact}");
                    }
                }
            }
        }
    }
    assert!(worst < 1e-6, "worst relative error {worst:e}");
}

#[test]
fn leading_growth_along_a_ray() {
    let r = SymmetricMatrix::from_rows(vec![vec![1.2, -0.4], vec![-0.4, 0.9]]).unwrap();
    let dir = [0.6, 0.8];
    let s: [f64; 2] = [1.2 * 0.6 - 0.4 * 0.8, -0.4 * 0.6 + 0.9 * 0.8];
    for n in [vec![2, 1], vec![0, 4], vec![3, 3]] {
        let total: usize = n.iter().sum();
        let lead = s[0].powi(n[0] as i32) * s[1].powi(n[1] as i32);
        let t = 1e4;
        let h = mv_hermite(&r, &MultiIndex::new(n.clone()).unwrap(), &[t * dir[0], t * dir[1]]).unwrap();
        assert!(relative_error(h / t.powi(total as i32), lead) < 1e-6, "n = {n:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn permutation_symmetry(
        r11 in -2.0f64..2.0, r12 in -2.0f64..2.0, r22 in -2.0f64..2.0,
        x1 in -2.0f64..2.0, x2 in -2.0f64..2.0,
        n1 in 0usize..6, n2 in 0usize..6,
    ) {
        let r = SymmetricMatrix::from_rows(vec![vec![r11, r12], vec![r12, r22]]).unwrap();
        let swapped = SymmetricMatrix::from_rows(vec![vec![r22, r12], vec![r12, r11]]).unwrap();
        let a = mv_hermite(&r, &MultiIndex::new(vec![n1, n2]).unwrap(), &[x1, x2]).unwrap();
        let b = mv_hermite(&swapped, &MultiIndex::new(vec![n2, n1]).unwrap(), &[x2, x1]).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn diagonal_r_is_a_product(
        r1 in 0.5f64..3.0, r2 in 0.5f64..3.0,
        x1 in -2.0f64..2.0, x2 in -2.0f64..2.0,
        n1 in 0usize..7, n2 in 0usize..7,
    ) {
        let r = SymmetricMatrix::new(DMatrix::from_diagonal(&DVector::from_vec(vec![r1, r2]))).unwrap();
        let a = mv_hermite(&r, &MultiIndex::new(vec![n1, n2]).unwrap(), &[x1, x2]).unwrap();
        let h1 = mv_hermite(&SymmetricMatrix::identity(1, r1), &MultiIndex::new(vec![n1]).unwrap(), &[x1]).unwrap();
        let h2 = mv_hermite(&SymmetricMatrix::identity(1, r2), &MultiIndex::new(vec![n2]).unwrap(), &[x2]).unwrap();
        prop_assert!((a - h1 * h2).abs() <= 1e-11 * a.abs().max(1.0));
    }
}
