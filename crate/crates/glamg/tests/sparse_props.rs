//! Property tests of the sparse kernels against independent dense oracles.

mod common;

use common::{dense_from_triplets, dense_matmul, dense_matvec, dense_transpose};
use glamg::sparse::{inf_norm, residual, CsrMatrix};
use proptest::prelude::*;

/// Random triplet list for an `n_rows x n_cols` matrix, duplicates allowed.
fn triplets(
    n_rows: usize,
    n_cols: usize,
    max_nnz: usize,
) -> impl Strategy<Value = Vec<(usize, usize, f64)>> {
    prop::collection::vec(
        (0..n_rows, 0..n_cols, -10.0f64..10.0),
        0..=max_nnz,
    )
}

fn matrix_and_triplets() -> impl Strategy<Value = (usize, usize, Vec<(usize, usize, f64)>)> {
    (1usize..=50, 1usize..=50).prop_flat_map(|(r, c)| {
        triplets(r, c, 120).prop_map(move |t| (r, c, t))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn construction_merges_duplicates_by_summation((rows, cols, entries) in matrix_and_triplets()) {
        let a = CsrMatrix::from_triplets(rows, cols, &entries).unwrap();
        let dense = dense_from_triplets(rows, cols, &entries);
        for i in 0..rows {
            let (row_cols, _) = a.row(i);
            prop_assert!(row_cols.windows(2).all(|w| w[0] < w[1]), "columns must strictly increase");
            for j in 0..cols {
                prop_assert!((a.get(i, j) - dense[i][j]).abs() < 1e-12);
            }
        }
        prop_assert_eq!(a.row_ptr().len(), rows + 1);
        prop_assert_eq!(*a.row_ptr().last().unwrap(), a.nnz());
    }

    #[test]
    fn spmv_matches_dense_product(
        (rows, cols, entries) in matrix_and_triplets(),
        xs in prop::collection::vec(-5.0f64..5.0, 50),
    ) {
        let a = CsrMatrix::from_triplets(rows, cols, &entries).unwrap();
        let x = &xs[..cols];
        let dense = dense_from_triplets(rows, cols, &entries);
        let fast = a.spmv(x).unwrap();
        let slow = dense_matvec(&dense, x);
        let scale = common::max_abs(slow.iter().copied()).max(1.0);
        for (f, s) in fast.iter().zip(&slow) {
            prop_assert!((f - s).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn transpose_is_an_involution_and_matches_dense((rows, cols, entries) in matrix_and_triplets()) {
        let a = CsrMatrix::from_triplets(rows, cols, &entries).unwrap();
        let t = a.transpose();
        prop_assert_eq!(t.transpose(), a.clone());
        let dense_t = dense_transpose(&dense_from_triplets(rows, cols, &entries));
        for i in 0..cols {
            for j in 0..rows {
                prop_assert!((t.get(i, j) - dense_t[i][j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn matmul_matches_dense_product(
        (rows, inner, a_entries) in matrix_and_triplets(),
        cols in 1usize..=30,
        b_seed in prop::collection::vec((0usize..50, 0usize..30, -10.0f64..10.0), 0..=100),
    ) {
        let b_entries: Vec<(usize, usize, f64)> = b_seed
            .into_iter()
            .map(|(i, j, v)| (i % inner, j % cols, v))
            .collect();
        let a = CsrMatrix::from_triplets(rows, inner, &a_entries).unwrap();
        let b = CsrMatrix::from_triplets(inner, cols, &b_entries).unwrap();
        let product = a.matmul(&b).unwrap();
        let dense = dense_matmul(
            &dense_from_triplets(rows, inner, &a_entries),
            &dense_from_triplets(inner, cols, &b_entries),
        );
        let scale = common::max_abs(dense.iter().flatten().copied()).max(1.0);
        for i in 0..rows {
            for j in 0..cols {
                prop_assert!((product.get(i, j) - dense[i][j]).abs() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn residual_plus_av_reconstructs_f(
        (n, _, entries) in (1usize..=40, 0usize..1, prop::collection::vec((0usize..40, 0usize..40, -10.0f64..10.0), 0..=120)),
        fs in prop::collection::vec(-5.0f64..5.0, 40),
        vs in prop::collection::vec(-5.0f64..5.0, 40),
    ) {
        let entries: Vec<(usize, usize, f64)> =
            entries.into_iter().map(|(i, j, v)| (i % n, j % n, v)).collect();
        let a = CsrMatrix::from_triplets(n, n, &entries).unwrap();
        let f = &fs[..n];
        let v = &vs[..n];
        let r = residual(&a, f, v).unwrap();
        let av = a.spmv(v).unwrap();
        let scale = common::max_abs(f.iter().copied()).max(common::max_abs(av.iter().copied())).max(1.0);
        for i in 0..n {
            prop_assert!((r[i] + av[i] - f[i]).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn inf_norm_is_absolutely_homogeneous(
        xs in prop::collection::vec(-100.0f64..100.0, 0..40),
        c in -10.0f64..10.0,
    ) {
        let scaled: Vec<f64> = xs.iter().map(|x| c * x).collect();
        let lhs = inf_norm(&scaled);
        let rhs = c.abs() * inf_norm(&xs);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0));
    }

    #[test]
    fn matrix_market_round_trip((rows, cols, entries) in matrix_and_triplets()) {
        let a = CsrMatrix::from_triplets(rows, cols, &entries).unwrap();
        let mut buffer = Vec::new();
        glamg::mm::write_to(&a, &mut buffer).unwrap();
        let b = glamg::mm::read_from(buffer.as_slice(), "buffer").unwrap();
        prop_assert_eq!(a, b);
    }
}
