#![allow(clippy::needless_range_loop)]

use kaczmarz_core::bounds::{bound_theorem1, full_report, true_contraction};
use kaczmarz_core::linalg::{normalize_rows, pinv_norm, svd_values, sweep_matrix};
use kaczmarz_core::solvers::{ka_run, rka_run};
use kaczmarz_core::{Config, Matrix, Matrix32, System, System32};
use proptest::prelude::*;

type Config32 = kaczmarz_core::SolverConfig<f32>;

fn tall_matrix() -> impl Strategy<Value = Matrix> {
    (1usize..5)
        .prop_flat_map(|n| (Just(n), n..3 * n + 2))
        .prop_flat_map(|(n, m)| {
            prop::collection::vec(-1.0f64..1.0, m * n).prop_map(move |d| (m, n, d))
        })
        .prop_filter_map("full rank, nonzero rows", |(m, n, d)| {
            let b = normalize_rows(&Matrix::new(m, n, d).ok()?).ok()?;
            let s = svd_values(&b).ok()?;
            (s.smallest() > 1e-3).then_some(b)
        })
}

/// Eigenvalues of the Gram matrix by 2x2 Jacobi rotations, sorted descending.
fn gram_eigenvalues(b: &Matrix) -> Vec<f64> {
    let n = b.cols();
    let mut g: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| b.row_iter().map(|r| r[i] * r[j]).sum())
                .collect()
        })
        .collect();
    for _ in 0..60 {
        for p in 0..n {
            for q in p + 1..n {
                if g[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = 0.5 * (2.0 * g[p][q]).atan2(g[q][q] - g[p][p]);
                let (s, c) = theta.sin_cos();
                for k in 0..n {
                    let (a, b) = (g[k][p], g[k][q]);
                    g[k][p] = c * a - s * b;
                    g[k][q] = s * a + c * b;
                }
                for k in 0..n {
                    let (a, b) = (g[p][k], g[q][k]);
                    g[p][k] = c * a - s * b;
                    g[q][k] = s * a + c * b;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| g[i][i]).collect();
    ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
    ev
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn singular_values_match_gram_eigenvalues(b in tall_matrix()) {
        let s = svd_values(&b).unwrap().singular_values;
        let ev = gram_eigenvalues(&b);
        prop_assert_eq!(s.len(), ev.len());
        for (x, l) in s.iter().zip(&ev) {
            prop_assert!((x * x - l).abs() <= 1e-10, "{} vs {}", x * x, l);
        }
        // row-normalized: squared singular values sum to m
        prop_assert!((ev.iter().sum::<f64>() - b.rows() as f64).abs() <= 1e-10);
    }

    #[test]
    fn report_is_internally_consistent(b in tall_matrix(), lambda in 0.05f64..1.95) {
        let report = full_report(&b, lambda).unwrap();
        prop_assert!(report.violations(1e-10).is_empty(), "{:?}", report.violations(1e-10));
        if let Some(rho2) = report.rho2 {
            prop_assert!(report.rho_sq_oracle <= rho2 + 1e-10);
        }
    }

    #[test]
    fn sweep_trace_follows_the_sweep_matrix(b in tall_matrix(), lambda in 0.05f64..1.95,
                                            seed in any::<u64>()) {
        let (m, n) = b.shape();
        let x_true: Vec<f64> = (0..n).map(|i| ((seed >> (i % 60)) & 7) as f64 - 3.5).collect();
        let rhs = b.matvec(&x_true).unwrap();
        let sys = System::new(b.clone(), rhs, Some(x_true.clone())).unwrap();
        let trace = ka_run(&sys, &Config::cyclic(lambda, 1), &vec![0.0; n]).unwrap();
        let sweep = sweep_matrix(&b, lambda, &(0..m).collect::<Vec<_>>()).unwrap();
        let theta0: Vec<f64> = x_true.iter().map(|x| -x).collect();
        let theta1 = sweep.matvec(&theta0).unwrap();
        for ((x, t), xt) in trace.final_x.iter().zip(&theta1).zip(&x_true) {
            prop_assert!((x - xt - t).abs() <= 1e-10);
        }
        let rho_sq = true_contraction(&b, lambda).unwrap();
        prop_assert!(trace.sq_errors[1] <= rho_sq * trace.sq_errors[0] * (1.0 + 1e-10) + 1e-24);
    }
}

#[test]
fn single_precision_tracks_double() {
    let rows = [
        [1.0, 0.2, 0.0],
        [0.3, 1.0, -0.4],
        [0.0, 0.5, 1.0],
        [1.0, 1.0, 1.0],
        [-0.6, 0.1, 0.8],
    ];
    let b64 = normalize_rows(&Matrix::from_rows(&rows).unwrap()).unwrap();
    let rows32: Vec<Vec<f32>> = b64
        .row_iter()
        .map(|r| r.iter().map(|&x| x as f32).collect())
        .collect();
    let b32 = Matrix32::from_rows(&rows32).unwrap();

    let p64 = pinv_norm(&b64).unwrap();
    let p32 = pinv_norm(&b32).unwrap();
    assert!((p32 as f64 - p64).abs() <= 1e-5 * p64);
    let r64 = full_report(&b64, 1.0).unwrap();
    let r32 = full_report(&b32, 1.0f32).unwrap();
    for ((k, x), (_, y)) in r64.entries().into_iter().zip(r32.entries()) {
        assert!((x - y as f64).abs() <= 1e-5, "{k}: {x} vs {y}");
    }
    assert!((bound_theorem1(p32, 5, 1.0, false).unwrap() as f64 - r64.rho1).abs() <= 1e-5);

    let x_true = [1.0f32, -2.0, 0.5];
    let rhs = b32.matvec(&x_true).unwrap();
    let sys = System32::new(b32, rhs, Some(x_true.to_vec())).unwrap();
    let cyc = ka_run(&sys, &Config32::cyclic(1.0, 40), &[0.0; 3]).unwrap();
    let rnd = rka_run(&sys, &Config32::randomized(1.0, 40, 42), &[0.0; 3]).unwrap();
    for trace in [cyc, rnd] {
        assert!(*trace.sq_errors.last().unwrap() <= 1e-8 * trace.sq_errors[0]);
    }
}
