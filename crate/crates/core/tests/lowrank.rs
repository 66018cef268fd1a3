mod common;

use common::*;
use nalgebra::DMatrix;
use septensor_core::{Surrogate, frobenius_tail, lowrank, svd_decompose, tensor, truncate};

#[test]
fn eigen_oracle_sanity() {
    let a = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 1.0, 2.0, 0.0, 0.0, 0.0, 5.0]);
    let ev = sym_eigenvalues(&a);
    for (got, want) in ev.iter().zip([5.0, 3.0, 1.0]) {
        assert!((got - want).abs() <= 1e-13);
    }
}

#[test]
fn squared_singular_values_match_gram_eigenvalues() {
    for seed in 0..20 {
        for (m, n) in [(4, 4), (6, 8), (8, 6)] {
            let f = random_matrix(seed, m, n);
            let svd = svd_decompose(&f).unwrap();
            let ev = sym_eigenvalues(&(f.transpose() * &f));
            let scale = ev[0];
            for (k, &s) in svd.sigma().iter().enumerate() {
                assert!((s * s - ev[k]).abs() <= 1e-8 * scale, "seed {seed} k {k}");
            }
            for &lam in &ev[svd.sigma().len()..] {
                assert!(lam.abs() <= 1e-8 * scale);
            }
        }
    }
}

#[test]
fn tail_matches_assembled_remainder() {
    for seed in 100..120 {
        let f = random_matrix(seed, 6, 8);
        let svd = svd_decompose(&f).unwrap();
        for k in 0..=svd.rank() {
            let direct = (&f - svd.truncated_matrix(k)).norm();
            let tail = frobenius_tail(&svd, k);
            let floor = 64.0 * f64::EPSILON * f.norm();
            assert!((tail - direct).abs() <= 1e-10 * tail.max(direct) + floor);
        }
        assert!((frobenius_tail(&svd, 0) - f.norm()).abs() <= 1e-13 * f.norm());
    }
}

#[test]
fn energy_is_preserved() {
    let t = tensor::teim(&paper_f(), 10, 10, 401).unwrap();
    let svd = svd_decompose(t.values()).unwrap();
    let energy: f64 = svd.sigma().iter().map(|s| s * s).sum();
    let fro2 = t.values().norm_squared();
    assert!((energy - fro2).abs() <= 1e-13 * fro2);
    let tails: Vec<f64> = (0..=svd.rank()).map(|k| frobenius_tail(&svd, k)).collect();
    assert!(tails.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn sign_pair_flip_leaves_truncation_unchanged() {
    let f = random_matrix(7, 5, 7);
    let svd = svd_decompose(&f).unwrap();
    let mut u = svd.u().clone();
    let mut v = svd.v().clone();
    u.column_mut(1).neg_mut();
    v.column_mut(1).neg_mut();
    let flipped = lowrank::SvdFactors::from_parts(u, svd.sigma().to_vec(), v).unwrap();
    for k in 1..=svd.rank() {
        let d = max_abs(&(svd.truncated_matrix(k) - flipped.truncated_matrix(k)));
        assert!(d <= 1e-14 * f.norm());
    }
}

#[test]
fn full_truncation_equals_interpolant() {
    let f = paper_f();
    let t = tensor::teim(&f, 10, 10, 401).unwrap();
    let svd = svd_decompose(t.values()).unwrap();
    let full = truncate(&t, &svd, svd.rank()).unwrap();
    let g = unit_grid(201);
    let a = full.grid_values(&g, &g).unwrap();
    let b = t.grid_values(&g, &g).unwrap();
    assert!(max_abs(&(&a - &b)) <= 1e-10 * max_abs(&b));
    for &(x, y) in &[(0.2, 0.9), (0.61, 0.33)] {
        let p = full.evaluate(x, y).unwrap();
        let q = t.evaluate(x, y).unwrap();
        assert!((p - q).abs() <= 1e-10 * q.abs().max(1.0));
    }
}

#[test]
fn rank_one_source_is_exact() {
    let f = rank1();
    let t = tensor::teim(&f, 4, 4, 401).unwrap();
    assert_eq!(t.ranks(), (1, 1));
    let svd = svd_decompose(t.values()).unwrap();
    let approx = truncate(&t, &svd, 1).unwrap();
    let g = unit_grid(101);
    let exact = f.grid_values(&g, &g).unwrap();
    let got = approx.grid_values(&g, &g).unwrap();
    assert!(max_abs(&(&exact - &got)) <= 1e-12 * max_abs(&exact));
}

#[test]
fn truncation_errors_shrink_in_frobenius() {
    let t = tensor::teim(&paper_f(), 8, 8, 201).unwrap();
    let svd = svd_decompose(t.values()).unwrap();
    let errs: Vec<f64> = (1..=svd.rank())
        .map(|k| (t.values() - svd.truncated_matrix(k)).norm())
        .collect();
    assert!(errs.windows(2).all(|w| w[1] <= w[0] + 1e-14));
    assert!(truncate(&t, &svd, 0).is_err());
    assert!(truncate(&t, &svd, svd.rank() + 1).is_err());
}
