mod common;

use common::*;
use nalgebra::DMatrix;
use septensor_core::{FunctionSource, tensor};

fn collocation(b: &septensor_core::DirectionalBasis, f: &FunctionSource) -> DMatrix<f64> {
    let rows: Vec<Vec<f64>> = b.points().iter().map(|&t| b.evaluate(f, t).unwrap()).collect();
    DMatrix::from_fn(rows.len(), rows.len(), |i, j| rows[i][j])
}

#[test]
fn collocation_matrices_are_identity() {
    let f = paper_f();
    for m in [2, 5, 10] {
        let t = tensor::teim(&f, m, m, 401).unwrap();
        for b in [t.basis_x(), t.basis_y()] {
            let c = collocation(b, &f);
            let d = max_abs(&(c - DMatrix::identity(m, m)));
            assert!(d <= 1e-9, "m = {m}: defect {d}");
        }
    }
}

#[test]
fn interpolation_is_exact_along_magic_lines() {
    let f = paper_f();
    let t = tensor::teim(&f, 10, 10, 401).unwrap();
    let g = unit_grid(1001);
    let norm = max_abs(&septensor_core::Surrogate::grid_values(&f, &g, &g).unwrap());
    for &xk in t.basis_x().points() {
        for &y in g.points() {
            let e = (t.evaluate(xk, y).unwrap() - f.eval(xk, y).unwrap()).abs();
            assert!(e <= 1e-8 * norm, "x = {xk}, y = {y}: {e}");
        }
    }
    for &yk in t.basis_y().points() {
        for &x in g.points() {
            let e = (t.evaluate(x, yk).unwrap() - f.eval(x, yk).unwrap()).abs();
            assert!(e <= 1e-8 * norm, "x = {x}, y = {yk}: {e}");
        }
    }
}

#[test]
fn leading_blocks_are_nested() {
    let f = paper_f();
    let t = tensor::teim(&f, 8, 8, 201).unwrap();
    let small = tensor::teim(&f, 4, 3, 201).unwrap();
    let lead = t.leading(4, 3).unwrap();
    assert_eq!(lead.magic_points(), small.magic_points());
    assert_eq!(lead.values(), small.values());
}
