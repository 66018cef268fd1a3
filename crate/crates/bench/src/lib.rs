//! Fixtures shared by the benchmarks.

use nalgebra::DMatrix;
use septensor_core::{
    DiagConfig, Domain, FunctionSource, SvdFactors, TensorInterpolant, svd_decompose, tensor,
};

pub fn paper_f() -> FunctionSource {
    FunctionSource::builtin("paper-f", Domain::unit_square()).expect("builtin exists")
}

pub fn interpolant(m: usize, selection_points: usize) -> TensorInterpolant {
    tensor::teim(&paper_f(), m, m, selection_points).expect("paper-f has rank m")
}

/// Deterministic dense matrix with entries in [-1, 1].
pub fn dense_matrix(rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |i, j| ((i * 31 + j * 17 + 7) as f64 * 0.618).sin())
}

pub fn decomposed(m: usize) -> (TensorInterpolant, SvdFactors, DiagConfig) {
    let t = interpolant(m, 401);
    let svd = svd_decompose(t.values()).expect("finite matrix");
    let cfg = DiagConfig::for_source(t.source(), 201).expect("valid grid");
    (t, svd, cfg)
}
