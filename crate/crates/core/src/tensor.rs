//! Tensorized interpolation `I^{m,n} f(x, y) = q(x)ᵀ F s(y)` with
//! `F[(i, j)] = f(x_i, y_j)` on the grid of magic points.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::eim::{DirectionalBasis, Direction, EimConfig, run_directional_eim};
use crate::error::{Error, Result};
use crate::gridfn::{FunctionSource, Grid, Surrogate};

#[derive(Debug, Clone)]
pub struct TensorInterpolant {
    basis_x: DirectionalBasis,
    basis_y: DirectionalBasis,
    values: DMatrix<f64>,
    source: FunctionSource,
}

pub fn build_tensor_interpolant(
    f: &FunctionSource,
    bx: DirectionalBasis,
    by: DirectionalBasis,
) -> Result<TensorInterpolant> {
    if bx.direction() != Direction::X || by.direction() != Direction::Y {
        return Err(Error::InvalidConfig(
            "tensor interpolant needs an X basis and a Y basis".into(),
        ));
    }
    let (xs, ys) = (bx.points(), by.points());
    let mut values = DMatrix::zeros(xs.len(), ys.len());
    for (j, &y) in ys.iter().enumerate() {
        for (i, &x) in xs.iter().enumerate() {
            values[(i, j)] = f.sample(x, y)?;
        }
    }
    Ok(TensorInterpolant {
        basis_x: bx,
        basis_y: by,
        values,
        source: f.clone(),
    })
}

/// Runs both directional searches with the given ranks and assembles the
/// interpolant.
pub fn teim(
    f: &FunctionSource,
    m: usize,
    n: usize,
    selection_points: usize,
) -> Result<TensorInterpolant> {
    let cfg_x = EimConfig::for_source(f, Direction::X, m, selection_points)?;
    let cfg_y = EimConfig::for_source(f, Direction::Y, n, selection_points)?;
    let bx = run_directional_eim(f, Direction::X, &cfg_x)?;
    let by = run_directional_eim(f, Direction::Y, &cfg_y)?;
    build_tensor_interpolant(f, bx, by)
}

/// Magic points and pivots in their exported JSON form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MagicPoints {
    pub x_points: Vec<f64>,
    pub y_points: Vec<f64>,
    pub x_pivots: Vec<f64>,
    pub y_pivots: Vec<f64>,
}

impl TensorInterpolant {
    pub fn basis_x(&self) -> &DirectionalBasis {
        &self.basis_x
    }

    pub fn basis_y(&self) -> &DirectionalBasis {
        &self.basis_y
    }

    /// The collocation matrix `F`.
    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn source(&self) -> &FunctionSource {
        &self.source
    }

    pub fn ranks(&self) -> (usize, usize) {
        (self.values.nrows(), self.values.ncols())
    }

    /// Interpolant built from the leading `m` and `n` basis functions.
    pub fn leading(&self, m: usize, n: usize) -> Result<TensorInterpolant> {
        Ok(TensorInterpolant {
            basis_x: self.basis_x.leading(m)?,
            basis_y: self.basis_y.leading(n)?,
            values: self.values.view((0, 0), (m, n)).into_owned(),
            source: self.source.clone(),
        })
    }

    /// `(q(x)ᵀ F) s(y)`.
    pub fn evaluate(&self, x: f64, y: f64) -> Result<f64> {
        let q = DVector::from_vec(self.basis_x.evaluate(&self.source, x)?);
        let s = DVector::from_vec(self.basis_y.evaluate(&self.source, y)?);
        Ok((q.transpose() * &self.values).dot(&s.transpose()))
    }

    pub fn magic_points(&self) -> MagicPoints {
        MagicPoints {
            x_points: self.basis_x.points().to_vec(),
            y_points: self.basis_y.points().to_vec(),
            x_pivots: self.basis_x.pivots().to_vec(),
            y_pivots: self.basis_y.pivots().to_vec(),
        }
    }
}

pub fn evaluate_interpolant(t: &TensorInterpolant, x: f64, y: f64) -> Result<f64> {
    t.evaluate(x, y)
}

impl Surrogate for TensorInterpolant {
    fn value(&self, x: f64, y: f64) -> Result<f64> {
        self.evaluate(x, y)
    }

    fn grid_values(&self, gx: &Grid, gy: &Grid) -> Result<DMatrix<f64>> {
        let q = self.basis_x.evaluate_on(&self.source, gx)?;
        let s = self.basis_y.evaluate_on(&self.source, gy)?;
        Ok((q * &self.values) * s.transpose())
    }
}
