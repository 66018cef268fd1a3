//! SVD of the collocation matrix and rank-K truncation of the interpolant.
//!
//! With `F = U Σ Vᵀ`, the interpolant rewrites as
//! `Σ_k σ_k φ_k(x) ψ_k(y)` where `φ = Uᵀ q` and `ψ = Vᵀ s`; keeping the
//! first K terms gives the separable surrogate.

mod jacobi;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::eim::DirectionalBasis;
use crate::error::{Error, Result};
use crate::gridfn::{FunctionSource, Grid, Surrogate};
use crate::tensor::TensorInterpolant;

/// Singular values below this fraction of `σ_1` are reported as zero.
pub const SINGULAR_VALUE_CUTOFF: f64 = 1e-14;

/// `F = U diag(σ) Vᵀ` with square orthogonal `U` (m×m) and `V` (n×n).
#[derive(Debug, Clone, PartialEq)]
pub struct SvdFactors {
    u: DMatrix<f64>,
    sigma: Vec<f64>,
    v: DMatrix<f64>,
}

fn orthogonality_defect(q: &DMatrix<f64>) -> f64 {
    let n = q.ncols();
    (q.transpose() * q - DMatrix::<f64>::identity(n, n)).norm()
}

impl SvdFactors {
    /// Assembles factors, enforcing the structural invariants: square
    /// orthogonal `U`, `V`, and nonnegative non-increasing `σ` of length
    /// `min(m, n)`.
    pub fn from_parts(u: DMatrix<f64>, sigma: Vec<f64>, v: DMatrix<f64>) -> Result<Self> {
        let (m, n) = (u.nrows(), v.nrows());
        if !u.is_square() || !v.is_square() || sigma.len() != m.min(n) {
            return Err(Error::Numeric(format!(
                "factor shapes do not match: U {:?}, V {:?}, {} singular values",
                u.shape(),
                v.shape(),
                sigma.len()
            )));
        }
        if sigma.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
            return Err(Error::Numeric("singular values must be finite and nonnegative".into()));
        }
        if sigma.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Numeric("singular values are not sorted in descending order".into()));
        }
        if orthogonality_defect(&u) > 1e-12 * m as f64 {
            return Err(Error::Numeric("U is not orthogonal".into()));
        }
        if orthogonality_defect(&v) > 1e-12 * n as f64 {
            return Err(Error::Numeric("V is not orthogonal".into()));
        }
        Ok(Self { u, sigma, v })
    }

    pub fn u(&self) -> &DMatrix<f64> {
        &self.u
    }

    pub fn v(&self) -> &DMatrix<f64> {
        &self.v
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    /// Number of strictly positive singular values; the largest admissible
    /// truncation rank.
    pub fn rank(&self) -> usize {
        self.sigma.iter().take_while(|&&s| s > 0.0).count()
    }

    /// `U Σ_K Vᵀ`, keeping only the first `k` singular values.
    pub fn truncated_matrix(&self, k: usize) -> DMatrix<f64> {
        let (m, n) = (self.u.nrows(), self.v.nrows());
        let mut sigma = DMatrix::zeros(m, n);
        for (i, &s) in self.sigma.iter().take(k).enumerate() {
            sigma[(i, i)] = s;
        }
        &self.u * sigma * self.v.transpose()
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        self.truncated_matrix(self.sigma.len())
    }

    pub fn u_orthogonality_defect(&self) -> f64 {
        orthogonality_defect(&self.u)
    }

    pub fn v_orthogonality_defect(&self) -> f64 {
        orthogonality_defect(&self.v)
    }

    /// JSON export shape; `U` and `V` are given row by row.
    pub fn export(&self, k: usize) -> SvdExport {
        let rows = |m: &DMatrix<f64>| {
            m.row_iter()
                .map(|r| r.iter().copied().collect())
                .collect()
        };
        SvdExport {
            sigma: self.sigma.clone(),
            u: rows(&self.u),
            v: rows(&self.v),
            k,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvdExport {
    pub sigma: Vec<f64>,
    #[serde(rename = "U")]
    pub u: Vec<Vec<f64>>,
    #[serde(rename = "V")]
    pub v: Vec<Vec<f64>>,
    #[serde(rename = "K")]
    pub k: usize,
}

pub fn svd_decompose(f: &DMatrix<f64>) -> Result<SvdFactors> {
    let (m, n) = f.shape();
    if m == 0 || n == 0 {
        return Err(Error::Numeric("cannot decompose an empty matrix".into()));
    }
    if f.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("matrix has non-finite entries".into()));
    }

    // Work on the tall orientation; for a wide matrix decompose Fᵀ and swap.
    let tall = if m >= n { f.clone() } else { f.transpose() };
    let (rows, cols) = tall.shape();
    let (w, rot) = jacobi::orthogonalize_columns(&tall)?;

    let norms: Vec<f64> = w.column_iter().map(|c| c.norm()).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));

    let sigma_max = norms[order[0]];
    let mut sigma = Vec::with_capacity(cols);
    let mut left = Vec::with_capacity(rows);
    let mut right = Vec::with_capacity(cols);
    for &j in &order {
        right.push(rot.column(j).into_owned());
        if sigma_max > 0.0 && norms[j] >= SINGULAR_VALUE_CUTOFF * sigma_max {
            sigma.push(norms[j]);
            left.push(w.column(j) / norms[j]);
        } else {
            sigma.push(0.0);
        }
    }
    let left = jacobi::complete_basis(left, rows);
    let right = DMatrix::from_columns(&right);

    let (mut u, mut v) = if m >= n { (left, right) } else { (right, left) };
    apply_sign_convention(&mut u, &mut v);
    SvdFactors::from_parts(u, sigma, v)
}

/// Makes the largest-magnitude entry of every `U` column nonnegative
/// (lowest row on ties), flipping the paired `V` column with it. Unpaired
/// trailing columns of `V` get the same rule on their own.
fn apply_sign_convention(u: &mut DMatrix<f64>, v: &mut DMatrix<f64>) {
    fn needs_flip(col: nalgebra::DVectorView<'_, f64>) -> bool {
        let mut best = (0.0f64, 0.0f64);
        for &x in col.iter() {
            if x.abs() > best.0 {
                best = (x.abs(), x);
            }
        }
        best.1 < 0.0
    }
    let paired = u.ncols().min(v.ncols());
    for k in 0..u.ncols() {
        if needs_flip(u.column(k).as_view()) {
            u.column_mut(k).neg_mut();
            if k < paired {
                v.column_mut(k).neg_mut();
            }
        }
    }
    for k in paired..v.ncols() {
        if needs_flip(v.column(k).as_view()) {
            v.column_mut(k).neg_mut();
        }
    }
}

/// `sqrt(Σ_{k > K} σ_k²)`.
pub fn frobenius_tail(factors: &SvdFactors, k: usize) -> f64 {
    factors
        .sigma
        .iter()
        .skip(k)
        .map(|s| s * s)
        .sum::<f64>()
        .sqrt()
}

/// The rank-K separable surrogate `Σ_{k ≤ K} σ_k φ_k(x) ψ_k(y)`.
#[derive(Debug, Clone)]
pub struct LowRankApprox {
    sigma: Vec<f64>,
    /// Row k: coefficients of `φ_k` in the `q` basis (column k of `U`).
    phi_coeffs: DMatrix<f64>,
    /// Row k: coefficients of `ψ_k` in the `s` basis (column k of `V`).
    psi_coeffs: DMatrix<f64>,
    basis_x: DirectionalBasis,
    basis_y: DirectionalBasis,
    source: FunctionSource,
}

pub fn truncate(t: &TensorInterpolant, factors: &SvdFactors, k: usize) -> Result<LowRankApprox> {
    let (m, n) = t.ranks();
    if factors.u.nrows() != m || factors.v.nrows() != n {
        return Err(Error::InvalidConfig(
            "SVD factors do not match the interpolant's collocation matrix".into(),
        ));
    }
    let max = factors.rank();
    if k == 0 || k > max {
        return Err(Error::InvalidRank { requested: k, max });
    }
    Ok(LowRankApprox {
        sigma: factors.sigma[..k].to_vec(),
        phi_coeffs: factors.u.columns(0, k).transpose(),
        psi_coeffs: factors.v.columns(0, k).transpose(),
        basis_x: t.basis_x().clone(),
        basis_y: t.basis_y().clone(),
        source: t.source().clone(),
    })
}

impl LowRankApprox {
    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn phi_coeffs(&self) -> &DMatrix<f64> {
        &self.phi_coeffs
    }

    pub fn psi_coeffs(&self) -> &DMatrix<f64> {
        &self.psi_coeffs
    }

    /// `(φ_1(x), …, φ_K(x))`.
    pub fn phi(&self, x: f64) -> Result<DVector<f64>> {
        let q = DVector::from_vec(self.basis_x.evaluate(&self.source, x)?);
        Ok(&self.phi_coeffs * q)
    }

    /// `(ψ_1(y), …, ψ_K(y))`.
    pub fn psi(&self, y: f64) -> Result<DVector<f64>> {
        let s = DVector::from_vec(self.basis_y.evaluate(&self.source, y)?);
        Ok(&self.psi_coeffs * s)
    }

    /// `φ_k` sampled on a grid, one column per component.
    pub fn phi_on(&self, grid: &Grid) -> Result<DMatrix<f64>> {
        Ok(self.basis_x.evaluate_on(&self.source, grid)? * self.phi_coeffs.transpose())
    }

    pub fn psi_on(&self, grid: &Grid) -> Result<DMatrix<f64>> {
        Ok(self.basis_y.evaluate_on(&self.source, grid)? * self.psi_coeffs.transpose())
    }

    pub fn evaluate(&self, x: f64, y: f64) -> Result<f64> {
        let phi = self.phi(x)?;
        let psi = self.psi(y)?;
        Ok(self
            .sigma
            .iter()
            .zip(phi.iter().zip(psi.iter()))
            .map(|(s, (a, b))| s * a * b)
            .sum())
    }
}

pub fn evaluate_lowrank(l: &LowRankApprox, x: f64, y: f64) -> Result<f64> {
    l.evaluate(x, y)
}

impl Surrogate for LowRankApprox {
    fn value(&self, x: f64, y: f64) -> Result<f64> {
        self.evaluate(x, y)
    }

    fn grid_values(&self, gx: &Grid, gy: &Grid) -> Result<DMatrix<f64>> {
        let mut phi = self.phi_on(gx)?;
        for (k, s) in self.sigma.iter().enumerate() {
            phi.column_mut(k).scale_mut(*s);
        }
        Ok(phi * self.psi_on(gy)?.transpose())
    }
}
