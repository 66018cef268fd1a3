//! Directional greedy empirical interpolation.
//!
//! Running in direction [`Direction::X`] treats `x` as the space variable
//! and `y` as a parameter: each iteration picks the parameter value whose
//! slice is worst reproduced by the current interpolant, then the space
//! point where that residual slice peaks. The new basis function is the
//! residual slice normalized at that point, and all earlier functions are
//! corrected so the whole family keeps the Lagrange property
//! `q_i(t_j) = δ_ij`. Direction [`Direction::Y`] swaps the roles.
//!
//! Storage is exact but factored. With `A[(i, j)] = f(t_i, p_j)` and its
//! unpivoted LU factorization `A = L U` (greedy order), the normalized
//! residual slices are `h(t) = U⁻ᵀ a(t)`, `a_j(t) = f(t, p_j)`, and the
//! Lagrange functions are `q(t) = B h(t)` where `B` is built by the
//! incremental basis update. Every `q_i` is therefore a linear combination
//! of the slices `f(·, p_j)` and can be evaluated anywhere the source can;
//! the explicit slice coefficients `B U⁻ᵀ` are available but badly
//! conditioned, so evaluation never forms them.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gridfn::{FunctionSource, Grid, Interval};

/// First pivots below this magnitude mean the function is zero on the grid.
pub const ZERO_FUNCTION_THRESHOLD: f64 = 1e-300;

/// Lagrange defect above which a conditioning warning is logged.
pub const LAGRANGE_WARN_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    X,
    Y,
}

impl Direction {
    pub fn space_interval(self, f: &FunctionSource) -> Interval {
        match self {
            Direction::X => f.domain().x,
            Direction::Y => f.domain().y,
        }
    }

    pub fn param_interval(self, f: &FunctionSource) -> Interval {
        match self {
            Direction::X => f.domain().y,
            Direction::Y => f.domain().x,
        }
    }

    /// `f(t, p)` for X, `f(p, t)` for Y.
    pub fn slice(self, f: &FunctionSource, t: f64, p: f64) -> Result<f64> {
        match self {
            Direction::X => f.sample(t, p),
            Direction::Y => f.sample(p, t),
        }
    }
}

#[derive(Debug, Clone)]
pub struct EimConfig {
    pub max_rank: usize,
    /// Stop once a pivot falls below `pivot_tol` times the first pivot.
    pub pivot_tol: f64,
    /// Stop once the absolute sup residual over the selection grids is at
    /// or below this value.
    pub residual_tol: Option<f64>,
    pub space_grid: Grid,
    pub param_grid: Grid,
}

impl EimConfig {
    pub fn new(max_rank: usize, space_grid: Grid, param_grid: Grid) -> Self {
        Self {
            max_rank,
            pivot_tol: 1e-12,
            residual_tol: None,
            space_grid,
            param_grid,
        }
    }

    /// Configuration with selection grids resolved from the source: its
    /// own nodes when tabulated, `selection_points`-point uniform grids
    /// otherwise.
    pub fn for_source(
        f: &FunctionSource,
        direction: Direction,
        max_rank: usize,
        selection_points: usize,
    ) -> Result<Self> {
        let (gx, gy) = f.sampling_grids(selection_points)?;
        let (space, param) = match direction {
            Direction::X => (gx, gy),
            Direction::Y => (gy, gx),
        };
        Ok(Self::new(max_rank, space, param))
    }

    fn validate(&self, f: &FunctionSource, direction: Direction) -> Result<()> {
        if self.max_rank == 0 {
            return Err(Error::InvalidConfig("max_rank must be at least 1".into()));
        }
        if !(self.pivot_tol > 0.0) {
            return Err(Error::InvalidConfig("pivot_tol must be positive".into()));
        }
        if let Some(tol) = self.residual_tol {
            if !(tol >= 0.0) {
                return Err(Error::InvalidConfig("residual_tol must be nonnegative".into()));
            }
        }
        if !self.space_grid.within(&direction.space_interval(f))
            || !self.param_grid.within(&direction.param_interval(f))
        {
            return Err(Error::InvalidConfig(
                "selection grids must lie inside the function domain".into(),
            ));
        }
        Ok(())
    }
}

/// Magic points, parameter pivots and Lagrange basis for one direction.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionalBasis {
    direction: Direction,
    points: Vec<f64>,
    pivots: Vec<f64>,
    pivot_magnitudes: Vec<f64>,
    /// `A[(i, j)] = f(t_i, p_j)` (arguments swapped for Y).
    samples: DMatrix<f64>,
    /// Upper factor of `A`: row i holds the residual after `i` steps,
    /// sampled at `t_i` across the pivots.
    cross: DMatrix<f64>,
    /// `q = B h`; upper triangular with unit diagonal.
    lagrange: DMatrix<f64>,
    final_residual: f64,
}

/// Index and absolute value of the largest-magnitude entry; ties go to the
/// lowest index.
fn abs_argmax(values: impl Iterator<Item = f64>) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in values.enumerate() {
        if v.abs() > best.1 {
            best = (i, v.abs());
        }
    }
    best
}

pub fn run_directional_eim(
    f: &FunctionSource,
    direction: Direction,
    cfg: &EimConfig,
) -> Result<DirectionalBasis> {
    cfg.validate(f, direction)?;
    let space = cfg.space_grid.points();
    let params = cfg.param_grid.points();

    let mut residual = DMatrix::zeros(space.len(), params.len());
    for (j, &p) in params.iter().enumerate() {
        for (i, &t) in space.iter().enumerate() {
            residual[(i, j)] = direction.slice(f, t, p)?;
        }
    }

    let mut points = Vec::new();
    let mut pivots = Vec::new();
    let mut pivot_magnitudes: Vec<f64> = Vec::new();

    let final_residual = loop {
        // ỹ_k: parameter column with the largest sup residual; t_k: where
        // that column peaks. Strict comparisons keep the lowest index.
        let mut best = (0, 0, f64::NEG_INFINITY);
        for j in 0..residual.ncols() {
            let (i, v) = abs_argmax(residual.column(j).iter().copied());
            if v > best.2 {
                best = (i, j, v);
            }
        }
        let (si, pj, magnitude) = best;
        let k = points.len();
        if k == 0 && !(magnitude >= ZERO_FUNCTION_THRESHOLD) {
            return Err(Error::ZeroFunction);
        }
        if k == cfg.max_rank {
            break magnitude;
        }
        if cfg.residual_tol.is_some_and(|tol| magnitude <= tol) {
            log::info!("iter {}: residual {magnitude:e} meets residual_tol, stopping", k + 1);
            break magnitude;
        }
        if k > 0 && (magnitude == 0.0 || magnitude < cfg.pivot_tol * pivot_magnitudes[0]) {
            log::info!("iter {}: pivot {magnitude:e} below relative pivot_tol, stopping", k + 1);
            break magnitude;
        }

        let pivot = residual[(si, pj)];
        let column = residual.column(pj) / pivot;
        let row = residual.row(si).clone_owned();
        residual -= &column * &row;
        residual.row_mut(si).fill(0.0);
        residual.column_mut(pj).fill(0.0);

        log::info!(
            "iter {}: pivot={} point={} param={}",
            k + 1,
            magnitude,
            space[si],
            params[pj]
        );
        points.push(space[si]);
        pivots.push(params[pj]);
        pivot_magnitudes.push(magnitude);
    };

    let m = points.len();
    let mut samples = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            samples[(i, j)] = direction.slice(f, points[i], pivots[j])?;
        }
    }
    let (cross, lagrange) = factorize(&samples)?;

    let basis = DirectionalBasis {
        direction,
        points,
        pivots,
        pivot_magnitudes,
        samples,
        cross,
        lagrange,
        final_residual,
    };
    let defect = basis.lagrange_defect();
    if defect > LAGRANGE_WARN_THRESHOLD {
        log::warn!("Lagrange property violated by {defect:e}; basis is ill-conditioned");
    }
    Ok(basis)
}

/// Unpivoted LU of the slice samples `A = L U` followed by the Lagrange
/// update: at step k the new function is `h_k`, and each earlier `q_i`
/// subtracts `q_i(t_k) h_k`. Returns `(U, B)`.
fn factorize(a: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let m = a.nrows();
    // lower[(i, l)] = h_l(t_i)
    let mut lower = DMatrix::<f64>::identity(m, m);
    let mut upper = DMatrix::<f64>::zeros(m, m);
    let mut lagrange = DMatrix::<f64>::zeros(m, m);
    for k in 0..m {
        for j in k..m {
            let mut v = a[(k, j)];
            for l in 0..k {
                v -= lower[(k, l)] * upper[(l, j)];
            }
            upper[(k, j)] = v;
        }
        let pivot = upper[(k, k)];
        if !(pivot.is_finite() && pivot != 0.0) {
            return Err(Error::Numeric(format!(
                "degenerate residual pivot at iteration {}",
                k + 1
            )));
        }
        for i in (k + 1)..m {
            let mut v = a[(i, k)];
            for l in 0..k {
                v -= lower[(i, l)] * upper[(l, k)];
            }
            lower[(i, k)] = v / pivot;
        }

        lagrange[(k, k)] = 1.0;
        for i in 0..k {
            let q_i_at_tk: f64 = (i..k).map(|l| lagrange[(i, l)] * lower[(k, l)]).sum();
            lagrange[(i, k)] = -q_i_at_tk;
        }
    }
    Ok((upper, lagrange))
}

impl DirectionalBasis {
    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// Magic points `t_1..t_m` in the space variable.
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Parameter values of the selected slices.
    pub fn pivots(&self) -> &[f64] {
        &self.pivots
    }

    pub fn pivot_magnitudes(&self) -> &[f64] {
        &self.pivot_magnitudes
    }

    /// Coefficients of the Lagrange functions in the normalized residual
    /// slices: `q_i = Σ_k coeffs[(i, k)] h_k`. Invariant under scaling of
    /// the source.
    pub fn coeffs(&self) -> &DMatrix<f64> {
        &self.lagrange
    }

    /// Residual cross rows: the upper LU factor of the slice samples.
    pub fn cross(&self) -> &DMatrix<f64> {
        &self.cross
    }

    /// Explicit coefficients `C` with `q_i(t) = Σ_j C[(i, j)] f(t, p_j)`.
    pub fn slice_coefficients(&self) -> Result<DMatrix<f64>> {
        let ut_inv = self
            .cross
            .transpose()
            .solve_lower_triangular(&DMatrix::identity(self.achieved_rank(), self.achieved_rank()))
            .ok_or_else(|| Error::Numeric("singular cross factor".into()))?;
        Ok(&self.lagrange * ut_inv)
    }

    pub fn achieved_rank(&self) -> usize {
        self.points.len()
    }

    /// Sup of the residual over the selection grids when the loop stopped.
    pub fn final_residual(&self) -> f64 {
        self.final_residual
    }

    /// `max |q_i(t_j) − δ_ij|`, re-evaluating the basis from the stored
    /// slice samples at the magic points.
    pub fn lagrange_defect(&self) -> f64 {
        let m = self.achieved_rank();
        let q = self.basis_from_slices(&self.samples);
        let mut worst = 0.0f64;
        for j in 0..m {
            for i in 0..m {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((q[(j, i)] - target).abs());
            }
        }
        worst
    }

    /// The basis a run capped at `rank` iterations would have produced:
    /// the greedy choices are nested, only the coefficients change.
    pub fn leading(&self, rank: usize) -> Result<DirectionalBasis> {
        let m = self.achieved_rank();
        if rank == 0 || rank > m {
            return Err(Error::InvalidRank {
                requested: rank,
                max: m,
            });
        }
        let samples = self.samples.view((0, 0), (rank, rank)).into_owned();
        let (cross, lagrange) = factorize(&samples)?;
        let final_residual = if rank == m {
            self.final_residual
        } else {
            self.pivot_magnitudes[rank]
        };
        Ok(DirectionalBasis {
            direction: self.direction,
            points: self.points[..rank].to_vec(),
            pivots: self.pivots[..rank].to_vec(),
            pivot_magnitudes: self.pivot_magnitudes[..rank].to_vec(),
            samples,
            cross,
            lagrange,
            final_residual,
        })
    }

    /// Maps slice values (one row per evaluation point, one column per
    /// pivot) to Lagrange basis values with the same layout.
    fn basis_from_slices(&self, slices: &DMatrix<f64>) -> DMatrix<f64> {
        // h rows solve h U = a, i.e. Uᵀ hᵀ = aᵀ.
        let mut h = slices.transpose();
        let ok = self.cross.transpose().solve_lower_triangular_mut(&mut h);
        debug_assert!(ok, "cross factor has a zero pivot");
        (&self.lagrange * h).transpose()
    }

    fn slice_row(&self, f: &FunctionSource, t: f64) -> Result<Vec<f64>> {
        self.pivots
            .iter()
            .map(|&p| self.direction.slice(f, t, p))
            .collect()
    }

    /// `(q_1(t), …, q_m(t))`.
    pub fn evaluate(&self, f: &FunctionSource, t: f64) -> Result<Vec<f64>> {
        let a = DMatrix::from_row_slice(1, self.achieved_rank(), &self.slice_row(f, t)?);
        Ok(self.basis_from_slices(&a).iter().copied().collect())
    }

    /// Basis values on a grid: row `r` holds `q(grid[r])`.
    pub fn evaluate_on(&self, f: &FunctionSource, grid: &Grid) -> Result<DMatrix<f64>> {
        let m = self.achieved_rank();
        let mut slices = DMatrix::zeros(grid.len(), m);
        for (r, &t) in grid.points().iter().enumerate() {
            for (j, a) in self.slice_row(f, t)?.into_iter().enumerate() {
                slices[(r, j)] = a;
            }
        }
        Ok(self.basis_from_slices(&slices))
    }

    /// `Σ_i f(t_i, param) q_i(t)` (roles of the arguments swapped for Y).
    pub fn interpolate(&self, f: &FunctionSource, t: f64, param: f64) -> Result<f64> {
        let q = self.evaluate(f, t)?;
        let mut acc = 0.0;
        for (&ti, qi) in self.points.iter().zip(q) {
            acc += self.direction.slice(f, ti, param)? * qi;
        }
        Ok(acc)
    }
}

pub fn evaluate_basis(b: &DirectionalBasis, f: &FunctionSource, t: f64) -> Result<Vec<f64>> {
    b.evaluate(f, t)
}

pub fn directional_interpolate(
    b: &DirectionalBasis,
    f: &FunctionSource,
    t: f64,
    param: f64,
) -> Result<f64> {
    b.interpolate(f, t, param)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridfn::{Domain, Interval, Table};

    fn source(name: &str) -> FunctionSource {
        FunctionSource::builtin(name, Domain::unit_square()).unwrap()
    }

    fn run(f: &FunctionSource, dir: Direction, rank: usize) -> DirectionalBasis {
        let cfg = EimConfig::for_source(f, dir, rank, 401).unwrap();
        run_directional_eim(f, dir, &cfg).unwrap()
    }

    #[test]
    fn rank_one_source_stops_after_one_iteration() {
        let f = source("rank1-sep");
        for dir in [Direction::X, Direction::Y] {
            let b = run(&f, dir, 5);
            assert_eq!(b.achieved_rank(), 1);
            let sup_f = 2.0 * 1f64.exp();
            assert!(b.final_residual() <= 1e-12 * sup_f);
        }
    }

    #[test]
    fn rank_one_basis_closed_form() {
        let f = source("rank1-sep");
        let b = run(&f, Direction::X, 5);
        let t1 = b.points()[0];
        for t in [0.0, 0.13, 0.5, 0.77, 1.0] {
            let q = b.evaluate(&f, t).unwrap();
            assert_eq!(q.len(), 1);
            let expected = (1.0 + t) / (1.0 + t1);
            assert!((q[0] - expected).abs() <= 1e-14, "{} vs {expected}", q[0]);
        }
        for (t, p) in [(0.2, 0.9), (0.6, 0.1), (1.0, 1.0)] {
            let v = b.interpolate(&f, t, p).unwrap();
            assert!((v - f.eval(t, p).unwrap()).abs() <= 1e-12 * 2.0 * 1f64.exp());
        }
    }

    #[test]
    fn zero_function_is_rejected() {
        let f = source("zero");
        let cfg = EimConfig::for_source(&f, Direction::X, 3, 401).unwrap();
        assert!(matches!(
            run_directional_eim(&f, Direction::X, &cfg),
            Err(Error::ZeroFunction)
        ));
    }

    #[test]
    fn nan_samples_are_domain_errors() {
        let f = FunctionSource::expression("sqrt(x - 0.5)", Domain::unit_square()).unwrap();
        let cfg = EimConfig::for_source(&f, Direction::X, 3, 11).unwrap();
        assert!(matches!(
            run_directional_eim(&f, Direction::X, &cfg),
            Err(Error::DomainError { .. })
        ));
    }

    #[test]
    fn config_is_validated() {
        let f = source("paper-f");
        let mut cfg = EimConfig::for_source(&f, Direction::X, 3, 11).unwrap();
        cfg.max_rank = 0;
        assert!(matches!(
            run_directional_eim(&f, Direction::X, &cfg),
            Err(Error::InvalidConfig(_))
        ));
        let mut cfg = EimConfig::for_source(&f, Direction::X, 3, 11).unwrap();
        cfg.space_grid = Grid::uniform(Interval::new(0.0, 2.0).unwrap(), 11).unwrap();
        assert!(run_directional_eim(&f, Direction::X, &cfg).is_err());
    }

    #[test]
    fn paper_f_lagrange_property() {
        let f = source("paper-f");
        for dir in [Direction::X, Direction::Y] {
            let b = run(&f, dir, 10);
            assert_eq!(b.achieved_rank(), 10);
            for rank in 1..=10 {
                let lead = b.leading(rank).unwrap();
                for (j, &tj) in lead.points().iter().enumerate() {
                    let q = lead.evaluate(&f, tj).unwrap();
                    for (i, qi) in q.iter().enumerate() {
                        let target = if i == j { 1.0 } else { 0.0 };
                        assert!((qi - target).abs() <= 1e-9, "rank {rank}: q_{i}(t_{j}) = {qi}");
                    }
                }
            }
        }
    }

    #[test]
    fn points_spread_over_interval() {
        let f = source("paper-f");
        let b = run(&f, Direction::X, 10);
        let mut pts = b.points().to_vec();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        assert_eq!(pts.len(), 10);
        assert!(pts.iter().any(|&p| p < 0.3) && pts.iter().any(|&p| p > 0.7));
        let mut piv = b.pivots().to_vec();
        piv.sort_by(f64::total_cmp);
        piv.dedup();
        assert_eq!(piv.len(), 10);
    }

    #[test]
    fn leading_basis_matches_capped_run() {
        let f = source("paper-f");
        let full = run(&f, Direction::Y, 10);
        for rank in [1, 4, 7] {
            let capped = run(&f, Direction::Y, rank);
            let lead = full.leading(rank).unwrap();
            assert_eq!(capped.points(), lead.points());
            assert_eq!(capped.pivots(), lead.pivots());
            assert_eq!(capped.pivot_magnitudes(), lead.pivot_magnitudes());
            assert_eq!(capped.coeffs(), lead.coeffs());
        }
        assert!(full.leading(11).is_err());
        assert!(full.leading(0).is_err());
    }

    #[test]
    fn factored_basis_matches_direct_inverse() {
        // Oracle: q(t) = A⁻ᵀ a(t) with A the slice samples at the magic
        // points, solved by nalgebra's pivoted LU.
        let f = source("paper-f");
        let b = run(&f, Direction::X, 8);
        let a = DMatrix::from_fn(8, 8, |i, j| f.eval(b.points()[i], b.pivots()[j]).unwrap());
        let lu = a.transpose().lu();
        for t in [0.0, 0.21, 0.5, 0.64, 0.93, 1.0] {
            let slices = nalgebra::DVector::from_fn(8, |j, _| f.eval(t, b.pivots()[j]).unwrap());
            let direct = lu.solve(&slices).unwrap();
            let q = b.evaluate(&f, t).unwrap();
            for (d, q) in direct.iter().zip(&q) {
                assert!((d - q).abs() <= 1e-6, "t={t}: {d} vs {q}");
            }
        }
        let c = b.slice_coefficients().unwrap();
        let t = 0.37;
        let slices = nalgebra::DVector::from_fn(8, |j, _| f.eval(t, b.pivots()[j]).unwrap());
        let via_c = &c * slices;
        for (a, q) in via_c.iter().zip(b.evaluate(&f, t).unwrap()) {
            assert!((a - q).abs() <= 1e-6);
        }
    }

    #[test]
    fn lagrange_coefficients_are_unit_upper_triangular() {
        let f = source("paper-f");
        let b = run(&f, Direction::Y, 10);
        let c = b.coeffs();
        for i in 0..10 {
            assert_eq!(c[(i, i)], 1.0);
            for j in 0..i {
                assert_eq!(c[(i, j)], 0.0);
            }
        }
        assert!(b.lagrange_defect() <= 1e-12);
    }

    #[test]
    fn scaling_by_power_of_two_is_bit_exact() {
        let f = source("paper-f");
        let g = FunctionSource::expression(
            "-4*(x+y+x*y+exp(-(x^2+y^2))+sin(3*pi*y)-sin(pi*x*y^2+pi*x*exp(-y)))",
            Domain::unit_square(),
        )
        .unwrap();
        let h = FunctionSource::expression(
            "x+y+x*y+exp(-(x^2+y^2))+sin(3*pi*y)-sin(pi*x*y^2+pi*x*exp(-y))",
            Domain::unit_square(),
        )
        .unwrap();
        for dir in [Direction::X, Direction::Y] {
            let bh = run(&h, dir, 10);
            let bg = run(&g, dir, 10);
            assert_eq!(bh.points(), bg.points());
            assert_eq!(bh.pivots(), bg.pivots());
            assert_eq!(bh.coeffs(), bg.coeffs());
            for (a, b) in bh.pivot_magnitudes().iter().zip(bg.pivot_magnitudes()) {
                assert_eq!(4.0 * a, *b);
            }
            let bf = run(&f, dir, 10);
            assert_eq!(bf.points(), bh.points());
            assert_eq!(bf.pivots(), bh.pivots());
        }
    }

    #[test]
    fn residual_tol_stops_early() {
        let f = source("paper-f");
        let mut cfg = EimConfig::for_source(&f, Direction::X, 10, 201).unwrap();
        cfg.residual_tol = Some(1e-3);
        let b = run_directional_eim(&f, Direction::X, &cfg).unwrap();
        assert!(b.achieved_rank() < 10);
        assert!(b.final_residual() <= 1e-3);
    }

    #[test]
    fn tabulated_source_uses_its_nodes() {
        let gx = Grid::uniform(Interval::unit(), 21).unwrap();
        let gy = Grid::uniform(Interval::unit(), 17).unwrap();
        let values = DMatrix::from_fn(21, 17, |i, j| {
            let (x, y) = (gx.points()[i], gy.points()[j]);
            (x + y).sin() + x * y
        });
        let f = FunctionSource::tabulated(Table::new(gx.clone(), gy, values).unwrap());
        let cfg = EimConfig::for_source(&f, Direction::X, 4, 401).unwrap();
        let b = run_directional_eim(&f, Direction::X, &cfg).unwrap();
        for p in b.points() {
            assert!(gx.node_index(*p).is_some());
        }
        assert!(matches!(
            b.evaluate(&f, 0.0123),
            Err(Error::UnsupportedOffGrid { .. })
        ));
        assert_eq!(b.evaluate(&f, 0.05).unwrap().len(), b.achieved_rank());
    }
}
