//! Domains, sampling grids and the function sources every other module
//! evaluates through.
//!
//! A [`FunctionSource`] is one of three things: a named builtin, a parsed
//! arithmetic expression in `x` and `y`, or a table of samples on a
//! tensor grid. Tabulated sources can only be evaluated at their own
//! nodes; every search over a tabulated source is restricted to them.

use std::f64::consts::PI;
use std::fmt;
use std::io::Read;
use std::path::Path;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::expr::{self, Expr};

/// Absolute tolerance used to match a coordinate against a tabulated node.
pub const NODE_TOLERANCE: f64 = 1e-14;

/// Default number of points per direction for the greedy searches.
pub const DEFAULT_SELECTION_POINTS: usize = 401;

/// Default number of points per direction for sup-norm diagnostics.
pub const DEFAULT_DIAGNOSTIC_POINTS: usize = 1001;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidInterval { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn unit() -> Self {
        Self { lo: 0.0, hi: 1.0 }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn contains(&self, t: f64) -> bool {
        self.lo <= t && t <= self.hi
    }
}

/// The rectangle `I × J` a bivariate function lives on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub x: Interval,
    pub y: Interval,
}

impl Domain {
    pub fn new(x: Interval, y: Interval) -> Self {
        Self { x, y }
    }

    pub fn unit_square() -> Self {
        Self::new(Interval::unit(), Interval::unit())
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        self.x.contains(x) && self.y.contains(y)
    }
}

/// A finite, strictly increasing set of nodes covering an interval,
/// endpoints included.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    interval: Interval,
    points: Vec<f64>,
}

impl Grid {
    /// `n` equispaced nodes including both endpoints.
    ///
    /// Node `i` is computed as `lo + (hi - lo) * (i / (n - 1))`, so a grid
    /// with `2n - 1` points contains the `n`-point grid bit for bit.
    pub fn uniform(interval: Interval, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid(format!(
                "a grid needs at least 2 points, got {n}"
            )));
        }
        let (lo, hi) = (interval.lo, interval.hi);
        let last = (n - 1) as f64;
        let mut points: Vec<f64> = (0..n)
            .map(|i| lo + (hi - lo) * (i as f64 / last))
            .collect();
        points[n - 1] = hi;
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidGrid(format!(
                "{n} points do not resolve the interval [{lo}, {hi}]"
            )));
        }
        Ok(Self { interval, points })
    }

    /// Wraps explicit nodes; the first and last node define the interval.
    pub fn from_points(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidGrid(format!(
                "a grid needs at least 2 points, got {}",
                points.len()
            )));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidGrid("grid nodes must be finite".into()));
        }
        if let Some(w) = points.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidGrid(format!(
                "grid nodes must be strictly increasing ({} is followed by {})",
                w[0], w[1]
            )));
        }
        let interval = Interval::new(points[0], points[points.len() - 1])?;
        Ok(Self { interval, points })
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index of the node within [`NODE_TOLERANCE`] of `t`, if any.
    pub fn node_index(&self, t: f64) -> Option<usize> {
        let i = self.points.partition_point(|&p| p < t);
        [i.checked_sub(1), Some(i)]
            .into_iter()
            .flatten()
            .filter(|&j| j < self.points.len())
            .find(|&j| (self.points[j] - t).abs() <= NODE_TOLERANCE)
    }

    pub fn within(&self, interval: &Interval) -> bool {
        interval.contains(self.points[0]) && interval.contains(self.points[self.len() - 1])
    }
}

/// Named analytic test functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    /// `x + y + xy + exp(-(x² + y²)) + sin(3πy) − sin(πxy² + πx·exp(−y))`
    PaperF,
    /// `(1 + x)·exp(y)`, exactly rank one.
    Rank1Sep,
    Zero,
}

impl Builtin {
    pub const ALL: [Builtin; 3] = [Builtin::PaperF, Builtin::Rank1Sep, Builtin::Zero];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::PaperF => "paper-f",
            Builtin::Rank1Sep => "rank1-sep",
            Builtin::Zero => "zero",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|b| b.name() == name)
            .ok_or_else(|| Error::UnknownBuiltin(name.to_string()))
    }

    pub fn eval(self, x: f64, y: f64) -> f64 {
        match self {
            Builtin::PaperF => {
                x + y + x * y + (-(x * x + y * y)).exp() + (3.0 * PI * y).sin()
                    - (PI * x * y * y + PI * x * (-y).exp()).sin()
            }
            Builtin::Rank1Sep => (1.0 + x) * y.exp(),
            Builtin::Zero => 0.0,
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Names accepted by [`FunctionSource::builtin`].
pub fn builtin_registry() -> Vec<&'static str> {
    Builtin::ALL.iter().map(|b| b.name()).collect()
}

/// Samples of a function on a tensor grid; `values[(i, j)] = f(x_i, y_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    grid_x: Grid,
    grid_y: Grid,
    values: DMatrix<f64>,
}

impl Table {
    pub fn new(grid_x: Grid, grid_y: Grid, values: DMatrix<f64>) -> Result<Self> {
        if values.nrows() != grid_x.len() || values.ncols() != grid_y.len() {
            return Err(Error::Tabulated(format!(
                "sample matrix is {}x{} but the grids have {} and {} nodes",
                values.nrows(),
                values.ncols(),
                grid_x.len(),
                grid_y.len()
            )));
        }
        Ok(Self {
            grid_x,
            grid_y,
            values,
        })
    }

    /// Parses the `x\y, y1, y2, ...` CSV layout: the header row carries the
    /// y nodes, every further row starts with an x node followed by samples.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .flexible(false)
            .from_reader(reader);

        let parse = |cell: &str, what: &str| -> Result<f64> {
            cell.parse::<f64>()
                .map_err(|_| Error::Tabulated(format!("cannot parse {what} {cell:?} as a number")))
        };

        let header = rdr
            .headers()
            .map_err(|e| Error::Tabulated(e.to_string()))?
            .clone();
        if header.len() < 3 {
            return Err(Error::Tabulated(
                "header must hold a corner label and at least two y nodes".into(),
            ));
        }
        let ys = header
            .iter()
            .skip(1)
            .map(|c| parse(c, "y node"))
            .collect::<Result<Vec<_>>>()?;

        let mut xs = Vec::new();
        let mut samples = Vec::new();
        for (row, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| Error::Tabulated(e.to_string()))?;
            let mut cells = record.iter();
            let x = cells.next().unwrap_or_default();
            xs.push(parse(x, "x node")?);
            for cell in cells {
                let v = parse(cell, "sample")?;
                if !v.is_finite() {
                    return Err(Error::Tabulated(format!(
                        "non-finite sample on data row {}",
                        row + 1
                    )));
                }
                samples.push(v);
            }
        }

        let grid_x = Grid::from_points(xs).map_err(|e| Error::Tabulated(format!("x nodes: {e}")))?;
        let grid_y = Grid::from_points(ys).map_err(|e| Error::Tabulated(format!("y nodes: {e}")))?;
        let values = DMatrix::from_row_slice(grid_x.len(), grid_y.len(), &samples);
        Self::new(grid_x, grid_y, values)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::from_csv(std::io::BufReader::new(file))
    }

    pub fn grid_x(&self) -> &Grid {
        &self.grid_x
    }

    pub fn grid_y(&self) -> &Grid {
        &self.grid_y
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }
}

#[derive(Debug, Clone)]
enum Payload {
    Builtin(Builtin),
    Expression { text: String, expr: Arc<Expr> },
    Tabulated(Arc<Table>),
}

/// An evaluable bivariate function together with its domain.
///
/// Cloning is cheap; parsed expressions and tables are shared.
#[derive(Debug, Clone)]
pub struct FunctionSource {
    domain: Domain,
    payload: Payload,
}

impl FunctionSource {
    pub fn builtin(name: &str, domain: Domain) -> Result<Self> {
        Ok(Self {
            domain,
            payload: Payload::Builtin(Builtin::from_name(name)?),
        })
    }

    pub fn from_builtin(builtin: Builtin, domain: Domain) -> Self {
        Self {
            domain,
            payload: Payload::Builtin(builtin),
        }
    }

    pub fn expression(text: &str, domain: Domain) -> Result<Self> {
        let expr = expr::parse(text)?;
        Ok(Self {
            domain,
            payload: Payload::Expression {
                text: text.to_string(),
                expr: Arc::new(expr),
            },
        })
    }

    /// The domain of a tabulated source is the hull of its grids.
    pub fn tabulated(table: Table) -> Self {
        let domain = Domain::new(table.grid_x.interval(), table.grid_y.interval());
        Self {
            domain,
            payload: Payload::Tabulated(Arc::new(table)),
        }
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Short human-readable description (builtin name, expression text or
    /// table shape).
    pub fn describe(&self) -> String {
        match &self.payload {
            Payload::Builtin(b) => b.name().to_string(),
            Payload::Expression { text, .. } => text.clone(),
            Payload::Tabulated(t) => {
                format!("tabulated {}x{}", t.grid_x.len(), t.grid_y.len())
            }
        }
    }

    /// The grids of a tabulated source; `None` for analytic sources.
    pub fn native_grids(&self) -> Option<(&Grid, &Grid)> {
        match &self.payload {
            Payload::Tabulated(t) => Some((&t.grid_x, &t.grid_y)),
            _ => None,
        }
    }

    /// Search grids in x and y: the source's own nodes when tabulated,
    /// otherwise `n`-point uniform grids over the domain.
    pub fn sampling_grids(&self, n: usize) -> Result<(Grid, Grid)> {
        match self.native_grids() {
            Some((gx, gy)) => Ok((gx.clone(), gy.clone())),
            None => Ok((
                Grid::uniform(self.domain.x, n)?,
                Grid::uniform(self.domain.y, n)?,
            )),
        }
    }

    /// Raw function value. NaN and infinities are returned as values; see
    /// [`FunctionSource::sample`] for the checked variant.
    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        if !self.domain.contains(x, y) {
            return Err(Error::DomainError {
                x,
                y,
                reason: "outside the function domain".into(),
            });
        }
        match &self.payload {
            Payload::Builtin(b) => Ok(b.eval(x, y)),
            Payload::Expression { expr, .. } => Ok(expr.eval(x, y)),
            Payload::Tabulated(t) => {
                match (t.grid_x.node_index(x), t.grid_y.node_index(y)) {
                    (Some(i), Some(j)) => Ok(t.values[(i, j)]),
                    _ => Err(Error::UnsupportedOffGrid { x, y }),
                }
            }
        }
    }

    /// Function value that must be finite; used wherever samples feed the
    /// numerical pipeline.
    pub fn sample(&self, x: f64, y: f64) -> Result<f64> {
        let v = self.eval(x, y)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::DomainError {
                x,
                y,
                reason: format!("function value is {v}"),
            })
        }
    }
}

/// Anything that can be evaluated pointwise on the domain: the source
/// itself, its interpolant, its low-rank truncation.
pub trait Surrogate {
    fn value(&self, x: f64, y: f64) -> Result<f64>;

    /// Values on a tensor grid, `out[(i, j)]` at `(gx[i], gy[j])`.
    fn grid_values(&self, gx: &Grid, gy: &Grid) -> Result<DMatrix<f64>> {
        let mut out = DMatrix::zeros(gx.len(), gy.len());
        for (j, &y) in gy.points().iter().enumerate() {
            for (i, &x) in gx.points().iter().enumerate() {
                out[(i, j)] = self.value(x, y)?;
            }
        }
        Ok(out)
    }
}

impl Surrogate for FunctionSource {
    fn value(&self, x: f64, y: f64) -> Result<f64> {
        self.sample(x, y)
    }
}
