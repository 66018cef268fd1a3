use std::path::{Path, PathBuf};

use clap::Args;
use serde::Deserialize;

use septensor_core::gridfn::{DEFAULT_DIAGNOSTIC_POINTS, DEFAULT_SELECTION_POINTS};
use septensor_core::{Domain, Error, FunctionSource, Interval, Result, Table};

pub const DEFAULT_RANK: usize = 10;
pub const DEFAULT_TRUNCATION: usize = 2;
pub const DEFAULT_OUT_DIR: &str = "septensor-out";

/// Flags shared by `decompose` and `validate`. Any flag given on the command
/// line overrides the same field of `--config`.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// JSON config file with the same fields as the flags ("builtin",
    /// "expr", "tabulated", "xmin", ..., "m", "n", "K", "selection_grid",
    /// "diag_grid", "out", "verbose")
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Builtin function name (see `septensor builtins`)
    #[arg(long, group = "function")]
    pub builtin: Option<String>,

    /// Expression in x and y, e.g. "x*y + sin(pi*x)"
    #[arg(long = "function-expr", group = "function", allow_hyphen_values = true)]
    pub function_expr: Option<String>,

    /// CSV table with header "x\y,y1,y2,..." and rows "x,f(x,y1),..."
    #[arg(long, group = "function")]
    pub tabulated: Option<PathBuf>,

    #[arg(long, allow_hyphen_values = true)]
    pub xmin: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub xmax: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub ymin: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub ymax: Option<f64>,

    /// Maximum rank in x
    #[arg(long)]
    pub m: Option<usize>,
    /// Maximum rank in y
    #[arg(long)]
    pub n: Option<usize>,
    /// Truncation rank of the SVD step
    #[arg(long = "K")]
    pub k: Option<usize>,

    /// Points per direction of the greedy search grids
    #[arg(long = "selection-grid")]
    pub selection_grid: Option<usize>,
    /// Points per direction of the diagnostics grids
    #[arg(long = "diag-grid")]
    pub diag_grid: Option<usize>,

    /// Output directory for artifacts
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Log every greedy iteration on stderr
    #[arg(long)]
    pub verbose: bool,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    builtin: Option<String>,
    expr: Option<String>,
    tabulated: Option<PathBuf>,
    xmin: Option<f64>,
    xmax: Option<f64>,
    ymin: Option<f64>,
    ymax: Option<f64>,
    m: Option<usize>,
    n: Option<usize>,
    #[serde(rename = "K")]
    k: Option<usize>,
    selection_grid: Option<usize>,
    diag_grid: Option<usize>,
    out: Option<PathBuf>,
    verbose: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FunctionSpec {
    Builtin(String),
    Expr(String),
    Tabulated(PathBuf),
}

/// A validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub function: FunctionSpec,
    /// `None` for tabulated input, whose grids define the domain.
    pub domain: Option<Domain>,
    pub m: usize,
    pub n: usize,
    /// `None` lets the pipeline pick `min(2, admissible rank)`.
    pub k: Option<usize>,
    pub selection_grid: usize,
    pub diag_grid: usize,
    pub out: PathBuf,
    pub verbose: bool,
}

impl RunConfig {
    /// Defaults of the reference experiment: `paper-f` on the unit square,
    /// `m = n = 10`, `K = 2`, 401-point selection and 1001-point
    /// diagnostics grids.
    pub fn paper(out: impl Into<PathBuf>) -> Self {
        Self {
            function: FunctionSpec::Builtin("paper-f".into()),
            domain: Some(Domain::unit_square()),
            m: DEFAULT_RANK,
            n: DEFAULT_RANK,
            k: Some(DEFAULT_TRUNCATION),
            selection_grid: DEFAULT_SELECTION_POINTS,
            diag_grid: DEFAULT_DIAGNOSTIC_POINTS,
            out: out.into(),
            verbose: false,
        }
    }

    pub fn from_args(args: &RunArgs) -> Result<Self> {
        let file = match &args.config {
            Some(path) => load_config_file(path)?,
            None => ConfigFile::default(),
        };

        let cli_fn = function_from(
            args.builtin.clone(),
            args.function_expr.clone(),
            args.tabulated.clone(),
        )?;
        let file_fn = function_from(file.builtin, file.expr, file.tabulated)?;
        let function = cli_fn
            .or(file_fn)
            .unwrap_or_else(|| FunctionSpec::Builtin("paper-f".into()));

        let xmin = args.xmin.or(file.xmin);
        let xmax = args.xmax.or(file.xmax);
        let ymin = args.ymin.or(file.ymin);
        let ymax = args.ymax.or(file.ymax);
        let domain = if let FunctionSpec::Tabulated(_) = function {
            if [xmin, xmax, ymin, ymax].iter().any(Option::is_some) {
                return Err(Error::InvalidConfig(
                    "domain bounds cannot be combined with tabulated input".into(),
                ));
            }
            None
        } else {
            Some(Domain::new(
                Interval::new(xmin.unwrap_or(0.0), xmax.unwrap_or(1.0))?,
                Interval::new(ymin.unwrap_or(0.0), ymax.unwrap_or(1.0))?,
            ))
        };

        let cfg = Self {
            function,
            domain,
            m: args.m.or(file.m).unwrap_or(DEFAULT_RANK),
            n: args.n.or(file.n).unwrap_or(DEFAULT_RANK),
            k: args.k.or(file.k),
            selection_grid: args
                .selection_grid
                .or(file.selection_grid)
                .unwrap_or(DEFAULT_SELECTION_POINTS),
            diag_grid: args
                .diag_grid
                .or(file.diag_grid)
                .unwrap_or(DEFAULT_DIAGNOSTIC_POINTS),
            out: args
                .out
                .clone()
                .or(file.out)
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR)),
            verbose: args.verbose || file.verbose.unwrap_or(false),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 {
            return Err(Error::InvalidConfig("m and n must be at least 1".into()));
        }
        if let Some(k) = self.k {
            if k == 0 {
                return Err(Error::InvalidConfig("K must be at least 1".into()));
            }
            if k > self.m.min(self.n) {
                return Err(Error::InvalidConfig("K exceeds min(m,n)".into()));
            }
        }
        if self.selection_grid < 2 || self.diag_grid < 2 {
            return Err(Error::InvalidConfig("grids need at least 2 points".into()));
        }
        Ok(())
    }

    pub fn source(&self) -> Result<FunctionSource> {
        let domain = self.domain.unwrap_or_else(Domain::unit_square);
        match &self.function {
            FunctionSpec::Builtin(name) => FunctionSource::builtin(name, domain),
            FunctionSpec::Expr(text) => FunctionSource::expression(text, domain),
            FunctionSpec::Tabulated(path) => {
                Ok(FunctionSource::tabulated(Table::from_csv_path(path)?))
            }
        }
    }
}

fn function_from(
    builtin: Option<String>,
    expr: Option<String>,
    tabulated: Option<PathBuf>,
) -> Result<Option<FunctionSpec>> {
    let given = [
        builtin.map(FunctionSpec::Builtin),
        expr.map(FunctionSpec::Expr),
        tabulated.map(FunctionSpec::Tabulated),
    ]
    .into_iter()
    .flatten()
    .collect::<Vec<_>>();
    match given.len() {
        0 => Ok(None),
        1 => Ok(given.into_iter().next()),
        _ => Err(Error::InvalidConfig(
            "give only one of builtin, expr and tabulated".into(),
        )),
    }
}

fn load_config_file(path: &Path) -> Result<ConfigFile> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}
