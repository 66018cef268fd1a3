use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use septensor_core::export::{self, fmt_f64};
use septensor_core::{
    DiagConfig, DiagnosticsReport, Error, FunctionSource, Grid, LowRankApprox,
    Result, SvdFactors, Surrogate, TensorInterpolant, lowrank, tensor, verify_bounds,
};

use crate::config::{DEFAULT_TRUNCATION, RunConfig};

/// Points per direction of the field table written for the rank-2 plot.
pub const FIELD_POINTS: usize = 201;

/// Everything one end-to-end run produces.
pub struct Pipeline {
    pub source: FunctionSource,
    pub interpolant: TensorInterpolant,
    pub factors: SvdFactors,
    pub approx: LowRankApprox,
    pub report: DiagnosticsReport,
    pub diag: DiagConfig,
}

impl Pipeline {
    pub fn rank(&self) -> usize {
        self.approx.rank()
    }

    pub fn relative_error(&self) -> f64 {
        self.report
            .relative_lowrank_error(self.rank())
            .expect("report covers the chosen rank")
    }
}

pub fn run_pipeline(cfg: &RunConfig) -> Result<Pipeline> {
    let source = cfg.source()?;
    let interpolant = tensor::teim(&source, cfg.m, cfg.n, cfg.selection_grid)?;
    let factors = lowrank::svd_decompose(interpolant.values())?;
    let k = match cfg.k {
        Some(k) => k,
        None => DEFAULT_TRUNCATION.min(factors.rank()),
    };
    let approx = lowrank::truncate(&interpolant, &factors, k)?;
    let diag = DiagConfig::for_source(&source, cfg.diag_grid)?;
    let report = verify_bounds(&interpolant, &factors, &diag)?;
    Ok(Pipeline {
        source,
        interpolant,
        factors,
        approx,
        report,
        diag,
    })
}

/// Writes the artifacts shared by `decompose` and `reproduce-paper`.
fn write_core_artifacts(dir: &Path, p: &Pipeline) -> Result<()> {
    fs::create_dir_all(dir)?;
    export::write_magic_points(&dir.join("points.json"), &p.interpolant)?;
    export::write_collocation(&dir.join("F.csv"), &p.interpolant)?;
    export::write_svd(&dir.join("svd.json"), &p.factors, p.rank())?;
    export::write_samples(&dir.join("phi_k.csv"), "phi", &p.diag.grid_x, &p.approx.phi_on(&p.diag.grid_x)?)?;
    export::write_samples(&dir.join("psi_k.csv"), "psi", &p.diag.grid_y, &p.approx.psi_on(&p.diag.grid_y)?)?;
    export::write_report(dir, &p.report)
}

pub fn summary_line(p: &Pipeline) -> String {
    format!("rank={} relerr={}", p.rank(), fmt_f64(p.relative_error()))
}

pub fn cmd_decompose(cfg: &RunConfig) -> Result<Pipeline> {
    let p = run_pipeline(cfg)?;
    write_core_artifacts(&cfg.out, &p)?;
    Ok(p)
}

pub fn cmd_validate(cfg: &RunConfig) -> Result<DiagnosticsReport> {
    Ok(run_pipeline(cfg)?.report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaperSummary {
    pub function: String,
    pub m: usize,
    pub n: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub selection_grid: usize,
    pub diag_grid: usize,
    pub sup_norm_f: f64,
    pub interp_sup_error: f64,
    pub rank2_sup_error: f64,
    pub rank2_rel_err: f64,
    pub lebesgue_x: f64,
    pub lebesgue_y: f64,
    pub all_bounds_pass: bool,
}

/// Runs the reference experiment and writes the data behind every figure:
///
/// | file | content |
/// |------|---------|
/// | `magic_grid.csv` | tensor grid of magic points |
/// | `basis_q.csv`, `basis_s.csv` | Lagrange bases on the diagnostics grid |
/// | `lebesgue.csv` | Lebesgue constants against rank |
/// | `errors.csv` | `‖f − I^{m,m} f‖∞` for `m = 1..10` |
/// | `phi_all.csv`, `psi_all.csv` | all SVD components |
/// | `sigma.csv` | singular values |
/// | `field.csv` | `f`, `f̃^(2)` and their difference on a 201×201 grid |
/// | `summary.json` | headline numbers, including `rank2_rel_err` |
///
/// plus the `decompose` artifacts.
pub fn cmd_reproduce_paper(out: &Path) -> Result<PaperSummary> {
    let cfg = RunConfig::paper(out);
    let p = run_pipeline(&cfg)?;
    write_core_artifacts(out, &p)?;

    let mp = p.interpolant.magic_points();
    let mut grid_rows = String::from("i,j,x,y\n");
    for (i, &x) in mp.x_points.iter().enumerate() {
        for (j, &y) in mp.y_points.iter().enumerate() {
            grid_rows.push_str(&format!("{},{},{},{}\n", i + 1, j + 1, fmt_f64(x), fmt_f64(y)));
        }
    }
    fs::write(out.join("magic_grid.csv"), grid_rows)?;

    let (gx, gy) = (&p.diag.grid_x, &p.diag.grid_y);
    let q = p.interpolant.basis_x().evaluate_on(&p.source, gx)?;
    let s = p.interpolant.basis_y().evaluate_on(&p.source, gy)?;
    export::write_samples(&out.join("basis_q.csv"), "q", gx, &q)?;
    export::write_samples(&out.join("basis_s.csv"), "s", gy, &s)?;

    let full = lowrank::truncate(&p.interpolant, &p.factors, p.factors.rank())?;
    export::write_samples(&out.join("phi_all.csv"), "phi", gx, &full.phi_on(gx)?)?;
    export::write_samples(&out.join("psi_all.csv"), "psi", gy, &full.psi_on(gy)?)?;

    let domain = p.source.domain();
    let fx = Grid::uniform(domain.x, FIELD_POINTS)?;
    let fy = Grid::uniform(domain.y, FIELD_POINTS)?;
    let exact = p.source.grid_values(&fx, &fy)?;
    let approx = p.approx.grid_values(&fx, &fy)?;
    let diff: DMatrix<f64> = &exact - &approx;
    export::write_field(
        &out.join("field.csv"),
        &fx,
        &fy,
        &[("f", &exact), ("f_tilde", &approx), ("difference", &diff)],
    )?;

    let r = &p.report;
    let summary = PaperSummary {
        function: p.source.describe(),
        m: cfg.m,
        n: cfg.n,
        k: p.rank(),
        selection_grid: cfg.selection_grid,
        diag_grid: cfg.diag_grid,
        sup_norm_f: r.sup_norm_f,
        interp_sup_error: r.sup_error_interp,
        rank2_sup_error: r.sup_error_lowrank[&p.rank()],
        rank2_rel_err: p.relative_error(),
        lebesgue_x: *r.lebesgue_x.last().expect("nonempty"),
        lebesgue_y: *r.lebesgue_y.last().expect("nonempty"),
        all_bounds_pass: r.all_pass(),
    };
    export::write_json(&out.join("summary.json"), &summary)?;
    Ok(summary)
}

/// Maps a failed run to the process exit status: 2 configuration or
/// parse errors, 3 numeric failures, 4 zero function.
pub fn exit_code(err: &Error) -> u8 {
    use septensor_core::ErrorClass;
    match err.class() {
        ErrorClass::Config => 2,
        ErrorClass::Numeric => 3,
        ErrorClass::ZeroFunction => 4,
    }
}
