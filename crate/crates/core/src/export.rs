//! CSV and JSON artifact writers. Numbers use shortest round-trip decimal
//! formatting, so files are byte-stable for identical inputs.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::diag::DiagnosticsReport;
use crate::error::Result;
use crate::gridfn::Grid;
use crate::lowrank::SvdFactors;
use crate::tensor::TensorInterpolant;

pub fn fmt_f64(v: f64) -> String {
    ryu::Buffer::new().format(v).to_owned()
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    Ok(csv::WriterBuilder::new()
        .flexible(false)
        .from_path(path)
        .map_err(std::io::Error::from)?)
}

fn write_rows<I>(path: &Path, header: &[String], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv_writer(path)?;
    w.write_record(header).map_err(std::io::Error::from)?;
    for row in rows {
        w.write_record(&row).map_err(std::io::Error::from)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// `points.json`: magic points and parameter pivots of both directions.
pub fn write_magic_points(path: &Path, t: &TensorInterpolant) -> Result<()> {
    write_json(path, &t.magic_points())
}

/// `F.csv`: collocation matrix, header `x\y,y_1,...`, row i starting with
/// `x_i`.
pub fn write_collocation(path: &Path, t: &TensorInterpolant) -> Result<()> {
    let mp = t.magic_points();
    let header = std::iter::once("x\\y".to_string())
        .chain(mp.y_points.iter().map(|&y| fmt_f64(y)))
        .collect::<Vec<_>>();
    let rows = mp.x_points.iter().enumerate().map(|(i, &x)| {
        std::iter::once(fmt_f64(x))
            .chain(t.values().row(i).iter().map(|&v| fmt_f64(v)))
            .collect()
    });
    write_rows(path, &header, rows)
}

/// `svd.json`: `{"sigma", "U", "V", "K"}`.
pub fn write_svd(path: &Path, factors: &SvdFactors, k: usize) -> Result<()> {
    write_json(path, &factors.export(k))
}

/// Univariate functions sampled on a grid: columns `t, <prefix>_1, ...`.
pub fn write_samples(path: &Path, prefix: &str, grid: &Grid, values: &DMatrix<f64>) -> Result<()> {
    let header = std::iter::once("t".to_string())
        .chain((1..=values.ncols()).map(|k| format!("{prefix}_{k}")))
        .collect::<Vec<_>>();
    let rows = grid.points().iter().enumerate().map(|(r, &t)| {
        std::iter::once(fmt_f64(t))
            .chain(values.row(r).iter().map(|&v| fmt_f64(v)))
            .collect()
    });
    write_rows(path, &header, rows)
}

/// Bivariate fields on a tensor grid in long format: `x, y, <name>...`.
pub fn write_field(path: &Path, gx: &Grid, gy: &Grid, fields: &[(&str, &DMatrix<f64>)]) -> Result<()> {
    let header = ["x", "y"]
        .iter()
        .map(|s| s.to_string())
        .chain(fields.iter().map(|(n, _)| n.to_string()))
        .collect::<Vec<_>>();
    let rows = gx.points().iter().enumerate().flat_map(|(i, &x)| {
        gy.points().iter().enumerate().map(move |(j, &y)| {
            [fmt_f64(x), fmt_f64(y)]
                .into_iter()
                .chain(fields.iter().map(|(_, m)| fmt_f64(m[(i, j)])))
                .collect()
        })
    });
    write_rows(path, &header, rows)
}

/// Writes `diagnostics.json`, `lebesgue.csv`, `errors.csv`, `sigma.csv` and
/// `bounds.csv` into `dir`.
pub fn write_report(dir: &Path, report: &DiagnosticsReport) -> Result<()> {
    write_json(&dir.join("diagnostics.json"), report)?;

    let ranks = report.lebesgue_x.len().max(report.lebesgue_y.len());
    let cell = |v: Option<&f64>| v.map(|&v| fmt_f64(v)).unwrap_or_default();
    write_rows(
        &dir.join("lebesgue.csv"),
        &["m", "L_m", "Ltilde_n", "bound"].map(String::from),
        (1..=ranks).map(|k| {
            vec![
                k.to_string(),
                cell(report.lebesgue_x.get(k - 1)),
                cell(report.lebesgue_y.get(k - 1)),
                fmt_f64(2f64.powi(k as i32) - 1.0),
            ]
        }),
    )?;

    write_rows(
        &dir.join("errors.csv"),
        &["m", "sup_error"].map(String::from),
        report
            .convergence
            .iter()
            .enumerate()
            .map(|(i, &e)| vec![(i + 1).to_string(), fmt_f64(e)]),
    )?;

    write_rows(
        &dir.join("sigma.csv"),
        &["k", "sigma_k"].map(String::from),
        report
            .sigma
            .iter()
            .enumerate()
            .map(|(i, &s)| vec![(i + 1).to_string(), fmt_f64(s)]),
    )?;

    write_rows(
        &dir.join("bounds.csv"),
        &["name", "K", "lhs", "rhs", "pass"].map(String::from),
        report.bound_checks.iter().map(|c| {
            vec![
                c.name.clone(),
                c.rank.map(|k| k.to_string()).unwrap_or_default(),
                fmt_f64(c.lhs),
                c.rhs.map(fmt_f64).unwrap_or_default(),
                c.status.as_str().to_string(),
            ]
        }),
    )
}
