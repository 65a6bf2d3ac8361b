//! CSV artifacts: the versioned summary table and per-time grid dumps.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use localtaylor_core::{Dof, ErrorReport, Solution, SolveConfig, TimeSlice};
use serde::Serialize;

use crate::CliError;

pub const SUMMARY_VERSION: &str = "# localtaylor summary v1";

/// One solve, or one failed sweep point with empty result columns.
#[derive(Clone, Debug, Serialize)]
pub struct SummaryRow {
    pub status: String,
    pub problem: String,
    pub dim: usize,
    pub mx: usize,
    pub my: usize,
    pub mz: Option<usize>,
    pub k: usize,
    pub n: usize,
    pub s: usize,
    pub theta_x: f64,
    pub theta_y: f64,
    pub theta_z: Option<f64>,
    pub t_final: f64,
    pub spatial_dof: usize,
    pub total_dof: usize,
    pub rows: Option<usize>,
    pub cols: Option<usize>,
    pub phi: Option<f64>,
    pub e_inf: Option<f64>,
    pub e_inf_final: Option<f64>,
    pub residual_norm: Option<f64>,
    pub relative_optimality: Option<f64>,
    pub picard_iterations: Option<usize>,
    pub seconds: String,
}

impl SummaryRow {
    fn base(config: &SolveConfig, status: String) -> Self {
        let p = &config.problem;
        let three = p.dim == 3;
        let dof = Dof::new(p.dim, config.elements, config.scheme.order, config.time_order);
        Self {
            status,
            problem: p.name.clone(),
            dim: p.dim,
            mx: config.elements[0],
            my: config.elements[1],
            mz: three.then_some(config.elements[2]),
            k: config.scheme.order,
            n: config.time_order,
            s: config.scheme.partitions,
            theta_x: config.scheme.theta[0],
            theta_y: config.scheme.theta[1],
            theta_z: three.then_some(config.scheme.theta[2]),
            t_final: p.t_final,
            spatial_dof: dof.spatial,
            total_dof: dof.total,
            rows: None,
            cols: None,
            phi: None,
            e_inf: None,
            e_inf_final: None,
            residual_norm: None,
            relative_optimality: None,
            picard_iterations: None,
            seconds: String::new(),
        }
    }

    pub fn solved(config: &SolveConfig, solution: &Solution, report: &ErrorReport, timing: bool) -> Self {
        let stats = &solution.stats;
        Self {
            rows: Some(stats.rows),
            cols: Some(stats.cols),
            phi: Some(stats.ratio()),
            e_inf: Some(report.e_inf),
            e_inf_final: Some(report.final_e_inf),
            residual_norm: Some(stats.residual_norm),
            relative_optimality: Some(stats.relative_optimality),
            picard_iterations: solution.picard_iterations,
            seconds: seconds(solution.seconds, timing),
            ..Self::base(config, "ok".into())
        }
    }

    pub fn failed(config: &SolveConfig, message: &str) -> Self {
        Self::base(config, format!("error: {message}"))
    }
}

pub fn seconds(value: f64, timing: bool) -> String {
    if timing {
        format!("{value:.3}")
    } else {
        "NA".into()
    }
}

/// Writes `rows` after the schema comment line, then any trailing comments.
pub fn write_summary(path: &Path, rows: &[SummaryRow], trailer: &[String]) -> Result<(), CliError> {
    write_table(path, SUMMARY_VERSION, rows, trailer)
}

pub fn write_table<R: Serialize>(path: &Path, header: &str, rows: &[R], trailer: &[String]) -> Result<(), CliError> {
    let mut file = BufWriter::new(File::create(path).map_err(|e| io(path, e))?);
    writeln!(file, "{header}").map_err(|e| io(path, e))?;
    {
        let mut w = csv::Writer::from_writer(&mut file);
        for row in rows {
            w.serialize(row).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        }
        w.flush().map_err(|e| io(path, e))?;
    }
    for line in trailer {
        writeln!(file, "# {line}").map_err(|e| io(path, e))?;
    }
    file.flush().map_err(|e| io(path, e))
}

/// One CSV per time slice: `x,y[,z],t,value,abs_error`.
///
/// Collocation slices are `colloc_NN.csv` (NN = time index, 00 is the
/// initial condition); the extra uniform times are `dense_NN.csv`.
pub fn write_grid(dir: &Path, dim: usize, slices: &[TimeSlice]) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let (mut colloc, mut dense) = (0, 0);
    for slice in slices {
        let name = if slice.collocation {
            colloc += 1;
            format!("colloc_{:02}.csv", colloc - 1)
        } else {
            dense += 1;
            format!("dense_{:02}.csv", dense - 1)
        };
        let path = dir.join(name);
        let mut file = BufWriter::new(File::create(&path).map_err(|e| io(&path, e))?);
        let header = if dim == 2 { "x,y,t,value,abs_error" } else { "x,y,z,t,value,abs_error" };
        writeln!(file, "{header}").map_err(|e| io(&path, e))?;
        for s in &slice.samples {
            let coords: Vec<String> = s.x[..dim].iter().map(|c| c.to_string()).collect();
            writeln!(file, "{},{},{:e},{:e}", coords.join(","), s.t, s.value, s.abs_error).map_err(|e| io(&path, e))?;
        }
        file.flush().map_err(|e| io(&path, e))?;
    }
    Ok(())
}

pub fn io(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Least-squares slope of `y` against `x`; `None` with fewer than two
/// distinct abscissae.
pub fn fit_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
