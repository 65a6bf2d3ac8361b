//! Subcommand drivers.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use localtaylor_core::problems::reference::{
    LiteratureEntry, PublishedRow, BURGERS_LITERATURE, BURGERS_PUBLISHED, SINE_DIFFUSION_LITERATURE,
    SINE_DIFFUSION_PUBLISHED,
};
use localtaylor_core::problems::{self};
use localtaylor_core::{solve, Dof, Error, ErrorReport, ProblemSpec, SampleOptions, Solution, SolveConfig};
use log::{info, warn};
use serde::Serialize;

use crate::config::{Resolved, RunConfig};
use crate::output::{self, fit_slope, io, SummaryRow};
use crate::CliError;

/// Maps core errors onto the two failure classes of the exit code.
fn classify(e: Error) -> CliError {
    match e {
        Error::InvalidParameter(_) | Error::Underdetermined { .. } | Error::SingularRecurrence(_) => {
            CliError::Config(e.to_string())
        }
        Error::NotConverged { .. } | Error::NoNeighbor { .. } | Error::Oracle(_) => CliError::Solver(e.to_string()),
    }
}

fn solve_and_report(resolved: &Resolved, keep_samples: bool) -> Result<(Solution, ErrorReport), CliError> {
    let solution = solve(&resolved.solve).map_err(classify)?;
    let sampling = SampleOptions { keep_samples, ..resolved.sampling };
    let report = solution.report(&sampling);
    Ok((solution, report))
}

fn prepare(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| io(dir, e))
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    /// JSON run configuration; flags override its keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub run: RunConfig,
    /// Skip the per-time grid dumps.
    #[arg(long)]
    pub no_dump: bool,
    /// Write NA for runtimes so output is reproducible byte for byte.
    #[arg(long)]
    pub no_timing: bool,
}

fn merged(config: &Option<PathBuf>, flags: &RunConfig) -> Result<RunConfig, CliError> {
    let base = match config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    Ok(base.overlay(flags.clone()))
}

/// Writes `summary.csv` and, unless disabled, `grid/*.csv`.
pub fn run_solve(args: &SolveArgs) -> Result<(), CliError> {
    let run = merged(&args.config, &args.run)?;
    let resolved = run.resolve()?;
    let out = run.out_dir();
    prepare(&out)?;
    let (solution, report) = solve_and_report(&resolved, !args.no_dump)?;
    if let Some(slices) = &report.slices {
        output::write_grid(&out.join("grid"), solution.problem.dim, slices)?;
    }
    let row = SummaryRow::solved(&resolved.solve, &solution, &report, !args.no_timing);
    output::write_summary(&out.join("summary.csv"), std::slice::from_ref(&row), &[])?;
    println!(
        "{} {}: E_inf {:.3e}, E_inf(t_f) {:.3e}, {} x {} system, residual {:.3e}{}",
        solution.problem.name,
        report.dof.label(),
        report.e_inf,
        report.final_e_inf,
        solution.stats.rows,
        solution.stats.cols,
        solution.stats.residual_norm,
        solution.picard_iterations.map(|i| format!(", {i} Picard sweeps")).unwrap_or_default(),
    );
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SweepAxis {
    K,
    M,
    S,
    Theta,
}

impl SweepAxis {
    fn name(self) -> &'static str {
        match self {
            SweepAxis::K => "k",
            SweepAxis::M => "m",
            SweepAxis::S => "s",
            SweepAxis::Theta => "theta",
        }
    }

    fn apply(self, base: &RunConfig, value: f64) -> Result<RunConfig, CliError> {
        let mut run = base.clone();
        let count = || -> Result<usize, CliError> {
            if value >= 1.0 && value.fract() == 0.0 {
                Ok(value as usize)
            } else {
                Err(CliError::Config(format!("{} sweep values must be positive integers, got {value}", self.name())))
            }
        };
        match self {
            SweepAxis::K => run.k = Some(count()?),
            SweepAxis::S => run.s = Some(count()?),
            SweepAxis::M => {
                run.m = Some(count()?);
                (run.mx, run.my, run.mz) = (None, None, None);
            }
            SweepAxis::Theta => {
                run.theta = Some(value);
                (run.theta_x, run.theta_y, run.theta_z) = (None, None, None);
            }
        }
        Ok(run)
    }
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub run: RunConfig,
    /// Parameter to vary.
    #[arg(long, value_enum)]
    pub axis: SweepAxis,
    /// Comma-separated values of the swept parameter.
    #[arg(long, value_delimiter = ',', required = true)]
    pub values: Vec<f64>,
    /// Write grid dumps for every point under `grid/<axis>_<value>/`.
    #[arg(long)]
    pub dump: bool,
    #[arg(long)]
    pub no_timing: bool,
}

/// Writes `sweep_<axis>.csv`; K and M sweeps end with a fitted slope.
pub fn run_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let base = merged(&args.config, &args.run)?;
    let out = base.out_dir();
    let axis = args.axis;
    // every point is validated before the first solve
    let points = args
        .values
        .iter()
        .map(|&v| Ok((v, axis.apply(&base, v)?.resolve()?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    prepare(&out)?;

    let mut rows = Vec::new();
    let mut fit = Vec::new();
    for (value, resolved) in &points {
        let config = &resolved.solve;
        match solve_and_report(resolved, args.dump) {
            Ok((solution, report)) => {
                if let Some(slices) = &report.slices {
                    let dir = out.join("grid").join(format!("{}_{value}", axis.name()));
                    output::write_grid(&dir, config.problem.dim, slices)?;
                }
                println!(
                    "{}={value}: E_inf {:.3e}, E_inf(t_f) {:.3e}, phi {:.3}",
                    axis.name(),
                    report.e_inf,
                    report.final_e_inf,
                    solution.stats.ratio()
                );
                if report.e_inf > 0.0 && report.e_inf.is_finite() {
                    let x = match axis {
                        SweepAxis::K => Some(*value),
                        SweepAxis::M => Some(solution.mesh.widths()[0].log10()),
                        _ => None,
                    };
                    if let Some(x) = x {
                        fit.push((x, report.e_inf.log10()));
                    }
                }
                rows.push(SummaryRow::solved(config, &solution, &report, !args.no_timing));
            }
            Err(e) => {
                warn!("{}={value} failed: {e}", axis.name());
                println!("{}={value}: failed ({e})", axis.name());
                rows.push(SummaryRow::failed(config, &e.to_string()));
            }
        }
    }

    let mut trailer = Vec::new();
    let against = match axis {
        SweepAxis::K => Some("k"),
        SweepAxis::M => Some("log10(dh)"),
        _ => None,
    };
    if let Some(against) = against {
        match fit_slope(&fit) {
            Some(slope) => {
                println!("fitted slope of log10(E_inf) vs {against}: {slope:.4}");
                trailer.push(format!("slope,log10(e_inf) vs {against},{slope}"));
            }
            None => trailer.push(format!("slope,log10(e_inf) vs {against},NA")),
        }
    }
    output::write_summary(&out.join(format!("sweep_{}.csv", axis.name())), &rows, &trailer)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    Central,
    Backward,
    Forward,
}

impl Direction {
    fn theta(self) -> f64 {
        match self {
            Direction::Central => 0.5,
            Direction::Backward => 1.0,
            Direction::Forward => 0.0,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Direction::Central => "central",
            Direction::Backward => "backward",
            Direction::Forward => "forward",
        }
    }

    fn published(self, row: &PublishedRow) -> f64 {
        match self {
            Direction::Central => row.central,
            Direction::Backward => row.backward,
            Direction::Forward => row.forward,
        }
    }
}

#[derive(Args, Debug)]
pub struct TableArgs {
    /// Element counts per axis; defaults to the published meshes.
    #[arg(long, value_delimiter = ',')]
    pub meshes: Option<Vec<usize>>,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Direction::Central, Direction::Backward, Direction::Forward])]
    pub directions: Vec<Direction>,
    /// Overrides of the preset orders and partition count, for quick runs.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub s: Option<usize>,
    #[arg(long)]
    pub density: Option<usize>,
    #[arg(long, env = "LOCALTAYLOR_OUT")]
    pub out_dir: Option<PathBuf>,
    #[arg(long)]
    pub no_timing: bool,
}

/// A published error table and the setup that produced it.
pub struct Preset {
    pub name: &'static str,
    pub problem: fn() -> ProblemSpec,
    pub k: usize,
    pub n: usize,
    pub s: usize,
    pub published: &'static [PublishedRow],
    pub literature: &'static [LiteratureEntry],
}

pub const TABLE1: Preset = Preset {
    name: "table1",
    problem: problems::problem1,
    k: 10,
    n: 15,
    s: 14,
    published: &SINE_DIFFUSION_PUBLISHED,
    literature: &SINE_DIFFUSION_LITERATURE,
};

pub const TABLE2: Preset = Preset {
    name: "table2",
    problem: problems::problem3,
    k: 10,
    n: 15,
    s: 16,
    published: &BURGERS_PUBLISHED,
    literature: &BURGERS_LITERATURE,
};

/// Long-format table row; `e_inf` is the maximum error at the final time.
#[derive(Debug, Serialize)]
struct TableRow {
    source: &'static str,
    method: &'static str,
    direction: &'static str,
    grid: String,
    dof: usize,
    e_inf: Option<f64>,
    e_inf_spacetime: Option<f64>,
    picard_iterations: Option<usize>,
    seconds: String,
    note: String,
}

/// Writes `<table>.csv` with computed, published and literature rows, and
/// `summary.csv` with the full record of every computed solve.
pub fn run_table(preset: &Preset, args: &TableArgs) -> Result<(), CliError> {
    let out = args.out_dir.clone().unwrap_or_else(|| PathBuf::from("localtaylor-out"));
    let meshes = args.meshes.clone().unwrap_or_else(|| preset.published.iter().map(|r| r.m).collect());
    let k = args.k.unwrap_or(preset.k);
    let n = args.n.unwrap_or(preset.n);
    let s = args.s.unwrap_or(preset.s);

    let mut jobs = Vec::new();
    for &m in &meshes {
        for &d in &args.directions {
            let run = RunConfig {
                m: Some(m),
                k: Some(k),
                n: Some(n),
                s: Some(s),
                theta: Some(d.theta()),
                density: args.density,
                ..RunConfig::default()
            };
            let resolved = run.resolve_with((preset.problem)())?;
            jobs.push((m, d, resolved));
        }
    }
    prepare(&out)?;

    let mut table = Vec::new();
    let mut summary = Vec::new();
    for (m, d, resolved) in &jobs {
        let config: &SolveConfig = &resolved.solve;
        let dof = Dof::new(2, config.elements, k, n);
        let grid = format!("{m}x{m}");
        info!("{} {grid} {}", preset.name, d.name());
        match solve_and_report(resolved, false) {
            Ok((solution, report)) => {
                println!(
                    "{} {} {:>8}: E_inf(t_f) {:.2e}, space-time {:.2e}",
                    preset.name,
                    dof.label(),
                    d.name(),
                    report.final_e_inf,
                    report.e_inf
                );
                table.push(TableRow {
                    source: "computed",
                    method: "local-taylor",
                    direction: d.name(),
                    grid,
                    dof: dof.spatial,
                    e_inf: Some(report.final_e_inf),
                    e_inf_spacetime: Some(report.e_inf),
                    picard_iterations: solution.picard_iterations,
                    seconds: output::seconds(solution.seconds, !args.no_timing),
                    note: String::new(),
                });
                summary.push(SummaryRow::solved(config, &solution, &report, !args.no_timing));
            }
            Err(e) => {
                println!("{} {} {:>8}: failed ({e})", preset.name, dof.label(), d.name());
                table.push(TableRow {
                    source: "computed",
                    method: "local-taylor",
                    direction: d.name(),
                    grid,
                    dof: dof.spatial,
                    e_inf: None,
                    e_inf_spacetime: None,
                    picard_iterations: None,
                    seconds: String::new(),
                    note: format!("error: {e}"),
                });
                summary.push(SummaryRow::failed(config, &e.to_string()));
            }
        }
    }

    for row in preset.published {
        for &d in &args.directions {
            table.push(TableRow {
                source: "published",
                method: "local-taylor",
                direction: d.name(),
                grid: format!("{0}x{0}", row.m),
                dof: row.dof,
                e_inf: Some(d.published(row)),
                e_inf_spacetime: None,
                picard_iterations: None,
                seconds: String::new(),
                note: format!("transcribed; k={} n={} s={}", preset.k, preset.n, preset.s),
            });
        }
    }
    for entry in preset.literature {
        table.push(TableRow {
            source: "literature",
            method: entry.method,
            direction: "",
            grid: entry.grid.into(),
            dof: entry.dof,
            e_inf: entry.e_inf,
            e_inf_spacetime: None,
            picard_iterations: None,
            seconds: String::new(),
            note: "transcribed".into(),
        });
    }

    let header = format!("# localtaylor {} v1", preset.name);
    output::write_table(&out.join(format!("{}.csv", preset.name)), &header, &table, &[])?;
    output::write_summary(&out.join("summary.csv"), &summary, &[])
}
