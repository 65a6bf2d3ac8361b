//! Run configuration: a flat JSON document whose keys are also flags.

use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use localtaylor_core::problems::{self, Polynomial};
use localtaylor_core::{
    expected_rows, BoundaryMode, PdeCoefficients, PicardOptions, ProblemSpec, SampleOptions, SolveConfig,
};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Every key is optional; unset keys fall back to per-problem defaults.
#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Benchmark id: 1, 2, 3, 4 or "manufactured".
    #[arg(long)]
    pub problem: Option<String>,
    /// Spatial dimension of the manufactured problem.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Chebyshev order N in time.
    #[arg(long)]
    pub n: Option<usize>,
    /// Taylor order K.
    #[arg(long)]
    pub k: Option<usize>,
    /// Elements per axis; overridden per axis by mx, my, mz.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub mx: Option<usize>,
    #[arg(long)]
    pub my: Option<usize>,
    #[arg(long)]
    pub mz: Option<usize>,
    /// Partition count S of each element edge.
    #[arg(long)]
    pub s: Option<usize>,
    /// Direction parameter on every axis; overridden by theta_x, theta_y, theta_z.
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub theta_x: Option<f64>,
    #[arg(long)]
    pub theta_y: Option<f64>,
    #[arg(long)]
    pub theta_z: Option<f64>,
    #[arg(long)]
    pub t_final: Option<f64>,
    /// Velocity components, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub velocity: Option<Vec<f64>>,
    /// Diffusion coefficients, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub diffusion: Option<Vec<f64>>,
    /// Lower domain corner, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub lo: Option<Vec<f64>>,
    /// Upper domain corner, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub hi: Option<Vec<f64>>,
    /// Burgers viscosity.
    #[arg(long)]
    pub nu: Option<f64>,
    /// Initial condition of the manufactured problem as `i,j,k,coeff` terms.
    #[arg(long = "term", value_parser = parse_term, allow_negative_numbers = true)]
    pub terms: Option<Vec<[f64; 4]>>,
    /// value_only, value_plus_tangential or value_plus_normal.
    #[arg(long)]
    pub boundary_mode: Option<String>,
    /// Error samples per element edge.
    #[arg(long)]
    pub density: Option<usize>,
    /// Uniform error-sampling times besides the collocation times.
    #[arg(long)]
    pub dense_times: Option<usize>,
    #[arg(long)]
    pub picard_tol: Option<f64>,
    #[arg(long)]
    pub picard_max_iters: Option<usize>,
    /// Output directory.
    #[arg(long, env = "LOCALTAYLOR_OUT")]
    pub out_dir: Option<PathBuf>,
}

fn parse_term(s: &str) -> Result<[f64; 4], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err(format!("expected i,j,k,coeff, got {s:?}"));
    }
    let mut out = [0.0; 4];
    for (slot, p) in out.iter_mut().zip(&parts) {
        *slot = p.trim().parse().map_err(|e| format!("{p:?}: {e}"))?;
    }
    Ok(out)
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($field:ident),*) => {
        RunConfig { $($field: $top.$field.or($base.$field)),* }
    };
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Keys set in `top` win over keys set in `self`.
    pub fn overlay(self, top: RunConfig) -> RunConfig {
        let base = self;
        overlay!(base, top; problem, dim, n, k, m, mx, my, mz, s, theta, theta_x, theta_y, theta_z,
            t_final, velocity, diffusion, lo, hi, nu, terms, boundary_mode, density, dense_times,
            picard_tol, picard_max_iters, out_dir)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out_dir.clone().unwrap_or_else(|| PathBuf::from("localtaylor-out"))
    }

    /// Validates every key and builds the solver inputs without allocating
    /// any system storage.
    pub fn resolve(&self) -> Result<Resolved, CliError> {
        self.resolve_with(self.problem()?)
    }

    /// As [`RunConfig::resolve`] with a prebuilt problem; problem keys are ignored.
    pub fn resolve_with(&self, problem: ProblemSpec) -> Result<Resolved, CliError> {
        let dim = problem.dim;
        let planar = dim == 2;

        let order = self.k.unwrap_or(if planar { 10 } else { 8 });
        let time_order = self.n.unwrap_or(if planar { 15 } else { 10 });
        let partitions = self.s.unwrap_or(if planar { 14 } else { 4 });
        let m = self.m.unwrap_or(2);
        let elements = [self.mx.unwrap_or(m), self.my.unwrap_or(m), if planar { 1 } else { self.mz.unwrap_or(m) }];
        if planar && (self.mz.is_some() || self.theta_z.is_some()) {
            return Err(invalid("mz and theta_z are only valid for three-dimensional problems"));
        }
        let theta = self.theta.unwrap_or(0.5);
        let theta = [
            self.theta_x.unwrap_or(theta),
            self.theta_y.unwrap_or(theta),
            self.theta_z.unwrap_or(theta),
        ];

        let mut config = SolveConfig::new(problem, 1, order, time_order, partitions, 0.5);
        config.elements = elements;
        config.scheme.theta = theta;
        if let Some(mode) = &self.boundary_mode {
            config.scheme.boundary_mode = parse_boundary_mode(mode)?;
        }
        config.picard = PicardOptions {
            tol: self.picard_tol.unwrap_or(PicardOptions::default().tol),
            max_iters: self.picard_max_iters.unwrap_or(PicardOptions::default().max_iters),
            ..PicardOptions::default()
        };

        if time_order < 1 {
            return Err(invalid("n must be >= 1"));
        }
        if elements[..dim].contains(&0) {
            return Err(invalid("element counts must be >= 1"));
        }
        config.scheme.validate().map_err(|e| CliError::Config(e.to_string()))?;
        if !(config.picard.tol > 0.0) {
            return Err(invalid("picard_tol must be positive"));
        }
        if config.picard.max_iters < 1 {
            return Err(invalid("picard_max_iters must be >= 1"));
        }

        let mesh = config.mesh().map_err(|e| CliError::Config(e.to_string()))?;
        let rows = expected_rows(&mesh, &config.scheme, time_order);
        let per_element = if planar { 2 * order + 1 } else { (order + 1) * (order + 1) };
        let cols = mesh.element_count() * per_element * time_order;
        if rows < cols {
            return Err(invalid(format!(
                "system would be underdetermined: {rows} equations for {cols} unknowns; raise s or lower k"
            )));
        }

        let sampling = SampleOptions {
            density: self.density.unwrap_or(SampleOptions::default().density),
            dense_times: self.dense_times.unwrap_or(SampleOptions::default().dense_times),
            keep_samples: false,
        };
        if sampling.density < 1 {
            return Err(invalid("density must be >= 1"));
        }
        Ok(Resolved { solve: config, sampling })
    }

    fn problem(&self) -> Result<ProblemSpec, CliError> {
        let id = self.problem.as_deref().unwrap_or("1");
        if self.dim.is_some() && id != "manufactured" {
            return Err(invalid("dim is only used by the manufactured problem"));
        }
        if self.terms.is_some() && id != "manufactured" {
            return Err(invalid("terms are only used by the manufactured problem"));
        }
        if self.nu.is_some() && id != "3" {
            return Err(invalid("nu is only used by problem 3"));
        }
        let mut problem = match id {
            "1" => problems::problem1(),
            "2" => problems::problem2(),
            "3" => {
                let nu = self.nu.unwrap_or(1.0);
                if !(nu > 0.0 && nu.is_finite()) {
                    return Err(invalid(format!("nu must be positive, got {nu}")));
                }
                problems::problem3_with(nu)
            }
            "4" => problems::problem4(),
            "manufactured" => self.manufactured()?,
            other => return Err(invalid(format!("unknown problem {other:?}; expected 1, 2, 3, 4 or manufactured"))),
        };
        let dim = problem.dim;

        if self.velocity.is_some() || self.diffusion.is_some() {
            let mut c = problem.coefficients;
            if let Some(v) = &self.velocity {
                c.velocity = padded("velocity", v, dim)?;
            }
            if let Some(d) = &self.diffusion {
                c.diffusion = padded("diffusion", d, dim)?;
            }
            problem = problem.with_coefficients(c).map_err(|e| CliError::Config(e.to_string()))?;
        }
        if self.lo.is_some() || self.hi.is_some() {
            let lo = match &self.lo {
                Some(v) => padded("lo", v, dim)?,
                None => problem.lo,
            };
            let hi = match &self.hi {
                Some(v) => padded("hi", v, dim)?,
                None => problem.hi,
            };
            problem = problem.with_domain(lo, hi);
        }
        if let Some(t) = self.t_final {
            problem = problem.with_t_final(t);
        }
        problem.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(problem)
    }

    fn manufactured(&self) -> Result<ProblemSpec, CliError> {
        let dim = self.dim.unwrap_or(2);
        let default_terms = [[0.0, 0.0, 0.0, 1.0], [1.0, 0.0, 0.0, 0.5], [0.0, 1.0, 0.0, -2.0], [1.0, 1.0, 0.0, 0.75], [2.0, 0.0, 0.0, 1.0]];
        let terms = self.terms.clone().unwrap_or_else(|| default_terms.to_vec());
        let mut initial = Polynomial::zero();
        for t in &terms {
            let mut exps = [0usize; 3];
            for (e, &v) in exps.iter_mut().zip(&t[..3]) {
                if v < 0.0 || v.fract() != 0.0 || v > 64.0 {
                    return Err(invalid(format!("term exponents must be small non-negative integers, got {t:?}")));
                }
                *e = v as usize;
            }
            if dim == 2 && exps[2] != 0 {
                return Err(invalid("a two-dimensional polynomial cannot depend on z"));
            }
            initial.add_term(exps, t[3]);
        }
        match dim {
            2 => Ok(problems::manufactured_2d(initial, PdeCoefficients::new_2d([1.0, 0.5], [0.5, 0.5]), 0.25)),
            3 => Ok(problems::manufactured_3d(initial, PdeCoefficients::new_3d([1.0, 0.5, 0.25], [0.5; 3]), 0.25)),
            d => Err(invalid(format!("dim must be 2 or 3, got {d}"))),
        }
    }
}

/// Solver inputs derived from a validated configuration.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub solve: SolveConfig,
    pub sampling: SampleOptions,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn padded(key: &str, values: &[f64], dim: usize) -> Result<[f64; 3], CliError> {
    if values.len() != dim {
        return Err(invalid(format!("{key} needs {dim} components, got {}", values.len())));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(invalid(format!("{key} must be finite")));
    }
    let mut out = [0.0; 3];
    out[..dim].copy_from_slice(values);
    Ok(out)
}

fn parse_boundary_mode(s: &str) -> Result<BoundaryMode, CliError> {
    match s {
        "value_only" => Ok(BoundaryMode::ValueOnly),
        "value_plus_tangential" => Ok(BoundaryMode::ValuePlusTangential),
        "value_plus_normal" => Ok(BoundaryMode::ValuePlusNormal),
        other => Err(invalid(format!(
            "unknown boundary_mode {other:?}; expected value_only, value_plus_tangential or value_plus_normal"
        ))),
    }
}
