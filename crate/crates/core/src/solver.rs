//! End-to-end solves: discretise in time, assemble, solve, and wrap the
//! local tables as an evaluable space-time field.

use std::time::Instant;

use serde::Serialize;

use crate::assembly::{build_system_2d, build_system_3d, picard_burgers_2d, AssemblyOptions, PicardOptions};
use crate::cheb_time::{chebyshev_coefficients, chebyshev_sum, TimeDiscretization};
use crate::error::{Error, Result};
use crate::mesh::{Mesh, SchemeParams};
use crate::problems::{error_report, ErrorReport, ProblemSpec, SampleOptions, SpaceTimeField};
use crate::simplex::Derivative;
use crate::taylor2d::{evaluate_2d, TransformTable2D};
use crate::taylor3d::{evaluate_3d, TransformTable3D};

/// Everything needed for one solve.
#[derive(Clone, Debug)]
pub struct SolveConfig {
    pub problem: ProblemSpec,
    /// Elements per axis; the third entry is ignored in 2D.
    pub elements: [usize; 3],
    pub scheme: SchemeParams,
    /// Chebyshev order `N` in time.
    pub time_order: usize,
    pub picard: PicardOptions,
    pub assembly: AssemblyOptions,
}

impl SolveConfig {
    pub fn new(problem: ProblemSpec, elements: usize, order: usize, time_order: usize, partitions: usize, theta: f64) -> Self {
        Self {
            problem,
            elements: [elements; 3],
            scheme: SchemeParams::new(order, partitions, theta),
            time_order,
            picard: PicardOptions::default(),
            assembly: AssemblyOptions::default(),
        }
    }

    pub fn mesh(&self) -> Result<Mesh> {
        let p = &self.problem;
        match p.dim {
            2 => Mesh::new_2d([p.lo[0], p.lo[1]], [p.hi[0], p.hi[1]], [self.elements[0], self.elements[1]]),
            3 => Mesh::new_3d(p.lo, p.hi, self.elements),
            d => Err(Error::invalid(format!("unsupported dimension {d}"))),
        }
    }
}

/// Size and quality of the least-squares solve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SystemStats {
    pub rows: usize,
    pub cols: usize,
    pub residual_norm: f64,
    /// `‖Mᵀ r‖ / (‖M‖_F ‖P‖)`.
    pub relative_optimality: f64,
    pub rank_deficient: bool,
}

impl SystemStats {
    pub fn ratio(&self) -> f64 {
        self.rows as f64 / self.cols as f64
    }
}

#[derive(Clone, Debug)]
pub enum Tables {
    Planar(Vec<TransformTable2D>),
    Spatial(Vec<TransformTable3D>),
}

/// Solved local expansions on every element.
#[derive(Clone, Debug)]
pub struct Solution {
    pub mesh: Mesh,
    pub time: TimeDiscretization,
    pub problem: ProblemSpec,
    pub scheme: SchemeParams,
    pub tables: Tables,
    pub stats: SystemStats,
    pub picard_iterations: Option<usize>,
    pub picard_history: Vec<f64>,
    pub seconds: f64,
}

pub fn solve(config: &SolveConfig) -> Result<Solution> {
    let start = Instant::now();
    let mesh = config.mesh()?;
    let problem = &config.problem;
    let time = TimeDiscretization::new(config.time_order, problem.t_final)?;
    let op = time.operator();
    let scheme = &config.scheme;
    let order = scheme.order;
    let modes = op.modes();

    let (tables, stats, picard_iterations, picard_history) = if problem.nonlinear {
        let out = picard_burgers_2d(&mesh, scheme, &op, problem, &config.picard, &config.assembly)?;
        let stats = SystemStats {
            rows: out.rows,
            cols: out.cols,
            residual_norm: out.lstsq.residual_norm,
            relative_optimality: out.relative_optimality,
            rank_deficient: out.lstsq.rank_deficient,
        };
        (Tables::Planar(out.tables), stats, Some(out.iterations), out.history)
    } else {
        let system = if problem.dim == 2 {
            build_system_2d(&mesh, scheme, &op, problem, None, &config.assembly)?
        } else {
            build_system_3d(&mesh, scheme, &op, problem, &config.assembly)?
        };
        log::info!(
            "{}: {} x {} system ({} elements, K = {order}, N = {modes})",
            problem.name,
            system.rows(),
            system.cols(),
            mesh.element_count()
        );
        let lstsq = system.solve()?;
        let stats = SystemStats {
            rows: system.rows(),
            cols: system.cols(),
            residual_norm: lstsq.residual_norm,
            relative_optimality: lstsq.relative_optimality(system.matrix.as_ref(), &system.rhs),
            rank_deficient: lstsq.rank_deficient,
        };
        let raw = system.tables(&lstsq.solution)?;
        drop(system);
        let tables = if problem.dim == 2 {
            Tables::Planar(
                raw.into_iter()
                    .map(|c| {
                        let mut t = TransformTable2D::zeros(order, modes);
                        t.as_mut_slice().copy_from_slice(&c);
                        t
                    })
                    .collect(),
            )
        } else {
            Tables::Spatial(
                raw.into_iter()
                    .map(|c| {
                        let mut t = TransformTable3D::zeros(order, modes);
                        t.as_mut_slice().copy_from_slice(&c);
                        t
                    })
                    .collect(),
            )
        };
        (tables, stats, None, Vec::new())
    };

    Ok(Solution {
        mesh,
        time,
        problem: problem.clone(),
        scheme: scheme.clone(),
        tables,
        stats,
        picard_iterations,
        picard_history,
        seconds: start.elapsed().as_secs_f64(),
    })
}

impl Solution {
    /// Element containing `x`, clamped to the mesh.
    pub fn locate(&self, x: [f64; 3]) -> usize {
        let mut idx = [0; 3];
        let lo = self.mesh.lo();
        let w = self.mesh.widths();
        let counts = self.mesh.counts();
        for a in 0..self.mesh.dim() {
            let i = ((x[a] - lo[a]) / w[a]).floor();
            idx[a] = if i < 0.0 { 0 } else { (i as usize).min(counts[a] - 1) };
        }
        self.mesh.linear_index(idx)
    }

    /// Values at the unknown collocation times `t_1..=t_N` from element `e`.
    pub fn modal_values(&self, e: usize, x: [f64; 3], deriv: Derivative) -> Vec<f64> {
        let idx = self.mesh.element_index(e);
        match &self.tables {
            Tables::Planar(t) => evaluate_2d(&t[e], &self.mesh.element_2d(idx[0], idx[1]), x[0], x[1], deriv),
            Tables::Spatial(t) => evaluate_3d(&t[e], &self.mesh.element_3d(idx[0], idx[1], idx[2]), x[0], x[1], x[2], deriv),
        }
    }

    /// Numerical solution at `(x, t)` through the Chebyshev interpolant.
    pub fn value(&self, x: [f64; 3], t: f64) -> f64 {
        let e = self.locate(x);
        let nodal = self.nodal_values(e, x);
        let coeffs = chebyshev_coefficients(&nodal);
        chebyshev_sum(&coeffs, t, self.time.t_final())
    }

    pub fn report(&self, options: &SampleOptions) -> ErrorReport {
        error_report(self, &self.problem, options)
    }

    pub fn modes(&self) -> usize {
        self.time.order()
    }
}

impl SpaceTimeField for Solution {
    fn dim(&self) -> usize {
        self.mesh.dim()
    }

    fn counts(&self) -> [usize; 3] {
        self.mesh.counts()
    }

    fn order(&self) -> usize {
        self.scheme.order
    }

    fn nodes(&self) -> &[f64] {
        self.time.nodes()
    }

    fn element_count(&self) -> usize {
        self.mesh.element_count()
    }

    fn element_box(&self, e: usize) -> ([f64; 3], [f64; 3]) {
        let idx = self.mesh.element_index(e);
        let lo = self.mesh.corner(idx);
        let w = self.mesh.widths();
        let mut hi = lo;
        for a in 0..self.mesh.dim() {
            hi[a] = lo[a] + w[a];
        }
        (lo, hi)
    }

    fn nodal_values(&self, e: usize, x: [f64; 3]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.time.order() + 1);
        out.push(self.problem.initial_value(x));
        out.extend(self.modal_values(e, x, Derivative::Value));
        out
    }
}
