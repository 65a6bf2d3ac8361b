//! Fixed-point linearisation of `u_t + u (u_x + u_y) = ν Δu`.
//!
//! Each sweep freezes the advecting velocity at the previous iterate's local
//! tables, assembles and solves the resulting linear system, and stops once
//! the free coefficients stop changing.

use serde::{Deserialize, Serialize};

use crate::cheb_time::TimeOperator;
use crate::error::{Axis, Error, Result};
use crate::lstsq::LeastSquaresSolution;
use crate::mesh::{Mesh, SchemeParams};
use crate::problems::ProblemSpec;
use crate::taylor2d::{TransformTable2D, UnknownLayout2D};

use super::{build_system_2d, AssemblyOptions};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PicardOptions {
    /// Stop when the max-norm change of the free coefficients, each scaled
    /// by its monomial's size on the element, drops below this.
    pub tol: f64,
    pub max_iters: usize,
    /// Weight of the new iterate; 1 is the plain fixed-point update.
    pub relaxation: f64,
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iters: 50,
            relaxation: 1.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PicardOutcome {
    /// Converged local tables in lexicographic element order.
    pub tables: Vec<TransformTable2D>,
    pub lstsq: LeastSquaresSolution,
    pub rows: usize,
    pub cols: usize,
    /// Optimality of the last linear solve relative to `‖M‖_F ‖P‖`.
    pub relative_optimality: f64,
    pub iterations: usize,
    /// Scaled max-norm change of each sweep.
    pub history: Vec<f64>,
}

/// `(Δx/2)^k (Δy/2)^p` for every free slot of one mode. High-order
/// coefficients are weakly determined by the least-squares fit, so their raw
/// change stalls well above the round-off in the field they represent.
fn slot_scales(mesh: &Mesh, order: usize) -> Vec<f64> {
    let layout = UnknownLayout2D::new(order);
    let hx = 0.5 * mesh.width(Axis::X);
    let hy = 0.5 * mesh.width(Axis::Y);
    let mut scale = vec![0.0; layout.per_mode()];
    for p in 0..2 {
        for k in 0..=order {
            if let Some(s) = layout.slot(k, p) {
                scale[s] = hx.powi(k as i32) * hy.powi(p as i32);
            }
        }
    }
    scale
}

fn to_tables(raw: Vec<Vec<f64>>, order: usize, modes: usize) -> Vec<TransformTable2D> {
    raw.into_iter()
        .map(|coeffs| {
            let mut t = TransformTable2D::zeros(order, modes);
            t.as_mut_slice().copy_from_slice(&coeffs);
            t
        })
        .collect()
}

pub fn picard_burgers_2d(
    mesh: &Mesh,
    scheme: &SchemeParams,
    time: &TimeOperator,
    problem: &ProblemSpec,
    options: &PicardOptions,
    assembly: &AssemblyOptions,
) -> Result<PicardOutcome> {
    if !problem.nonlinear {
        return Err(Error::invalid("Picard iteration applies to the Burgers problem only"));
    }
    if !(options.relaxation > 0.0 && options.relaxation <= 1.0) {
        return Err(Error::invalid(format!(
            "relaxation must lie in (0, 1], got {}",
            options.relaxation
        )));
    }
    if options.max_iters == 0 || options.tol.is_nan() {
        return Err(Error::invalid("Picard needs max_iters >= 1 and a tolerance"));
    }
    let order = scheme.order;
    let modes = time.modes();

    // The initial condition's expansion, held constant in time.
    let mut velocity: Vec<TransformTable2D> = Vec::with_capacity(mesh.element_count());
    for idx in mesh.indices() {
        let el = mesh.element_2d(idx[0], idx[1]);
        let g = problem.initial_taylor_2d(el.center, order)?;
        velocity.push(TransformTable2D::broadcast(order, modes, &g));
    }
    let scale = slot_scales(mesh, order);
    let mut previous: Option<Vec<f64>> = None;
    let mut history = Vec::new();
    let omega = options.relaxation;

    for iteration in 1..=options.max_iters {
        let system = build_system_2d(mesh, scheme, time, problem, Some(&velocity), assembly)?;
        let lstsq = system.solve()?;
        let zeta_prev = previous.take().unwrap_or_else(|| {
            let mut z = vec![0.0; system.cols()];
            for (e, t) in velocity.iter().enumerate() {
                z[system.element_columns(e)].copy_from_slice(&t.unknowns());
            }
            z
        });
        let change = lstsq
            .solution
            .iter()
            .zip(&zeta_prev)
            .zip(scale.iter().cycle())
            .map(|((a, b), w)| w * (a - b).abs())
            .fold(0.0, f64::max);
        history.push(change);
        log::debug!("Picard sweep {iteration}: change {change:e}");

        let fresh = to_tables(system.tables(&lstsq.solution)?, order, modes);
        let (rows, cols) = (system.rows(), system.cols());
        let relative_optimality = lstsq.relative_optimality(system.matrix.as_ref(), &system.rhs);
        drop(system);
        if change < options.tol {
            return Ok(PicardOutcome {
                tables: fresh,
                lstsq,
                rows,
                cols,
                relative_optimality,
                iterations: iteration,
                history,
            });
        }
        if omega == 1.0 {
            velocity = fresh;
            previous = Some(lstsq.solution);
        } else {
            for (v, f) in velocity.iter_mut().zip(&fresh) {
                for (a, b) in v.as_mut_slice().iter_mut().zip(f.as_slice()) {
                    *a = omega * b + (1.0 - omega) * *a;
                }
            }
            previous = Some(
                lstsq
                    .solution
                    .iter()
                    .zip(&zeta_prev)
                    .map(|(a, b)| omega * a + (1.0 - omega) * b)
                    .collect(),
            );
        }
    }
    Err(Error::NotConverged {
        iterations: options.max_iters,
        last_change: history.last().copied().unwrap_or(f64::NAN),
    })
}
