//! Chebyshev–Gauss–Lobatto collocation in time.
//!
//! The time interval `[0, t_f]` is covered by a single Chebyshev interval of
//! order `N`. Nodal values `u(t_0), …, u(t_N)` are differentiated with the
//! nodal differentiation matrix; fixing `u(t_0)` from the initial condition
//! leaves an `N × N` coupling between the remaining modes plus a column that
//! multiplies the initial data.

use std::f64::consts::PI;

use faer::Mat;

use crate::error::{Error, Result};

/// Largest supported polynomial order in time.
pub const MAX_ORDER: usize = 64;

fn check(order: usize, t_final: f64) -> Result<()> {
    if order < 1 {
        return Err(Error::invalid(format!("time order must be >= 1, got {order}")));
    }
    if order > MAX_ORDER {
        return Err(Error::invalid(format!(
            "time order {order} exceeds the supported maximum {MAX_ORDER}"
        )));
    }
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(Error::invalid(format!("final time must be positive, got {t_final}")));
    }
    Ok(())
}

/// Chebyshev–Gauss–Lobatto nodes mapped to `[0, t_final]`, ascending.
pub fn collocation_points(order: usize, t_final: f64) -> Result<Vec<f64>> {
    check(order, t_final)?;
    let n = order as f64;
    let mut nodes: Vec<f64> = (0..=order)
        .map(|i| 0.5 * t_final * (1.0 - (PI * i as f64 / n).cos()))
        .collect();
    nodes[0] = 0.0;
    nodes[order] = t_final;
    Ok(nodes)
}

/// `t_i - t_j` without cancellation.
fn node_gap(i: usize, j: usize, order: usize, t_final: f64) -> f64 {
    let n2 = 2.0 * order as f64;
    t_final * (PI * (i + j) as f64 / n2).sin() * (PI * (i as f64 - j as f64) / n2).sin()
}

/// Nodal differentiation matrix on the nodes of [`collocation_points`].
///
/// Off-diagonal entries use the Gauss–Lobatto barycentric weights; each
/// diagonal entry is the negated sum of its row so constants differentiate
/// to zero exactly.
pub fn differentiation_matrix(order: usize, t_final: f64) -> Result<Mat<f64>> {
    check(order, t_final)?;
    let weight = |i: usize| if i == 0 || i == order { 2.0 } else { 1.0 };
    let mut d = Mat::<f64>::zeros(order + 1, order + 1);
    for i in 0..=order {
        let mut row_sum = 0.0;
        for j in 0..=order {
            if i == j {
                continue;
            }
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            let v = weight(i) / weight(j) * sign / node_gap(i, j, order, t_final);
            d[(i, j)] = v;
            row_sum += v;
        }
        d[(i, i)] = -row_sum;
    }
    Ok(d)
}

/// Time collocation grid with its full and initial-condition-reduced
/// differentiation operators.
#[derive(Clone, Debug)]
pub struct TimeDiscretization {
    order: usize,
    t_final: f64,
    nodes: Vec<f64>,
    full: Mat<f64>,
    reduced: Mat<f64>,
    initial_column: Vec<f64>,
}

impl TimeDiscretization {
    pub fn new(order: usize, t_final: f64) -> Result<Self> {
        let nodes = collocation_points(order, t_final)?;
        let full = differentiation_matrix(order, t_final)?;
        let (reduced, initial_column) = split_initial(&full);
        Ok(Self {
            order,
            t_final,
            nodes,
            full,
            reduced,
            initial_column,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn full(&self) -> &Mat<f64> {
        &self.full
    }

    pub fn reduced(&self) -> &Mat<f64> {
        &self.reduced
    }

    pub fn initial_column(&self) -> &[f64] {
        &self.initial_column
    }

    /// The coupling consumed by the spatial solver: rows `1..=N` only.
    pub fn operator(&self) -> TimeOperator {
        TimeOperator {
            reduced: self.reduced.clone(),
            initial_column: self.initial_column.clone(),
            times: self.nodes[1..].to_vec(),
        }
    }

    /// Interpolates nodal values `[u(t_0), …, u(t_N)]` at time `t`.
    pub fn interpolate(&self, nodal: &[f64], t: f64) -> f64 {
        let coeffs = chebyshev_coefficients(nodal);
        chebyshev_sum(&coeffs, t, self.t_final)
    }
}

fn split_initial(full: &Mat<f64>) -> (Mat<f64>, Vec<f64>) {
    let n = full.nrows() - 1;
    let reduced = Mat::from_fn(n, n, |i, j| full[(i + 1, j + 1)]);
    let column = (0..n).map(|i| full[(i + 1, 0)]).collect();
    (reduced, column)
}

/// Splits rows `1..=N` of the full operator into the block acting on modes
/// `1..=N` and the column multiplying the fixed initial value.
pub fn reduce_with_initial(disc: &TimeDiscretization) -> (Mat<f64>, Vec<f64>) {
    split_initial(&disc.full)
}

/// Reduced time coupling: `d/dt c_n ≈ Σ_m reduced[n][m] c_m + initial_column[n] g`
/// for `n = 1..=N`, renumbered from zero.
#[derive(Clone, Debug)]
pub struct TimeOperator {
    reduced: Mat<f64>,
    initial_column: Vec<f64>,
    times: Vec<f64>,
}

impl TimeOperator {
    /// Builds an arbitrary coupling. Mainly useful for tests and
    /// steady-state manufactured problems.
    pub fn new(reduced: Mat<f64>, initial_column: Vec<f64>, times: Vec<f64>) -> Result<Self> {
        let n = reduced.nrows();
        if n == 0 || reduced.ncols() != n || initial_column.len() != n || times.len() != n {
            return Err(Error::invalid(format!(
                "time operator dimensions disagree: {}x{} matrix, {} column entries, {} times",
                reduced.nrows(),
                reduced.ncols(),
                initial_column.len(),
                times.len()
            )));
        }
        Ok(Self {
            reduced,
            initial_column,
            times,
        })
    }

    /// Number of unknown time modes `N`.
    pub fn modes(&self) -> usize {
        self.times.len()
    }

    pub fn reduced(&self) -> &Mat<f64> {
        &self.reduced
    }

    pub fn initial_column(&self) -> &[f64] {
        &self.initial_column
    }

    /// Collocation times of the unknown modes, `t_1..=t_N`.
    pub fn times(&self) -> &[f64] {
        &self.times
    }
}

/// Shifted Chebyshev polynomial `T_j((2t - t_f)/t_f)`.
pub fn shifted_chebyshev(j: usize, t: f64, t_final: f64) -> f64 {
    let s = ((2.0 * t - t_final) / t_final).clamp(-1.0, 1.0);
    (j as f64 * s.acos()).cos()
}

fn endpoint_weight(n: usize, order: usize) -> f64 {
    if n == 0 || n == order {
        0.5
    } else {
        1.0
    }
}

/// Chebyshev coefficients of the interpolant through nodal samples taken
/// at [`collocation_points`], via discrete orthogonality.
pub fn chebyshev_coefficients(nodal: &[f64]) -> Vec<f64> {
    let order = nodal.len() - 1;
    let n = order as f64;
    (0..=order)
        .map(|j| {
            let s: f64 = nodal
                .iter()
                .enumerate()
                .map(|(i, &u)| {
                    // T̄_j(t_i) = cos(j(π - πi/N))
                    let angle = j as f64 * (PI - PI * i as f64 / n);
                    endpoint_weight(i, order) * angle.cos() * u
                })
                .sum();
            2.0 / n * s
        })
        .collect()
}

/// Evaluates `Σ_j α_j c_j T̄_j(t)` with halved endpoint terms.
pub fn chebyshev_sum(coeffs: &[f64], t: f64, t_final: f64) -> f64 {
    let order = coeffs.len() - 1;
    coeffs
        .iter()
        .enumerate()
        .map(|(j, c)| endpoint_weight(j, order) * c * shifted_chebyshev(j, t, t_final))
        .sum()
}
