//! Maximum-error sampling of a space-time solution.

use serde::Serialize;

use crate::cheb_time::{chebyshev_coefficients, chebyshev_sum};
use crate::mesh::edge_partition;

use super::ProblemSpec;

/// A solution that can be evaluated at the collocation times of each element.
pub trait SpaceTimeField {
    fn dim(&self) -> usize;
    /// Element counts per axis (unused axes are 1).
    fn counts(&self) -> [usize; 3];
    /// Taylor order `K`.
    fn order(&self) -> usize;
    /// Collocation times `t_0 = 0, …, t_N = t_f`.
    fn nodes(&self) -> &[f64];
    fn element_count(&self) -> usize;
    /// Lower and upper corners of element `e`.
    fn element_box(&self, e: usize) -> ([f64; 3], [f64; 3]);
    /// Values at every collocation time at a point of element `e`.
    fn nodal_values(&self, e: usize, x: [f64; 3]) -> Vec<f64>;
}

/// Where and how densely the error is sampled.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SampleOptions {
    /// Subintervals per element edge; each element gets `(density+1)^dim` points.
    pub density: usize,
    /// Uniform times in `[0, t_f]` evaluated through the Chebyshev series,
    /// in addition to the collocation times.
    pub dense_times: usize,
    /// Keep every sample, grouped by time.
    pub keep_samples: bool,
}

impl Default for SampleOptions {
    fn default() -> Self {
        Self {
            density: 10,
            dense_times: 21,
            keep_samples: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ErrorSample {
    pub x: [f64; 3],
    pub t: f64,
    pub value: f64,
    pub exact: f64,
    pub abs_error: f64,
}

/// Samples at a single time.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TimeSlice {
    pub t: f64,
    /// Whether `t` is a collocation time rather than a series evaluation.
    pub collocation: bool,
    pub samples: Vec<ErrorSample>,
}

/// Spatial degrees of freedom counted per time mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Dof {
    pub dim: usize,
    pub counts: [usize; 3],
    pub per_element: usize,
    pub spatial: usize,
    /// Spatial dof times the number of unknown time modes.
    pub total: usize,
}

impl Dof {
    pub fn new(dim: usize, counts: [usize; 3], order: usize, modes: usize) -> Self {
        let per_element = if dim == 2 {
            2 * order + 1
        } else {
            (order + 1) * (order + 1)
        };
        let elements: usize = counts[..dim].iter().product();
        Self {
            dim,
            counts,
            per_element,
            spatial: elements * per_element,
            total: elements * per_element * modes,
        }
    }

    /// Mesh and spatial dof, e.g. `2×2 (84)`.
    pub fn label(&self) -> String {
        let mesh: Vec<String> = self.counts[..self.dim].iter().map(|c| c.to_string()).collect();
        format!("{} ({})", mesh.join("×"), self.spatial)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorReport {
    /// Maximum error over all sampled points and times.
    pub e_inf: f64,
    /// Maximum error over the spatial samples at the final time.
    pub final_e_inf: f64,
    pub worst: ErrorSample,
    pub sample_count: usize,
    pub options: SampleOptions,
    pub dof: Dof,
    /// Present when [`SampleOptions::keep_samples`] is set.
    pub slices: Option<Vec<TimeSlice>>,
}

/// Samples `field` against `problem` on a uniform grid in every element at
/// every collocation time and at `dense_times` interpolated times.
pub fn error_report(field: &dyn SpaceTimeField, problem: &ProblemSpec, options: &SampleOptions) -> ErrorReport {
    let dim = field.dim();
    let nodes = field.nodes();
    let t_final = *nodes.last().expect("at least two collocation times");
    let modes = nodes.len() - 1;
    let dense: Vec<f64> = match options.dense_times {
        0 => Vec::new(),
        1 => vec![t_final],
        m => (0..m)
            .map(|i| if i + 1 == m { t_final } else { t_final * i as f64 / (m - 1) as f64 })
            .collect(),
    };
    let mut slices: Vec<TimeSlice> = nodes
        .iter()
        .map(|&t| TimeSlice { t, collocation: true, samples: Vec::new() })
        .chain(dense.iter().map(|&t| TimeSlice { t, collocation: false, samples: Vec::new() }))
        .collect();

    let mut worst = ErrorSample { x: [0.0; 3], t: 0.0, value: 0.0, exact: 0.0, abs_error: -1.0 };
    let mut count = 0;
    let mut final_e_inf: f64 = 0.0;
    let mut record = |slice: &mut TimeSlice, x: [f64; 3], value: f64| {
        let exact = problem.exact(x, slice.t);
        let s = ErrorSample { x, t: slice.t, value, exact, abs_error: (value - exact).abs() };
        // NaN errors must surface as the maximum
        if s.abs_error > worst.abs_error || s.abs_error.is_nan() && !worst.abs_error.is_nan() {
            worst = s;
        }
        count += 1;
        if options.keep_samples {
            slice.samples.push(s);
        }
    };

    for e in 0..field.element_count() {
        let (lo, hi) = field.element_box(e);
        let axes: Vec<Vec<f64>> = (0..dim)
            .map(|a| edge_partition(lo[a], hi[a] - lo[a], options.density.max(1)))
            .collect();
        let mut points = vec![[0.0; 3]];
        for (a, values) in axes.iter().enumerate() {
            points = points
                .iter()
                .flat_map(|p| {
                    values.iter().map(move |v| {
                        let mut q = *p;
                        q[a] = *v;
                        q
                    })
                })
                .collect();
        }
        for x in points {
            let nodal = field.nodal_values(e, x);
            for (n, v) in nodal.iter().enumerate() {
                record(&mut slices[n], x, *v);
            }
            let last = (nodal[modes] - problem.exact(x, t_final)).abs();
            final_e_inf = if last.is_nan() || final_e_inf.is_nan() { f64::NAN } else { final_e_inf.max(last) };
            if !dense.is_empty() {
                let coeffs = chebyshev_coefficients(&nodal);
                for (i, &t) in dense.iter().enumerate() {
                    record(&mut slices[modes + 1 + i], x, chebyshev_sum(&coeffs, t, t_final));
                }
            }
        }
    }

    ErrorReport {
        e_inf: worst.abs_error,
        final_e_inf,
        worst,
        sample_count: count,
        options: *options,
        dof: Dof::new(dim, field.counts(), field.order(), modes),
        slices: options.keep_samples.then_some(slices),
    }
}
