//! Global collocation system.
//!
//! Each element owns `N` blocks of free Taylor coefficients. Interior
//! interfaces contribute value and normal-derivative matching rows between
//! neighbouring expansions; boundary faces contribute rows matching the
//! Dirichlet data. Every row is expressed in the free coefficients by
//! pushing unit vectors through the recurrence, and the contribution of the
//! initial-condition forcing moves to the right-hand side.

mod picard;
mod system2d;
mod system3d;

pub use picard::{picard_burgers_2d, PicardOptions, PicardOutcome};
pub use system2d::build_system_2d;
pub use system3d::build_system_3d;

use std::sync::Arc;

use faer::{Mat, MatRef};
use serde::Serialize;

use crate::cheb_time::TimeOperator;
use crate::error::{Axis, Error, Result};
use crate::lstsq::{solve_least_squares, LeastSquaresSolution};
use crate::mesh::{continuity_points, face_points, transverse, Face, Mesh, SchemeParams, BoundaryMode};
use crate::problems::ProblemSpec;
use crate::simplex::{Derivative, Tetra, Triangle};

/// Where a row comes from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum RowSource {
    Interface {
        lower: [usize; 3],
        upper: [usize; 3],
        axis: Axis,
    },
    Boundary {
        element: [usize; 3],
        face: Face,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Condition {
    /// Continuity of the value across an interface.
    C0,
    /// Continuity of the normal derivative, scaled by the element width.
    C1,
    /// Boundary value.
    Value,
    /// Width-scaled tangential derivative of the boundary data; on a 3D
    /// face the sum over both tangential axes.
    Tangential,
    /// Width-scaled normal derivative of the reference solution.
    Normal,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RowRecord {
    pub source: RowSource,
    pub condition: Condition,
    pub point: [f64; 3],
    /// Unknown time mode, `0..N` for `t_1..=t_N`.
    pub mode: usize,
}

/// Switches that do not change the mathematical system.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AssemblyOptions {
    /// Recompute the unknown-to-table map for every element instead of
    /// reusing one map across the (identical) elements.
    pub no_basis_reuse: bool,
    /// Order in which elements are visited and given column blocks;
    /// `element_order[k]` is the lexicographic index of the k-th element.
    pub element_order: Option<Vec<usize>>,
}

/// Index set of the local expansion.
#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Shape {
    Tri(Triangle),
    Tet(Tetra),
}

impl Shape {
    pub(crate) fn len(&self) -> usize {
        match self {
            Shape::Tri(t) => t.len(),
            Shape::Tet(t) => t.len(),
        }
    }

    fn monomials(&self, offset: [f64; 3], deriv: Derivative) -> Vec<f64> {
        match self {
            Shape::Tri(t) => t.monomials([offset[0], offset[1]], deriv),
            Shape::Tet(t) => t.monomials(offset, deriv),
        }
    }
}

/// Affine map from an element's free coefficients to its full table.
#[derive(Clone, Debug)]
pub(crate) struct ElementMap {
    /// Table response to each unit unknown, `[index][mode][unknown]`.
    pub basis: Arc<Vec<f64>>,
    /// Table for zero unknowns, `[index][mode]`.
    pub particular: Vec<f64>,
}

/// Overdetermined system `M ζ = P` with row provenance.
#[derive(Clone, Debug)]
pub struct GlobalSystem {
    pub matrix: Mat<f64>,
    pub rhs: Vec<f64>,
    pub records: Vec<RowRecord>,
    dim: usize,
    modes: usize,
    per_mode: usize,
    /// Lexicographic element index of each column block.
    block_elements: Vec<usize>,
    shape: Shape,
    maps: Vec<ElementMap>,
}

impl GlobalSystem {
    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Equations per unknown.
    pub fn ratio(&self) -> f64 {
        self.rows() as f64 / self.cols() as f64
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Free coefficients per element and mode.
    pub fn per_mode(&self) -> usize {
        self.per_mode
    }

    pub fn per_element(&self) -> usize {
        self.modes * self.per_mode
    }

    /// Column range of element `linear` (lexicographic index).
    pub fn element_columns(&self, linear: usize) -> std::ops::Range<usize> {
        let block = self
            .block_elements
            .iter()
            .position(|e| *e == linear)
            .expect("element belongs to the mesh");
        block * self.per_element()..(block + 1) * self.per_element()
    }

    pub fn count(&self, condition: Condition) -> usize {
        self.records.iter().filter(|r| r.condition == condition).count()
    }

    pub fn solve(&self) -> Result<LeastSquaresSolution> {
        solve_least_squares(self.matrix.as_ref(), &self.rhs)
    }

    /// Full local tables `[index][mode]` in lexicographic element order.
    pub fn tables(&self, solution: &[f64]) -> Result<Vec<Vec<f64>>> {
        if solution.len() != self.cols() {
            return Err(Error::invalid(format!(
                "solution has {} entries for {} columns",
                solution.len(),
                self.cols()
            )));
        }
        let batch = self.per_element();
        let n_terms = self.shape.len();
        let mut out = vec![Vec::new(); self.maps.len()];
        for (block, &e) in self.block_elements.iter().enumerate() {
            let z = &solution[block * batch..(block + 1) * batch];
            let map = &self.maps[e];
            let mut table = map.particular.clone();
            for i in 0..n_terms * self.modes {
                let row = &map.basis[i * batch..(i + 1) * batch];
                table[i] += row.iter().zip(z).map(|(b, v)| b * v).sum::<f64>();
            }
            out[e] = table;
        }
        Ok(out)
    }
}

/// Rows the builders will produce.
pub fn expected_rows(mesh: &Mesh, scheme: &SchemeParams, modes: usize) -> usize {
    let dim = mesh.dim();
    let pts = (scheme.partitions + 1).pow(dim as u32 - 1);
    let interfaces: usize = Axis::ALL.iter().take(dim).map(|a| mesh.interface_count(*a)).sum();
    let boundary_faces: usize = Face::all(dim)
        .iter()
        .map(|f| mesh.element_count() / mesh.count(f.axis))
        .sum();
    let per_boundary = match scheme.boundary_mode {
        BoundaryMode::ValueOnly => 1,
        BoundaryMode::ValuePlusTangential | BoundaryMode::ValuePlusNormal => 2,
    };
    modes * pts * (2 * interfaces + per_boundary * boundary_faces)
}

/// One linear condition: a weighted sum of derivative evaluations.
type Functional = Vec<(Derivative, f64)>;

pub(crate) struct Assembler<'a> {
    mesh: &'a Mesh,
    scheme: &'a SchemeParams,
    time: &'a TimeOperator,
    problem: &'a ProblemSpec,
    shape: Shape,
    modes: usize,
    per_mode: usize,
    maps: Vec<ElementMap>,
    /// Column block of each lexicographic element.
    block_of: Vec<usize>,
    block_elements: Vec<usize>,
    matrix: Mat<f64>,
    rhs: Vec<f64>,
    records: Vec<RowRecord>,
}

impl<'a> Assembler<'a> {
    pub(crate) fn new(
        mesh: &'a Mesh,
        scheme: &'a SchemeParams,
        time: &'a TimeOperator,
        problem: &'a ProblemSpec,
        shape: Shape,
        per_mode: usize,
        maps: Vec<ElementMap>,
        options: &AssemblyOptions,
    ) -> Result<Self> {
        let modes = time.modes();
        let elements = mesh.element_count();
        let block_elements = match &options.element_order {
            Some(order) => {
                let mut seen = vec![false; elements];
                if order.len() != elements || order.iter().any(|&e| e >= elements || std::mem::replace(&mut seen[e], true)) {
                    return Err(Error::invalid("element order must be a permutation of the elements"));
                }
                order.clone()
            }
            None => (0..elements).collect(),
        };
        let mut block_of = vec![0; elements];
        for (b, &e) in block_elements.iter().enumerate() {
            block_of[e] = b;
        }
        let rows = expected_rows(mesh, scheme, modes);
        let cols = elements * modes * per_mode;
        if rows < cols {
            return Err(Error::Underdetermined { rows, cols });
        }
        Ok(Self {
            mesh,
            scheme,
            time,
            problem,
            shape,
            modes,
            per_mode,
            maps,
            block_of,
            block_elements,
            matrix: Mat::zeros(rows, cols),
            rhs: vec![0.0; rows],
            records: Vec::with_capacity(rows),
        })
    }

    fn batch(&self) -> usize {
        self.modes * self.per_mode
    }

    /// `Σ weight · monomials` at every point, as a `points × terms` matrix.
    fn phi(&self, element: usize, points: &[[f64; 3]], functional: &Functional) -> Mat<f64> {
        let c = self.mesh.center(self.mesh.element_index(element));
        let n = self.shape.len();
        let mut phi = Mat::zeros(points.len(), n);
        for (p, x) in points.iter().enumerate() {
            let off = [x[0] - c[0], x[1] - c[1], x[2] - c[2]];
            for (deriv, w) in functional {
                let m = self.shape.monomials(off, *deriv);
                for (i, v) in m.iter().enumerate() {
                    phi[(p, i)] += w * v;
                }
            }
        }
        phi
    }

    /// Adds `sign · functional(u_e)` at every point to the rows starting at
    /// `first` (ordered point-major, then mode) and moves the particular
    /// part to the right-hand side.
    fn add_element(&mut self, element: usize, points: &[[f64; 3]], functional: &Functional, sign: f64, first: usize, stride: usize) {
        let phi = self.phi(element, points, functional);
        let n_terms = self.shape.len();
        let batch = self.batch();
        let map = &self.maps[element];
        let basis = MatRef::from_row_major_slice(&map.basis[..], n_terms, self.modes * batch);
        let part = MatRef::from_row_major_slice(&map.particular[..], n_terms, self.modes);
        let response = &phi * basis;
        let offset = &phi * part;
        let col0 = self.block_of[element] * batch;
        for p in 0..points.len() {
            for n in 0..self.modes {
                let r = first + p * stride + n;
                for u in 0..batch {
                    let v = response[(p, n * batch + u)];
                    if v != 0.0 {
                        self.matrix[(r, col0 + u)] += sign * v;
                    }
                }
                self.rhs[r] -= sign * offset[(p, n)];
            }
        }
    }

    fn push_records(&mut self, source: RowSource, points: &[[f64; 3]], conditions: &[Condition]) -> Vec<usize> {
        // rows are ordered by point, then condition, then mode
        let first = self.records.len();
        for x in points {
            for &condition in conditions {
                for mode in 0..self.modes {
                    self.records.push(RowRecord { source, condition, point: *x, mode });
                }
            }
        }
        (0..conditions.len()).map(|c| first + c * self.modes).collect()
    }

    pub(crate) fn interfaces(&mut self) -> Result<()> {
        let dim = self.mesh.dim();
        for e in self.block_elements.clone() {
            let idx = self.mesh.element_index(e);
            for axis in Axis::ALL.into_iter().take(dim) {
                if !self.mesh.has_upper_neighbor(idx, axis) {
                    continue;
                }
                let a = axis.index();
                let points = continuity_points(self.mesh, idx, axis, self.scheme.theta[a], self.scheme.partitions)?;
                let mut upper = idx;
                upper[a] += 1;
                let neighbour = self.mesh.linear_index(upper);
                let source = RowSource::Interface { lower: idx, upper, axis };
                let starts = self.push_records(source, &points, &[Condition::C0, Condition::C1]);
                let stride = 2 * self.modes;
                let value: Functional = vec![(Derivative::Value, 1.0)];
                let slope: Functional = vec![(Derivative::along(axis), self.mesh.width(axis))];
                self.add_element(e, &points, &value, 1.0, starts[0], stride);
                self.add_element(neighbour, &points, &value, -1.0, starts[0], stride);
                self.add_element(e, &points, &slope, 1.0, starts[1], stride);
                self.add_element(neighbour, &points, &slope, -1.0, starts[1], stride);
            }
        }
        Ok(())
    }

    pub(crate) fn boundaries(&mut self) {
        let dim = self.mesh.dim();
        let mode = self.scheme.boundary_mode;
        for face in Face::all(dim) {
            let a = face.axis.index();
            let coord = if face.upper { self.mesh.hi()[a] } else { self.mesh.lo()[a] };
            // Second condition as a weighted sum of first derivatives.
            let slope: Vec<(Axis, f64)> = match mode {
                BoundaryMode::ValueOnly => Vec::new(),
                BoundaryMode::ValuePlusTangential => transverse(face.axis, dim)
                    .into_iter()
                    .map(|t| (t, self.mesh.width(t)))
                    .collect(),
                BoundaryMode::ValuePlusNormal => vec![(face.axis, self.mesh.width(face.axis))],
            };
            let condition = match mode {
                BoundaryMode::ValuePlusNormal => Condition::Normal,
                _ => Condition::Tangential,
            };
            for e in self.block_elements.clone() {
                let idx = self.mesh.element_index(e);
                if !self.mesh.touches(idx, face) {
                    continue;
                }
                let points = face_points(self.mesh, idx, face.axis, coord, self.scheme.partitions);
                let source = RowSource::Boundary { element: idx, face };
                let conditions: &[Condition] = if slope.is_empty() {
                    &[Condition::Value]
                } else {
                    &[Condition::Value, condition]
                };
                let starts = self.push_records(source, &points, conditions);
                let stride = conditions.len() * self.modes;
                let value: Functional = vec![(Derivative::Value, 1.0)];
                self.add_element(e, &points, &value, 1.0, starts[0], stride);
                let functional: Functional = slope.iter().map(|(t, w)| (Derivative::along(*t), *w)).collect();
                if !slope.is_empty() {
                    self.add_element(e, &points, &functional, 1.0, starts[1], stride);
                }
                for (p, x) in points.iter().enumerate() {
                    for (n, &t) in self.time.times().iter().enumerate() {
                        let data = self.problem.boundary(face, *x, t);
                        self.rhs[starts[0] + p * stride + n] += data.value;
                        if !slope.is_empty() {
                            let d: f64 = slope.iter().map(|(ax, w)| w * data.gradient[ax.index()]).sum();
                            self.rhs[starts[1] + p * stride + n] += d;
                        }
                    }
                }
            }
        }
    }

    pub(crate) fn finish(self) -> GlobalSystem {
        debug_assert_eq!(self.records.len(), self.matrix.nrows());
        GlobalSystem {
            matrix: self.matrix,
            rhs: self.rhs,
            records: self.records,
            dim: self.mesh.dim(),
            modes: self.modes,
            per_mode: self.per_mode,
            block_elements: self.block_elements,
            shape: self.shape,
            maps: self.maps,
        }
    }
}

/// Places a unit value at every free slot: entry `(s, n)` of column
/// `n · per_mode + s` is one.
pub(crate) fn unit_seed(n_terms: usize, modes: usize, per_mode: usize) -> Vec<f64> {
    let batch = modes * per_mode;
    let mut data = vec![0.0; n_terms * modes * batch];
    for n in 0..modes {
        for s in 0..per_mode {
            data[(s * modes + n) * batch + n * per_mode + s] = 1.0;
        }
    }
    data
}

pub(crate) fn check_inputs(mesh: &Mesh, scheme: &SchemeParams, problem: &ProblemSpec, dim: usize) -> Result<()> {
    scheme.validate()?;
    problem.validate()?;
    if mesh.dim() != dim || problem.dim != dim {
        return Err(Error::invalid(format!(
            "expected a {dim}D mesh and problem, got {}D and {}D",
            mesh.dim(),
            problem.dim
        )));
    }
    Ok(())
}
