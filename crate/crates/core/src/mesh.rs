//! Uniform rectangular element grids and the scheme parameters that place
//! continuity and boundary collocation points on them.

use serde::{Deserialize, Serialize};

use crate::error::{Axis, Error, Result};
use crate::taylor2d::Element2D;
use crate::taylor3d::Element3D;

/// One side of the domain box.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Face {
    pub axis: Axis,
    pub upper: bool,
}

impl Face {
    pub fn new(axis: Axis, upper: bool) -> Self {
        Self { axis, upper }
    }

    /// All faces of a `dim`-dimensional box, lower before upper per axis.
    pub fn all(dim: usize) -> Vec<Face> {
        Axis::ALL
            .into_iter()
            .take(dim)
            .flat_map(|a| [Face::new(a, false), Face::new(a, true)])
            .collect()
    }
}

/// Uniform tensor-product grid over `[lo, hi]` in two or three dimensions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mesh {
    dim: usize,
    lo: [f64; 3],
    hi: [f64; 3],
    counts: [usize; 3],
}

impl Mesh {
    pub fn new_2d(lo: [f64; 2], hi: [f64; 2], counts: [usize; 2]) -> Result<Self> {
        Self::new(2, [lo[0], lo[1], 0.0], [hi[0], hi[1], 1.0], [counts[0], counts[1], 1])
    }

    pub fn new_3d(lo: [f64; 3], hi: [f64; 3], counts: [usize; 3]) -> Result<Self> {
        Self::new(3, lo, hi, counts)
    }

    pub fn unit_square(mx: usize, my: usize) -> Result<Self> {
        Self::new_2d([0.0; 2], [1.0; 2], [mx, my])
    }

    pub fn unit_cube(m: usize) -> Result<Self> {
        Self::new_3d([0.0; 3], [1.0; 3], [m; 3])
    }

    fn new(dim: usize, lo: [f64; 3], hi: [f64; 3], counts: [usize; 3]) -> Result<Self> {
        for a in 0..dim {
            if counts[a] == 0 {
                return Err(Error::invalid(format!("element count along {} must be >= 1", Axis::ALL[a])));
            }
            if !(lo[a].is_finite() && hi[a].is_finite() && lo[a] < hi[a]) {
                return Err(Error::invalid(format!(
                    "bounds along {} must satisfy lo < hi, got [{}, {}]",
                    Axis::ALL[a],
                    lo[a],
                    hi[a]
                )));
            }
        }
        Ok(Self { dim, lo, hi, counts })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lo(&self) -> [f64; 3] {
        self.lo
    }

    pub fn hi(&self) -> [f64; 3] {
        self.hi
    }

    pub fn counts(&self) -> [usize; 3] {
        self.counts
    }

    pub fn count(&self, axis: Axis) -> usize {
        self.counts[axis.index()]
    }

    pub fn width(&self, axis: Axis) -> f64 {
        let a = axis.index();
        (self.hi[a] - self.lo[a]) / self.counts[a] as f64
    }

    pub fn widths(&self) -> [f64; 3] {
        Axis::ALL.map(|a| self.width(a))
    }

    pub fn element_count(&self) -> usize {
        self.counts[..self.dim].iter().product()
    }

    /// Lexicographic position: `i` outermost, the last index innermost.
    pub fn linear_index(&self, idx: [usize; 3]) -> usize {
        if self.dim == 2 {
            idx[0] * self.counts[1] + idx[1]
        } else {
            (idx[0] * self.counts[1] + idx[1]) * self.counts[2] + idx[2]
        }
    }

    /// Inverse of [`Mesh::linear_index`].
    pub fn element_index(&self, linear: usize) -> [usize; 3] {
        if self.dim == 2 {
            [linear / self.counts[1], linear % self.counts[1], 0]
        } else {
            let r = linear % self.counts[2];
            let rest = linear / self.counts[2];
            [rest / self.counts[1], rest % self.counts[1], r]
        }
    }

    /// Element indices in lexicographic order.
    pub fn indices(&self) -> impl Iterator<Item = [usize; 3]> + '_ {
        (0..self.element_count()).map(|l| self.element_index(l))
    }

    pub fn center(&self, idx: [usize; 3]) -> [f64; 3] {
        let w = self.widths();
        let mut c = [0.0; 3];
        for a in 0..self.dim {
            c[a] = self.lo[a] + (idx[a] as f64 + 0.5) * w[a];
        }
        c
    }

    /// Lower corner of element `idx`.
    pub fn corner(&self, idx: [usize; 3]) -> [f64; 3] {
        let w = self.widths();
        let mut c = [0.0; 3];
        for a in 0..self.dim {
            c[a] = self.lo[a] + idx[a] as f64 * w[a];
        }
        c
    }

    pub fn element_2d(&self, i: usize, j: usize) -> Element2D {
        let c = self.center([i, j, 0]);
        Element2D {
            index: [i, j],
            center: [c[0], c[1]],
            width: [self.width(Axis::X), self.width(Axis::Y)],
        }
    }

    pub fn element_3d(&self, i: usize, j: usize, r: usize) -> Element3D {
        Element3D {
            index: [i, j, r],
            center: self.center([i, j, r]),
            width: self.widths(),
        }
    }

    /// Whether `idx` has a neighbour on the upper side along `axis`.
    pub fn has_upper_neighbor(&self, idx: [usize; 3], axis: Axis) -> bool {
        axis.index() < self.dim && idx[axis.index()] + 1 < self.counts[axis.index()]
    }

    /// Whether element `idx` touches `face` of the domain.
    pub fn touches(&self, idx: [usize; 3], face: Face) -> bool {
        let a = face.axis.index();
        if face.upper {
            idx[a] + 1 == self.counts[a]
        } else {
            idx[a] == 0
        }
    }

    /// Number of interior interfaces normal to `axis`.
    pub fn interface_count(&self, axis: Axis) -> usize {
        let a = axis.index();
        if a >= self.dim {
            return 0;
        }
        (self.counts[a] - 1) * self.element_count() / self.counts[a]
    }
}

/// How the second boundary condition at each boundary point is formed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryMode {
    ValueOnly,
    /// Value plus a tangential derivative of the boundary data.
    #[default]
    ValuePlusTangential,
    /// Value plus the normal derivative of the reference solution.
    ValuePlusNormal,
}

/// Discretisation parameters shared by every element.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeParams {
    /// Direction parameters per axis; `1/2` is central.
    pub theta: [f64; 3],
    /// Partition count `S` of each element edge.
    pub partitions: usize,
    /// Taylor order `K`.
    pub order: usize,
    pub boundary_mode: BoundaryMode,
}

impl SchemeParams {
    pub fn new(order: usize, partitions: usize, theta: f64) -> Self {
        Self {
            theta: [theta; 3],
            partitions,
            order,
            boundary_mode: BoundaryMode::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.order < 1 {
            return Err(Error::invalid("Taylor order K must be >= 1"));
        }
        if self.partitions < 1 {
            return Err(Error::invalid("edge partition count S must be >= 1"));
        }
        for (a, t) in self.theta.iter().enumerate() {
            if !(0.0..=1.0).contains(t) {
                return Err(Error::invalid(format!(
                    "direction parameter along {} must lie in [0, 1], got {t}",
                    Axis::ALL[a]
                )));
            }
        }
        Ok(())
    }
}

/// `S + 1` uniformly spaced offsets across one element edge, endpoints included.
pub(crate) fn edge_partition(lo: f64, width: f64, partitions: usize) -> Vec<f64> {
    (0..=partitions)
        .map(|m| {
            if m == partitions {
                lo + width
            } else {
                lo + width * m as f64 / partitions as f64
            }
        })
        .collect()
}

/// Transverse axes of `axis` within a `dim`-dimensional mesh, in axis order.
pub(crate) fn transverse(axis: Axis, dim: usize) -> Vec<Axis> {
    Axis::ALL
        .into_iter()
        .take(dim)
        .filter(|a| *a != axis)
        .collect()
}

/// Points on which element `idx` is matched to its upper neighbour along
/// `axis`: the normal coordinate is `x_c + (1 − θ) Δ`, the transverse ones
/// sweep the uniform partition of the element's extent.
pub fn continuity_points(
    mesh: &Mesh,
    idx: [usize; 3],
    axis: Axis,
    theta: f64,
    partitions: usize,
) -> Result<Vec<[f64; 3]>> {
    if !mesh.has_upper_neighbor(idx, axis) {
        return Err(Error::NoNeighbor { element: idx, axis });
    }
    let a = axis.index();
    let center = mesh.center(idx);
    let normal = center[a] + (1.0 - theta) * mesh.width(axis);
    Ok(face_points(mesh, idx, axis, normal, partitions))
}

/// Grid of `(S+1)^(dim-1)` points on the plane `x_axis = normal` over the
/// element's transverse extent; the first transverse axis varies slowest.
pub(crate) fn face_points(
    mesh: &Mesh,
    idx: [usize; 3],
    axis: Axis,
    normal: f64,
    partitions: usize,
) -> Vec<[f64; 3]> {
    let corner = mesh.corner(idx);
    let sweeps: Vec<(usize, Vec<f64>)> = transverse(axis, mesh.dim())
        .into_iter()
        .map(|t| {
            let i = t.index();
            (i, edge_partition(corner[i], mesh.width(t), partitions))
        })
        .collect();
    let mut base = [0.0; 3];
    base[axis.index()] = normal;
    let mut points = vec![base];
    for (i, values) in &sweeps {
        points = points
            .iter()
            .flat_map(|p| {
                values.iter().map(move |v| {
                    let mut q = *p;
                    q[*i] = *v;
                    q
                })
            })
            .collect();
    }
    points
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn widths_and_centers() {
        let m = Mesh::new_2d([0.0, -1.0], [2.0, 1.0], [4, 2]).unwrap();
        assert_eq!(m.width(Axis::X), 0.5);
        assert_eq!(m.width(Axis::Y), 1.0);
        let e = m.element_2d(1, 1);
        assert_eq!(e.center, [0.75, 0.5]);
        assert_eq!(m.element_count(), 8);
        assert_eq!(m.interface_count(Axis::X), 6);
        assert_eq!(m.interface_count(Axis::Y), 4);
    }

    #[test]
    fn linear_index_round_trip() {
        let m = Mesh::new_3d([0.0; 3], [1.0; 3], [2, 3, 4]).unwrap();
        for l in 0..m.element_count() {
            assert_eq!(m.linear_index(m.element_index(l)), l);
        }
        assert_eq!(m.linear_index([1, 2, 3]), 23);
        let m2 = Mesh::unit_square(3, 2).unwrap();
        assert_eq!(m2.element_index(5), [2, 1, 0]);
    }

    #[test]
    fn rejects_bad_meshes() {
        assert!(Mesh::unit_square(0, 2).is_err());
        assert!(Mesh::new_2d([1.0, 0.0], [0.0, 1.0], [1, 1]).is_err());
    }

    #[test]
    fn continuity_point_examples() {
        let m = Mesh::unit_square(2, 2).unwrap();
        let central = continuity_points(&m, [0, 0, 0], Axis::X, 0.5, 2).unwrap();
        assert_eq!(
            central,
            vec![[0.5, 0.0, 0.0], [0.5, 0.25, 0.0], [0.5, 0.5, 0.0]]
        );
        let backward = continuity_points(&m, [0, 0, 0], Axis::X, 1.0, 2).unwrap();
        assert!(backward.iter().all(|p| p[0] == 0.25));
        let forward = continuity_points(&m, [0, 0, 0], Axis::X, 0.0, 2).unwrap();
        assert!(forward.iter().all(|p| p[0] == 0.75));
        assert_eq!(
            continuity_points(&m, [1, 0, 0], Axis::X, 0.5, 2),
            Err(Error::NoNeighbor {
                element: [1, 0, 0],
                axis: Axis::X
            })
        );
    }

    #[test]
    fn face_points_in_3d() {
        let m = Mesh::unit_cube(2).unwrap();
        let pts = continuity_points(&m, [0, 0, 1], Axis::Y, 0.5, 3).unwrap();
        assert_eq!(pts.len(), 16);
        assert!(pts.iter().all(|p| p[1] == 0.5));
        assert_eq!(pts[0], [0.0, 0.5, 0.5]);
        assert_eq!(pts[15], [0.5, 0.5, 1.0]);
    }

    #[test]
    fn scheme_validation() {
        assert!(SchemeParams::new(4, 4, 0.5).validate().is_ok());
        assert!(SchemeParams::new(4, 0, 0.5).validate().is_err());
        assert!(SchemeParams::new(4, 4, 1.5).validate().is_err());
    }
}
