//! Dense overdetermined least squares.
//!
//! Columns are equilibrated, then factored in place with blocked Householder
//! QR. If the triangular factor shows a numerically dependent column the
//! solve falls back to a rank-revealing QR of `R` and returns the
//! minimum-norm solution in the equilibrated variables.

use faer::dyn_stack::{MemBuffer, MemStack, StackReq};
use faer::linalg::householder::{
    apply_block_householder_sequence_transpose_on_the_left_in_place_scratch,
    apply_block_householder_sequence_transpose_on_the_left_in_place_with_conj,
};
use faer::linalg::qr::no_pivoting::factor::{qr_in_place, qr_in_place_scratch, recommended_block_size};
use faer::linalg::triangular_solve::solve_upper_triangular_in_place;
use faer::{Conj, Mat, MatRef, Par};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct LeastSquaresSolution {
    pub solution: Vec<f64>,
    /// `‖M ζ − P‖₂`.
    pub residual_norm: f64,
    /// `‖Mᵀ (M ζ − P)‖₂`, zero at an exact minimiser.
    pub optimality: f64,
    /// Numerical rank of the equilibrated matrix.
    pub rank: usize,
    pub rank_deficient: bool,
}

impl LeastSquaresSolution {
    /// Optimality relative to `‖M‖_F ‖P‖₂`.
    pub fn relative_optimality(&self, matrix: MatRef<'_, f64>, rhs: &[f64]) -> f64 {
        let scale = matrix.norm_l2() * norm(rhs);
        if scale == 0.0 {
            self.optimality
        } else {
            self.optimality / scale
        }
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Relative threshold on `|R_jj| / max |R_ii|` below which a column counts
/// as dependent.
fn rank_tolerance(m: usize, n: usize) -> f64 {
    (m.max(n) as f64) * f64::EPSILON
}

/// Minimises `‖M ζ − P‖₂` for `rows >= cols`.
pub fn solve_least_squares(matrix: MatRef<'_, f64>, rhs: &[f64]) -> Result<LeastSquaresSolution> {
    let (m, n) = (matrix.nrows(), matrix.ncols());
    if rhs.len() != m {
        return Err(Error::invalid(format!(
            "right-hand side has {} entries for {m} rows",
            rhs.len()
        )));
    }
    if m < n {
        return Err(Error::Underdetermined { rows: m, cols: n });
    }
    if n == 0 {
        return Ok(LeastSquaresSolution {
            solution: Vec::new(),
            residual_norm: norm(rhs),
            optimality: 0.0,
            rank: 0,
            rank_deficient: false,
        });
    }

    let scale: Vec<f64> = (0..n)
        .map(|j| {
            let c = matrix.col(j).norm_l2();
            if c > 0.0 {
                1.0 / c
            } else {
                1.0
            }
        })
        .collect();
    let mut a = Mat::from_fn(m, n, |i, j| matrix[(i, j)] * scale[j]);
    let mut b = Mat::from_fn(m, 1, |i, _| rhs[i]);

    let block = recommended_block_size::<f64>(m, n);
    let mut coeff = Mat::<f64>::zeros(block, n);
    let par = Par::Seq;
    let req = StackReq::any_of(&[
        qr_in_place_scratch::<f64>(m, n, block, par, Default::default()),
        apply_block_householder_sequence_transpose_on_the_left_in_place_scratch::<f64>(m, block, 1),
    ]);
    let mut buf = MemBuffer::new(req);
    let stack = MemStack::new(&mut buf);
    qr_in_place(a.as_mut(), coeff.as_mut(), par, stack, Default::default());
    apply_block_householder_sequence_transpose_on_the_left_in_place_with_conj(
        a.as_ref(),
        coeff.as_ref(),
        Conj::No,
        b.as_mut(),
        par,
        stack,
    );
    drop(coeff);

    let r = a.as_ref().submatrix(0, 0, n, n);
    let diag_max = (0..n).map(|j| r[(j, j)].abs()).fold(0.0, f64::max);
    let tol = rank_tolerance(m, n) * diag_max;
    let dependent = (0..n).any(|j| !(r[(j, j)].abs() > tol));

    let mut y = Mat::from_fn(n, 1, |i, _| b[(i, 0)]);
    let rank = if dependent {
        let r = Mat::from_fn(n, n, |i, j| if i <= j { a[(i, j)] } else { 0.0 });
        drop(a);
        let (sol, rank) = minimum_norm_triangular(&r, &y);
        y = sol;
        log::warn!("least-squares matrix is rank deficient: numerical rank {rank} of {n}");
        rank
    } else {
        solve_upper_triangular_in_place(r, y.as_mut(), par);
        drop(a);
        n
    };

    let solution: Vec<f64> = (0..n).map(|j| y[(j, 0)] * scale[j]).collect();
    let x = Mat::from_fn(n, 1, |i, _| solution[i]);
    let mut resid = &matrix * &x;
    for i in 0..m {
        resid[(i, 0)] -= rhs[i];
    }
    let grad = matrix.transpose() * &resid;
    Ok(LeastSquaresSolution {
        solution,
        residual_norm: resid.col(0).norm_l2(),
        optimality: grad.col(0).norm_l2(),
        rank,
        rank_deficient: rank < n,
    })
}

/// Minimum-norm minimiser of `‖R y − c‖` for square upper-triangular `R`.
fn minimum_norm_triangular(r: &Mat<f64>, c: &Mat<f64>) -> (Mat<f64>, usize) {
    let n = r.ncols();
    let piv = r.col_piv_qr();
    let r2 = piv.thin_R();
    let dmax = r2[(0, 0)].abs();
    let tol = rank_tolerance(n, n) * dmax;
    let rank = (0..n).take_while(|&j| r2[(j, j)].abs() > tol).count();
    if rank == 0 {
        return (Mat::zeros(n, 1), 0);
    }

    // d = (Q2ᵀ c)[..rank]
    let q = piv.compute_thin_Q();
    let d = q.transpose() * c;

    // Minimum-norm solution of [R11 R12] w = d via QR of its transpose.
    let top = Mat::from_fn(n, rank, |i, j| r2[(j, i)]);
    let qr = top.qr();
    let r3 = qr.thin_R();
    // R3ᵀ z = d
    let mut z = Mat::from_fn(rank, 1, |i, _| d[(i, 0)]);
    for i in 0..rank {
        let mut s = z[(i, 0)];
        for k in 0..i {
            s -= r3[(k, i)] * z[(k, 0)];
        }
        z[(i, 0)] = s / r3[(i, i)];
    }
    let q3 = qr.compute_thin_Q();
    let w = &q3 * &z;

    let (forward, _) = piv.P().arrays();
    let mut y = Mat::zeros(n, 1);
    for j in 0..n {
        y[(forward[j], 0)] = w[(j, 0)];
    }
    (y, rank)
}
