//! Local Taylor expansions on rectangular elements.
//!
//! Each element carries, per time mode, the scaled Taylor coefficients
//! `C(k, p)` of the spatial solution about its centre. Only the rows `p = 0`
//! and `p = 1` are free; the PDE fixes every higher row through
//!
//! ```text
//! D_y (p+1)(p+2) C(k, p+2) = G(k, p) + Ā C(k, p) − D_x (k+1)(k+2) C(k+2, p)
//!                            + V_x (k+1) C(k+1, p) + V_y (p+1) C(k, p+1)
//! ```
//!
//! where `Ā` couples the time modes and `G` carries the initial condition.

use faer::Mat;

use crate::error::{Axis, Error, Result};
use crate::pde::PdeCoefficients;
use crate::problems::ProblemSpec;
use crate::simplex::{Derivative, Triangle};

/// Rectangular element of a uniform mesh.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Element2D {
    pub index: [usize; 2],
    pub center: [f64; 2],
    pub width: [f64; 2],
}

/// Ordering of the free coefficients of one time mode:
/// `C(0,0)..C(K,0)` followed by `C(0,1)..C(K-1,1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UnknownLayout2D {
    order: usize,
}

impl UnknownLayout2D {
    pub fn new(order: usize) -> Self {
        Self { order }
    }

    pub fn per_mode(&self) -> usize {
        2 * self.order + 1
    }

    pub fn per_element(&self, modes: usize) -> usize {
        modes * self.per_mode()
    }

    /// Slot of `C(k, p)` within one mode, if it is free.
    pub fn slot(&self, k: usize, p: usize) -> Option<usize> {
        match p {
            0 if k <= self.order => Some(k),
            1 if k < self.order => Some(self.order + 1 + k),
            _ => None,
        }
    }
}

/// Truncated Taylor coefficients `C[n][k][p]`, `k + p <= K`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransformTable2D {
    tri: Triangle,
    modes: usize,
    // [index][mode]
    coeffs: Vec<f64>,
}

impl TransformTable2D {
    pub fn zeros(order: usize, modes: usize) -> Self {
        let tri = Triangle::new(order);
        let coeffs = vec![0.0; tri.len() * modes];
        Self { tri, modes, coeffs }
    }

    pub fn order(&self) -> usize {
        self.tri.order()
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn index_set(&self) -> &Triangle {
        &self.tri
    }

    /// Coefficient of mode `n`; zero outside the truncation set.
    pub fn get(&self, n: usize, k: usize, p: usize) -> f64 {
        self.tri
            .index(k, p)
            .map_or(0.0, |i| self.coeffs[i * self.modes + n])
    }

    /// Panics if `k + p > K`.
    pub fn set(&mut self, n: usize, k: usize, p: usize, value: f64) {
        let i = self
            .tri
            .index(k, p)
            .unwrap_or_else(|| panic!("({k}, {p}) outside order {}", self.order()));
        self.coeffs[i * self.modes + n] = value;
    }

    /// Raw storage, `[index][mode]`.
    pub fn as_slice(&self) -> &[f64] {
        &self.coeffs
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    /// The free coefficients, mode-major in [`UnknownLayout2D`] order.
    pub fn unknowns(&self) -> Vec<f64> {
        let per_mode = 2 * self.order() + 1;
        let mut out = vec![0.0; self.modes * per_mode];
        for n in 0..self.modes {
            for s in 0..per_mode {
                out[n * per_mode + s] = self.coeffs[s * self.modes + n];
            }
        }
        out
    }

    /// Same table with every mode replaced by `modes` copies of mode-less data.
    pub fn broadcast(order: usize, modes: usize, single: &[f64]) -> Self {
        let mut t = Self::zeros(order, modes);
        for (i, v) in single.iter().enumerate() {
            for n in 0..modes {
                t.coeffs[i * modes + n] = *v;
            }
        }
        t
    }

    /// Evaluates every mode against monomials already in storage order.
    pub fn dot_monomials(&self, phi: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.modes];
        for (i, w) in phi.iter().enumerate() {
            if *w == 0.0 {
                continue;
            }
            let row = &self.coeffs[i * self.modes..(i + 1) * self.modes];
            for (o, c) in out.iter_mut().zip(row) {
                *o += w * c;
            }
        }
        out
    }
}

/// Advection term of the recurrence.
#[derive(Clone, Copy, Debug)]
pub enum Advection<'a> {
    /// `V_x u_x + V_y u_y` with constant velocity.
    Constant([f64; 2]),
    /// `w (a u_x + b u_y)` with `w` a frozen per-mode local expansion.
    Frozen {
        velocity: &'a TransformTable2D,
        direction: [f64; 2],
    },
}

/// Runs the recurrence over a batch of tables stored `[index][mode][batch]`.
///
/// Rows `p <= 1` of `data` must already hold the free coefficients.
/// `sources`, stored `[index][mode]`, is added to every batch column.
pub(crate) fn complete_batch(
    tri: &Triangle,
    modes: usize,
    batch: usize,
    data: &mut [f64],
    sources: Option<&[f64]>,
    diffusion: [f64; 2],
    advection: Advection<'_>,
    reduced: &Mat<f64>,
) -> Result<()> {
    if diffusion[1] == 0.0 {
        return Err(Error::SingularRecurrence(Axis::Y));
    }
    let order = tri.order();
    if order < 2 {
        return Ok(());
    }
    let [dx, dy] = diffusion;
    let stride = modes * batch;
    let mut acc = vec![0.0; stride];

    for p in 0..=order - 2 {
        for k in 0..=order - p - 2 {
            acc.fill(0.0);
            let here = tri.idx(k, p);

            if let Some(g) = sources {
                for n in 0..modes {
                    let v = g[here * modes + n];
                    if v != 0.0 {
                        acc[n * batch..(n + 1) * batch].iter_mut().for_each(|a| *a += v);
                    }
                }
            }

            let base = &data[here * stride..(here + 1) * stride];
            for n in 0..modes {
                let out = &mut acc[n * batch..(n + 1) * batch];
                for m in 0..modes {
                    let a = reduced[(n, m)];
                    if a == 0.0 {
                        continue;
                    }
                    let src = &base[m * batch..(m + 1) * batch];
                    out.iter_mut().zip(src).for_each(|(o, s)| *o += a * s);
                }
            }

            let fx = -dx * ((k + 1) * (k + 2)) as f64;
            axpy(&mut acc, fx, &data[tri.idx(k + 2, p) * stride..][..stride]);

            match advection {
                Advection::Constant([vx, vy]) => {
                    let ax = vx * (k + 1) as f64;
                    let ay = vy * (p + 1) as f64;
                    if ax != 0.0 {
                        axpy(&mut acc, ax, &data[tri.idx(k + 1, p) * stride..][..stride]);
                    }
                    if ay != 0.0 {
                        axpy(&mut acc, ay, &data[tri.idx(k, p + 1) * stride..][..stride]);
                    }
                }
                Advection::Frozen {
                    velocity,
                    direction: [a, b],
                } => {
                    // Cauchy products  Σ w(r,s) (k-r+1) C(k-r+1, p-s)  and
                    //                  Σ w(r,s) (p-s+1) C(k-r, p-s+1)  per mode
                    for s in 0..=p {
                        for r in 0..=k {
                            let xi = tri.idx(k - r + 1, p - s);
                            let yi = tri.idx(k - r, p - s + 1);
                            let fx = a * (k - r + 1) as f64;
                            let fy = b * (p - s + 1) as f64;
                            for n in 0..modes {
                                let w = velocity.get(n, r, s);
                                if w == 0.0 {
                                    continue;
                                }
                                let out = &mut acc[n * batch..(n + 1) * batch];
                                let cx = &data[xi * stride + n * batch..][..batch];
                                let cy = &data[yi * stride + n * batch..][..batch];
                                for ((o, x), y) in out.iter_mut().zip(cx).zip(cy) {
                                    *o += w * (fx * x + fy * y);
                                }
                            }
                        }
                    }
                }
            }

            let scale = 1.0 / (dy * ((p + 1) * (p + 2)) as f64);
            let target = tri.idx(k, p + 2);
            data[target * stride..(target + 1) * stride]
                .iter_mut()
                .zip(&acc)
                .for_each(|(d, a)| *d = a * scale);
        }
    }
    Ok(())
}

#[inline]
fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += a * xi);
}

fn seed_table(
    unknowns: &[f64],
    order: usize,
    modes: usize,
) -> Result<TransformTable2D> {
    let layout = UnknownLayout2D::new(order);
    let per_mode = layout.per_mode();
    if unknowns.len() != modes * per_mode {
        return Err(Error::invalid(format!(
            "expected {} free coefficients ({} modes x {}), got {}",
            modes * per_mode,
            modes,
            per_mode,
            unknowns.len()
        )));
    }
    let mut table = TransformTable2D::zeros(order, modes);
    for n in 0..modes {
        for s in 0..per_mode {
            // free slots are the storage prefix
            table.coeffs[s * modes + n] = unknowns[n * per_mode + s];
        }
    }
    Ok(table)
}

/// Completes a table from its free coefficients for constant coefficients.
///
/// `unknowns` is mode-major in [`UnknownLayout2D`] order; the order `K` and
/// mode count come from `sources` and `reduced`.
pub fn complete_table_2d(
    unknowns: &[f64],
    sources: &TransformTable2D,
    coeffs: &PdeCoefficients,
    reduced: &Mat<f64>,
) -> Result<TransformTable2D> {
    complete_table_2d_with(
        unknowns,
        sources,
        [coeffs.diffusion[0], coeffs.diffusion[1]],
        Advection::Constant([coeffs.velocity[0], coeffs.velocity[1]]),
        reduced,
    )
}

/// [`complete_table_2d`] with an explicit advection term.
pub fn complete_table_2d_with(
    unknowns: &[f64],
    sources: &TransformTable2D,
    diffusion: [f64; 2],
    advection: Advection<'_>,
    reduced: &Mat<f64>,
) -> Result<TransformTable2D> {
    let modes = reduced.nrows();
    if sources.modes() != modes || reduced.ncols() != modes {
        return Err(Error::invalid(format!(
            "mode count mismatch: coupling is {}x{}, sources carry {} modes",
            reduced.nrows(),
            reduced.ncols(),
            sources.modes()
        )));
    }
    if let Advection::Frozen { velocity, .. } = advection {
        if velocity.modes() != modes {
            return Err(Error::invalid("frozen velocity has the wrong mode count"));
        }
    }
    let order = sources.order();
    let mut table = seed_table(unknowns, order, modes)?;
    let tri = table.tri.clone();
    complete_batch(
        &tri,
        modes,
        1,
        &mut table.coeffs,
        Some(&sources.coeffs),
        diffusion,
        advection,
        reduced,
    )?;
    Ok(table)
}

/// Evaluates every time mode of `table` (or a first derivative) at `(x, y)`.
pub fn evaluate_2d(
    table: &TransformTable2D,
    element: &Element2D,
    x: f64,
    y: f64,
    deriv: Derivative,
) -> Vec<f64> {
    let phi = table
        .tri
        .monomials([x - element.center[0], y - element.center[1]], deriv);
    table.dot_monomials(&phi)
}

/// Local transforms of the initial-condition forcing `G = initial_column · g`.
pub fn source_transforms_2d(
    problem: &ProblemSpec,
    element: &Element2D,
    initial_column: &[f64],
    order: usize,
) -> Result<TransformTable2D> {
    let g = problem.initial_taylor_2d(element.center, order)?;
    let modes = initial_column.len();
    let mut table = TransformTable2D::zeros(order, modes);
    for (i, gi) in g.iter().enumerate() {
        for (n, a) in initial_column.iter().enumerate() {
            table.coeffs[i * modes + n] = a * gi;
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems;
    use faer::linalg::solvers::Solve;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap;

    type Poly = BTreeMap<(usize, usize), f64>;

    fn poly_of(table: &TransformTable2D, n: usize) -> Poly {
        table
            .index_set()
            .iter()
            .map(|(k, p)| ((k, p), table.get(n, k, p)))
            .collect()
    }

    fn d_dx(poly: &Poly) -> Poly {
        let mut out = Poly::new();
        for (&(k, p), &c) in poly {
            if k > 0 {
                *out.entry((k - 1, p)).or_default() += k as f64 * c;
            }
        }
        out
    }

    fn d_dy(poly: &Poly) -> Poly {
        let mut out = Poly::new();
        for (&(k, p), &c) in poly {
            if p > 0 {
                *out.entry((k, p - 1)).or_default() += p as f64 * c;
            }
        }
        out
    }

    fn add_scaled(acc: &mut Poly, a: f64, poly: &Poly) {
        for (&key, &c) in poly {
            *acc.entry(key).or_default() += a * c;
        }
    }

    /// Coefficients of `L c − G` per mode, where
    /// `L c = D_x c_xx + D_y c_yy − V·∇c − Ā c`.
    fn residual(
        table: &TransformTable2D,
        sources: &TransformTable2D,
        pde: &PdeCoefficients,
        reduced: &Mat<f64>,
    ) -> Vec<Poly> {
        let modes = table.modes();
        let polys: Vec<Poly> = (0..modes).map(|n| poly_of(table, n)).collect();
        (0..modes)
            .map(|n| {
                let c = &polys[n];
                let mut r = Poly::new();
                add_scaled(&mut r, pde.diffusion[0], &d_dx(&d_dx(c)));
                add_scaled(&mut r, pde.diffusion[1], &d_dy(&d_dy(c)));
                add_scaled(&mut r, -pde.velocity[0], &d_dx(c));
                add_scaled(&mut r, -pde.velocity[1], &d_dy(c));
                for m in 0..modes {
                    add_scaled(&mut r, -reduced[(n, m)], &polys[m]);
                }
                add_scaled(&mut r, -1.0, &poly_of(sources, n));
                r
            })
            .collect()
    }

    /// Independent oracle: treat every coefficient with `p >= 2` as unknown
    /// and solve the square linear system "residual coefficients of total
    /// degree <= K-2 vanish".
    fn oracle(
        unknowns: &[f64],
        sources: &TransformTable2D,
        pde: &PdeCoefficients,
        reduced: &Mat<f64>,
    ) -> TransformTable2D {
        let order = sources.order();
        let modes = sources.modes();
        let high: Vec<(usize, usize, usize)> = (0..modes)
            .flat_map(|n| {
                (2..=order).flat_map(move |p| (0..=order - p).map(move |k| (n, k, p)))
            })
            .collect();
        let eqs: Vec<(usize, usize, usize)> = (0..modes)
            .flat_map(|n| {
                (0..=order - 2).flat_map(move |d| (0..=d).map(move |p| (n, d - p, p)))
            })
            .collect();
        assert_eq!(high.len(), eqs.len());
        let base = seed_table(unknowns, order, modes).unwrap();
        let eval = |t: &TransformTable2D| -> Vec<f64> {
            let r = residual(t, sources, pde, reduced);
            eqs.iter()
                .map(|&(n, k, p)| r[n].get(&(k, p)).copied().unwrap_or(0.0))
                .collect()
        };
        let r0 = eval(&base);
        let mut a = Mat::<f64>::zeros(eqs.len(), high.len());
        for (j, &(n, k, p)) in high.iter().enumerate() {
            let mut t = base.clone();
            t.set(n, k, p, 1.0);
            let r = eval(&t);
            for i in 0..eqs.len() {
                a[(i, j)] = r[i] - r0[i];
            }
        }
        let rhs = Mat::from_fn(eqs.len(), 1, |i, _| -r0[i]);
        let x = a.partial_piv_lu().solve(&rhs);
        let mut out = base;
        for (j, &(n, k, p)) in high.iter().enumerate() {
            out.set(n, k, p, x[(j, 0)]);
        }
        out
    }

    fn random_table(rng: &mut ChaCha8Rng, order: usize, modes: usize) -> TransformTable2D {
        let mut t = TransformTable2D::zeros(order, modes);
        for v in t.coeffs.iter_mut() {
            *v = rng.gen_range(-1.0..1.0);
        }
        t
    }

    #[test]
    fn zero_in_zero_out() {
        let red = Mat::from_fn(3, 3, |i, j| (i + 2 * j) as f64);
        let src = TransformTable2D::zeros(5, 3);
        let t = complete_table_2d(&vec![0.0; 33], &src, &PdeCoefficients::heat(1.0), &red).unwrap();
        assert!(t.as_slice().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn harmonic_pair() {
        let red = Mat::zeros(1, 1);
        for order in [2, 4] {
            let layout = UnknownLayout2D::new(order);
            let mut u = vec![0.0; layout.per_mode()];
            u[layout.slot(2, 0).unwrap()] = 1.0;
            let src = TransformTable2D::zeros(order, 1);
            let t = complete_table_2d(&u, &src, &PdeCoefficients::heat(1.0), &red).unwrap();
            assert_eq!(t.get(0, 0, 2), -1.0);
            assert_eq!(t.get(0, 2, 0), 1.0);
            // nothing else is generated
            let nonzero = t.as_slice().iter().filter(|v| **v != 0.0).count();
            assert_eq!(nonzero, 2);
        }
    }

    #[test]
    fn zero_y_diffusion_is_singular() {
        let red = Mat::zeros(1, 1);
        let src = TransformTable2D::zeros(3, 1);
        let pde = PdeCoefficients::new_2d([0.0, 0.0], [1.0, 0.0]);
        assert_eq!(
            complete_table_2d(&[0.0; 7], &src, &pde, &red),
            Err(Error::SingularRecurrence(Axis::Y))
        );
    }

    #[test]
    fn wrong_unknown_count_rejected() {
        let red = Mat::zeros(2, 2);
        let src = TransformTable2D::zeros(3, 2);
        assert!(complete_table_2d(&[0.0; 7], &src, &PdeCoefficients::heat(1.0), &red).is_err());
    }

    #[test]
    fn matches_residual_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..20 {
            let order = 2 + trial % 5; // K in 2..=6
            let modes = 1 + trial % 3;
            let diagonal = trial % 2 == 0;
            let red = Mat::from_fn(modes, modes, |i, j| {
                if diagonal && i != j {
                    0.0
                } else {
                    rng.gen_range(-3.0..3.0)
                }
            });
            let pde = PdeCoefficients::new_2d(
                [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)],
                [rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0)],
            );
            let src = random_table(&mut rng, order, modes);
            let u: Vec<f64> = (0..modes * (2 * order + 1))
                .map(|_| rng.gen_range(-1.0..1.0))
                .collect();
            let got = complete_table_2d(&u, &src, &pde, &red).unwrap();
            let want = oracle(&u, &src, &pde, &red);
            for (a, b) in got.as_slice().iter().zip(want.as_slice()) {
                assert!((a - b).abs() < 1e-10 * b.abs().max(1.0), "{a} vs {b}");
            }
            // residual vanishes through degree K-2
            let r = residual(&got, &src, &pde, &red);
            for poly in &r {
                for (&(k, p), v) in poly {
                    if k + p + 2 <= order {
                        assert!(v.abs() < 1e-10, "residual ({k},{p}) = {v}");
                    }
                }
            }
        }
    }

    #[test]
    fn frozen_velocity_matches_product_rule() {
        // with a constant frozen field w ≡ c the convolution reduces to
        // constant advection with velocity (c·a, c·b)
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let order = 6;
        let modes = 2;
        let red = Mat::from_fn(modes, modes, |_, _| rng.gen_range(-1.0..1.0));
        let src = random_table(&mut rng, order, modes);
        let u: Vec<f64> = (0..modes * 13).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut w = TransformTable2D::zeros(order, modes);
        w.set(0, 0, 0, 0.7);
        w.set(1, 0, 0, -0.4);
        let frozen = complete_table_2d_with(
            &u,
            &src,
            [1.0, 1.3],
            Advection::Frozen {
                velocity: &w,
                direction: [1.0, 1.0],
            },
            &red,
        )
        .unwrap();
        // mode-by-mode comparison only holds for a diagonal coupling, so
        // compare the residual instead: w(u_x+u_y) term per mode
        let polys: Vec<Poly> = (0..modes).map(|n| poly_of(&frozen, n)).collect();
        for n in 0..modes {
            let c = &polys[n];
            let mut r = Poly::new();
            add_scaled(&mut r, 1.0, &d_dx(&d_dx(c)));
            add_scaled(&mut r, 1.3, &d_dy(&d_dy(c)));
            let vel = w.get(n, 0, 0);
            add_scaled(&mut r, -vel, &d_dx(c));
            add_scaled(&mut r, -vel, &d_dy(c));
            for m in 0..modes {
                add_scaled(&mut r, -red[(n, m)], &polys[m]);
            }
            add_scaled(&mut r, -1.0, &poly_of(&src, n));
            for (&(k, p), v) in &r {
                if k + p + 2 <= order {
                    assert!(v.abs() < 1e-11);
                }
            }
        }
    }

    #[test]
    fn frozen_velocity_variable_field_residual() {
        // w(x,y) = 1 + x y: check the truncated product residual directly
        let order = 5;
        let red = Mat::from_fn(1, 1, |_, _| 0.5);
        let src = TransformTable2D::zeros(order, 1);
        let u: Vec<f64> = (0..11).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut w = TransformTable2D::zeros(order, 1);
        w.set(0, 0, 0, 1.0);
        w.set(0, 1, 1, 1.0);
        let t = complete_table_2d_with(
            &u,
            &src,
            [1.0, 1.0],
            Advection::Frozen {
                velocity: &w,
                direction: [1.0, 1.0],
            },
            &red,
        )
        .unwrap();
        let c = poly_of(&t, 0);
        let grad = {
            let mut g = d_dx(&c);
            add_scaled(&mut g, 1.0, &d_dy(&c));
            g
        };
        let wpoly = poly_of(&w, 0);
        let mut product = Poly::new();
        for (&(a, b), &x) in &wpoly {
            for (&(k, p), &y) in &grad {
                *product.entry((a + k, b + p)).or_default() += x * y;
            }
        }
        let mut r = Poly::new();
        add_scaled(&mut r, 1.0, &d_dx(&d_dx(&c)));
        add_scaled(&mut r, 1.0, &d_dy(&d_dy(&c)));
        add_scaled(&mut r, -1.0, &product);
        add_scaled(&mut r, -0.5, &c);
        for (&(k, p), v) in &r {
            if k + p + 2 <= order {
                assert!(v.abs() < 1e-12, "({k},{p}): {v}");
            }
        }
    }

    #[test]
    fn evaluation_examples() {
        let el = Element2D {
            index: [0, 0],
            center: [0.25, 0.75],
            width: [0.5, 0.5],
        };
        let mut t = TransformTable2D::zeros(3, 2);
        for n in 0..2 {
            t.set(n, 0, 0, 1.0 + n as f64);
            t.set(n, 1, 0, 3.0 - n as f64);
        }
        assert_eq!(evaluate_2d(&t, &el, 0.25, 0.75, Derivative::Value), vec![1.0, 2.0]);
        assert_eq!(evaluate_2d(&t, &el, 0.25, 0.75, Derivative::Dx), vec![3.0, 2.0]);

        let mut q = TransformTable2D::zeros(3, 1);
        q.set(0, 2, 1, 1.0);
        let v = evaluate_2d(&q, &el, 0.25 + 2.0, 0.75 + 3.0, Derivative::Value);
        assert_eq!(v, vec![12.0]);
    }

    #[test]
    fn sources_of_bilinear_initial_data() {
        let p = problems::manufactured_2d(
            problems::Polynomial::from_terms(&[([1, 1, 0], 1.0)]),
            PdeCoefficients::heat(1.0),
            1.0,
        );
        let el = Element2D {
            index: [0, 0],
            center: [0.5, 0.5],
            width: [1.0, 1.0],
        };
        let c = 2.5;
        let g = source_transforms_2d(&p, &el, &[c], 3).unwrap();
        for (k, q) in g.index_set().iter() {
            let want = match (k, q) {
                (0, 0) => 0.25 * c,
                (1, 0) | (0, 1) => 0.5 * c,
                (1, 1) => c,
                _ => 0.0,
            };
            assert!((g.get(0, k, q) - want).abs() < 1e-15);
        }
        let zero = problems::manufactured_2d(
            problems::Polynomial::zero(),
            PdeCoefficients::heat(1.0),
            1.0,
        );
        let z = source_transforms_2d(&zero, &el, &[1.0, 2.0], 4).unwrap();
        assert!(z.as_slice().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn sources_of_sine_product() {
        let p = problems::problem1();
        let el = Element2D {
            index: [0, 0],
            center: [0.5, 0.5],
            width: [1.0, 1.0],
        };
        let g = source_transforms_2d(&p, &el, &[1.0], 4).unwrap();
        let ratio = g.get(0, 2, 0) / g.get(0, 0, 0);
        let pi2 = std::f64::consts::PI.powi(2);
        assert!((ratio + pi2 / 2.0).abs() < 1e-13);
    }

    proptest! {
        #[test]
        fn completion_is_linear(seed in 0u64..1000, a in -2.0f64..2.0, b in -2.0f64..2.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let order = 5;
            let modes = 3;
            let red = Mat::from_fn(modes, modes, |_, _| rng.gen_range(-5.0..5.0));
            let pde = PdeCoefficients::new_2d([0.3, -1.1], [1.0, 0.7]);
            let n = modes * (2 * order + 1);
            let u1: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let u2: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let g1 = random_table(&mut rng, order, modes);
            let g2 = random_table(&mut rng, order, modes);
            let mix_u: Vec<f64> = u1.iter().zip(&u2).map(|(x, y)| a * x + b * y).collect();
            let mut mix_g = g1.clone();
            for (m, (x, y)) in mix_g.coeffs.iter_mut().zip(g1.coeffs.iter().zip(&g2.coeffs)) {
                *m = a * x + b * y;
            }
            let t1 = complete_table_2d(&u1, &g1, &pde, &red).unwrap();
            let t2 = complete_table_2d(&u2, &g2, &pde, &red).unwrap();
            let tm = complete_table_2d(&mix_u, &mix_g, &pde, &red).unwrap();
            for ((x, y), z) in t1.as_slice().iter().zip(t2.as_slice()).zip(tm.as_slice()) {
                let want = a * x + b * y;
                prop_assert!((z - want).abs() <= 1e-13 * want.abs().max(1.0) * 10.0);
            }
        }
    }

    #[test]
    fn unknown_layout_counts() {
        for order in 1..10 {
            let l = UnknownLayout2D::new(order);
            assert_eq!(l.per_mode(), 2 * order + 1);
            assert_eq!(l.per_element(15), 15 * (2 * order + 1));
            assert_eq!(l.slot(order, 0), Some(order));
            assert_eq!(l.slot(order, 1), None);
            assert_eq!(l.slot(0, 2), None);
        }
    }

    #[test]
    fn unknowns_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u: Vec<f64> = (0..2 * 9).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let t = seed_table(&u, 4, 2).unwrap();
        assert_eq!(t.unknowns(), u);
    }
}
