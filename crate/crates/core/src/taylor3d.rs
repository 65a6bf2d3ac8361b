//! Trivariate local Taylor expansions on box elements.
//!
//! The free coefficients are the layers `h = 0` and `h = 1` in the `z`
//! index; every higher layer follows from
//!
//! ```text
//! D_z (h+1)(h+2) C(k,p,h+2) = G + Ā C(k,p,h) − D_x (k+1)(k+2) C(k+2,p,h)
//!                             − D_y (p+1)(p+2) C(k,p+2,h) + V_x (k+1) C(k+1,p,h)
//!                             + V_y (p+1) C(k,p+1,h) + V_z (h+1) C(k,p,h+1)
//! ```

use faer::Mat;

use crate::error::{Axis, Error, Result};
use crate::pde::PdeCoefficients;
use crate::problems::ProblemSpec;
use crate::simplex::{Derivative, Tetra};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Element3D {
    pub index: [usize; 3],
    pub center: [f64; 3],
    pub width: [f64; 3],
}

/// Free coefficients of one mode: `C(k,p,0)` for `k+p <= K`, then
/// `C(k,p,1)` for `k+p <= K-1`, each in `p`-then-`k` order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UnknownLayout3D {
    order: usize,
}

impl UnknownLayout3D {
    pub fn new(order: usize) -> Self {
        Self { order }
    }

    pub fn per_mode(&self) -> usize {
        (self.order + 1) * (self.order + 1)
    }

    pub fn per_element(&self, modes: usize) -> usize {
        modes * self.per_mode()
    }

    pub fn slot(&self, k: usize, p: usize, h: usize) -> Option<usize> {
        if h > 1 {
            return None;
        }
        Tetra::new(self.order).index(k, p, h)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransformTable3D {
    tet: Tetra,
    modes: usize,
    // [index][mode]
    coeffs: Vec<f64>,
}

impl TransformTable3D {
    pub fn zeros(order: usize, modes: usize) -> Self {
        let tet = Tetra::new(order);
        let coeffs = vec![0.0; tet.len() * modes];
        Self { tet, modes, coeffs }
    }

    pub fn order(&self) -> usize {
        self.tet.order()
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn index_set(&self) -> &Tetra {
        &self.tet
    }

    pub fn get(&self, n: usize, k: usize, p: usize, h: usize) -> f64 {
        self.tet
            .index(k, p, h)
            .map_or(0.0, |i| self.coeffs[i * self.modes + n])
    }

    pub fn set(&mut self, n: usize, k: usize, p: usize, h: usize, value: f64) {
        let i = self
            .tet
            .index(k, p, h)
            .unwrap_or_else(|| panic!("({k}, {p}, {h}) outside order {}", self.order()));
        self.coeffs[i * self.modes + n] = value;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coeffs
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn unknowns(&self) -> Vec<f64> {
        let per_mode = (self.order() + 1) * (self.order() + 1);
        let mut out = vec![0.0; self.modes * per_mode];
        for n in 0..self.modes {
            for s in 0..per_mode {
                out[n * per_mode + s] = self.coeffs[s * self.modes + n];
            }
        }
        out
    }

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

/// Batched recurrence over data stored `[index][mode][batch]`.
pub(crate) fn complete_batch(
    tet: &Tetra,
    modes: usize,
    batch: usize,
    data: &mut [f64],
    sources: Option<&[f64]>,
    pde: &PdeCoefficients,
    reduced: &Mat<f64>,
) -> Result<()> {
    let [dx, dy, dz] = pde.diffusion;
    let [vx, vy, vz] = pde.velocity;
    if dz == 0.0 {
        return Err(Error::SingularRecurrence(Axis::Z));
    }
    let order = tet.order();
    if order < 2 {
        return Ok(());
    }
    let stride = modes * batch;
    let mut acc = vec![0.0; stride];
    let add = |acc: &mut [f64], a: f64, idx: usize, data: &[f64]| {
        if a != 0.0 {
            acc.iter_mut()
                .zip(&data[idx * stride..(idx + 1) * stride])
                .for_each(|(o, x)| *o += a * x);
        }
    };

    for h in 0..=order - 2 {
        for p in 0..=order - h - 2 {
            for k in 0..=order - h - p - 2 {
                acc.fill(0.0);
                let here = tet.idx(k, p, h);
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
                add(&mut acc, -dx * ((k + 1) * (k + 2)) as f64, tet.idx(k + 2, p, h), data);
                add(&mut acc, -dy * ((p + 1) * (p + 2)) as f64, tet.idx(k, p + 2, h), data);
                add(&mut acc, vx * (k + 1) as f64, tet.idx(k + 1, p, h), data);
                add(&mut acc, vy * (p + 1) as f64, tet.idx(k, p + 1, h), data);
                add(&mut acc, vz * (h + 1) as f64, tet.idx(k, p, h + 1), data);

                let scale = 1.0 / (dz * ((h + 1) * (h + 2)) as f64);
                let target = tet.idx(k, p, h + 2);
                data[target * stride..(target + 1) * stride]
                    .iter_mut()
                    .zip(&acc)
                    .for_each(|(d, a)| *d = a * scale);
            }
        }
    }
    Ok(())
}

/// Completes a trivariate table from its `N (K+1)^2` free coefficients.
pub fn complete_table_3d(
    unknowns: &[f64],
    sources: &TransformTable3D,
    coeffs: &PdeCoefficients,
    reduced: &Mat<f64>,
) -> Result<TransformTable3D> {
    let modes = reduced.nrows();
    if sources.modes() != modes || reduced.ncols() != modes {
        return Err(Error::invalid("mode count mismatch between coupling and sources"));
    }
    let order = sources.order();
    let per_mode = (order + 1) * (order + 1);
    if unknowns.len() != modes * per_mode {
        return Err(Error::invalid(format!(
            "expected {} free coefficients, got {}",
            modes * per_mode,
            unknowns.len()
        )));
    }
    let mut table = TransformTable3D::zeros(order, modes);
    for n in 0..modes {
        for s in 0..per_mode {
            table.coeffs[s * modes + n] = unknowns[n * per_mode + s];
        }
    }
    let tet = table.tet.clone();
    complete_batch(
        &tet,
        modes,
        1,
        &mut table.coeffs,
        Some(&sources.coeffs),
        coeffs,
        reduced,
    )?;
    Ok(table)
}

pub fn evaluate_3d(
    table: &TransformTable3D,
    element: &Element3D,
    x: f64,
    y: f64,
    z: f64,
    deriv: Derivative,
) -> Vec<f64> {
    let c = element.center;
    let phi = table.tet.monomials([x - c[0], y - c[1], z - c[2]], deriv);
    table.dot_monomials(&phi)
}

pub fn source_transforms_3d(
    problem: &ProblemSpec,
    element: &Element3D,
    initial_column: &[f64],
    order: usize,
) -> Result<TransformTable3D> {
    let g = problem.initial_taylor_3d(element.center, order)?;
    let modes = initial_column.len();
    let mut table = TransformTable3D::zeros(order, modes);
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
    use crate::problems::{self, Polynomial};
    use faer::linalg::solvers::Solve;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap;

    type Poly = BTreeMap<[usize; 3], f64>;

    fn poly_of(t: &TransformTable3D, n: usize) -> Poly {
        t.index_set()
            .iter()
            .map(|(k, p, h)| ([k, p, h], t.get(n, k, p, h)))
            .collect()
    }

    fn diff(poly: &Poly, axis: usize) -> Poly {
        let mut out = Poly::new();
        for (e, c) in poly {
            if e[axis] > 0 {
                let mut f = *e;
                f[axis] -= 1;
                *out.entry(f).or_default() += e[axis] as f64 * c;
            }
        }
        out
    }

    fn add_scaled(acc: &mut Poly, a: f64, poly: &Poly) {
        for (e, c) in poly {
            *acc.entry(*e).or_default() += a * c;
        }
    }

    fn residual(
        t: &TransformTable3D,
        g: &TransformTable3D,
        pde: &PdeCoefficients,
        red: &Mat<f64>,
    ) -> Vec<Poly> {
        let polys: Vec<Poly> = (0..t.modes()).map(|n| poly_of(t, n)).collect();
        (0..t.modes())
            .map(|n| {
                let c = &polys[n];
                let mut r = Poly::new();
                for a in 0..3 {
                    add_scaled(&mut r, pde.diffusion[a], &diff(&diff(c, a), a));
                    add_scaled(&mut r, -pde.velocity[a], &diff(c, a));
                }
                for m in 0..t.modes() {
                    add_scaled(&mut r, -red[(n, m)], &polys[m]);
                }
                add_scaled(&mut r, -1.0, &poly_of(g, n));
                r
            })
            .collect()
    }

    fn oracle(
        unknowns: &[f64],
        g: &TransformTable3D,
        pde: &PdeCoefficients,
        red: &Mat<f64>,
    ) -> TransformTable3D {
        let order = g.order();
        let modes = g.modes();
        let mut base = TransformTable3D::zeros(order, modes);
        let per_mode = (order + 1) * (order + 1);
        for n in 0..modes {
            for s in 0..per_mode {
                base.coeffs[s * modes + n] = unknowns[n * per_mode + s];
            }
        }
        let tet = Tetra::new(order);
        let high: Vec<(usize, [usize; 3])> = (0..modes)
            .flat_map(|n| tet.iter().filter(|e| e.2 >= 2).map(move |(k, p, h)| (n, [k, p, h])))
            .collect();
        let eqs: Vec<(usize, [usize; 3])> = (0..modes)
            .flat_map(|n| {
                tet.iter()
                    .filter(|(k, p, h)| k + p + h + 2 <= order)
                    .map(move |(k, p, h)| (n, [k, p, h]))
            })
            .collect();
        assert_eq!(high.len(), eqs.len());
        let eval = |t: &TransformTable3D| -> Vec<f64> {
            let r = residual(t, g, pde, red);
            eqs.iter()
                .map(|(n, e)| r[*n].get(e).copied().unwrap_or(0.0))
                .collect()
        };
        let r0 = eval(&base);
        let mut a = Mat::<f64>::zeros(eqs.len(), high.len());
        for (j, (n, e)) in high.iter().enumerate() {
            let mut t = base.clone();
            t.set(*n, e[0], e[1], e[2], 1.0);
            let r = eval(&t);
            for i in 0..eqs.len() {
                a[(i, j)] = r[i] - r0[i];
            }
        }
        let rhs = Mat::from_fn(eqs.len(), 1, |i, _| -r0[i]);
        let x = a.partial_piv_lu().solve(&rhs);
        for (j, (n, e)) in high.iter().enumerate() {
            base.set(*n, e[0], e[1], e[2], x[(j, 0)]);
        }
        base
    }

    fn random_table(rng: &mut ChaCha8Rng, order: usize, modes: usize) -> TransformTable3D {
        let mut t = TransformTable3D::zeros(order, modes);
        t.coeffs.iter_mut().for_each(|v| *v = rng.gen_range(-1.0..1.0));
        t
    }

    #[test]
    fn zeros_and_harmonic_pair() {
        let red = Mat::zeros(1, 1);
        let src = TransformTable3D::zeros(2, 1);
        let t = complete_table_3d(&[0.0; 9], &src, &PdeCoefficients::heat(1.0), &red).unwrap();
        assert!(t.as_slice().iter().all(|v| *v == 0.0));

        let layout = UnknownLayout3D::new(2);
        let mut u = vec![0.0; 9];
        u[layout.slot(2, 0, 0).unwrap()] = 1.0;
        let t = complete_table_3d(&u, &src, &PdeCoefficients::heat(1.0), &red).unwrap();
        assert_eq!(t.get(0, 0, 0, 2), -1.0);
    }

    #[test]
    fn zero_z_diffusion_is_singular() {
        let red = Mat::zeros(1, 1);
        let src = TransformTable3D::zeros(2, 1);
        let pde = PdeCoefficients::new_3d([0.0; 3], [1.0, 1.0, 0.0]);
        assert_eq!(
            complete_table_3d(&[0.0; 9], &src, &pde, &red),
            Err(Error::SingularRecurrence(Axis::Z))
        );
    }

    #[test]
    fn unknown_counts() {
        for order in 1..=12 {
            let layout = UnknownLayout3D::new(order);
            let tet = Tetra::new(order);
            let free = tet.iter().filter(|e| e.2 <= 1).count();
            assert_eq!(free, layout.per_mode());
            assert_eq!(layout.per_mode(), (order + 1) * (order + 1));
        }
    }

    #[test]
    fn matches_residual_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for trial in 0..20 {
            let order = 2 + trial % 3; // K in 2..=4
            let modes = 1 + trial % 2;
            let red = Mat::from_fn(modes, modes, |_, _| rng.gen_range(-2.0..2.0));
            let pde = PdeCoefficients::new_3d(
                [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)],
                [rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0)],
            );
            let g = random_table(&mut rng, order, modes);
            let u: Vec<f64> = (0..modes * (order + 1) * (order + 1))
                .map(|_| rng.gen_range(-1.0..1.0))
                .collect();
            let got = complete_table_3d(&u, &g, &pde, &red).unwrap();
            let want = oracle(&u, &g, &pde, &red);
            for (a, b) in got.as_slice().iter().zip(want.as_slice()) {
                assert!((a - b).abs() < 1e-10 * b.abs().max(1.0));
            }
            for poly in residual(&got, &g, &pde, &red) {
                for (e, v) in poly {
                    if e.iter().sum::<usize>() + 2 <= order {
                        assert!(v.abs() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn evaluation_examples() {
        let el = Element3D {
            index: [0, 0, 0],
            center: [0.5, 0.5, 0.5],
            width: [1.0; 3],
        };
        let mut t = TransformTable3D::zeros(3, 1);
        t.set(0, 0, 0, 0, 4.0);
        t.set(0, 0, 0, 1, -2.0);
        assert_eq!(evaluate_3d(&t, &el, 0.5, 0.5, 0.5, Derivative::Value), vec![4.0]);
        assert_eq!(evaluate_3d(&t, &el, 0.5, 0.5, 0.5, Derivative::Dz), vec![-2.0]);
        let mut q = TransformTable3D::zeros(3, 1);
        q.set(0, 1, 1, 1, 1.0);
        assert_eq!(evaluate_3d(&q, &el, 1.5, 2.5, 3.5, Derivative::Value), vec![6.0]);
    }

    #[test]
    fn sources_examples() {
        let el = Element3D {
            index: [0, 0, 0],
            center: [0.5, 0.5, 0.5],
            width: [1.0; 3],
        };
        let lin = problems::manufactured_3d(
            Polynomial::from_terms(&[([1, 0, 0], 1.0), ([0, 1, 0], 1.0), ([0, 0, 1], 1.0)]),
            PdeCoefficients::heat(1.0),
            1.0,
        );
        let c = 0.75;
        let g = source_transforms_3d(&lin, &el, &[c], 3).unwrap();
        assert!((g.get(0, 0, 0, 0) - 1.5 * c).abs() < 1e-15);
        for e in [[1, 0, 0], [0, 1, 0], [0, 0, 1]] {
            assert!((g.get(0, e[0], e[1], e[2]) - c).abs() < 1e-15);
        }
        assert_eq!(g.get(0, 1, 1, 0), 0.0);

        let gauss = problems::problem4();
        let g = source_transforms_3d(&gauss, &el, &[1.0], 4).unwrap();
        assert!((g.get(0, 2, 0, 0) / g.get(0, 0, 0, 0) + 1.0).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn completion_is_linear(seed in 0u64..500, a in -2.0f64..2.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let order = 4;
            let modes = 2;
            let red = Mat::from_fn(modes, modes, |_, _| rng.gen_range(-3.0..3.0));
            let pde = PdeCoefficients::new_3d([1.0, -0.5, 0.2], [1.0, 0.8, 1.2]);
            let n = modes * 25;
            let u1: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let u2: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let g1 = random_table(&mut rng, order, modes);
            let g2 = random_table(&mut rng, order, modes);
            let mu: Vec<f64> = u1.iter().zip(&u2).map(|(x, y)| a * x + y).collect();
            let mut mg = g1.clone();
            for (m, (x, y)) in mg.coeffs.iter_mut().zip(g1.coeffs.iter().zip(&g2.coeffs)) {
                *m = a * x + y;
            }
            let t1 = complete_table_3d(&u1, &g1, &pde, &red).unwrap();
            let t2 = complete_table_3d(&u2, &g2, &pde, &red).unwrap();
            let tm = complete_table_3d(&mu, &mg, &pde, &red).unwrap();
            for ((x, y), z) in t1.as_slice().iter().zip(t2.as_slice()).zip(tm.as_slice()) {
                let want = a * x + y;
                prop_assert!((z - want).abs() <= 1e-12 * want.abs().max(1.0));
            }
        }
    }
}
