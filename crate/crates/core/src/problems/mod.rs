//! Benchmark problems with closed-form solutions.
//!
//! Every problem supplies its exact solution and gradient, Dirichlet data,
//! and the local Taylor coefficients of its initial condition computed from
//! analytic recurrences.

pub mod reference;
mod report;
mod series;

pub use report::{error_report, Dof, ErrorReport, ErrorSample, SampleOptions, SpaceTimeField, TimeSlice};
pub use series::{gaussian, logistic, logistic_value, sine, Polynomial};

use std::f64::consts::PI;

use crate::error::{Axis, Error, Result};
use crate::mesh::{transverse, Face};
use crate::pde::PdeCoefficients;
use crate::simplex::{Tetra, Triangle};

/// Closed-form solution family.
#[derive(Clone, Debug, PartialEq)]
pub enum ExactSolution {
    /// `exp(−π² Σ D_a t) Π sin(π (x_a − V_a t))`.
    SineProduct,
    /// `(4t+1)^(−dim/2) exp(−Σ (x_a − V_a t − 1/2)² / (D_a (4t+1)))`.
    Gaussian,
    /// `1 / (1 + exp((x + y − t) / d))`, a travelling front of the Burgers
    /// equation with viscosity `d / 2`.
    Logistic { d: f64 },
    /// `Σ_j t^j Q_j(x)` with `Q_0` the initial polynomial and
    /// `Q_{j+1} = L Q_j / (j+1)` for the spatial operator `L`.
    Manufactured { series: Vec<Polynomial> },
}

/// Value and gradient of the Dirichlet data at a boundary point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryData {
    pub value: f64,
    pub gradient: [f64; 3],
}

impl BoundaryData {
    /// Derivatives along the axes tangential to `face`, in axis order.
    pub fn tangential(&self, face: Face, dim: usize) -> Vec<(Axis, f64)> {
        transverse(face.axis, dim)
            .into_iter()
            .map(|a| (a, self.gradient[a.index()]))
            .collect()
    }
}

/// A fully specified initial-boundary value problem.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemSpec {
    pub name: String,
    pub dim: usize,
    pub coefficients: PdeCoefficients,
    /// Burgers advection `u (u_x + u_y)` replaces the constant velocity.
    pub nonlinear: bool,
    pub lo: [f64; 3],
    pub hi: [f64; 3],
    pub t_final: f64,
    exact: ExactSolution,
}

/// Pure diffusion of a sine product on the unit square.
pub fn problem1() -> ProblemSpec {
    ProblemSpec {
        name: "problem1".into(),
        dim: 2,
        coefficients: PdeCoefficients::new_2d([0.0, 0.0], [1.0, 1.0]),
        nonlinear: false,
        lo: [0.0, 0.0, 0.0],
        hi: [1.0, 1.0, 0.0],
        t_final: 0.25,
        exact: ExactSolution::SineProduct,
    }
}

/// Gaussian pulse advected with unit velocity, `D_x = D_y = 1`.
pub fn problem2() -> ProblemSpec {
    problem2_with(1.0, 1.0)
}

pub fn problem2_with(dx: f64, dy: f64) -> ProblemSpec {
    ProblemSpec {
        name: "problem2".into(),
        dim: 2,
        coefficients: PdeCoefficients::new_2d([1.0, 1.0], [dx, dy]),
        nonlinear: false,
        lo: [0.0, 0.0, 0.0],
        hi: [1.0, 1.0, 0.0],
        t_final: 0.1,
        exact: ExactSolution::Gaussian,
    }
}

/// Burgers front with unit viscosity.
pub fn problem3() -> ProblemSpec {
    problem3_with(1.0)
}

/// Burgers front `1 / (1 + exp((x + y − t) / (2ν)))` with viscosity `ν`.
pub fn problem3_with(nu: f64) -> ProblemSpec {
    let d = 2.0 * nu;
    ProblemSpec {
        name: "problem3".into(),
        dim: 2,
        coefficients: PdeCoefficients::new_2d([0.0, 0.0], [nu, nu]),
        nonlinear: true,
        lo: [0.0, 0.0, 0.0],
        hi: [1.0, 1.0, 0.0],
        t_final: 0.25,
        exact: ExactSolution::Logistic { d },
    }
}

/// Three-dimensional Gaussian pulse with unit velocity and diffusion.
pub fn problem4() -> ProblemSpec {
    ProblemSpec {
        name: "problem4".into(),
        dim: 3,
        coefficients: PdeCoefficients::new_3d([1.0; 3], [1.0; 3]),
        nonlinear: false,
        lo: [0.0; 3],
        hi: [1.0; 3],
        t_final: 0.1,
        exact: ExactSolution::Gaussian,
    }
}

fn manufactured(dim: usize, initial: Polynomial, coefficients: PdeCoefficients, t_final: f64) -> ProblemSpec {
    let hi = if dim == 2 { [1.0, 1.0, 0.0] } else { [1.0; 3] };
    ProblemSpec {
        name: format!("manufactured{dim}d"),
        dim,
        coefficients,
        nonlinear: false,
        lo: [0.0; 3],
        hi,
        t_final,
        exact: ExactSolution::Manufactured {
            series: time_series(&initial, &coefficients, dim),
        },
    }
}

fn time_series(initial: &Polynomial, coefficients: &PdeCoefficients, dim: usize) -> Vec<Polynomial> {
    let mut series = vec![initial.clone()];
    loop {
        let j = series.len();
        let next = series[j - 1].spatial_operator(coefficients, dim).scaled(1.0 / j as f64);
        if next.is_zero() {
            return series;
        }
        series.push(next);
    }
}

/// Polynomial solution of the linear equation whose value at `t = 0` is
/// `initial`; its time degree equals the spatial degree for `V ≠ 0`.
pub fn manufactured_2d(initial: Polynomial, coefficients: PdeCoefficients, t_final: f64) -> ProblemSpec {
    manufactured(2, initial, coefficients, t_final)
}

pub fn manufactured_3d(initial: Polynomial, coefficients: PdeCoefficients, t_final: f64) -> ProblemSpec {
    manufactured(3, initial, coefficients, t_final)
}

impl ProblemSpec {
    pub fn exact_solution(&self) -> &ExactSolution {
        &self.exact
    }

    pub fn with_t_final(mut self, t_final: f64) -> Self {
        self.t_final = t_final;
        self
    }

    pub fn with_domain(mut self, lo: [f64; 3], hi: [f64; 3]) -> Self {
        self.lo = lo;
        self.hi = hi;
        self
    }

    /// Replaces the linear coefficients; the exact solution follows them.
    pub fn with_coefficients(mut self, coefficients: PdeCoefficients) -> Result<Self> {
        if self.nonlinear {
            return Err(Error::invalid(
                "Burgers coefficients follow from the front width; set it instead",
            ));
        }
        if let ExactSolution::Manufactured { series } = &self.exact {
            self.exact = ExactSolution::Manufactured {
                series: time_series(&series[0], &coefficients, self.dim),
            };
        }
        self.coefficients = coefficients;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim != 2 && self.dim != 3 {
            return Err(Error::invalid(format!("dimension must be 2 or 3, got {}", self.dim)));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(Error::invalid(format!("final time must be positive, got {}", self.t_final)));
        }
        for a in 0..self.dim {
            if !(self.lo[a] < self.hi[a]) {
                return Err(Error::invalid(format!(
                    "domain bounds along {} are not ordered",
                    Axis::ALL[a]
                )));
            }
            if self.coefficients.diffusion[a] <= 0.0 && matches!(self.exact, ExactSolution::Gaussian) {
                return Err(Error::invalid("Gaussian pulse needs positive diffusion"));
            }
        }
        if self.nonlinear && self.dim != 2 {
            return Err(Error::invalid("the Burgers problem is two-dimensional"));
        }
        if let ExactSolution::Logistic { d } = self.exact {
            if d <= 0.0 {
                return Err(Error::invalid(format!("front width must be positive, got {d}")));
            }
        }
        Ok(())
    }

    fn axes(&self) -> std::ops::Range<usize> {
        0..self.dim
    }

    pub fn exact(&self, x: [f64; 3], t: f64) -> f64 {
        let c = &self.coefficients;
        match &self.exact {
            ExactSolution::SineProduct => {
                let rate: f64 = self.axes().map(|a| c.diffusion[a]).sum();
                let prod: f64 = self
                    .axes()
                    .map(|a| (PI * (x[a] - c.velocity[a] * t)).sin())
                    .product();
                (-PI * PI * rate * t).exp() * prod
            }
            ExactSolution::Gaussian => {
                let s = 4.0 * t + 1.0;
                let q: f64 = self
                    .axes()
                    .map(|a| {
                        let w = x[a] - c.velocity[a] * t - 0.5;
                        w * w / (c.diffusion[a] * s)
                    })
                    .sum();
                s.powf(-0.5 * self.dim as f64) * (-q).exp()
            }
            ExactSolution::Logistic { d } => logistic_value((x[0] + x[1] - t) / d),
            ExactSolution::Manufactured { series } => {
                let mut acc = 0.0;
                for q in series.iter().rev() {
                    acc = acc * t + q.eval(x);
                }
                acc
            }
        }
    }

    pub fn gradient(&self, x: [f64; 3], t: f64) -> [f64; 3] {
        let c = &self.coefficients;
        let mut g = [0.0; 3];
        match &self.exact {
            ExactSolution::SineProduct => {
                let rate: f64 = self.axes().map(|a| c.diffusion[a]).sum();
                let decay = (-PI * PI * rate * t).exp();
                let arg: Vec<f64> = self.axes().map(|a| PI * (x[a] - c.velocity[a] * t)).collect();
                for a in self.axes() {
                    let mut v = decay * PI * arg[a].cos();
                    for b in self.axes().filter(|b| *b != a) {
                        v *= arg[b].sin();
                    }
                    g[a] = v;
                }
            }
            ExactSolution::Gaussian => {
                let u = self.exact(x, t);
                let s = 4.0 * t + 1.0;
                for a in self.axes() {
                    let w = x[a] - c.velocity[a] * t - 0.5;
                    g[a] = -2.0 * w / (c.diffusion[a] * s) * u;
                }
            }
            ExactSolution::Logistic { d } => {
                let f = logistic_value((x[0] + x[1] - t) / d);
                let df = -f * (1.0 - f) / d;
                g[0] = df;
                g[1] = df;
            }
            ExactSolution::Manufactured { series } => {
                for a in self.axes() {
                    let mut acc = 0.0;
                    for q in series.iter().rev() {
                        acc = acc * t + q.derivative(Axis::ALL[a]).eval(x);
                    }
                    g[a] = acc;
                }
            }
        }
        g
    }

    pub fn initial_value(&self, x: [f64; 3]) -> f64 {
        self.exact(x, 0.0)
    }

    /// Dirichlet data and its gradient at a point of `face`.
    pub fn boundary(&self, _face: Face, x: [f64; 3], t: f64) -> BoundaryData {
        BoundaryData {
            value: self.exact(x, t),
            gradient: self.gradient(x, t),
        }
    }

    /// Closure giving the scaled Taylor coefficient `∂^α g / α!` at `center`
    /// for multi-indices of total order at most `order`.
    fn initial_coefficients(&self, center: [f64; 3], order: usize) -> Result<Box<dyn Fn([usize; 3]) -> f64 + '_>> {
        let c = &self.coefficients;
        match &self.exact {
            ExactSolution::SineProduct => {
                let tables: Vec<Vec<f64>> = self.axes().map(|a| sine(center[a], order)).collect();
                Ok(Box::new(move |m| tables.iter().enumerate().map(|(a, t)| t[m[a]]).product()))
            }
            ExactSolution::Gaussian => {
                let tables: Vec<Vec<f64>> = self
                    .axes()
                    .map(|a| gaussian(center[a] - 0.5, c.diffusion[a], order))
                    .collect();
                Ok(Box::new(move |m| tables.iter().enumerate().map(|(a, t)| t[m[a]]).product()))
            }
            ExactSolution::Logistic { d } => {
                if self.dim != 2 {
                    return Err(Error::Oracle("logistic front is defined in two dimensions".into()));
                }
                let b = logistic(center[0] + center[1], 1.0 / d, order);
                Ok(Box::new(move |m| {
                    let total = m[0] + m[1];
                    series::binomial(total, m[0]) * b[total]
                }))
            }
            ExactSolution::Manufactured { series } => {
                let p = &series[0];
                Ok(Box::new(move |m| p.shifted_coefficient(center, m)))
            }
        }
    }

    /// Scaled Taylor coefficients of the initial condition about `center`,
    /// in triangle storage order.
    pub fn initial_taylor_2d(&self, center: [f64; 2], order: usize) -> Result<Vec<f64>> {
        if self.dim != 2 {
            return Err(Error::Oracle(format!("{} is not two-dimensional", self.name)));
        }
        let f = self.initial_coefficients([center[0], center[1], 0.0], order)?;
        Ok(Triangle::new(order).iter().map(|(k, p)| f([k, p, 0])).collect())
    }

    /// Scaled Taylor coefficients of the initial condition in tetrahedral
    /// storage order.
    pub fn initial_taylor_3d(&self, center: [f64; 3], order: usize) -> Result<Vec<f64>> {
        if self.dim != 3 {
            return Err(Error::Oracle(format!("{} is not three-dimensional", self.name)));
        }
        let f = self.initial_coefficients(center, order)?;
        Ok(Tetra::new(order).iter().map(|(k, p, h)| f([k, p, h])).collect())
    }

    /// Mixed partial derivative `∂^α g` of the initial condition at `x`.
    pub fn initial_partial(&self, x: [f64; 3], multi: [usize; 3]) -> Result<f64> {
        if multi[self.dim..].iter().any(|m| *m > 0) {
            return Ok(0.0);
        }
        let order: usize = multi.iter().sum();
        let f = self.initial_coefficients(x, order)?;
        let factorial: f64 = multi
            .iter()
            .map(|m| (1..=*m).map(|i| i as f64).product::<f64>())
            .product();
        Ok(f(multi) * factorial)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    fn all_problems() -> Vec<ProblemSpec> {
        vec![
            problem1(),
            problem2(),
            problem2_with(0.3, 0.7),
            problem3(),
            problem4(),
            manufactured_2d(
                Polynomial::from_terms(&[([2, 1, 0], 1.0), ([0, 3, 0], -0.5), ([1, 0, 0], 2.0)]),
                PdeCoefficients::new_2d([0.4, -0.2], [1.0, 0.5]),
                1.0,
            ),
            manufactured_3d(
                Polynomial::from_terms(&[([1, 1, 1], 1.0), ([2, 0, 1], 0.5)]),
                PdeCoefficients::new_3d([0.1, 0.2, 0.3], [1.0, 1.0, 2.0]),
                1.0,
            ),
        ]
    }

    #[test]
    fn problem1_values() {
        let p = problem1();
        assert!(close(p.exact([0.5, 0.5, 0.0], 0.0), 1.0, 1e-15));
        let want = (-PI * PI / 2.0).exp();
        assert!(close(p.exact([0.5, 0.5, 0.0], 0.25), want, 1e-14));
        assert!((p.exact([0.5, 0.5, 0.0], 0.25) - 7.1919e-3).abs() < 1e-7);
        for s in [0.0, 0.3, 0.9] {
            for t in [0.0, 0.1, 0.25] {
                assert!(p.exact([0.0, s, 0.0], t).abs() < 1e-15);
                assert!(p.exact([1.0, s, 0.0], t).abs() < 1e-15);
                assert!(p.exact([s, 0.0, 0.0], t).abs() < 1e-15);
                assert!(p.exact([s, 1.0, 0.0], t).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn problem2_values() {
        let p = problem2();
        assert_eq!(p.exact([0.5, 0.5, 0.0], 0.0), 1.0);
        assert!(close(p.exact([1.5, 1.5, 0.0], 1.0), 0.2, 1e-15));
        let q = problem2_with(0.5, 2.0);
        for (x, y) in [(0.1, 0.2), (0.7, 0.4)] {
            let want = (-(x - 0.5f64).powi(2) / 0.5 - (y - 0.5f64).powi(2) / 2.0).exp();
            assert!(close(q.exact([x, y, 0.0], 0.0), want, 1e-15));
        }
    }

    #[test]
    fn problem3_values() {
        let p = problem3();
        assert_eq!(p.exact([0.0, 0.0, 0.0], 0.0), 0.5);
        assert!(close(p.exact([0.5, 0.5, 0.0], 0.5), 1.0 / (1.0 + 0.25f64.exp()), 1e-15));
        assert!((problem3_with(0.5).exact([0.5, 0.5, 0.0], 0.5) - 0.37754).abs() < 1e-5);
        assert!(close(p.exact([0.2, 0.7, 0.0], 0.3), p.exact([0.6, 0.3, 0.0], 0.3), 1e-15));
        assert_eq!(p.coefficients.diffusion[0], 1.0);
    }

    #[test]
    fn problem4_values() {
        let p = problem4();
        assert_eq!(p.exact([0.5; 3], 0.0), 1.0);
        // The peak has travelled to (0.75, 0.75, 0.75) by t = 0.25.
        assert!(close(p.exact([0.75; 3], 0.25), 2f64.powf(-1.5), 1e-15));
        let want = (-3.0 * 0.25f64.powi(2)).exp();
        assert!(close(p.exact([0.75; 3], 0.0), want, 1e-15));
    }

    /// Checks `u_t + V·∇u − Σ D u_aa = 0` (or the Burgers form) by central
    /// differences of the closed-form solution.
    #[test]
    fn exact_solutions_satisfy_their_equations() {
        let h = 1e-4;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for p in all_problems() {
            for _ in 0..10 {
                let mut x = [0.0; 3];
                for a in 0..p.dim {
                    x[a] = rng.gen_range(0.1..0.9);
                }
                let t = rng.gen_range(0.05..0.2);
                let u = p.exact(x, t);
                let ut = (p.exact(x, t + h) - p.exact(x, t - h)) / (2.0 * h);
                let mut lhs = ut;
                for a in 0..p.dim {
                    let mut xp = x;
                    let mut xm = x;
                    xp[a] += h;
                    xm[a] -= h;
                    let d1 = (p.exact(xp, t) - p.exact(xm, t)) / (2.0 * h);
                    let d2 = (p.exact(xp, t) - 2.0 * u + p.exact(xm, t)) / (h * h);
                    let adv = if p.nonlinear { u } else { p.coefficients.velocity[a] };
                    lhs += adv * d1 - p.coefficients.diffusion[a] * d2;
                }
                assert!(lhs.abs() < 1e-5, "{}: residual {lhs}", p.name);
            }
        }
    }

    #[test]
    fn gradients_match_differences() {
        let h = 1e-6;
        for p in all_problems() {
            let x = [0.31, 0.62, 0.47];
            let g = p.gradient(x, 0.13);
            for a in 0..p.dim {
                let mut xp = x;
                let mut xm = x;
                xp[a] += h;
                xm[a] -= h;
                let fd = (p.exact(xp, 0.13) - p.exact(xm, 0.13)) / (2.0 * h);
                assert!((fd - g[a]).abs() < 1e-7, "{} axis {a}", p.name);
            }
        }
    }

    #[test]
    fn zeroth_partial_is_initial_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in all_problems() {
            for _ in 0..100 {
                let mut x = [0.0; 3];
                for a in 0..p.dim {
                    x[a] = rng.gen_range(0.0..1.0);
                }
                let v = p.initial_partial(x, [0, 0, 0]).unwrap();
                assert!((v - p.exact(x, 0.0)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn taylor_coefficients_reconstruct_initial_data() {
        for p in all_problems() {
            let order = 24;
            let c = [0.4, 0.55, 0.5];
            let off = [0.07, -0.05, 0.04];
            let mut x = c;
            for a in 0..p.dim {
                x[a] += off[a];
            }
            let sum: f64 = if p.dim == 2 {
                let coeffs = p.initial_taylor_2d([c[0], c[1]], order).unwrap();
                Triangle::new(order)
                    .iter()
                    .zip(&coeffs)
                    .map(|((k, q), v)| v * off[0].powi(k as i32) * off[1].powi(q as i32))
                    .sum()
            } else {
                let coeffs = p.initial_taylor_3d(c, order).unwrap();
                Tetra::new(order)
                    .iter()
                    .zip(&coeffs)
                    .map(|((k, q, h), v)| {
                        v * off[0].powi(k as i32) * off[1].powi(q as i32) * off[2].powi(h as i32)
                    })
                    .sum()
            };
            assert!((sum - p.exact(x, 0.0)).abs() < 1e-13, "{}", p.name);
        }
    }

    #[test]
    fn second_partials_match_differences() {
        let h = 1e-4;
        for p in all_problems() {
            let x = [0.3, 0.6, 0.45];
            for a in 0..p.dim {
                let mut m = [0; 3];
                m[a] = 2;
                let mut xp = x;
                let mut xm = x;
                xp[a] += h;
                xm[a] -= h;
                let fd = (p.exact(xp, 0.0) - 2.0 * p.exact(x, 0.0) + p.exact(xm, 0.0)) / (h * h);
                let v = p.initial_partial(x, m).unwrap();
                assert!((fd - v).abs() < 1e-5 * v.abs().max(1.0), "{} axis {a}", p.name);
            }
        }
    }

    #[test]
    fn boundary_matches_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for p in all_problems() {
            for face in Face::all(p.dim) {
                for _ in 0..20 {
                    let mut x = [0.0; 3];
                    for a in 0..p.dim {
                        x[a] = rng.gen_range(p.lo[a]..p.hi[a]);
                    }
                    let a = face.axis.index();
                    x[a] = if face.upper { p.hi[a] } else { p.lo[a] };
                    let t = rng.gen_range(0.0..p.t_final);
                    let b = p.boundary(face, x, t);
                    assert!((b.value - p.exact(x, t)).abs() < 1e-13);
                    assert_eq!(b.tangential(face, p.dim).len(), p.dim - 1);
                }
            }
        }
    }

    #[test]
    fn problem1_is_symmetric() {
        let p = problem1();
        for (x, y, t) in [(0.1, 0.7, 0.05), (0.33, 0.9, 0.2)] {
            assert_eq!(p.exact([x, y, 0.0], t), p.exact([y, x, 0.0], t));
        }
    }

    #[test]
    fn manufactured_series_is_finite() {
        let p = manufactured_2d(
            Polynomial::from_terms(&[([3, 0, 0], 1.0)]),
            PdeCoefficients::new_2d([1.0, 0.0], [1.0, 1.0]),
            1.0,
        );
        let ExactSolution::Manufactured { series } = p.exact_solution() else {
            panic!("wrong family");
        };
        assert_eq!(series.len(), 4);
        let q = manufactured_2d(
            Polynomial::from_terms(&[([1, 1, 0], 1.0)]),
            PdeCoefficients::heat(1.0),
            1.0,
        );
        assert_eq!(q.exact([0.3, 0.5, 0.0], 0.7), 0.15);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        assert!(matches!(problem4().initial_taylor_2d([0.5, 0.5], 3), Err(Error::Oracle(_))));
        assert!(matches!(problem1().initial_taylor_3d([0.5; 3], 3), Err(Error::Oracle(_))));
        assert!(problem3().with_coefficients(PdeCoefficients::heat(1.0)).is_err());
    }
}
