//! Univariate Taylor coefficients and polynomials used by the built-in
//! initial conditions.

use std::collections::BTreeMap;

use crate::error::Axis;
use crate::pde::PdeCoefficients;

/// Taylor coefficients of `sin(π x)` about `c`: `π^j / j! · sin(π c + j π/2)`.
pub fn sine(c: f64, order: usize) -> Vec<f64> {
    let pi = std::f64::consts::PI;
    let base = pi * c;
    let mut scale = 1.0;
    (0..=order)
        .map(|j| {
            if j > 0 {
                scale *= pi / j as f64;
            }
            // sin(base + jπ/2) cycles through sin, cos, -sin, -cos
            let phase = match j % 4 {
                0 => base.sin(),
                1 => base.cos(),
                2 => -base.sin(),
                _ => -base.cos(),
            };
            scale * phase
        })
        .collect()
}

/// Taylor coefficients in `w` of `exp(-(s + w)^2 / sigma)`.
pub fn gaussian(s: f64, sigma: f64, order: usize) -> Vec<f64> {
    let q1 = -2.0 * s / sigma;
    let q2 = -1.0 / sigma;
    let mut a = vec![0.0; order + 1];
    a[0] = (-s * s / sigma).exp();
    for j in 0..order {
        let prev = if j > 0 { a[j - 1] } else { 0.0 };
        a[j + 1] = (q1 * a[j] + 2.0 * q2 * prev) / (j + 1) as f64;
    }
    a
}

/// Taylor coefficients in `w` of `1 / (1 + exp(beta (s + w)))`.
pub fn logistic(s: f64, beta: f64, order: usize) -> Vec<f64> {
    let mut b = vec![0.0; order + 1];
    b[0] = logistic_value(beta * s);
    for j in 0..order {
        let square: f64 = (0..=j).map(|i| b[i] * b[j - i]).sum();
        b[j + 1] = -beta * (b[j] - square) / (j + 1) as f64;
    }
    b
}

/// `1 / (1 + e^z)` without overflow.
pub fn logistic_value(z: f64) -> f64 {
    if z > 0.0 {
        let e = (-z).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + z.exp())
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Sparse polynomial in up to three variables.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Polynomial {
    terms: BTreeMap<[usize; 3], f64>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_terms(terms: &[([usize; 3], f64)]) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(*e, *c);
        }
        p
    }

    pub fn add_term(&mut self, exponents: [usize; 3], coeff: f64) {
        if coeff == 0.0 {
            return;
        }
        let slot = self.terms.entry(exponents).or_default();
        *slot += coeff;
        if *slot == 0.0 {
            self.terms.remove(&exponents);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = ([usize; 3], f64)> + '_ {
        self.terms.iter().map(|(e, c)| (*e, *c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// Highest exponent of a single variable.
    pub fn degree_in(&self, axis: Axis) -> usize {
        self.terms.keys().map(|e| e[axis.index()]).max().unwrap_or(0)
    }

    pub fn eval(&self, x: [f64; 3]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c * x[0].powi(e[0] as i32) * x[1].powi(e[1] as i32) * x[2].powi(e[2] as i32))
            .sum()
    }

    pub fn derivative(&self, axis: Axis) -> Self {
        let a = axis.index();
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            if e[a] > 0 {
                let mut f = *e;
                f[a] -= 1;
                out.add_term(f, c * e[a] as f64);
            }
        }
        out
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            out.add_term(*e, c * s);
        }
        out
    }

    pub fn add(&mut self, other: &Self) {
        for (e, c) in &other.terms {
            self.add_term(*e, *c);
        }
    }

    /// `Σ_a D_a ∂_aa p − V_a ∂_a p` over the first `dim` variables.
    pub fn spatial_operator(&self, coeffs: &PdeCoefficients, dim: usize) -> Self {
        let mut out = Self::zero();
        for axis in Axis::ALL.into_iter().take(dim) {
            let a = axis.index();
            let d1 = self.derivative(axis);
            out.add(&d1.derivative(axis).scaled(coeffs.diffusion[a]));
            out.add(&d1.scaled(-coeffs.velocity[a]));
        }
        out
    }

    /// Coefficient of `ξ^k η^p ζ^h` in the expansion about `center`.
    pub fn shifted_coefficient(&self, center: [f64; 3], multi: [usize; 3]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut v = *c;
                for a in 0..3 {
                    if multi[a] > e[a] {
                        return 0.0;
                    }
                    v *= binomial(e[a], multi[a]) * center[a].powi((e[a] - multi[a]) as i32);
                }
                v
            })
            .sum()
    }
}
