//! Storage order for truncated multivariate Taylor coefficients.
//!
//! Both index sets put the two lowest orders of the last variable first, so
//! the free coefficients of a local expansion form a prefix of the storage.

use crate::error::Axis;

/// Which quantity to evaluate from a local expansion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Derivative {
    Value,
    Dx,
    Dy,
    Dz,
}

impl Derivative {
    pub fn along(axis: Axis) -> Self {
        match axis {
            Axis::X => Derivative::Dx,
            Axis::Y => Derivative::Dy,
            Axis::Z => Derivative::Dz,
        }
    }
}

/// Powers `x^0..=x^order` and their derivatives `d/dx x^j`.
fn powers(x: f64, order: usize, differentiate: bool) -> Vec<f64> {
    let mut pw = vec![1.0; order + 1];
    for j in 1..=order {
        pw[j] = pw[j - 1] * x;
    }
    if !differentiate {
        return pw;
    }
    let mut d = vec![0.0; order + 1];
    for j in 1..=order {
        d[j] = j as f64 * pw[j - 1];
    }
    d
}

/// Index set `{(k, p) : k + p <= K}`, stored row by row in `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triangle {
    order: usize,
    row_start: Vec<usize>,
}

impl Triangle {
    pub fn new(order: usize) -> Self {
        let mut row_start = Vec::with_capacity(order + 2);
        let mut acc = 0;
        for p in 0..=order + 1 {
            row_start.push(acc);
            acc += order + 1 - p.min(order + 1);
        }
        Self { order, row_start }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        (self.order + 1) * (self.order + 2) / 2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn index(&self, k: usize, p: usize) -> Option<usize> {
        (k + p <= self.order).then(|| self.row_start[p] + k)
    }

    /// Caller guarantees `k + p <= order`.
    #[inline]
    pub(crate) fn idx(&self, k: usize, p: usize) -> usize {
        debug_assert!(k + p <= self.order);
        self.row_start[p] + k
    }

    /// Multi-indices in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let order = self.order;
        (0..=order).flat_map(move |p| (0..=order - p).map(move |k| (k, p)))
    }

    /// Monomials `ξ^k η^p` (or a first derivative of them) in storage order.
    pub fn monomials(&self, offset: [f64; 2], deriv: Derivative) -> Vec<f64> {
        let px = powers(offset[0], self.order, deriv == Derivative::Dx);
        let py = powers(offset[1], self.order, deriv == Derivative::Dy);
        if deriv == Derivative::Dz {
            return vec![0.0; self.len()];
        }
        self.iter().map(|(k, p)| px[k] * py[p]).collect()
    }
}

/// Index set `{(k, p, h) : k + p + h <= K}`, stored by `h`, then `p`, then `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tetra {
    order: usize,
    // offsets[h * (order + 1) + p]
    offsets: Vec<usize>,
    len: usize,
}

impl Tetra {
    pub fn new(order: usize) -> Self {
        let stride = order + 1;
        let mut offsets = vec![0; stride * stride];
        let mut acc = 0;
        for h in 0..=order {
            for p in 0..=order - h {
                offsets[h * stride + p] = acc;
                acc += order - h - p + 1;
            }
        }
        Self {
            order,
            offsets,
            len: acc,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn index(&self, k: usize, p: usize, h: usize) -> Option<usize> {
        (k + p + h <= self.order).then(|| self.idx(k, p, h))
    }

    #[inline]
    pub(crate) fn idx(&self, k: usize, p: usize, h: usize) -> usize {
        debug_assert!(k + p + h <= self.order);
        self.offsets[h * (self.order + 1) + p] + k
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let order = self.order;
        (0..=order).flat_map(move |h| {
            (0..=order - h).flat_map(move |p| (0..=order - h - p).map(move |k| (k, p, h)))
        })
    }

    pub fn monomials(&self, offset: [f64; 3], deriv: Derivative) -> Vec<f64> {
        let px = powers(offset[0], self.order, deriv == Derivative::Dx);
        let py = powers(offset[1], self.order, deriv == Derivative::Dy);
        let pz = powers(offset[2], self.order, deriv == Derivative::Dz);
        self.iter().map(|(k, p, h)| px[k] * py[p] * pz[h]).collect()
    }
}
