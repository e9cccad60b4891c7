//! Gauss–Legendre panel rules and simple grid integrators.

use gauss_quad::GaussLegendre;
use num_complex::Complex64;

/// Nodes and weights of a composite rule.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    pub fn integrate_complex<F: FnMut(f64) -> Complex64>(&self, mut f: F) -> Complex64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| f(x) * w).sum()
    }

    /// Weighted squared norm of values sampled at the nodes.
    pub fn norm_sq(&self, values: &[Complex64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v.norm_sqr()).sum()
    }
}

/// Gauss–Legendre rule on [-1, 1], nodes ascending.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let order = order.max(2);
    let mut pairs = GaussLegendre::new(order).expect("order >= 2").into_node_weight_pairs();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Composite Gauss–Legendre rule over consecutive breakpoints.
pub fn composite(breaks: &[f64], order: usize) -> QuadGrid {
    let (x, w) = gauss_legendre(order);
    let mut nodes = Vec::with_capacity(breaks.len().saturating_sub(1) * x.len());
    let mut weights = Vec::with_capacity(nodes.capacity());
    for pair in breaks.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        if hi <= lo {
            continue;
        }
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        for (xi, wi) in x.iter().zip(&w) {
            nodes.push(mid + half * xi);
            weights.push(half * wi);
        }
    }
    QuadGrid { nodes, weights }
}

/// Breakpoints splitting [lo, hi] into `n` equal panels.
pub fn uniform_breaks(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let n = n.max(1);
    (0..=n)
        .map(|i| {
            if i == n {
                hi
            } else {
                lo + (hi - lo) * i as f64 / n as f64
            }
        })
        .collect()
}

/// Breakpoints covering [lo, hi] with panels no wider than `max_width`,
/// always including each interior point of `fixed`.
pub fn breaks_with_fixed(lo: f64, hi: f64, max_width: f64, fixed: &[f64]) -> Vec<f64> {
    let mut anchors = vec![lo];
    anchors.extend(fixed.iter().copied().filter(|&p| p > lo && p < hi));
    anchors.push(hi);
    anchors.sort_by(f64::total_cmp);
    anchors.dedup();
    let mut out = vec![lo];
    for pair in anchors.windows(2) {
        let n = ((pair[1] - pair[0]) / max_width).ceil().max(1.0) as usize;
        out.extend(uniform_breaks(pair[0], pair[1], n).into_iter().skip(1));
    }
    out
}

/// Composite Gauss–Legendre integral of a complex function on [lo, hi].
pub fn integrate_complex<F: FnMut(f64) -> Complex64>(lo: f64, hi: f64, panels: usize, order: usize, f: F) -> Complex64 {
    composite(&uniform_breaks(lo, hi, panels), order).integrate_complex(f)
}

/// Trapezoid rule on an arbitrary increasing grid.
pub fn trapezoid(grid: &[f64], values: &[f64]) -> f64 {
    grid.windows(2)
        .zip(values.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

pub fn trapezoid_complex(grid: &[f64], values: &[Complex64]) -> Complex64 {
    grid.windows(2)
        .zip(values.windows(2))
        .map(|(x, y)| (y[0] + y[1]) * (0.5 * (x[1] - x[0])))
        .sum()
}
