//! Product quadrature over chart domains: trapezoidal rule on periodic
//! axes (spectrally accurate for smooth periodic integrands) and
//! Gauss-Legendre on non-periodic axes. Node evaluation parallelizes
//! over nodes; the reduction is an order-deterministic pairwise sum so
//! results do not depend on the thread count.

use rayon::prelude::*;

use crate::error::{HopfError, Result};
use crate::surfaces::chart::Chart;

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on
/// the Legendre polynomial.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        // Chebyshev-like initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence for P_n and P'_n at x.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// One axis of nodes and weights in chart coordinates.
fn axis_rule(a: f64, b: f64, n: usize, periodic: bool) -> (Vec<f64>, Vec<f64>) {
    if periodic {
        let h = (b - a) / n as f64;
        let nodes = (0..n).map(|j| a + j as f64 * h).collect();
        let weights = vec![h; n];
        (nodes, weights)
    } else {
        let (x, w) = gauss_legendre(n);
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let nodes = x.iter().map(|&t| mid + half * t).collect();
        let weights = w.iter().map(|&t| half * t).collect();
        (nodes, weights)
    }
}

/// Tensor-product grid of quadrature nodes for the parameter measure
/// du_1 ... du_{n-1}.
#[derive(Debug, Clone)]
pub struct QuadGrid {
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl QuadGrid {
    pub fn for_chart(chart: &Chart, resolution: &[usize]) -> Result<QuadGrid> {
        let d = chart.param_dim();
        if resolution.len() != d {
            return Err(HopfError::Input(format!(
                "resolution has {} axes, chart has {d}",
                resolution.len()
            )));
        }
        if resolution.iter().any(|&r| r < 8) {
            return Err(HopfError::Resolution(
                "resolution must be at least 8 nodes per axis".into(),
            ));
        }
        let dom = chart.domain();
        let per = chart.periodic();
        let axes: Vec<(Vec<f64>, Vec<f64>)> = (0..d)
            .map(|i| axis_rule(dom[i].0, dom[i].1, resolution[i], per[i]))
            .collect();
        let total: usize = resolution.iter().product();
        let mut points = Vec::with_capacity(total);
        let mut weights = Vec::with_capacity(total);
        let mut idx = vec![0usize; d];
        loop {
            let mut p = Vec::with_capacity(d);
            let mut w = 1.0;
            for i in 0..d {
                p.push(axes[i].0[idx[i]]);
                w *= axes[i].1[idx[i]];
            }
            points.push(p);
            weights.push(w);
            // odometer increment
            let mut i = d;
            loop {
                if i == 0 {
                    return Ok(QuadGrid { points, weights });
                }
                i -= 1;
                idx[i] += 1;
                if idx[i] < resolution[i] {
                    break;
                }
                idx[i] = 0;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Integrate f(u) du over the grid, parallel over nodes with a
    /// deterministic pairwise reduction.
    pub fn integrate<F>(&self, f: F) -> Result<f64>
    where
        F: Fn(&[f64]) -> Result<f64> + Sync,
    {
        let values: Vec<Result<f64>> = self
            .points
            .par_iter()
            .zip(self.weights.par_iter())
            .map(|(p, &w)| f(p).map(|v| v * w))
            .collect();
        let mut vals = Vec::with_capacity(values.len());
        for v in values {
            vals.push(v?);
        }
        Ok(pairwise_sum(&vals))
    }
}

/// Order-deterministic pairwise summation.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        2 => v[0] + v[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
        }
    }
}

/// Halve a resolution vector for Richardson-style error estimates,
/// clamped at the minimum node count.
pub fn halve_resolution(resolution: &[usize]) -> Vec<usize> {
    resolution.iter().map(|&r| (r / 2).max(8)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_exactness() {
        // degree-(2n-1) polynomials integrate exactly
        let (x, w) = gauss_legendre(5);
        let integral: f64 = x
            .iter()
            .zip(&w)
            .map(|(&xi, &wi)| wi * (xi.powi(8) + 3.0 * xi.powi(3) - xi + 2.0))
            .sum();
        assert_relative_eq!(integral, 2.0 / 9.0 + 4.0, epsilon = 1e-13);
        let wsum: f64 = w.iter().sum();
        assert_relative_eq!(wsum, 2.0, epsilon = 1e-14);
    }

    #[test]
    fn pairwise_sum_matches_naive() {
        let v: Vec<f64> = (0..1000).map(|i| (i as f64).sin()).collect();
        let naive: f64 = v.iter().sum();
        assert_relative_eq!(pairwise_sum(&v), naive, epsilon = 1e-10);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }
}
