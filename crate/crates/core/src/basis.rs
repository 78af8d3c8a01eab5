//! Nodal Lagrange bases on the reference element [-1, 1].
//!
//! Degree `k >= 1` uses the `k + 1` Gauss–Lobatto points, so the first and last
//! nodes sit on the element endpoints and traces are plain coefficient reads.
//! Degree 0 uses the midpoint.

use crate::quadrature::QuadratureRule;

#[derive(Debug, Clone, PartialEq)]
pub struct LagrangeBasis {
    degree: usize,
    nodes: Vec<f64>,
    bary: Vec<f64>,
    /// `diff[i * n + j] = l_j'(x_i)`
    diff: Vec<f64>,
}

impl LagrangeBasis {
    pub fn new(degree: usize) -> Self {
        let nodes = if degree == 0 {
            vec![0.0]
        } else {
            QuadratureRule::gauss_lobatto(degree + 1).points
        };
        let n = nodes.len();
        let bary: Vec<f64> = (0..n)
            .map(|j| {
                1.0 / (0..n)
                    .filter(|&m| m != j)
                    .map(|m| nodes[j] - nodes[m])
                    .product::<f64>()
            })
            .collect();
        let mut diff = vec![0.0; n * n];
        for i in 0..n {
            let mut diag = 0.0;
            for j in 0..n {
                if i != j {
                    let d = (bary[j] / bary[i]) / (nodes[i] - nodes[j]);
                    diff[i * n + j] = d;
                    diag -= d;
                }
            }
            diff[i * n + i] = diag;
        }
        Self { degree, nodes, bary, diff }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Values of all basis functions at reference point `xi`.
    pub fn values(&self, xi: f64) -> Vec<f64> {
        let n = self.len();
        if let Some(j) = self.nodes.iter().position(|&x| x == xi) {
            let mut out = vec![0.0; n];
            out[j] = 1.0;
            return out;
        }
        let terms: Vec<f64> = (0..n).map(|j| self.bary[j] / (xi - self.nodes[j])).collect();
        let denom: f64 = terms.iter().sum();
        terms.into_iter().map(|t| t / denom).collect()
    }

    /// Reference derivatives `d/dxi` of all basis functions at `xi`.
    pub fn derivatives(&self, xi: f64) -> Vec<f64> {
        let n = self.len();
        let vals = self.values(xi);
        (0..n)
            .map(|j| (0..n).map(|i| self.diff[i * n + j] * vals[i]).sum())
            .collect()
    }

    /// Evaluates the polynomial with nodal `coeffs` at `xi`.
    ///
    /// Written relative to the first coefficient so that constants come back
    /// exactly.
    pub fn interpolate(&self, coeffs: &[f64], xi: f64) -> f64 {
        let c0 = coeffs[0];
        c0 + self.values(xi).iter().zip(coeffs).map(|(a, b)| a * (b - c0)).sum::<f64>()
    }

    /// Reference derivative of the polynomial with nodal `coeffs` at `xi`.
    pub fn interpolate_derivative(&self, coeffs: &[f64], xi: f64) -> f64 {
        self.derivatives(xi).iter().zip(coeffs).map(|(a, b)| a * b).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_of_unity_and_zero_derivative_sum() {
        for k in 0..7 {
            let b = LagrangeBasis::new(k);
            for &xi in &[-0.93, -0.2, 0.0, 0.41, 1.0] {
                let s: f64 = b.values(xi).iter().sum();
                assert!((s - 1.0).abs() < 1e-13);
                let d: f64 = b.derivatives(xi).iter().sum();
                assert!(d.abs() < 1e-11, "k={k} d={d}");
            }
        }
    }

    #[test]
    fn reproduces_polynomials() {
        let b = LagrangeBasis::new(3);
        let f = |x: f64| 2.0 * x * x * x - x + 0.5;
        let df = |x: f64| 6.0 * x * x - 1.0;
        let coeffs: Vec<f64> = b.nodes().iter().map(|&x| f(x)).collect();
        for &xi in &[-0.77, 0.1, 0.9] {
            assert!((b.interpolate(&coeffs, xi) - f(xi)).abs() < 1e-13);
            assert!((b.interpolate_derivative(&coeffs, xi) - df(xi)).abs() < 1e-12);
        }
    }

    #[test]
    fn endpoints_are_nodes() {
        let b = LagrangeBasis::new(2);
        assert_eq!(b.nodes(), &[-1.0, 0.0, 1.0]);
        assert_eq!(b.values(-1.0), vec![1.0, 0.0, 0.0]);
    }
}
