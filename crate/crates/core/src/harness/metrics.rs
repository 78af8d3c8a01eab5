//! Error measures against a reference solution.
//!
//! The reference derivative of the benchmark is sharply peaked at the origin,
//! so the volume samples here are graded geometrically towards every
//! breakpoint of the exponent and use high-order Gauss rules on each piece.
//! This quadrature is unrelated to the one inside the solver.

use crate::broken_space::{BrokenFunction, VolumeSamples};
use crate::error::Result;
use crate::exact::ExactSolution;
use crate::exponent::{luxemburg_norm, ExponentField, WeightedSampleSet};
use crate::mesh::Mesh1D;
use crate::quadrature::QuadratureRule;

const GRADING_LEVELS: i32 = 44;
const POINTS_PER_PIECE: usize = 12;

/// Samples on every element, split at `breaks` and graded geometrically
/// towards each of them.
pub fn graded_samples(mesh: &Mesh1D, breaks: &[f64]) -> VolumeSamples {
    let rule = QuadratureRule::gauss_legendre(POINTS_PER_PIECE);
    let mut set = WeightedSampleSet::default();
    let mut elements = Vec::new();
    let mut spacing: Vec<f64> = breaks.windows(2).map(|w| w[1] - w[0]).collect();
    spacing.push(mesh.length());
    for e in 0..mesh.n_elements() {
        let (a, b) = mesh.element(e);
        let mut cuts = vec![a, b];
        for (i, &z) in breaks.iter().enumerate() {
            let reach = spacing[i].min(if i > 0 { spacing[i - 1] } else { f64::INFINITY }).min(mesh.length());
            for j in 0..=GRADING_LEVELS {
                let d = reach * 0.5f64.powi(j);
                for x in [z - d, z, z + d] {
                    if x > a && x < b {
                        cuts.push(x);
                    }
                }
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        for w in cuts.windows(2) {
            for (x, wt) in rule.mapped(w[0], w[1]) {
                set.push(x, wt);
                elements.push(e);
            }
        }
    }
    VolumeSamples { set, elements }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorNorms {
    /// Largest error over all element-local nodes (both traces at faces).
    pub max_nodal: f64,
    pub l1: f64,
    /// `||u_h - u||_{p}`.
    pub lp: f64,
    /// `||grad u_h - u'||_{p}` with the elementwise gradient.
    pub grad_lp: f64,
}

/// What a discrete solution is measured against.
#[derive(Debug, Clone)]
pub enum Reference<'a> {
    Exact(&'a ExactSolution),
    /// A solution on a finer mesh; at its own nodes the trace from the
    /// right is used.
    Discrete(&'a BrokenFunction),
}

impl Reference<'_> {
    /// Value and derivative at `x`.
    pub fn eval(&self, x: f64) -> Result<(f64, f64)> {
        match self {
            Reference::Exact(u) => u.eval(x),
            Reference::Discrete(u) => {
                let e = u.mesh().locate(x)?;
                Ok((u.element_value(e, x), u.element_derivative(e, x)))
            }
        }
    }
}

pub fn error_norms(uh: &BrokenFunction, exact: &ExactSolution, p: &ExponentField) -> Result<ErrorNorms> {
    error_norms_against(uh, &Reference::Exact(exact), p)
}

pub fn error_norms_against(uh: &BrokenFunction, reference: &Reference<'_>, p: &ExponentField) -> Result<ErrorNorms> {
    let mesh = uh.mesh();
    let mut max_nodal: f64 = 0.0;
    for e in 0..mesh.n_elements() {
        for (j, v) in uh.local(e).iter().enumerate() {
            max_nodal = max_nodal.max((v - reference.eval(uh.node_x(e, j))?.0).abs());
        }
    }
    let samples = graded_samples(mesh, &p.breakpoints());
    let mut diff = Vec::with_capacity(samples.set.len());
    let mut gdiff = Vec::with_capacity(samples.set.len());
    for (&x, &e) in samples.set.points().iter().zip(&samples.elements) {
        let (u, du) = reference.eval(x)?;
        diff.push(uh.element_value(e, x) - u);
        gdiff.push(uh.element_derivative(e, x) - du);
    }
    let l1 = samples.set.weights().iter().zip(&diff).map(|(w, d)| w * d.abs()).sum();
    let lp = luxemburg_norm(&samples.set, &diff, p)?;
    let grad_lp = luxemburg_norm(&samples.set, &gdiff, p)?;
    Ok(ErrorNorms { max_nodal, l1, lp, grad_lp })
}

/// `log(e_i / e_{i+1}) / log(h_i / h_{i+1})`.
pub fn empirical_order(h0: f64, e0: f64, h1: f64, e1: f64) -> f64 {
    (e0 / e1).ln() / (h0 / h1).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::broken_space::Continuity;
    use crate::mesh::BoundaryKind::*;
    use std::sync::Arc;

    #[test]
    fn graded_samples_cover_the_domain() {
        let mesh = Mesh1D::uniform(-1.0, 1.0, 7, Dirichlet, Dirichlet).unwrap();
        let s = graded_samples(&mesh, &[-0.01, 0.0, 0.01]);
        assert!((s.set.total_weight() - 2.0).abs() < 1e-13);
    }

    #[test]
    fn interpolant_of_the_identity_has_no_error() {
        let exact = ExactSolution::new(0.2, 0.5, 1.0).unwrap();
        let mesh = Arc::new(Mesh1D::uniform(-1.0, 1.0, 5, Dirichlet, Dirichlet).unwrap());
        let uh = BrokenFunction::interpolate(mesh, 1, Continuity::Continuous, |x| x).unwrap();
        let e = error_norms(&uh, &exact, exact.exponent()).unwrap();
        assert!(e.max_nodal < 1e-14 && e.l1 < 1e-14 && e.grad_lp < 1e-12);
    }

    #[test]
    fn orders() {
        assert!((empirical_order(0.1, 1e-2, 0.05, 2.5e-3) - 2.0).abs() < 1e-12);
    }
}
