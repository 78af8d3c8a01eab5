//! The continuous piecewise-linear quasi-interpolant `Q_h(u) = sum_z pi_z(u) lambda_z`.
//!
//! `pi_z(u)` is the mean of `u` over the patch `T_z` of elements touching the
//! node `z`. In one dimension the exponents involved in the error bounds
//! reduce so that the volume error scales like `h` and boundary errors like
//! `h^0` times the local seminorm.

use std::sync::Arc;

use crate::broken_space::{default_norm_points, patch_samples, volume_samples, BrokenFunction, Continuity};
use crate::error::Result;
use crate::exponent::{luxemburg_norm, modular, ExponentField};
use crate::mesh::End;
use crate::quadrature::QuadratureRule;

/// Mean value of `u` over the elements touching node `z`.
pub fn project_node(u: &BrokenFunction, z: usize) -> f64 {
    let mesh = u.mesh();
    let patch = mesh.node_patch(z);
    let rule = QuadratureRule::gauss_legendre(u.degree() / 2 + 1);
    // shifting by one sampled value keeps constants exact in floating point
    let shift = u.local(patch[0])[0];
    let mut integral = 0.0;
    for &e in &patch {
        let (a, b) = mesh.element(e);
        integral += rule.integrate(a, b, |x| u.element_value(e, x) - shift);
    }
    shift + integral / mesh.patch_diameter(&patch)
}

/// Nodal values `pi_z(u)` with the patch each one came from.
#[derive(Debug, Clone, PartialEq)]
pub struct NodalProjectors {
    pub values: Vec<f64>,
    pub patches: Vec<Vec<usize>>,
}

pub fn nodal_projectors(u: &BrokenFunction) -> NodalProjectors {
    let mesh = u.mesh();
    NodalProjectors {
        values: (0..mesh.n_nodes()).map(|z| project_node(u, z)).collect(),
        patches: (0..mesh.n_nodes()).map(|z| mesh.node_patch(z)).collect(),
    }
}

/// `Q_h(u)` as a continuous degree-one function on `u`'s mesh.
pub fn reconstruct(u: &BrokenFunction) -> Result<BrokenFunction> {
    let values = nodal_projectors(u).values;
    BrokenFunction::new(Arc::clone(u.mesh()), 1, Continuity::Continuous, values)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElementError {
    pub element: usize,
    pub h: f64,
    /// `||u - Q_h u||_{q, K}`.
    pub error: f64,
    /// `|u|_{W^{1,p}(T_K)}`.
    pub seminorm: f64,
    /// `error / (h^{1/q_- - 1/p_- + 1} seminorm)`, absent where the seminorm vanishes.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionReport {
    /// `||u - Q_h u||_{q}`.
    pub vol_error: f64,
    /// `int |u - Q_h u|^{q}`.
    pub vol_modular: f64,
    /// `||grad Q_h u||_{p}`.
    pub grad_norm: f64,
    /// `|u|_{W^{1,p}(T_h)}`.
    pub seminorm: f64,
    /// `|u - Q_h u|` at the left and right boundary points.
    pub boundary_errors: [f64; 2],
    pub elements: Vec<ElementError>,
}

pub fn reconstruction_error_report(
    u: &BrokenFunction,
    p: &ExponentField,
    q: &ExponentField,
) -> Result<ReconstructionReport> {
    let mesh = u.mesh();
    let qu = reconstruct(u)?;
    let mut breaks = p.breakpoints();
    breaks.extend(q.breakpoints());
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let points = default_norm_points(u.degree().max(1)) + 2;

    let samples = volume_samples(mesh, points, &breaks);
    let diff: Vec<f64> = u.values_at(&samples).iter().zip(qu.values_at(&samples)).map(|(a, b)| a - b).collect();
    let vol_error = luxemburg_norm(&samples.set, &diff, q)?;
    let vol_modular = modular(&samples.set, &diff, q)?;
    let grad_norm = luxemburg_norm(&samples.set, &qu.derivatives_at(&samples), p)?;
    let seminorm = u.broken_seminorm(p, crate::broken_space::Seminorm::Interior)?;

    let boundary_errors = [End::Left, End::Right].map(|end| (u.boundary_trace(end) - qu.boundary_trace(end)).abs());

    let mut elements = Vec::with_capacity(mesh.n_elements());
    for e in 0..mesh.n_elements() {
        let local = patch_samples(mesh, &[e], points, &breaks);
        let d: Vec<f64> = u.values_at(&local).iter().zip(qu.values_at(&local)).map(|(a, b)| a - b).collect();
        let error = luxemburg_norm(&local.set, &d, q)?;
        let semi = u.patch_seminorm(&mesh.element_patch(e), p)?;
        let (a, b) = mesh.element(e);
        let (q_minus, _) = q.range_on(a, b)?;
        let (p_minus, _) = p.range_on(a, b)?;
        let h = b - a;
        let scale = h.powf(1.0 / q_minus - 1.0 / p_minus + 1.0);
        let ratio = (semi > 0.0).then(|| error / (scale * semi));
        elements.push(ElementError { element: e, h, error, seminorm: semi, ratio });
    }
    Ok(ReconstructionReport { vol_error, vol_modular, grad_norm, seminorm, boundary_errors, elements })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{BoundaryKind::*, Mesh1D};
    use crate::Side;

    fn mesh(n: usize) -> Arc<Mesh1D> {
        Arc::new(Mesh1D::uniform(0.0, 1.0, n, Dirichlet, Dirichlet).unwrap())
    }

    #[test]
    fn constants_are_reproduced() {
        let u = BrokenFunction::interpolate(mesh(5), 2, Continuity::Broken, |_| 5.0).unwrap();
        let q = reconstruct(&u).unwrap();
        assert!(q.coeffs().iter().all(|&v| v == 5.0));
        let p2 = ExponentField::constant(2.0).unwrap();
        let rep = reconstruction_error_report(&u, &p2, &p2).unwrap();
        assert_eq!(rep.vol_error, 0.0);
        assert_eq!(rep.grad_norm, 0.0);
    }

    #[test]
    fn node_means() {
        let u = BrokenFunction::interpolate(mesh(2), 1, Continuity::Continuous, |x| x).unwrap();
        assert!((project_node(&u, 1) - 0.5).abs() < 1e-15);
        let step = BrokenFunction::new(mesh(2), 0, Continuity::Broken, vec![0.0, 1.0]).unwrap();
        let q = reconstruct(&step).unwrap();
        assert_eq!(q.coeffs(), &[0.0, 0.5, 1.0]);
        assert!((q.evaluate(0.25, Side::Right).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn continuous_linears_are_averaged_not_reproduced() {
        let u = BrokenFunction::interpolate(mesh(4), 1, Continuity::Continuous, |x| x * x).unwrap();
        let q = reconstruct(&u).unwrap();
        // first node: mean of x^2-interpolant over [0, 1/4] is 1/32
        assert!((q.coeffs()[0] - 1.0 / 32.0).abs() < 1e-15);
    }
}
