//! The lifting of interface jumps into a broken polynomial field.
//!
//! `R_h(u)` is defined weakly by
//! `int R_h(u) phi dx = -sum_e [u](x_e) {phi}(x_e)` for all broken `phi` of
//! degree `l`. Test functions live on one element, so the neighbour's trace in
//! the average is zero and the problem splits into element mass systems. On an
//! element of length `h`, with reference mass matrix `M` and basis `phi`,
//!
//! `R_h(u)(xi) = -(1/h) sum_{faces f of K} [u](x_f) phi(xi)^T M^{-1} phi(eta_f)`
//!
//! where `eta_f = -1` for the left face and `+1` for the right one. Boundary
//! faces carry no jump.

use crate::basis::LagrangeBasis;
use crate::broken_space::{BrokenFunction, Continuity};
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::exponent::ExponentField;
use crate::mesh::End;
use crate::quadrature::QuadratureRule;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LiftingConfig {
    pub l: usize,
}

impl LiftingConfig {
    pub fn new(l: usize) -> Self {
        Self { l }
    }
}

/// Reference data for lifts of degree `l`: `M^{-1} phi(-1)` and `M^{-1} phi(1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftingKernel {
    basis: LagrangeBasis,
    left: Vec<f64>,
    right: Vec<f64>,
}

impl LiftingKernel {
    pub fn new(l: usize) -> Result<Self> {
        let basis = LagrangeBasis::new(l);
        let n = basis.len();
        let rule = QuadratureRule::gauss_legendre(l + 1);
        let mut mass = DenseMatrix::zeros(n, n);
        for (&x, &w) in rule.points.iter().zip(&rule.weights) {
            let phi = basis.values(x);
            for i in 0..n {
                for j in 0..n {
                    mass[(i, j)] += w * phi[i] * phi[j];
                }
            }
        }
        let inv = mass.inverse()?;
        let left = inv.matvec(&basis.values(-1.0));
        let right = inv.matvec(&basis.values(1.0));
        Ok(Self { basis, left, right })
    }

    pub fn degree(&self) -> usize {
        self.basis.degree()
    }

    pub fn basis(&self) -> &LagrangeBasis {
        &self.basis
    }

    /// Nodal coefficients of `M^{-1} phi(eta)` for the face at `end`.
    pub fn column(&self, end: End) -> &[f64] {
        match end {
            End::Left => &self.left,
            End::Right => &self.right,
        }
    }

    /// `K(xi, eta) = phi(xi)^T M^{-1} phi(eta)` with `eta = -1` or `1`.
    pub fn value(&self, xi: f64, end: End) -> f64 {
        self.basis.interpolate(self.column(end), xi)
    }
}

/// Nodal coefficients of `R_h(u)` on element `e`.
fn element_lift(kernel: &LiftingKernel, u: &BrokenFunction, e: usize) -> Vec<f64> {
    let mesh = u.mesh();
    let h = mesh.element_len(e);
    let mut out = vec![0.0; kernel.basis.len()];
    for (node, end) in [(e, End::Left), (e + 1, End::Right)] {
        if !mesh.is_interior_face(node) {
            continue;
        }
        let jump = u.trace(node - 1, End::Right) - u.trace(node, End::Left);
        if jump == 0.0 {
            continue;
        }
        for (o, c) in out.iter_mut().zip(kernel.column(end)) {
            *o -= jump * c / h;
        }
    }
    out
}

/// `R_h(u)` as a broken function of degree `cfg.l`.
pub fn lift(u: &BrokenFunction, cfg: LiftingConfig) -> Result<BrokenFunction> {
    let kernel = LiftingKernel::new(cfg.l)?;
    lift_with(&kernel, u)
}

pub fn lift_with(kernel: &LiftingKernel, u: &BrokenFunction) -> Result<BrokenFunction> {
    let mut coeffs = Vec::with_capacity(u.mesh().n_elements() * kernel.basis.len());
    for e in 0..u.mesh().n_elements() {
        coeffs.extend(element_lift(kernel, u, e));
    }
    BrokenFunction::new(u.mesh().clone(), kernel.degree(), Continuity::Broken, coeffs)
}

/// Largest residual of the defining identity over all element-local basis
/// functions of degree `cfg.l`:
/// `|int R phi dx + sum_e [u](x_e) {phi}(x_e)|`.
pub fn verify_weak_identity(u: &BrokenFunction, r: &BrokenFunction, cfg: LiftingConfig) -> Result<f64> {
    if u.mesh() != r.mesh() {
        return Err(Error::MeshMismatch);
    }
    let mesh = u.mesh();
    let basis = LagrangeBasis::new(cfg.l);
    let rule = QuadratureRule::gauss_legendre(r.degree().max(cfg.l) + 1);
    let mut worst: f64 = 0.0;
    for e in 0..mesh.n_elements() {
        let (a, b) = mesh.element(e);
        let half = 0.5 * (b - a);
        for j in 0..basis.len() {
            let mut volume = 0.0;
            for (&xi, &w) in rule.points.iter().zip(&rule.weights) {
                let x = a + half * (xi + 1.0);
                volume += w * half * r.element_value(e, x) * basis.values(xi)[j];
            }
            let mut faces = 0.0;
            for (node, xi) in [(e, -1.0), (e + 1, 1.0)] {
                if mesh.is_interior_face(node) {
                    faces += u.jump(node)? * 0.5 * basis.values(xi)[j];
                }
            }
            worst = worst.max((volume + faces).abs());
        }
    }
    Ok(worst)
}

/// `||R_h(u)||_{p} / ||h^{-1/p'} [u]||_{p, interior faces}`.
pub fn lifting_bound_ratio(u: &BrokenFunction, p: &ExponentField, cfg: LiftingConfig) -> Result<f64> {
    if u.jumps().iter().all(|&j| j == 0.0) {
        return Err(Error::UndefinedRatio("every jump is zero".into()));
    }
    let r = lift(u, cfg)?;
    let num = r.lp_norm(p)?;
    let den = u.jump_norm(p)?;
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{BoundaryKind::*, Mesh1D};
    use crate::Side;
    use std::sync::Arc;

    fn two_elements() -> BrokenFunction {
        let mesh = Arc::new(Mesh1D::new(vec![0.0, 1.0, 2.0], Dirichlet, Dirichlet).unwrap());
        BrokenFunction::new(mesh, 1, Continuity::Broken, vec![0.0, 0.0, 1.0, 1.0]).unwrap()
    }

    #[test]
    fn reference_kernel_for_linears() {
        let k = LiftingKernel::new(1).unwrap();
        assert!((k.value(-1.0, End::Left) - 2.0).abs() < 1e-14);
        assert!((k.value(1.0, End::Left) + 1.0).abs() < 1e-14);
        let k0 = LiftingKernel::new(0).unwrap();
        assert!((k0.value(0.3, End::Right) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn hand_example() {
        let u = two_elements();
        let r = lift(&u, LiftingConfig::new(1)).unwrap();
        for x in [0.0, 0.25, 0.9, 1.0] {
            let got = r.evaluate(x, Side::Element(0)).unwrap();
            assert!((got - (3.0 * x - 1.0)).abs() < 1e-13);
        }
        for x in [1.0, 1.5, 2.0] {
            let got = r.evaluate(x, Side::Element(1)).unwrap();
            assert!((got - (5.0 - 3.0 * x)).abs() < 1e-13);
        }
        assert!((r.integral() - 1.0).abs() < 1e-13);
        assert!(verify_weak_identity(&u, &r, LiftingConfig::new(1)).unwrap() < 1e-13);
    }

    #[test]
    fn hand_example_ratio() {
        let p2 = ExponentField::constant(2.0).unwrap();
        let ratio = lifting_bound_ratio(&two_elements(), &p2, LiftingConfig::new(1)).unwrap();
        assert!((ratio - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn continuous_functions_lift_to_zero() {
        let mesh = Arc::new(Mesh1D::uniform(-1.0, 1.0, 5, Dirichlet, Dirichlet).unwrap());
        let u = BrokenFunction::interpolate(mesh, 2, Continuity::Continuous, |x| x.sin()).unwrap();
        let r = lift(&u, LiftingConfig::new(2)).unwrap();
        assert!(r.coeffs().iter().all(|&c| c == 0.0));
        let p2 = ExponentField::constant(2.0).unwrap();
        assert!(matches!(lifting_bound_ratio(&u, &p2, LiftingConfig::new(1)), Err(Error::UndefinedRatio(_))));
    }

    #[test]
    fn degree_zero_closed_form() {
        let mesh = Arc::new(Mesh1D::new(vec![0.0, 0.2, 0.7, 1.0], Dirichlet, Dirichlet).unwrap());
        let u = BrokenFunction::new(mesh.clone(), 0, Continuity::Broken, vec![1.0, -2.0, 0.5]).unwrap();
        let r = lift(&u, LiftingConfig::new(0)).unwrap();
        let jumps = u.jumps();
        let expect = [
            -jumps[0] / (2.0 * 0.2),
            -(jumps[0] + jumps[1]) / (2.0 * 0.5),
            -jumps[1] / (2.0 * 0.3),
        ];
        for (e, want) in expect.iter().enumerate() {
            assert!((r.local(e)[0] - want).abs() < 1e-12 * want.abs().max(1.0));
        }
    }

    #[test]
    fn scaling_is_exact() {
        let u = two_elements();
        let r1 = lift(&u, LiftingConfig::new(1)).unwrap();
        let r2 = lift(&u.scaled(2.0), LiftingConfig::new(1)).unwrap();
        for (a, b) in r1.coeffs().iter().zip(r2.coeffs()) {
            assert_eq!(2.0 * a, *b);
        }
    }
}
