//! The discrete DG energy `I_h`, the conforming energy `I`, and their gradients.
//!
//! With the volume integral replaced by a quadrature rule, every term of either
//! energy has the form `w |a . x + b|^s` for a sparse row `a` acting on the
//! coefficient vector `x`. [`AffinePowerSum`] stores those rows once per mesh
//! and evaluates values and exact gradients from them.
//!
//! [`eval_discrete`] deliberately does not use the assembled rows. It lifts the
//! jumps, builds `v' + R_h(v)` pointwise and integrates, which gives an
//! independent check on the assembly.

use std::fmt;
use std::sync::Arc;

use crate::basis::LagrangeBasis;
use crate::broken_space::{fmt_float, BrokenFunction, Continuity, VolumeSamples};
use crate::error::{Error, Result};
use crate::exponent::{ExponentField, WeightedSampleSet};
use crate::lifting::{lift, LiftingConfig, LiftingKernel};
use crate::mesh::{BoundaryKind, DirichletData, End, Mesh1D};
use crate::quadrature::QuadratureRule;

pub type DataFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Volume quadrature used inside the energies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VolumeQuadrature {
    /// Composite trapezoid with `panels` panels per element.
    Trapezoid { panels: usize },
    /// Gauss–Legendre with `points` nodes per element.
    Gauss { points: usize },
}

impl VolumeQuadrature {
    pub fn rule(&self) -> QuadratureRule {
        match *self {
            VolumeQuadrature::Trapezoid { panels } => QuadratureRule::trapezoid(panels.max(1)),
            VolumeQuadrature::Gauss { points } => QuadratureRule::gauss_legendre(points.max(1)),
        }
    }

    /// Samples on every element, tagged with their reference coordinate.
    pub fn samples(&self, mesh: &Mesh1D) -> (VolumeSamples, Vec<f64>) {
        let rule = self.rule();
        let mut set = WeightedSampleSet::default();
        let mut elements = Vec::new();
        let mut refs = Vec::new();
        for e in 0..mesh.n_elements() {
            let (a, b) = mesh.element(e);
            let half = 0.5 * (b - a);
            for (&xi, &w) in rule.points.iter().zip(&rule.weights) {
                let x = if xi == -1.0 {
                    a
                } else if xi == 1.0 {
                    b
                } else {
                    0.5 * (a + b) + half * xi
                };
                set.push(x, half * w);
                elements.push(e);
                refs.push(xi);
            }
        }
        (VolumeSamples { set, elements }, refs)
    }
}

impl fmt::Display for VolumeQuadrature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VolumeQuadrature::Trapezoid { panels } => write!(f, "trapezoid:{panels}"),
            VolumeQuadrature::Gauss { points } => write!(f, "gauss:{points}"),
        }
    }
}

/// Data-fidelity term `int |v - xi|^{q}`.
#[derive(Clone)]
pub struct Fidelity {
    pub q: ExponentField,
    pub xi: DataFn,
}

#[derive(Clone)]
pub struct FunctionalSpec {
    pub p: ExponentField,
    pub fidelity: Option<Fidelity>,
    /// Exponent of the Neumann boundary term; needed when an end is Neumann.
    pub r: Option<ExponentField>,
    pub dirichlet: DirichletData,
    pub quadrature: VolumeQuadrature,
    pub lifting: LiftingConfig,
    /// Divide the volume integrands by `p(x)` and `q(x)`.
    pub normalize_by_exponent: bool,
}

impl fmt::Debug for FunctionalSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionalSpec")
            .field("p", &self.p.to_string())
            .field("fidelity_q", &self.fidelity.as_ref().map(|fd| fd.q.to_string()))
            .field("r", &self.r.as_ref().map(|r| r.to_string()))
            .field("dirichlet", &self.dirichlet)
            .field("quadrature", &self.quadrature)
            .field("lifting", &self.lifting)
            .field("normalize_by_exponent", &self.normalize_by_exponent)
            .finish()
    }
}

impl FunctionalSpec {
    /// Gradient term and Dirichlet data only; trapezoid with one panel and
    /// linear lifts.
    pub fn new(p: ExponentField, dirichlet: DirichletData) -> Self {
        Self {
            p,
            fidelity: None,
            r: None,
            dirichlet,
            quadrature: VolumeQuadrature::Trapezoid { panels: 1 },
            lifting: LiftingConfig::new(1),
            normalize_by_exponent: false,
        }
    }

    pub fn with_fidelity(mut self, q: ExponentField, xi: DataFn) -> Self {
        self.fidelity = Some(Fidelity { q, xi });
        self
    }

    pub fn with_neumann(mut self, r: ExponentField) -> Self {
        self.r = Some(r);
        self
    }

    pub fn with_quadrature(mut self, quadrature: VolumeQuadrature) -> Self {
        self.quadrature = quadrature;
        self
    }

    pub fn with_lifting(mut self, lifting: LiftingConfig) -> Self {
        self.lifting = lifting;
        self
    }

    pub fn normalized(mut self, on: bool) -> Self {
        self.normalize_by_exponent = on;
        self
    }

    /// Checks the exponent bounds needed for a differentiable energy on `mesh`.
    pub fn validate(&self, mesh: &Mesh1D) -> Result<()> {
        if !(self.p.p1() > 1.0) {
            return Err(Error::Config(format!("p must satisfy p1 > 1, got p1 = {}", self.p.p1())));
        }
        if let Some(fd) = &self.fidelity {
            if !(fd.q.p1() > 1.0) {
                return Err(Error::Config(format!("fidelity exponent must exceed 1, got {}", fd.q.p1())));
            }
        }
        if !mesh.ends(BoundaryKind::Neumann).is_empty() {
            match &self.r {
                Some(r) if r.p1() > 1.0 => {}
                Some(r) => return Err(Error::Config(format!("Neumann exponent must exceed 1, got {}", r.p1()))),
                None => return Err(Error::Config("a Neumann end needs the exponent r".into())),
            }
        }
        if let VolumeQuadrature::Trapezoid { panels: 0 } | VolumeQuadrature::Gauss { points: 0 } = self.quadrature {
            return Err(Error::Config("quadrature needs at least one panel or point".into()));
        }
        let (lo, hi) = mesh.domain();
        for x in [lo, hi] {
            self.p.eval(x)?;
        }
        Ok(())
    }
}

/// The five summands of the energy.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TermBreakdown {
    pub gradient_term: f64,
    pub fidelity_term: f64,
    pub dirichlet_penalty: f64,
    pub interior_penalty: f64,
    pub neumann_term: f64,
    pub total: f64,
}

impl TermBreakdown {
    pub const CSV_HEADER: [&'static str; 6] =
        ["grad_term", "fidelity", "dir_penalty", "int_penalty", "neumann", "total"];

    fn from_parts(parts: [f64; 5]) -> Self {
        let [gradient_term, fidelity_term, dirichlet_penalty, interior_penalty, neumann_term] = parts;
        Self {
            gradient_term,
            fidelity_term,
            dirichlet_penalty,
            interior_penalty,
            neumann_term,
            total: gradient_term + fidelity_term + dirichlet_penalty + interior_penalty + neumann_term,
        }
    }

    pub fn penalties(&self) -> f64 {
        self.dirichlet_penalty + self.interior_penalty
    }

    pub fn csv_row(&self) -> [String; 6] {
        [
            fmt_float(self.gradient_term),
            fmt_float(self.fidelity_term),
            fmt_float(self.dirichlet_penalty),
            fmt_float(self.interior_penalty),
            fmt_float(self.neumann_term),
            fmt_float(self.total),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TermKind {
    Gradient = 0,
    Fidelity = 1,
    Dirichlet = 2,
    Interior = 3,
    Neumann = 4,
}

/// `sum_i w_i |a_i . x + b_i|^{s_i}` with sparse rows `a_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinePowerSum {
    n_vars: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    offsets: Vec<f64>,
    exponents: Vec<f64>,
    weights: Vec<f64>,
    kinds: Vec<TermKind>,
}

impl AffinePowerSum {
    pub fn new(n_vars: usize) -> Self {
        Self {
            n_vars,
            row_ptr: vec![0],
            cols: Vec::new(),
            vals: Vec::new(),
            offsets: Vec::new(),
            exponents: Vec::new(),
            weights: Vec::new(),
            kinds: Vec::new(),
        }
    }

    pub fn push(&mut self, kind: TermKind, weight: f64, exponent: f64, row: &[(usize, f64)], offset: f64) {
        for &(c, v) in row {
            debug_assert!(c < self.n_vars);
            self.cols.push(c);
            self.vals.push(v);
        }
        self.row_ptr.push(self.cols.len());
        self.offsets.push(offset);
        self.exponents.push(exponent);
        self.weights.push(weight);
        self.kinds.push(kind);
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_terms(&self) -> usize {
        self.kinds.len()
    }

    fn argument(&self, i: usize, x: &[f64]) -> f64 {
        let mut t = self.offsets[i];
        for k in self.row_ptr[i]..self.row_ptr[i + 1] {
            t += self.vals[k] * x[self.cols[k]];
        }
        t
    }

    pub fn breakdown(&self, x: &[f64]) -> TermBreakdown {
        let mut parts = [0.0; 5];
        for i in 0..self.n_terms() {
            let t = self.argument(i, x);
            if t != 0.0 {
                parts[self.kinds[i] as usize] += self.weights[i] * t.abs().powf(self.exponents[i]);
            }
        }
        TermBreakdown::from_parts(parts)
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.breakdown(x).total
    }

    /// Value and exact gradient; `d|t|^s/dt` is taken as 0 at `t = 0`.
    pub fn value_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let mut grad = vec![0.0; self.n_vars];
        let mut parts = [0.0; 5];
        for i in 0..self.n_terms() {
            let t = self.argument(i, x);
            if t == 0.0 {
                continue;
            }
            let s = self.exponents[i];
            let pw = t.abs().powf(s);
            parts[self.kinds[i] as usize] += self.weights[i] * pw;
            let d = self.weights[i] * s * pw / t;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                grad[self.cols[k]] += d * self.vals[k];
            }
        }
        (TermBreakdown::from_parts(parts).total, grad)
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.value_and_gradient(x).1
    }
}

/// An energy assembled on a mesh for a fixed degree and layout.
#[derive(Debug, Clone)]
pub struct DiscreteProblem {
    mesh: Arc<Mesh1D>,
    degree: usize,
    continuity: Continuity,
    sum: AffinePowerSum,
    pinned: Vec<(usize, f64)>,
}

struct Layout {
    degree: usize,
    continuity: Continuity,
}

impl Layout {
    fn dof(&self, e: usize, j: usize) -> usize {
        match self.continuity {
            Continuity::Broken => e * (self.degree + 1) + j,
            Continuity::Continuous => e * self.degree + j,
        }
    }
}

impl DiscreteProblem {
    /// `I_h` over broken polynomials of degree `degree`.
    pub fn dg(mesh: Arc<Mesh1D>, degree: usize, spec: &FunctionalSpec) -> Result<Self> {
        Self::assemble(mesh, degree, Continuity::Broken, spec)
    }

    /// `I` over continuous polynomials; Dirichlet coefficients are reported
    /// by [`DiscreteProblem::pinned`] instead of being penalized.
    pub fn cg(mesh: Arc<Mesh1D>, degree: usize, spec: &FunctionalSpec) -> Result<Self> {
        Self::assemble(mesh, degree, Continuity::Continuous, spec)
    }

    fn assemble(mesh: Arc<Mesh1D>, degree: usize, continuity: Continuity, spec: &FunctionalSpec) -> Result<Self> {
        if degree == 0 {
            return Err(Error::Argument("the energies need degree >= 1".into()));
        }
        spec.validate(&mesh)?;
        let layout = Layout { degree, continuity };
        let n_dofs = BrokenFunction::dof_count(&mesh, degree, continuity);
        let basis = LagrangeBasis::new(degree);
        let kernel = LiftingKernel::new(spec.lifting.l)?;
        let broken = continuity == Continuity::Broken;
        let n_el = mesh.n_elements();
        let mut sum = AffinePowerSum::new(n_dofs);
        let (samples, refs) = spec.quadrature.samples(&mesh);

        let mut row: Vec<(usize, f64)> = Vec::new();
        for ((&x, &w), (&e, &xi)) in
            samples.set.points().iter().zip(samples.set.weights()).zip(samples.elements.iter().zip(&refs))
        {
            let h = mesh.element_len(e);
            let p = spec.p.eval(x)?;
            row.clear();
            for (j, d) in basis.derivatives(xi).into_iter().enumerate() {
                row.push((layout.dof(e, j), 2.0 / h * d));
            }
            if broken {
                if mesh.is_interior_face(e) {
                    // jump at the left face: v[e-1, k] - v[e, 0]
                    let c = -kernel.value(xi, End::Left) / h;
                    row.push((layout.dof(e - 1, degree), c));
                    row.push((layout.dof(e, 0), -c));
                }
                if mesh.is_interior_face(e + 1) {
                    let c = -kernel.value(xi, End::Right) / h;
                    row.push((layout.dof(e, degree), c));
                    row.push((layout.dof(e + 1, 0), -c));
                }
            }
            let weight = if spec.normalize_by_exponent { w / p } else { w };
            sum.push(TermKind::Gradient, weight, p, &row, 0.0);

            if let Some(fd) = &spec.fidelity {
                let q = fd.q.eval(x)?;
                row.clear();
                for (j, v) in basis.values(xi).into_iter().enumerate() {
                    if v != 0.0 {
                        row.push((layout.dof(e, j), v));
                    }
                }
                let weight = if spec.normalize_by_exponent { w / q } else { w };
                sum.push(TermKind::Fidelity, weight, q, &row, -(fd.xi)(x));
            }
        }

        let nodes = mesh.nodes();
        let mut pinned = Vec::new();
        for end in [End::Left, End::Right] {
            let z = mesh.boundary_node(end);
            let x = nodes[z];
            let dof = match end {
                End::Left => layout.dof(0, 0),
                End::Right => layout.dof(n_el - 1, degree),
            };
            match mesh.boundary_kind(end) {
                BoundaryKind::Dirichlet => {
                    if broken {
                        let p = spec.p.eval(x)?;
                        let h = mesh.face_size(z);
                        sum.push(TermKind::Dirichlet, h.powf(1.0 - p), p, &[(dof, 1.0)], -spec.dirichlet.at(end));
                    } else {
                        pinned.push((dof, spec.dirichlet.at(end)));
                    }
                }
                BoundaryKind::Neumann => {
                    let r = spec.r.as_ref().expect("validated").eval(x)?;
                    sum.push(TermKind::Neumann, 1.0, r, &[(dof, 1.0)], 0.0);
                }
            }
        }
        if broken {
            for z in mesh.interior_faces() {
                let x = nodes[z];
                let p = spec.p.eval(x)?;
                let h = mesh.face_size(z);
                let jump = [(layout.dof(z - 1, degree), 1.0), (layout.dof(z, 0), -1.0)];
                sum.push(TermKind::Interior, h.powf(1.0 - p), p, &jump, 0.0);
            }
        }
        Ok(Self { mesh, degree, continuity, sum, pinned })
    }

    pub fn mesh(&self) -> &Arc<Mesh1D> {
        &self.mesh
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn continuity(&self) -> Continuity {
        self.continuity
    }

    pub fn n_dofs(&self) -> usize {
        self.sum.n_vars()
    }

    /// Coefficients fixed by Dirichlet data (conforming problems only).
    pub fn pinned(&self) -> &[(usize, f64)] {
        &self.pinned
    }

    pub fn terms(&self) -> &AffinePowerSum {
        &self.sum
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.sum.value(x)
    }

    pub fn value_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        self.sum.value_and_gradient(x)
    }

    pub fn breakdown(&self, x: &[f64]) -> TermBreakdown {
        self.sum.breakdown(x)
    }

    pub fn function(&self, x: Vec<f64>) -> Result<BrokenFunction> {
        BrokenFunction::new(self.mesh.clone(), self.degree, self.continuity, x)
    }
}

fn check_mesh(v: &BrokenFunction, spec: &FunctionalSpec) -> Result<()> {
    spec.validate(v.mesh())
}

/// `I_h(v)` computed through the materialized lift `R_h(v)`.
pub fn eval_discrete(v: &BrokenFunction, spec: &FunctionalSpec) -> Result<TermBreakdown> {
    check_mesh(v, spec)?;
    let v = v.to_broken();
    let mesh = v.mesh().clone();
    let r = lift(&v, spec.lifting)?;
    let (samples, _) = spec.quadrature.samples(&mesh);
    let mut parts = [0.0; 5];
    for ((&x, &w), &e) in samples.set.points().iter().zip(samples.set.weights()).zip(&samples.elements) {
        let p = spec.p.eval(x)?;
        let g = v.element_derivative(e, x) + r.element_value(e, x);
        let scale = if spec.normalize_by_exponent { 1.0 / p } else { 1.0 };
        parts[0] += scale * w * g.abs().powf(p);
        if let Some(fd) = &spec.fidelity {
            let q = fd.q.eval(x)?;
            let scale = if spec.normalize_by_exponent { 1.0 / q } else { 1.0 };
            parts[1] += scale * w * (v.element_value(e, x) - (fd.xi)(x)).abs().powf(q);
        }
    }
    let nodes = mesh.nodes();
    for end in [End::Left, End::Right] {
        let z = mesh.boundary_node(end);
        let x = nodes[z];
        let trace = v.boundary_trace(end);
        match mesh.boundary_kind(end) {
            BoundaryKind::Dirichlet => {
                let p = spec.p.eval(x)?;
                parts[2] += (trace - spec.dirichlet.at(end)).abs().powf(p) * mesh.face_size(z).powf(1.0 - p);
            }
            BoundaryKind::Neumann => {
                let r = spec.r.as_ref().expect("validated").eval(x)?;
                parts[4] += trace.abs().powf(r);
            }
        }
    }
    for z in mesh.interior_faces() {
        let p = spec.p.eval(nodes[z])?;
        parts[3] += v.jump(z)?.abs().powf(p) * mesh.face_size(z).powf(1.0 - p);
    }
    Ok(TermBreakdown::from_parts(parts))
}

/// Gradient of the quadrature-discretized `I_h` with respect to `v`'s coefficients.
pub fn grad_discrete(v: &BrokenFunction, spec: &FunctionalSpec) -> Result<Vec<f64>> {
    if v.continuity() != Continuity::Broken {
        return Err(Error::Argument("the DG gradient is taken over broken coefficients".into()));
    }
    let problem = DiscreteProblem::dg(v.mesh().clone(), v.degree(), spec)?;
    Ok(problem.value_and_gradient(v.coeffs()).1)
}

/// `I(v)` for a continuous `v`: gradient, fidelity and Neumann terms. Dirichlet
/// data enter as a constraint, so the Dirichlet and interior columns are zero.
pub fn eval_continuous(v: &BrokenFunction, spec: &FunctionalSpec) -> Result<TermBreakdown> {
    check_mesh(v, spec)?;
    if v.jumps().iter().any(|&j| j != 0.0) {
        return Err(Error::Argument("eval_continuous needs a function without jumps".into()));
    }
    let mesh = v.mesh().clone();
    let (samples, _) = spec.quadrature.samples(&mesh);
    let mut parts = [0.0; 5];
    for ((&x, &w), &e) in samples.set.points().iter().zip(samples.set.weights()).zip(&samples.elements) {
        let p = spec.p.eval(x)?;
        let scale = if spec.normalize_by_exponent { 1.0 / p } else { 1.0 };
        parts[0] += scale * w * v.element_derivative(e, x).abs().powf(p);
        if let Some(fd) = &spec.fidelity {
            let q = fd.q.eval(x)?;
            let scale = if spec.normalize_by_exponent { 1.0 / q } else { 1.0 };
            parts[1] += scale * w * (v.element_value(e, x) - (fd.xi)(x)).abs().powf(q);
        }
    }
    for end in mesh.ends(BoundaryKind::Neumann) {
        let x = mesh.nodes()[mesh.boundary_node(end)];
        let r = spec.r.as_ref().expect("validated").eval(x)?;
        parts[4] += v.boundary_trace(end).abs().powf(r);
    }
    Ok(TermBreakdown::from_parts(parts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::BoundaryKind::*;

    fn uniform(n: usize) -> Arc<Mesh1D> {
        Arc::new(Mesh1D::uniform(-1.0, 1.0, n, Dirichlet, Dirichlet).unwrap())
    }

    fn p2_spec(b: f64) -> FunctionalSpec {
        FunctionalSpec::new(ExponentField::constant(2.0).unwrap(), DirichletData { left: -b, right: b })
    }

    #[test]
    fn continuous_candidate() {
        let b = 3.0;
        let v = BrokenFunction::interpolate(uniform(6), 1, Continuity::Broken, |x| b * x).unwrap();
        let t = eval_discrete(&v, &p2_spec(b)).unwrap();
        assert!((t.total - 2.0 * b * b).abs() < 1e-12);
        assert!(t.penalties().abs() < 1e-24);
    }

    #[test]
    fn zero_function_pays_two_dirichlet_penalties() {
        let (b, n) = (2.5, 8);
        let v = BrokenFunction::zeros(uniform(n), 1, Continuity::Broken).unwrap();
        let t = eval_discrete(&v, &p2_spec(b)).unwrap();
        assert!((t.total - n as f64 * b * b).abs() < 1e-12);
        let g = grad_discrete(&v, &p2_spec(b)).unwrap();
        let last = g.len() - 1;
        for (i, gi) in g.iter().enumerate() {
            if i != 0 && i != last {
                assert_eq!(*gi, 0.0);
            }
        }
        assert!(g[0] != 0.0 && g[last] != 0.0);
    }

    #[test]
    fn unit_jump_with_constant_lift() {
        // two elements on (-1, 1), v = 0 | 1, l = 0: R = -[v] / (2h) = 1/2 on both
        let mesh = uniform(2);
        let v = BrokenFunction::new(mesh, 1, Continuity::Broken, vec![0.0, 0.0, 1.0, 1.0]).unwrap();
        let spec = FunctionalSpec::new(ExponentField::constant(2.0).unwrap(), DirichletData { left: 0.0, right: 1.0 })
            .with_lifting(LiftingConfig::new(0));
        let t = eval_discrete(&v, &spec).unwrap();
        assert!((t.interior_penalty - 1.0).abs() < 1e-15);
        assert!((t.gradient_term - 0.5).abs() < 1e-15);
        assert_eq!(t.dirichlet_penalty, 0.0);
    }

    #[test]
    fn assembled_and_direct_paths_agree() {
        let mesh = uniform(7);
        let spec = FunctionalSpec::new(ExponentField::hat(0.2, 0.3).unwrap(), DirichletData { left: -1.0, right: 2.0 })
            .with_fidelity(ExponentField::constant(2.0).unwrap(), Arc::new(|x: f64| (3.0 * x).sin()))
            .with_quadrature(VolumeQuadrature::Gauss { points: 3 })
            .with_lifting(LiftingConfig::new(2));
        let v = BrokenFunction::interpolate_elementwise(mesh.clone(), 2, |e, x| x * x + 0.1 * e as f64).unwrap();
        let direct = eval_discrete(&v, &spec).unwrap();
        let problem = DiscreteProblem::dg(mesh, 2, &spec).unwrap();
        let assembled = problem.breakdown(v.coeffs());
        for (a, b) in [
            (direct.gradient_term, assembled.gradient_term),
            (direct.fidelity_term, assembled.fidelity_term),
            (direct.dirichlet_penalty, assembled.dirichlet_penalty),
            (direct.interior_penalty, assembled.interior_penalty),
        ] {
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn continuous_energy_identities() {
        let mesh = uniform(4);
        let spec = p2_spec(1.0);
        let v = BrokenFunction::interpolate(mesh.clone(), 1, Continuity::Continuous, |x| x).unwrap();
        assert!((eval_continuous(&v, &spec).unwrap().total - 2.0).abs() < 1e-14);
        assert!((eval_continuous(&v, &spec.clone().normalized(true)).unwrap().total - 1.0).abs() < 1e-14);
        let w = BrokenFunction::interpolate(mesh, 1, Continuity::Continuous, |x| 0.3 * x + 0.9).unwrap();
        let dg = eval_discrete(&w, &spec).unwrap();
        let cg = eval_continuous(&w, &spec).unwrap();
        assert!((dg.total - (cg.total + dg.dirichlet_penalty)).abs() < 1e-13);
        let broken = BrokenFunction::new(uniform(2), 1, Continuity::Broken, vec![0.0, 0.0, 1.0, 1.0]).unwrap();
        assert!(eval_continuous(&broken, &spec).is_err());
    }

    #[test]
    fn fidelity_vanishes_on_data() {
        let mesh = uniform(5);
        let spec = p2_spec(0.0).with_fidelity(ExponentField::constant(1.5).unwrap(), Arc::new(|x: f64| 2.0 * x));
        let v = BrokenFunction::interpolate(mesh, 1, Continuity::Continuous, |x| 2.0 * x).unwrap();
        assert_eq!(eval_continuous(&v, &spec).unwrap().fidelity_term, 0.0);
    }

    #[test]
    fn invalid_exponents_are_rejected() {
        let spec = FunctionalSpec::new(ExponentField::constant(1.0).unwrap(), DirichletData { left: 0.0, right: 0.0 });
        assert!(matches!(DiscreteProblem::dg(uniform(3), 1, &spec), Err(Error::Config(_))));
        let neumann = Arc::new(Mesh1D::uniform(0.0, 1.0, 3, Dirichlet, Neumann).unwrap());
        assert!(matches!(DiscreteProblem::dg(neumann, 1, &p2_spec(1.0)), Err(Error::Config(_))));
    }
}
