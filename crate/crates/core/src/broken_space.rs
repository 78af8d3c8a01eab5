//! Piecewise polynomial functions on a [`Mesh1D`].
//!
//! Coefficients are nodal values at the Gauss–Lobatto points of each element.
//! A broken function stores `k + 1` values per element. A continuous one
//! stores `n k + 1` values and element `e` reads the contiguous window
//! starting at `e k`, so shared endpoints are stored once.
//!
//! Jumps use the left-minus-right convention `[u](x_e) = u^-(x_e) - u^+(x_e)`.

use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use crate::basis::LagrangeBasis;
use crate::error::{Error, Result};
use crate::exponent::{luxemburg_norm, ExponentField, WeightedSampleSet};
use crate::mesh::{DirichletData, End, Mesh1D};
use crate::quadrature::QuadratureRule;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Continuity {
    Broken,
    Continuous,
}

/// Which one-sided value to take when a point sits on a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
    Element(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BrokenFunction {
    mesh: Arc<Mesh1D>,
    basis: Arc<LagrangeBasis>,
    continuity: Continuity,
    coeffs: Vec<f64>,
}

/// Traces at one interior face.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteriorFace {
    pub node: usize,
    pub x: f64,
    pub minus: f64,
    pub plus: f64,
    pub jump: f64,
    pub average: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FaceValues {
    pub interior: Vec<InteriorFace>,
    /// `(x, trace)` at the left and right boundary.
    pub boundary: [(f64, f64); 2],
}

/// Selects the broken seminorm or its Dirichlet variant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Seminorm {
    Interior,
    WithDirichlet(DirichletData),
}

/// The separate Luxemburg norms that add up to a broken seminorm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeminormParts {
    pub gradient: f64,
    pub jumps: f64,
    pub dirichlet: f64,
}

impl SeminormParts {
    pub fn total(&self) -> f64 {
        self.gradient + self.jumps + self.dirichlet
    }
}

/// Composite Gauss samples with the element each point belongs to.
#[derive(Debug, Clone, PartialEq)]
pub struct VolumeSamples {
    pub set: WeightedSampleSet,
    pub elements: Vec<usize>,
}

/// Gauss points per element used by norm and property computations.
pub fn default_norm_points(degree: usize) -> usize {
    2 * degree + 2
}

/// Composite Gauss–Legendre samples with `points` nodes per piece. Elements
/// are split at `breaks` so that kinks of an exponent never sit inside a piece.
pub fn volume_samples(mesh: &Mesh1D, points: usize, breaks: &[f64]) -> VolumeSamples {
    let rule = QuadratureRule::gauss_legendre(points.max(1));
    let mut set = WeightedSampleSet::default();
    let mut elements = Vec::new();
    for e in 0..mesh.n_elements() {
        let (a, b) = mesh.element(e);
        let mut cuts = vec![a];
        cuts.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
        cuts.push(b);
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

/// Samples for a subset of elements only.
pub fn patch_samples(mesh: &Mesh1D, patch: &[usize], points: usize, breaks: &[f64]) -> VolumeSamples {
    let all = volume_samples(mesh, points, breaks);
    let mut set = WeightedSampleSet::default();
    let mut elements = Vec::new();
    for ((x, w), &e) in all.set.points().iter().zip(all.set.weights()).zip(&all.elements) {
        if patch.contains(&e) {
            set.push(*x, *w);
            elements.push(e);
        }
    }
    VolumeSamples { set, elements }
}

fn breaks_of(fields: &[&ExponentField]) -> Vec<f64> {
    let mut out: Vec<f64> = fields.iter().flat_map(|f| f.breakpoints()).collect();
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// `h^{-1/p'}` with the convention `h^0 = 1` when `p = 1`.
pub fn face_weight(h: f64, p: &ExponentField, x: f64) -> Result<f64> {
    let pv = p.eval(x)?;
    let e = p.excess(x)?;
    Ok(h.powf(-e / pv))
}

impl BrokenFunction {
    pub fn dof_count(mesh: &Mesh1D, degree: usize, continuity: Continuity) -> usize {
        match continuity {
            Continuity::Broken => mesh.n_elements() * (degree + 1),
            Continuity::Continuous => mesh.n_elements() * degree + 1,
        }
    }

    pub fn new(mesh: Arc<Mesh1D>, degree: usize, continuity: Continuity, coeffs: Vec<f64>) -> Result<Self> {
        if continuity == Continuity::Continuous && degree == 0 {
            return Err(Error::Argument("continuous functions need degree >= 1".into()));
        }
        let expected = Self::dof_count(&mesh, degree, continuity);
        if coeffs.len() != expected {
            return Err(Error::Argument(format!("expected {expected} coefficients, got {}", coeffs.len())));
        }
        Ok(Self { mesh, basis: Arc::new(LagrangeBasis::new(degree)), continuity, coeffs })
    }

    pub fn zeros(mesh: Arc<Mesh1D>, degree: usize, continuity: Continuity) -> Result<Self> {
        let n = Self::dof_count(&mesh, degree, continuity);
        Self::new(mesh, degree, continuity, vec![0.0; n])
    }

    /// Nodal interpolant of `f`.
    pub fn interpolate(
        mesh: Arc<Mesh1D>,
        degree: usize,
        continuity: Continuity,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let mut u = Self::zeros(mesh, degree, continuity)?;
        for e in 0..u.mesh.n_elements() {
            let off = u.offset(e);
            for j in 0..u.basis.len() {
                u.coeffs[off + j] = f(u.node_x(e, j));
            }
        }
        Ok(u)
    }

    /// Broken nodal interpolant of an elementwise function `f(element, x)`.
    pub fn interpolate_elementwise(
        mesh: Arc<Mesh1D>,
        degree: usize,
        f: impl Fn(usize, f64) -> f64,
    ) -> Result<Self> {
        let mut u = Self::zeros(mesh, degree, Continuity::Broken)?;
        for e in 0..u.mesh.n_elements() {
            let off = u.offset(e);
            for j in 0..u.basis.len() {
                u.coeffs[off + j] = f(e, u.node_x(e, j));
            }
        }
        Ok(u)
    }

    pub fn mesh(&self) -> &Arc<Mesh1D> {
        &self.mesh
    }

    pub fn basis(&self) -> &LagrangeBasis {
        &self.basis
    }

    pub fn degree(&self) -> usize {
        self.basis.degree()
    }

    pub fn continuity(&self) -> Continuity {
        self.continuity
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// Offset of element `e`'s first local coefficient.
    pub fn offset(&self, e: usize) -> usize {
        match self.continuity {
            Continuity::Broken => e * (self.degree() + 1),
            Continuity::Continuous => e * self.degree(),
        }
    }

    pub fn local(&self, e: usize) -> &[f64] {
        let off = self.offset(e);
        &self.coeffs[off..off + self.basis.len()]
    }

    /// Physical position of local node `j` of element `e`.
    pub fn node_x(&self, e: usize, j: usize) -> f64 {
        let (a, b) = self.mesh.element(e);
        let xi = self.basis.nodes()[j];
        if xi == -1.0 {
            a
        } else if xi == 1.0 {
            b
        } else {
            0.5 * (a + b) + 0.5 * (b - a) * xi
        }
    }

    fn reference(&self, e: usize, x: f64) -> f64 {
        let (a, b) = self.mesh.element(e);
        2.0 * (x - a) / (b - a) - 1.0
    }

    /// Local polynomial of element `e` at `x`, no bounds check.
    pub fn element_value(&self, e: usize, x: f64) -> f64 {
        self.basis.interpolate(self.local(e), self.reference(e, x))
    }

    /// Derivative of the local polynomial of element `e` at `x`.
    pub fn element_derivative(&self, e: usize, x: f64) -> f64 {
        2.0 / self.mesh.element_len(e) * self.basis.interpolate_derivative(self.local(e), self.reference(e, x))
    }

    /// Element selected by `side` for the point `x`.
    pub fn resolve(&self, x: f64, side: Side) -> Result<usize> {
        let (lo, hi) = self.mesh.domain();
        if x.is_nan() || x < lo || x > hi {
            return Err(Error::Domain { x, lo, hi });
        }
        let nodes = self.mesh.nodes();
        let n = self.mesh.n_elements();
        match side {
            Side::Element(e) => {
                if e >= n {
                    return Err(Error::Argument(format!("element {e} out of range")));
                }
                let (a, b) = self.mesh.element(e);
                if x < a || x > b {
                    return Err(Error::Argument(format!("{x} is not in element {e} = [{a}, {b}]")));
                }
                Ok(e)
            }
            Side::Left => match nodes.binary_search_by(|v| v.total_cmp(&x)) {
                Ok(z) if z > 0 => Ok(z - 1),
                _ => self.mesh.locate(x),
            },
            Side::Right => self.mesh.locate(x),
        }
    }

    pub fn evaluate(&self, x: f64, side: Side) -> Result<f64> {
        let e = self.resolve(x, side)?;
        Ok(self.element_value(e, x))
    }

    /// Elementwise derivative as a broken function of degree `k - 1`.
    pub fn gradient(&self) -> Result<BrokenFunction> {
        let k = self.degree();
        if k == 0 {
            return Err(Error::Argument("the gradient needs degree >= 1".into()));
        }
        BrokenFunction::interpolate_elementwise(self.mesh.clone(), k - 1, |e, x| self.element_derivative(e, x))
    }

    /// Trace of element `e` at one of its ends.
    pub fn trace(&self, e: usize, end: End) -> f64 {
        let local = self.local(e);
        if self.degree() == 0 {
            return local[0];
        }
        match end {
            End::Left => local[0],
            End::Right => local[local.len() - 1],
        }
    }

    /// Trace at a boundary face.
    pub fn boundary_trace(&self, end: End) -> f64 {
        match end {
            End::Left => self.trace(0, End::Left),
            End::Right => self.trace(self.mesh.n_elements() - 1, End::Right),
        }
    }

    /// `u^- - u^+` at the interior face located at node `node`.
    pub fn jump(&self, node: usize) -> Result<f64> {
        if !self.mesh.is_interior_face(node) {
            return Err(Error::Argument(format!("node {node} is not an interior face")));
        }
        Ok(self.trace(node - 1, End::Right) - self.trace(node, End::Left))
    }

    /// Jumps at all interior faces, in node order.
    pub fn jumps(&self) -> Vec<f64> {
        self.mesh
            .interior_faces()
            .map(|z| self.trace(z - 1, End::Right) - self.trace(z, End::Left))
            .collect()
    }

    pub fn face_values(&self) -> FaceValues {
        let nodes = self.mesh.nodes();
        let interior = self
            .mesh
            .interior_faces()
            .map(|z| {
                let minus = self.trace(z - 1, End::Right);
                let plus = self.trace(z, End::Left);
                InteriorFace { node: z, x: nodes[z], minus, plus, jump: minus - plus, average: 0.5 * (minus + plus) }
            })
            .collect();
        let (lo, hi) = self.mesh.domain();
        FaceValues {
            interior,
            boundary: [(lo, self.boundary_trace(End::Left)), (hi, self.boundary_trace(End::Right))],
        }
    }

    /// Same function in the broken layout.
    pub fn to_broken(&self) -> BrokenFunction {
        if self.continuity == Continuity::Broken {
            return self.clone();
        }
        let mut coeffs = Vec::with_capacity(self.mesh.n_elements() * self.basis.len());
        for e in 0..self.mesh.n_elements() {
            coeffs.extend_from_slice(self.local(e));
        }
        BrokenFunction { mesh: self.mesh.clone(), basis: self.basis.clone(), continuity: Continuity::Broken, coeffs }
    }

    /// `alpha u + beta v` on a shared mesh and layout.
    pub fn lin_comb(alpha: f64, u: &BrokenFunction, beta: f64, v: &BrokenFunction) -> Result<BrokenFunction> {
        if u.mesh != v.mesh || u.degree() != v.degree() || u.continuity != v.continuity {
            return Err(Error::MeshMismatch);
        }
        let coeffs = u.coeffs.iter().zip(&v.coeffs).map(|(a, b)| alpha * a + beta * b).collect();
        Ok(BrokenFunction { coeffs, ..u.clone() })
    }

    pub fn scaled(&self, c: f64) -> BrokenFunction {
        BrokenFunction { coeffs: self.coeffs.iter().map(|v| c * v).collect(), ..self.clone() }
    }

    /// Re-expresses the function on a mesh whose elements each lie inside one
    /// element of the current mesh.
    pub fn embed(&self, fine: Arc<Mesh1D>) -> Result<BrokenFunction> {
        let (lo, hi) = self.mesh.domain();
        let (flo, fhi) = fine.domain();
        if lo != flo || hi != fhi {
            return Err(Error::MeshMismatch);
        }
        let parents: Vec<usize> = (0..fine.n_elements())
            .map(|e| {
                let (a, b) = fine.element(e);
                let parent = self.mesh.locate(0.5 * (a + b))?;
                let (pa, pb) = self.mesh.element(parent);
                if a < pa || b > pb {
                    return Err(Error::MeshMismatch);
                }
                Ok(parent)
            })
            .collect::<Result<_>>()?;
        let mut out = BrokenFunction::zeros(fine, self.degree(), self.continuity)?;
        for e in 0..out.mesh.n_elements() {
            let off = out.offset(e);
            for j in 0..out.basis.len() {
                let x = out.node_x(e, j);
                out.coeffs[off + j] = self.element_value(parents[e], x);
            }
        }
        Ok(out)
    }

    /// Values at volume samples, each read from the sample's own element.
    pub fn values_at(&self, samples: &VolumeSamples) -> Vec<f64> {
        samples.set.points().iter().zip(&samples.elements).map(|(&x, &e)| self.element_value(e, x)).collect()
    }

    pub fn derivatives_at(&self, samples: &VolumeSamples) -> Vec<f64> {
        samples.set.points().iter().zip(&samples.elements).map(|(&x, &e)| self.element_derivative(e, x)).collect()
    }

    /// Luxemburg norm of `u` over the domain.
    pub fn lp_norm(&self, p: &ExponentField) -> Result<f64> {
        let samples = volume_samples(&self.mesh, default_norm_points(self.degree()), &p.breakpoints());
        luxemburg_norm(&samples.set, &self.values_at(&samples), p)
    }

    /// Luxemburg norm of the elementwise gradient.
    pub fn gradient_lp_norm(&self, p: &ExponentField) -> Result<f64> {
        let samples = volume_samples(&self.mesh, default_norm_points(self.degree()), &p.breakpoints());
        luxemburg_norm(&samples.set, &self.derivatives_at(&samples), p)
    }

    /// Counting-measure norm of `[u] h^{-1/p'}` over the interior faces.
    pub fn jump_norm(&self, p: &ExponentField) -> Result<f64> {
        let nodes = self.mesh.nodes();
        let mut xs = Vec::new();
        let mut vals = Vec::new();
        for z in self.mesh.interior_faces() {
            let x = nodes[z];
            xs.push(x);
            vals.push(self.jump(z)? * face_weight(self.mesh.face_size(z), p, x)?);
        }
        luxemburg_norm(&WeightedSampleSet::counting(xs), &vals, p)
    }

    pub fn broken_seminorm_parts(&self, p: &ExponentField, which: Seminorm) -> Result<SeminormParts> {
        let gradient = self.gradient_lp_norm(p)?;
        let jumps = self.jump_norm(p)?;
        let dirichlet = match which {
            Seminorm::Interior => 0.0,
            Seminorm::WithDirichlet(data) => {
                let mut xs = Vec::new();
                let mut vals = Vec::new();
                for end in self.mesh.ends(crate::mesh::BoundaryKind::Dirichlet) {
                    let z = self.mesh.boundary_node(end);
                    let x = self.mesh.nodes()[z];
                    xs.push(x);
                    let w = face_weight(self.mesh.face_size(z), p, x)?;
                    vals.push((self.boundary_trace(end) - data.at(end)) * w);
                }
                luxemburg_norm(&WeightedSampleSet::counting(xs), &vals, p)?
            }
        };
        Ok(SeminormParts { gradient, jumps, dirichlet })
    }

    /// `||grad u||_{p} + ||[u] h^{-1/p'}||_{p, interior faces}` (plus the
    /// Dirichlet face term for the Dirichlet variant).
    pub fn broken_seminorm(&self, p: &ExponentField, which: Seminorm) -> Result<f64> {
        Ok(self.broken_seminorm_parts(p, which)?.total())
    }

    /// Local seminorm on a contiguous patch of elements: gradient norm on the
    /// patch plus the single-point norms of the weighted jumps at the
    /// interior faces touching it.
    pub fn patch_seminorm(&self, patch: &[usize], p: &ExponentField) -> Result<f64> {
        let samples = patch_samples(&self.mesh, patch, default_norm_points(self.degree()), &p.breakpoints());
        let grad = luxemburg_norm(&samples.set, &self.derivatives_at(&samples), p)?;
        let mut faces: Vec<usize> = patch.iter().flat_map(|&e| [e, e + 1]).collect();
        faces.sort_unstable();
        faces.dedup();
        let mut jumps = 0.0;
        for z in faces.into_iter().filter(|&z| self.mesh.is_interior_face(z)) {
            let x = self.mesh.nodes()[z];
            jumps += (self.jump(z)? * face_weight(self.mesh.face_size(z), p, x)?).abs();
        }
        Ok(grad + jumps)
    }

    /// Measured constant of the elementwise inverse estimate
    /// `||u||_{p, K} <= C h_K^{1/p_+ - 1/q_-} ||u||_{q, K}`.
    pub fn inverse_estimate_check(&self, p: &ExponentField, q: &ExponentField) -> Result<f64> {
        let breaks = breaks_of(&[p, q]);
        let mut worst: f64 = 0.0;
        for e in 0..self.mesh.n_elements() {
            let samples = patch_samples(&self.mesh, &[e], default_norm_points(self.degree()) + 4, &breaks);
            let vals = self.values_at(&samples);
            let nq = luxemburg_norm(&samples.set, &vals, q)?;
            if nq == 0.0 {
                continue;
            }
            let np = luxemburg_norm(&samples.set, &vals, p)?;
            let (a, b) = self.mesh.element(e);
            let (_, p_plus) = p.range_on(a, b)?;
            let (q_minus, _) = q.range_on(a, b)?;
            let h = b - a;
            worst = worst.max(np / (h.powf(1.0 / p_plus - 1.0 / q_minus) * nq));
        }
        Ok(worst)
    }

    /// Total variation `int |u'| + sum |[u]|`.
    pub fn total_variation(&self) -> f64 {
        let rule = QuadratureRule::gauss_legendre(4 * self.degree().max(1) + 8);
        let mut total: f64 = self.jumps().iter().map(|j| j.abs()).sum();
        for e in 0..self.mesh.n_elements() {
            let (a, b) = self.mesh.element(e);
            total += rule.integrate(a, b, |x| self.element_derivative(e, x).abs());
        }
        total
    }

    /// Integral over the domain, exact for the stored polynomials.
    pub fn integral(&self) -> f64 {
        let rule = QuadratureRule::gauss_legendre(self.degree() / 2 + 1);
        (0..self.mesh.n_elements())
            .map(|e| {
                let (a, b) = self.mesh.element(e);
                rule.integrate(a, b, |x| self.element_value(e, x))
            })
            .sum()
    }

    /// One row per element-local node: `element,local_node,x,value`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["element", "local_node", "x", "value"])?;
        for e in 0..self.mesh.n_elements() {
            for (j, v) in self.local(e).iter().enumerate() {
                w.write_record([e.to_string(), j.to_string(), fmt_float(self.node_x(e, j)), fmt_float(*v)])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        write_atomic(path, &buf)
    }
}

/// Floats in output files: 17 significant digits.
pub fn fmt_float(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    format!("{v:.16e}")
}

/// Writes through a temporary file in the same directory and renames it.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}
