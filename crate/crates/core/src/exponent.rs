//! Variable exponents, modulars and Luxemburg norms.
//!
//! Every integral over a continuous domain is represented by a
//! [`WeightedSampleSet`] built by the caller from a quadrature rule, so the same
//! code evaluates volume modulars and counting-measure sums over faces.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Relative bisection tolerance used by [`luxemburg_norm`].
pub const DEFAULT_NORM_TOL: f64 = 1e-12;

/// Relative slack for points that sit on a domain endpoint up to rounding.
const DOMAIN_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum ExponentKind {
    Constant { value: f64 },
    /// `((1 - eps) / a) |x| + 1 + eps` on `|x| <= a`, `2` on `a <= |x| <= 1`.
    Hat { eps: f64, a: f64 },
    /// Linear interpolation of `(xs, vals)`; a repeated abscissa encodes a jump
    /// and the field is right-continuous there.
    PiecewiseLinear { xs: Vec<f64>, vals: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentField {
    kind: ExponentKind,
    lo: f64,
    hi: f64,
    p1: f64,
    p2: f64,
    c_log: f64,
}

impl ExponentField {
    pub fn constant(value: f64) -> Result<Self> {
        if !(value >= 1.0 && value.is_finite()) {
            return Err(Error::Argument(format!("constant exponent {value} must be finite and >= 1")));
        }
        Ok(Self {
            kind: ExponentKind::Constant { value },
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
            p1: value,
            p2: value,
            c_log: 0.0,
        })
    }

    pub fn hat(eps: f64, a: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::Argument(format!("hat exponent needs 0 < eps < 1, got {eps}")));
        }
        if !(a > 0.0 && a <= 1.0) {
            return Err(Error::Argument(format!("hat exponent needs 0 < a <= 1, got {a}")));
        }
        let mut field = Self {
            kind: ExponentKind::Hat { eps, a },
            lo: -1.0,
            hi: 1.0,
            p1: 1.0 + eps,
            p2: 2.0,
            c_log: 0.0,
        };
        field.c_log = field.estimate_c_log();
        Ok(field)
    }

    pub fn piecewise_linear(xs: Vec<f64>, vals: Vec<f64>) -> Result<Self> {
        if xs.len() < 2 || xs.len() != vals.len() {
            return Err(Error::Argument("piecewise linear exponent needs >= 2 matching breakpoints".into()));
        }
        if xs.windows(2).any(|w| !(w[0] <= w[1])) || xs[0] >= xs[xs.len() - 1] {
            return Err(Error::Argument("breakpoints must be nondecreasing and span an interval".into()));
        }
        if xs.windows(3).any(|w| w[0] == w[2]) {
            return Err(Error::Argument("a breakpoint may be repeated at most once".into()));
        }
        if vals.iter().any(|v| !(*v >= 1.0 && v.is_finite())) {
            return Err(Error::Argument("exponent values must be finite and >= 1".into()));
        }
        let p1 = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let p2 = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = xs[0];
        let hi = xs[xs.len() - 1];
        let mut field = Self { kind: ExponentKind::PiecewiseLinear { xs, vals }, lo, hi, p1, p2, c_log: 0.0 };
        field.c_log = field.estimate_c_log();
        Ok(field)
    }

    /// Restricts the domain of a field (mostly useful for constants).
    pub fn with_domain(mut self, lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::Argument(format!("empty domain [{lo}, {hi}]")));
        }
        if lo < self.lo || hi > self.hi {
            return Err(Error::Argument(format!(
                "domain [{lo}, {hi}] exceeds the field's [{}, {}]",
                self.lo, self.hi
            )));
        }
        self.lo = lo;
        self.hi = hi;
        let (p1, p2) = self.range_on(lo, hi)?;
        self.p1 = p1;
        self.p2 = p2;
        Ok(self)
    }

    /// Restricts a field defined on the whole line to `domain`; a field with a
    /// bounded domain must already cover it and is returned unchanged.
    pub fn with_domain_if_unbounded(self, domain: (f64, f64)) -> Result<Self> {
        if !self.lo.is_finite() || !self.hi.is_finite() {
            return self.with_domain(domain.0, domain.1);
        }
        if domain.0 < self.lo || domain.1 > self.hi {
            return Err(Error::Argument(format!(
                "exponent defined on [{}, {}] does not cover [{}, {}]",
                self.lo, self.hi, domain.0, domain.1
            )));
        }
        Ok(self)
    }

    /// Overrides the sampled log-Hölder constant with an analytic one.
    pub fn with_c_log(mut self, c_log: f64) -> Self {
        self.c_log = c_log;
        self
    }

    pub fn kind(&self) -> &ExponentKind {
        &self.kind
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }

    pub fn p2(&self) -> f64 {
        self.p2
    }

    pub fn c_log(&self) -> f64 {
        self.c_log
    }

    pub fn is_constant(&self) -> bool {
        self.p1 == self.p2
    }

    fn check_domain(&self, x: f64) -> Result<f64> {
        let slack = if self.lo.is_finite() && self.hi.is_finite() {
            DOMAIN_SLACK * (self.hi - self.lo)
        } else {
            0.0
        };
        if x.is_nan() || x < self.lo - slack || x > self.hi + slack {
            return Err(Error::Domain { x, lo: self.lo, hi: self.hi });
        }
        Ok(x.clamp(self.lo, self.hi))
    }

    /// `p(x)`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let x = self.check_domain(x)?;
        Ok(match &self.kind {
            ExponentKind::Constant { value } => *value,
            ExponentKind::Hat { eps, a } => {
                if x.abs() >= *a {
                    2.0
                } else {
                    (1.0 - eps) / a * x.abs() + 1.0 + eps
                }
            }
            ExponentKind::PiecewiseLinear { xs, vals } => pwl_eval(xs, vals, x),
        })
    }

    /// `p(x) - 1`, evaluated without cancellation where the kind allows it.
    pub fn excess(&self, x: f64) -> Result<f64> {
        let x = self.check_domain(x)?;
        Ok(match &self.kind {
            ExponentKind::Hat { eps, a } => {
                if x.abs() >= *a {
                    1.0
                } else {
                    eps + (1.0 - eps) / a * x.abs()
                }
            }
            _ => self.eval(x)? - 1.0,
        })
    }

    /// Conjugate exponent `p'(x) = p / (p - 1)`; infinite where `p(x) = 1`.
    pub fn conjugate(&self, x: f64) -> Result<f64> {
        let p = self.eval(x)?;
        let e = self.excess(x)?;
        Ok(if e == 0.0 { f64::INFINITY } else { p / e })
    }

    /// Interior points where the field has a kink or a jump.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out: Vec<f64> = match &self.kind {
            ExponentKind::Constant { .. } => Vec::new(),
            ExponentKind::Hat { a, .. } => vec![-a, 0.0, *a],
            ExponentKind::PiecewiseLinear { xs, .. } => xs.clone(),
        };
        out.retain(|&x| x > self.lo && x < self.hi);
        out.dedup();
        out
    }

    /// Exact `(min, max)` of the field over `[lo, hi]`.
    ///
    /// Fields are piecewise linear, so the extremes sit at the interval ends or
    /// at interior breakpoints (both one-sided values at a jump).
    pub fn range_on(&self, lo: f64, hi: f64) -> Result<(f64, f64)> {
        let lo = self.check_domain(lo)?;
        let hi = self.check_domain(hi)?;
        let mut vals = vec![self.eval(lo)?, self.eval(hi)?];
        if let ExponentKind::PiecewiseLinear { xs, vals: v } = &self.kind {
            for (x, p) in xs.iter().zip(v) {
                if *x >= lo && *x <= hi {
                    vals.push(*p);
                }
            }
        }
        for b in self.breakpoints() {
            if b >= lo && b <= hi {
                vals.push(self.eval(b)?);
            }
        }
        let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Ok((min, max))
    }

    /// Sampled estimate of `sup |p(x) - p(y)| log(e + 1/|x - y|)` over dyadic pair distances.
    pub fn estimate_c_log(&self) -> f64 {
        if self.is_constant() || !self.lo.is_finite() || !self.hi.is_finite() {
            return 0.0;
        }
        let len = self.hi - self.lo;
        let grid = 256;
        let mut anchors: Vec<f64> = (0..=grid).map(|i| self.lo + len * i as f64 / grid as f64).collect();
        for b in self.breakpoints() {
            anchors.push(b);
        }
        let mut best: f64 = 0.0;
        for j in 0..40 {
            let d = len * 0.5f64.powi(j);
            let weight = (std::f64::consts::E + 1.0 / d).ln();
            for &x in &anchors {
                for y in [x - d, x + d, x - 0.5 * d] {
                    let z = if y == x - 0.5 * d { x + 0.5 * d } else { x };
                    if y < self.lo || y > self.hi || z < self.lo || z > self.hi {
                        continue;
                    }
                    if let (Ok(py), Ok(pz)) = (self.eval(y), self.eval(z)) {
                        best = best.max((py - pz).abs() * weight);
                    }
                }
            }
        }
        best
    }
}

fn pwl_eval(xs: &[f64], vals: &[f64], x: f64) -> f64 {
    let last = xs.len() - 1;
    if x >= xs[last] {
        return vals[last];
    }
    if x <= xs[0] && xs[0] < xs[1] {
        return vals[0];
    }
    // largest i with xs[i] <= x, so xs[i + 1] > x
    let i = xs.partition_point(|&b| b <= x).saturating_sub(1);
    let (x0, x1) = (xs[i], xs[i + 1]);
    let t = (x - x0) / (x1 - x0);
    vals[i] + t * (vals[i + 1] - vals[i])
}

impl fmt::Display for ExponentField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExponentKind::Constant { value } => write!(f, "kind=const value={value}"),
            ExponentKind::Hat { eps, a } => write!(f, "kind=hat eps={eps} a={a}"),
            ExponentKind::PiecewiseLinear { xs, vals } => {
                let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
                write!(f, "kind=pwl xs={} vals={}", join(xs), join(vals))
            }
        }
    }
}

impl FromStr for ExponentField {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut kind = None;
        let mut keys = std::collections::BTreeMap::new();
        for token in s.split_whitespace() {
            let (k, v) = token
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got `{token}`")))?;
            if k == "kind" {
                kind = Some(v.to_string());
            } else {
                keys.insert(k.to_string(), v.to_string());
            }
        }
        let num = |key: &str| -> Result<f64> {
            keys.get(key)
                .ok_or_else(|| Error::Parse(format!("missing `{key}`")))?
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("`{key}`: {e}")))
        };
        let list = |key: &str| -> Result<Vec<f64>> {
            keys.get(key)
                .ok_or_else(|| Error::Parse(format!("missing `{key}`")))?
                .split(',')
                .map(|v| v.trim().parse::<f64>().map_err(|e| Error::Parse(format!("`{key}`: {e}"))))
                .collect()
        };
        let field = match kind.as_deref() {
            Some("const") => ExponentField::constant(num("value")?)?,
            Some("hat") => ExponentField::hat(num("eps")?, num("a")?)?,
            Some("pwl") => ExponentField::piecewise_linear(list("xs")?, list("vals")?)?,
            Some(other) => return Err(Error::Parse(format!("unknown exponent kind `{other}`"))),
            None => return Err(Error::Parse("missing `kind`".into())),
        };
        match keys.get("c_log") {
            Some(c) => Ok(field.with_c_log(c.parse().map_err(|e| Error::Parse(format!("`c_log`: {e}")))?)),
            None => Ok(field),
        }
    }
}

/// Sobolev critical exponents `(p*, p_*)` in dimension `dim`.
pub fn critical_exponents(p: f64, dim: usize) -> (f64, f64) {
    let n = dim as f64;
    if p < n {
        (p * n / (n - p), p * (n - 1.0) / (n - p))
    } else {
        (f64::INFINITY, f64::INFINITY)
    }
}

/// A discrete measure: points with nonnegative weights.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WeightedSampleSet {
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl WeightedSampleSet {
    pub fn new(points: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::Argument("points and weights differ in length".into()));
        }
        if weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
            return Err(Error::Argument("sample weights must be finite and nonnegative".into()));
        }
        Ok(Self { points, weights })
    }

    /// Unit weights: the counting measure on `points`.
    pub fn counting(points: Vec<f64>) -> Self {
        let weights = vec![1.0; points.len()];
        Self { points, weights }
    }

    pub fn push(&mut self, x: f64, w: f64) {
        debug_assert!(w >= 0.0);
        self.points.push(x);
        self.weights.push(w);
    }

    pub fn extend(&mut self, other: &WeightedSampleSet) {
        self.points.extend_from_slice(&other.points);
        self.weights.extend_from_slice(&other.weights);
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Per-sample data for repeated modular evaluations `k -> rho(u / k)`.
struct ModularTerms {
    weights: Vec<f64>,
    log_abs: Vec<f64>,
    exps: Vec<f64>,
}

impl ModularTerms {
    fn new(set: &WeightedSampleSet, values: &[f64], field: &ExponentField) -> Result<Self> {
        if values.len() != set.len() {
            return Err(Error::Argument(format!(
                "{} values for {} sample points",
                values.len(),
                set.len()
            )));
        }
        let mut terms = Self { weights: Vec::new(), log_abs: Vec::new(), exps: Vec::new() };
        for ((&x, &w), &u) in set.points.iter().zip(&set.weights).zip(values) {
            let p = field.eval(x)?;
            if w > 0.0 && u != 0.0 {
                terms.weights.push(w);
                terms.log_abs.push(u.abs().ln());
                terms.exps.push(p);
            }
        }
        Ok(terms)
    }

    fn at_scale(&self, k: f64) -> f64 {
        let lk = k.ln();
        self.weights
            .iter()
            .zip(&self.log_abs)
            .zip(&self.exps)
            .map(|((w, lu), p)| w * (p * (lu - lk)).exp())
            .sum()
    }

    fn exponent_bounds(&self) -> (f64, f64) {
        let lo = self.exps.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = self.exps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }
}

/// `sum_i w_i |u_i|^{p(x_i)}`.
pub fn modular(set: &WeightedSampleSet, values: &[f64], field: &ExponentField) -> Result<f64> {
    if values.len() != set.len() {
        return Err(Error::Argument(format!("{} values for {} sample points", values.len(), set.len())));
    }
    let mut total = 0.0;
    for ((&x, &w), &u) in set.points.iter().zip(&set.weights).zip(values) {
        let p = field.eval(x)?;
        if u != 0.0 {
            total += w * u.abs().powf(p);
        }
    }
    Ok(total)
}

/// Luxemburg norm with the default relative tolerance.
pub fn luxemburg_norm(set: &WeightedSampleSet, values: &[f64], field: &ExponentField) -> Result<f64> {
    luxemburg_norm_with_tol(set, values, field, DEFAULT_NORM_TOL)
}

/// `inf { k > 0 : rho(u / k) <= 1 }` by geometric bisection.
///
/// The initial bracket comes from the modular/norm relations:
/// `rho^{1/p2} <= lambda <= rho^{1/p1}` when `rho >= 1` and the reverse when
/// `rho < 1`, with `p1, p2` the exponent range over the active samples. The
/// bracket is widened geometrically if rounding violates it.
pub fn luxemburg_norm_with_tol(
    set: &WeightedSampleSet,
    values: &[f64],
    field: &ExponentField,
    tol: f64,
) -> Result<f64> {
    let terms = ModularTerms::new(set, values, field)?;
    if terms.weights.is_empty() {
        return Ok(0.0);
    }
    let rho = terms.at_scale(1.0);
    let (p_lo, p_hi) = terms.exponent_bounds();
    let (a, b) = (rho.powf(1.0 / p_lo), rho.powf(1.0 / p_hi));
    let mut lo = a.min(b);
    let mut hi = a.max(b);
    if lo == hi {
        lo *= 1.0 - 1e-12;
        hi *= 1.0 + 1e-12;
    }
    while terms.at_scale(lo) < 1.0 {
        lo *= 0.5;
    }
    while terms.at_scale(hi) > 1.0 {
        hi *= 2.0;
    }
    for _ in 0..400 {
        if hi / lo - 1.0 <= tol {
            break;
        }
        let mid = (lo * hi).sqrt();
        if terms.at_scale(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo * hi).sqrt())
}

/// Outcome of checking the modular/norm relations for one function.
#[derive(Debug, Clone, PartialEq)]
pub struct ModularNormReport {
    pub lambda: f64,
    pub rho: f64,
    pub p1: f64,
    pub p2: f64,
    /// `lambda < 1 (= 1, > 1)` iff `rho < 1 (= 1, > 1)`.
    pub same_side_of_one: bool,
    /// `lambda^{p1} <= rho <= lambda^{p2}`, checked when `lambda >= 1`.
    pub large_norm_bounds: Option<bool>,
    /// `lambda^{p2} <= rho <= lambda^{p1}`, checked when `lambda <= 1`.
    pub small_norm_bounds: Option<bool>,
    /// Smallest relative margin over the checked inequalities (negative = violated).
    pub min_margin: f64,
}

impl ModularNormReport {
    pub fn passed(&self) -> bool {
        self.same_side_of_one
            && self.large_norm_bounds.unwrap_or(true)
            && self.small_norm_bounds.unwrap_or(true)
    }
}

pub fn check_modular_norm_relations(
    set: &WeightedSampleSet,
    values: &[f64],
    field: &ExponentField,
    slack: f64,
) -> Result<ModularNormReport> {
    let terms = ModularTerms::new(set, values, field)?;
    if terms.weights.is_empty() {
        return Err(Error::Argument("function vanishes on the sample set".into()));
    }
    let (p1, p2) = terms.exponent_bounds();
    let lambda = luxemburg_norm(set, values, field)?;
    let rho = terms.at_scale(1.0);
    let near = |v: f64| (v - 1.0).abs() <= slack;
    let same_side_of_one = near(lambda) || near(rho) || ((lambda < 1.0) == (rho < 1.0));
    let mut min_margin = f64::INFINITY;
    // relative margin of `a <= b`
    let mut le = |a: f64, b: f64| {
        let m = (b - a) / a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
        min_margin = min_margin.min(m);
        m >= -slack
    };
    let large_norm_bounds = (lambda >= 1.0 - slack).then(|| {
        let lower = le(lambda.powf(p1), rho);
        let upper = le(rho, lambda.powf(p2));
        lower && upper
    });
    let small_norm_bounds = (lambda <= 1.0 + slack).then(|| {
        let lower = le(lambda.powf(p2), rho);
        let upper = le(rho, lambda.powf(p1));
        lower && upper
    });
    Ok(ModularNormReport { lambda, rho, p1, p2, same_side_of_one, large_norm_bounds, small_norm_bounds, min_margin })
}

/// `max_{x, y in I} h^{alpha (p(x) - p(y))}` with `h = diam(I)`.
pub fn log_holder_bound(field: &ExponentField, alpha: f64, interval: (f64, f64)) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::Argument(format!("alpha must be positive, got {alpha}")));
    }
    let (lo, hi) = interval;
    if !(lo < hi) {
        return Err(Error::Argument(format!("empty interval ({lo}, {hi})")));
    }
    let (pmin, pmax) = field.range_on(lo, hi)?;
    let h = hi - lo;
    let gap = pmax - pmin;
    Ok(h.powf(alpha * gap).max(h.powf(-alpha * gap)))
}

/// Values of [`log_holder_bound`] on the shrinking intervals `[anchor - 2^-j, anchor]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogHolderSweep {
    pub diameters: Vec<f64>,
    pub values: Vec<f64>,
    /// Set when the values keep growing as the intervals shrink, which a
    /// log-Hölder exponent cannot do.
    pub flagged: bool,
}

pub fn log_holder_sweep(field: &ExponentField, alpha: f64, anchor: f64, levels: usize) -> Result<LogHolderSweep> {
    if levels < 2 {
        return Err(Error::Argument("a sweep needs at least two levels".into()));
    }
    let (dlo, _) = field.domain();
    let mut diameters = Vec::with_capacity(levels);
    let mut values = Vec::with_capacity(levels);
    for j in 1..=levels {
        let lo = (anchor - 0.5f64.powi(j as i32)).max(dlo);
        diameters.push(anchor - lo);
        values.push(log_holder_bound(field, alpha, (lo, anchor))?);
    }
    let mid = values[levels / 2];
    let last = values[levels - 1];
    let flagged = last > 2.0 * mid;
    Ok(LogHolderSweep { diameters, values, flagged })
}

/// One of the pointwise monotonicity inequalities at `(eta, xi, p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InequalityCheck {
    pub lhs: f64,
    /// Right-hand side with the constant set to 1.
    pub rhs_unit: f64,
    /// Smallest constant making the inequality hold at this point.
    pub min_constant: f64,
}

impl InequalityCheck {
    fn new(lhs: f64, rhs_unit: f64) -> Self {
        let min_constant = if lhs == 0.0 {
            0.0
        } else if rhs_unit <= 0.0 {
            f64::INFINITY
        } else {
            lhs / rhs_unit
        };
        Self { lhs, rhs_unit, min_constant }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointwiseReport {
    /// `(|eta|^{p-2} eta - |xi|^{p-2} xi)(eta - xi)`.
    pub monotone_product: f64,
    /// `|eta - xi|^p <= C * product`, for `p >= 2`.
    pub degenerate: Option<InequalityCheck>,
    /// `|eta - xi|^2 (|eta| + |xi|)^{p-2} <= C * product`, for `p < 2`.
    pub singular: Option<InequalityCheck>,
    /// `|eta|^p <= 2^{p-1} (|eta - xi|^p + |xi|^p)`.
    pub quasi_triangle: InequalityCheck,
    pub quasi_triangle_holds: bool,
}

fn signed_power(t: f64, s: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        t.signum() * t.abs().powf(s)
    }
}

pub fn pointwise_inequalities(eta: f64, xi: f64, px: f64) -> Result<PointwiseReport> {
    if !(px >= 1.0) {
        return Err(Error::Argument(format!("exponent {px} must be >= 1")));
    }
    let diff = eta - xi;
    let product = (signed_power(eta, px - 1.0) - signed_power(xi, px - 1.0)) * diff;
    let degenerate = (px >= 2.0).then(|| InequalityCheck::new(diff.abs().powf(px), product));
    let singular = (px < 2.0).then(|| {
        let base = eta.abs() + xi.abs();
        let lhs = if diff == 0.0 { 0.0 } else { diff * diff * base.powf(px - 2.0) };
        InequalityCheck::new(lhs, product)
    });
    let rhs = diff.abs().powf(px) + xi.abs().powf(px);
    let quasi_triangle = InequalityCheck::new(eta.abs().powf(px), rhs);
    let bound = 2f64.powf(px - 1.0);
    let quasi_triangle_holds = quasi_triangle.lhs <= bound * rhs * (1.0 + 1e-14);
    Ok(PointwiseReport { monotone_product: product, degenerate, singular, quasi_triangle, quasi_triangle_holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::QuadratureRule;

    fn gauss_set(lo: f64, hi: f64, panels: usize, n: usize) -> WeightedSampleSet {
        let rule = QuadratureRule::gauss_legendre(n);
        let mut set = WeightedSampleSet::default();
        let w = (hi - lo) / panels as f64;
        for i in 0..panels {
            for (x, wt) in rule.mapped(lo + w * i as f64, lo + w * (i + 1) as f64) {
                set.push(x, wt);
            }
        }
        set
    }

    #[test]
    fn hat_values() {
        let p = ExponentField::hat(0.01, 0.01).unwrap();
        assert_eq!(p.eval(0.0).unwrap(), 1.01);
        assert_eq!(p.eval(0.5).unwrap(), 2.0);
        assert_eq!(p.eval(0.01).unwrap(), 2.0);
        assert_eq!(p.eval(-0.01).unwrap(), 2.0);
        assert_eq!(p.excess(0.0).unwrap(), 0.01);
        assert_eq!(p.p1(), 1.01);
        assert_eq!(p.p2(), 2.0);
        assert!(matches!(p.eval(1.5), Err(Error::Domain { .. })));
        // continuity at the kink
        let left = p.eval(0.01 - 1e-13).unwrap();
        assert!((left - 2.0).abs() < 1e-9);
    }

    #[test]
    fn constant_values() {
        let p = ExponentField::constant(2.0).unwrap();
        assert_eq!(p.eval(0.3).unwrap(), 2.0);
        assert_eq!(p.c_log(), 0.0);
        assert!(ExponentField::constant(0.5).is_err());
    }

    #[test]
    fn conjugate_identity() {
        let p = ExponentField::hat(0.2, 0.5).unwrap();
        for i in 0..=100 {
            let x = -1.0 + 0.02 * i as f64;
            let (pv, q) = (p.eval(x).unwrap(), p.conjugate(x).unwrap());
            assert!((1.0 / pv + 1.0 / q - 1.0).abs() < 1e-14);
        }
        let one = ExponentField::constant(1.0).unwrap();
        assert_eq!(one.conjugate(0.0).unwrap(), f64::INFINITY);
    }

    #[test]
    fn critical_exponents_in_one_dimension_are_infinite() {
        assert_eq!(critical_exponents(1.0, 1), (f64::INFINITY, f64::INFINITY));
        let (ps, pt) = critical_exponents(1.5, 2);
        assert!((ps - 6.0).abs() < 1e-14 && (pt - 3.0).abs() < 1e-14);
    }

    #[test]
    fn pwl_jump_is_right_continuous() {
        let p = ExponentField::piecewise_linear(vec![0.0, 0.5, 0.5, 1.0], vec![1.5, 1.5, 3.0, 3.0]).unwrap();
        assert_eq!(p.eval(0.49).unwrap(), 1.5);
        assert_eq!(p.eval(0.5).unwrap(), 3.0);
        assert_eq!(p.range_on(0.4, 0.5).unwrap(), (1.5, 3.0));
    }

    #[test]
    fn text_round_trip() {
        for s in ["kind=hat eps=0.01 a=0.01", "kind=const value=2", "kind=pwl xs=-1,0,1 vals=2,1.5,2"] {
            let f: ExponentField = s.parse().unwrap();
            assert_eq!(f.to_string(), s);
        }
        assert!("kind=wat".parse::<ExponentField>().is_err());
        assert!("kind=hat eps=0.01".parse::<ExponentField>().is_err());
    }

    #[test]
    fn modular_examples() {
        let p2 = ExponentField::constant(2.0).unwrap();
        let set = gauss_set(0.0, 1.0, 1, 3);
        let vals: Vec<f64> = set.points().to_vec();
        assert!((modular(&set, &vals, &p2).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let set = gauss_set(-1.0, 1.0, 1, 2);
        assert!((modular(&set, &[1.0, 1.0], &p2).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn luxemburg_examples() {
        let p2 = ExponentField::constant(2.0).unwrap();
        let set = gauss_set(0.0, 1.0, 1, 2);
        assert!((luxemburg_norm(&set, &[1.0, 1.0], &p2).unwrap() - 1.0).abs() < 1e-12);
        let set = gauss_set(-1.0, 1.0, 1, 2);
        let got = luxemburg_norm(&set, &[1.0, 1.0], &p2).unwrap();
        assert!((got - 2f64.sqrt()).abs() < 1e-12 * 2f64.sqrt());
        assert_eq!(luxemburg_norm(&set, &[0.0, 0.0], &p2).unwrap(), 0.0);
    }

    #[test]
    fn modular_norm_relation_examples() {
        let p = ExponentField::hat(0.01, 0.01).unwrap();
        let set = gauss_set(-1.0, 1.0, 40, 6);
        let base: Vec<f64> = set.points().iter().map(|x| 1.0 + x.sin()).collect();
        let lambda = luxemburg_norm(&set, &base, &p).unwrap();
        // scaled to unit norm
        let unit: Vec<f64> = base.iter().map(|v| v / lambda).collect();
        let rep = check_modular_norm_relations(&set, &unit, &p, 1e-9).unwrap();
        assert!((rep.rho - 1.0).abs() < 1e-9 && rep.passed());
        // scaled to norm 2
        let two: Vec<f64> = unit.iter().map(|v| 2.0 * v).collect();
        let rep = check_modular_norm_relations(&set, &two, &p, 1e-9).unwrap();
        assert!(rep.passed());
        assert!(rep.rho >= 2f64.powf(1.01) * (1.0 - 1e-9) && rep.rho <= 4.0 * (1.0 + 1e-9));
        // norm 1/2 at constant p = 2
        let p2 = ExponentField::constant(2.0).unwrap();
        let lambda = luxemburg_norm(&set, &base, &p2).unwrap();
        let half: Vec<f64> = base.iter().map(|v| 0.5 * v / lambda).collect();
        let rep = check_modular_norm_relations(&set, &half, &p2, 1e-9).unwrap();
        assert!((rep.rho - 0.25).abs() < 1e-11 && rep.passed());
    }

    #[test]
    fn log_holder_examples() {
        let c = ExponentField::constant(3.0).unwrap();
        assert_eq!(log_holder_bound(&c, 1.0, (0.1, 0.4)).unwrap(), 1.0);

        let hat = ExponentField::hat(0.01, 0.01).unwrap();
        let sweep = log_holder_sweep(&hat, 1.0, 0.0, 20).unwrap();
        let max = sweep.values.iter().cloned().fold(0.0, f64::max);
        assert!(!sweep.flagged);
        // closed form for h >= a: h^{-(1 - eps)}, largest at h = a-ish
        assert!(max < 0.0078125f64.powf(-0.99) * 1.0001, "max={max}");

        let jump = ExponentField::piecewise_linear(vec![-1.0, 0.0, 0.0, 1.0], vec![1.5, 1.5, 2.0, 2.0]).unwrap();
        let sweep = log_holder_sweep(&jump, 1.0, 0.0, 20).unwrap();
        assert!(sweep.flagged);
        for (h, v) in sweep.diameters.iter().zip(&sweep.values) {
            assert!((v / h.powf(-0.5) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pointwise_examples() {
        let r = pointwise_inequalities(1.0, 0.0, 2.0).unwrap();
        let d = r.degenerate.unwrap();
        assert_eq!((d.lhs, d.rhs_unit, d.min_constant), (1.0, 1.0, 1.0));
        let r = pointwise_inequalities(2.0, 1.0, 3.0).unwrap();
        let d = r.degenerate.unwrap();
        assert_eq!(d.lhs, 1.0);
        // (|2| 2 - |1| 1)(2 - 1) = 3
        assert!((d.rhs_unit - 3.0).abs() < 1e-14);
        assert!((d.min_constant - 1.0 / 3.0).abs() < 1e-15);
        let r = pointwise_inequalities(0.7, 0.7, 1.3).unwrap();
        assert_eq!(r.singular.unwrap().lhs, 0.0);
        assert_eq!(r.quasi_triangle.lhs, 0.7f64.powf(1.3));
        assert!(r.quasi_triangle_holds);
    }

    #[test]
    fn c_log_of_hat_is_finite_and_positive() {
        let p = ExponentField::hat(0.01, 0.01).unwrap();
        assert!(p.c_log() > 0.0 && p.c_log().is_finite());
    }
}
