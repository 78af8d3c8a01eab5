//! BFGS minimization and the DG / conforming solvers built on it.
//!
//! The line search enforces the strong Wolfe conditions by bracketing and
//! zooming. Problems with up to [`BfgsConfig::dense_limit`] unknowns keep a
//! dense inverse Hessian; larger ones switch to the limited-memory two-loop
//! recursion.

use std::io::Write;
use std::path::Path;
use std::sync::Arc;
use std::time::{Duration, Instant};

use crate::broken_space::{fmt_float, write_atomic, BrokenFunction, Continuity};
use crate::error::{Error, Result};
use crate::functional::{DiscreteProblem, FunctionalSpec, TermBreakdown};
use crate::mesh::{BoundaryKind, End, Mesh1D};

#[derive(Debug, Clone, PartialEq)]
pub enum InitialGuess {
    Zero,
    /// The straight line through the Dirichlet data (a constant with one
    /// Dirichlet end, zero with none).
    LinearInterpolant,
    Supplied(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BfgsConfig {
    /// Stop once `|g|_inf <= grad_tol * (1 + |g_0|_inf)`.
    pub grad_tol: f64,
    /// Also stop once `|g|_inf <= abs_grad_floor`.
    pub abs_grad_floor: f64,
    pub max_iters: usize,
    pub c1: f64,
    pub c2: f64,
    pub initial_guess: InitialGuess,
    pub dense_limit: usize,
    pub memory: usize,
    /// Function evaluations allowed per line search.
    pub max_line_search: usize,
    /// Consecutive iterations with a relative decrease below `1e-15` before
    /// giving up.
    pub stall_iters: usize,
}

impl Default for BfgsConfig {
    fn default() -> Self {
        Self {
            grad_tol: 1e-8,
            abs_grad_floor: 1e-300,
            max_iters: 10_000,
            c1: 1e-4,
            c2: 0.9,
            initial_guess: InitialGuess::LinearInterpolant,
            dense_limit: 2000,
            memory: 20,
            max_line_search: 60,
            stall_iters: 20,
        }
    }
}

impl BfgsConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.c1 && self.c1 < self.c2 && self.c2 < 1.0) {
            return Err(Error::Config(format!("need 0 < c1 < c2 < 1, got c1 = {}, c2 = {}", self.c1, self.c2)));
        }
        if !(self.grad_tol > 0.0) || !(self.abs_grad_floor > 0.0) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        if self.memory == 0 || self.max_line_search < 2 {
            return Err(Error::Config("memory and line-search budget must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    GradientTolerance,
    /// The value stopped decreasing at working precision.
    NoProgress,
    MaxIterations,
    LineSearchFailed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub value: f64,
    pub grad_norm: f64,
    pub step: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub x: Vec<f64>,
    pub value: f64,
    pub breakdown: Option<TermBreakdown>,
    pub iterations: usize,
    pub evaluations: usize,
    pub history: Vec<IterationRecord>,
    pub line_search_failures: usize,
    pub termination: Termination,
    pub initial_grad_norm: f64,
    pub final_grad_norm: f64,
    pub wall_time: Duration,
}

impl SolveReport {
    pub fn converged(&self) -> bool {
        self.termination == Termination::GradientTolerance
    }

    pub fn grad_history(&self) -> Vec<f64> {
        self.history.iter().map(|r| r.grad_norm).collect()
    }

    pub fn value_history(&self) -> Vec<f64> {
        self.history.iter().map(|r| r.value).collect()
    }

    /// `iteration,value,grad_norm,step,evaluations`.
    pub fn write_trace_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["iteration", "value", "grad_norm", "step", "evaluations"])?;
        for r in &self.history {
            w.write_record([
                r.iteration.to_string(),
                fmt_float(r.value),
                fmt_float(r.grad_norm),
                fmt_float(r.step),
                r.evaluations.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_trace_csv(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::new();
        self.write_trace_csv(&mut buf)?;
        write_atomic(path, &buf)
    }
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Curvature model: dense inverse Hessian or a limited-memory history.
enum Model {
    Dense { n: usize, h: Vec<f64>, initialized: bool },
    Limited { m: usize, pairs: std::collections::VecDeque<(Vec<f64>, Vec<f64>, f64)>, gamma: f64 },
}

impl Model {
    fn new(n: usize, cfg: &BfgsConfig) -> Self {
        if n <= cfg.dense_limit {
            let mut h = vec![0.0; n * n];
            for i in 0..n {
                h[i * n + i] = 1.0;
            }
            Model::Dense { n, h, initialized: false }
        } else {
            Model::Limited { m: cfg.memory, pairs: Default::default(), gamma: 1.0 }
        }
    }

    fn reset(&mut self) {
        match self {
            Model::Dense { n, h, initialized } => {
                h.iter_mut().for_each(|v| *v = 0.0);
                for i in 0..*n {
                    h[i * *n + i] = 1.0;
                }
                *initialized = false;
            }
            Model::Limited { pairs, gamma, .. } => {
                pairs.clear();
                *gamma = 1.0;
            }
        }
    }

    fn is_fresh(&self) -> bool {
        match self {
            Model::Dense { initialized, .. } => !initialized,
            Model::Limited { pairs, .. } => pairs.is_empty(),
        }
    }

    /// `-H g`.
    fn direction(&self, g: &[f64]) -> Vec<f64> {
        match self {
            Model::Dense { n, h, .. } => (0..*n).map(|i| -dot(&h[i * n..(i + 1) * n], g)).collect(),
            Model::Limited { pairs, gamma, .. } => {
                let mut q = g.to_vec();
                let mut alphas = Vec::with_capacity(pairs.len());
                for (s, y, rho) in pairs.iter().rev() {
                    let a = rho * dot(s, &q);
                    q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
                    alphas.push(a);
                }
                q.iter_mut().for_each(|v| *v *= *gamma);
                for ((s, y, rho), a) in pairs.iter().zip(alphas.into_iter().rev()) {
                    let b = rho * dot(y, &q);
                    q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (a - b) * si);
                }
                q.iter_mut().for_each(|v| *v = -*v);
                q
            }
        }
    }

    /// Returns false when the pair fails the curvature condition and is skipped.
    fn update(&mut self, s: Vec<f64>, y: Vec<f64>) -> bool {
        let sy = dot(&s, &y);
        let yy = dot(&y, &y);
        if !(sy > 1e-14 * dot(&s, &s).sqrt() * yy.sqrt()) || !sy.is_finite() {
            return false;
        }
        let rho = 1.0 / sy;
        match self {
            Model::Dense { n, h, initialized } => {
                let n = *n;
                if !*initialized {
                    let gamma = sy / yy;
                    h.iter_mut().for_each(|v| *v = 0.0);
                    for i in 0..n {
                        h[i * n + i] = gamma;
                    }
                    *initialized = true;
                }
                let hy: Vec<f64> = (0..n).map(|i| dot(&h[i * n..(i + 1) * n], &y)).collect();
                let yhy = dot(&y, &hy);
                let c = rho * rho * yhy + rho;
                for i in 0..n {
                    for j in 0..n {
                        h[i * n + j] += c * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
                    }
                }
            }
            Model::Limited { m, pairs, gamma } => {
                *gamma = sy / yy;
                if pairs.len() == *m {
                    pairs.pop_front();
                }
                pairs.push_back((s, y, rho));
            }
        }
        true
    }
}

struct Probe {
    alpha: f64,
    f: f64,
    d: f64,
    x: Vec<f64>,
    g: Vec<f64>,
}

enum Search {
    /// Strong Wolfe step.
    Wolfe(Probe),
    /// Sufficient decrease only.
    Armijo(Probe),
    Failed,
}

/// Strong Wolfe line search by bracketing and zooming.
fn line_search<F: FnMut(&[f64]) -> (f64, Vec<f64>)>(
    f: &mut F,
    x: &[f64],
    fx: f64,
    gx: &[f64],
    p: &[f64],
    alpha0: f64,
    cfg: &BfgsConfig,
    evals: &mut usize,
) -> Search {
    let d0 = dot(gx, p);
    if !(d0 < 0.0) {
        return Search::Failed;
    }
    let mut probe = |alpha: f64, evals: &mut usize| -> Probe {
        let xn: Vec<f64> = x.iter().zip(p).map(|(a, b)| a + alpha * b).collect();
        let (fv, g) = f(&xn);
        *evals += 1;
        let fv = if fv.is_finite() { fv } else { f64::INFINITY };
        let d = if fv.is_finite() { dot(&g, p) } else { f64::NAN };
        Probe { alpha, f: fv, d, x: xn, g }
    };
    // Once the decrease is lost in rounding, sufficient decrease is read off
    // the directional derivative instead (the approximate Wolfe condition of
    // Hager and Zhang), letting the value drift by at most the rounding band.
    let noise = 1e-13 * fx.abs();
    let armijo = |pr: &Probe| {
        pr.f <= fx + cfg.c1 * pr.alpha * d0 || ((pr.f - fx).abs() <= noise && pr.d <= (1.0 - 2.0 * cfg.c1) * -d0)
    };
    let curvature = |pr: &Probe| pr.d.abs() <= -cfg.c2 * d0;
    // `a` is no better than `b`; inside the rounding band the slope decides
    let no_better = |a: &Probe, b: &Probe| {
        if (a.f - b.f).abs() <= noise {
            a.f > b.f || a.d >= 0.0
        } else {
            a.f >= b.f
        }
    };

    let start = Probe { alpha: 0.0, f: fx, d: d0, x: x.to_vec(), g: gx.to_vec() };
    let mut prev = start;
    let mut alpha = alpha0;
    let mut budget = cfg.max_line_search;
    let (mut lo, mut hi);
    let mut first = true;
    loop {
        if budget == 0 {
            return if prev.alpha > 0.0 && prev.f < fx { Search::Armijo(prev) } else { Search::Failed };
        }
        budget -= 1;
        let cur = probe(alpha, evals);
        if !armijo(&cur) || (!first && no_better(&cur, &prev)) {
            lo = prev;
            hi = cur;
            break;
        }
        if curvature(&cur) {
            return Search::Wolfe(cur);
        }
        if cur.d >= 0.0 {
            lo = cur;
            hi = prev;
            break;
        }
        first = false;
        alpha = 2.0 * cur.alpha;
        prev = cur;
    }
    // zoom: lo satisfies sufficient decrease and has the lowest value so far
    while budget > 0 {
        budget -= 1;
        let (a, b) = (lo.alpha, hi.alpha);
        let width = (b - a).abs();
        if width <= 1e-16 * a.abs().max(b.abs()) {
            break;
        }
        // minimizer of the quadratic through f(lo), f'(lo), f(hi)
        let mut trial = f64::NAN;
        if hi.f.is_finite() {
            let denom = 2.0 * (hi.f - lo.f - lo.d * (b - a));
            if denom != 0.0 {
                trial = a - lo.d * (b - a) * (b - a) / denom;
            }
        }
        let (left, right) = (a.min(b), a.max(b));
        if !trial.is_finite() || trial < left + 0.1 * width || trial > right - 0.1 * width {
            trial = 0.5 * (a + b);
        }
        let cur = probe(trial, evals);
        if !armijo(&cur) || no_better(&cur, &lo) {
            hi = cur;
        } else {
            if curvature(&cur) {
                return Search::Wolfe(cur);
            }
            if cur.d * (hi.alpha - lo.alpha) >= 0.0 {
                hi = lo;
            }
            lo = cur;
        }
    }
    if lo.alpha > 0.0 && lo.f < fx {
        Search::Armijo(lo)
    } else {
        Search::Failed
    }
}

/// Minimizes `f`, which returns the value and gradient at a point.
pub fn bfgs_minimize<F: FnMut(&[f64]) -> (f64, Vec<f64>)>(mut f: F, x0: Vec<f64>, cfg: &BfgsConfig) -> Result<SolveReport> {
    cfg.validate()?;
    let started = Instant::now();
    let n = x0.len();
    let mut x = x0;
    let (mut fx, mut gx) = f(&x);
    let mut evaluations = 1;
    if !fx.is_finite() || gx.iter().any(|v| !v.is_finite()) {
        return Err(Error::Diverged(format!("non-finite value {fx} at the initial point")));
    }
    let g0 = inf_norm(&gx);
    let target = (cfg.grad_tol * (1.0 + g0)).max(cfg.abs_grad_floor);
    let mut history = vec![IterationRecord { iteration: 0, value: fx, grad_norm: g0, step: 0.0, evaluations }];
    let mut model = Model::new(n, cfg);
    let mut failures = 0;
    let mut stalled = 0;
    let mut iterations = 0;
    let scale_x = inf_norm(&x).max(1.0);

    let termination = loop {
        let gn = inf_norm(&gx);
        if gn <= target || n == 0 {
            break Termination::GradientTolerance;
        }
        if iterations >= cfg.max_iters {
            break Termination::MaxIterations;
        }
        let mut p = model.direction(&gx);
        if !(dot(&p, &gx) < 0.0) {
            model.reset();
            p = model.direction(&gx);
        }
        let alpha0 = if model.is_fresh() { (0.1 * scale_x / inf_norm(&p)).min(1.0) } else { 1.0 };
        let mut outcome = line_search(&mut f, &x, fx, &gx, &p, alpha0, cfg, &mut evaluations);
        if matches!(outcome, Search::Failed) && !model.is_fresh() {
            failures += 1;
            model.reset();
            p = model.direction(&gx);
            let alpha0 = (0.1 * scale_x / inf_norm(&p)).min(1.0);
            outcome = line_search(&mut f, &x, fx, &gx, &p, alpha0, cfg, &mut evaluations);
        }
        let probe = match outcome {
            Search::Wolfe(pr) => pr,
            Search::Armijo(pr) => {
                failures += 1;
                pr
            }
            Search::Failed => {
                failures += 1;
                break if gn <= target * 1e3 { Termination::NoProgress } else { Termination::LineSearchFailed };
            }
        };
        if probe.g.iter().any(|v| !v.is_finite()) {
            return Err(Error::Diverged("non-finite gradient".into()));
        }
        iterations += 1;
        let s: Vec<f64> = probe.x.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = probe.g.iter().zip(&gx).map(|(a, b)| a - b).collect();
        let decrease = fx - probe.f;
        if decrease <= 1e-15 * fx.abs() {
            stalled += 1;
        } else {
            stalled = 0;
        }
        model.update(s, y);
        x = probe.x;
        fx = probe.f;
        gx = probe.g;
        history.push(IterationRecord {
            iteration: iterations,
            value: fx,
            grad_norm: inf_norm(&gx),
            step: probe.alpha,
            evaluations,
        });
        if stalled >= cfg.stall_iters {
            break Termination::NoProgress;
        }
    };
    let final_grad_norm = inf_norm(&gx);
    Ok(SolveReport {
        x,
        value: fx,
        breakdown: None,
        iterations,
        evaluations,
        history,
        line_search_failures: failures,
        termination,
        initial_grad_norm: g0,
        final_grad_norm,
        wall_time: started.elapsed(),
    })
}

/// Largest Dirichlet datum in magnitude, at least 1; used to scale unknowns.
fn data_scale(mesh: &Mesh1D, spec: &FunctionalSpec) -> f64 {
    mesh.ends(BoundaryKind::Dirichlet).iter().map(|&e| spec.dirichlet.at(e).abs()).fold(1.0, f64::max)
}

/// The default starting function in the requested layout.
pub fn initial_function(
    mesh: &Arc<Mesh1D>,
    degree: usize,
    continuity: Continuity,
    spec: &FunctionalSpec,
    guess: &InitialGuess,
) -> Result<BrokenFunction> {
    match guess {
        InitialGuess::Zero => BrokenFunction::zeros(mesh.clone(), degree, continuity),
        InitialGuess::Supplied(x) => BrokenFunction::new(mesh.clone(), degree, continuity, x.clone()),
        InitialGuess::LinearInterpolant => {
            let (lo, hi) = mesh.domain();
            let ends = mesh.ends(BoundaryKind::Dirichlet);
            let (l, r) = (spec.dirichlet.left, spec.dirichlet.right);
            let line: Box<dyn Fn(f64) -> f64> = match ends.as_slice() {
                [End::Left, End::Right] => Box::new(move |x| l + (r - l) * (x - lo) / (hi - lo)),
                [End::Left] => Box::new(move |_| l),
                [End::Right] => Box::new(move |_| r),
                _ => Box::new(|_| 0.0),
            };
            let mut u = BrokenFunction::interpolate(mesh.clone(), degree, continuity, line)?;
            // boundary traces carry the data exactly
            let n = u.coeffs().len();
            if ends.contains(&End::Left) {
                u.coeffs_mut()[0] = l;
            }
            if ends.contains(&End::Right) {
                u.coeffs_mut()[n - 1] = r;
            }
            Ok(u)
        }
    }
}

/// Minimizes the scaled problem `f(s y) / f_s` over `y` and maps back.
fn minimize_scaled<F: Fn(&[f64]) -> (f64, Vec<f64>)>(
    f: F,
    x0: Vec<f64>,
    scale: f64,
    cfg: &BfgsConfig,
) -> Result<SolveReport> {
    let (f0, _) = f(&x0);
    if !f0.is_finite() {
        return Err(Error::Diverged(format!("non-finite value {f0} at the initial point")));
    }
    let fs = f0.abs().max(f64::MIN_POSITIVE.sqrt());
    let y0: Vec<f64> = x0.iter().map(|v| v / scale).collect();
    let scaled = |y: &[f64]| {
        let x: Vec<f64> = y.iter().map(|v| v * scale).collect();
        let (v, g) = f(&x);
        (v / fs, g.into_iter().map(|gi| gi * scale / fs).collect())
    };
    let mut report = bfgs_minimize(scaled, y0, cfg)?;
    report.x.iter_mut().for_each(|v| *v *= scale);
    report.value *= fs;
    let gscale = fs / scale;
    report.initial_grad_norm *= gscale;
    report.final_grad_norm *= gscale;
    for r in &mut report.history {
        r.value *= fs;
        r.grad_norm *= gscale;
    }
    Ok(report)
}

/// Minimizes `I_h` over broken polynomials of degree `k`.
pub fn solve_dg(spec: &FunctionalSpec, mesh: Arc<Mesh1D>, k: usize, cfg: &BfgsConfig) -> Result<SolveReport> {
    let problem = DiscreteProblem::dg(mesh.clone(), k, spec)?;
    let x0 = initial_function(&mesh, k, Continuity::Broken, spec, &cfg.initial_guess)?.into_coeffs();
    let scale = data_scale(&mesh, spec);
    let mut report = minimize_scaled(|x| problem.value_and_gradient(x), x0, scale, cfg)?;
    report.breakdown = Some(problem.breakdown(&report.x));
    Ok(report)
}

/// Minimizes `I` over continuous polynomials of degree `k` with the Dirichlet
/// coefficients eliminated.
pub fn solve_cg(spec: &FunctionalSpec, mesh: Arc<Mesh1D>, k: usize, cfg: &BfgsConfig) -> Result<SolveReport> {
    let problem = DiscreteProblem::cg(mesh.clone(), k, spec)?;
    let full0 = initial_function(&mesh, k, Continuity::Continuous, spec, &cfg.initial_guess)?.into_coeffs();
    let mut pinned = vec![None; problem.n_dofs()];
    for &(i, v) in problem.pinned() {
        pinned[i] = Some(v);
    }
    let free: Vec<usize> = (0..problem.n_dofs()).filter(|&i| pinned[i].is_none()).collect();
    let expand = |y: &[f64]| -> Vec<f64> {
        let mut x: Vec<f64> = pinned.iter().map(|v| v.unwrap_or(0.0)).collect();
        for (&i, &v) in free.iter().zip(y) {
            x[i] = v;
        }
        x
    };
    let y0: Vec<f64> = free.iter().map(|&i| full0[i]).collect();
    let scale = data_scale(&mesh, spec);
    let reduced = |y: &[f64]| {
        let (v, g) = problem.value_and_gradient(&expand(y));
        (v, free.iter().map(|&i| g[i]).collect())
    };
    let mut report = minimize_scaled(reduced, y0, scale, cfg)?;
    report.x = expand(&report.x);
    report.breakdown = Some(problem.breakdown(&report.x));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::ExponentField;
    use crate::mesh::DirichletData;

    fn rosenbrock(x: &[f64]) -> (f64, Vec<f64>) {
        let (a, b) = (x[0], x[1]);
        let f = (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2);
        let g = vec![-2.0 * (1.0 - a) - 400.0 * a * (b - a * a), 200.0 * (b - a * a)];
        (f, g)
    }

    #[test]
    fn rosenbrock_from_the_classic_start() {
        let cfg = BfgsConfig { grad_tol: 1e-12, ..Default::default() };
        let r = bfgs_minimize(rosenbrock, vec![-1.2, 1.0], &cfg).unwrap();
        assert!((r.x[0] - 1.0).abs() < 1e-6 && (r.x[1] - 1.0).abs() < 1e-6, "{:?}", r.x);
        let values = r.value_history();
        assert!(values.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn quadratic_terminates_quickly() {
        let diag = [1.0, 2.0, 5.0, 10.0, 20.0];
        let f = |x: &[f64]| {
            let v = x.iter().zip(diag).map(|(xi, d)| 0.5 * d * (xi - 1.0) * (xi - 1.0)).sum();
            (v, x.iter().zip(diag).map(|(xi, d)| d * (xi - 1.0)).collect())
        };
        let cfg = BfgsConfig { c2: 1e-3, grad_tol: 1e-9, ..Default::default() };
        let r = bfgs_minimize(f, vec![0.0; 5], &cfg).unwrap();
        assert!(r.converged());
        assert!(r.iterations <= 6, "iterations = {}", r.iterations);
    }

    #[test]
    fn limited_memory_path() {
        let cfg = BfgsConfig { dense_limit: 0, grad_tol: 1e-12, ..Default::default() };
        let r = bfgs_minimize(rosenbrock, vec![-1.2, 1.0], &cfg).unwrap();
        assert!((r.x[0] - 1.0).abs() < 1e-6 && (r.x[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn bad_line_search_parameters_are_rejected() {
        let cfg = BfgsConfig { c1: 0.5, c2: 0.1, ..Default::default() };
        assert!(matches!(bfgs_minimize(rosenbrock, vec![0.0, 0.0], &cfg), Err(Error::Config(_))));
    }

    #[test]
    fn quadratic_dg_is_symmetric_and_below_the_candidate() {
        let b = 4.0;
        let mesh = Arc::new(Mesh1D::uniform(-1.0, 1.0, 4, BoundaryKind::Dirichlet, BoundaryKind::Dirichlet).unwrap());
        let spec = FunctionalSpec::new(ExponentField::constant(2.0).unwrap(), DirichletData { left: -b, right: b });
        let r = solve_dg(&spec, mesh, 1, &BfgsConfig::default()).unwrap();
        assert!(r.converged());
        assert!(r.value <= 2.0 * b * b * (1.0 + 1e-12));
        let n = r.x.len();
        for i in 0..n {
            assert!((r.x[i] + r.x[n - 1 - i]).abs() < 1e-6);
        }
    }

    #[test]
    fn quadratic_cg_is_exact() {
        let b = 7.0;
        let mesh = Arc::new(Mesh1D::uniform(-1.0, 1.0, 6, BoundaryKind::Dirichlet, BoundaryKind::Dirichlet).unwrap());
        let spec = FunctionalSpec::new(ExponentField::constant(2.0).unwrap(), DirichletData { left: -b, right: b });
        let cfg = BfgsConfig { initial_guess: InitialGuess::Zero, ..Default::default() };
        let r = solve_cg(&spec, mesh.clone(), 1, &cfg).unwrap();
        for (x, v) in mesh.nodes().iter().zip(&r.x) {
            assert!((v - b * x).abs() <= 1e-8 * b);
        }
    }
}
