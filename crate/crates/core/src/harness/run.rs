//! Single solves, convergence sweeps and DG/CG comparisons.

use std::io::Write;
use std::path::Path;
use std::sync::Arc;
use std::time::Duration;

use rayon::prelude::*;

use super::config::{ExperimentConfig, Method};
use super::metrics::{empirical_order, error_norms_against, ErrorNorms, Reference};
use super::problem::Problem;
use super::svg::{LinePlot, Series};
use crate::broken_space::{fmt_float, write_atomic, BrokenFunction, Continuity, Seminorm};
use crate::error::{Error, Result};
use crate::functional::TermBreakdown;
use crate::lifting::lift;
use crate::optimizer::{solve_cg, solve_dg, SolveReport};

pub fn worker_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub method: Method,
    pub n: usize,
    pub report: SolveReport,
    pub solution: BrokenFunction,
}

impl RunOutcome {
    pub fn breakdown(&self) -> TermBreakdown {
        self.report.breakdown.unwrap_or_default()
    }

    /// `solution.csv`, `terms.csv` and `trace.csv` in `dir`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        self.solution.save_csv(&dir.join("solution.csv"))?;
        let mut buf = Vec::new();
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(TermBreakdown::CSV_HEADER)?;
            w.write_record(self.breakdown().csv_row())?;
            w.flush()?;
        }
        write_atomic(&dir.join("terms.csv"), &buf)?;
        self.report.save_trace_csv(&dir.join("trace.csv"))
    }
}

/// Solves `problem` with `n` elements.
pub fn solve(problem: &Problem, cfg: &ExperimentConfig, method: Method, n: usize) -> Result<RunOutcome> {
    let mesh = Arc::new(problem.mesh(n)?);
    let spec = problem.spec(cfg.quadrature(), cfg.lifting());
    let bfgs = cfg.bfgs();
    let (report, continuity) = match method {
        Method::Dg => (solve_dg(&spec, mesh.clone(), cfg.k, &bfgs)?, Continuity::Broken),
        Method::Cg => (solve_cg(&spec, mesh.clone(), cfg.k, &bfgs)?, Continuity::Continuous),
    };
    let solution = BrokenFunction::new(mesh, cfg.k, continuity, report.x.clone())?;
    Ok(RunOutcome { method, n, report, solution })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub h: f64,
    /// `||u_h - u||_{p}`.
    pub lp_error: f64,
    pub max_nodal: f64,
    /// `||grad_h u_h - u'||_{p}`.
    pub grad_error: f64,
    /// Broken seminorm of `u_h` including the Dirichlet faces.
    pub seminorm: f64,
    pub interior_penalty: f64,
    pub dirichlet_penalty: f64,
    /// `||R_h(u_h)||_{p}`.
    pub lift_norm: f64,
    /// `I_h(u_h)`.
    pub energy: f64,
    pub iterations: usize,
    pub converged: bool,
    pub wall_time: Duration,
}

impl ConvergenceRow {
    pub const CSV_HEADER: [&'static str; 12] = [
        "n",
        "h",
        "lp_error",
        "max_nodal",
        "grad_error",
        "seminorm",
        "int_penalty",
        "dir_penalty",
        "lift_norm",
        "energy",
        "iterations",
        "converged",
    ];

    pub fn penalties(&self) -> f64 {
        self.interior_penalty + self.dirichlet_penalty
    }

    fn measure(
        outcome: &RunOutcome,
        reference: &Reference<'_>,
        problem: &Problem,
        cfg: &ExperimentConfig,
    ) -> Result<Self> {
        let u = &outcome.solution;
        let p = problem.exponent();
        let ErrorNorms { max_nodal, lp, grad_lp, .. } = error_norms_against(u, reference, p)?;
        let spec = problem.spec(cfg.quadrature(), cfg.lifting());
        let seminorm = u.broken_seminorm(p, Seminorm::WithDirichlet(spec.dirichlet))?;
        let lift_norm = match outcome.method {
            Method::Dg => lift(u, cfg.lifting())?.lp_norm(p)?,
            Method::Cg => 0.0,
        };
        let b = outcome.breakdown();
        Ok(Self {
            n: outcome.n,
            h: u.mesh().max_element_len(),
            lp_error: lp,
            max_nodal,
            grad_error: grad_lp,
            seminorm,
            interior_penalty: b.interior_penalty,
            dirichlet_penalty: b.dirichlet_penalty,
            lift_norm,
            energy: b.total,
            iterations: outcome.report.iterations,
            converged: outcome.report.converged(),
            wall_time: outcome.report.wall_time,
        })
    }

    fn norms(&self) -> [f64; 7] {
        [
            self.lp_error,
            self.max_nodal,
            self.grad_error,
            self.seminorm,
            self.interior_penalty,
            self.dirichlet_penalty,
            self.lift_norm,
        ]
    }
}

/// Empirical orders between consecutive rows for the norm columns
/// (`lp_error` through `lift_norm`); `None` where a value is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderRow {
    pub from_n: usize,
    pub to_n: usize,
    pub orders: [Option<f64>; 7],
}

pub fn convergence_orders(rows: &[ConvergenceRow]) -> Vec<OrderRow> {
    rows.windows(2)
        .map(|w| {
            let (a, b) = (&w[0], &w[1]);
            let (na, nb) = (a.norms(), b.norms());
            let orders = std::array::from_fn(|i| {
                (na[i] > 0.0 && nb[i] > 0.0 && a.h != b.h).then(|| empirical_order(a.h, na[i], b.h, nb[i]))
            });
            OrderRow { from_n: a.n, to_n: b.n, orders }
        })
        .collect()
}

/// Solves on every `cfg.ns` concurrently and measures against the exact
/// solution, or against the finest solve when the problem has none. With
/// `save`, each run's files go to `<save>/<method>_n<n>/` as soon as it ends.
pub fn convergence(problem: &Problem, cfg: &ExperimentConfig, save: Option<&Path>) -> Result<Vec<ConvergenceRow>> {
    let mut ns = cfg.ns.clone();
    ns.sort_unstable();
    ns.dedup();
    let pool = worker_pool(cfg.workers)?;
    let outcomes: Vec<RunOutcome> = pool.install(|| {
        ns.par_iter()
            .map(|&n| {
                let o = solve(problem, cfg, cfg.method, n)?;
                if let Some(dir) = save {
                    o.save(&dir.join(format!("{}_n{n}", cfg.method)))?;
                }
                Ok(o)
            })
            .collect::<Result<_>>()
    })?;
    let finest = outcomes.last().expect("ns is non-empty").solution.clone();
    let reference = match problem.exact() {
        Some(u) => Reference::Exact(u),
        None => Reference::Discrete(&finest),
    };
    pool.install(|| {
        outcomes
            .par_iter()
            .map(|o| ConvergenceRow::measure(o, &reference, problem, cfg))
            .collect::<Result<Vec<_>>>()
    })
}

/// The table followed by one footer row per consecutive pair, `n` reading
/// `order:<n_i>-<n_j>`. A single row gets no footer.
pub fn write_convergence_csv<W: Write>(rows: &[ConvergenceRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ConvergenceRow::CSV_HEADER)?;
    for r in rows {
        let mut rec = vec![r.n.to_string(), fmt_float(r.h)];
        rec.extend(r.norms().iter().map(|&v| fmt_float(v)));
        rec.extend([fmt_float(r.energy), r.iterations.to_string(), r.converged.to_string()]);
        w.write_record(&rec)?;
    }
    for o in convergence_orders(rows) {
        let mut rec = vec![format!("order:{}-{}", o.from_n, o.to_n), String::new()];
        rec.extend(o.orders.iter().map(|v| v.map(fmt_float).unwrap_or_default()));
        rec.extend([String::new(), String::new(), String::new()]);
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Wall times are kept apart from the table so that the table itself is
/// reproducible byte for byte.
pub fn write_timings_csv<W: Write>(rows: &[ConvergenceRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "iterations", "wall_seconds"])?;
    for r in rows {
        w.write_record([r.n.to_string(), r.iterations.to_string(), format!("{:.6}", r.wall_time.as_secs_f64())])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub method: Method,
    /// Number of intervals.
    pub intervals: usize,
    pub dofs: usize,
    pub errors: ErrorNorms,
    pub energy: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl CompareRow {
    pub const CSV_HEADER: [&'static str; 10] =
        ["method", "intervals", "dofs", "max_nodal", "l1", "lp", "grad_lp", "energy", "iterations", "converged"];

    fn record(&self) -> Vec<String> {
        vec![
            self.method.to_string(),
            self.intervals.to_string(),
            self.dofs.to_string(),
            fmt_float(self.errors.max_nodal),
            fmt_float(self.errors.l1),
            fmt_float(self.errors.lp),
            fmt_float(self.errors.grad_lp),
            fmt_float(self.energy),
            self.iterations.to_string(),
            self.converged.to_string(),
        ]
    }
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub dg: RunOutcome,
    pub cg: RunOutcome,
    pub rows: [CompareRow; 2],
}

/// DG with `n` intervals against CG with `2n`, the pairing with matching
/// numbers of nodal unknowns.
pub fn compare(problem: &Problem, cfg: &ExperimentConfig, n: usize) -> Result<Comparison> {
    let exact = problem
        .exact()
        .ok_or_else(|| Error::Config("compare needs a problem with an exact solution".into()))?;
    let pool = worker_pool(cfg.workers)?;
    let (dg, cg) = pool.install(|| {
        rayon::join(|| solve(problem, cfg, Method::Dg, n), || solve(problem, cfg, Method::Cg, 2 * n))
    });
    let (dg, cg) = (dg?, cg?);
    let row = |o: &RunOutcome| -> Result<CompareRow> {
        Ok(CompareRow {
            method: o.method,
            intervals: o.n,
            dofs: o.solution.coeffs().len(),
            errors: error_norms_against(&o.solution, &Reference::Exact(exact), problem.exponent())?,
            energy: o.breakdown().total,
            iterations: o.report.iterations,
            converged: o.report.converged(),
        })
    };
    let rows = [row(&dg)?, row(&cg)?];
    Ok(Comparison { dg, cg, rows })
}

pub fn write_compare_csv<W: Write>(rows: &[CompareRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CompareRow::CSV_HEADER)?;
    for r in rows {
        w.write_record(r.record())?;
    }
    w.flush()?;
    Ok(())
}

/// Element by element, both traces, so jumps show up as vertical segments.
fn nodal_polyline(u: &BrokenFunction) -> Vec<(f64, f64)> {
    let mut pts = Vec::new();
    for e in 0..u.mesh().n_elements() {
        for (j, &v) in u.local(e).iter().enumerate() {
            pts.push((u.node_x(e, j), v));
        }
    }
    pts
}

/// `log10` of the error, penalty and lifting columns against `log10 h`.
pub fn convergence_plot(rows: &[ConvergenceRow]) -> LinePlot {
    let curve = |f: &dyn Fn(&ConvergenceRow) -> f64| -> Vec<(f64, f64)> {
        rows.iter().filter(|r| f(r) > 0.0).map(|r| (r.h.log10(), f(r).log10())).collect()
    };
    LinePlot {
        title: "errors against mesh size".into(),
        x_label: "log10 h".into(),
        y_label: "log10 value".into(),
        series: vec![
            Series::new("Lp error", "#d62728", curve(&|r| r.lp_error)),
            Series::new("gradient error", "#1f77b4", curve(&|r| r.grad_error)),
            Series::new("penalties", "#2ca02c", curve(&|r| r.penalties())),
            Series::new("lift norm", "#9467bd", curve(&|r| r.lift_norm)).dashed(),
        ],
    }
}

pub fn comparison_plot(problem: &Problem, cmp: &Comparison, samples: usize) -> Result<LinePlot> {
    let mut series = Vec::new();
    if let Some(exact) = problem.exact() {
        let (lo, hi) = problem.domain();
        let pts = (0..samples)
            .map(|i| {
                let x = lo + (hi - lo) * i as f64 / (samples - 1) as f64;
                exact.value(x.min(hi)).map(|u| (x, u))
            })
            .collect::<Result<Vec<_>>>()?;
        series.push(Series::new("exact", "black", pts));
    }
    series.push(Series::new(&format!("DG, {} intervals", cmp.dg.n), "#d62728", nodal_polyline(&cmp.dg.solution)));
    series.push(
        Series::new(&format!("CG, {} intervals", cmp.cg.n), "#1f77b4", nodal_polyline(&cmp.cg.solution)).dashed(),
    );
    Ok(LinePlot {
        title: format!("DG({}) against CG({})", cmp.dg.n, cmp.cg.n),
        x_label: "x".into(),
        y_label: "u".into(),
        series,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(n: usize, e: f64) -> ConvergenceRow {
        ConvergenceRow {
            n,
            h: 2.0 / n as f64,
            lp_error: e,
            max_nodal: e,
            grad_error: e,
            seminorm: 1.0,
            interior_penalty: e,
            dirichlet_penalty: 0.0,
            lift_norm: e,
            energy: 1.0,
            iterations: 3,
            converged: true,
            wall_time: Duration::ZERO,
        }
    }

    #[test]
    fn orders_and_footer() {
        let rows = [row(10, 0.4), row(20, 0.1)];
        let o = convergence_orders(&rows);
        assert_eq!(o.len(), 1);
        assert!((o[0].orders[0].unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(o[0].orders[5], None);
        let mut buf = Vec::new();
        write_convergence_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.lines().last().unwrap().starts_with("order:10-20"));

        let mut buf = Vec::new();
        write_convergence_csv(&rows[..1], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 2);
    }
}
