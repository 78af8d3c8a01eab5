use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pxdg::broken_space::write_atomic;
use pxdg::harness::config::{ExperimentConfig, WORKERS_ENV};
use pxdg::harness::problem::Problem;
use pxdg::harness::properties::{self, PropertyOptions};
use pxdg::harness::run;
use pxdg::Error;

const EXIT_NOT_CONVERGED: u8 = 1;
const EXIT_PROPERTY_FAILED: u8 = 2;
const EXIT_CONFIG: u8 = 3;

#[derive(Parser)]
#[command(name = "pxdg", version, about = "IP-DG solver and experiments for the 1D p(x)-Laplacian")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Minimize the discrete energy on one mesh.
    Solve(Common),
    /// Solve on a list of meshes and tabulate errors and empirical orders.
    Convergence(Common),
    /// DG with n intervals against CG with 2n intervals.
    Compare(Common),
    /// Tabulate the reference solution of the benchmark.
    Exact(Common),
    /// Run the randomized property suites.
    Properties(PropertyArgs),
}

/// Options shared by every command. Anything left out falls back to the
/// config file, then to the built-in default.
#[derive(Args, Default)]
struct Common {
    /// `key=value` config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// `paper1d` or `custom:<path>`.
    #[arg(long)]
    problem: Option<String>,
    /// dg or cg.
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated element counts.
    #[arg(long)]
    ns: Option<String>,
    /// Polynomial degree.
    #[arg(long)]
    k: Option<usize>,
    /// Lifting degree.
    #[arg(long)]
    l: Option<usize>,
    /// trapezoid or gauss.
    #[arg(long)]
    quad: Option<String>,
    /// Trapezoid panels (or Gauss points) per element.
    #[arg(long = "m-panels")]
    m_panels: Option<usize>,
    /// Relative gradient tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long = "max-iters")]
    max_iters: Option<usize>,
    /// Output directory (a file for `exact` when it ends in `.csv`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// svg or none.
    #[arg(long)]
    plot: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long = "C")]
    c: Option<f64>,
    /// Sample count for tabulated curves.
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Args)]
struct PropertyArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated suite names; all suites by default.
    #[arg(long)]
    suites: Option<String>,
    /// Random (u, p) pairs for the modular/norm relations.
    #[arg(long, default_value_t = 1000)]
    pairs: usize,
    /// Replace every face size by 1. The lifting suite is expected to fail.
    #[arg(long = "broken-h")]
    broken_h: bool,
}

impl Common {
    fn flags(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        let mut put = |k: &'static str, v: Option<String>| {
            if let Some(v) = v {
                out.push((k, v));
            }
        };
        put("problem", self.problem.clone());
        put("method", self.method.clone());
        put("n", self.n.map(|v| v.to_string()));
        put("ns", self.ns.clone());
        put("k", self.k.map(|v| v.to_string()));
        put("l", self.l.map(|v| v.to_string()));
        put("quad", self.quad.clone());
        put("m_panels", self.m_panels.map(|v| v.to_string()));
        put("tol", self.tol.map(|v| v.to_string()));
        put("max_iters", self.max_iters.map(|v| v.to_string()));
        put("out", self.out.as_ref().map(|p| p.display().to_string()));
        put("plot", self.plot.clone());
        put("seed", self.seed.map(|v| v.to_string()));
        put("workers", self.workers.map(|v| v.to_string()));
        put("eps", self.eps.map(|v| v.to_string()));
        put("a", self.a.map(|v| v.to_string()));
        put("C", self.c.map(|v| v.to_string()));
        put("samples", self.samples.map(|v| v.to_string()));
        out
    }

    fn resolve(&self) -> pxdg::Result<ExperimentConfig> {
        let env = std::env::var(WORKERS_ENV).ok();
        ExperimentConfig::layered(self.config.as_deref(), env.as_deref(), &self.flags())
    }
}

fn problem_of(cfg: &ExperimentConfig) -> pxdg::Result<Problem> {
    Problem::from_id(&cfg.problem, cfg.eps, cfg.a, cfg.c)
}

fn status(converged: bool) -> u8 {
    if converged {
        0
    } else {
        EXIT_NOT_CONVERGED
    }
}

fn cmd_solve(common: &Common) -> pxdg::Result<u8> {
    let cfg = common.resolve()?;
    let problem = problem_of(&cfg)?;
    let outcome = run::solve(&problem, &cfg, cfg.method, cfg.n)?;
    outcome.save(&cfg.out)?;
    let r = &outcome.report;
    let b = outcome.breakdown();
    println!("method      {}", cfg.method);
    println!("intervals   {}", cfg.n);
    println!("dofs        {}", r.x.len());
    println!("termination {:?}", r.termination);
    println!("iterations  {}", r.iterations);
    println!("grad norm   {:.6e} (initial {:.6e})", r.final_grad_norm, r.initial_grad_norm);
    println!("energy      {:.10e}", b.total);
    println!("penalties   interior {:.6e}, dirichlet {:.6e}", b.interior_penalty, b.dirichlet_penalty);
    if let Some(exact) = problem.exact() {
        let e = pxdg::harness::metrics::error_norms(&outcome.solution, exact, problem.exponent())?;
        println!("errors      max nodal {:.6e}, L1 {:.6e}, Lp {:.6e}", e.max_nodal, e.l1, e.lp);
    }
    println!("wrote       {}", cfg.out.display());
    Ok(status(r.converged()))
}

fn cmd_convergence(common: &Common) -> pxdg::Result<u8> {
    let cfg = common.resolve()?;
    let problem = problem_of(&cfg)?;
    let rows = run::convergence(&problem, &cfg, Some(&cfg.out.join("runs")))?;
    let mut buf = Vec::new();
    run::write_convergence_csv(&rows, &mut buf)?;
    write_atomic(&cfg.out.join("convergence.csv"), &buf)?;
    print!("{}", String::from_utf8_lossy(&buf));
    let mut buf = Vec::new();
    run::write_timings_csv(&rows, &mut buf)?;
    write_atomic(&cfg.out.join("timings.csv"), &buf)?;
    if cfg.plot {
        write_atomic(&cfg.out.join("convergence.svg"), run::convergence_plot(&rows).render().as_bytes())?;
    }
    Ok(status(rows.iter().all(|r| r.converged)))
}

fn cmd_compare(common: &Common) -> pxdg::Result<u8> {
    let cfg = common.resolve()?;
    let problem = problem_of(&cfg)?;
    let cmp = run::compare(&problem, &cfg, cfg.n)?;
    cmp.dg.save(&cfg.out.join("dg"))?;
    cmp.cg.save(&cfg.out.join("cg"))?;
    let mut buf = Vec::new();
    run::write_compare_csv(&cmp.rows, &mut buf)?;
    write_atomic(&cfg.out.join("compare.csv"), &buf)?;
    print!("{}", String::from_utf8_lossy(&buf));
    if cfg.plot {
        let plot = run::comparison_plot(&problem, &cmp, cfg.samples)?;
        write_atomic(&cfg.out.join("compare.svg"), plot.render().as_bytes())?;
    }
    Ok(status(cmp.rows.iter().all(|r| r.converged)))
}

fn cmd_exact(common: &Common) -> pxdg::Result<u8> {
    let cfg = common.resolve()?;
    let exact = pxdg::exact::build_exact(cfg.eps, cfg.a, cfg.c)?;
    let path = if cfg.out.extension().is_some_and(|e| e == "csv") { cfg.out.clone() } else { cfg.out.join("exact.csv") };
    exact.save_csv(cfg.samples, &path)?;
    println!("u'(0)   {:.16e}", exact.derivative(0.0)?);
    println!("B=u(1)  {:.16e}", exact.b());
    println!("I(u)    {:.16e}", exact.energy()?);
    println!("wrote   {}", path.display());
    Ok(0)
}

fn cmd_properties(args: &PropertyArgs) -> pxdg::Result<u8> {
    let cfg = args.common.resolve()?;
    let selection: Vec<String> = args
        .suites
        .as_deref()
        .map(|s| s.split(',').map(|t| t.trim().to_string()).filter(|t| !t.is_empty()).collect())
        .unwrap_or_default();
    let opts = PropertyOptions {
        seed: cfg.seed,
        pairs: args.pairs,
        broken_h: args.broken_h,
        workers: cfg.workers,
        ..Default::default()
    };
    let results = properties::run(&selection, &opts)?;
    let mut buf = Vec::new();
    properties::write_csv(&results, &mut buf)?;
    write_atomic(&cfg.out.join("properties.csv"), &buf)?;
    for r in &results {
        let verdict = if r.passed { "PASS" } else { "FAIL" };
        println!("{verdict} {}/{} value={:.6e} bound={:.6e}", r.suite, r.name, r.value, r.bound);
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("{} of {} properties passed", results.len() - failed, results.len());
    Ok(if failed == 0 { 0 } else { EXIT_PROPERTY_FAILED })
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Diverged(_) => EXIT_NOT_CONVERGED,
        _ => EXIT_CONFIG,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_CONFIG),
            };
        }
    };
    let result = match &cli.command {
        Command::Solve(c) => cmd_solve(c),
        Command::Convergence(c) => cmd_convergence(c),
        Command::Compare(c) => cmd_compare(c),
        Command::Exact(c) => cmd_exact(c),
        Command::Properties(p) => cmd_properties(p),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("pxdg: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
