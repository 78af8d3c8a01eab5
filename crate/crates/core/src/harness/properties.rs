//! Randomized property suites.
//!
//! Every suite draws its inputs from a ChaCha stream seeded with the run seed
//! and the suite name, so verdicts are reproducible and independent of the
//! order the suites run in. Each check reports a measured value, the bound it
//! is held to and whether it passed.

use std::io::Write;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::broken_space::{
    default_norm_points, fmt_float, volume_samples, BrokenFunction, Continuity, Seminorm,
};
use crate::error::{Error, Result};
use crate::exponent::{
    check_modular_norm_relations, log_holder_sweep, luxemburg_norm, modular, pointwise_inequalities,
    ExponentField, WeightedSampleSet,
};
use crate::functional::{eval_discrete, DiscreteProblem, FunctionalSpec, VolumeQuadrature};
use crate::lifting::{lift, lifting_bound_ratio, verify_weak_identity, LiftingConfig};
use crate::mesh::{BoundaryKind, DirichletData, FaceSizeRule, Mesh1D};
use crate::quadrature::QuadratureRule;
use crate::reconstruction::{reconstruct, reconstruction_error_report};

pub const SUITES: [&str; 11] = [
    "luxemburg",
    "pointwise",
    "log_holder",
    "bv",
    "inverse",
    "lifting",
    "reconstruction",
    "poincare",
    "coercivity",
    "consistency",
    "gradient",
];

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyOptions {
    pub seed: u64,
    /// Random `(u, p)` pairs for the modular/norm relations.
    pub pairs: usize,
    /// Random functions per refinement level.
    pub samples: usize,
    /// Random points per problem for the finite-difference check.
    pub fd_points: usize,
    /// Replace every face size by 1 (negative control).
    pub broken_h: bool,
    pub workers: usize,
}

impl Default for PropertyOptions {
    fn default() -> Self {
        Self { seed: 20240613, pairs: 1000, samples: 50, fd_points: 100, broken_h: false, workers: 1 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyResult {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub bound: f64,
}

impl PropertyResult {
    /// Passes when `value <= bound`.
    fn at_most(suite: &'static str, name: &str, value: f64, bound: f64) -> Self {
        Self { suite, name: name.into(), passed: value <= bound, value, bound }
    }

    /// Passes when `value >= bound`.
    fn at_least(suite: &'static str, name: &str, value: f64, bound: f64) -> Self {
        Self { suite, name: name.into(), passed: value >= bound, value, bound }
    }

    fn flag(suite: &'static str, name: &str, passed: bool) -> Self {
        Self { suite, name: name.into(), passed, value: passed as u8 as f64, bound: 1.0 }
    }
}

pub fn write_csv<W: Write>(results: &[PropertyResult], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["suite", "property", "passed", "value", "bound"])?;
    for r in results {
        w.write_record([r.suite.to_string(), r.name.clone(), r.passed.to_string(), fmt_float(r.value), fmt_float(r.bound)])?;
    }
    w.flush()?;
    Ok(())
}

/// Runs the named suites (all when `selection` is empty) concurrently.
pub fn run(selection: &[String], opts: &PropertyOptions) -> Result<Vec<PropertyResult>> {
    for s in selection {
        if !SUITES.contains(&s.as_str()) {
            return Err(Error::Config(format!("unknown property suite `{s}`")));
        }
    }
    let chosen: Vec<&'static str> =
        SUITES.iter().copied().filter(|s| selection.is_empty() || selection.iter().any(|x| x == s)).collect();
    let pool = super::run::worker_pool(opts.workers)?;
    let per_suite: Vec<Vec<PropertyResult>> =
        pool.install(|| chosen.par_iter().map(|&s| run_suite(s, opts)).collect::<Result<_>>())?;
    Ok(per_suite.into_iter().flatten().collect())
}

pub fn run_suite(name: &str, opts: &PropertyOptions) -> Result<Vec<PropertyResult>> {
    let mut rng = suite_rng(opts.seed, name);
    let ctx = Ctx { opts, rule: if opts.broken_h { FaceSizeRule::DebugConstant } else { FaceSizeRule::Standard } };
    match name {
        "luxemburg" => luxemburg_suite(&mut rng, &ctx),
        "pointwise" => pointwise_suite(&mut rng, &ctx),
        "log_holder" => log_holder_suite(),
        "bv" => bv_suite(&mut rng, &ctx),
        "inverse" => inverse_suite(&mut rng, &ctx),
        "lifting" => lifting_suite(&mut rng, &ctx),
        "reconstruction" => reconstruction_suite(&ctx),
        "poincare" => poincare_suite(&mut rng, &ctx),
        "coercivity" => coercivity_suite(&mut rng, &ctx),
        "consistency" => consistency_suite(&ctx),
        "gradient" => gradient_suite(&mut rng, &ctx),
        other => Err(Error::Config(format!("unknown property suite `{other}`"))),
    }
}

fn suite_rng(seed: u64, name: &str) -> ChaCha8Rng {
    // FNV-1a of the suite name keeps the streams apart
    let tag = name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3));
    ChaCha8Rng::seed_from_u64(seed ^ tag)
}

struct Ctx<'a> {
    opts: &'a PropertyOptions,
    rule: FaceSizeRule,
}

impl Ctx<'_> {
    fn mesh(&self, lo: f64, hi: f64, n: usize) -> Result<Arc<Mesh1D>> {
        Ok(Arc::new(
            Mesh1D::uniform(lo, hi, n, BoundaryKind::Dirichlet, BoundaryKind::Dirichlet)?.with_face_size_rule(self.rule),
        ))
    }
}

/// `count` uniform meshes of `[0, 1]`, starting at `n0` elements and halving h.
fn levels(ctx: &Ctx, n0: usize, count: usize) -> Result<Vec<Arc<Mesh1D>>> {
    (0..count).map(|j| ctx.mesh(0.0, 1.0, n0 << j)).collect()
}

fn random_broken(rng: &mut ChaCha8Rng, mesh: &Arc<Mesh1D>, k: usize) -> Result<BrokenFunction> {
    let n = BrokenFunction::dof_count(mesh, k, Continuity::Broken);
    BrokenFunction::new(mesh.clone(), k, Continuity::Broken, (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
}

/// Piecewise linear exponent on `[lo, hi]` with values in `range`.
fn random_exponent(rng: &mut ChaCha8Rng, lo: f64, hi: f64, range: (f64, f64)) -> Result<ExponentField> {
    let m = rng.gen_range(2..6);
    let xs: Vec<f64> = (0..=m).map(|i| lo + (hi - lo) * i as f64 / m as f64).collect();
    let vals: Vec<f64> = xs.iter().map(|_| rng.gen_range(range.0..range.1)).collect();
    ExponentField::piecewise_linear(xs, vals)
}

/// `max / min` of positive values.
fn spread(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    max / min
}

/// Largest ratio between consecutive entries.
fn max_growth(values: &[f64]) -> f64 {
    values.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max)
}

fn luxemburg_suite(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<Vec<PropertyResult>> {
    const S: &str = "luxemburg";
    const SLACK: f64 = 1e-9;
    let rule = QuadratureRule::gauss_legendre(6);
    let draw = |rng: &mut ChaCha8Rng| -> Result<(WeightedSampleSet, ExponentField)> {
        let panels = rng.gen_range(1..8);
        let mut set = WeightedSampleSet::default();
        for i in 0..panels {
            for (x, w) in rule.mapped(i as f64 / panels as f64, (i + 1) as f64 / panels as f64) {
                set.push(x, w);
            }
        }
        let p = random_exponent(rng, 0.0, 1.0, (1.01, 4.0))?;
        Ok((set, p))
    };
    let values = |rng: &mut ChaCha8Rng, n: usize| -> Vec<f64> {
        let scale = 10f64.powf(rng.gen_range(-3.0..3.0));
        (0..n).map(|_| scale * rng.gen_range(-1.0..1.0)).collect()
    };

    let mut relation_failures = 0usize;
    let mut worst_margin = f64::INFINITY;
    let (mut homog, mut triangle, mut convexity) = (0.0f64, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for _ in 0..ctx.opts.pairs {
        let (set, p) = draw(rng)?;
        let u = values(rng, set.len());
        let rep = check_modular_norm_relations(&set, &u, &p, SLACK)?;
        if !rep.passed() {
            relation_failures += 1;
        }
        worst_margin = worst_margin.min(rep.min_margin);

        let nu = luxemburg_norm(&set, &u, &p)?;
        let c: f64 = rng.gen_range(-5.0..5.0);
        let cu: Vec<f64> = u.iter().map(|v| c * v).collect();
        homog = homog.max((luxemburg_norm(&set, &cu, &p)? - c.abs() * nu).abs() / (c.abs() * nu));

        let v: Vec<f64> = values(rng, set.len());
        let nv = luxemburg_norm(&set, &v, &p)?;
        let sum: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a + b).collect();
        triangle = triangle.max((luxemburg_norm(&set, &sum, &p)? - nu - nv) / (nu + nv));

        let mid: Vec<f64> = sum.iter().map(|s| 0.5 * s).collect();
        let (mu, mv) = (modular(&set, &u, &p)?, modular(&set, &v, &p)?);
        convexity = convexity.max((modular(&set, &mid, &p)? - 0.5 * (mu + mv)) / (mu + mv));
    }

    // constant exponent against the classical norm, exact for polynomials
    let mut classical = 0.0f64;
    for _ in 0..50 {
        let p = [2.0, 3.0, 4.0][rng.gen_range(0..3)];
        let field = ExponentField::constant(p)?;
        let mut set = WeightedSampleSet::default();
        for (x, w) in rule.mapped(0.0, 1.0) {
            set.push(x, w);
        }
        let u = values(rng, set.len());
        let direct: f64 = set.weights().iter().zip(&u).map(|(w, v)| w * v.abs().powf(p)).sum::<f64>().powf(1.0 / p);
        classical = classical.max((luxemburg_norm(&set, &u, &field)? - direct).abs() / direct);
    }

    Ok(vec![
        PropertyResult::at_most(S, "modular_norm_relations_failures", relation_failures as f64, 0.0),
        PropertyResult::at_least(S, "modular_norm_relations_min_margin", worst_margin, -SLACK),
        PropertyResult::at_most(S, "homogeneity_rel_error", homog, 1e-9),
        PropertyResult::at_most(S, "triangle_excess", triangle, 1e-9),
        PropertyResult::at_most(S, "modular_convexity_excess", convexity, 1e-12),
        PropertyResult::at_most(S, "constant_exponent_vs_classical", classical, 1e-12),
    ])
}

fn pointwise_suite(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<Vec<PropertyResult>> {
    const S: &str = "pointwise";
    // sharp constants: 2^{p-2} for p >= 2 and 1/(p-1) below
    let (mut degenerate, mut singular) = (0.0f64, 0.0f64);
    let mut quasi = true;
    for _ in 0..ctx.opts.pairs {
        let eta = rng.gen_range(-10.0..10.0);
        let xi = if rng.gen_bool(0.1) { eta } else { rng.gen_range(-10.0..10.0) };
        let p = rng.gen_range(1.01..5.0);
        let rep = pointwise_inequalities(eta, xi, p)?;
        quasi &= rep.quasi_triangle_holds;
        if let Some(c) = rep.degenerate {
            degenerate = degenerate.max(c.min_constant / 2f64.powf(p - 2.0));
        }
        if let Some(c) = rep.singular {
            singular = singular.max(c.min_constant * (p - 1.0));
        }
    }
    Ok(vec![
        PropertyResult::at_most(S, "degenerate_constant_over_sharp", degenerate, 1.0 + 1e-9),
        PropertyResult::at_most(S, "singular_constant_over_sharp", singular, 1.0 + 1e-9),
        PropertyResult::flag(S, "quasi_triangle", quasi),
    ])
}

fn log_holder_suite() -> Result<Vec<PropertyResult>> {
    const S: &str = "log_holder";
    let hat = ExponentField::hat(0.01, 0.01)?;
    let sweep = log_holder_sweep(&hat, 1.0, 0.0, 20)?;
    let bound = sweep.values.iter().copied().fold(0.0, f64::max);
    // h^{-alpha |p(x) - p(y)|} <= exp(alpha c_log) for a log-Hölder exponent
    let allowed = hat.estimate_c_log().exp();
    let jump = ExponentField::piecewise_linear(vec![-1.0, 0.0, 0.0, 1.0], vec![1.5, 1.5, 3.0, 3.0])?;
    let control = log_holder_sweep(&jump, 1.0, 0.0, 20)?;
    Ok(vec![
        PropertyResult::flag(S, "hat_not_flagged", !sweep.flagged),
        PropertyResult::at_most(S, "hat_max_bound", bound, allowed),
        PropertyResult::flag(S, "jump_exponent_flagged", control.flagged),
    ])
}

fn bv_suite(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<Vec<PropertyResult>> {
    const S: &str = "bv";
    let p = random_exponent(rng, 0.0, 1.0, (1.2, 3.0))?;
    let mut per_level = Vec::new();
    for mesh in levels(ctx, 4, 6)? {
        let mut worst = 0.0f64;
        for _ in 0..ctx.opts.samples {
            let u = random_broken(rng, &mesh, 2)?;
            worst = worst.max(u.total_variation() / u.broken_seminorm(&p, Seminorm::Interior)?);
        }
        per_level.push(worst);
    }
    Ok(vec![PropertyResult::at_most(S, "total_variation_ratio_spread", spread(&per_level), 2.0)])
}

fn inverse_suite(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<Vec<PropertyResult>> {
    const S: &str = "inverse";
    let q = ExponentField::constant(2.0)?;
    let p = random_exponent(rng, 0.0, 1.0, (2.5, 4.0))?;
    let mut per_level = Vec::new();
    let mut identity = 0.0f64;
    for mesh in levels(ctx, 4, 6)? {
        let mut worst = 0.0f64;
        for _ in 0..ctx.opts.samples {
            let u = random_broken(rng, &mesh, 3)?;
            worst = worst.max(u.inverse_estimate_check(&p, &q)?);
            identity = identity.max(u.inverse_estimate_check(&q, &q)?);
        }
        per_level.push(worst);
    }
    Ok(vec![
        PropertyResult::at_most(S, "equal_exponents_ratio", identity, 1.0 + 1e-9),
        PropertyResult::at_most(S, "constant_spread_over_refinements", spread(&per_level), 2.0),
    ])
}

fn lifting_suite(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<Vec<PropertyResult>> {
    const S: &str = "lifting";
    let mut identity = 0.0f64;
    let mut continuous = 0.0f64;
    let mut locality = true;
    for i in 0..ctx.opts.samples {
        let mesh = ctx.mesh(0.0, 1.0, rng.gen_range(2..12))?;
        let k = 1 + i % 3;
        let l = i % 4;
        let cfg = LiftingConfig::new(l);
        let u = random_broken(rng, &mesh, k)?;
        let r = lift(&u, cfg)?;
        let scale = 1.0 + u.coeffs().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        identity = identity.max(verify_weak_identity(&u, &r, cfg)? / scale);

        let c = BrokenFunction::interpolate(mesh.clone(), k, Continuity::Continuous, |x| (3.0 * x).sin())?;
        continuous = continuous.max(lift(&c.to_broken(), cfg)?.coeffs().iter().fold(0.0, |m, v| m.max(v.abs())));

        // jumps only at one face: R vanishes away from its two elements
        let z = rng.gen_range(1..mesh.n_elements());
        let step = BrokenFunction::interpolate_elementwise(mesh.clone(), k, |e, _| if e < z { 1.0 } else { 0.0 })?;
        let rs = lift(&step, cfg)?;
        for e in (0..mesh.n_elements()).filter(|&e| e + 1 != z && e != z) {
            locality &= rs.local(e).iter().all(|&v| v == 0.0);
        }
    }

    // fixed-shape inputs: the same random draw distribution on every level
    let p = random_exponent(rng, 0.0, 1.0, (1.5, 3.0))?;
    let mut per_level = Vec::new();
    for mesh in levels(ctx, 4, 6)? {
        let mut worst = 0.0f64;
        for _ in 0..ctx.opts.samples {
            let u = random_broken(rng, &mesh, 1)?;
            worst = worst.max(lifting_bound_ratio(&u, &p, LiftingConfig::new(1))?);
        }
        per_level.push(worst);
    }
    Ok(vec![
        PropertyResult::at_most(S, "weak_identity_residual", identity, 1e-12),
        PropertyResult::at_most(S, "continuous_input_lift", continuous, 0.0),
        PropertyResult::flag(S, "support_locality", locality),
        PropertyResult::at_most(S, "bound_ratio_spread", spread(&per_level), 2.0),
    ])
}

fn reconstruction_suite(ctx: &Ctx) -> Result<Vec<PropertyResult>> {
    const S: &str = "reconstruction";
    let p2 = ExponentField::constant(2.0)?;
    let coarse = ctx.mesh(0.0, 1.0, 3)?;
    let constant = BrokenFunction::interpolate(coarse.clone(), 2, Continuity::Broken, |_| 5.0)?;
    let constants_exact = reconstruct(&constant)?.coeffs().iter().all(|&v| v == 5.0);

    // a fixed discontinuous function, embedded into each refinement
    let u0 = BrokenFunction::interpolate_elementwise(coarse.clone(), 1, |e, x| x + if e == 1 { 1.0 } else { 0.0 })?;
    let p = ExponentField::piecewise_linear(vec![0.0, 1.0], vec![1.5, 2.5])?;
    let (mut hs, mut errors, mut grad_ratios, mut elem_ratios) = (vec![], vec![], vec![], vec![]);
    let mut mesh = coarse.clone();
    for _ in 0..6 {
        let u = u0.embed(mesh.clone())?;
        let rep2 = reconstruction_error_report(&u, &p2, &p2)?;
        hs.push(mesh.max_element_len());
        errors.push(rep2.vol_error);
        let rep = reconstruction_error_report(&u, &p, &p2)?;
        grad_ratios.push(rep.grad_norm / rep.seminorm);
        elem_ratios.push(rep.elements.iter().filter_map(|e| e.ratio).fold(0.0, f64::max));
        mesh = Arc::new(mesh.refine());
    }
    let n = hs.len();
    let order = super::metrics::empirical_order(hs[n - 3], errors[n - 3], hs[n - 1], errors[n - 1]);
    Ok(vec![
        PropertyResult::flag(S, "constants_reproduced", constants_exact),
        // for a jump the seminorm carries h^{-1/2}, so the L^2 error can only go like h^{1/2}
        PropertyResult::at_least(S, "l2_error_order_vs_half", order, 0.9 * 0.5),
        PropertyResult::at_most(S, "gradient_ratio_spread", spread(&grad_ratios), 2.0),
        PropertyResult::at_most(S, "element_ratio_spread", spread(&elem_ratios), 2.0),
    ])
}

fn poincare_suite(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<Vec<PropertyResult>> {
    const S: &str = "poincare";
    let p = random_exponent(rng, 0.0, 1.0, (1.2, 3.0))?;
    let per_level = poincare_ratios(rng, ctx, &p)?;
    Ok(vec![PropertyResult::at_most(S, "level_to_level_growth", max_growth(&per_level), 2.0)])
}

/// Largest `||v - mean v||_p / |v|_{W^{1,p}(T_h)}` over random `v` in `S^1`
/// on four meshes.
pub fn poincare_ratios_for(seed: u64, samples: usize, p: &ExponentField) -> Result<Vec<f64>> {
    let opts = PropertyOptions { seed, samples, ..Default::default() };
    let ctx = Ctx { opts: &opts, rule: FaceSizeRule::Standard };
    poincare_ratios(&mut suite_rng(seed, "poincare"), &ctx, p)
}

fn poincare_ratios(rng: &mut ChaCha8Rng, ctx: &Ctx, p: &ExponentField) -> Result<Vec<f64>> {
    let mut per_level = Vec::new();
    for mesh in levels(ctx, 4, 4)? {
        let samples = volume_samples(&mesh, default_norm_points(1), &p.breakpoints());
        let mut worst = 0.0f64;
        for _ in 0..ctx.opts.samples {
            let v = random_broken(rng, &mesh, 1)?;
            let mean = v.integral() / mesh.length();
            let centred: Vec<f64> = v.values_at(&samples).iter().map(|x| x - mean).collect();
            let semi = v.broken_seminorm(p, Seminorm::Interior)?;
            worst = worst.max(luxemburg_norm(&samples.set, &centred, p)? / semi);
        }
        per_level.push(worst);
    }
    Ok(per_level)
}

fn coercivity_suite(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<Vec<PropertyResult>> {
    const S: &str = "coercivity";
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..ctx.opts.samples {
        let mesh = ctx.mesh(-1.0, 1.0, rng.gen_range(2..20))?;
        let p = random_exponent(rng, -1.0, 1.0, (1.1, 4.0))?;
        let k = rng.gen_range(1..4);
        let v = random_broken(rng, &mesh, k)?;
        let r = lift(&v, LiftingConfig::new(rng.gen_range(0..3)))?;
        let samples = volume_samples(&mesh, default_norm_points(3), &p.breakpoints());
        let g = v.derivatives_at(&samples);
        let rv = r.values_at(&samples);
        let full: Vec<f64> = g.iter().zip(&rv).map(|(a, b)| a + b).collect();
        let lhs = 2f64.powf(1.0 - p.p2()) * modular(&samples.set, &g, &p)?;
        let rhs = modular(&samples.set, &full, &p)? + modular(&samples.set, &rv, &p)?;
        worst = worst.max((lhs - rhs) / rhs.max(f64::MIN_POSITIVE));
    }
    Ok(vec![PropertyResult::at_most(S, "gradient_modular_chain_excess", worst, 1e-12)])
}

/// Degree-one interpolant through the two Gauss points of every element.
fn gauss_interpolant(mesh: &Arc<Mesh1D>, f: impl Fn(f64) -> f64) -> Result<BrokenFunction> {
    let g = 1.0 / 3f64.sqrt();
    let mut coeffs = Vec::with_capacity(2 * mesh.n_elements());
    for e in 0..mesh.n_elements() {
        let (a, b) = mesh.element(e);
        let (m, half) = (0.5 * (a + b), 0.5 * (b - a));
        let (f1, f2) = (f(m - g * half), f(m + g * half));
        let slope = (f2 - f1) / (2.0 * g);
        coeffs.push(0.5 * (f1 + f2) - slope);
        coeffs.push(0.5 * (f1 + f2) + slope);
    }
    BrokenFunction::new(mesh.clone(), 1, Continuity::Broken, coeffs)
}

fn consistency_suite(ctx: &Ctx) -> Result<Vec<PropertyResult>> {
    const S: &str = "consistency";
    let v = |x: f64| (2.0 * x).sin() + x;
    let p = ExponentField::hat(0.01, 0.01)?;
    let spec = FunctionalSpec::new(p, DirichletData { left: v(-1.0), right: v(1.0) });
    let (mut hs, mut pens) = (vec![], vec![]);
    for n in [8usize, 16, 32, 64] {
        let mesh = ctx.mesh(-1.0, 1.0, n)?;
        let vh = gauss_interpolant(&mesh, v)?;
        hs.push(mesh.max_element_len());
        pens.push(eval_discrete(&vh, &spec)?.dirichlet_penalty);
    }
    let order = super::metrics::empirical_order(hs[0], pens[0], hs[3], pens[3]);
    Ok(vec![PropertyResult::at_least(S, "dirichlet_penalty_order", order, 0.9)])
}

/// The three problems of the finite-difference check.
pub fn gradient_test_problems() -> Result<Vec<(&'static str, FunctionalSpec, Arc<Mesh1D>, usize)>> {
    let mesh = |n: usize| -> Result<Arc<Mesh1D>> {
        Ok(Arc::new(Mesh1D::uniform(-1.0, 1.0, n, BoundaryKind::Dirichlet, BoundaryKind::Dirichlet)?))
    };
    let data = DirichletData { left: -1.0, right: 1.0 };
    let constant = FunctionalSpec::new(ExponentField::constant(2.0)?, data);
    let hat = FunctionalSpec::new(ExponentField::hat(0.01, 0.01)?, DirichletData { left: -3.0, right: 3.0 })
        .with_quadrature(VolumeQuadrature::Trapezoid { panels: 2 });
    let variable = FunctionalSpec::new(
        ExponentField::piecewise_linear(vec![-1.0, 0.0, 1.0], vec![1.6, 2.8, 2.2])?,
        data,
    )
    .with_fidelity(ExponentField::constant(2.0)?, Arc::new(|x: f64| (3.0 * x).sin()))
    .with_quadrature(VolumeQuadrature::Gauss { points: 3 })
    .with_lifting(LiftingConfig::new(2));
    Ok(vec![("constant_p", constant, mesh(6)?, 1), ("hat_p", hat, mesh(8)?, 1), ("variable_p_fidelity", variable, mesh(5)?, 2)])
}

/// Largest `||g_fd - g||_inf / ||g||_inf` over `points` random DOF vectors,
/// cycling through the scales 0.1, 1 and 10.
pub fn fd_gradient_error(rng: &mut impl Rng, problem: &DiscreteProblem, points: usize) -> f64 {
    let n = problem.n_dofs();
    let mut worst = 0.0f64;
    for i in 0..points {
        let scale = [0.1, 1.0, 10.0][i % 3];
        let x: Vec<f64> = (0..n).map(|_| scale * rng.gen_range(-1.0..1.0)).collect();
        let (_, g) = problem.value_and_gradient(&x);
        let step = 1e-6 * scale;
        let mut err = 0.0f64;
        let mut y = x.clone();
        for j in 0..n {
            y[j] = x[j] + step;
            let fp = problem.value(&y);
            y[j] = x[j] - step;
            let fm = problem.value(&y);
            y[j] = x[j];
            err = err.max(((fp - fm) / (2.0 * step) - g[j]).abs());
        }
        let gn = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        worst = worst.max(err / gn.max(f64::MIN_POSITIVE));
    }
    worst
}

fn gradient_suite(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<Vec<PropertyResult>> {
    const S: &str = "gradient";
    let mut out = Vec::new();
    for (name, spec, mesh, k) in gradient_test_problems()? {
        let mesh = Arc::new((*mesh).clone().with_face_size_rule(ctx.rule));
        let problem = DiscreteProblem::dg(mesh, k, &spec)?;
        let err = fd_gradient_error(rng, &problem, ctx.opts.fd_points);
        out.push(PropertyResult::at_most(S, &format!("fd_rel_error_{name}"), err, 1e-6));
    }
    Ok(out)
}
