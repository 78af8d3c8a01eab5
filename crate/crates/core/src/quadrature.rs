//! Quadrature rules on the reference interval [-1, 1] and an adaptive
//! Gauss–Kronrod integrator.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Points and weights on the reference interval [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    /// `n`-point Gauss–Legendre rule, exact for polynomials of degree `2n - 1`.
    pub fn gauss_legendre(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one point");
        let mut points = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi-type initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            points[i] = -x;
            points[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            points[n / 2] = 0.0;
        }
        Self { points, weights }
    }

    /// `n`-point Gauss–Lobatto–Legendre rule (endpoints included), `n >= 2`.
    pub fn gauss_lobatto(n: usize) -> Self {
        assert!(n >= 2, "Gauss-Lobatto rule needs at least two points");
        let order = n - 1;
        let mut x: Vec<f64> = (0..n).map(|i| (PI * i as f64 / order as f64).cos()).collect();
        let mut p_last = vec![0.0; n];
        for _ in 0..200 {
            let mut max_change: f64 = 0.0;
            for (j, xj) in x.iter_mut().enumerate() {
                let (pn, pn1) = legendre_pair(order, *xj);
                p_last[j] = pn;
                let step = (*xj * pn - pn1) / ((order as f64 + 1.0) * pn);
                *xj -= step;
                max_change = max_change.max(step.abs());
            }
            if max_change < 1e-16 {
                break;
            }
        }
        for (j, xj) in x.iter().enumerate() {
            p_last[j] = legendre_pair(order, *xj).0;
        }
        let scale = 2.0 / (order as f64 * (order as f64 + 1.0));
        let mut pairs: Vec<(f64, f64)> = x
            .iter()
            .zip(&p_last)
            .map(|(&xi, &pi)| (xi, scale / (pi * pi)))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        pairs[0].0 = -1.0;
        pairs[n - 1].0 = 1.0;
        // symmetrise to kill the last ulp of asymmetry
        for i in 0..n / 2 {
            let xs = 0.5 * (pairs[n - 1 - i].0 - pairs[i].0);
            let ws = 0.5 * (pairs[n - 1 - i].1 + pairs[i].1);
            pairs[i] = (-xs, ws);
            pairs[n - 1 - i] = (xs, ws);
        }
        if n % 2 == 1 {
            pairs[n / 2].0 = 0.0;
        }
        Self {
            points: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        }
    }

    /// Composite trapezoid rule with `panels` equal panels on [-1, 1].
    pub fn trapezoid(panels: usize) -> Self {
        assert!(panels >= 1, "trapezoid rule needs at least one panel");
        let width = 2.0 / panels as f64;
        let points = (0..=panels).map(|i| -1.0 + width * i as f64).collect();
        let weights = (0..=panels)
            .map(|i| if i == 0 || i == panels { 0.5 * width } else { width })
            .collect();
        Self { points, weights }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Physical points and weights on `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.points
            .iter()
            .zip(&self.weights)
            .map(move |(&p, &w)| (mid + half * p, half * w))
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

/// Legendre polynomial `P_n(x)` and its derivative.
pub fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (pn, pn1) = legendre_pair(n, x);
    let nf = n as f64;
    let d = if (1.0 - x * x).abs() < 1e-300 {
        // P_n'(±1) = (±1)^{n+1} n(n+1)/2
        let sign = if x > 0.0 || n % 2 == 1 { 1.0 } else { -1.0 };
        sign * nf * (nf + 1.0) / 2.0
    } else {
        nf * (x * pn - pn1) / (x * x - 1.0)
    };
    (pn, d)
}

/// `(P_n(x), P_{n-1}(x))` by the three-term recurrence.
pub fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut prev = 1.0;
    let mut cur = x;
    for k in 2..=n {
        let kf = k as f64;
        let next = ((2.0 * kf - 1.0) * x * cur - (kf - 1.0) * prev) / kf;
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

const KRONROD_NODES: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const GAUSS7_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One Gauss–Kronrod 7/15 panel: (Kronrod estimate, |Kronrod - Gauss|).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let fc = f(mid);
    let mut kronrod = KRONROD_WEIGHTS[7] * fc;
    let mut gauss = GAUSS7_WEIGHTS[3] * fc;
    for i in 0..7 {
        let dx = half * KRONROD_NODES[i];
        let pair = f(mid - dx) + f(mid + dx);
        kronrod += KRONROD_WEIGHTS[i] * pair;
        if i % 2 == 1 {
            gauss += GAUSS7_WEIGHTS[i / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// An accepted panel of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Panel {
    pub a: f64,
    pub b: f64,
    pub integral: f64,
}

/// Adaptive Gauss–Kronrod integration returning the accepted panels in order.
///
/// A panel is accepted once its error estimate falls below its share of
/// `max(rel_tol * |I|, abs_tol)`, using the running global estimate for `|I|`.
pub fn adaptive_panels<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<Vec<Panel>> {
    const MAX_PANELS: usize = 200_000;
    if a == b {
        return Ok(Vec::new());
    }
    let (whole, _) = gk15(&f, a, b);
    let mut scale = whole.abs();
    let mut stack = vec![(a, b)];
    let mut accepted = Vec::new();
    let length = (b - a).abs();
    while let Some((lo, hi)) = stack.pop() {
        let (val, err) = gk15(&f, lo, hi);
        let share = (hi - lo).abs() / length;
        let target = (rel_tol * scale).max(abs_tol) * share;
        let too_small = (hi - lo).abs() <= 1e-15 * (lo.abs() + hi.abs()).max(f64::MIN_POSITIVE);
        if err <= target || too_small {
            accepted.push(Panel { a: lo, b: hi, integral: val });
        } else {
            let mid = 0.5 * (lo + hi);
            // right half first so panels pop left to right
            stack.push((mid, hi));
            stack.push((lo, mid));
            // refine the magnitude estimate as the subdivision proceeds
            scale = scale.max(val.abs());
        }
        if accepted.len() + stack.len() > MAX_PANELS {
            return Err(Error::QuadratureLimit(MAX_PANELS));
        }
    }
    Ok(accepted)
}

/// Adaptive integral of `f` over `[a, b]`.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<f64> {
    Ok(adaptive_panels(f, a, b, rel_tol, abs_tol)?
        .iter()
        .map(|p| p.integral)
        .sum())
}
