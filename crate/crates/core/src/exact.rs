//! Exact solution of the one-dimensional benchmark with the hat exponent.
//!
//! For `p(x) = ((1 - eps)/a)|x| + 1 + eps` on `|x| <= a` and `2` elsewhere,
//! the minimizer of `int |u'|^{p(x)}` with `u(+-1) = +-B` has constant flux
//! `|u'|^{p-2} u' = C`, so `u' = C^{1/(p(x) - 1)}`. The derivative is `C` on
//! `a <= |x| <= 1` and reaches `C^{1/eps}` at the origin. `u` is odd and
//! `B = int_0^a C^{1/(p(s)-1)} ds + C (1 - a)`.

use std::io::Write;
use std::path::Path;

use crate::broken_space::{fmt_float, write_atomic};
use crate::error::{Error, Result};
use crate::exponent::ExponentField;
use crate::quadrature::{adaptive_panels, integrate_adaptive, Panel, QuadratureRule};

/// Relative tolerance of the adaptive integrations behind `u` and `B`.
pub const EXACT_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ExactSolution {
    eps: f64,
    a: f64,
    c: f64,
    field: ExponentField,
    /// Accepted panels on `[0, a]` and the running integral at each panel start.
    panels: Vec<Panel>,
    prefix: Vec<f64>,
    u_at_a: f64,
    b: f64,
    rule: QuadratureRule,
}

impl ExactSolution {
    pub fn new(eps: f64, a: f64, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Argument(format!("C must be positive, got {c}")));
        }
        if !(a < 1.0) {
            return Err(Error::Argument(format!("a must lie in (0, 1), got {a}")));
        }
        let field = ExponentField::hat(eps, a)?;
        let slope = {
            let field = field.clone();
            move |s: f64| c.powf(1.0 / field.excess(s).unwrap_or(1.0))
        };
        let panels = adaptive_panels(&slope, 0.0, a, EXACT_REL_TOL, 0.0)?;
        let mut prefix = Vec::with_capacity(panels.len());
        let mut acc = 0.0;
        for p in &panels {
            prefix.push(acc);
            acc += p.integral;
        }
        let u_at_a = acc;
        let b = u_at_a + c * (1.0 - a);
        Ok(Self { eps, a, c, field, panels, prefix, u_at_a, b, rule: QuadratureRule::gauss_legendre(20) })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// `B = u(1) = -u(-1)`.
    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn exponent(&self) -> &ExponentField {
        &self.field
    }

    /// `u'(x) = C^{1/(p(x) - 1)}`, with `p - 1` formed without cancellation.
    pub fn derivative(&self, x: f64) -> Result<f64> {
        Ok(self.c.powf(1.0 / self.field.excess(x)?))
    }

    fn u_positive(&self, x: f64) -> f64 {
        if x >= self.a {
            return self.u_at_a + self.c * (x - self.a);
        }
        let i = self.panels.partition_point(|p| p.b <= x).min(self.panels.len() - 1);
        let panel = &self.panels[i];
        if x == panel.a {
            return self.prefix[i];
        }
        let part = self.rule.integrate(panel.a, x, |s| self.c.powf(1.0 / self.field.excess(s).unwrap_or(1.0)));
        self.prefix[i] + part
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        if x.is_nan() || x.abs() > 1.0 {
            return Err(Error::Domain { x, lo: -1.0, hi: 1.0 });
        }
        Ok(if x < 0.0 { -self.u_positive(-x) } else { self.u_positive(x) })
    }

    /// `(u(x), u'(x))`.
    pub fn eval(&self, x: f64) -> Result<(f64, f64)> {
        Ok((self.value(x)?, self.derivative(x)?))
    }

    /// `I(u) = int |u'|^{p}`, by adaptive quadrature on `[0, a]`. The
    /// constant flux gives the closed form `2 B C` as a cross-check.
    pub fn energy(&self) -> Result<f64> {
        let c = self.c;
        let field = &self.field;
        let inner = integrate_adaptive(
            |s| {
                let e = field.excess(s).unwrap_or(1.0);
                c.powf((1.0 + e) / e)
            },
            0.0,
            self.a,
            EXACT_REL_TOL,
            0.0,
        )?;
        Ok(2.0 * (inner + c * c * (1.0 - self.a)))
    }

    /// `x,u,du` on `samples` equispaced points of `[-1, 1]`.
    pub fn write_csv<W: Write>(&self, samples: usize, out: W) -> Result<()> {
        if samples < 2 {
            return Err(Error::Argument("need at least two samples".into()));
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "u", "du"])?;
        for i in 0..samples {
            let x = if i == samples - 1 { 1.0 } else { -1.0 + 2.0 * i as f64 / (samples - 1) as f64 };
            let (u, du) = self.eval(x)?;
            w.write_record([fmt_float(x), fmt_float(u), fmt_float(du)])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, samples: usize, path: &Path) -> Result<()> {
        let mut buf = Vec::new();
        self.write_csv(samples, &mut buf)?;
        write_atomic(path, &buf)
    }
}

/// `ExactSolution::new`, named after the calibration step it performs.
pub fn build_exact(eps: f64, a: f64, c: f64) -> Result<ExactSolution> {
    ExactSolution::new(eps, a, c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_at_the_origin() {
        let u = build_exact(0.01, 0.01, 1.3).unwrap();
        assert_eq!(u.derivative(0.0).unwrap(), 1.3f64.powf(100.0));
        let (u0, _) = u.eval(0.0).unwrap();
        assert_eq!(u0, 0.0);
    }

    #[test]
    fn unit_flux_gives_the_identity() {
        let u = build_exact(0.3, 0.5, 1.0).unwrap();
        assert!((u.b() - 1.0).abs() < 1e-14);
        for x in [-0.9, -0.2, 0.1, 0.4, 0.7] {
            let (v, d) = u.eval(x).unwrap();
            assert!((v - x).abs() < 1e-14 && d == 1.0);
        }
    }

    #[test]
    fn structural_identities() {
        let u = build_exact(0.01, 0.01, 1.3).unwrap();
        assert_eq!(u.value(1.0).unwrap(), u.b());
        assert_eq!(u.value(-1.0).unwrap(), -u.b());
        assert_eq!(u.value(0.01).unwrap() + 1.3 * (1.0 - 0.01), u.b());
        for x in [0.001, 0.004, 0.3] {
            assert_eq!(u.value(-x).unwrap(), -u.value(x).unwrap());
            assert_eq!(u.derivative(-x).unwrap(), u.derivative(x).unwrap());
        }
        // linear with slope C outside [-a, a]
        let (u1, u2) = (u.value(0.5).unwrap(), u.value(0.75).unwrap());
        assert!(((u2 - u1) / 0.25 - 1.3).abs() < 1e-9);
        assert!(matches!(u.eval(1.5), Err(Error::Domain { .. })));
        assert!(build_exact(0.01, 0.01, 0.0).is_err());
    }

    #[test]
    fn flux_is_constant() {
        let u = build_exact(0.01, 0.01, 1.3).unwrap();
        let p = u.exponent().clone();
        for i in 0..=200 {
            let x = -1.0 + 0.01 * i as f64;
            let d = u.derivative(x).unwrap();
            let flux = d.powf(p.excess(x).unwrap());
            assert!((flux / 1.3 - 1.0).abs() < 1e-9, "x={x} flux={flux}");
        }
    }

    #[test]
    fn energy_matches_the_closed_form() {
        let u = build_exact(0.01, 0.01, 1.3).unwrap();
        let e = u.energy().unwrap();
        assert!((e / (2.0 * u.b() * 1.3) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn b_increases_with_c() {
        let h = 1e-6;
        let lo = build_exact(0.01, 0.01, 1.3 - h).unwrap().b();
        let hi = build_exact(0.01, 0.01, 1.3 + h).unwrap().b();
        assert!(hi > lo);
    }
}
