//! Problem definitions for the command-line experiments.
//!
//! `paper1d` is the hat-exponent benchmark on `[-1, 1]` with data `u(+-1) = +-B`
//! calibrated from `C`. A custom problem is a line-oriented `key=value` file:
//!
//! ```text
//! # constant exponent sanity problem
//! domain=-1,1
//! p=kind=const value=2
//! dirichlet=left,right
//! u_left=-1
//! u_right=1
//! ```
//!
//! Optional keys: `q` and `xi` switch on a fidelity term, `r` gives the
//! Neumann exponent, `normalize=true` divides volume integrands by their
//! exponents. `xi` is one of `const:v`, `linear:a,b` (meaning `a + b x`) or
//! `sin:amp,freq`.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exact::ExactSolution;
use crate::exponent::ExponentField;
use crate::functional::{DataFn, FunctionalSpec, VolumeQuadrature};
use crate::lifting::LiftingConfig;
use crate::mesh::{BoundaryKind, DirichletData, Mesh1D};

/// Data function given by name in a problem file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DataKind {
    Const(f64),
    Linear(f64, f64),
    Sin { amp: f64, freq: f64 },
}

impl DataKind {
    pub fn to_fn(self) -> DataFn {
        match self {
            DataKind::Const(v) => Arc::new(move |_| v),
            DataKind::Linear(a, b) => Arc::new(move |x| a + b * x),
            DataKind::Sin { amp, freq } => Arc::new(move |x| amp * (freq * x).sin()),
        }
    }
}

impl FromStr for DataKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, args) = s.split_once(':').ok_or_else(|| Error::Parse(format!("data `{s}` needs kind:args")))?;
        let nums: Vec<f64> = args
            .split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|e| Error::Parse(format!("data `{s}`: {e}"))))
            .collect::<Result<_>>()?;
        match (kind, nums.as_slice()) {
            ("const", [v]) => Ok(DataKind::Const(*v)),
            ("linear", [a, b]) => Ok(DataKind::Linear(*a, *b)),
            ("sin", [amp, freq]) => Ok(DataKind::Sin { amp: *amp, freq: *freq }),
            _ => Err(Error::Parse(format!("unknown data `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CustomProblem {
    pub domain: (f64, f64),
    pub p: ExponentField,
    pub left: BoundaryKind,
    pub right: BoundaryKind,
    pub dirichlet: DirichletData,
    pub fidelity: Option<(ExponentField, DataKind)>,
    pub r: Option<ExponentField>,
    pub normalize: bool,
}

impl CustomProblem {
    pub fn parse(text: &str) -> Result<Self> {
        let mut keys = BTreeMap::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse(format!("expected key=value, got `{line}`")))?;
            keys.insert(k.trim().to_string(), v.trim().to_string());
        }
        let get = |k: &str| keys.get(k).map(String::as_str);
        let num = |k: &str, default: f64| -> Result<f64> {
            match get(k) {
                Some(v) => v.parse().map_err(|e| Error::Parse(format!("`{k}`: {e}"))),
                None => Ok(default),
            }
        };
        let domain = match get("domain") {
            Some(v) => {
                let parts: Vec<f64> = v
                    .split(',')
                    .map(|x| x.trim().parse::<f64>().map_err(|e| Error::Parse(format!("`domain`: {e}"))))
                    .collect::<Result<_>>()?;
                match parts.as_slice() {
                    [lo, hi] if lo < hi => (*lo, *hi),
                    _ => return Err(Error::Parse(format!("bad domain `{v}`"))),
                }
            }
            None => (-1.0, 1.0),
        };
        let p: ExponentField = get("p").ok_or_else(|| Error::Parse("missing `p`".into()))?.parse()?;
        let (mut left, mut right) = (BoundaryKind::Dirichlet, BoundaryKind::Dirichlet);
        if let Some(tags) = get("dirichlet") {
            left = BoundaryKind::Neumann;
            right = BoundaryKind::Neumann;
            for t in tags.split(',').map(str::trim).filter(|t| !t.is_empty()) {
                match t {
                    "left" => left = BoundaryKind::Dirichlet,
                    "right" => right = BoundaryKind::Dirichlet,
                    "both" => {
                        left = BoundaryKind::Dirichlet;
                        right = BoundaryKind::Dirichlet;
                    }
                    "none" => {}
                    other => return Err(Error::Parse(format!("unknown boundary tag `{other}`"))),
                }
            }
        }
        let dirichlet = DirichletData { left: num("u_left", 0.0)?, right: num("u_right", 0.0)? };
        let fidelity = match (get("q"), get("xi")) {
            (Some(q), Some(xi)) => Some((q.parse()?, xi.parse()?)),
            (None, None) => None,
            _ => return Err(Error::Parse("`q` and `xi` must be given together".into())),
        };
        let r = get("r").map(str::parse).transpose()?;
        let normalize = match get("normalize") {
            None | Some("false") => false,
            Some("true") => true,
            Some(v) => return Err(Error::Parse(format!("`normalize` must be true or false, got `{v}`"))),
        };
        for k in keys.keys() {
            if !["domain", "p", "dirichlet", "u_left", "u_right", "q", "xi", "r", "normalize"].contains(&k.as_str()) {
                return Err(Error::Parse(format!("unknown problem key `{k}`")));
            }
        }
        let p = p.with_domain_if_unbounded(domain)?;
        Ok(Self { domain, p, left, right, dirichlet, fidelity, r, normalize })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

#[derive(Debug, Clone)]
pub enum Problem {
    Paper1d { exact: Arc<ExactSolution> },
    Custom(CustomProblem),
}

impl Problem {
    pub fn paper1d(eps: f64, a: f64, c: f64) -> Result<Self> {
        Ok(Problem::Paper1d { exact: Arc::new(ExactSolution::new(eps, a, c)?) })
    }

    /// `paper1d` or `custom:<path>`.
    pub fn from_id(id: &str, eps: f64, a: f64, c: f64) -> Result<Self> {
        match id {
            "paper1d" => Self::paper1d(eps, a, c),
            _ => match id.strip_prefix("custom:") {
                Some(path) => Ok(Problem::Custom(CustomProblem::load(Path::new(path))?)),
                None => Err(Error::Config(format!("unknown problem `{id}`"))),
            },
        }
    }

    pub fn exact(&self) -> Option<&ExactSolution> {
        match self {
            Problem::Paper1d { exact } => Some(exact),
            Problem::Custom(_) => None,
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        match self {
            Problem::Paper1d { .. } => (-1.0, 1.0),
            Problem::Custom(c) => c.domain,
        }
    }

    pub fn exponent(&self) -> &ExponentField {
        match self {
            Problem::Paper1d { exact } => exact.exponent(),
            Problem::Custom(c) => &c.p,
        }
    }

    pub fn mesh(&self, n: usize) -> Result<Mesh1D> {
        let (lo, hi) = self.domain();
        let (l, r) = match self {
            Problem::Paper1d { .. } => (BoundaryKind::Dirichlet, BoundaryKind::Dirichlet),
            Problem::Custom(c) => (c.left, c.right),
        };
        Mesh1D::uniform(lo, hi, n, l, r)
    }

    pub fn spec(&self, quadrature: VolumeQuadrature, lifting: LiftingConfig) -> FunctionalSpec {
        match self {
            Problem::Paper1d { exact } => {
                let b = exact.b();
                FunctionalSpec::new(exact.exponent().clone(), DirichletData { left: -b, right: b })
                    .with_quadrature(quadrature)
                    .with_lifting(lifting)
            }
            Problem::Custom(c) => {
                let mut spec = FunctionalSpec::new(c.p.clone(), c.dirichlet)
                    .with_quadrature(quadrature)
                    .with_lifting(lifting)
                    .normalized(c.normalize);
                if let Some((q, xi)) = &c.fidelity {
                    spec = spec.with_fidelity(q.clone(), xi.to_fn());
                }
                if let Some(r) = &c.r {
                    spec = spec.with_neumann(r.clone());
                }
                spec
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn custom_file() {
        let text = "# p = 2\ndomain=-1,1\np=kind=const value=2\ndirichlet=left,right\nu_left=-3\nu_right=3\n";
        let c = CustomProblem::parse(text).unwrap();
        assert_eq!(c.dirichlet, DirichletData { left: -3.0, right: 3.0 });
        assert_eq!(c.p.domain(), (-1.0, 1.0));
        let with_fid = format!("{text}q=kind=const value=2\nxi=sin:1,3\n");
        assert!(CustomProblem::parse(&with_fid).unwrap().fidelity.is_some());
        assert!(CustomProblem::parse("p=kind=const value=2\nfoo=1").is_err());
        assert!(CustomProblem::parse("p=kind=const value=2\nq=kind=const value=2").is_err());
    }

    #[test]
    fn data_functions() {
        let f = "linear:1,2".parse::<DataKind>().unwrap().to_fn();
        assert_eq!(f(3.0), 7.0);
        assert!("cos:1".parse::<DataKind>().is_err());
    }
}
