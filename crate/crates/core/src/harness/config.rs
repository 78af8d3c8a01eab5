//! Experiment configuration.
//!
//! A config file holds `key=value` lines with the same names as the
//! command-line flags (`m_panels` and `m-panels` are both accepted). Values
//! are layered: built-in defaults, then the file, then `PXDG_WORKERS`, then
//! explicit flags.

use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::functional::VolumeQuadrature;
use crate::lifting::LiftingConfig;
use crate::optimizer::BfgsConfig;

pub const WORKERS_ENV: &str = "PXDG_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Dg,
    Cg,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dg" => Ok(Method::Dg),
            "cg" => Ok(Method::Cg),
            _ => Err(Error::Config(format!("unknown method `{s}` (dg or cg)"))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Dg => "dg",
            Method::Cg => "cg",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadKind {
    Trapezoid,
    Gauss,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// `paper1d` or `custom:<path>`.
    pub problem: String,
    pub eps: f64,
    pub a: f64,
    pub c: f64,
    pub method: Method,
    pub n: usize,
    pub ns: Vec<usize>,
    pub k: usize,
    pub l: usize,
    pub quad: QuadKind,
    /// Panels per element for the trapezoid rule, points for Gauss.
    pub m_panels: usize,
    pub tol: f64,
    pub max_iters: usize,
    pub out: PathBuf,
    pub plot: bool,
    pub seed: u64,
    pub workers: usize,
    pub samples: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            problem: "paper1d".into(),
            eps: 0.01,
            a: 0.01,
            c: 1.3,
            method: Method::Dg,
            n: 41,
            ns: vec![10, 20, 40, 80, 160],
            k: 1,
            l: 1,
            quad: QuadKind::Trapezoid,
            m_panels: 1,
            tol: 1e-8,
            max_iters: 10_000,
            out: PathBuf::from("out"),
            plot: false,
            seed: 20240613,
            workers: default_workers(),
            samples: 1000,
        }
    }
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value.trim().parse().map_err(|e| Error::Config(format!("`{key}`: {e}")))
}

impl ExperimentConfig {
    /// Sets one option by name.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim().replace('-', "_").as_str() {
            "problem" => self.problem = value.to_string(),
            "eps" => self.eps = parse(key, value)?,
            "a" => self.a = parse(key, value)?,
            "C" | "c" => self.c = parse(key, value)?,
            "method" => self.method = value.parse()?,
            "n" => self.n = parse(key, value)?,
            "ns" => {
                self.ns = value
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| parse(key, s))
                    .collect::<Result<_>>()?
            }
            "k" => self.k = parse(key, value)?,
            "l" => self.l = parse(key, value)?,
            "quad" => {
                self.quad = match value {
                    "trapezoid" => QuadKind::Trapezoid,
                    "gauss" => QuadKind::Gauss,
                    _ => return Err(Error::Config(format!("unknown quadrature `{value}` (trapezoid or gauss)"))),
                }
            }
            "m_panels" => self.m_panels = parse(key, value)?,
            "tol" => self.tol = parse(key, value)?,
            "max_iters" => self.max_iters = parse(key, value)?,
            "out" => self.out = PathBuf::from(value),
            "plot" => {
                self.plot = match value {
                    "svg" | "true" => true,
                    "none" | "false" => false,
                    _ => return Err(Error::Config(format!("unknown plot format `{value}` (svg or none)"))),
                }
            }
            "seed" => self.seed = parse(key, value)?,
            "workers" => self.workers = parse(key, value)?,
            "samples" => self.samples = parse(key, value)?,
            other => return Err(Error::Config(format!("unknown option `{other}`"))),
        }
        Ok(())
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value, got `{line}`", i + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    /// Defaults, then the optional file, then the environment, then `flags`.
    pub fn layered(file: Option<&std::path::Path>, env_workers: Option<&str>, flags: &[(&str, String)]) -> Result<Self> {
        let mut cfg = Self::default();
        if let Some(path) = file {
            let text =
                std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            cfg.apply_text(&text)?;
        }
        if let Some(w) = env_workers {
            cfg.set("workers", w).map_err(|e| Error::Config(format!("{WORKERS_ENV}: {e}")))?;
        }
        for (k, v) in flags {
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || self.ns.iter().any(|&n| n < 2) {
            return Err(Error::Config("meshes need at least 2 elements".into()));
        }
        if self.ns.is_empty() {
            return Err(Error::Config("`ns` is empty".into()));
        }
        if self.k < 1 {
            return Err(Error::Config("polynomial degree k must be at least 1".into()));
        }
        if self.m_panels < 1 {
            return Err(Error::Config("`m_panels` must be at least 1".into()));
        }
        if self.workers < 1 {
            return Err(Error::Config("`workers` must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Config("`tol` must be positive".into()));
        }
        if self.samples < 2 {
            return Err(Error::Config("`samples` must be at least 2".into()));
        }
        self.bfgs().validate()
    }

    pub fn quadrature(&self) -> VolumeQuadrature {
        match self.quad {
            QuadKind::Trapezoid => VolumeQuadrature::Trapezoid { panels: self.m_panels },
            QuadKind::Gauss => VolumeQuadrature::Gauss { points: self.m_panels },
        }
    }

    pub fn lifting(&self) -> LiftingConfig {
        LiftingConfig::new(self.l)
    }

    pub fn bfgs(&self) -> BfgsConfig {
        BfgsConfig { grad_tol: self.tol, max_iters: self.max_iters, ..Default::default() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_beat_env_beats_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "# sweep\nworkers=2\nns=10,20\nquad=gauss\nm-panels=4\n").unwrap();
        let cfg = ExperimentConfig::layered(Some(&path), None, &[]).unwrap();
        assert_eq!((cfg.workers, cfg.ns.clone(), cfg.quadrature()), (2, vec![10, 20], VolumeQuadrature::Gauss { points: 4 }));
        let cfg = ExperimentConfig::layered(Some(&path), Some("3"), &[]).unwrap();
        assert_eq!(cfg.workers, 3);
        let cfg = ExperimentConfig::layered(Some(&path), Some("3"), &[("workers", "5".into())]).unwrap();
        assert_eq!(cfg.workers, 5);
    }

    #[test]
    fn rejects_bad_values() {
        let mut cfg = ExperimentConfig::default();
        assert!(cfg.set("method", "fem").is_err());
        assert!(cfg.set("colour", "red").is_err());
        assert!(ExperimentConfig::layered(None, None, &[("n", "1".into())]).is_err());
        assert!(ExperimentConfig::layered(None, Some("many"), &[]).is_err());
    }
}
