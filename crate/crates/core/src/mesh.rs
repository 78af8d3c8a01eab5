//! One-dimensional meshes.
//!
//! Faces are the mesh nodes. Interior faces are nodes `1..n`, and the two
//! boundary faces are nodes `0` and `n`. A face is a point with no geometric
//! diameter, so the face size of an interior face is the average of its two
//! neighbouring element lengths. A boundary face takes the length of its only
//! neighbour.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    Dirichlet,
    Neumann,
}

/// One end of the interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum End {
    Left,
    Right,
}

/// Dirichlet values at the two ends; only ends tagged Dirichlet use them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirichletData {
    pub left: f64,
    pub right: f64,
}

impl DirichletData {
    pub fn at(&self, end: End) -> f64 {
        match end {
            End::Left => self.left,
            End::Right => self.right,
        }
    }
}

/// How face sizes are assigned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FaceSizeRule {
    #[default]
    Standard,
    /// Every face gets size 1 whatever the mesh. Only useful as a negative
    /// control: penalties and jump norms stop scaling with the mesh.
    DebugConstant,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1D {
    nodes: Vec<f64>,
    left: BoundaryKind,
    right: BoundaryKind,
    face_rule: FaceSizeRule,
}

/// Element patches around nodes (`T_z`) and around elements (`T_kappa`).
#[derive(Debug, Clone, PartialEq)]
pub struct Neighborhoods {
    pub node_patches: Vec<Vec<usize>>,
    pub element_patches: Vec<Vec<usize>>,
}

impl Mesh1D {
    pub fn new(nodes: Vec<f64>, left: BoundaryKind, right: BoundaryKind) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::Argument("a mesh needs at least two nodes".into()));
        }
        if nodes.iter().any(|x| !x.is_finite()) {
            return Err(Error::Argument("mesh nodes must be finite".into()));
        }
        if nodes.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Argument("mesh nodes must be strictly increasing".into()));
        }
        Ok(Self { nodes, left, right, face_rule: FaceSizeRule::Standard })
    }

    /// `n` equal elements on `[lo, hi]`, `n >= 2`.
    pub fn uniform(lo: f64, hi: f64, n: usize, left: BoundaryKind, right: BoundaryKind) -> Result<Self> {
        if n < 2 {
            return Err(Error::Argument(format!("uniform mesh needs n >= 2, got {n}")));
        }
        if !(lo < hi) {
            return Err(Error::Argument(format!("empty interval [{lo}, {hi}]")));
        }
        let width = hi - lo;
        let mut nodes: Vec<f64> = (0..=n).map(|i| lo + width * (i as f64 / n as f64)).collect();
        nodes[n] = hi;
        Self::new(nodes, left, right)
    }

    pub fn with_face_size_rule(mut self, rule: FaceSizeRule) -> Self {
        self.face_rule = rule;
        self
    }

    pub fn face_size_rule(&self) -> FaceSizeRule {
        self.face_rule
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn n_elements(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.nodes[0], self.nodes[self.nodes.len() - 1])
    }

    pub fn length(&self) -> f64 {
        let (lo, hi) = self.domain();
        hi - lo
    }

    pub fn element(&self, e: usize) -> (f64, f64) {
        (self.nodes[e], self.nodes[e + 1])
    }

    pub fn element_len(&self, e: usize) -> f64 {
        self.nodes[e + 1] - self.nodes[e]
    }

    pub fn max_element_len(&self) -> f64 {
        (0..self.n_elements()).map(|e| self.element_len(e)).fold(0.0, f64::max)
    }

    pub fn min_element_len(&self) -> f64 {
        (0..self.n_elements()).map(|e| self.element_len(e)).fold(f64::INFINITY, f64::min)
    }

    pub fn boundary_kind(&self, end: End) -> BoundaryKind {
        match end {
            End::Left => self.left,
            End::Right => self.right,
        }
    }

    /// Node index of a boundary face.
    pub fn boundary_node(&self, end: End) -> usize {
        match end {
            End::Left => 0,
            End::Right => self.n_elements(),
        }
    }

    /// Boundary ends carrying the given tag.
    pub fn ends(&self, kind: BoundaryKind) -> Vec<End> {
        [End::Left, End::Right].into_iter().filter(|&s| self.boundary_kind(s) == kind).collect()
    }

    /// Node indices of the interior faces.
    pub fn interior_faces(&self) -> std::ops::Range<usize> {
        1..self.n_elements()
    }

    pub fn is_interior_face(&self, node: usize) -> bool {
        node >= 1 && node < self.n_elements()
    }

    /// The face-size function at the face located at node `node`.
    pub fn face_size(&self, node: usize) -> f64 {
        if self.face_rule == FaceSizeRule::DebugConstant {
            return 1.0;
        }
        let n = self.n_elements();
        if node == 0 {
            self.element_len(0)
        } else if node == n {
            self.element_len(n - 1)
        } else {
            0.5 * (self.element_len(node - 1) + self.element_len(node))
        }
    }

    /// Element containing `x`; nodes belong to the element on their right
    /// except the last one.
    pub fn locate(&self, x: f64) -> Result<usize> {
        let (lo, hi) = self.domain();
        if x.is_nan() || x < lo || x > hi {
            return Err(Error::Domain { x, lo, hi });
        }
        let i = self.nodes.partition_point(|&b| b <= x);
        Ok(i.saturating_sub(1).min(self.n_elements() - 1))
    }

    /// Bisects every element; boundary tags and the face rule are kept.
    pub fn refine(&self) -> Mesh1D {
        let mut nodes = Vec::with_capacity(2 * self.nodes.len() - 1);
        for w in self.nodes.windows(2) {
            nodes.push(w[0]);
            nodes.push(0.5 * (w[0] + w[1]));
        }
        nodes.push(self.nodes[self.nodes.len() - 1]);
        Mesh1D { nodes, left: self.left, right: self.right, face_rule: self.face_rule }
    }

    /// Elements touching node `z`.
    pub fn node_patch(&self, z: usize) -> Vec<usize> {
        let n = self.n_elements();
        match z {
            0 => vec![0],
            _ if z == n => vec![n - 1],
            _ => vec![z - 1, z],
        }
    }

    /// Element `e` plus every element sharing a node with it.
    pub fn element_patch(&self, e: usize) -> Vec<usize> {
        let lo = e.saturating_sub(1);
        let hi = (e + 1).min(self.n_elements() - 1);
        (lo..=hi).collect()
    }

    pub fn neighborhoods(&self) -> Neighborhoods {
        Neighborhoods {
            node_patches: (0..self.n_nodes()).map(|z| self.node_patch(z)).collect(),
            element_patches: (0..self.n_elements()).map(|e| self.element_patch(e)).collect(),
        }
    }

    /// Length of the union of the elements in `patch` (which is contiguous).
    pub fn patch_diameter(&self, patch: &[usize]) -> f64 {
        let first = patch.iter().min().copied().unwrap_or(0);
        let last = patch.iter().max().copied().unwrap_or(0);
        self.nodes[last + 1] - self.nodes[first]
    }
}

impl fmt::Display for Mesh1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nodes: Vec<String> = self.nodes.iter().map(|x| x.to_string()).collect();
        let mut tags = Vec::new();
        if self.left == BoundaryKind::Dirichlet {
            tags.push("left");
        }
        if self.right == BoundaryKind::Dirichlet {
            tags.push("right");
        }
        let tags = if tags.is_empty() { "none".to_string() } else { tags.join(",") };
        write!(f, "nodes={} dirichlet={}", nodes.join(","), tags)
    }
}

impl FromStr for Mesh1D {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut nodes = None;
        let mut left = BoundaryKind::Neumann;
        let mut right = BoundaryKind::Neumann;
        for token in s.split_whitespace() {
            let (k, v) = token
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got `{token}`")))?;
            match k {
                "nodes" => {
                    let parsed: std::result::Result<Vec<f64>, _> = v.split(',').map(|x| x.trim().parse()).collect();
                    nodes = Some(parsed.map_err(|e| Error::Parse(format!("`nodes`: {e}")))?);
                }
                "dirichlet" => {
                    for tag in v.split(',').filter(|t| !t.is_empty()) {
                        match tag {
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
                other => return Err(Error::Parse(format!("unknown mesh key `{other}`"))),
            }
        }
        let nodes = nodes.ok_or_else(|| Error::Parse("missing `nodes`".into()))?;
        Mesh1D::new(nodes, left, right)
    }
}
