use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the nodes of a [`RadialGrid`] were laid out.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Grading {
    /// `r_{i+1} / r_i` constant.
    Geometric { ratio: f64 },
    Uniform,
    Custom,
}

/// Strictly increasing radii in `(0, 1]`, ending exactly at `r = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    nodes: Vec<f64>,
    grading: Grading,
}

impl RadialGrid {
    pub const DEFAULT_NODES: usize = 2000;
    pub const DEFAULT_R_MIN: f64 = 1e-6;

    /// Geometric grid with `n` nodes from `r_min` to 1.
    pub fn geometric(n: usize, r_min: f64) -> Result<Self> {
        check_shape(n, r_min)?;
        let log_min = r_min.ln();
        let nodes = (0..n)
            .map(|i| {
                if i + 1 == n {
                    1.0
                } else if i == 0 {
                    r_min
                } else {
                    (log_min * (1.0 - i as f64 / (n - 1) as f64)).exp()
                }
            })
            .collect();
        let ratio = (-log_min / (n - 1) as f64).exp();
        Self::build(nodes, Grading::Geometric { ratio })
    }

    pub fn uniform(n: usize, r_min: f64) -> Result<Self> {
        check_shape(n, r_min)?;
        let h = (1.0 - r_min) / (n - 1) as f64;
        let nodes = (0..n)
            .map(|i| if i + 1 == n { 1.0 } else { r_min + h * i as f64 })
            .collect();
        Self::build(nodes, Grading::Uniform)
    }

    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        Self::build(nodes, Grading::Custom)
    }

    pub fn default_geometric() -> Self {
        Self::geometric(Self::DEFAULT_NODES, Self::DEFAULT_R_MIN).expect("default grid is valid")
    }

    fn build(nodes: Vec<f64>, grading: Grading) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidGrid("need at least two nodes".into()));
        }
        if nodes[0] <= 0.0 || !nodes[0].is_finite() {
            return Err(Error::InvalidGrid(format!("r_min = {} must be positive", nodes[0])));
        }
        if *nodes.last().unwrap() != 1.0 {
            return Err(Error::InvalidGrid("last node must equal 1".into()));
        }
        if let Some(w) = nodes.windows(2).find(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidGrid(format!(
                "nodes not strictly increasing at {} -> {}",
                w[0], w[1]
            )));
        }
        Ok(Self { nodes, grading })
    }

    /// Adds `extra` radii (those inside `(r_min, 1)`) to the node set.
    pub fn with_extra_nodes(&self, extra: &[f64]) -> Result<Self> {
        let mut nodes = self.nodes.clone();
        nodes.extend(extra.iter().copied().filter(|&r| r > self.r_min() && r < 1.0));
        nodes.sort_by(f64::total_cmp);
        nodes.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * b.abs());
        Self::build(nodes, Grading::Custom)
    }

    /// Grid of roughly twice the density that contains every current node.
    pub fn refined(&self) -> Self {
        match self.grading {
            Grading::Geometric { .. } => Self::geometric(2 * self.len() - 1, self.r_min()),
            Grading::Uniform => Self::uniform(2 * self.len() - 1, self.r_min()),
            Grading::Custom => {
                let mut nodes = Vec::with_capacity(2 * self.len());
                for w in self.nodes.windows(2) {
                    nodes.push(w[0]);
                    nodes.push((w[0] * w[1]).sqrt());
                }
                nodes.push(1.0);
                Self::build(nodes, Grading::Custom)
            }
        }
        .expect("refinement of a valid grid is valid")
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn r_min(&self) -> f64 {
        self.nodes[0]
    }

    pub fn grading(&self) -> &Grading {
        &self.grading
    }

    /// Index `i` with `nodes[i] <= r <= nodes[i+1]`, clamped to the grid.
    pub fn locate(&self, r: f64) -> usize {
        let idx = self.nodes.partition_point(|&x| x <= r);
        idx.saturating_sub(1).min(self.len() - 2)
    }

    /// Index of the node nearest to `r` in log scale.
    pub fn nearest(&self, r: f64) -> usize {
        let i = self.locate(r);
        if (r / self.nodes[i]).ln().abs() <= (self.nodes[i + 1] / r).ln().abs() {
            i
        } else {
            i + 1
        }
    }
}

fn check_shape(n: usize, r_min: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidGrid(format!("need at least two nodes, got {n}")));
    }
    if !(r_min > 0.0 && r_min < 1.0) {
        return Err(Error::InvalidGrid(format!("r_min = {r_min} must lie in (0, 1)")));
    }
    Ok(())
}
