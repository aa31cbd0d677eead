//! Seeded synthetic topologies: Erdős–Rényi, Barabási–Albert, Waxman and a
//! simplified LFR benchmark.
//!
//! Every generator is a pure function of its [`GeneratorSpec`]; the seed
//! fully determines the output edge list.

mod ba;
mod er;
mod lfr;
mod waxman;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::partition::Partition;

pub use ba::gen_ba;
pub use er::gen_er;
pub use lfr::{gen_lfr, mixing_fraction};
pub use waxman::{gen_waxman, waxman_probability, WAXMAN_DISTANCE_SCALE};

pub const DEFAULT_WAXMAN_ALPHA: f64 = 0.1;

fn default_alpha() -> f64 {
    DEFAULT_WAXMAN_ALPHA
}
fn default_communities() -> usize {
    5
}
fn default_t1() -> f64 {
    3.0
}

/// Model-specific parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum Model {
    Er,
    Ba {
        /// Edges per arriving node; defaults to `round(k_avg / 2)`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        attachments: Option<usize>,
    },
    #[serde(rename = "wax", alias = "waxman")]
    Waxman {
        #[serde(default = "default_alpha")]
        alpha: f64,
        /// Fixed link scale; `None` calibrates it to hit `k_avg`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        beta: Option<f64>,
    },
    Lfr {
        #[serde(default = "default_communities")]
        communities: usize,
        #[serde(default = "default_t1")]
        t1: f64,
        #[serde(default)]
        t2: f64,
        mu: f64,
    },
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Model::Er => "er",
            Model::Ba { .. } => "ba",
            Model::Waxman { .. } => "wax",
            Model::Lfr { .. } => "lfr",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(flatten)]
    pub model: Model,
    pub n: usize,
    pub k_avg: f64,
    /// `None` is filled in by the experiment runner from its master seed;
    /// direct calls treat it as 0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Output of a generator. `partition` is the planted membership for LFR.
#[derive(Debug, Clone)]
pub struct Generated {
    pub graph: Graph,
    pub partition: Option<Partition>,
}

impl GeneratorSpec {
    pub fn new(model: Model, n: usize, k_avg: f64, seed: u64) -> Self {
        GeneratorSpec {
            model,
            n,
            k_avg,
            seed: Some(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 10 {
            return Err(Error::param(format!("n must be at least 10, got {}", self.n)));
        }
        if !(self.k_avg > 0.0 && self.k_avg.is_finite()) {
            return Err(Error::param(format!("k_avg must be positive, got {}", self.k_avg)));
        }
        if let Model::Lfr { mu, communities, t1, .. } = self.model {
            if !(0.0..=1.0).contains(&mu) {
                return Err(Error::param(format!("mu must lie in [0, 1], got {mu}")));
            }
            if communities == 0 || communities > self.n {
                return Err(Error::param(format!("invalid community count {communities}")));
            }
            if t1 <= 1.0 {
                return Err(Error::param(format!("degree exponent t1 must exceed 1, got {t1}")));
            }
        }
        if let Model::Waxman { alpha, beta } = self.model {
            if !(alpha > 0.0) {
                return Err(Error::param(format!("waxman alpha must be positive, got {alpha}")));
            }
            if let Some(b) = beta {
                if !(b > 0.0 && b <= 1.0) {
                    return Err(Error::param(format!("waxman beta must lie in (0, 1], got {b}")));
                }
            }
        }
        Ok(())
    }

    pub fn generate(&self) -> Result<Generated> {
        self.validate()?;
        match self.model {
            Model::Lfr { .. } => {
                let (graph, partition) = gen_lfr(self)?;
                Ok(Generated {
                    graph,
                    partition: Some(partition),
                })
            }
            _ => {
                let graph = match self.model {
                    Model::Er => gen_er(self)?,
                    Model::Ba { .. } => gen_ba(self)?,
                    Model::Waxman { .. } => gen_waxman(self)?,
                    Model::Lfr { .. } => unreachable!(),
                };
                Ok(Generated {
                    graph,
                    partition: None,
                })
            }
        }
    }
}
