use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{GeneratorSpec, Model};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::seed;

/// Distance scale `L` of the unit square (its diagonal).
pub const WAXMAN_DISTANCE_SCALE: f64 = std::f64::consts::SQRT_2;

const MAX_BISECTION_STEPS: usize = 50;
const DEGREE_TOLERANCE: f64 = 0.05;

/// Link probability `beta * exp(-d / (alpha * L))`.
pub fn waxman_probability(distance: f64, alpha: f64, beta: f64) -> f64 {
    beta * (-distance / (alpha * WAXMAN_DISTANCE_SCALE)).exp()
}

struct Placement {
    xy: Vec<(f64, f64)>,
    alpha: f64,
    pair_seed: u64,
}

impl Placement {
    /// Replays the per-pair uniform draws, so every call sees the same
    /// randomness and the edge count is monotone in `beta`.
    fn for_each_link(&self, beta: f64, mut f: impl FnMut(usize, usize)) {
        let mut rng: ChaCha8Rng = seed::rng(self.pair_seed);
        let n = self.xy.len();
        for i in 0..n {
            let (xi, yi) = self.xy[i];
            for j in i + 1..n {
                let (xj, yj) = self.xy[j];
                let d = ((xi - xj).powi(2) + (yi - yj).powi(2)).sqrt();
                let u: f64 = rng.random();
                if u < waxman_probability(d, self.alpha, beta) {
                    f(i, j);
                }
            }
        }
    }

    fn count(&self, beta: f64) -> usize {
        let mut c = 0;
        self.for_each_link(beta, |_, _| c += 1);
        c
    }

    /// Sum of `exp(-d / (alpha L))` over pairs: expected edges at beta = 1.
    fn weight_sum(&self) -> f64 {
        let n = self.xy.len();
        let mut s = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                let (dx, dy) = (self.xy[i].0 - self.xy[j].0, self.xy[i].1 - self.xy[j].1);
                s += waxman_probability((dx * dx + dy * dy).sqrt(), self.alpha, 1.0);
            }
        }
        s
    }
}

/// Waxman geographic graph on uniform points in the unit square. Without an
/// explicit `beta`, the scale is found by bisection so the realized mean
/// degree lands within 5% of `k_avg`.
pub fn gen_waxman(spec: &GeneratorSpec) -> Result<Graph> {
    spec.validate()?;
    let (alpha, beta) = match spec.model {
        Model::Waxman { alpha, beta } => (alpha, beta),
        _ => return Err(Error::param("gen_waxman needs a waxman spec")),
    };
    let n = spec.n;
    let mut rng = seed::rng(spec.seed());
    let xy: Vec<(f64, f64)> = (0..n).map(|_| (rng.random(), rng.random())).collect();
    let placement = Placement {
        xy,
        alpha,
        pair_seed: rng.random(),
    };
    let beta = match beta {
        Some(b) => b,
        None => calibrate(&placement, spec.k_avg)?,
    };
    let mut edges = Vec::new();
    placement.for_each_link(beta, |i, j| edges.push((i, j)));
    Ok(Graph::from_sorted_unique(n, edges))
}

fn calibrate(p: &Placement, k_avg: f64) -> Result<f64> {
    let n = p.xy.len() as f64;
    let target = k_avg * n / 2.0;
    let ok = |edges: usize| ((edges as f64 - target) / target).abs() <= DEGREE_TOLERANCE;
    let mut beta = (target / p.weight_sum()).min(1.0);
    let mut lo = 0.0;
    let mut hi = 1.0;
    for _ in 0..MAX_BISECTION_STEPS {
        let c = p.count(beta);
        if ok(c) {
            return Ok(beta);
        }
        if (c as f64) < target {
            lo = beta;
        } else {
            hi = beta;
        }
        beta = 0.5 * (lo + hi);
    }
    Err(Error::Generation(format!(
        "waxman beta calibration did not reach mean degree {k_avg} within {MAX_BISECTION_STEPS} steps"
    )))
}
