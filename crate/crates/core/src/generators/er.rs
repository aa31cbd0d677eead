use rand::Rng;

use super::GeneratorSpec;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::seed;

/// G(n, p) with `p = k_avg / (n - 1)`, drawn by geometric skipping over the
/// lower-triangular pair order.
pub fn gen_er(spec: &GeneratorSpec) -> Result<Graph> {
    spec.validate()?;
    let n = spec.n;
    if spec.k_avg >= (n - 1) as f64 {
        return Err(Error::param(format!(
            "k_avg {} must be below n - 1 = {}",
            spec.k_avg,
            n - 1
        )));
    }
    let p = spec.k_avg / (n - 1) as f64;
    let mut rng = seed::rng(spec.seed());
    let log_q = (1.0 - p).ln();
    let mut edges = Vec::new();
    let mut v: usize = 1;
    let mut w: i64 = -1;
    while v < n {
        let r: f64 = rng.random();
        w += 1 + ((1.0 - r).ln() / log_q).floor() as i64;
        while w >= v as i64 && v < n {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            edges.push((w as usize, v));
        }
    }
    edges.sort_unstable();
    Ok(Graph::from_sorted_unique(n, edges))
}
