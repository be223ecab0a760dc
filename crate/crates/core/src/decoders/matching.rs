//! Minimum-weight perfect matching on a complete graph with real edge weights.
//!
//! Weights are quantized to integers and handed to a blossom-algorithm solver for
//! maximum-weight maximum-cardinality matching.

use mwmatching::{Matching, SENTINEL};

use crate::error::{invalid, Error, Result};

/// Quantization step of edge weights.
pub const WEIGHT_SCALE: f64 = 1000.0;
/// Weights above this (including infinite ones) are clamped.
pub const WEIGHT_CAP: f64 = 100_000.0;

fn quantize(w: f64) -> i32 {
    let w = if w.is_nan() { WEIGHT_CAP } else { w.clamp(0.0, WEIGHT_CAP) };
    (w * WEIGHT_SCALE).round() as i32
}

/// Pairs `0..n` minimizing the summed weight. Ties resolve deterministically through
/// the fixed lexicographic edge order.
pub fn min_weight_perfect_matching(n: usize, weight: impl Fn(usize, usize) -> f64) -> Result<Vec<(usize, usize)>> {
    if n % 2 == 1 {
        return Err(invalid(format!("cannot perfectly match an odd number ({n}) of vertices")));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let big = quantize(WEIGHT_CAP) + 1;
    let mut edges = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            // the solver needs even weights to stay in integer arithmetic
            edges.push((i, j, 2 * (big - quantize(weight(i, j)))));
        }
    }
    let mate = Matching::new(edges).max_cardinality().solve();
    let mut pairs = Vec::with_capacity(n / 2);
    for (i, &m) in mate.iter().enumerate() {
        if m == SENTINEL {
            return Err(Error::Numerical(format!("vertex {i} left unmatched")));
        }
        if i < m {
            pairs.push((i, m));
        }
    }
    Ok(pairs)
}
