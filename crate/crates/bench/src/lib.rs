//! Fixtures shared by the benchmarks.

use std::f64::consts::PI;
use vertex_core::ChainParams;

/// Evenly spread odd chain with moderate `η` and nome, away from the
/// non-generic set for every benchmarked length.
pub fn chain(n: usize) -> ChainParams {
    let xi: Vec<f64> = (0..n).map(|k| 0.3 + PI * k as f64 / (n as f64 + 0.5)).collect();
    ChainParams::real(&xi, 0.45, 0.25).expect("generic chain")
}

pub const SIZES: [usize; 3] = [3, 5, 7];
