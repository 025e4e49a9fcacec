//! Deterministic bootstrap over per-structure values.
//!
//! The resampling generator is pinned so results are identical across
//! platforms, thread counts, and runs:
//!
//! - `mix64` is the standard SplitMix64 finalizer (multiply-xorshift with
//!   constants 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB).
//! - Iteration `i` (0-based) draws sample `j` (0-based) from index
//!   `mix64(mix64(seed + Γ·(i+1)) + Γ·(j+1)) mod n`, where Γ is the
//!   golden-ratio increment 0x9E3779B97F4A7C15 and every addition and
//!   multiplication wraps modulo 2^64.
//!
//! Because every draw is a pure function of (seed, i, j), iterations can be
//! computed in parallel and still reproduce the serial result bit-for-bit;
//! the final reduction always runs in iteration order.
//!
//! Summary statistics over the resample means use the corrected two-pass
//! variance, `(Σ(x−m)² − (Σ(x−m))²/N) / (N−1)` with `m` the naive mean, so
//! a constant input yields an SEM of exactly zero.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Default number of bootstrap iterations.
pub const DEFAULT_BOOTSTRAP_ITERS: u64 = 1000;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Index of draw `j` in iteration `i`.
#[inline]
fn draw_index(seed: u64, i: u64, j: u64, n: usize) -> usize {
    let iter_seed = mix64(seed.wrapping_add(GOLDEN_GAMMA.wrapping_mul(i + 1)));
    (mix64(iter_seed.wrapping_add(GOLDEN_GAMMA.wrapping_mul(j + 1))) % n as u64) as usize
}

/// Bootstrap estimate of (mean, standard error of the mean).
///
/// Resamples `values` with replacement `iters` times; the mean is the mean
/// of resample means and the SEM their sample standard deviation (ddof = 1;
/// zero when `iters` < 2).
pub fn bootstrap(values: &[f64], iters: u64, seed: u64) -> Result<(f64, f64)> {
    let means = resample_means(values, iters, seed, false)?;
    Ok(summarize(&means))
}

/// `bootstrap` with iterations computed on the rayon thread pool. Output is
/// bit-identical to the serial version.
pub fn bootstrap_parallel(values: &[f64], iters: u64, seed: u64) -> Result<(f64, f64)> {
    let means = resample_means(values, iters, seed, true)?;
    Ok(summarize(&means))
}

/// Serial resample means, shared with the bootstrap difference test.
pub(super) fn resample_means_seq(values: &[f64], iters: u64, seed: u64) -> Result<Vec<f64>> {
    resample_means(values, iters, seed, false)
}

fn resample_means(values: &[f64], iters: u64, seed: u64, parallel: bool) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::InvalidParameter(
            "bootstrap needs at least one value".to_string(),
        ));
    }
    if iters < 1 {
        return Err(Error::InvalidParameter(
            "bootstrap needs at least one iteration".to_string(),
        ));
    }
    let n = values.len();
    let one = |i: u64| -> f64 {
        let mut acc = 0.0;
        for j in 0..n as u64 {
            acc += values[draw_index(seed, i, j, n)];
        }
        acc / n as f64
    };
    Ok(if parallel {
        (0..iters).into_par_iter().map(one).collect()
    } else {
        (0..iters).map(one).collect()
    })
}

fn summarize(means: &[f64]) -> (f64, f64) {
    let m = means.len() as f64;
    let mean = means.iter().sum::<f64>() / m;
    if means.len() < 2 {
        return (mean, 0.0);
    }
    // Corrected two-pass variance: the second term cancels the rounding of
    // `mean`, so a constant input yields exactly zero.
    let sum_sq: f64 = means.iter().map(|x| (x - mean) * (x - mean)).sum();
    let sum_dev: f64 = means.iter().map(|x| x - mean).sum();
    let var = ((sum_sq - sum_dev * sum_dev / m) / (m - 1.0)).max(0.0);
    (mean, var.sqrt())
}
