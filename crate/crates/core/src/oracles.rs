//! Reference estimators used to check the saddlepoint results: the exact CDF
//! for identical Nakagami branches and a seeded Monte Carlo CDF for any
//! ensemble.
//!
//! Monte Carlo sample `i` draws from ChaCha8 stream `i` under a key derived
//! from the seed, so every sample is a pure function of `(seed, i)` and the
//! estimate does not depend on how the work is split across threads.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fading::{BranchSpec, Family};
use crate::numerics::{regularized_lower_gamma, std_normal_quantile};
use crate::saddlepoint::ChannelEnsemble;

const CHUNK: u64 = 1 << 15;
/// Below this many hits (or misses) the Wilson interval is used.
const WILSON_COUNT: u64 = 30;
pub const MIN_SAMPLES: u64 = 1_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    pub confidence: f64,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            samples: 10_000_000,
            seed: 0x5eed,
            confidence: 0.99,
        }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples < MIN_SAMPLES {
            return Err(Error::param(
                "samples",
                format!("need at least {MIN_SAMPLES} samples, got {}", self.samples),
            ));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(Error::param(
                "confidence",
                format!("must lie in (0, 1), got {}", self.confidence),
            ));
        }
        Ok(())
    }

    /// Two-sided normal quantile for the configured confidence.
    pub fn z(&self) -> f64 {
        std_normal_quantile(0.5 + 0.5 * self.confidence)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    /// Fraction of samples strictly below the threshold.
    pub value: f64,
    pub ci_half_width: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub count: u64,
    pub samples: u64,
    pub seed: u64,
}

impl McEstimate {
    fn from_count(count: u64, cfg: &McConfig) -> Self {
        let n = cfg.samples as f64;
        let k = count as f64;
        let p = k / n;
        let z = cfg.z();
        let (center, half) = if count.min(cfg.samples - count) < WILSON_COUNT {
            let z2 = z * z;
            let center = (k + 0.5 * z2) / (n + z2);
            let half = z / (n + z2) * (k * (n - k) / n + 0.25 * z2).sqrt();
            (center, half)
        } else {
            (p, z * (p * (1.0 - p) / n).sqrt())
        };
        McEstimate {
            value: p,
            ci_half_width: half,
            ci_low: (center - half).max(0.0),
            ci_high: (center + half).min(1.0),
            count,
            samples: cfg.samples,
            seed: cfg.seed,
        }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.ci_low <= v && v <= self.ci_high
    }
}

/// `F(x) = P(mL, m x / γ̄)`: a sum of `L` i.i.d. Gamma(m, γ̄/m) variables is
/// Gamma(mL, γ̄/m).
pub fn exact_nakagami_iid_cdf(m: f64, mean_snr: f64, count: usize, x: f64) -> Result<f64> {
    if !(m >= 0.5) {
        return Err(Error::param("m", format!("must be at least 0.5, got {m}")));
    }
    if !(mean_snr > 0.0) {
        return Err(Error::param("mean_snr", format!("must be positive, got {mean_snr}")));
    }
    if count == 0 {
        return Err(Error::param("L", "number of branches must be at least 1"));
    }
    regularized_lower_gamma(m * count as f64, m * x / mean_snr)
}

/// Uniform on the open interval (0, 1).
fn uniform_open<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

fn std_normal<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    std_normal_quantile(uniform_open(rng))
}

/// Gamma(shape, 1) by Marsaglia–Tsang, boosted for shapes below one.
fn std_gamma<R: RngCore + ?Sized>(shape: f64, rng: &mut R) -> f64 {
    if shape < 1.0 {
        let g = std_gamma(shape + 1.0, rng);
        return g * uniform_open(rng).powf(1.0 / shape);
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let z = std_normal(rng);
        let v = 1.0 + c * z;
        if v <= 0.0 {
            continue;
        }
        let v = v * v * v;
        let u = uniform_open(rng);
        if u.ln() < 0.5 * z * z + d - d * v + d * v.ln() {
            return d * v;
        }
    }
}

/// One draw of a branch SNR.
pub fn sample_branch_snr<R: RngCore + ?Sized>(spec: &BranchSpec, rng: &mut R) -> f64 {
    let g = spec.mean_snr();
    match spec.family() {
        Family::Nakagami => {
            let m = spec.shape();
            std_gamma(m, rng) * g / m
        }
        Family::Rice => {
            // (γ̄/2K') times a noncentral χ² with 2 dof and noncentrality 2K
            let k = spec.shape();
            let x = std_normal(rng) + (2.0 * k).sqrt();
            let y = std_normal(rng);
            g / (2.0 * (k + 1.0)) * (x * x + y * y)
        }
        Family::Hoyt => {
            let (a, b) = spec.hoyt_scales();
            let x = std_normal(rng);
            let y = std_normal(rng);
            a * x * x + b * y * y
        }
    }
}

fn base_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random source for sample `index`.
pub fn sample_stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = base_rng(seed);
    rng.set_stream(index);
    rng
}

/// Draws of the combined SNR `Σ γ_l` for samples `start..end`.
pub fn sample_sums(ens: &ChannelEnsemble, seed: u64, start: u64, end: u64) -> Vec<f64> {
    let base = base_rng(seed);
    (start..end)
        .map(|i| draw_sum(ens, &base, i))
        .collect()
}

fn draw_sum(ens: &ChannelEnsemble, base: &ChaCha8Rng, index: u64) -> f64 {
    let mut rng = base.clone();
    rng.set_stream(index);
    ens.branches()
        .iter()
        .map(|b| sample_branch_snr(b, &mut rng))
        .sum()
}

/// Monte Carlo CDF at each threshold of `xs`, all from the same draws.
pub fn monte_carlo_cdf_grid(
    ens: &ChannelEnsemble,
    xs: &[f64],
    cfg: &McConfig,
) -> Result<Vec<McEstimate>> {
    cfg.validate()?;
    for &x in xs {
        if !(x > 0.0) {
            return Err(Error::domain(format!("threshold must be positive, got {x}")));
        }
    }
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let sorted: Vec<f64> = order.iter().map(|&i| xs[i]).collect();

    let base = base_rng(cfg.seed);
    let chunks = cfg.samples.div_ceil(CHUNK);
    // hist[j] counts sums with exactly j sorted thresholds at or below them
    let hist = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut h = vec![0u64; sorted.len() + 1];
            let end = ((c + 1) * CHUNK).min(cfg.samples);
            for i in c * CHUNK..end {
                let g = draw_sum(ens, &base, i);
                h[sorted.partition_point(|&t| t <= g)] += 1;
            }
            h
        })
        .reduce(
            || vec![0u64; sorted.len() + 1],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );

    let mut out = vec![None; xs.len()];
    let mut below = 0u64;
    for (j, &orig) in order.iter().enumerate() {
        below += hist[j];
        out[orig] = Some(McEstimate::from_count(below, cfg));
    }
    Ok(out.into_iter().map(|e| e.expect("every threshold counted")).collect())
}

/// Monte Carlo estimate of `Pr{γ < x}`.
pub fn monte_carlo_cdf(ens: &ChannelEnsemble, x: f64, cfg: &McConfig) -> Result<McEstimate> {
    Ok(monte_carlo_cdf_grid(ens, &[x], cfg)?[0])
}
