use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimators::rng::{trial_rng, Stream};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapConfig {
    pub resamples: usize,
    pub level: f64,
    pub seed: u64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            resamples: 1000,
            level: 0.95,
            seed: 0,
        }
    }
}

impl BootstrapConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn level(mut self, level: f64) -> Self {
        self.level = level;
        self
    }

    pub fn resamples(mut self, resamples: usize) -> Self {
        self.resamples = resamples;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Multiplicity weights of one resample with replacement of `n_items` items.
pub fn resample_weights(n_items: usize, rng: &mut impl Rng) -> Vec<u32> {
    let mut w = vec![0u32; n_items];
    for _ in 0..n_items {
        w[rng.random_range(0..n_items)] += 1;
    }
    w
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = p * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Percentile bootstrap interval. `stat` receives the multiplicity of each of the
/// `n_items` items in a resample. Resample `r` draws from its own stream, so the
/// result does not depend on scheduling.
pub fn bootstrap_ci<F>(n_items: usize, stat: F, cfg: BootstrapConfig) -> Result<Interval>
where
    F: Fn(&[u32]) -> f64 + Sync,
{
    if cfg.resamples < 2 {
        return Err(Error::OutOfDomain {
            name: "resamples",
            value: cfg.resamples as f64,
            domain: "[2, inf)",
        });
    }
    if !(cfg.level > 0.0 && cfg.level < 1.0) {
        return Err(Error::OutOfDomain {
            name: "level",
            value: cfg.level,
            domain: "(0, 1)",
        });
    }
    if n_items == 0 {
        return Err(Error::Empty("bootstrap sample"));
    }
    let mut values: Vec<f64> = (0..cfg.resamples as u64)
        .into_par_iter()
        .map(|r| {
            let w = resample_weights(n_items, &mut trial_rng(cfg.seed, r, Stream::Aux));
            stat(&w)
        })
        .collect();
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::InvalidDistribution("bootstrap statistic returned NaN".into()));
    }
    values.sort_by(f64::total_cmp);
    let tail = (1.0 - cfg.level) / 2.0;
    Ok(Interval {
        lo: quantile(&values, tail),
        hi: quantile(&values, 1.0 - tail),
    })
}

/// Weighted mean of `xs` under multiplicities `w`.
pub fn weighted_mean(xs: &[f64], w: &[u32]) -> f64 {
    let (mut s, mut c) = (0.0, 0.0);
    for (&x, &k) in xs.iter().zip(w) {
        s += x * f64::from(k);
        c += f64::from(k);
    }
    s / c
}

pub fn bootstrap_mean_ci(xs: &[f64], cfg: BootstrapConfig) -> Result<Interval> {
    bootstrap_ci(xs.len(), |w| weighted_mean(xs, w), cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::rng::trial_rng;

    #[test]
    fn constant_statistic_has_zero_width() {
        let ci = bootstrap_ci(10, |_| 3.5, BootstrapConfig::default()).unwrap();
        assert_eq!(ci, Interval { lo: 3.5, hi: 3.5 });
    }

    #[test]
    fn rejects_too_few_resamples() {
        assert!(bootstrap_ci(10, |_| 0.0, BootstrapConfig::default().resamples(1)).is_err());
    }

    #[test]
    fn deterministic_given_seed() {
        let xs: Vec<f64> = (0..50).map(|i| (i % 7) as f64).collect();
        let a = bootstrap_mean_ci(&xs, BootstrapConfig::with_seed(4)).unwrap();
        let b = bootstrap_mean_ci(&xs, BootstrapConfig::with_seed(4)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bernoulli_coverage_near_nominal() {
        let p = 0.3;
        let reps = 400;
        let covered = (0..reps)
            .filter(|&r| {
                let mut rng = trial_rng(77, r, Stream::Data);
                let xs: Vec<f64> = (0..200).map(|_| f64::from(u8::from(rng.random_bool(p)))).collect();
                let cfg = BootstrapConfig::with_seed(r).resamples(400);
                bootstrap_mean_ci(&xs, cfg).unwrap().contains(p)
            })
            .count();
        let rate = covered as f64 / reps as f64;
        // binomial sd at 0.95 over 400 reps is about 0.011
        assert!((0.90..=0.99).contains(&rate), "coverage {rate}");
    }

    #[test]
    fn width_shrinks_with_more_data() {
        let mut rng = trial_rng(5, 0, Stream::Data);
        let xs: Vec<f64> = (0..4000).map(|_| rng.random::<f64>()).collect();
        let small = bootstrap_mean_ci(&xs[..100], BootstrapConfig::with_seed(1)).unwrap();
        let large = bootstrap_mean_ci(&xs, BootstrapConfig::with_seed(1)).unwrap();
        assert!(large.width() < small.width());
    }
}
