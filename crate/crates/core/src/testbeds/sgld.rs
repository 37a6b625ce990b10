//! Stochastic gradient Langevin dynamics on a Huber objective with Gaussian data.
//!
//! The per-coordinate Huber loss with threshold `c = L / sqrt(d)` has gradients of norm at
//! most `L`, and it is `L`-Lipschitz in the data point, so under `N(mu, s^2 I)` data the loss
//! is `L s`-sub-Gaussian.

use rand_distr::{Distribution, Normal, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF, Normal as StatNormal};

use crate::bounds::{evaluate, sgld_corollary, BoundId, BoundQuery};
use crate::error::{Error, Result};
use crate::estimators::{bootstrap_mean_ci, trial_rng, Stream};
use crate::testbeds::report::{BoundRow, TestbedReport};
use crate::testbeds::StatsConfig;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepSchedule {
    /// `eta_t = 1 / t`.
    InverseT,
    Constant(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianData {
    pub mean: f64,
    pub std: f64,
}

impl Default for GaussianData {
    fn default() -> Self {
        Self { mean: 0.0, std: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SgldConfig {
    #[serde(default = "one_dim")]
    pub d: usize,
    pub steps: usize,
    pub eta: StepSchedule,
    pub beta: f64,
    pub clip_l: f64,
    pub n: usize,
    pub m_trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub data: GaussianData,
    #[serde(default)]
    pub stats: StatsConfig,
}

fn one_dim() -> usize {
    1
}

impl SgldConfig {
    /// `T = n k` steps with `eta_t = 1/t`, the setting of the harmonic-sum corollary.
    pub fn harmonic(n: usize, k: usize, beta: f64, clip_l: f64, m_trials: usize, seed: u64) -> Self {
        Self {
            d: 1,
            steps: n * k,
            eta: StepSchedule::InverseT,
            beta,
            clip_l,
            n,
            m_trials,
            seed,
            data: GaussianData::default(),
            stats: StatsConfig::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |name, value: f64, domain| Err(Error::OutOfDomain { name, value, domain });
        if self.d == 0 {
            return bad("d", 0.0, "[1, inf)");
        }
        if self.n == 0 {
            return bad("n", 0.0, "[1, inf)");
        }
        if self.steps == 0 {
            return bad("steps", 0.0, "[1, inf)");
        }
        if !(self.clip_l > 0.0 && self.clip_l.is_finite()) {
            return bad("clip_l", self.clip_l, "(0, inf)");
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return bad("beta", self.beta, "(0, inf); infinite beta removes the noise");
        }
        if !(self.data.std > 0.0 && self.data.std.is_finite()) {
            return bad("data.std", self.data.std, "(0, inf)");
        }
        if let StepSchedule::Constant(c) = self.eta {
            if !(c >= 0.0 && c.is_finite()) {
                return bad("eta", c, "[0, inf)");
            }
        }
        if self.m_trials == 0 {
            return Err(Error::Empty("m_trials must be at least 1"));
        }
        Ok(())
    }

    fn threshold(&self) -> f64 {
        self.clip_l / (self.d as f64).sqrt()
    }

    pub fn schedule(&self) -> (Vec<f64>, Vec<f64>) {
        let eta: Vec<f64> = (1..=self.steps)
            .map(|t| match self.eta {
                StepSchedule::InverseT => 1.0 / t as f64,
                StepSchedule::Constant(c) => c,
            })
            .collect();
        let rho = eta.iter().map(|e| (e / self.beta).sqrt()).collect();
        (eta, rho)
    }

    /// Sub-Gaussian parameter of the loss under the data distribution.
    pub fn sigma(&self) -> f64 {
        self.clip_l * self.data.std
    }
}

fn huber(u: f64, c: f64) -> f64 {
    if u.abs() <= c {
        0.5 * u * u
    } else {
        c * u.abs() - 0.5 * c * c
    }
}

/// `E h_c(u)` for `u ~ N(m, s^2)`, via truncated-normal moments.
pub fn expected_huber(m: f64, s: f64, c: f64) -> f64 {
    let std = StatNormal::standard();
    let a = (-c - m) / s;
    let b = (c - m) / s;
    let (pa, pb) = (std.cdf(a), std.cdf(b));
    let (fa, fb) = (std.pdf(a), std.pdf(b));
    let mid_sq = m * m * (pb - pa) + 2.0 * m * s * (fa - fb) + s * s * ((pb - pa) + a * fa - b * fb);
    let upper = m * (1.0 - pb) + s * fb;
    let lower = -m * pa + s * fa;
    let tails = (1.0 - pb) + pa;
    0.5 * mid_sq + c * (upper + lower) - 0.5 * c * c * tails
}

fn loss(v: &[f64], z: &[f64], c: f64) -> f64 {
    v.iter().zip(z).map(|(a, b)| huber(a - b, c)).sum()
}

fn population_loss(cfg: &SgldConfig, v: &[f64]) -> f64 {
    let c = cfg.threshold();
    v.iter()
        .map(|&vk| expected_huber(vk - cfg.data.mean, cfg.data.std, c))
        .sum()
}

/// Generalization gap of one run of the recursion.
fn trial_gap(cfg: &SgldConfig, eta: &[f64], rho: &[f64], t: u64) -> f64 {
    let c = cfg.threshold();
    let d = cfg.d;
    let data = Normal::new(cfg.data.mean, cfg.data.std).unwrap();
    let mut rng = trial_rng(cfg.seed, t, Stream::Data);
    let z: Vec<Vec<f64>> = (0..cfg.n)
        .map(|_| (0..d).map(|_| data.sample(&mut rng)).collect())
        .collect();
    let mut learner = trial_rng(cfg.seed, t, Stream::Learner);
    let mut v = vec![0.0; d];
    for (&e, &r) in eta.iter().zip(rho) {
        let j = rand::Rng::random_range(&mut learner, 0..cfg.n);
        for k in 0..d {
            let grad = (v[k] - z[j][k]).clamp(-c, c);
            let noise: f64 = StandardNormal.sample(&mut learner);
            v[k] += -e * grad + r * noise;
        }
    }
    let train = z.iter().map(|zi| loss(&v, zi, c)).sum::<f64>() / cfg.n as f64;
    population_loss(cfg, &v) - train
}

/// Per-trial generalization gaps, in trial order.
pub fn sgld_gaps(cfg: &SgldConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    let (eta, rho) = cfg.schedule();
    Ok((0..cfg.m_trials as u64)
        .into_par_iter()
        .map(|t| trial_gap(cfg, &eta, &rho, t))
        .collect())
}

pub fn sgld_run(cfg: &SgldConfig) -> Result<TestbedReport> {
    let gaps = sgld_gaps(cfg)?;
    let (eta, rho) = cfg.schedule();
    let mut r = TestbedReport::new(
        "sgld",
        cfg.n,
        cfg.seed,
        cfg.m_trials,
        serde_json::to_value(cfg).unwrap(),
    );
    r.empirical_gap = gaps.iter().sum::<f64>() / gaps.len() as f64;
    r.ci_level = cfg.stats.ci_level;
    r.ci = bootstrap_mean_ci(&gaps, cfg.stats.bootstrap(cfg.seed))?;
    r.oracle("sigma_subgaussian", cfg.sigma());

    let n = cfg.n as u64;
    let q = BoundQuery::new(n)
        .sigma(cfg.sigma())
        .lipschitz(cfg.clip_l)
        .eta(eta)
        .rho(rho)
        .d(cfg.d as u64);
    let pjl = evaluate(BoundId::PjlIterative, &q)?;
    let pjl_value = pjl.value;
    r.bound(BoundRow::from_value(pjl, "closed_form", None));
    r.check("gap_within_bound", r.empirical_gap.abs() <= pjl_value);

    if cfg.eta == StepSchedule::InverseT && cfg.steps.is_multiple_of(cfg.n) {
        let k = (cfg.steps / cfg.n) as u64;
        let cor = sgld_corollary(n, k, cfg.beta, cfg.sigma(), cfg.clip_l)?;
        r.oracle("corollary", cor.value);
        r.oracle("harmonic_sum", cor.harmonic);
        r.oracle("corollary_relaxed", cor.relaxed);
        let scale = cfg.beta * cfg.sigma().powi(2) * cfg.clip_l.powi(2) / cfg.n as f64;
        let direct = (scale * cor.harmonic).sqrt();
        r.check("identity_corollary_closed_form", (cor.value - direct).abs() <= 1e-12);
        r.check(
            "identity_corollary_matches_pjl",
            (cor.value - pjl_value).abs() <= 1e-12 * pjl_value.max(1.0),
        );
        r.check(
            "harmonic_below_log",
            cor.harmonic <= (cfg.n as f64).ln() + (k as f64).ln() + 1.0,
        );
    }
    Ok(r)
}
