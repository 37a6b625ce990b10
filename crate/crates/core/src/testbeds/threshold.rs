//! Realizable threshold classification on `[0, 1]` with the smallest-positive ERM.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::{compression_cmi_info_bound, vc_fcmi_info_bound, BoundId, BoundQuery};
use crate::error::{Error, Result};
use crate::estimators::{
    bootstrap_mean_ci, estimate_fcmi, run_supersample_trials, Conditioning, LearningProblem, SupersampleTrial,
    Symbolic, TrainingView, TrialBatch,
};
use crate::testbeds::report::TestbedReport;
use crate::testbeds::StatsConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdConfig {
    pub theta_star: f64,
    pub n: usize,
    pub m_trials: usize,
    pub seed: u64,
    /// Features on the midpoints of `grid` equal cells instead of uniform on `[0, 1]`.
    #[serde(default)]
    pub grid: Option<u32>,
    #[serde(default)]
    pub stats: StatsConfig,
}

impl ThresholdConfig {
    pub fn new(theta_star: f64, n: usize, m_trials: usize, seed: u64) -> Self {
        Self {
            theta_star,
            n,
            m_trials,
            seed,
            grid: None,
            stats: StatsConfig::default(),
        }
    }

    pub fn with_grid(mut self, cells: u32) -> Self {
        self.grid = Some(cells);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdPoint {
    pub x: f64,
    pub y: bool,
    pub cell: Option<u32>,
}

impl Symbolic for ThresholdPoint {
    fn symbol(&self) -> Option<u64> {
        self.cell.map(u64::from)
    }
}

/// The learning problem; hypotheses are thresholds `w` with `f_w(x) = 1{x >= w}`.
#[derive(Debug, Clone, Copy)]
pub struct Threshold {
    pub theta_star: f64,
    pub grid: Option<u32>,
}

impl Threshold {
    fn positive_cells(&self, k: u32) -> u32 {
        (0..k)
            .filter(|&j| (f64::from(j) + 0.5) / f64::from(k) >= self.theta_star)
            .count() as u32
    }

    /// Expected population loss of the ERM trained on `n` points.
    pub fn expected_population_loss(&self, n: usize) -> f64 {
        match self.grid {
            None => (1.0 - self.theta_star.powi(n as i32 + 1)) / (n as f64 + 1.0),
            Some(k) => {
                let kf = f64::from(k);
                (1..=self.positive_cells(k))
                    .map(|j| (1.0 - f64::from(j) / kf).powi(n as i32))
                    .sum::<f64>()
                    / kf
            }
        }
    }
}

impl LearningProblem for Threshold {
    type Env = ();
    type Point = ThresholdPoint;
    type Hypothesis = f64;

    fn sample_env(&self, _rng: &mut ChaCha8Rng) {}

    fn sample_points(&self, _env: &(), count: usize, rng: &mut ChaCha8Rng) -> Vec<ThresholdPoint> {
        (0..count)
            .map(|_| {
                let (x, cell) = match self.grid {
                    None => (rng.random::<f64>(), None),
                    Some(k) => {
                        let c = rng.random_range(0..k);
                        ((f64::from(c) + 0.5) / f64::from(k), Some(c))
                    }
                };
                ThresholdPoint {
                    x,
                    y: x >= self.theta_star,
                    cell,
                }
            })
            .collect()
    }

    fn train(&self, data: TrainingView<'_, ThresholdPoint>, _rng: &mut ChaCha8Rng) -> f64 {
        data.iter().filter(|p| p.y).map(|p| p.x).fold(f64::INFINITY, f64::min)
    }

    fn loss(&self, w: &f64, z: &ThresholdPoint) -> f64 {
        f64::from(u8::from((z.x >= *w) != z.y))
    }

    fn predict(&self, w: &f64, z: &ThresholdPoint) -> Option<u64> {
        Some(u64::from(z.x >= *w))
    }

    fn population_loss(&self, w: &f64, _env: &()) -> Option<f64> {
        Some(match self.grid {
            None => w.min(1.0) - self.theta_star,
            Some(k) => {
                let below = (0..k)
                    .map(|j| (f64::from(j) + 0.5) / f64::from(k))
                    .filter(|&x| x >= self.theta_star && x < *w)
                    .count();
                below as f64 / f64::from(k)
            }
        })
    }

    fn loss_levels(&self) -> Option<u32> {
        Some(2)
    }
}

/// `H(W | Z~ = z~)` for the smallest-positive ERM, summed over the random membership bits.
///
/// `W >= v` exactly when every positive point below `v` is left out of training, which has
/// probability `2^-(pairs touched)` unless both points of some pair must be left out.
pub fn conditional_entropy_of_erm(z_tilde: &[ThresholdPoint]) -> f64 {
    let n = z_tilde.len() / 2;
    let mut pos: Vec<(f64, usize)> = z_tilde
        .iter()
        .enumerate()
        .filter(|(_, p)| p.y)
        .map(|(j, p)| (p.x, j % n))
        .collect();
    pos.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut values: Vec<f64> = pos.iter().map(|p| p.0).collect();
    values.dedup();
    // tail[k] = P(W >= values[k]); tail[len] = P(W = inf)
    let mut excluded = vec![0u8; n];
    let mut touched = 0i32;
    let mut feasible = true;
    let mut tail = Vec::with_capacity(values.len() + 1);
    let mut idx = 0;
    for &v in values.iter().chain(std::iter::once(&f64::INFINITY)) {
        while idx < pos.len() && pos[idx].0 < v {
            let pair = pos[idx].1;
            excluded[pair] += 1;
            if excluded[pair] == 1 {
                touched += 1;
            } else {
                feasible = false;
            }
            idx += 1;
        }
        tail.push(if feasible { 0.5f64.powi(touched) } else { 0.0 });
    }
    let mut h = 0.0;
    for k in 0..tail.len() {
        let p = if k + 1 < tail.len() {
            tail[k] - tail[k + 1]
        } else {
            tail[k]
        };
        if p > 0.0 {
            h -= p * p.ln();
        }
    }
    h
}

fn validate(cfg: &ThresholdConfig) -> Result<()> {
    if !(cfg.theta_star > 0.0 && cfg.theta_star < 1.0) {
        return Err(Error::OutOfDomain {
            name: "theta_star",
            value: cfg.theta_star,
            domain: "(0, 1)",
        });
    }
    if cfg.n < 2 {
        return Err(Error::OutOfDomain {
            name: "n",
            value: cfg.n as f64,
            domain: "[2, inf)",
        });
    }
    if cfg.grid == Some(0) {
        return Err(Error::Config("grid must have at least one cell".into()));
    }
    Ok(())
}

/// Runs the supersample batch behind a threshold report.
pub fn threshold_batch(cfg: &ThresholdConfig) -> Result<TrialBatch<SupersampleTrial<ThresholdPoint>>> {
    validate(cfg)?;
    let problem = Threshold {
        theta_star: cfg.theta_star,
        grid: cfg.grid,
    };
    run_supersample_trials(&problem, cfg.n, cfg.m_trials, cfg.seed)
}

pub fn threshold_run(cfg: &ThresholdConfig) -> Result<TestbedReport> {
    let batch = threshold_batch(cfg)?;
    threshold_report(cfg, &batch)
}

pub fn threshold_report(
    cfg: &ThresholdConfig,
    batch: &TrialBatch<SupersampleTrial<ThresholdPoint>>,
) -> Result<TestbedReport> {
    let problem = Threshold {
        theta_star: cfg.theta_star,
        grid: cfg.grid,
    };
    let boot = cfg.stats.bootstrap(cfg.seed);
    let mut r = TestbedReport::new(
        "threshold",
        cfg.n,
        cfg.seed,
        cfg.m_trials,
        serde_json::to_value(cfg).unwrap(),
    );
    let pops: Vec<f64> = batch.trials.iter().map(|t| t.population_loss.unwrap()).collect();
    let gaps: Vec<f64> = batch
        .trials
        .iter()
        .zip(&pops)
        .map(|(t, p)| p - t.train_loss())
        .collect();
    r.empirical_gap = gaps.iter().sum::<f64>() / gaps.len() as f64;
    r.ci_level = cfg.stats.ci_level;
    r.ci = bootstrap_mean_ci(&gaps, boot)?;

    let n = cfg.n as u64;
    let entropies: Vec<f64> = batch
        .trials
        .iter()
        .map(|t| conditional_entropy_of_erm(&t.z_tilde))
        .collect();
    let cmi = entropies.iter().sum::<f64>() / entropies.len() as f64;
    let cmi_ci = bootstrap_mean_ci(&entropies, boot)?;
    let max_h = entropies.iter().copied().fold(0.0, f64::max);
    let vc_cap: f64 = vc_fcmi_info_bound(n, 1)?;
    let comp_cap: f64 = compression_cmi_info_bound(n, 1)?;

    r.oracle("expected_population_loss", problem.expected_population_loss(cfg.n));
    r.estimate("population_loss", pops.iter().sum::<f64>() / pops.len() as f64);
    r.estimate("cmi", cmi);
    r.estimate("cmi_ci_lo", cmi_ci.lo);
    r.estimate("cmi_ci_hi", cmi_ci.hi);
    r.estimate("fcmi", cmi);
    r.estimate("max_conditional_entropy", max_h);
    r.oracle("vc_fcmi_cap", vc_cap);
    r.oracle("compression_cmi_cap", comp_cap);
    r.notes.push(
        "cmi and fcmi coincide: the ERM is a supersample point, so distinct hypotheses give distinct \
         predictions on the supersample; both are Monte Carlo averages of the exact H(W | supersample)"
            .into(),
    );
    r.check("fcmi_below_vc_cap", cmi <= vc_cap && max_h <= vc_cap);
    r.check("cmi_below_compression_cap", cmi <= comp_cap && max_h <= comp_cap);

    let q = |info: f64| BoundQuery::new(n).info(info);
    r.eval_bound(BoundId::CmiSlow, &q(cmi), "estimated", Some(cmi));
    r.eval_bound(BoundId::CmiInterpolating, &q(cmi).train(0.0), "estimated", Some(cmi));
    r.eval_bound(BoundId::CmiBinaryKl, &q(cmi).train(0.0), "estimated", Some(cmi));
    r.eval_bound(BoundId::CmiSlow, &q(vc_cap), "cap", Some(vc_cap));
    r.eval_bound(BoundId::CmiSlow, &q(comp_cap), "cap", Some(comp_cap));
    r.eval_bound(BoundId::VcFcmiCap, &BoundQuery::new(n).d_vc(1), "none", None);
    r.eval_bound(BoundId::CompressionCmiCap, &BoundQuery::new(n).k(1), "none", None);

    if cfg.grid.is_some() {
        let per_pair = estimate_fcmi(batch, Conditioning::PerPair)?;
        r.estimate("fcmi_per_pair_total", per_pair.total);
        r.estimate("per_pair_min_occupancy", per_pair.min_occupancy);
        if !per_pair.reliable {
            r.notes.push("per-pair f-CMI bins below the occupancy floor".into());
        }
        let total = per_pair.total;
        r.eval_bound(
            BoundId::SamplewiseCmi,
            &BoundQuery::new(n).info_per_sample(per_pair.per_index),
            "estimated",
            Some(total),
        );
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pt(x: f64, theta: f64) -> ThresholdPoint {
        ThresholdPoint {
            x,
            y: x >= theta,
            cell: None,
        }
    }

    #[test]
    fn entropy_by_hand() {
        // n = 1: one positive point in the pair, the other negative: W is that point or inf.
        let z = [pt(0.8, 0.5), pt(0.2, 0.5)];
        assert_abs_diff_eq!(conditional_entropy_of_erm(&z), 2f64.ln(), epsilon = 1e-15);
        // both negative: W = inf always
        let z = [pt(0.1, 0.5), pt(0.2, 0.5)];
        assert_eq!(conditional_entropy_of_erm(&z), 0.0);
        // both positive in one pair: W is either point, each w.p. 1/2
        let z = [pt(0.6, 0.5), pt(0.9, 0.5)];
        assert_abs_diff_eq!(conditional_entropy_of_erm(&z), 2f64.ln(), epsilon = 1e-15);
        // n = 2, all four positive; sorted a<b<c<d with pairs (a,c) and (b,d):
        // P(W=a)=1/2, P(W=b)=1/4, P(W=c)=1/4 (a out forces c in), P(W=d)=0
        let z = [pt(0.6, 0.5), pt(0.7, 0.5), pt(0.8, 0.5), pt(0.9, 0.5)];
        let h = -(0.5 * 0.5f64.ln() + 2.0 * 0.25 * 0.25f64.ln());
        assert_abs_diff_eq!(conditional_entropy_of_erm(&z), h, epsilon = 1e-15);
    }

    #[test]
    fn expected_loss_matches_simulation() {
        for grid in [None, Some(10)] {
            let mut cfg = ThresholdConfig::new(0.3, 8, 20_000, 5);
            cfg.grid = grid;
            let r = threshold_run(&cfg).unwrap();
            let want = r.oracles["expected_population_loss"];
            let got = r.estimates["population_loss"];
            assert!((want - got).abs() < 0.004, "{grid:?}: {want} vs {got}");
            assert_abs_diff_eq!(r.empirical_gap, got, epsilon = 1e-15);
        }
    }

    #[test]
    fn erm_interpolates() {
        let batch = threshold_batch(&ThresholdConfig::new(0.4, 6, 200, 2).with_grid(8)).unwrap();
        assert!(batch.trials.iter().all(|t| t.train_loss() == 0.0));
    }

    #[test]
    fn caps_hold_and_bounds_reported() {
        let r = threshold_run(&ThresholdConfig::new(0.5, 16, 500, 9).with_grid(12)).unwrap();
        assert!(r.checks["fcmi_below_vc_cap"]);
        assert!(r.checks["cmi_below_compression_cap"]);
        assert!(r.bounds.iter().any(|b| b.bound_id == "samplewise_cmi"));
        let slow = r.bounds.iter().find(|b| b.bound_id == "cmi_slow").unwrap();
        assert!(slow.value >= r.empirical_gap);
    }
}
