//! Interpolating lookup-table learner on a finite feature alphabet with binary loss.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::{BoundId, BoundQuery};
use crate::error::{Error, Result};
use crate::estimators::{
    bootstrap_ci, bootstrap_mean_ci, prepare, prepare_loo, run_loo_trials, run_supersample_trials, Conditioning,
    LearningProblem, LooTrial, Quantity, SupersampleTrial, Symbolic, TrainingView, TrialBatch,
};
use crate::testbeds::report::TestbedReport;
use crate::testbeds::StatsConfig;

const MAX_ALPHABET: usize = 64;

/// Label of every feature before noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelRule {
    Zeros,
    Ones,
    /// Label is the feature index modulo 2.
    Parity,
    /// Explicit label per feature.
    Table(Vec<u8>),
}

impl LabelRule {
    fn label(&self, x: usize) -> u8 {
        match self {
            LabelRule::Zeros => 0,
            LabelRule::Ones => 1,
            LabelRule::Parity => (x % 2) as u8,
            LabelRule::Table(t) => t[x],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemorizerConfig {
    pub alphabet: usize,
    pub label_rule: LabelRule,
    #[serde(default)]
    pub default_label: u8,
    #[serde(default)]
    pub noise: f64,
    /// Every point gets a feature never drawn before in its trial, so nothing is ever seen twice.
    #[serde(default)]
    pub fresh_features: bool,
    pub n: usize,
    pub m_trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub stats: StatsConfig,
}

impl MemorizerConfig {
    pub fn new(alphabet: usize, label_rule: LabelRule, n: usize, m_trials: usize, seed: u64) -> Self {
        Self {
            alphabet,
            label_rule,
            default_label: 0,
            noise: 0.0,
            fresh_features: false,
            n,
            m_trials,
            seed,
            stats: StatsConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MemoPoint {
    pub x: u64,
    pub y: u8,
}

impl Symbolic for MemoPoint {
    fn symbol(&self) -> Option<u64> {
        Some(self.x * 2 + u64::from(self.y))
    }
}

/// Per-trial labels of each feature, fixed before any point is drawn.
#[derive(Debug, Clone)]
pub struct MemoEnv {
    labels: Vec<u8>,
}

#[derive(Debug, Clone)]
pub struct Memorizer {
    cfg: MemorizerConfig,
}

impl Memorizer {
    pub fn new(cfg: MemorizerConfig) -> Result<Self> {
        if cfg.alphabet == 0 || cfg.alphabet > MAX_ALPHABET {
            return Err(Error::OutOfDomain {
                name: "alphabet",
                value: cfg.alphabet as f64,
                domain: "[1, 64]",
            });
        }
        if let LabelRule::Table(t) = &cfg.label_rule {
            if t.len() != cfg.alphabet || t.iter().any(|&y| y > 1) {
                return Err(Error::Config("label table must hold one 0/1 label per feature".into()));
            }
        }
        if cfg.default_label > 1 {
            return Err(Error::Config("default_label must be 0 or 1".into()));
        }
        if !(0.0..0.5).contains(&cfg.noise) {
            return Err(Error::OutOfDomain {
                name: "noise",
                value: cfg.noise,
                domain: "[0, 0.5)",
            });
        }
        if cfg.n == 0 {
            return Err(Error::Empty("n must be at least 1"));
        }
        if cfg.fresh_features && cfg.alphabet < 2 * cfg.n + 2 {
            return Err(Error::Config(format!(
                "fresh features need an alphabet of at least 2n + 2 = {}",
                2 * cfg.n + 2
            )));
        }
        Ok(Self { cfg })
    }

    fn p_wrong_default(&self, x: usize) -> f64 {
        if self.cfg.label_rule.label(x) == self.cfg.default_label {
            self.cfg.noise
        } else {
            1.0 - self.cfg.noise
        }
    }

    /// Expected population loss after training on `n` points.
    pub fn expected_population_loss(&self, n: usize) -> f64 {
        let a = self.cfg.alphabet;
        let mean_wrong = (0..a).map(|x| self.p_wrong_default(x)).sum::<f64>() / a as f64;
        if self.cfg.fresh_features {
            mean_wrong
        } else {
            (1.0 - 1.0 / a as f64).powi(n as i32) * mean_wrong
        }
    }
}

impl LearningProblem for Memorizer {
    type Env = MemoEnv;
    type Point = MemoPoint;
    type Hypothesis = Vec<Option<u8>>;

    fn sample_env(&self, rng: &mut ChaCha8Rng) -> MemoEnv {
        let labels = (0..self.cfg.alphabet)
            .map(|x| self.cfg.label_rule.label(x) ^ u8::from(rng.random_bool(self.cfg.noise)))
            .collect();
        MemoEnv { labels }
    }

    fn sample_points(&self, env: &MemoEnv, count: usize, rng: &mut ChaCha8Rng) -> Vec<MemoPoint> {
        let a = self.cfg.alphabet;
        let xs: Vec<usize> = if self.cfg.fresh_features {
            rand::seq::index::sample(rng, a, count).into_vec()
        } else {
            (0..count).map(|_| rng.random_range(0..a)).collect()
        };
        xs.into_iter()
            .map(|x| MemoPoint {
                x: x as u64,
                y: env.labels[x],
            })
            .collect()
    }

    fn train(&self, data: TrainingView<'_, MemoPoint>, _rng: &mut ChaCha8Rng) -> Vec<Option<u8>> {
        let mut table = vec![None; self.cfg.alphabet];
        for p in data.iter() {
            table[p.x as usize] = Some(p.y);
        }
        table
    }

    fn loss(&self, h: &Vec<Option<u8>>, z: &MemoPoint) -> f64 {
        f64::from(u8::from(self.predict(h, z).unwrap() != u64::from(z.y)))
    }

    fn predict(&self, h: &Vec<Option<u8>>, z: &MemoPoint) -> Option<u64> {
        Some(u64::from(h[z.x as usize].unwrap_or(self.cfg.default_label)))
    }

    /// Fresh-feature trials draw every point from features unseen in training, so the
    /// population loss is the default-label error rate over the remaining features.
    fn population_loss(&self, h: &Vec<Option<u8>>, env: &MemoEnv) -> Option<f64> {
        let a = self.cfg.alphabet as f64;
        if self.cfg.fresh_features {
            let unseen: Vec<usize> = (0..self.cfg.alphabet).filter(|&x| h[x].is_none()).collect();
            let wrong = unseen
                .iter()
                .filter(|&&x| env.labels[x] != self.cfg.default_label)
                .count();
            return Some(wrong as f64 / unseen.len() as f64);
        }
        let wrong = (0..self.cfg.alphabet)
            .filter(|&x| h[x].is_none() && env.labels[x] != self.cfg.default_label)
            .count();
        Some(wrong as f64 / a)
    }

    fn loss_levels(&self) -> Option<u32> {
        Some(2)
    }
}

/// Both batches behind a memorizer report. The leave-one-out batch uses the next seed.
pub struct MemorizerBatches {
    pub supersample: TrialBatch<SupersampleTrial<MemoPoint>>,
    pub loo: TrialBatch<LooTrial<MemoPoint>>,
}

pub fn memorizer_batches(cfg: &MemorizerConfig) -> Result<MemorizerBatches> {
    let problem = Memorizer::new(cfg.clone())?;
    Ok(MemorizerBatches {
        supersample: run_supersample_trials(&problem, cfg.n, cfg.m_trials, cfg.seed)?,
        loo: run_loo_trials(&problem, cfg.n, cfg.m_trials, cfg.seed.wrapping_add(1))?,
    })
}

pub fn memorizer_run(cfg: &MemorizerConfig) -> Result<TestbedReport> {
    let batches = memorizer_batches(cfg)?;
    memorizer_report(cfg, &batches)
}

pub fn memorizer_report(cfg: &MemorizerConfig, b: &MemorizerBatches) -> Result<TestbedReport> {
    let problem = Memorizer::new(cfg.clone())?;
    let (n, m) = (cfg.n, cfg.m_trials);
    let ln2 = std::f64::consts::LN_2;
    let ln_n1 = ((n + 1) as f64).ln();
    let boot = cfg.stats.bootstrap(cfg.seed);
    let mut r = TestbedReport::new("memorizer", n, cfg.seed, m, serde_json::to_value(cfg).unwrap());

    let ss = &b.supersample;
    if ss.trials.iter().any(|t| t.train_loss() != 0.0) {
        return Err(Error::Config("memorizer configuration does not interpolate".into()));
    }
    let gaps: Vec<f64> = ss.trials.iter().map(|t| t.test_loss() - t.train_loss()).collect();
    r.empirical_gap = gaps.iter().sum::<f64>() / m as f64;
    r.ci_level = cfg.stats.ci_level;
    r.ci = bootstrap_mean_ci(&gaps, boot)?;

    let pops: Vec<f64> = ss.trials.iter().map(|t| t.population_loss.unwrap()).collect();
    let pop = pops.iter().sum::<f64>() / m as f64;
    let pop_ci = bootstrap_mean_ci(&pops, boot)?;
    r.oracle("expected_population_loss", problem.expected_population_loss(n));
    r.estimate("population_loss", pop);
    r.estimate("population_loss_ci_lo", pop_ci.lo);
    r.estimate("population_loss_ci_hi", pop_ci.hi);

    let ldmi = prepare(ss, Quantity::Ldmi)?;
    let loo = prepare_loo(&b.loo)?;
    if !loo.is_interpolating() {
        return Err(Error::Config("leave-one-out losses are not interpolating".into()));
    }
    let ld = ldmi.estimate(None);
    let lo = loo.estimate(None);
    let pop_ld = ld.total / (n as f64 * ln2);
    let pop_loo = lo.plug_in / ln_n1;
    let ld_stat = |w: &[u32]| ldmi.estimate(Some(w)).total / (n as f64 * ln2);
    let loo_stat = |w: &[u32]| loo.estimate(Some(w)).plug_in / ln_n1;
    let ld_ci = bootstrap_ci(m, ld_stat, boot)?;
    let loo_ci = bootstrap_ci(m, loo_stat, boot)?;
    let diff_ci = bootstrap_ci(m, |w| ld_stat(w) - loo_stat(w), boot)?;
    let loo_pops: Vec<f64> = b.loo.trials.iter().map(|t| t.population_loss.unwrap()).collect();

    r.estimate("ldmi_total", ld.total);
    r.estimate("loo_emi", lo.plug_in);
    r.estimate("loo_emi_entropy_form", lo.entropy_form.unwrap());
    r.estimate("pop_from_ldmi", pop_ld);
    r.estimate("pop_from_ldmi_ci_lo", ld_ci.lo);
    r.estimate("pop_from_ldmi_ci_hi", ld_ci.hi);
    r.estimate("pop_from_loo", pop_loo);
    r.estimate("pop_from_loo_ci_lo", loo_ci.lo);
    r.estimate("pop_from_loo_ci_hi", loo_ci.hi);
    r.estimate("identity_difference_ci_lo", diff_ci.lo);
    r.estimate("identity_difference_ci_hi", diff_ci.hi);
    r.estimate("loo_population_loss", loo_pops.iter().sum::<f64>() / m as f64);
    r.check("interp_ldmi_covers_pop", ld_ci.contains(pop));
    r.check(
        "interp_loo_covers_pop",
        loo_ci.contains(loo_pops.iter().sum::<f64>() / m as f64),
    );
    r.check("interp_identities_agree", diff_ci.contains(0.0));

    let emi = prepare(ss, Quantity::Emi)?.estimate(None);
    let ecmi = prepare(ss, Quantity::Ecmi(Conditioning::PerPair))?.estimate(None);
    let fcmi = prepare(ss, Quantity::Fcmi(Conditioning::PerPair))?.estimate(None);
    r.estimate("emi_total", emi.total);
    r.estimate("ecmi_total", ecmi.total);
    r.estimate("fcmi_total", fcmi.total);
    if !fcmi.reliable {
        r.notes.push("per-pair f-CMI bins below the occupancy floor".into());
    }

    let nq = n as u64;
    r.eval_bound(
        BoundId::InterpIdentityLdmi,
        &BoundQuery::new(nq).info_per_sample(ld.per_index.clone()),
        "estimated",
        Some(ld.total),
    );
    r.eval_bound(
        BoundId::InterpIdentityLoo,
        &BoundQuery::new(nq).info(lo.plug_in),
        "estimated",
        Some(lo.plug_in),
    );
    r.eval_bound(
        BoundId::SamplewiseCmi,
        &BoundQuery::new(nq).info_per_sample(ld.per_index.clone()),
        "estimated",
        Some(ld.total),
    );
    r.eval_bound(
        BoundId::CmiSlow,
        &BoundQuery::new(nq).info(fcmi.total),
        "estimated",
        Some(fcmi.total),
    );
    r.eval_bound(
        BoundId::CmiInterpolating,
        &BoundQuery::new(nq).train(0.0).info(ecmi.total),
        "estimated",
        Some(ecmi.total),
    );
    r.eval_bound(
        BoundId::LooCmi,
        &BoundQuery::new(nq).info(lo.plug_in),
        "estimated",
        Some(lo.plug_in),
    );
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn oracle_examples() {
        let m = Memorizer::new(MemorizerConfig::new(12, LabelRule::Ones, 16, 1, 0)).unwrap();
        assert_abs_diff_eq!(
            m.expected_population_loss(16),
            (11.0f64 / 12.0).powi(16),
            epsilon = 1e-15
        );
        let m = Memorizer::new(MemorizerConfig::new(12, LabelRule::Zeros, 16, 1, 0)).unwrap();
        assert_eq!(m.expected_population_loss(16), 0.0);
    }

    #[test]
    fn zero_noise_covered_alphabet_gives_zero() {
        let r = memorizer_run(&MemorizerConfig::new(2, LabelRule::Parity, 40, 500, 1)).unwrap();
        assert!(r.estimates["population_loss"] < 1e-9);
        assert!(r.estimates["ldmi_total"] < 1e-9);
        assert!(r.estimates["loo_emi"] < 1e-9);
    }

    #[test]
    fn fresh_features_reach_capacity() {
        let mut cfg = MemorizerConfig::new(64, LabelRule::Ones, 4, 4000, 2);
        cfg.fresh_features = true;
        let r = memorizer_run(&cfg).unwrap();
        assert_eq!(r.estimates["population_loss"], 1.0);
        assert_abs_diff_eq!(r.estimates["ldmi_total"] / 4.0, std::f64::consts::LN_2, epsilon = 1e-3);
    }

    #[test]
    fn identities_recover_population_loss() {
        let mut cfg = MemorizerConfig::new(12, LabelRule::Ones, 9, 8000, 3);
        cfg.stats.ci_level = 0.99;
        let r = memorizer_run(&cfg).unwrap();
        assert!(r.checks["interp_ldmi_covers_pop"], "{:?}", r.estimates);
        assert!(r.checks["interp_loo_covers_pop"], "{:?}", r.estimates);
        assert!(r.checks["interp_identities_agree"], "{:?}", r.estimates);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(Memorizer::new(MemorizerConfig::new(65, LabelRule::Ones, 4, 1, 0)).is_err());
        let mut cfg = MemorizerConfig::new(4, LabelRule::Ones, 4, 1, 0);
        cfg.noise = 0.5;
        assert!(Memorizer::new(cfg).is_err());
        assert!(Memorizer::new(MemorizerConfig::new(4, LabelRule::Table(vec![1, 0]), 4, 1, 0)).is_err());
    }
}
