//! Synthetic learning problems with exact oracles, each producing a [`TestbedReport`].

mod gibbs;
mod glm;
mod memorizer;
mod report;
mod sgld;
mod threshold;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bounds::BoundId;
use crate::error::{Error, Result};
use crate::estimators::{write_batch, BootstrapConfig};

pub use gibbs::{gibbs_run, GibbsProblem, GibbsSolution, ENUMERATION_BUDGET};
pub use glm::{glm_oracles, glm_run, GlmConfig, GlmOracles};
pub use memorizer::{
    memorizer_batches, memorizer_report, memorizer_run, LabelRule, MemoPoint, Memorizer, MemorizerBatches,
    MemorizerConfig,
};
pub use report::{fmt9, json_number, BoundRow, TestbedReport, CSV_COLUMNS, CSV_HEADER_COMMENT};
pub use sgld::{expected_huber, sgld_gaps, sgld_run, GaussianData, SgldConfig, StepSchedule};
pub use threshold::{
    conditional_entropy_of_erm, threshold_batch, threshold_report, threshold_run, Threshold, ThresholdConfig,
    ThresholdPoint,
};

/// Interval settings shared by the Monte Carlo testbeds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatsConfig {
    #[serde(default = "default_level")]
    pub ci_level: f64,
    #[serde(default = "default_resamples")]
    pub resamples: usize,
}

fn default_level() -> f64 {
    0.95
}

fn default_resamples() -> usize {
    1000
}

impl Default for StatsConfig {
    fn default() -> Self {
        Self {
            ci_level: default_level(),
            resamples: default_resamples(),
        }
    }
}

impl StatsConfig {
    pub fn bootstrap(&self, seed: u64) -> BootstrapConfig {
        BootstrapConfig::with_seed(seed)
            .level(self.ci_level)
            .resamples(self.resamples)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Testbed {
    Glm,
    Gibbs,
    Threshold,
    Memorizer,
    Sgld,
}

impl Testbed {
    pub const ALL: [Testbed; 5] = [
        Testbed::Glm,
        Testbed::Gibbs,
        Testbed::Threshold,
        Testbed::Memorizer,
        Testbed::Sgld,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Testbed::Glm => "glm",
            Testbed::Gibbs => "gibbs",
            Testbed::Threshold => "threshold",
            Testbed::Memorizer => "memorizer",
            Testbed::Sgld => "sgld",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Testbed::Glm => "Gaussian mean estimation by the sample average, squared loss",
            Testbed::Gibbs => "Gibbs posterior on finite spaces, exact enumeration",
            Testbed::Threshold => "realizable thresholds on [0, 1], smallest-positive ERM",
            Testbed::Memorizer => "interpolating lookup table with binary loss",
            Testbed::Sgld => "Langevin dynamics on a Huber objective with Gaussian data",
        }
    }

    /// Whether configs carry `m_trials` (Gibbs is solved exactly).
    pub fn uses_trials(self) -> bool {
        self != Testbed::Gibbs
    }
}

impl FromStr for Testbed {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Testbed::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown testbed {s:?}")))
    }
}

impl fmt::Display for Testbed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A finished run: the report and, for supersample testbeds, the batch file contents.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: TestbedReport,
    pub batch: Option<String>,
}

fn parse<T: serde::de::DeserializeOwned>(config: serde_json::Value) -> Result<T> {
    serde_json::from_value(config).map_err(|e| Error::Parse(format!("testbed config: {e}")))
}

fn batch_text<P>(
    batch: &crate::estimators::TrialBatch<crate::estimators::SupersampleTrial<P>>,
    config: &serde_json::Value,
) -> Result<String> {
    let mut buf = Vec::new();
    write_batch(&mut buf, batch, config)?;
    String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
}

/// Runs `testbed` on a JSON config, keeping only the bound rows in `bounds` (all when `None`).
pub fn run_testbed(
    testbed: Testbed,
    config: serde_json::Value,
    bounds: Option<&[BoundId]>,
    keep_batch: bool,
) -> Result<RunOutput> {
    let start = Instant::now();
    let (mut report, batch) = match testbed {
        Testbed::Glm => (glm_run(&parse(config)?)?, None),
        Testbed::Gibbs => (gibbs_run(&parse(config)?)?, None),
        Testbed::Sgld => (sgld_run(&parse(config)?)?, None),
        Testbed::Threshold => {
            let cfg: ThresholdConfig = parse(config)?;
            let b = threshold_batch(&cfg)?;
            let report = threshold_report(&cfg, &b)?;
            let text = keep_batch.then(|| batch_text(&b, &report.config)).transpose()?;
            (report, text)
        }
        Testbed::Memorizer => {
            let cfg: MemorizerConfig = parse(config)?;
            let b = memorizer_batches(&cfg)?;
            let report = memorizer_report(&cfg, &b)?;
            let text = keep_batch
                .then(|| batch_text(&b.supersample, &report.config))
                .transpose()?;
            (report, text)
        }
    };
    report.retain_bounds(bounds);
    report.runtime_secs = start.elapsed().as_secs_f64();
    Ok(RunOutput { report, batch })
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn names_round_trip() {
        for t in Testbed::ALL {
            assert_eq!(t.as_str().parse::<Testbed>().unwrap(), t);
        }
        assert!("nope".parse::<Testbed>().is_err());
    }

    #[test]
    fn runs_from_json() {
        let cfg = json!({"theta_star": 0.5, "n": 4, "m_trials": 50, "seed": 3, "grid": 6});
        let out = run_testbed(Testbed::Threshold, cfg.clone(), Some(&[BoundId::CmiSlow]), true).unwrap();
        assert!(out.report.bounds.iter().all(|b| b.bound_id == "cmi_slow"));
        assert_eq!(out.batch.unwrap().lines().count(), 51);
        let again = run_testbed(Testbed::Threshold, cfg, Some(&[BoundId::CmiSlow]), false).unwrap();
        assert_eq!(again.report.to_csv().unwrap(), out.report.to_csv().unwrap());
        assert_eq!(again.report.to_json_string(), out.report.to_json_string());
    }

    #[test]
    fn rejects_unknown_fields() {
        let cfg = json!({"sigma2": 1.0, "n": 4, "m_trials": 5, "seed": 0, "bogus": 1});
        assert!(matches!(
            run_testbed(Testbed::Glm, cfg, None, false),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn stats_defaults() {
        let cfg: GlmConfig = serde_json::from_value(json!({"sigma2": 1.0, "n": 4, "m_trials": 5, "seed": 0})).unwrap();
        assert_eq!(cfg.stats, StatsConfig::default());
    }
}
