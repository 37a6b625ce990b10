use std::path::{Path, PathBuf};

use clap::Args;
use genbound::bounds::BoundId;
use genbound::testbeds::{fmt9, run_testbed, Testbed};
use genbound::{Error, Result};
use serde::Deserialize;
use serde_json::Value;

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// Path to a JSON run config.
    pub config: PathBuf,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum BoundSelection {
    Keyword(String),
    List(Vec<String>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    pub csv: PathBuf,
    pub json: PathBuf,
    #[serde(default)]
    pub batch: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    testbed: String,
    config: Value,
    #[serde(default = "all_bounds")]
    bounds: BoundSelection,
    output: Outputs,
    seed: u64,
    #[serde(default)]
    m_trials: Option<usize>,
}

fn all_bounds() -> BoundSelection {
    BoundSelection::Keyword("all".into())
}

fn merge(config: &mut serde_json::Map<String, Value>, key: &str, v: Value) -> Result<()> {
    match config.get(key) {
        Some(old) if *old != v => Err(Error::Parse(format!(
            "{key} is {v} in the run config but {old} in the testbed config"
        ))),
        _ => {
            config.insert(key.into(), v);
            Ok(())
        }
    }
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }

    fn bound_ids(&self) -> Result<Option<Vec<BoundId>>> {
        match &self.bounds {
            BoundSelection::Keyword(k) if k == "all" => Ok(None),
            BoundSelection::Keyword(k) => Err(Error::Parse(format!("bounds must be \"all\" or a list, got {k:?}"))),
            BoundSelection::List(ids) => ids.iter().map(|s| s.parse()).collect::<Result<_>>().map(Some),
        }
    }

    /// The testbed and its config with the run-level seed and trial count folded in.
    fn resolved(&self) -> Result<(Testbed, Value)> {
        let testbed: Testbed = self.testbed.parse()?;
        let Value::Object(mut cfg) = self.config.clone() else {
            return Err(Error::Parse("config must be a JSON object".into()));
        };
        merge(&mut cfg, "seed", self.seed.into())?;
        match (self.m_trials, testbed.uses_trials()) {
            (Some(m), true) => merge(&mut cfg, "m_trials", m.into())?,
            (Some(_), false) => {
                return Err(Error::Parse(format!(
                    "{testbed} is solved exactly and takes no m_trials"
                )));
            }
            (None, _) => {}
        }
        Ok((testbed, Value::Object(cfg)))
    }
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn run(a: &ExperimentArgs) -> Result<()> {
    let rc = RunConfig::from_path(&a.config)?;
    let (testbed, cfg) = rc.resolved()?;
    let ids = rc.bound_ids()?;
    if rc.output.batch.is_some() && !matches!(testbed, Testbed::Threshold | Testbed::Memorizer) {
        return Err(Error::Parse(format!("{testbed} has no supersample batch to write")));
    }
    let out = run_testbed(testbed, cfg, ids.as_deref(), rc.output.batch.is_some())?;
    let report = &out.report;

    write(&rc.output.csv, &report.to_csv()?)?;
    write(&rc.output.json, &report.to_json_string())?;
    if let (Some(path), Some(text)) = (&rc.output.batch, &out.batch) {
        write(path, text)?;
    }

    let mut summary = String::new();
    for b in &report.bounds {
        summary.push_str(&format!(
            "{} {} [{}] value={} vacuous={} gap={}\n",
            report.testbed,
            b.bound_id,
            b.info_source,
            fmt9(b.value),
            b.vacuous,
            fmt9(report.empirical_gap)
        ));
    }
    crate::emit(&summary)?;
    eprintln!("runtime {:.3} s", report.runtime_secs);
    report.require_identities()
}
