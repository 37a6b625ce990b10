use clap::Args;
use genbound::bounds::BoundId;
use genbound::testbeds::Testbed;
use genbound::{Error, Result};
use serde_json::{json, Value};

use crate::measure::MEASURES;

#[derive(Debug, Args)]
pub struct ListArgs {
    /// `measures`, `bounds` or `testbeds`.
    pub registry: String,
    #[arg(long)]
    pub json: bool,
}

fn table(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(String::len).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for r in rows {
        let line: Vec<String> = r
            .iter()
            .enumerate()
            .map(|(c, cell)| format!("{cell:<w$}", w = widths[c]))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

fn joined(xs: &[&str]) -> String {
    if xs.is_empty() {
        "-".into()
    } else {
        xs.join(",")
    }
}

fn registry(name: &str) -> Result<(Value, Vec<Vec<String>>)> {
    match name {
        "measures" => {
            let js = MEASURES
                .iter()
                .map(|(id, inputs, about)| json!({"id": id, "inputs": inputs, "description": about}))
                .collect();
            let mut rows = vec![vec!["id".into(), "inputs".into(), "description".into()]];
            rows.extend(
                MEASURES
                    .iter()
                    .map(|(id, inputs, about)| vec![id.to_string(), joined(inputs), about.to_string()]),
            );
            Ok((Value::Array(js), rows))
        }
        "bounds" => {
            let js = BoundId::ALL
                .iter()
                .map(|b| {
                    json!({
                        "id": b.as_str(),
                        "required_fields": b.required_fields(),
                        "optional_fields": b.optional_fields(),
                        "unit_loss": b.unit_loss(),
                        "per_sample_info": b.per_sample_info(),
                    })
                })
                .collect();
            let mut rows = vec![vec![
                "id".into(),
                "required".into(),
                "optional".into(),
                "unit_loss".into(),
            ]];
            rows.extend(BoundId::ALL.iter().map(|b| {
                vec![
                    b.as_str().to_string(),
                    joined(b.required_fields()),
                    joined(b.optional_fields()),
                    b.unit_loss().to_string(),
                ]
            }));
            Ok((Value::Array(js), rows))
        }
        "testbeds" => {
            let js = Testbed::ALL
                .iter()
                .map(|t| json!({"id": t.as_str(), "description": t.description(), "uses_trials": t.uses_trials()}))
                .collect();
            let mut rows = vec![vec!["id".into(), "description".into()]];
            rows.extend(
                Testbed::ALL
                    .iter()
                    .map(|t| vec![t.as_str().to_string(), t.description().to_string()]),
            );
            Ok((Value::Array(js), rows))
        }
        other => Err(Error::Parse(format!(
            "unknown registry {other:?}; expected measures, bounds or testbeds"
        ))),
    }
}

pub fn run(a: &ListArgs) -> Result<()> {
    let (js, rows) = registry(&a.registry)?;
    if a.json {
        crate::emit(&format!("{}\n", serde_json::to_string_pretty(&js).unwrap()))
    } else {
        crate::emit(&table(&rows))
    }
}
