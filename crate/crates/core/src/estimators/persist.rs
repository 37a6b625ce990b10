//! Newline-delimited batch files: a header line, then one record per trial.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::harness::{SupersampleTrial, TrialBatch};

pub const BATCH_FORMAT: &str = "genbound-batch";
pub const BATCH_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchHeader {
    pub format: String,
    pub version: u32,
    pub n: usize,
    pub m_trials: usize,
    pub seed: u64,
    pub loss_levels: Option<u32>,
    pub config: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct BatchRecord {
    pub trial: usize,
    pub s_bits: String,
    pub losses: Vec<f64>,
    pub predictions: Option<Vec<u64>>,
}

fn io(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

/// Writes a supersample batch. Losses are printed with 9 decimals.
pub fn write_batch<P, W: Write>(
    out: &mut W,
    batch: &TrialBatch<SupersampleTrial<P>>,
    config: &serde_json::Value,
) -> Result<()> {
    let header = BatchHeader {
        format: BATCH_FORMAT.into(),
        version: BATCH_VERSION,
        n: batch.n,
        m_trials: batch.m_trials,
        seed: batch.seed,
        loss_levels: batch.loss_levels,
        config: config.clone(),
    };
    let line = serde_json::to_string(&header).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(out, "{line}").map_err(io)?;
    let mut line = String::new();
    for (t, trial) in batch.trials.iter().enumerate() {
        line.clear();
        let bits: String = trial.s.iter().map(|&b| if b { '1' } else { '0' }).collect();
        write!(line, "{{\"trial\":{t},\"s_bits\":\"{bits}\",\"losses\":[").unwrap();
        for (j, l) in trial.losses.iter().enumerate() {
            if j > 0 {
                line.push(',');
            }
            write!(line, "{l:.9}").unwrap();
        }
        line.push_str("],\"predictions\":");
        match &trial.predictions {
            None => line.push_str("null"),
            Some(p) => {
                line.push('[');
                for (j, v) in p.iter().enumerate() {
                    if j > 0 {
                        line.push(',');
                    }
                    write!(line, "{v}").unwrap();
                }
                line.push(']');
            }
        }
        line.push('}');
        writeln!(out, "{line}").map_err(io)?;
    }
    Ok(())
}

/// Reads a batch written by [`write_batch`], checking format, version and record shapes.
pub fn read_batch<R: BufRead>(input: R) -> Result<(BatchHeader, Vec<BatchRecord>)> {
    let mut lines = input.lines();
    let first = lines.next().ok_or(Error::Empty("batch file"))?.map_err(io)?;
    let header: BatchHeader = serde_json::from_str(&first).map_err(|e| Error::Parse(e.to_string()))?;
    if header.format != BATCH_FORMAT || header.version != BATCH_VERSION {
        return Err(Error::Parse(format!(
            "unsupported batch format {} v{}",
            header.format, header.version
        )));
    }
    let mut records = Vec::with_capacity(header.m_trials);
    for line in lines {
        let line = line.map_err(io)?;
        if line.trim().is_empty() {
            continue;
        }
        let r: BatchRecord = serde_json::from_str(&line).map_err(|e| Error::Parse(e.to_string()))?;
        if r.s_bits.len() != header.n
            || !r.s_bits.bytes().all(|b| b == b'0' || b == b'1')
            || r.losses.len() != 2 * header.n
        {
            return Err(Error::Parse(format!("malformed record for trial {}", r.trial)));
        }
        records.push(r);
    }
    if records.len() != header.m_trials {
        return Err(Error::Parse(format!(
            "header announces {} trials, file has {}",
            header.m_trials,
            records.len()
        )));
    }
    Ok((header, records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::harness::run_supersample_trials;
    use crate::estimators::harness::tests::Counter;

    #[test]
    fn round_trip() {
        let batch = run_supersample_trials(&Counter, 3, 5, 8).unwrap();
        let mut buf = Vec::new();
        write_batch(&mut buf, &batch, &serde_json::json!({"testbed": "counter"})).unwrap();
        let (header, records) = read_batch(buf.as_slice()).unwrap();
        assert_eq!(header.seed, 8);
        assert_eq!(header.n, 3);
        assert_eq!(records.len(), 5);
        for (r, t) in records.iter().zip(&batch.trials) {
            let bits: Vec<bool> = r.s_bits.bytes().map(|b| b == b'1').collect();
            assert_eq!(bits, t.s);
            assert_eq!(r.losses, t.losses);
            assert_eq!(r.predictions, t.predictions);
        }
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().nth(1).unwrap().contains("1.000000000"));
    }

    #[test]
    fn rejects_foreign_files() {
        assert!(read_batch(&b"{\"format\":\"x\",\"version\":1,\"n\":1,\"m_trials\":0,\"seed\":0,\"loss_levels\":null,\"config\":null}\n"[..]).is_err());
        assert!(read_batch(&b""[..]).is_err());
    }
}
