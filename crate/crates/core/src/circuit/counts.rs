use std::collections::HashMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Published 2-qubit gate count for one (benchmark, gate set, topology).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRecord {
    pub benchmark: String,
    pub gate_set: String,
    pub topology: String,
    pub n2: u64,
    #[serde(default)]
    pub n1: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormalizedCount {
    pub benchmark: String,
    pub gate_set: String,
    pub topology: String,
    pub ratio: f64,
}

#[derive(Debug, Error)]
pub enum CountError {
    #[error(
        "no `{baseline}` baseline record for benchmark `{benchmark}` on topology `{topology}`"
    )]
    MissingBaseline {
        benchmark: String,
        topology: String,
        baseline: String,
    },
    #[error("baseline count for benchmark `{benchmark}` on topology `{topology}` is zero")]
    ZeroBaseline { benchmark: String, topology: String },
    #[error("count CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("count JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// Reads records from CSV with header `benchmark,gate_set,topology,n2,n1`;
/// the `n1` cell may be blank.
pub fn read_count_records_csv<R: Read>(reader: R) -> Result<Vec<CountRecord>, CountError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut out = Vec::new();
    for rec in rdr.deserialize() {
        out.push(rec?);
    }
    Ok(out)
}

pub fn write_count_records_csv<W: Write>(
    writer: W,
    records: &[CountRecord],
) -> Result<(), CountError> {
    let mut wtr = csv::Writer::from_writer(writer);
    for r in records {
        wtr.serialize(r)?;
    }
    wtr.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_count_records_json<R: Read>(reader: R) -> Result<Vec<CountRecord>, CountError> {
    Ok(serde_json::from_reader(reader)?)
}

/// Each record's `n2` divided by the `baseline_gate_set` record for the same
/// benchmark and topology. Output keeps input order; baseline rows map to 1.
pub fn normalized_counts(
    records: &[CountRecord],
    baseline_gate_set: &str,
) -> Result<Vec<NormalizedCount>, CountError> {
    let baselines: HashMap<(&str, &str), u64> = records
        .iter()
        .filter(|r| r.gate_set == baseline_gate_set)
        .map(|r| ((r.benchmark.as_str(), r.topology.as_str()), r.n2))
        .collect();
    records
        .iter()
        .map(|r| {
            let base = *baselines
                .get(&(r.benchmark.as_str(), r.topology.as_str()))
                .ok_or_else(|| CountError::MissingBaseline {
                    benchmark: r.benchmark.clone(),
                    topology: r.topology.clone(),
                    baseline: baseline_gate_set.to_string(),
                })?;
            if base == 0 {
                return Err(CountError::ZeroBaseline {
                    benchmark: r.benchmark.clone(),
                    topology: r.topology.clone(),
                });
            }
            Ok(NormalizedCount {
                benchmark: r.benchmark.clone(),
                gate_set: r.gate_set.clone(),
                topology: r.topology.clone(),
                ratio: r.n2 as f64 / base as f64,
            })
        })
        .collect()
}
