use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::ExperimentConfig;
use crate::error::Result;

/// One cell of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    /// Cell parameters and auxiliary measurements, as a JSON object.
    pub params: Value,
    pub frequency: f64,
    /// `sqrt(f (1 - f) / reps)`.
    pub se: f64,
    pub reps: usize,
}

impl ExperimentRow {
    pub fn new(params: Value, hits: usize, reps: usize) -> Self {
        let f = hits as f64 / reps as f64;
        ExperimentRow {
            params,
            frequency: f,
            se: binomial_se(f, reps),
            reps,
        }
    }

    pub fn from_frequency(params: Value, frequency: f64, reps: usize) -> Self {
        ExperimentRow {
            params,
            frequency,
            se: binomial_se(frequency, reps),
            reps,
        }
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.get(key).and_then(Value::as_f64)
    }
}

pub fn binomial_se(f: f64, reps: usize) -> f64 {
    (f * (1.0 - f) / reps as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub rows: Vec<ExperimentRow>,
    pub config: ExperimentConfig,
    /// Not part of the simulated output; excluded from [`Self::to_csv`].
    pub wall_time_secs: f64,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    experiment: &'a str,
    cell_params_json: String,
    frequency: f64,
    se: f64,
    reps: usize,
}

impl ExperimentReport {
    pub fn to_csv(&self) -> Result<String> {
        let mut wtr = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            wtr.serialize(CsvRow {
                experiment: &self.experiment,
                cell_params_json: serde_json::to_string(&row.params)?,
                frequency: row.frequency,
                se: row.se,
                reps: row.reps,
            })?;
        }
        let bytes = wtr.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_json_pretty(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
