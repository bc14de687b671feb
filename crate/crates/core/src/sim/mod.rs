//! Seeded Monte-Carlo experiments over the tests and bounds.
//!
//! Replication `r` of cell `c` draws from a seed derived from
//! `(seed, c, r)`, so reports are identical for any worker count.

mod config;
mod report;
mod run;

pub use config::{AltFamily, Experiment, ExperimentConfig, LemmaParams, SCHEMA_VERSION};
pub use report::{binomial_se, ExperimentReport, ExperimentRow};
pub use run::{alternative, run_experiment, run_experiment_with, RunOptions};

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_replications_is_an_error() {
        let cfg = ExperimentConfig::new(Experiment::Size, vec![50], 0);
        assert!(run_experiment(&cfg).is_err());
    }

    #[test]
    fn config_json_defaults() {
        let cfg: ExperimentConfig =
            serde_json::from_str(r#"{"experiment": "size", "n_values": [100], "replications": 10}"#).unwrap();
        assert_eq!(cfg, ExperimentConfig::new(Experiment::Size, vec![100], 10));
        assert!(serde_json::from_str::<ExperimentConfig>(
            r#"{"experiment": "size", "n_values": [100], "replications": 10, "bogus": 1}"#
        )
        .is_err());
    }

    #[test]
    fn report_rows_have_binomial_se() {
        let mut cfg = ExperimentConfig::new(Experiment::Size, vec![40, 80], 200);
        cfg.critval_reps = 1000;
        let report = run_experiment(&cfg).unwrap();
        assert_eq!(report.rows.len(), 2);
        for row in &report.rows {
            assert!((0.0..=1.0).contains(&row.frequency));
            assert_eq!(row.se, binomial_se(row.frequency, row.reps));
        }
        let csv = report.to_csv().unwrap();
        assert!(csv.starts_with("experiment,cell_params_json,frequency,se,reps\n"));
        assert_eq!(csv.lines().count(), 3);
    }

    #[test]
    fn lf_dominance_needs_mixture() {
        let cfg = ExperimentConfig::new(Experiment::LfDominance, vec![50], 10);
        assert!(run_experiment(&cfg).is_err());
    }
}
