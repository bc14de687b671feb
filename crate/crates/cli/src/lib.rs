//! The `adaptest` command line.
//!
//! Exit codes: 0 success, 2 usage error, 3 invalid data or configuration,
//! 4 numeric failure (e.g. too few Monte-Carlo replications).

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use adaptest::critval::{mc_quantile_with_workers, spec_row, CritValSpec, DEFAULT_REPS};
use adaptest::inference::{pi_upper_ci, DEFAULT_PI_STEP};
use adaptest::sim::{run_experiment_with, ExperimentConfig, RunOptions};
use adaptest::{
    lower_confidence_bound, pi_test, point_test, rd_test, CriticalValueSource, DesignSpec, Error,
    FixedCriticalValue, MonteCarloSource, RdDesignSpec, Sample, StatisticKind,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

/// Directory holding `critvals.csv`, the shared critical-value cache.
pub const CACHE_DIR_ENV: &str = "ADAPTEST_CACHE_DIR";
pub const CACHE_FILE: &str = "critvals.csv";
pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_SEED: u64 = 0;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "adaptest", version, about = "Adaptive one-sided tests at a point")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Test g(0) <= theta0 on an `x,y` CSV.
    Test {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        theta0: Option<f64>,
    },
    /// Lower confidence bound for g(0).
    Ci {
        #[command(flatten)]
        data: DataArgs,
    },
    /// Test that the jump at 0 is at most tau0.
    RdTest {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        tau0: Option<f64>,
    },
    /// Test that the proportion of true nulls is at least pi0, from one p-value per line.
    PiTest {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        pi0: Option<f64>,
    },
    /// Upper confidence bound for the proportion of true nulls.
    PiCi {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        step: Option<f64>,
    },
    /// Simulate one critical value.
    Critval {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, default_value_t = DEFAULT_REPS)]
        reps: usize,
        #[arg(long)]
        pi0: Option<f64>,
        /// JSON config supplying the design (standard design when absent).
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run an experiment described by a JSON config.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Fail on a critical-value cache miss instead of simulating.
        #[arg(long)]
        no_generate: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Point,
    Rd,
    Pi0,
}

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Overrides the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Directory for the critical-value cache.
    #[arg(long, env = CACHE_DIR_ENV)]
    cache_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DataArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Monte-Carlo replications for the critical value.
    #[arg(long)]
    reps: Option<usize>,
    /// Use this critical value instead of simulating one.
    #[arg(long)]
    critical_value: Option<f64>,
    #[command(flatten)]
    common: CommonArgs,
}

/// Config file for the data subcommands. Flags take precedence over fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "schema")]
    pub schema_version: u32,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub theta0: Option<f64>,
    #[serde(default)]
    pub tau0: Option<f64>,
    #[serde(default)]
    pub pi0: Option<f64>,
    #[serde(default)]
    pub step: Option<f64>,
    /// Standard design when absent.
    #[serde(default)]
    pub design: Option<DesignSpec>,
    /// Replaces the design's `eta`.
    #[serde(default)]
    pub eta: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub critval_reps: Option<usize>,
    #[serde(default)]
    pub critical_value: Option<f64>,
}

fn schema() -> u32 {
    SCHEMA_VERSION
}

impl Default for RunConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields default")
    }
}

impl RunConfig {
    fn design(&self) -> DesignSpec {
        let mut d = self.design.clone().unwrap_or_else(DesignSpec::standard);
        if let Some(eta) = self.eta {
            d.eta = eta;
        }
        d
    }
}

/// An error with the exit code it maps to.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::TooFewReplications { .. } | Error::Numeric(_) => EXIT_NUMERIC,
            _ => EXIT_DATA,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn data_error(message: String) -> Failure {
    Failure {
        code: EXIT_DATA,
        message,
    }
}

fn in_file(path: &Path, e: impl std::fmt::Display) -> Failure {
    data_error(format!("{}: {e}", path.display()))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let file = File::open(path).map_err(|e| in_file(path, e))?;
    serde_json::from_reader(BufReader::new(file)).map_err(|e| in_file(path, e))
}

fn read_run_config(path: Option<&Path>) -> Result<RunConfig, Failure> {
    let cfg = match path {
        Some(p) => read_json::<RunConfig>(p)?,
        None => RunConfig::default(),
    };
    if cfg.schema_version != SCHEMA_VERSION {
        return Err(data_error(format!(
            "schema_version: unsupported {}, expected {SCHEMA_VERSION}",
            cfg.schema_version
        )));
    }
    Ok(cfg)
}

fn read_sample(path: &Path) -> Result<Sample, Failure> {
    let file = File::open(path).map_err(|e| in_file(path, e))?;
    Sample::read_csv(file).map_err(|e| in_file(path, e))
}

/// One p-value per line; blank lines are skipped.
pub fn read_pvalues<R: BufRead>(reader: R) -> adaptest::Result<Vec<f64>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        let p: f64 = text.parse().map_err(|e| Error::Parse {
            line: i + 1,
            reason: format!("`{text}`: {e}"),
        })?;
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Parse {
                line: i + 1,
                reason: format!("p-value {p} outside [0, 1]"),
            });
        }
        out.push(p);
    }
    if out.is_empty() {
        return Err(Error::EmptySample);
    }
    Ok(out)
}

fn cache_path(common: &CommonArgs) -> Option<PathBuf> {
    common.cache_dir.as_ref().map(|d| d.join(CACHE_FILE))
}

/// Seed precedence: flag, then config, then [`DEFAULT_SEED`].
fn resolve_seed(flag: Option<u64>, config: Option<u64>) -> u64 {
    flag.or(config).unwrap_or(DEFAULT_SEED)
}

fn critical_values(data: &DataArgs, cfg: &RunConfig) -> Result<Box<dyn CriticalValueSource>, Failure> {
    if let Some(cv) = data.critical_value.or(cfg.critical_value) {
        return Ok(Box::new(FixedCriticalValue(cv)));
    }
    let reps = data.reps.or(cfg.critval_reps).unwrap_or(DEFAULT_REPS);
    let seed = resolve_seed(data.common.seed, cfg.seed);
    let mut source = MonteCarloSource::new(reps, seed).with_workers(data.common.workers);
    if let Some(path) = cache_path(&data.common) {
        source = source.with_cache_file(path)?;
    }
    Ok(Box::new(source))
}

fn render<T: Serialize>(value: &T, format: Format) -> Result<String, Failure> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(value).map_err(|e| Failure::from(Error::from(e)))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let mut wtr = csv::Writer::from_writer(Vec::new());
            wtr.serialize(value).map_err(|e| Failure::from(Error::from(e)))?;
            let bytes = wtr
                .into_inner()
                .map_err(|e| Failure::from(Error::from(e.into_error())))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
    }
}

fn emit(text: &str, common: &CommonArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    match &common.output {
        Some(path) => std::fs::write(path, text).map_err(|e| in_file(path, e)),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Failure::from(Error::from(e))),
    }
}

fn alpha_of(data: &DataArgs, cfg: &RunConfig) -> f64 {
    data.alpha.or(cfg.alpha).unwrap_or(0.05)
}

fn execute(command: Command, stdout: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Test { data, theta0 } => {
            let cfg = read_run_config(data.config.as_deref())?;
            let sample = read_sample(&data.input)?;
            let design = cfg.design();
            design.validate()?;
            let source = critical_values(&data, &cfg)?;
            let theta0 = theta0.or(cfg.theta0).unwrap_or(0.0);
            let out = point_test(&sample, theta0, alpha_of(&data, &cfg), &design, source.as_ref())?;
            emit(&render(&out, data.common.format)?, &data.common, stdout)
        }
        Command::Ci { data } => {
            let cfg = read_run_config(data.config.as_deref())?;
            let sample = read_sample(&data.input)?;
            let design = cfg.design();
            design.validate()?;
            let source = critical_values(&data, &cfg)?;
            let out = lower_confidence_bound(&sample, alpha_of(&data, &cfg), &design, source.as_ref())?;
            emit(&render(&out, data.common.format)?, &data.common, stdout)
        }
        Command::RdTest { data, tau0 } => {
            let cfg = read_run_config(data.config.as_deref())?;
            let sample = read_sample(&data.input)?;
            let design = RdDesignSpec(cfg.design());
            design.validate()?;
            let source = critical_values(&data, &cfg)?;
            let tau0 = tau0.or(cfg.tau0).unwrap_or(0.0);
            let out = rd_test(&sample, tau0, alpha_of(&data, &cfg), &design, source.as_ref())?;
            emit(&render(&out, data.common.format)?, &data.common, stdout)
        }
        Command::PiTest { data, pi0 } => {
            let cfg = read_run_config(data.config.as_deref())?;
            let pvals = read_pvalue_file(&data.input)?;
            let source = critical_values(&data, &cfg)?;
            let pi0 = pi0
                .or(cfg.pi0)
                .ok_or_else(|| data_error("pi0: required (flag --pi0 or config field)".into()))?;
            let out = pi_test(&pvals, pi0, alpha_of(&data, &cfg), source.as_ref())?;
            emit(&render(&out, data.common.format)?, &data.common, stdout)
        }
        Command::PiCi { data, step } => {
            let cfg = read_run_config(data.config.as_deref())?;
            let pvals = read_pvalue_file(&data.input)?;
            let source = critical_values(&data, &cfg)?;
            let step = step.or(cfg.step).unwrap_or(DEFAULT_PI_STEP);
            let out = pi_upper_ci(&pvals, alpha_of(&data, &cfg), source.as_ref(), step)?;
            emit(&render(&out, data.common.format)?, &data.common, stdout)
        }
        Command::Critval {
            kind,
            n,
            alpha,
            reps,
            pi0,
            config,
            common,
        } => {
            let cfg = read_run_config(config.as_deref())?;
            let kind = match kind {
                KindArg::Point => StatisticKind::Point,
                KindArg::Rd => StatisticKind::Rd,
                KindArg::Pi0 => StatisticKind::Pi0 {
                    pi0: pi0
                        .or(cfg.pi0)
                        .ok_or_else(|| data_error("pi0: required for --kind pi0".into()))?,
                },
            };
            let spec = CritValSpec {
                n,
                alpha,
                reps,
                seed: resolve_seed(common.seed, cfg.seed),
                kind,
                design: match kind {
                    StatisticKind::Pi0 { .. } => None,
                    _ => Some(cfg.design()),
                },
            };
            let cv = mc_quantile_with_workers(&spec, common.workers)?;
            emit(&render(&spec_row(&spec, cv), common.format)?, &common, stdout)
        }
        Command::Simulate {
            config,
            no_generate,
            common,
        } => {
            let mut cfg: ExperimentConfig = read_json(&config)?;
            if let Some(seed) = common.seed {
                cfg.seed = seed;
            }
            let options = RunOptions {
                workers: common.workers,
                cache_path: cache_path(&common),
                generate_critvals: !no_generate,
            };
            let report = run_experiment_with(&cfg, &options)?;
            let text = match common.format {
                Format::Json => {
                    let mut s = report.to_json_pretty()?;
                    s.push('\n');
                    s
                }
                Format::Csv => report.to_csv()?,
            };
            emit(&text, &common, stdout)
        }
    }
}

fn read_pvalue_file(path: &Path) -> Result<Vec<f64>, Failure> {
    let file = File::open(path).map_err(|e| in_file(path, e))?;
    read_pvalues(BufReader::new(file)).map_err(|e| in_file(path, e))
}

/// Runs the command line `argv` (program name first) and returns the exit code.
pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(rendered.as_bytes())
            } else {
                stdout.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command, stdout) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

/// [`run_with`] on the process's standard streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn seed_precedence() {
        assert_eq!(resolve_seed(Some(7), Some(5)), 7);
        assert_eq!(resolve_seed(None, Some(5)), 5);
        assert_eq!(resolve_seed(None, None), DEFAULT_SEED);
    }

    #[test]
    fn pvalue_lines() {
        let p = read_pvalues("0.1\n\n0.5\n1\n".as_bytes()).unwrap();
        assert_eq!(p, vec![0.1, 0.5, 1.0]);
        let err = read_pvalues("0.1\nfoo\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = read_pvalues("0.1\n1.5\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn error_exit_codes() {
        assert_eq!(Failure::from(Error::EmptySample).code, EXIT_DATA);
        assert_eq!(
            Failure::from(Error::TooFewReplications {
                reps: 1,
                alpha: 0.05,
                index: 1,
                spread: 1
            })
            .code,
            EXIT_NUMERIC
        );
    }
}
