//! Monte-Carlo critical values for the three adaptive statistics.
//!
//! Each replication draws a fresh dataset from the statistic's null
//! configuration (design points included), so the quantiles estimate the
//! unconditional null law.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::estimators::{check_pi0, max_normalized, pi_statistic_sorted, rd_max, split_sides};
use crate::model::{distance_order, draw_pairs, DesignSpec, RdDesignSpec, RegressionFunction};
use crate::parallel::map_indexed;
use crate::rng::{derive_seed, stream_rng, tag};

/// Replications used when a caller does not choose.
pub const DEFAULT_REPS: usize = 20_000;

/// Which null law to simulate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StatisticKind {
    Point,
    Rd,
    Pi0 { pi0: f64 },
}

impl fmt::Display for StatisticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatisticKind::Point => write!(f, "point"),
            StatisticKind::Rd => write!(f, "rd"),
            StatisticKind::Pi0 { pi0 } => write!(f, "pi0({pi0})"),
        }
    }
}

impl StatisticKind {
    fn tag(&self) -> u64 {
        match self {
            StatisticKind::Point => tag::CRITVAL_POINT,
            StatisticKind::Rd => tag::CRITVAL_RD,
            StatisticKind::Pi0 { .. } => tag::CRITVAL_PI0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CritValSpec {
    pub n: usize,
    pub alpha: f64,
    pub reps: usize,
    pub seed: u64,
    pub kind: StatisticKind,
    /// Required for the point and RD statistics, ignored for `pi0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub design: Option<DesignSpec>,
}

/// An estimated `1 - alpha` quantile and its order-statistic standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalValue {
    pub value: f64,
    pub mc_se: f64,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(invalid("alpha", format!("must lie in (0, 1), got {alpha}")))
    }
}

impl CritValSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(invalid("n", "must be positive"));
        }
        if self.reps == 0 {
            return Err(invalid("reps", "must be at least 1"));
        }
        check_alpha(self.alpha)?;
        match (&self.kind, &self.design) {
            (StatisticKind::Pi0 { pi0 }, _) => check_pi0(*pi0),
            (_, None) => Err(invalid(
                "design",
                format!("required for the {} statistic", self.kind),
            )),
            (StatisticKind::Point, Some(d)) => d.validate(),
            (StatisticKind::Rd, Some(d)) => RdDesignSpec(d.clone()).validate(),
        }
    }

    fn design_fp(&self) -> String {
        match (&self.kind, &self.design) {
            (StatisticKind::Pi0 { .. }, _) | (_, None) => "-".into(),
            (_, Some(d)) => d.fingerprint(),
        }
    }
}

fn rep_rng(seed: u64, r: usize, stream: u64) -> ChaCha8Rng {
    stream_rng(derive_seed(seed, &[r as u64]), stream)
}

/// `T_n(0)` for one dataset drawn under `g = 0`.
fn point_null_draw(n: usize, design: &DesignSpec, rng: &mut ChaCha8Rng) -> f64 {
    let pairs = draw_pairs(n, &RegressionFunction::Zero, design, rng);
    let mut idx: Vec<(f64, f64, usize)> = pairs.iter().enumerate().map(|(i, &(x, y))| (x, y, i)).collect();
    idx.sort_unstable_by(|a, b| distance_order((a.0, a.2), (b.0, b.2)));
    let radius = design.truncation_radius();
    let kbar = idx.iter().take_while(|p| p.0.abs() < radius).count();
    let ys: Vec<f64> = idx.iter().map(|p| p.1).collect();
    max_normalized(&ys, kbar, 0.0).0
}

/// `T_n^rd(0)` for one dataset drawn under `m = 0`, `tau = 0`. A draw with an
/// empty side cannot reject and counts as 0.
fn rd_null_draw(n: usize, design: &DesignSpec, rng: &mut ChaCha8Rng) -> f64 {
    let pairs = draw_pairs(n, &RegressionFunction::Zero, design, rng);
    let ((left, kl), (right, kr)) = split_sides(&pairs, design.truncation_radius());
    if left.is_empty() || right.is_empty() {
        return 0.0;
    }
    rd_max(&left, kl, &right, kr, 0.0).0
}

/// One replication of the least-favorable p-value law, shared across `pi0`.
///
/// Observation `i` is uniform `u_i` when `v_i < pi0` and 0 otherwise; holding
/// `(v_i, u_i)` fixed across `pi0` gives common random numbers.
struct PiDraw {
    /// `(u, v)` sorted by `u`.
    by_u: Vec<(f64, f64)>,
}

impl PiDraw {
    fn new(n: usize, rng: &mut ChaCha8Rng) -> Self {
        let mut by_u: Vec<(f64, f64)> = (0..n)
            .map(|_| {
                let v: f64 = rng.random();
                let u: f64 = rng.random();
                (u, v)
            })
            .collect();
        by_u.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        PiDraw { by_u }
    }

    fn pvalues_sorted(&self, pi0: f64) -> Vec<f64> {
        let zeros = self.by_u.iter().filter(|p| p.1 >= pi0).count();
        let mut out = vec![0.0; zeros];
        out.extend(self.by_u.iter().filter(|p| p.1 < pi0).map(|p| p.0));
        out
    }

    fn statistic(&self, pi0: f64) -> f64 {
        pi_statistic_sorted(&self.pvalues_sorted(pi0), pi0).value
    }
}

/// The `reps` null statistics in replication order.
pub fn simulate_null_statistics(spec: &CritValSpec, workers: Option<usize>) -> Result<Vec<f64>> {
    spec.validate()?;
    let stream = spec.kind.tag();
    match spec.kind {
        StatisticKind::Point => {
            let design = spec.design.as_ref().expect("validated");
            map_indexed(spec.reps, workers, |r| {
                point_null_draw(spec.n, design, &mut rep_rng(spec.seed, r, stream))
            })
        }
        StatisticKind::Rd => {
            let design = spec.design.as_ref().expect("validated");
            map_indexed(spec.reps, workers, |r| {
                rd_null_draw(spec.n, design, &mut rep_rng(spec.seed, r, stream))
            })
        }
        StatisticKind::Pi0 { pi0 } => map_indexed(spec.reps, workers, |r| {
            PiDraw::new(spec.n, &mut rep_rng(spec.seed, r, stream)).statistic(pi0)
        }),
    }
}

/// Null p-values for one replication of the `pi0` sampler, sorted ascending.
pub fn pi0_null_pvalues(n: usize, pi0: f64, seed: u64, rep: usize) -> Result<Vec<f64>> {
    check_pi0(pi0)?;
    Ok(PiDraw::new(n, &mut rep_rng(seed, rep, tag::CRITVAL_PI0)).pvalues_sorted(pi0))
}

/// The upper order statistic at `ceil(R(1 - alpha))` and half the spacing of
/// the order statistics `ceil(sqrt(R alpha (1 - alpha)))` places either side.
pub fn order_statistic_quantile(values: &[f64], alpha: f64) -> Result<CriticalValue> {
    check_alpha(alpha)?;
    let reps = values.len();
    let r = reps as f64;
    // The small offset keeps R(1 - alpha) that is an integer in exact arithmetic
    // from rounding up.
    let index = (r * (1.0 - alpha) - 1e-9).ceil().max(1.0) as usize;
    let spread = (r * alpha * (1.0 - alpha)).sqrt().ceil() as usize;
    if reps == 0 || index > reps || index <= spread || index + spread > reps {
        return Err(Error::TooFewReplications {
            reps,
            alpha,
            index,
            spread,
        });
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    Ok(CriticalValue {
        value: sorted[index - 1],
        mc_se: (sorted[index + spread - 1] - sorted[index - spread - 1]) / 2.0,
    })
}

pub fn mc_quantile(spec: &CritValSpec) -> Result<CriticalValue> {
    mc_quantile_with_workers(spec, None)
}

/// [`mc_quantile`] on a dedicated pool of `workers` threads; the result does
/// not depend on the worker count.
pub fn mc_quantile_with_workers(spec: &CritValSpec, workers: Option<usize>) -> Result<CriticalValue> {
    let stats = simulate_null_statistics(spec, workers)?;
    order_statistic_quantile(&stats, spec.alpha)
}

/// Critical values of `T_n(pi0)` for several `pi0` from one set of draws.
///
/// Each entry equals what [`mc_quantile`] returns for that `pi0` alone.
pub fn pi_critical_values(
    n: usize,
    alpha: f64,
    reps: usize,
    seed: u64,
    pi0s: &[f64],
    workers: Option<usize>,
) -> Result<Vec<CriticalValue>> {
    for &pi0 in pi0s {
        CritValSpec {
            n,
            alpha,
            reps,
            seed,
            kind: StatisticKind::Pi0 { pi0 },
            design: None,
        }
        .validate()?;
    }
    // reps x pi0s, row-major by replication
    let rows = map_indexed(reps, workers, |r| {
        let draw = PiDraw::new(n, &mut rep_rng(seed, r, tag::CRITVAL_PI0));
        pi0s.iter().map(|&p| draw.statistic(p)).collect::<Vec<f64>>()
    })?;
    (0..pi0s.len())
        .map(|j| {
            let column: Vec<f64> = rows.iter().map(|row| row[j]).collect();
            order_statistic_quantile(&column, alpha)
        })
        .collect()
}

/// `sqrt(2) sigma_sup sqrt(ln ln n)`, the large-`n` envelope of `c_{alpha,n}`.
pub fn lil_reference(n: u64, sigma_sup: f64) -> Result<f64> {
    if n < crate::model::MIN_RATE_N {
        return Err(invalid("n", format!("must be >= 16, got {n}")));
    }
    Ok(std::f64::consts::SQRT_2 * sigma_sup * (n as f64).ln().ln().sqrt())
}

/// Supplies critical values to the tests.
pub trait CriticalValueSource: Sync {
    fn critical_value(
        &self,
        kind: StatisticKind,
        n: usize,
        alpha: f64,
        design: Option<&DesignSpec>,
    ) -> Result<f64>;

    fn pi_critical_values(&self, n: usize, alpha: f64, pi0s: &[f64]) -> Result<Vec<f64>> {
        pi0s.iter()
            .map(|&pi0| self.critical_value(StatisticKind::Pi0 { pi0 }, n, alpha, None))
            .collect()
    }
}

/// The same value for every request.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedCriticalValue(pub f64);

impl CriticalValueSource for FixedCriticalValue {
    fn critical_value(&self, _: StatisticKind, _: usize, _: f64, _: Option<&DesignSpec>) -> Result<f64> {
        Ok(self.0)
    }
}

/// One row of the cache table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheRow {
    pub kind: String,
    pub n: usize,
    pub alpha: f64,
    pub design_fp: String,
    pub reps: usize,
    pub seed: u64,
    pub critval: f64,
    pub mc_se: f64,
}

type CacheKey = (String, usize, u64, String, usize, u64);

fn key_of(row: &CacheRow) -> CacheKey {
    (
        row.kind.clone(),
        row.n,
        row.alpha.to_bits(),
        row.design_fp.clone(),
        row.reps,
        row.seed,
    )
}

/// Critical values keyed by `(kind, n, alpha, design fingerprint, reps, seed)`.
#[derive(Debug, Default)]
pub struct CritValCache {
    rows: BTreeMap<CacheKey, CacheRow>,
}

impl CritValCache {
    pub fn load(path: &Path) -> Result<Self> {
        let mut cache = CritValCache::default();
        if !path.exists() {
            return Ok(cache);
        }
        let mut rdr = csv::Reader::from_reader(File::open(path)?);
        for (i, row) in rdr.deserialize::<CacheRow>().enumerate() {
            let row = row.map_err(|e| Error::Parse {
                line: i + 2,
                reason: format!("{}: {e}", path.display()),
            })?;
            cache.rows.insert(key_of(&row), row);
        }
        Ok(cache)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                std::fs::create_dir_all(dir)?;
            }
        }
        let mut wtr = csv::Writer::from_path(path)?;
        for row in self.rows.values() {
            wtr.serialize(row)?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn rows(&self) -> impl Iterator<Item = &CacheRow> {
        self.rows.values()
    }

    fn get(&self, spec: &CritValSpec) -> Option<CriticalValue> {
        self.rows.get(&spec_key(spec)).map(|r| CriticalValue {
            value: r.critval,
            mc_se: r.mc_se,
        })
    }

    fn insert(&mut self, spec: &CritValSpec, cv: CriticalValue) {
        let row = spec_row(spec, cv);
        self.rows.insert(key_of(&row), row);
    }
}

pub fn spec_row(spec: &CritValSpec, cv: CriticalValue) -> CacheRow {
    CacheRow {
        kind: spec.kind.to_string(),
        n: spec.n,
        alpha: spec.alpha,
        design_fp: spec.design_fp(),
        reps: spec.reps,
        seed: spec.seed,
        critval: cv.value,
        mc_se: cv.mc_se,
    }
}

fn spec_key(spec: &CritValSpec) -> CacheKey {
    (
        spec.kind.to_string(),
        spec.n,
        spec.alpha.to_bits(),
        spec.design_fp(),
        spec.reps,
        spec.seed,
    )
}

/// Simulates critical values on demand and memoizes them, optionally backed by
/// a CSV file that is rewritten after each new entry.
#[derive(Debug)]
pub struct MonteCarloSource {
    pub reps: usize,
    pub seed: u64,
    pub workers: Option<usize>,
    /// When false, a cache miss is an error instead of a simulation.
    pub generate: bool,
    cache: Mutex<CritValCache>,
    path: Option<PathBuf>,
}

impl MonteCarloSource {
    pub fn new(reps: usize, seed: u64) -> Self {
        MonteCarloSource {
            reps,
            seed,
            workers: None,
            generate: true,
            cache: Mutex::new(CritValCache::default()),
            path: None,
        }
    }

    pub fn with_workers(mut self, workers: Option<usize>) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_cache_file(mut self, path: impl Into<PathBuf>) -> Result<Self> {
        let path = path.into();
        self.cache = Mutex::new(CritValCache::load(&path)?);
        self.path = Some(path);
        Ok(self)
    }

    fn spec(&self, kind: StatisticKind, n: usize, alpha: f64, design: Option<&DesignSpec>) -> CritValSpec {
        CritValSpec {
            n,
            alpha,
            reps: self.reps,
            seed: self.seed,
            kind,
            design: design.cloned(),
        }
    }

    /// The critical value and its standard error, simulating on a miss.
    pub fn lookup(&self, spec: &CritValSpec) -> Result<CriticalValue> {
        if let Some(cv) = self.cache.lock().expect("cache lock").get(spec) {
            return Ok(cv);
        }
        if !self.generate {
            return Err(Error::MissingCriticalValue(format!(
                "{} at n = {}, alpha = {}",
                spec.kind, spec.n, spec.alpha
            )));
        }
        let cv = mc_quantile_with_workers(spec, self.workers)?;
        self.store(&[(spec.clone(), cv)])?;
        Ok(cv)
    }

    fn store(&self, entries: &[(CritValSpec, CriticalValue)]) -> Result<()> {
        let mut cache = self.cache.lock().expect("cache lock");
        for (spec, cv) in entries {
            cache.insert(spec, *cv);
        }
        if let Some(path) = &self.path {
            cache.save(path)?;
        }
        Ok(())
    }
}

impl CriticalValueSource for MonteCarloSource {
    fn critical_value(
        &self,
        kind: StatisticKind,
        n: usize,
        alpha: f64,
        design: Option<&DesignSpec>,
    ) -> Result<f64> {
        Ok(self.lookup(&self.spec(kind, n, alpha, design))?.value)
    }

    fn pi_critical_values(&self, n: usize, alpha: f64, pi0s: &[f64]) -> Result<Vec<f64>> {
        let specs: Vec<CritValSpec> = pi0s
            .iter()
            .map(|&pi0| self.spec(StatisticKind::Pi0 { pi0 }, n, alpha, None))
            .collect();
        let mut out: Vec<Option<f64>> = {
            let cache = self.cache.lock().expect("cache lock");
            specs.iter().map(|s| cache.get(s).map(|cv| cv.value)).collect()
        };
        let missing: Vec<usize> = (0..specs.len()).filter(|&i| out[i].is_none()).collect();
        if !missing.is_empty() {
            if !self.generate {
                return Err(Error::MissingCriticalValue(format!(
                    "{} at n = {n}, alpha = {alpha}",
                    specs[missing[0]].kind
                )));
            }
            let grid: Vec<f64> = missing.iter().map(|&i| pi0s[i]).collect();
            let cvs = pi_critical_values(n, alpha, self.reps, self.seed, &grid, self.workers)?;
            let entries: Vec<(CritValSpec, CriticalValue)> = missing
                .iter()
                .zip(&cvs)
                .map(|(&i, cv)| (specs[i].clone(), *cv))
                .collect();
            self.store(&entries)?;
            for (&i, cv) in missing.iter().zip(&cvs) {
                out[i] = Some(cv.value);
            }
        }
        Ok(out.into_iter().map(|v| v.expect("filled")).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{FxKind, VarianceFn};

    fn inner_design() -> DesignSpec {
        // Every design point lies inside the truncation radius.
        DesignSpec::new(FxKind::Uniform { lo: -0.5, hi: 0.5 }, VarianceFn::unit(), 0.5)
    }

    fn point_spec(n: usize, alpha: f64, reps: usize, seed: u64) -> CritValSpec {
        CritValSpec {
            n,
            alpha,
            reps,
            seed,
            kind: StatisticKind::Point,
            design: Some(DesignSpec::standard()),
        }
    }

    fn normal_quantile(p: f64) -> f64 {
        use statrs::distribution::{ContinuousCDF, Normal};
        Normal::new(0.0, 1.0).unwrap().inverse_cdf(p)
    }

    #[test]
    fn single_observation_matches_normal_quantile() {
        let spec = CritValSpec {
            n: 1,
            alpha: 0.05,
            reps: 100_000,
            seed: 1,
            kind: StatisticKind::Point,
            design: Some(inner_design()),
        };
        let cv = mc_quantile(&spec).unwrap();
        let z = normal_quantile(0.95);
        assert!((z - 1.644_853_626_951_472_2).abs() < 1e-9);
        assert!((cv.value - z).abs() < 3.0 * cv.mc_se, "{cv:?}");
        assert!(cv.mc_se > 0.0 && cv.mc_se < 0.02);
    }

    #[test]
    fn quantile_is_monotone_in_alpha() {
        let stats = simulate_null_statistics(&point_spec(50, 0.1, 5000, 3), None).unwrap();
        let c10 = order_statistic_quantile(&stats, 0.10).unwrap().value;
        let c01 = order_statistic_quantile(&stats, 0.01).unwrap().value;
        assert!(c10 <= c01);
    }

    #[test]
    fn too_few_replications_is_an_error() {
        assert!(matches!(
            mc_quantile(&point_spec(10, 0.05, 10, 0)),
            Err(Error::TooFewReplications { .. })
        ));
        assert!(mc_quantile(&point_spec(10, 0.05, 0, 0)).is_err());
    }

    #[test]
    fn order_statistic_convention() {
        let values: Vec<f64> = (1..=1000).rev().map(f64::from).collect();
        let cv = order_statistic_quantile(&values, 0.05).unwrap();
        // index 950, spread ceil(sqrt(47.5)) = 7
        assert_eq!(cv.value, 950.0);
        assert_eq!(cv.mc_se, 7.0);
    }

    #[test]
    fn point_and_rd_need_design() {
        let mut spec = point_spec(10, 0.05, 100, 0);
        spec.design = None;
        assert!(spec.validate().is_err());
        spec.kind = StatisticKind::Rd;
        assert!(spec.validate().is_err());
        spec.kind = StatisticKind::Pi0 { pi0: 0.5 };
        assert!(spec.validate().is_ok());
        spec.kind = StatisticKind::Pi0 { pi0: 0.0 };
        assert!(spec.validate().is_err());
    }

    #[test]
    fn worker_count_does_not_change_result() {
        let spec = point_spec(200, 0.05, 2000, 9);
        let a = mc_quantile_with_workers(&spec, Some(1)).unwrap();
        let b = mc_quantile_with_workers(&spec, Some(4)).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.mc_se.to_bits(), b.mc_se.to_bits());
    }

    #[test]
    fn pi0_sampler_emits_uniforms_and_zeros() {
        for rep in 0..10 {
            let p = pi0_null_pvalues(4, 1.0, 5, rep).unwrap();
            assert_eq!(p.len(), 4);
            assert!(p.iter().all(|&v| v > 0.0 && v < 1.0));
        }
        let reps = 10_000;
        let zeros: usize = (0..reps)
            .map(|r| {
                pi0_null_pvalues(4, 0.5, 5, r)
                    .unwrap()
                    .iter()
                    .filter(|&&p| p == 0.0)
                    .count()
            })
            .sum();
        let total = (4 * reps) as f64;
        let f = zeros as f64 / total;
        assert!((f - 0.5).abs() < 3.0 * (0.25 / total).sqrt(), "{f}");
    }

    #[test]
    fn pi_batch_matches_single_quantiles() {
        let pi0s = [0.3, 0.6, 1.0];
        let batch = pi_critical_values(40, 0.05, 2000, 11, &pi0s, None).unwrap();
        for (&pi0, cv) in pi0s.iter().zip(&batch) {
            let single = mc_quantile(&CritValSpec {
                n: 40,
                alpha: 0.05,
                reps: 2000,
                seed: 11,
                kind: StatisticKind::Pi0 { pi0 },
                design: None,
            })
            .unwrap();
            assert_eq!(single, *cv);
        }
    }

    #[test]
    fn lil_reference_examples() {
        let v = lil_reference(16, 1.0).unwrap();
        assert!((v - 1.428_132_655_279_772_4).abs() < 1e-12, "{v}");
        assert_eq!(lil_reference(100, 0.0).unwrap(), 0.0);
        assert_eq!(
            lil_reference(100, 2.0).unwrap(),
            2.0 * lil_reference(100, 1.0).unwrap()
        );
        assert!(lil_reference(15, 1.0).is_err());
    }

    #[test]
    fn cache_round_trips_through_csv() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cv.csv");
        let source = MonteCarloSource::new(500, 2).with_cache_file(&path).unwrap();
        let d = DesignSpec::standard();
        let v = source
            .critical_value(StatisticKind::Point, 30, 0.1, Some(&d))
            .unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("kind,n,alpha,design_fp,reps,seed,critval,mc_se\n"));

        let mut reload = MonteCarloSource::new(500, 2).with_cache_file(&path).unwrap();
        reload.generate = false;
        assert_eq!(
            reload
                .critical_value(StatisticKind::Point, 30, 0.1, Some(&d))
                .unwrap(),
            v
        );
        assert!(matches!(
            reload.critical_value(StatisticKind::Point, 31, 0.1, Some(&d)),
            Err(Error::MissingCriticalValue(_))
        ));
    }

    #[test]
    fn source_pi_batch_uses_cache() {
        let source = MonteCarloSource::new(1000, 4);
        let first = source.pi_critical_values(30, 0.05, &[0.5, 0.9]).unwrap();
        let again = source.pi_critical_values(30, 0.05, &[0.9, 0.5, 0.7]).unwrap();
        assert_eq!(first[0], again[1]);
        assert_eq!(first[1], again[0]);
        let single = source
            .critical_value(StatisticKind::Pi0 { pi0: 0.7 }, 30, 0.05, None)
            .unwrap();
        assert_eq!(single, again[2]);
    }
}
