use std::path::PathBuf;
use std::time::Instant;

use rand::Rng;
use serde_json::json;

use super::{AltFamily, Experiment, ExperimentConfig, ExperimentReport, ExperimentRow};
use crate::critval::{
    lil_reference, order_statistic_quantile, simulate_null_statistics, CritValSpec, CriticalValueSource,
    FixedCriticalValue, MonteCarloSource, StatisticKind,
};
use crate::error::{invalid, Error, Result};
use crate::estimators::pi_statistic;
use crate::inference::{lower_confidence_bound, pi_test, point_test, rd_test};
use crate::model::{
    an_event_sorted, gen_pvalue_sample, gen_regression_sample, rd_embed, MixtureSpec, RdDesignSpec,
    RegressionFunction,
};
use crate::parallel::try_map_indexed;
use crate::rng::{derive_seed, stream_rng, tag};
use crate::theory::{
    cstar_constant, default_beta_grid, lemma_power_gap, rate_bound, LemmaConfig, LikelihoodRatioTest,
};

/// Execution settings that do not affect the simulated output.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub workers: Option<usize>,
    /// Critical-value cache table, read before and rewritten after simulation.
    pub cache_path: Option<PathBuf>,
    /// When false, a missing critical value is an error.
    pub generate_critvals: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            workers: None,
            cache_path: None,
            generate_critvals: true,
        }
    }
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    run_experiment_with(config, &RunOptions::default())
}

/// Runs every cell of `config`. Rows depend only on `config`, never on
/// `options`.
pub fn run_experiment_with(config: &ExperimentConfig, options: &RunOptions) -> Result<ExperimentReport> {
    config.validate()?;
    let start = Instant::now();
    let mut source = MonteCarloSource::new(config.critval_reps, config.seed).with_workers(options.workers);
    if let Some(path) = &options.cache_path {
        source = source.with_cache_file(path)?;
    }
    source.generate = options.generate_critvals;
    let runner = Runner {
        cfg: config,
        source: &source,
        workers: options.workers,
    };
    let rows = match config.experiment {
        Experiment::Size => runner.size(),
        Experiment::Power => runner.power(false),
        Experiment::Adaptation => runner.power(true),
        Experiment::Coverage => runner.coverage(),
        Experiment::RdSize => runner.rd_size(),
        Experiment::RdPower => runner.rd_power(),
        Experiment::PiSize => runner.pi_size(),
        Experiment::PiPower => runner.pi_power(),
        Experiment::LfDominance => runner.lf_dominance(),
        Experiment::LemmaBound => runner.lemma_bound(),
        Experiment::AnFrequency => runner.an_frequency(),
        Experiment::LilTrend => runner.lil_trend(),
    }?;
    Ok(ExperimentReport {
        experiment: config.experiment.name().to_string(),
        rows,
        config: config.clone(),
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}

/// `family` member with peak `c (n / log log n)^(-beta/(2 beta + 1))`.
pub fn alternative(family: AltFamily, c: f64, beta: f64, l: f64, n: usize) -> Result<RegressionFunction> {
    match family {
        AltFamily::Bump => RegressionFunction::bump(rate_bound(n as u64, beta, c)?, beta, l),
        AltFamily::HolderAlt => RegressionFunction::holder_alt(beta, l, c, n as u64),
    }
}

struct Runner<'a> {
    cfg: &'a ExperimentConfig,
    source: &'a MonteCarloSource,
    workers: Option<usize>,
}

impl Runner<'_> {
    fn seed(&self, cell: usize, rep: usize) -> u64 {
        derive_seed(self.cfg.seed, &[tag::EXPERIMENT, cell as u64, rep as u64])
    }

    fn count<F>(&self, f: F) -> Result<usize>
    where
        F: Fn(usize) -> Result<bool> + Sync + Send,
    {
        Ok(try_map_indexed(self.cfg.replications, self.workers, f)?
            .into_iter()
            .filter(|&hit| hit)
            .count())
    }

    fn row(&self, params: serde_json::Value, hits: usize) -> ExperimentRow {
        ExperimentRow::new(params, hits, self.cfg.replications)
    }

    fn cstar(&self, l: f64) -> Result<f64> {
        let d = &self.cfg.design;
        cstar_constant(d.sigma_sup(), d.mass_constant_k(), l, &default_beta_grid())
    }

    /// `(n, beta, multiplier)` in row-major order.
    fn rate_cells(&self) -> Vec<(usize, f64, f64)> {
        let c = self.cfg;
        c.n_values
            .iter()
            .flat_map(|&n| {
                c.beta_grid
                    .iter()
                    .flat_map(move |&b| c.multipliers.iter().map(move |&m| (n, b, m)))
            })
            .collect()
    }

    fn point_cv(&self, n: usize) -> Result<f64> {
        self.source
            .critical_value(StatisticKind::Point, n, self.cfg.alpha, Some(&self.cfg.design))
    }

    fn point_rejections(&self, cell: usize, n: usize, g: &RegressionFunction, cv: f64) -> Result<usize> {
        let (d, alpha) = (&self.cfg.design, self.cfg.alpha);
        self.count(|r| {
            let s = gen_regression_sample(n, g, d, self.seed(cell, r))?;
            Ok(point_test(&s, 0.0, alpha, d, &FixedCriticalValue(cv))?.reject)
        })
    }

    fn size(&self) -> Result<Vec<ExperimentRow>> {
        let mut rows = Vec::new();
        for (cell, &n) in self.cfg.n_values.iter().enumerate() {
            let cv = self.point_cv(n)?;
            let hits = self.point_rejections(cell, n, &self.cfg.function, cv)?;
            rows.push(self.row(
                json!({"n": n, "alpha": self.cfg.alpha, "critical_value": cv}),
                hits,
            ));
        }
        Ok(rows)
    }

    fn power(&self, adaptive: bool) -> Result<Vec<ExperimentRow>> {
        let l = self.cfg.lipschitz;
        let unit = if adaptive { self.cstar(l)? } else { 1.0 };
        let mut rows = Vec::new();
        for (cell, (n, beta, mult)) in self.rate_cells().into_iter().enumerate() {
            let c = mult * unit;
            let g = alternative(self.cfg.family, c, beta, l, n)?;
            let cv = self.point_cv(n)?;
            let hits = self.point_rejections(cell, n, &g, cv)?;
            let mut params = json!({
                "n": n, "beta": beta, "multiplier": mult, "c": c, "b": g.eval(0.0),
                "critical_value": cv,
            });
            if adaptive {
                params["cstar"] = json!(unit);
            }
            rows.push(self.row(params, hits));
        }
        Ok(rows)
    }

    fn coverage(&self) -> Result<Vec<ExperimentRow>> {
        let (d, alpha, g) = (&self.cfg.design, self.cfg.alpha, &self.cfg.function);
        let g0 = g.eval(0.0);
        let mut rows = Vec::new();
        for (cell, &n) in self.cfg.n_values.iter().enumerate() {
            let cv = self.point_cv(n)?;
            let hits = self.count(|r| {
                let s = gen_regression_sample(n, g, d, self.seed(cell, r))?;
                Ok(g0 >= lower_confidence_bound(&s, alpha, d, &FixedCriticalValue(cv))?.c_hat_star)
            })?;
            rows.push(self.row(
                json!({"n": n, "alpha": alpha, "g0": g0, "critical_value": cv}),
                hits,
            ));
        }
        Ok(rows)
    }

    /// RD rejections; a sample with an empty side cannot reject.
    fn rd_rejections(&self, cell: usize, n: usize, g: &RegressionFunction, cv: f64) -> Result<usize> {
        let rd = RdDesignSpec(self.cfg.design.clone());
        let (alpha, tau0) = (self.cfg.alpha, self.cfg.tau0);
        self.count(|r| {
            let s = gen_regression_sample(n, g, rd.design(), self.seed(cell, r))?;
            match rd_test(&s, tau0, alpha, &rd, &FixedCriticalValue(cv)) {
                Ok(out) => Ok(out.reject),
                Err(Error::OneSidedSample { .. }) => Ok(false),
                Err(e) => Err(e),
            }
        })
    }

    fn rd_cv(&self, n: usize) -> Result<f64> {
        RdDesignSpec(self.cfg.design.clone()).validate()?;
        self.source
            .critical_value(StatisticKind::Rd, n, self.cfg.alpha, Some(&self.cfg.design))
    }

    fn rd_size(&self) -> Result<Vec<ExperimentRow>> {
        let g = RegressionFunction::Jump {
            base: Box::new(self.cfg.function.clone()),
            tau: self.cfg.tau0,
        };
        let mut rows = Vec::new();
        for (cell, &n) in self.cfg.n_values.iter().enumerate() {
            let cv = self.rd_cv(n)?;
            let hits = self.rd_rejections(cell, n, &g, cv)?;
            rows.push(self.row(json!({"n": n, "tau0": self.cfg.tau0, "critical_value": cv}), hits));
        }
        Ok(rows)
    }

    /// The alternative is the sign embedding of a family member with constant
    /// `L/2`, so the embedded function has constant `L`.
    fn rd_power(&self) -> Result<Vec<ExperimentRow>> {
        let l = self.cfg.lipschitz;
        let cstar = self.cstar(l)?;
        let mut rows = Vec::new();
        for (cell, (n, beta, mult)) in self.rate_cells().into_iter().enumerate() {
            let c = mult * cstar;
            let base = alternative(self.cfg.family, c, beta, l / 2.0, n)?;
            let (m, tau) = rd_embed(&base)?;
            let g = RegressionFunction::Jump {
                base: Box::new(m),
                tau,
            };
            let cv = self.rd_cv(n)?;
            let hits = self.rd_rejections(cell, n, &g, cv)?;
            rows.push(self.row(
                json!({
                    "n": n, "beta": beta, "multiplier": mult, "c": c, "cstar": cstar,
                    "tau": tau, "tau0": self.cfg.tau0, "critical_value": cv,
                }),
                hits,
            ));
        }
        Ok(rows)
    }

    fn pi_cv(&self, n: usize) -> Result<f64> {
        self.source
            .critical_value(StatisticKind::Pi0 { pi0: self.cfg.pi0 }, n, self.cfg.alpha, None)
    }

    fn pi_rejections(&self, cell: usize, n: usize, mix: &MixtureSpec, cv: f64) -> Result<usize> {
        let (pi0, alpha) = (self.cfg.pi0, self.cfg.alpha);
        self.count(|r| {
            let p = gen_pvalue_sample(n, mix, self.seed(cell, r))?;
            Ok(pi_test(&p, pi0, alpha, &FixedCriticalValue(cv))?.reject)
        })
    }

    fn data_mixture(&self) -> Result<MixtureSpec> {
        match &self.cfg.mixture {
            Some(m) => Ok(m.clone()),
            None => MixtureSpec::least_favorable(self.cfg.pi0),
        }
    }

    fn pi_size(&self) -> Result<Vec<ExperimentRow>> {
        let mix = self.data_mixture()?;
        let mut rows = Vec::new();
        for (cell, &n) in self.cfg.n_values.iter().enumerate() {
            let cv = self.pi_cv(n)?;
            let hits = self.pi_rejections(cell, n, &mix, cv)?;
            rows.push(self.row(
                json!({"n": n, "pi0": self.cfg.pi0, "pi": mix.pi, "critical_value": cv}),
                hits,
            ));
        }
        Ok(rows)
    }

    fn pi_power(&self) -> Result<Vec<ExperimentRow>> {
        let (pi0, l) = (self.cfg.pi0, self.cfg.lipschitz);
        let mut rows = Vec::new();
        for (cell, (n, beta, mult)) in self.rate_cells().into_iter().enumerate() {
            let b = rate_bound(n as u64, beta, mult)?;
            let mix = MixtureSpec::holder_alternative(pi0, b, beta, l)?;
            let cv = self.pi_cv(n)?;
            let hits = self.pi_rejections(cell, n, &mix, cv)?;
            rows.push(self.row(
                json!({
                    "n": n, "beta": beta, "multiplier": mult, "b": b, "pi0": pi0,
                    "holder_constant": mix.holder_constant(), "critical_value": cv,
                }),
                hits,
            ));
        }
        Ok(rows)
    }

    fn pi_statistics(&self, cell: usize, n: usize, mix: &MixtureSpec) -> Result<Vec<f64>> {
        let pi0 = self.cfg.pi0;
        try_map_indexed(self.cfg.replications, self.workers, |r| {
            Ok(pi_statistic(&gen_pvalue_sample(n, mix, self.seed(cell, r))?, pi0)?.value)
        })
    }

    /// For each level `q`, the threshold is the least-favorable `q`-quantile and
    /// the row frequency is the data mixture's CDF there.
    fn lf_dominance(&self) -> Result<Vec<ExperimentRow>> {
        let mix = self
            .cfg
            .mixture
            .clone()
            .ok_or_else(|| invalid("mixture", "required for lf_dominance"))?;
        let lf = MixtureSpec::least_favorable(self.cfg.pi0)?;
        let reps = self.cfg.replications;
        let levels = self.cfg.quantile_levels;
        let mut rows = Vec::new();
        for (i, &n) in self.cfg.n_values.iter().enumerate() {
            let mut lf_stats = self.pi_statistics(2 * i, n, &lf)?;
            let alt_stats = self.pi_statistics(2 * i + 1, n, &mix)?;
            lf_stats.sort_unstable_by(f64::total_cmp);
            for j in 1..=levels {
                let q = j as f64 / (levels + 1) as f64;
                let idx = ((q * reps as f64).ceil() as usize).clamp(1, reps) - 1;
                let t = lf_stats[idx];
                let lf_cdf = lf_stats.partition_point(|&s| s <= t) as f64 / reps as f64;
                let hits = alt_stats.iter().filter(|&&s| s <= t).count();
                rows.push(self.row(
                    json!({
                        "n": n, "pi0": self.cfg.pi0, "pi": mix.pi, "level": q, "threshold": t,
                        "lf_cdf": lf_cdf, "lf_se": super::binomial_se(lf_cdf, reps),
                    }),
                    hits,
                ));
            }
        }
        Ok(rows)
    }

    /// One row per measure (`P_0` first), then the average power with the gap
    /// and the bound.
    fn lemma_bound(&self) -> Result<Vec<ExperimentRow>> {
        let p = &self.cfg.lemma;
        let s = p.s.clone().unwrap_or_else(|| vec![1.0; p.n_coords]);
        let config = LemmaConfig::extremal(p.n_coords, p.m_lower, p.m_upper, p.c, s)?;
        let test = LikelihoodRatioTest::new(&config, 1.0);
        let reps = self.cfg.replications;
        let gap = lemma_power_gap(&config, &test, reps, self.cfg.seed, self.workers)?;
        let mut rows = vec![ExperimentRow::from_frequency(
            json!({"measure": "p0"}),
            gap.size,
            reps,
        )];
        for (power, j) in gap.powers.iter().zip(p.m_lower..) {
            rows.push(ExperimentRow::from_frequency(
                json!({"measure": format!("p_2^{j}"), "k": 1u64 << j}),
                *power,
                reps,
            ));
        }
        let avg = gap.powers.iter().sum::<f64>() / gap.powers.len() as f64;
        let mut row = ExperimentRow::from_frequency(
            json!({
                "measure": "average", "gap": gap.gap, "gap_se": gap.se, "bound": gap.bound,
                "c": p.c, "m": config.m(), "n_coords": p.n_coords,
            }),
            avg,
            reps,
        );
        // the average of M independent frequencies
        row.se = (gap.powers.iter().map(|q| q * (1.0 - q)).sum::<f64>() / reps as f64).sqrt()
            / gap.powers.len() as f64;
        rows.push(row);
        Ok(rows)
    }

    fn an_frequency(&self) -> Result<Vec<ExperimentRow>> {
        let d = &self.cfg.design;
        let mut rows = Vec::new();
        for (cell, &n) in self.cfg.n_values.iter().enumerate() {
            let hits = self.count(|r| {
                let mut rng = stream_rng(self.seed(cell, r), tag::DESIGN_ONLY);
                let mut abs: Vec<f64> = (0..n).map(|_| d.fx.quantile(rng.random()).abs()).collect();
                abs.sort_unstable_by(f64::total_cmp);
                Ok(an_event_sorted(&abs, d.eta))
            })?;
            rows.push(self.row(json!({"n": n, "eta": d.eta}), hits));
        }
        Ok(rows)
    }

    /// Uses `critval_reps` null draws per `n`; the row frequency is the share
    /// of null statistics within the envelope `lil_envelope sqrt(log log n)`.
    fn lil_trend(&self) -> Result<Vec<ExperimentRow>> {
        let cfg = self.cfg;
        let mut rows = Vec::new();
        for &n in &cfg.n_values {
            let spec = CritValSpec {
                n,
                alpha: cfg.alpha,
                reps: cfg.critval_reps,
                seed: cfg.seed,
                kind: StatisticKind::Point,
                design: Some(cfg.design.clone()),
            };
            let stats = simulate_null_statistics(&spec, self.workers)?;
            let cv = order_statistic_quantile(&stats, cfg.alpha)?;
            let root = (n as f64).ln().ln().sqrt();
            let limit = cfg.lil_envelope * root;
            let within = stats.iter().filter(|&&t| t <= limit).count();
            rows.push(ExperimentRow::new(
                json!({
                    "n": n, "alpha": cfg.alpha, "critical_value": cv.value, "mc_se": cv.mc_se,
                    "ratio": cv.value / root, "ratio_se": cv.mc_se / root,
                    "envelope": cfg.lil_envelope,
                    "lil_reference": lil_reference(n as u64, cfg.design.sigma_sup())?,
                }),
                within,
                cfg.critval_reps,
            ));
        }
        Ok(rows)
    }
}
