//! Repeated-trial estimation of minimum-degree and degree-count laws.
//!
//! Trial `t` samples its graph from [`trial_seed`]`(base_seed, t)`, so any
//! single trial can be replayed in isolation. Per-trial observations are folded
//! into integer histograms and merged associatively; the summary is therefore
//! identical for every worker count.

use std::collections::BTreeMap;
use std::panic::{self, AssertUnwindSafe};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{
    alpha_for, ell_gamma_for, lambda_for, p_link, poisson_pmf, prob_min_degree_at_least, MinDegreePmf, ModelParams,
};
use crate::error::{AnalyticError, MonteCarloError};
use crate::metrics::degree_stats;
use crate::sampler::{sample_graph, trial_seed};

/// Trial count used for the published experiments.
pub const DEFAULT_TRIALS: u64 = 2000;

/// An observable to estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Target {
    /// `P[δ >= k]`.
    MinDegreeAtLeast { k: u32 },
    /// Distribution of `δ`; the comparison covers `0..=max_k` plus a tail.
    MinDegreePmf { max_k: u32 },
    /// Distribution of `Φ_{n,h}`; the comparison covers `0..=max_count` plus a tail.
    PhiCountDist { h: u32, max_count: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub params: ModelParams<f64>,
    pub trials: u64,
    pub base_seed: u64,
    pub targets: Vec<Target>,
    /// Index of the first trial; a run covers `first_trial..first_trial + trials`.
    #[serde(default)]
    pub first_trial: u64,
    /// Worker threads; 0 uses the ambient rayon pool.
    pub workers: usize,
}

impl ExperimentConfig {
    pub fn new(params: ModelParams<f64>, trials: u64, base_seed: u64, targets: Vec<Target>) -> Self {
        Self {
            params,
            trials,
            base_seed,
            targets,
            first_trial: 0,
            workers: 0,
        }
    }

    /// Restricts the run to trials `first..first + trials` of the same schedule.
    pub fn starting_at(mut self, first: u64) -> Self {
        self.first_trial = first;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    fn phi_degrees(&self) -> Vec<u32> {
        let mut hs: Vec<u32> = self
            .targets
            .iter()
            .filter_map(|t| match t {
                Target::PhiCountDist { h, .. } => Some(*h),
                _ => None,
            })
            .collect();
        hs.sort_unstable();
        hs.dedup();
        hs
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PmfPoint {
    pub value: u32,
    pub count: u64,
    /// `count / trials`.
    pub estimate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TargetEstimate {
    MinDegreeAtLeast {
        k: u32,
        count: u64,
        estimate: f64,
        std_error: f64,
    },
    MinDegreePmf {
        max_k: u32,
        /// Every observed minimum degree, ascending.
        pmf: Vec<PmfPoint>,
    },
    PhiCountDist {
        h: u32,
        max_count: u32,
        /// Every observed value of `Φ_{n,h}`, ascending.
        pmf: Vec<PmfPoint>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    /// Mean over trials of `edges / (n(n-1)/2)`.
    pub mean: f64,
    /// Standard error of that mean.
    pub std_error: f64,
}

/// Everything in a summary that is a function of the configuration alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResults {
    pub estimates: Vec<TargetEstimate>,
    /// Minimum-degree histogram over all trials.
    pub min_degree_counts: BTreeMap<u32, u64>,
    pub edge_density: DensityEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub params: ModelParams<f64>,
    pub trials: u64,
    pub base_seed: u64,
    pub results: TrialResults,
    pub wall_time_secs: f64,
}

/// Normal-approximation standard error of a proportion.
pub fn proportion_std_error(estimate: f64, trials: u64) -> f64 {
    (estimate * (1.0 - estimate) / trials as f64).sqrt()
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct Tally {
    min_degree: BTreeMap<u32, u64>,
    /// Parallel to `ExperimentConfig::phi_degrees`.
    phi: Vec<BTreeMap<u32, u64>>,
    edge_sum: u128,
    edge_sq_sum: u128,
}

struct TrialObservation {
    min_degree: u32,
    phi: Vec<u32>,
    edges: u64,
}

impl Tally {
    fn empty(phi_slots: usize) -> Self {
        Self {
            phi: vec![BTreeMap::new(); phi_slots],
            ..Self::default()
        }
    }

    fn record(mut self, obs: TrialObservation) -> Self {
        *self.min_degree.entry(obs.min_degree).or_insert(0) += 1;
        for (hist, value) in self.phi.iter_mut().zip(obs.phi) {
            *hist.entry(value).or_insert(0) += 1;
        }
        self.edge_sum += u128::from(obs.edges);
        self.edge_sq_sum += u128::from(obs.edges) * u128::from(obs.edges);
        self
    }

    fn merge(mut self, other: Self) -> Self {
        for (d, c) in other.min_degree {
            *self.min_degree.entry(d).or_insert(0) += c;
        }
        for (mine, theirs) in self.phi.iter_mut().zip(other.phi) {
            for (v, c) in theirs {
                *mine.entry(v).or_insert(0) += c;
            }
        }
        self.edge_sum += other.edge_sum;
        self.edge_sq_sum += other.edge_sq_sum;
        self
    }
}

fn panic_message(payload: Box<dyn std::any::Any + Send>) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        (*s).to_string()
    } else if let Some(s) = payload.downcast_ref::<String>() {
        s.clone()
    } else {
        "panic".to_string()
    }
}

fn observe(cfg: &ExperimentConfig, phi_degrees: &[u32], trial: u64) -> Result<TrialObservation, MonteCarloError> {
    let seed = trial_seed(cfg.base_seed, trial);
    let outcome = panic::catch_unwind(AssertUnwindSafe(|| {
        let graph = sample_graph(&cfg.params, seed)?;
        let stats = degree_stats(&graph);
        Ok::<_, crate::error::ParamError>(TrialObservation {
            min_degree: stats.min_degree,
            phi: phi_degrees.iter().map(|&h| stats.count_with_degree(h)).collect(),
            edges: graph.edge_count() as u64,
        })
    }));
    match outcome {
        Ok(Ok(obs)) => Ok(obs),
        Ok(Err(e)) => Err(MonteCarloError::Trial {
            index: trial,
            reason: e.to_string(),
        }),
        Err(payload) => Err(MonteCarloError::Trial {
            index: trial,
            reason: panic_message(payload),
        }),
    }
}

fn histogram_pmf(hist: &BTreeMap<u32, u64>, trials: u64) -> Vec<PmfPoint> {
    hist.iter()
        .map(|(&value, &count)| PmfPoint {
            value,
            count,
            estimate: count as f64 / trials as f64,
        })
        .collect()
}

fn summarise(cfg: &ExperimentConfig, phi_degrees: &[u32], tally: Tally) -> TrialResults {
    let trials = cfg.trials;
    let estimates = cfg
        .targets
        .iter()
        .map(|target| match *target {
            Target::MinDegreeAtLeast { k } => {
                let count: u64 = tally.min_degree.range(k..).map(|(_, c)| c).sum();
                let estimate = count as f64 / trials as f64;
                TargetEstimate::MinDegreeAtLeast {
                    k,
                    count,
                    estimate,
                    std_error: proportion_std_error(estimate, trials),
                }
            }
            Target::MinDegreePmf { max_k } => TargetEstimate::MinDegreePmf {
                max_k,
                pmf: histogram_pmf(&tally.min_degree, trials),
            },
            Target::PhiCountDist { h, max_count } => {
                let slot = phi_degrees.binary_search(&h).expect("phi degree registered");
                TargetEstimate::PhiCountDist {
                    h,
                    max_count,
                    pmf: histogram_pmf(&tally.phi[slot], trials),
                }
            }
        })
        .collect();

    let n = cfg.params.n as f64;
    let pairs = n * (n - 1.0) / 2.0;
    let t = trials as f64;
    let mean_edges = tally.edge_sum as f64 / t;
    let var_edges = if trials > 1 {
        let centered = tally.edge_sq_sum as f64 - t * mean_edges * mean_edges;
        (centered / (t - 1.0)).max(0.0)
    } else {
        0.0
    };
    TrialResults {
        estimates,
        min_degree_counts: tally.min_degree,
        edge_density: DensityEstimate {
            mean: mean_edges / pairs,
            std_error: (var_edges / t).sqrt() / pairs,
        },
    }
}

/// Runs `cfg.trials` independent trials and aggregates the requested targets.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<TrialSummary, MonteCarloError> {
    cfg.params.validate()?;
    if cfg.trials == 0 {
        return Err(MonteCarloError::Config("at least one trial is required".into()));
    }
    if cfg.targets.is_empty() {
        return Err(MonteCarloError::Config("no targets requested".into()));
    }

    let started = Instant::now();
    let phi_degrees = cfg.phi_degrees();
    let slots = phi_degrees.len();
    let work = || {
        (cfg.first_trial..cfg.first_trial + cfg.trials)
            .into_par_iter()
            .map(|t| observe(cfg, &phi_degrees, t))
            .try_fold(|| Tally::empty(slots), |acc, obs| obs.map(|o| acc.record(o)))
            .try_reduce(|| Tally::empty(slots), |a, b| Ok(a.merge(b)))
    };
    let tally = if cfg.workers == 0 {
        work()?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| MonteCarloError::Pool(e.to_string()))?
            .install(work)?
    };

    Ok(TrialSummary {
        params: cfg.params,
        trials: cfg.trials,
        base_seed: cfg.base_seed,
        results: summarise(cfg, &phi_degrees, tally),
        wall_time_secs: started.elapsed().as_secs_f64(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PmfComparisonRow {
    pub value: u32,
    pub empirical: f64,
    pub analytic: f64,
    /// `|empirical - analytic|`.
    pub gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailMass {
    pub empirical: f64,
    pub analytic: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TargetComparison {
    MinDegreeAtLeast {
        k: u32,
        alpha: f64,
        empirical: f64,
        std_error: f64,
        analytic: f64,
        gap: f64,
    },
    MinDegreePmf {
        ell_star: i64,
        gamma_star: f64,
        rows: Vec<PmfComparisonRow>,
        /// Mass above `max_k`.
        tail: TailMass,
        total_variation: f64,
    },
    PhiCountDist {
        h: u32,
        lambda: f64,
        rows: Vec<PmfComparisonRow>,
        /// Mass above `max_count`.
        tail: TailMass,
        total_variation: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub p_link: f64,
    pub comparisons: Vec<TargetComparison>,
}

fn compare_pmf(pmf: &[PmfPoint], upto: u32, analytic: impl Fn(u32) -> f64) -> (Vec<PmfComparisonRow>, TailMass, f64) {
    let empirical_at = |v: u32| pmf.iter().find(|p| p.value == v).map_or(0.0, |p| p.estimate);
    let rows: Vec<PmfComparisonRow> = (0..=upto)
        .map(|value| {
            let e = empirical_at(value);
            let a = analytic(value);
            PmfComparisonRow {
                value,
                empirical: e,
                analytic: a,
                gap: (e - a).abs(),
            }
        })
        .collect();
    let tail = TailMass {
        empirical: pmf.iter().filter(|p| p.value > upto).fold(0.0, |acc, p| acc + p.estimate),
        analytic: (1.0 - rows.iter().map(|r| r.analytic).sum::<f64>()).max(0.0),
    };
    let total_variation = 0.5 * (rows.iter().map(|r| r.gap).sum::<f64>() + (tail.empirical - tail.analytic).abs());
    (rows, tail, total_variation)
}

/// Sets each estimate beside its asymptotic prediction.
pub fn compare_to_theory(summary: &TrialSummary, params: &ModelParams<f64>) -> Result<ComparisonReport, AnalyticError> {
    let probs = p_link(params)?;
    let n = params.n;
    let (ell_star, gamma_star) = ell_gamma_for(n, probs.p_link)?;
    let limit_pmf = MinDegreePmf::from_level(ell_star, gamma_star);

    let mut comparisons = Vec::with_capacity(summary.results.estimates.len());
    for estimate in &summary.results.estimates {
        let cmp = match estimate {
            TargetEstimate::MinDegreeAtLeast {
                k,
                estimate,
                std_error,
                ..
            } => {
                let (alpha, analytic) = if *k == 0 {
                    (f64::INFINITY, 1.0)
                } else {
                    let alpha = alpha_for(n, probs.p_link, *k)?;
                    (alpha, prob_min_degree_at_least(*k, alpha))
                };
                TargetComparison::MinDegreeAtLeast {
                    k: *k,
                    alpha,
                    empirical: *estimate,
                    std_error: *std_error,
                    analytic,
                    gap: (estimate - analytic).abs(),
                }
            }
            TargetEstimate::MinDegreePmf { max_k, pmf } => {
                let (rows, tail, total_variation) = compare_pmf(pmf, *max_k, |d| limit_pmf.prob(u64::from(d)));
                TargetComparison::MinDegreePmf {
                    ell_star,
                    gamma_star,
                    rows,
                    tail,
                    total_variation,
                }
            }
            TargetEstimate::PhiCountDist { h, max_count, pmf } => {
                let lambda = lambda_for(n, probs.p_link, *h);
                let (rows, tail, total_variation) = compare_pmf(pmf, *max_count, |m| poisson_pmf(lambda, u64::from(m)));
                TargetComparison::PhiCountDist {
                    h: *h,
                    lambda,
                    rows,
                    tail,
                    total_variation,
                }
            }
        };
        comparisons.push(cmp);
    }
    Ok(ComparisonReport {
        p_link: probs.p_link,
        comparisons,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize, k: usize, pool: usize, p: f64, q: usize) -> ModelParams<f64> {
        ModelParams::new(n, k, pool, p, q).unwrap()
    }

    #[test]
    fn edgeless_model() {
        let cfg = ExperimentConfig::new(params(50, 3, 30, 0.0, 1), 10, 1, vec![Target::MinDegreeAtLeast { k: 1 }]);
        let summary = run_experiment(&cfg).unwrap();
        match &summary.results.estimates[0] {
            TargetEstimate::MinDegreeAtLeast { count, estimate, .. } => {
                assert_eq!(*count, 0);
                assert_eq!(*estimate, 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
        let report = compare_to_theory(&summary, &cfg.params).unwrap();
        match &report.comparisons[0] {
            TargetComparison::MinDegreeAtLeast { analytic, gap, alpha, .. } => {
                assert_eq!(*alpha, f64::NEG_INFINITY);
                assert_eq!(*analytic, 0.0);
                assert_eq!(*gap, 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn complete_model() {
        let n = 20;
        let cfg = ExperimentConfig::new(
            params(n, 5, 5, 1.0, 1),
            8,
            3,
            vec![Target::MinDegreeAtLeast { k: n as u32 - 1 }],
        );
        let summary = run_experiment(&cfg).unwrap();
        assert!(matches!(
            summary.results.estimates[0],
            TargetEstimate::MinDegreeAtLeast { estimate, std_error, .. } if estimate == 1.0 && std_error == 0.0
        ));
        assert_eq!(summary.results.edge_density.mean, 1.0);
    }

    #[test]
    fn rejects_empty_configs() {
        let prm = params(10, 2, 10, 0.5, 1);
        assert!(matches!(
            run_experiment(&ExperimentConfig::new(prm, 0, 0, vec![Target::MinDegreeAtLeast { k: 1 }])),
            Err(MonteCarloError::Config(_))
        ));
        assert!(matches!(
            run_experiment(&ExperimentConfig::new(prm, 5, 0, vec![])),
            Err(MonteCarloError::Config(_))
        ));
    }

    #[test]
    fn oversized_model_names_the_trial() {
        // passes model validation but not the 32-bit id range
        let prm = ModelParams {
            n: 3,
            ring_size: 1,
            pool_size: u32::MAX as usize + 2,
            channel_prob: 0.5,
            q: 1,
        };
        let err = run_experiment(&ExperimentConfig::new(prm, 1, 0, vec![Target::MinDegreeAtLeast { k: 1 }])).unwrap_err();
        match err {
            MonteCarloError::Trial { index, reason } => {
                assert_eq!(index, 0);
                assert!(reason.contains("pool"), "{reason}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn perfect_match_has_zero_gaps() {
        let prm = params(200, 4, 100, 0.9, 2);
        let probs = p_link(&prm).unwrap();
        let lambda = lambda_for(prm.n, probs.p_link, 1);
        // a synthetic summary whose pmf is exactly the Poisson law on a grid of 1/1024
        let trials = 1024u64;
        let pmf: Vec<PmfPoint> = (0..=6u32)
            .map(|m| PmfPoint {
                value: m,
                count: 0,
                estimate: poisson_pmf(lambda, u64::from(m)),
            })
            .collect();
        let summary = TrialSummary {
            params: prm,
            trials,
            base_seed: 0,
            results: TrialResults {
                estimates: vec![TargetEstimate::PhiCountDist { h: 1, max_count: 6, pmf }],
                min_degree_counts: BTreeMap::new(),
                edge_density: DensityEstimate { mean: 0.0, std_error: 0.0 },
            },
            wall_time_secs: 0.0,
        };
        let report = compare_to_theory(&summary, &prm).unwrap();
        match &report.comparisons[0] {
            TargetComparison::PhiCountDist { rows, .. } => assert!(rows.iter().all(|r| r.gap == 0.0)),
            other => panic!("unexpected {other:?}"),
        }
    }
}
