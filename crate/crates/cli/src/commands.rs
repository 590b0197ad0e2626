//! Argument parsing and the four subcommands.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use keygraph_core::analytic::{
    alpha_for, design_threshold, ell_gamma_for, lambda_for, p_link, prob_min_degree_at_least,
    solve_min_ring_size,
};
use keygraph_core::montecarlo::{
    compare_to_theory, run_experiment, ComparisonReport, ExperimentConfig, Target, TargetComparison, TrialSummary,
    DEFAULT_TRIALS,
};
use keygraph_core::sampler::{sample_graph, trial_seed, write_edge_list};
use keygraph_core::{DesignGoal, MinDegreePmf, ModelParams};

use crate::config::FileConfig;
use crate::error::CliError;
use crate::figures::{self, poisson_cutoff, FigureId, FigureSpec};

pub const WORKERS_ENV: &str = "KEYGRAPH_WORKERS";
pub const DEFAULT_SEED: u64 = 20_170_605;

#[derive(Debug, Parser)]
#[command(name = "keygraph", version, about = "Secure sensor network topology: analysis, design and simulation")]
pub struct Cli {
    /// File of `key = value` lines; flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Link probability, minimum-degree law and Poisson means.
    Analyze(AnalyzeArgs),
    /// Smallest key ring meeting a connectivity goal.
    Design(DesignArgs),
    /// Monte Carlo estimates beside the asymptotic predictions.
    Simulate(SimulateArgs),
    /// Regenerate the figure tables and charts.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct ModelArgs {
    /// Number of nodes.
    #[arg(long)]
    pub n: Option<usize>,
    /// Key ring size.
    #[arg(long = "K", value_name = "K")]
    pub ring_size: Option<usize>,
    /// Key pool size.
    #[arg(long = "P", value_name = "P")]
    pub pool_size: Option<usize>,
    /// Channel on-probability.
    #[arg(long = "p", value_name = "p")]
    pub channel_prob: Option<f64>,
    /// Required number of shared keys.
    #[arg(long)]
    pub q: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (default: $KEYGRAPH_WORKERS, else all cores).
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Minimum-degree level.
    #[arg(long, value_name = "k")]
    pub k: Option<u32>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("goal").required(true).args(["almost_sure", "prob", "exact_k"])))]
pub struct DesignArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_name = "k")]
    pub k: Option<u32>,
    /// Minimum degree at least k with probability tending to 1, margin c > 0.
    #[arg(long, value_name = "c")]
    pub almost_sure: Option<f64>,
    /// Minimum degree at least k with probability at least rho.
    #[arg(long, value_name = "rho")]
    pub prob: Option<f64>,
    /// Minimum degree exactly k or k-1, margin c in (0, 1).
    #[arg(long, value_name = "c")]
    pub exact_k: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub run: RunArgs,
    /// Estimate P[min degree >= k] (repeatable).
    #[arg(long, value_name = "k")]
    pub k: Vec<u32>,
    /// Estimate the minimum-degree pmf on 0..=MAX.
    #[arg(long, value_name = "MAX")]
    pub pmf_max_k: Option<u32>,
    /// Estimate the distribution of the number of degree-h nodes (repeatable).
    #[arg(long, value_name = "h")]
    pub phi: Vec<u32>,
    /// Write one edge list per trial into DIR.
    #[arg(long, value_name = "DIR")]
    pub dump_graphs: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureChoice {
    Fig1,
    Fig2,
    Fig3,
    All,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub fig: FigureChoice,
    #[command(flatten)]
    pub run: RunArgs,
    /// Override the smallest K of the sweep.
    #[arg(long, value_name = "K")]
    pub k_min: Option<usize>,
    /// Override the largest K of the sweep.
    #[arg(long, value_name = "K")]
    pub k_max: Option<usize>,
}

fn required<T>(flag: Option<T>, file: Option<T>, name: &str) -> Result<T, CliError> {
    flag.or(file).ok_or_else(|| CliError::Usage(format!("missing required value --{name}")))
}

fn model_params(args: &ModelArgs, file: &FileConfig, need_ring: bool) -> Result<ModelParams, CliError> {
    let n = required(args.n, file.n, "n")?;
    let ring = if need_ring {
        required(args.ring_size, file.ring_size, "K")?
    } else {
        args.ring_size.or(file.ring_size).unwrap_or(1)
    };
    let pool = required(args.pool_size, file.pool_size, "P")?;
    let p = required(args.channel_prob, file.channel_prob, "p")?;
    let q = required(args.q, file.q, "q")?;
    let ring = if need_ring { ring } else { ring.min(pool).max(1) };
    ModelParams::new(n, ring, pool, p, q).map_err(|e| CliError::Usage(e.to_string()))
}

fn env_workers() -> Result<Option<usize>, CliError> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|e| CliError::Usage(format!("{WORKERS_ENV}: {e}"))),
        _ => Ok(None),
    }
}

struct RunSettings {
    trials: u64,
    seed: u64,
    workers: usize,
    out: Option<PathBuf>,
}

fn run_settings(args: &RunArgs, file: &FileConfig) -> Result<RunSettings, CliError> {
    let workers = match args.workers.or(file.workers) {
        Some(w) => w,
        None => env_workers()?.unwrap_or(0),
    };
    Ok(RunSettings {
        trials: args.trials.or(file.trials).unwrap_or(DEFAULT_TRIALS),
        seed: args.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
        workers,
        out: args.out.clone().or_else(|| file.out.clone()),
    })
}

/// Shortest round-tripping text, in exponent form for tiny magnitudes.
pub fn num(x: f64) -> String {
    if x != 0.0 && x.abs() < 1e-4 {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

fn write_pmf(out: &mut dyn Write, pmf: &MinDegreePmf) -> Result<(), CliError> {
    for (d, prob) in &pmf.support {
        writeln!(out, "P[min_degree = {d}]: {}", num(*prob))?;
    }
    Ok(())
}

pub fn analyze(args: &AnalyzeArgs, file: &FileConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let params = model_params(&args.model, file, true)?;
    let k = required(args.k, file.k, "k")?;
    if k == 0 {
        return Err(CliError::Usage("--k must be at least 1".into()));
    }
    let probs = p_link(&params)?;
    let alpha = alpha_for(params.n, probs.p_link, k)?;
    let (ell_star, gamma_star) = ell_gamma_for(params.n, probs.p_link)?;

    writeln!(
        out,
        "model: n={} K={} P={} p={} q={}",
        params.n, params.ring_size, params.pool_size, params.channel_prob, params.q
    )?;
    writeln!(out, "p_shared: {}", num(probs.p_shared))?;
    writeln!(out, "p_link: {}", num(probs.p_link))?;
    writeln!(out, "K^2/P: {}", num(params.ring_pool_ratio()))?;
    writeln!(out, "alpha[k={k}]: {}", num(alpha))?;
    writeln!(out, "ell_star: {ell_star}")?;
    writeln!(out, "gamma_star: {}", num(gamma_star))?;
    for h in 0..=k {
        writeln!(out, "lambda[h={h}]: {}", num(lambda_for(params.n, probs.p_link, h)))?;
    }
    writeln!(out, "P[min_degree >= {k}]: {}", num(prob_min_degree_at_least(k, alpha)))?;
    write_pmf(out, &MinDegreePmf::from_level(ell_star, gamma_star))?;
    if probs.small_pool {
        writeln!(out, "warning: P < 2K, so every pair of rings overlaps in at least 2K - P keys")?;
    }
    Ok(())
}

pub fn design(args: &DesignArgs, file: &FileConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let params = model_params(&args.model, file, false)?;
    let k = required(args.k, file.k, "k")?;
    let goal = match (args.almost_sure, args.prob, args.exact_k) {
        (Some(c), None, None) => DesignGoal::AlmostSure { c },
        (None, Some(rho), None) => DesignGoal::WithProb { rho },
        (None, None, Some(c)) => DesignGoal::ExactK { c },
        _ => return Err(CliError::Usage("give exactly one of --almost-sure, --prob, --exact-k".into())),
    };
    let threshold = design_threshold(params.n, k, goal)?;
    let solution = solve_min_ring_size(params.pool_size, params.channel_prob, params.q, threshold)?;
    let chosen = params.with_ring_size(solution.ring_size);

    writeln!(
        out,
        "model: n={} P={} p={} q={} k={k}",
        params.n, params.pool_size, params.channel_prob, params.q
    )?;
    writeln!(out, "threshold: {}", num(threshold))?;
    writeln!(out, "K: {}", solution.ring_size)?;
    writeln!(out, "p_link: {}", num(solution.p_link))?;
    writeln!(out, "K^2/P: {}", num(chosen.ring_pool_ratio()))?;
    match goal {
        DesignGoal::ExactK { .. } => {
            let (ell_star, gamma_star) = ell_gamma_for(params.n, solution.p_link)?;
            writeln!(out, "ell_star: {ell_star}")?;
            write_pmf(out, &MinDegreePmf::from_level(ell_star, gamma_star))?;
        }
        _ => {
            let alpha = alpha_for(params.n, solution.p_link, k)?;
            writeln!(out, "alpha[k={k}]: {}", num(alpha))?;
            writeln!(out, "P[min_degree >= {k}]: {}", num(prob_min_degree_at_least(k, alpha)))?;
        }
    }
    Ok(())
}

fn simulate_targets(args: &SimulateArgs, file: &FileConfig, params: &ModelParams) -> Result<Vec<Target>, CliError> {
    let mut targets: Vec<Target> = if args.k.is_empty() {
        file.k.into_iter().map(|k| Target::MinDegreeAtLeast { k }).collect()
    } else {
        args.k.iter().map(|&k| Target::MinDegreeAtLeast { k }).collect()
    };
    if let Some(max_k) = args.pmf_max_k {
        targets.push(Target::MinDegreePmf { max_k });
    }
    if !args.phi.is_empty() {
        let link = p_link(params)?.p_link;
        for &h in &args.phi {
            targets.push(Target::PhiCountDist {
                h,
                max_count: poisson_cutoff(lambda_for(params.n, link, h)),
            });
        }
    }
    if targets.is_empty() {
        return Err(CliError::Usage("nothing to estimate: give --k, --pmf-max-k or --phi".into()));
    }
    Ok(targets)
}

fn print_report(out: &mut dyn Write, summary: &TrialSummary, report: &ComparisonReport) -> Result<(), CliError> {
    writeln!(out, "trials: {}", summary.trials)?;
    writeln!(out, "seed: {}", summary.base_seed)?;
    writeln!(out, "wall_time_secs: {:.3}", summary.wall_time_secs)?;
    let density = summary.results.edge_density;
    writeln!(
        out,
        "edge_density: {} (se {}), p_link {}",
        num(density.mean),
        num(density.std_error),
        num(report.p_link)
    )?;
    for cmp in &report.comparisons {
        match cmp {
            TargetComparison::MinDegreeAtLeast {
                k,
                alpha,
                empirical,
                std_error,
                analytic,
                gap,
            } => writeln!(
                out,
                "P[min_degree >= {k}]: empirical {} (se {}), analytic {} (alpha {}), gap {}",
                num(*empirical),
                num(*std_error),
                num(*analytic),
                num(*alpha),
                num(*gap)
            )?,
            TargetComparison::MinDegreePmf {
                ell_star,
                gamma_star,
                rows,
                tail,
                total_variation,
            } => {
                writeln!(out, "min_degree pmf: ell_star {ell_star}, gamma_star {}", num(*gamma_star))?;
                for r in rows {
                    writeln!(out, "  {}: empirical {}, analytic {}", r.value, num(r.empirical), num(r.analytic))?;
                }
                writeln!(out, "  above: empirical {}, analytic {}", num(tail.empirical), num(tail.analytic))?;
                writeln!(out, "  total_variation: {}", num(*total_variation))?;
            }
            TargetComparison::PhiCountDist {
                h,
                lambda,
                rows,
                tail,
                total_variation,
            } => {
                writeln!(out, "degree-{h} node count: lambda {}", num(*lambda))?;
                for r in rows.iter().filter(|r| r.empirical > 0.0 || r.analytic >= 1e-4) {
                    writeln!(out, "  {}: empirical {}, poisson {}", r.value, num(r.empirical), num(r.analytic))?;
                }
                writeln!(out, "  above: empirical {}, poisson {}", num(tail.empirical), num(tail.analytic))?;
                writeln!(out, "  total_variation: {}", num(*total_variation))?;
            }
        }
    }
    Ok(())
}

fn write_json(dir: &Path, name: &str, value: &impl serde::Serialize) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Data(e.to_string()))?;
    std::fs::write(&path, text + "\n").map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

fn dump_graphs(dir: &Path, params: &ModelParams, trials: u64, seed: u64) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    for t in 0..trials {
        let graph = sample_graph(params, trial_seed(seed, t)).map_err(|e| CliError::Usage(e.to_string()))?;
        let path = dir.join(format!("trial_{t:05}.edges"));
        let file = std::fs::File::create(&path).map_err(|e| CliError::io(&path, e))?;
        let mut w = std::io::BufWriter::new(file);
        write_edge_list(&mut w, params, &graph).map_err(|e| CliError::io(&path, e))?;
        w.flush().map_err(|e| CliError::io(&path, e))?;
    }
    Ok(())
}

pub fn simulate(args: &SimulateArgs, file: &FileConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let params = model_params(&args.model, file, true)?;
    let run = run_settings(&args.run, file)?;
    let targets = simulate_targets(args, file, &params)?;
    let cfg = ExperimentConfig::new(params, run.trials, run.seed, targets).with_workers(run.workers);
    let summary = run_experiment(&cfg)?;
    let report = compare_to_theory(&summary, &params)?;
    print_report(out, &summary, &report)?;
    if let Some(dir) = &run.out {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let s = write_json(dir, "summary.json", &summary)?;
        let c = write_json(dir, "comparison.json", &report)?;
        writeln!(out, "wrote {}", s.display())?;
        writeln!(out, "wrote {}", c.display())?;
    }
    if let Some(dir) = &args.dump_graphs {
        dump_graphs(dir, &params, run.trials, run.seed)?;
        writeln!(out, "wrote {} edge lists to {}", run.trials, dir.display())?;
    }
    Ok(())
}

pub fn reproduce(args: &ReproduceArgs, file: &FileConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let run = run_settings(&args.run, file)?;
    let out_dir = run.out.clone().unwrap_or_else(|| PathBuf::from("figures"));
    let ids: Vec<FigureId> = match args.fig {
        FigureChoice::Fig1 => vec![FigureId::Fig1],
        FigureChoice::Fig2 => vec![FigureId::Fig2],
        FigureChoice::Fig3 => vec![FigureId::Fig3],
        FigureChoice::All => FigureId::ALL.to_vec(),
    };
    for id in ids {
        let mut spec = FigureSpec::new(id, run.trials, run.seed, &out_dir);
        spec.workers = run.workers;
        if args.k_min.is_some() || args.k_max.is_some() {
            let defaults = id.default_ring_sizes();
            let lo = args.k_min.unwrap_or(defaults[0]);
            let hi = args.k_max.unwrap_or(defaults[defaults.len() - 1]);
            spec.ring_sizes = (lo..=hi).collect();
        }
        let (table, csv, svg) = figures::reproduce(&spec)?;
        writeln!(
            out,
            "{id}: {} rows -> {}, {}",
            table.rows.len(),
            csv.display(),
            svg.display()
        )?;
    }
    Ok(())
}

/// Executes a parsed command line, writing the report to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    match &cli.command {
        Command::Analyze(a) => analyze(a, &file, out),
        Command::Design(a) => design(a, &file, out),
        Command::Simulate(a) => simulate(a, &file, out),
        Command::Reproduce(a) => reproduce(a, &file, out),
    }
}
