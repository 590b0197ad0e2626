//! Figure reproduction: parameter grids, CSV tables and charts.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use keygraph_core::analytic::{lambda_for, min_degree_pmf_asymptotic, p_link, poisson_pmf};
use keygraph_core::montecarlo::{
    compare_to_theory, run_experiment, ExperimentConfig, Target, TargetComparison, TargetEstimate, TrialSummary,
};
use keygraph_core::ModelParams;

use crate::chart::{render_svg, ChartLayout};
use crate::error::CliError;
use crate::table::{sig6, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    Fig1,
    Fig2,
    Fig3,
}

impl FigureId {
    pub const ALL: [FigureId; 3] = [FigureId::Fig1, FigureId::Fig2, FigureId::Fig3];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig1 => "fig1",
            FigureId::Fig2 => "fig2",
            FigureId::Fig3 => "fig3",
        }
    }

    pub fn default_ring_sizes(self) -> Vec<usize> {
        match self {
            FigureId::Fig1 => (29..=36).collect(),
            FigureId::Fig2 => (28..=42).collect(),
            FigureId::Fig3 => vec![35],
        }
    }

    /// `(n, P, p, q)` of the figure.
    pub fn model(self) -> (usize, usize, f64, usize) {
        match self {
            FigureId::Fig1 => (2000, 10_000, 0.8, 2),
            FigureId::Fig2 | FigureId::Fig3 => (3000, 10_000, 0.5, 2),
        }
    }

    pub fn header(self) -> &'static [&'static str] {
        match self {
            FigureId::Fig1 => &["k", "K", "empirical", "analytic", "se"],
            FigureId::Fig2 => &["k", "K", "empirical", "analytic"],
            FigureId::Fig3 => &["h", "M", "empirical", "poisson"],
        }
    }

    pub fn layout(self) -> ChartLayout {
        match self {
            FigureId::Fig1 => ChartLayout {
                title: "P[min degree >= k] (n=2000, q=2, P=10000, p=0.8)".into(),
                x_col: "K",
                x_label: "key ring size K",
                y_label: "probability",
                group_col: "k",
                series: vec![("empirical", "(E)"), ("analytic", "(A)")],
            },
            FigureId::Fig2 => ChartLayout {
                title: "P[min degree = k] (n=3000, q=2, P=10000, p=0.5)".into(),
                x_col: "K",
                x_label: "key ring size K",
                y_label: "probability",
                group_col: "k",
                series: vec![("empirical", "(E)"), ("analytic", "(A)")],
            },
            FigureId::Fig3 => ChartLayout {
                title: "P[nodes of degree h = M] (n=3000, q=2, K=35, P=10000, p=0.5)".into(),
                x_col: "M",
                x_label: "number of nodes M",
                y_label: "probability",
                group_col: "h",
                series: vec![("empirical", "(E)"), ("poisson", "(A)")],
            },
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FigureId {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fig1" => Ok(FigureId::Fig1),
            "fig2" => Ok(FigureId::Fig2),
            "fig3" => Ok(FigureId::Fig3),
            other => Err(CliError::Usage(format!("unknown figure `{other}` (expected fig1, fig2 or fig3)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureSpec {
    pub id: FigureId,
    pub ring_sizes: Vec<usize>,
    pub trials: u64,
    pub base_seed: u64,
    /// 0 means the global rayon pool.
    pub workers: usize,
    pub out_dir: PathBuf,
}

impl FigureSpec {
    pub fn new(id: FigureId, trials: u64, base_seed: u64, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            id,
            ring_sizes: id.default_ring_sizes(),
            trials,
            base_seed,
            workers: 0,
            out_dir: out_dir.into(),
        }
    }

    pub fn params(&self, ring_size: usize) -> Result<ModelParams, CliError> {
        let (n, pool, p, q) = self.id.model();
        ModelParams::new(n, ring_size, pool, p, q).map_err(|e| CliError::Usage(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.ring_sizes.is_empty() {
            return Err(CliError::Usage(format!("{}: empty K grid", self.id)));
        }
        if self.trials == 0 {
            return Err(CliError::Usage("at least one trial is required".into()));
        }
        for &k in &self.ring_sizes {
            self.params(k)?;
        }
        Ok(())
    }

    pub fn csv_path(&self) -> PathBuf {
        self.out_dir.join(format!("{}.csv", self.id))
    }

    pub fn svg_path(&self) -> PathBuf {
        self.out_dir.join(format!("{}.svg", self.id))
    }

    fn run(&self, ring_size: usize, targets: Vec<Target>) -> Result<TrialSummary, CliError> {
        let cfg = ExperimentConfig::new(self.params(ring_size)?, self.trials, self.base_seed, targets)
            .with_workers(self.workers);
        Ok(run_experiment(&cfg)?)
    }
}

pub const FIG1_DEGREES: [u32; 2] = [4, 8];
pub const FIG2_MAX_K: u32 = 5;
pub const FIG3_DEGREES: [u32; 3] = [0, 1, 2];

/// Upper end of the Poisson support tabulated for mean `lambda`.
pub fn poisson_cutoff(lambda: f64) -> u32 {
    (lambda + 10.0 * lambda.sqrt() + 10.0).ceil() as u32
}

fn figure1(spec: &FigureSpec) -> Result<Table, CliError> {
    let mut points = Vec::new();
    for &ring in &spec.ring_sizes {
        let targets = FIG1_DEGREES.iter().map(|&k| Target::MinDegreeAtLeast { k }).collect();
        let summary = spec.run(ring, targets)?;
        let report = compare_to_theory(&summary, &summary.params)?;
        for cmp in report.comparisons {
            if let TargetComparison::MinDegreeAtLeast {
                k,
                empirical,
                std_error,
                analytic,
                ..
            } = cmp
            {
                points.push((k, ring, empirical, analytic, std_error));
            }
        }
    }
    points.sort_by_key(|p| (p.0, p.1));
    let mut table = Table::new(FigureId::Fig1.header());
    for (k, ring, e, a, se) in points {
        table.push(vec![k.to_string(), ring.to_string(), sig6(e), sig6(a), sig6(se)]);
    }
    Ok(table)
}

fn figure2(spec: &FigureSpec) -> Result<Table, CliError> {
    let mut points = Vec::new();
    for &ring in &spec.ring_sizes {
        let summary = spec.run(ring, vec![Target::MinDegreePmf { max_k: FIG2_MAX_K }])?;
        let limit = min_degree_pmf_asymptotic(&summary.params)?;
        let TargetEstimate::MinDegreePmf { pmf, .. } = &summary.results.estimates[0] else {
            unreachable!("single pmf target");
        };
        for k in 0..=FIG2_MAX_K {
            let empirical = pmf.iter().find(|p| p.value == k).map_or(0.0, |p| p.estimate);
            points.push((k, ring, empirical, limit.prob(u64::from(k))));
        }
    }
    points.sort_by_key(|p| (p.0, p.1));
    let mut table = Table::new(FigureId::Fig2.header());
    for (k, ring, e, a) in points {
        table.push(vec![k.to_string(), ring.to_string(), sig6(e), sig6(a)]);
    }
    Ok(table)
}

fn figure3(spec: &FigureSpec) -> Result<Table, CliError> {
    let ring = spec.ring_sizes[0];
    let params = spec.params(ring)?;
    let link = p_link(&params)?.p_link;
    let lambdas: Vec<f64> = FIG3_DEGREES.iter().map(|&h| lambda_for(params.n, link, h)).collect();
    let targets = FIG3_DEGREES
        .iter()
        .zip(&lambdas)
        .map(|(&h, &l)| Target::PhiCountDist {
            h,
            max_count: poisson_cutoff(l),
        })
        .collect();
    let summary = spec.run(ring, targets)?;
    let mut table = Table::new(FigureId::Fig3.header());
    for (est, &lambda) in summary.results.estimates.iter().zip(&lambdas) {
        let TargetEstimate::PhiCountDist { h, max_count, pmf } = est else {
            unreachable!("phi targets only");
        };
        let upper = pmf.last().map_or(*max_count, |p| p.value.max(*max_count));
        for m in 0..=upper {
            let empirical = pmf.iter().find(|p| p.value == m).map_or(0.0, |p| p.estimate);
            table.push(vec![
                h.to_string(),
                m.to_string(),
                sig6(empirical),
                sig6(poisson_pmf(lambda, u64::from(m))),
            ]);
        }
    }
    Ok(table)
}

/// Runs the experiments behind a figure and tabulates them.
pub fn compute_table(spec: &FigureSpec) -> Result<Table, CliError> {
    spec.validate()?;
    match spec.id {
        FigureId::Fig1 => figure1(spec),
        FigureId::Fig2 => figure2(spec),
        FigureId::Fig3 => figure3(spec),
    }
}

/// Renders the chart for a table previously written by [`write_outputs`].
pub fn render_from_csv(id: FigureId, csv: &Path) -> Result<String, CliError> {
    render_svg(&Table::read_path(csv)?, &id.layout())
}

/// Writes `<id>.csv`, then renders `<id>.svg` from the file just written.
pub fn write_outputs(spec: &FigureSpec, table: &Table) -> Result<(PathBuf, PathBuf), CliError> {
    std::fs::create_dir_all(&spec.out_dir).map_err(|e| CliError::io(&spec.out_dir, e))?;
    let csv = spec.csv_path();
    let file = std::fs::File::create(&csv).map_err(|e| CliError::io(&csv, e))?;
    table.write_to(file)?;
    let svg_text = render_from_csv(spec.id, &csv)?;
    let svg = spec.svg_path();
    std::fs::write(&svg, svg_text).map_err(|e| CliError::io(&svg, e))?;
    Ok((csv, svg))
}

pub fn reproduce(spec: &FigureSpec) -> Result<(Table, PathBuf, PathBuf), CliError> {
    let table = compute_table(spec)?;
    let (csv, svg) = write_outputs(spec, &table)?;
    Ok((table, csv, svg))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure_ids_parse() {
        for id in FigureId::ALL {
            assert_eq!(id.name().parse::<FigureId>().unwrap(), id);
        }
        assert!(matches!("fig4".parse::<FigureId>(), Err(CliError::Usage(_))));
    }

    #[test]
    fn caption_grids() {
        assert_eq!(FigureId::Fig1.default_ring_sizes(), (29..=36).collect::<Vec<_>>());
        assert_eq!(FigureId::Fig3.default_ring_sizes(), vec![35]);
        assert_eq!(FigureId::Fig1.model(), (2000, 10_000, 0.8, 2));
    }

    #[test]
    fn poisson_cutoff_covers_the_bulk() {
        assert_eq!(poisson_cutoff(0.0), 10);
        assert_eq!(poisson_cutoff(4.0), 34);
    }

    #[test]
    fn empty_grid_is_rejected() {
        let mut spec = FigureSpec::new(FigureId::Fig1, 10, 1, "unused");
        spec.ring_sizes.clear();
        assert!(matches!(spec.validate(), Err(CliError::Usage(_))));
    }
}
