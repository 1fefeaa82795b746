//! `gros` experiment driver: seeded replicate loops over the application
//! studies, deterministic CSV output, optional SVG summary plots.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 runtime
//! failure.

mod config;
mod experiments;
mod records;
mod summary;

use std::io::Write;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, ValueEnum};

use config::{ConfigError, Experiment, RunConfig};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ExperimentArg {
    CoreCheck,
    Kmeans,
    Bandits,
    Regression,
    Sets,
    Tda,
}

impl From<ExperimentArg> for Experiment {
    fn from(value: ExperimentArg) -> Self {
        match value {
            ExperimentArg::CoreCheck => Experiment::CoreCheck,
            ExperimentArg::Kmeans => Experiment::Kmeans,
            ExperimentArg::Bandits => Experiment::Bandits,
            ExperimentArg::Regression => Experiment::Regression,
            ExperimentArg::Sets => Experiment::Sets,
            ExperimentArg::Tda => Experiment::Tda,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "gros", about = "Robust-aggregation simulation studies", version)]
struct Cli {
    /// Experiment to run.
    #[arg(value_enum)]
    experiment: ExperimentArg,
    /// Number of replicates.
    #[arg(long)]
    replicates: Option<usize>,
    /// Base seed; replicate streams derive from (seed, replicate).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for the replicate loop.
    #[arg(long)]
    parallelism: Option<usize>,
    /// Flat key=value config file, applied before the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV path.
    #[arg(long, default_value = "results.csv")]
    out: PathBuf,
    /// Optional SVG plot path.
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Number of aggregation groups K.
    #[arg(long)]
    k_groups: Option<usize>,
    /// Failure probability delta of the concentration check.
    #[arg(long)]
    delta: Option<f64>,
    /// Contamination fraction of the ring mixture.
    #[arg(long)]
    lambda: Option<f64>,
    /// Bandit horizon T.
    #[arg(long)]
    horizon: Option<usize>,
    /// Bandit warm-up length t0.
    #[arg(long)]
    warmup: Option<usize>,
    /// Kernel bandwidth h.
    #[arg(long)]
    bandwidth: Option<f64>,
    /// Skew-t scale sigma.
    #[arg(long)]
    sigma: Option<f64>,
    /// Skew-t skewness xi.
    #[arg(long)]
    xi: Option<f64>,
    /// Rips filtration threshold.
    #[arg(long)]
    threshold: Option<f64>,
}

fn build_config(cli: &Cli) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::defaults(cli.experiment.into());
    if let Some(path) = &cli.config {
        cfg.load_file(path)?;
    }
    macro_rules! apply {
        ($($field:ident),*) => {
            $(if let Some(v) = cli.$field { cfg.$field = v; })*
        };
    }
    apply!(replicates, seed, parallelism, k_groups, delta, lambda, horizon, warmup, bandwidth, sigma, xi, threshold);
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = build_config(cli)?;
    let records = experiments::run_experiment(&cfg)?;

    let mut csv = Vec::new();
    records::write_csv(&records, &mut csv)?;
    std::fs::write(&cli.out, &csv)
        .with_context(|| format!("cannot write {}", cli.out.display()))?;

    let rows = summary::summarize(&records)?;
    let table = if cfg.experiment == Experiment::Bandits {
        // The per-round metrics would flood the table; summarize the final
        // round only.
        let last: Vec<records::Record> = records
            .iter()
            .filter(|r| {
                r.metric == format!("cumulative_reward_t{}", cfg.horizon)
                    || r.metric == format!("pseudo_regret_t{}", cfg.horizon)
            })
            .cloned()
            .collect();
        summary::render_table(&summary::summarize(&last)?)
    } else {
        summary::render_table(&rows)
    };
    let mut stdout = std::io::stdout().lock();
    write!(stdout, "{table}")?;

    if let Some(plot) = &cli.plot {
        let svg = if cfg.experiment == Experiment::Bandits {
            summary::render_mean_curves(&records)?
        } else {
            summary::render_box_plots(&rows)
        };
        std::fs::write(plot, svg)
            .with_context(|| format!("cannot write {}", plot.display()))?;
    }
    Ok(())
}

fn main() {
    // Clap reports usage problems with exit code 2 on its own.
    let cli = Cli::parse();
    if let Err(err) = run(&cli) {
        eprintln!("error: {err:#}");
        let code = if err.is::<ConfigError>() { 2 } else { 3 };
        std::process::exit(code);
    }
}
