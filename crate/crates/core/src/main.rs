use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use neyman_lab::harness::{
    clip_time_experiment, emit_csv, emit_plots, predict_clip_rows, variance_comparison, with_workers,
    write_prediction_csv, ExperimentConfig, ExperimentResult, DEFAULT_ALPHAS,
};

#[derive(Parser)]
#[command(name = "neyman-lab", version, about = "Adaptive Neyman allocation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment description (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Worker threads; results do not depend on this.
    #[arg(long, env = "NEYMAN_LAB_WORKERS")]
    workers: Option<usize>,
    /// Overrides the seed in the config file.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the output directory in the config file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Variance comparison, clipping-time prediction and clipping-time ratios.
    Run(Common),
    /// Variance of the ATE estimate across strategies and horizons.
    Compare(Common),
    /// Predicted over empirical clipping time across guard exponents.
    ClipRatio {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        alphas: Option<Vec<f64>>,
    },
    /// Print the theoretical clipping-phase bounds as CSV.
    PredictClip {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 1.0 / 3.0)]
        alpha: f64,
    },
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::load(&self.config)?;
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
        Ok(cfg)
    }
}

fn alphas_for(cfg: &ExperimentConfig, flag: Option<Vec<f64>>) -> Vec<f64> {
    flag.or_else(|| cfg.alphas.clone())
        .unwrap_or_else(|| DEFAULT_ALPHAS.to_vec())
}

fn write(cfg: &ExperimentConfig, result: &ExperimentResult) -> Result<()> {
    let mut paths = emit_csv(result, &cfg.output_dir)?;
    paths.extend(emit_plots(result, &cfg.output_dir)?);
    for p in paths {
        eprintln!("wrote {}", p.display());
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Compare(common) => {
            let cfg = common.load()?;
            let result = with_workers(common.workers, || variance_comparison(&cfg))??;
            write(&cfg, &result)?;
        }
        Command::ClipRatio { common, alphas } => {
            let cfg = common.load()?;
            let alphas = alphas_for(&cfg, alphas);
            let result = with_workers(common.workers, || clip_time_experiment(&cfg, &alphas))??;
            write(&cfg, &result)?;
        }
        Command::Run(common) => {
            let cfg = common.load()?;
            let alphas = alphas_for(&cfg, None);
            let mut result = with_workers(common.workers, || variance_comparison(&cfg))??;
            result.clip_rows = with_workers(common.workers, || clip_time_experiment(&cfg, &alphas))??.clip_rows;
            std::fs::create_dir_all(&cfg.output_dir)
                .with_context(|| format!("creating {}", cfg.output_dir.display()))?;
            let path = cfg.output_dir.join("prediction.csv");
            let file = std::fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
            write_prediction_csv(file, &predict_clip_rows(&cfg, 1.0 / 3.0)?)?;
            eprintln!("wrote {}", path.display());
            write(&cfg, &result)?;
        }
        Command::PredictClip { config, alpha } => {
            let cfg = ExperimentConfig::load(&config)?;
            write_prediction_csv(std::io::stdout().lock(), &predict_clip_rows(&cfg, alpha)?)?;
        }
    }
    Ok(())
}
