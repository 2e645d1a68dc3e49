use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use onmar_bench::analysis::{diagnose, DEFAULT_DELTA, DEFAULT_WINDOW};
use onmar_bench::experiment::{
    report_from_directory, run_experiment, write_report, Approach, DatasetSource, ExperimentSpec,
};
use onmar_core::metalearners::LearnerKind;
use onmar_core::{RunConfig, RunLog};

#[derive(Parser)]
#[command(name = "onmar", about = "Meta-learning assisted design experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run repeated comparisons and write logs plus a report.
    Run {
        /// JSON experiment spec; overrides every other flag except --out.
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Comma-separated approaches, e.g. baseline,onmar_gbt,offmar_gbt.
        #[arg(long, visible_alias = "approach", default_value = "baseline,onmar_gbt,offmar_gbt", value_delimiter = ',')]
        approaches: Vec<String>,
        /// `blobs:n,k,d,sep`, `csv:path` or `csv-header:path`.
        #[arg(long, default_value = "blobs:200,3,4,8")]
        dataset: String,
        #[arg(long, default_value_t = 30)]
        repeats: usize,
        #[arg(long, default_value_t = 100)]
        timesteps: usize,
        /// Defaults to half the timesteps.
        #[arg(long)]
        theta_t: Option<usize>,
        #[arg(long, default_value_t = 0.85)]
        theta_p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// Rebuild the report of a results directory.
    Report {
        #[arg(long)]
        dir: PathBuf,
    },
    /// Check a run log for predictions that stay far above actual accuracy.
    Diagnose {
        #[arg(long)]
        log: PathBuf,
        #[arg(long, default_value_t = DEFAULT_DELTA)]
        delta: f64,
        #[arg(long, default_value_t = DEFAULT_WINDOW)]
        window: usize,
    },
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match Cli::parse().command {
        Command::Run {
            spec,
            approaches,
            dataset,
            repeats,
            timesteps,
            theta_t,
            theta_p,
            seed,
            workers,
            out,
        } => {
            let mut spec = match spec {
                Some(path) => ExperimentSpec::load(&path)
                    .with_context(|| format!("reading spec {}", path.display()))?,
                None => {
                    let approaches = approaches
                        .iter()
                        .map(|a| a.parse::<Approach>())
                        .collect::<onmar_core::Result<Vec<_>>>()?;
                    let mut config = RunConfig::new(timesteps, LearnerKind::Gbt, seed);
                    if let Some(t) = theta_t {
                        config.theta_t = t;
                    }
                    config.theta_p = theta_p;
                    let mut s = ExperimentSpec::new(approaches, dataset.parse::<DatasetSource>()?, config);
                    s.repeats = repeats;
                    s.workers = workers;
                    s
                }
            };
            spec.out = Some(out.clone());
            let (report, _) = run_experiment(&spec)?;
            for s in &report.approaches {
                println!(
                    "{:<12} median accuracy {:.4}  median seconds {:.2}  incomplete {}",
                    s.approach.to_string(),
                    s.median_accuracy.unwrap_or(f64::NAN),
                    s.median_seconds.unwrap_or(f64::NAN),
                    s.incomplete.len()
                );
            }
            println!("report written to {}", out.join("report.json").display());
        }
        Command::Report { dir } => {
            let reports = report_from_directory(&dir)?;
            write_report(&dir, &reports)?;
            for r in &reports {
                for e in &r.ranks {
                    println!("{}\t{}\twins {}\trank {}", r.dataset, e.approach, e.wins, e.rank);
                }
            }
        }
        Command::Diagnose { log, delta, window } => {
            let run = RunLog::load(&log).with_context(|| format!("reading {}", log.display()))?;
            let d = diagnose(&run, delta, window);
            println!("timestep,predicted,actual,gap,ga_invoked");
            for (r, gap) in run.records.iter().zip(&d.series) {
                let opt = |v: Option<f64>| v.map_or(String::new(), |v| v.to_string());
                println!(
                    "{},{},{},{},{}",
                    r.timestep,
                    opt(r.predicted_performance),
                    r.actual_performance,
                    opt(*gap),
                    r.ga_invoked
                );
            }
            match d.first_flag {
                Some(t) => println!("flagged: divergence window ends at timestep {t}"),
                None => println!("not flagged"),
            }
        }
    }
    Ok(())
}
