use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use lcmoments::harness::{run_experiment, run_suite, ExperimentConfig, Suite, Verdict};
use lcmoments::Result;

/// Moment surrogates for log-concave sums against Monte-Carlo ground truth.
#[derive(Debug, Parser)]
#[command(name = "lcm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate ‖Σ aᵢXᵢ‖_p for one family and profile and print CSV rows.
    Estimate {
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        profile: String,
        /// Comma-separated exponents.
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<f64>,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the rows here instead of standard output.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run an experiment config and write report.csv and summary.json.
    Report {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's output_dir.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite; exits 1 when any check fails.
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

fn configure_workers() -> Result<()> {
    let Ok(raw) = std::env::var("LCM_WORKERS") else {
        return Ok(());
    };
    let workers: usize = raw
        .trim()
        .parse()
        .map_err(|_| lcmoments::Error::InvalidArgument(format!("LCM_WORKERS={raw:?} is not a count")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build_global()
        .map_err(|e| lcmoments::Error::InvalidArgument(format!("cannot size worker pool: {e}")))
}

fn run(cli: Cli) -> Result<bool> {
    configure_workers()?;
    match cli.command {
        Command::Estimate {
            family,
            n,
            profile,
            p,
            samples,
            seed,
            csv,
        } => {
            let config = ExperimentConfig::new(&[&family], &[&profile], &[n], &p, samples, seed)?;
            let report = run_experiment(&config)?;
            if let Some(reason) = report.summary.skipped.first() {
                return Err(lcmoments::Error::InvalidArgument(reason.clone()));
            }
            match csv {
                Some(path) => std::fs::write(path, report.csv())?,
                None => print!("{}", report.csv()),
            }
            Ok(true)
        }
        Command::Report { config, out } => {
            let config = ExperimentConfig::load(&config)?;
            let dir = out
                .or_else(|| config.output_dir.clone())
                .ok_or_else(|| lcmoments::Error::InvalidArgument("no output directory given".into()))?;
            let report = run_experiment(&config)?;
            report.write(&dir)?;
            for family in &report.summary.families {
                println!(
                    "{}: {} cells, C_lo = {:.4}, C_hi = {:.4}",
                    family.family, family.cells, family.c_lo, family.c_hi
                );
            }
            Ok(true)
        }
        Command::Verify { suite, seed, json } => {
            let suite: Suite = suite.parse()?;
            let verdict = Verdict::new(suite, seed, run_suite(suite, seed));
            for check in &verdict.checks {
                println!("{check}");
            }
            if let Some(path) = json {
                std::fs::write(path, serde_json::to_string_pretty(&verdict)? + "\n")?;
            }
            if !verdict.passed {
                eprintln!("failing checks: {}", verdict.failing().join(", "));
            }
            Ok(verdict.passed)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
