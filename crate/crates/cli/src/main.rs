use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wtdyn_cli::output::write_output;
use wtdyn_cli::parse::{parse_range, parse_sparse_vector};
use wtdyn_cli::{load_config, run, Result};

#[derive(Parser)]
#[command(name = "wtdyn", version, about = "Convex-cyclicity experiments for weighted translation operators")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment config (JSON).
    #[arg(long, global = true, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in experiment: example1 or example2.
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Directory for the JSON and CSV outputs.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    #[arg(long, global = true)]
    rng_seed: Option<u64>,
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[arg(long, global = true)]
    budget: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run every criterion check and the adjoint spectrum sweep.
    Classify,
    /// Norm and support along the orbit of a seed vector.
    Orbit {
        #[arg(long, default_value = "0:1")]
        seed_vector: String,
        /// Last orbit index.
        #[arg(short = 'n', default_value_t = 20)]
        n: usize,
    },
    /// Distance from a target to the convex hull of the first orbit points.
    Hull {
        #[arg(long, default_value = "0:1")]
        seed_vector: String,
        #[arg(long, default_value = "0:0")]
        target: String,
        /// Largest orbit budget N.
        #[arg(short = 'n', default_value_t = 10)]
        n: usize,
    },
    /// Convex-transitivity quantities with f0 = seed vector and h = target.
    DemoTransitivity {
        #[arg(long, default_value = "0:1")]
        seed_vector: String,
        #[arg(long, default_value = "0:1")]
        target: String,
        /// k values: K, A..B or A..=B (inclusive).
        #[arg(short = 'k', default_value = "1..60")]
        k: String,
    },
    /// Sup of Re Lambda(T^n x) for random functionals on the window.
    ProbeFunctionals {
        #[arg(long, default_value = "0:1")]
        seed_vector: String,
        /// Number of functionals; the config value when absent.
        #[arg(long)]
        count: Option<usize>,
        /// Horizon; the config value when absent.
        #[arg(short = 'n')]
        n: Option<usize>,
    },
    /// Eigenvalue recurrence for the adjoint over the lambda grid.
    ProbeSpectrum {
        /// Horizon; the config value when absent.
        #[arg(short = 'n')]
        n: Option<usize>,
    },
    /// Averaged forward-product statistic on the theorem-B window.
    TheoremB {
        /// Largest n; the config value when absent.
        #[arg(short = 'n')]
        n: Option<usize>,
    },
}

fn execute(cli: Cli) -> Result<Vec<PathBuf>> {
    let c = &cli.common;
    let mut config = load_config(c.config.as_deref(), c.preset.as_deref())?;
    if let Some(seed) = c.rng_seed {
        config.rng_seed = seed;
    }
    if let Some(tol) = c.tolerance {
        config.tolerance = tol;
    }
    if let Some(budget) = c.budget {
        config.budget = budget;
    }
    let exp = config.resolve()?;
    let output = match &cli.command {
        Command::Classify => run::classify_output(&exp)?,
        Command::Orbit { seed_vector, n } => run::orbit(&exp, &parse_sparse_vector(seed_vector)?, *n)?,
        Command::Hull { seed_vector, target, n } => run::hull(
            &exp,
            &parse_sparse_vector(seed_vector)?,
            &parse_sparse_vector(target)?,
            *n,
        )?,
        Command::DemoTransitivity { seed_vector, target, k } => run::demo_transitivity(
            &exp,
            &parse_sparse_vector(seed_vector)?,
            &parse_sparse_vector(target)?,
            parse_range(k, 1)?,
        )?,
        Command::ProbeFunctionals { seed_vector, count, n } => run::probe_functionals(
            &exp,
            &parse_sparse_vector(seed_vector)?,
            count.unwrap_or(exp.config.functionals),
            n.unwrap_or(exp.config.horizon),
        )?,
        Command::ProbeSpectrum { n } => run::probe_spectrum(&exp, n.unwrap_or(exp.config.horizon))?,
        Command::TheoremB { n } => run::theorem_b(&exp, n.unwrap_or(exp.config.theorem_b.n_budget))?,
    };
    if let Some(evidence) = output.json.get("evidence").and_then(|v| v.as_str()) {
        println!("{evidence}");
    }
    write_output(&c.out, &output)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("wtdyn: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
