//! `walklab` command-line tool.
//!
//! Exit codes: 0 success, 1 a claim failed (or a sweep is unstable),
//! 2 configuration or runtime error.

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};

use walklab::config::ExperimentConfig;
use walklab::error::{Error, Result};
use walklab::experiment::{
    parse_graph_spec, run_bias, write_bias, write_graph, write_group, write_report, write_sweep, GraphSummary,
    GroupSummary, RepsSummary,
};
use walklab::group::FiniteGroup;
use walklab::rep::RepSystem;
use walklab::verify::{run_suite_with_digest, sweep_lambda, ClaimId, SuiteConfig};

#[derive(Parser)]
#[command(name = "walklab", version, about = "Expander random-walk bias over finite groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Group,
    Graph,
    Reps,
}

#[derive(Subcommand)]
enum Command {
    /// Print a summary of a group, graph or representation system.
    Inspect {
        target: Target,
        /// e.g. `symmetric(3)` or `complete_power(cyclic(2),2)`.
        spec: String,
        /// Also export JSON and CSV files into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute walk biases of the configured functions.
    Bias {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        exact_only: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the claim verification suite.
    Verify {
        /// Optional config; without one the default suite runs.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Comma-separated claim ids, e.g. `T1,T8`.
        #[arg(long, value_delimiter = ',')]
        claims: Option<Vec<String>>,
        /// Multiplies every λ used in bounds; values below 1 inject faults.
        #[arg(long)]
        lambda_scale: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Threshold bias across complete_power(G, r) for r = 1..=r_max.
    Sweep {
        #[arg(long, default_value = "T16")]
        claim: String,
        #[arg(long, default_value = "cyclic(2)")]
        group: String,
        #[arg(long, default_value_t = 6)]
        r_max: usize,
        #[arg(long, default_value_t = 16)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn config_err(e: Error) -> Error {
    match e {
        Error::Config(m) => Error::Config(m),
        other => Error::Config(other.to_string()),
    }
}

/// Returns whether the command succeeded without claim failures.
fn run(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Inspect { target, spec, out } => {
            inspect(target, &spec, out)?;
            Ok(true)
        }
        Command::Bias { config, seed, samples, exact_only, out } => {
            let loaded = ExperimentConfig::load(&config)?;
            let mut cfg = loaded.config;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if samples.is_some() {
                cfg.samples = samples;
            }
            cfg.exact_only |= exact_only;
            cfg.validate()?;
            let result = run_bias(&cfg, &loaded.digest)?;
            print!("{}", result.to_csv());
            if let Some(dir) = out.or(cfg.output_dir) {
                write_bias(&dir, &result)?;
            }
            Ok(true)
        }
        Command::Verify { config, seed, claims, lambda_scale, out } => {
            let (mut suite, digest, dir) = match &config {
                Some(path) => {
                    let loaded = ExperimentConfig::load(path)?;
                    (loaded.config.suite()?, Some(loaded.digest), loaded.config.output_dir)
                }
                None => (SuiteConfig::default(), None, None),
            };
            if let Some(s) = seed {
                suite.seed = s;
            }
            if let Some(list) = claims {
                suite.claims = list.iter().map(|c| c.parse()).collect::<Result<_>>()?;
            }
            if let Some(l) = lambda_scale {
                if !(l.is_finite() && l > 0.0) {
                    return Err(Error::Config("--lambda-scale must be positive".into()));
                }
                suite.lambda_scale = l;
            }
            let digest = match digest {
                Some(d) if config.is_some() && seed.is_none() && lambda_scale.is_none() => d,
                _ => suite.digest(),
            };
            let report = run_suite_with_digest(&suite, digest)?;
            print!("{}", report.table());
            if let Some(dir) = out.or(dir) {
                write_report(&dir, &report)?;
            }
            Ok(report.summary.all_pass)
        }
        Command::Sweep { claim, group, r_max, n, out } => {
            let claim: ClaimId = claim.parse()?;
            let g = Arc::new(FiniteGroup::parse(&group).map_err(config_err)?);
            let rs: Vec<usize> = (1..=r_max).collect();
            let sweep = sweep_lambda(claim, g, &rs, n).map_err(config_err)?;
            print!("{}", sweep.to_csv());
            println!("median measured/lambda {:.6e} stable {}", sweep.median_ratio, sweep.stable);
            if let Some(dir) = out {
                write_sweep(&dir, &sweep)?;
            }
            Ok(sweep.stable)
        }
    }
}

fn inspect(target: Target, spec: &str, out: Option<PathBuf>) -> Result<()> {
    match target {
        Target::Group => {
            let g = FiniteGroup::parse(spec).map_err(config_err)?;
            print!("{}", GroupSummary::of(&g)?);
            if let Some(dir) = out {
                write_group(&dir, &g)?;
            }
        }
        Target::Reps => {
            let g = FiniteGroup::parse(spec).map_err(config_err)?;
            print!("{}", RepsSummary::of(&RepSystem::of(&g)?));
            if let Some(dir) = out {
                write_group(&dir, &g)?;
            }
        }
        Target::Graph => {
            let (group, graph) = parse_graph_spec(spec)?;
            let g = Arc::new(FiniteGroup::parse(&group).map_err(config_err)?);
            let x = graph.build(g).map_err(config_err)?;
            print!("{}", GraphSummary::of(&x)?);
            if let Some(dir) = out {
                write_graph(&dir, &x)?;
            }
        }
    }
    Ok(())
}
