//! Command-line front end. All logic lives in the library; this binary
//! parses arguments into a `RunConfig` and reports results.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use medopt::cli::{self, Method, RunConfig, Verb};
use medopt::regret::{Algo, LambdaSchedule};

#[derive(Parser)]
#[command(
    name = "medopt",
    about = "Optimal equilibria and mechanisms in mediator-augmented games",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GameSource {
    /// Generator spec, e.g. auction:R=2,V=5,B=1 or randnf:seed=7,p=2,a=3
    #[arg(long = "gen")]
    generator: Option<String>,
    /// EFG document path (JSON)
    #[arg(long = "game")]
    game_file: Option<PathBuf>,
}

#[derive(Args)]
struct CommonOpts {
    /// Output directory for report.json / trace.csv / plot.csv
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Worker threads for tree passes (default: rayon's choice, or
    /// MEDOPT_THREADS)
    #[arg(long)]
    threads: Option<usize>,
    /// Seed for seeded generators
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for an optimal equilibrium or mechanism
    Solve {
        #[command(flatten)]
        source: GameSource,
        /// direct (single Lagrangian game) or binsearch (threshold search)
        #[arg(long, default_value = "direct")]
        method: String,
        /// rm, cfr+ (rm+), dcfr or pcfr+
        #[arg(long, default_value = "cfr+")]
        algo: String,
        /// Fixed multiplier for --method direct
        #[arg(long)]
        lambda: Option<f64>,
        /// Multiplier schedule: sqrt4 (T^1/4) or sqrt2 (T^1/2)
        #[arg(long)]
        schedule: Option<String>,
        /// Precision target (binsearch bracket width; also the certified
        /// gap target)
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        /// Iterations (direct) per run
        #[arg(long = "T", default_value_t = 10_000)]
        iterations: u64,
        /// Iteration budget per threshold (binsearch)
        #[arg(long, default_value_t = 200_000)]
        inner_budget: u64,
        /// Alternate updates instead of simultaneous ones
        #[arg(long, default_value_t = false)]
        alternating: bool,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Exact LP value for small instances
    Oracle {
        #[command(flatten)]
        source: GameSource,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Evaluate a fixed mechanism (sp, fp, r:<price>) on an auction
    Eval {
        #[command(flatten)]
        source: GameSource,
        /// sp, fp or r:<price>
        #[arg(long)]
        mechanism: String,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Write a generated game as an EFG document
    Gen {
        #[command(flatten)]
        source: GameSource,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Build the bundled benchmark instances and smoke-solve the small ones
    Bench {
        /// rm, cfr+ (rm+), dcfr or pcfr+
        #[arg(long, default_value = "cfr+")]
        algo: String,
        /// Iteration cap for the smoke solves
        #[arg(long = "T", default_value_t = 2_000)]
        iterations: u64,
        #[command(flatten)]
        common: CommonOpts,
    },
}

fn build_config(cli: Cli) -> Result<RunConfig, cli::CliError> {
    let parse_algo = |s: &str| {
        Algo::parse(s).ok_or_else(|| cli::CliError::Config(format!("unknown algorithm {s}")))
    };
    let mut config = RunConfig::default();
    match cli.command {
        Command::Solve {
            source,
            method,
            algo,
            lambda,
            schedule,
            eps,
            iterations,
            inner_budget,
            alternating,
            common,
        } => {
            config.verb = Verb::Solve;
            config.generator = source.generator;
            config.game_file = source.game_file;
            config.method = match method.as_str() {
                "direct" => Method::Direct,
                "binsearch" | "binary" | "binary-search" => Method::BinarySearch,
                other => return Err(cli::CliError::Config(format!("unknown method {other}"))),
            };
            config.algo = parse_algo(&algo)?;
            config.schedule = match (lambda, schedule) {
                (Some(l), None) => LambdaSchedule::Fixed(l),
                (None, Some(s)) => LambdaSchedule::parse(&s)
                    .ok_or_else(|| cli::CliError::Config(format!("unknown schedule {s}")))?,
                (None, None) => LambdaSchedule::Fixed(25.0),
                (Some(_), Some(_)) => {
                    return Err(cli::CliError::Config(
                        "--lambda and --schedule are mutually exclusive".into(),
                    ))
                }
            };
            config.epsilon = eps;
            config.iterations = iterations;
            config.inner_budget = inner_budget;
            config.alternating = alternating;
            apply_common(&mut config, common);
        }
        Command::Oracle { source, common } => {
            config.verb = Verb::Oracle;
            config.generator = source.generator;
            config.game_file = source.game_file;
            apply_common(&mut config, common);
        }
        Command::Eval {
            source,
            mechanism,
            common,
        } => {
            config.verb = Verb::Eval;
            config.generator = source.generator;
            config.game_file = source.game_file;
            config.mechanism = Some(mechanism);
            apply_common(&mut config, common);
        }
        Command::Gen { source, common } => {
            config.verb = Verb::Gen;
            config.generator = source.generator;
            config.game_file = source.game_file;
            apply_common(&mut config, common);
        }
        Command::Bench {
            algo,
            iterations,
            common,
        } => {
            config.verb = Verb::Bench;
            config.algo = parse_algo(&algo)?;
            config.iterations = iterations;
            apply_common(&mut config, common);
        }
    }
    if config.threads.is_none() {
        if let Ok(t) = std::env::var("MEDOPT_THREADS") {
            config.threads = t.parse().ok();
        }
    }
    Ok(config)
}

fn apply_common(config: &mut RunConfig, common: CommonOpts) {
    config.out_dir = common.out;
    config.threads = common.threads;
    config.seed = common.seed;
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match build_config(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{}", e.to_json());
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match cli::run(&config) {
        Ok(artifacts) => {
            println!("{}", artifacts.summary);
            if let Some(p) = artifacts.report_path {
                println!("report: {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
