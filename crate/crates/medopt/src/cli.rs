//! Command-line pipeline: generate/load, encode, solve, certify, emit.
//!
//! Verbs: `solve`, `oracle`, `eval`, `gen`, `bench`. Exit codes: 0 ok,
//! 2 configuration error, 3 solve budget exhausted, 4 invariant violation.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Serialize;

use crate::encode::{fixed_mechanism, MechanismKind, MediatorAugmentedGame};
use crate::game::{game_to_json, GameError};
use crate::gen::{generate, Generated};
use crate::oracle;
use crate::regret::{Algo, LambdaSchedule};
use crate::solve::{
    certify, free_item_rate, solve_binary_search, solve_direct, BinarySearchConfig,
    BinarySearchError, DirectConfig, SolveReport,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verb {
    Solve,
    Oracle,
    Eval,
    Gen,
    Bench,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Direct,
    BinarySearch,
}

/// Everything one run needs. Built by the binary's argument parser and by
/// tests directly.
pub struct RunConfig {
    pub verb: Verb,
    /// Generator spec `name:key=value,key=value`, or empty when loading.
    pub generator: Option<String>,
    /// EFG document path, mutually exclusive with `generator`.
    pub game_file: Option<PathBuf>,
    pub method: Method,
    pub algo: Algo,
    pub schedule: LambdaSchedule,
    pub epsilon: f64,
    pub iterations: u64,
    pub inner_budget: u64,
    pub alternating: bool,
    pub seed: u64,
    pub threads: Option<usize>,
    pub mechanism: Option<String>,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            verb: Verb::Solve,
            generator: None,
            game_file: None,
            method: Method::Direct,
            algo: Algo::RmPlus,
            schedule: LambdaSchedule::Fixed(25.0),
            epsilon: 1e-3,
            iterations: 10_000,
            inner_budget: 200_000,
            alternating: false,
            seed: 0,
            threads: None,
            mechanism: None,
            out_dir: PathBuf::from("."),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("solve budget exhausted: {0}")]
    Budget(String),
    #[error("invariant violation: {0}")]
    Invariant(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Invariant(_) => 4,
            CliError::Io(_) => 1,
        }
    }

    /// Machine-readable error document.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            error: &'a str,
            kind: &'a str,
            exit_code: i32,
        }
        let kind = match self {
            CliError::Config(_) => "config",
            CliError::Budget(_) => "budget",
            CliError::Invariant(_) => "invariant",
            CliError::Io(_) => "io",
        };
        serde_json::to_string(&Doc {
            error: &self.to_string(),
            kind,
            exit_code: self.exit_code(),
        })
        .expect("serializable")
    }
}

impl From<GameError> for CliError {
    fn from(e: GameError) -> Self {
        match e {
            GameError::Parse { .. } => CliError::Config(e.to_string()),
            _ => CliError::Invariant(e.to_string()),
        }
    }
}

impl From<BinarySearchError> for CliError {
    fn from(e: BinarySearchError) -> Self {
        match e {
            BinarySearchError::Budget(b) => CliError::Budget(b.to_string()),
            BinarySearchError::Game(g) => g.into(),
        }
    }
}

impl From<oracle::OracleError> for CliError {
    fn from(e: oracle::OracleError) -> Self {
        match e {
            oracle::OracleError::Game(g) => g.into(),
            other => CliError::Invariant(other.to_string()),
        }
    }
}

/// Parses `name:key=value,key=value` generator specs.
pub fn parse_generator_spec(spec: &str) -> Result<(String, HashMap<String, String>), CliError> {
    let (name, rest) = match spec.split_once(':') {
        Some((n, r)) => (n, r),
        None => (spec, ""),
    };
    let mut params = HashMap::new();
    if !rest.is_empty() {
        for pair in rest.split(',') {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("bad generator parameter {pair}")))?;
            params.insert(k.trim().to_string(), v.trim().to_string());
        }
    }
    Ok((name.trim().to_string(), params))
}

fn load_instance(config: &RunConfig) -> Result<Generated, CliError> {
    match (&config.generator, &config.game_file) {
        (Some(spec), None) => {
            let (name, mut params) = parse_generator_spec(spec)?;
            params.entry("seed".into()).or_insert(config.seed.to_string());
            Ok(generate(&name, &params)?)
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)?;
            let (game, doc) = crate::game::load_document(&text)?;
            let game = Arc::new(game);
            match doc.direct_strategy {
                None => Ok(Generated::Game(game)),
                Some(ds) => {
                    // Map infoset names to ids per player.
                    let mut name_to_id = HashMap::new();
                    for (iid, inf) in game.infosets().iter().enumerate() {
                        name_to_id.insert(inf.name.clone(), iid);
                    }
                    let mut choices = vec![HashMap::new(); game.num_players()];
                    for (player, table) in &ds {
                        let p: usize = player
                            .parse()
                            .map_err(|_| CliError::Config(format!("bad player key {player}")))?;
                        if p == 0 || p > game.num_players() {
                            return Err(CliError::Config(format!("player {p} out of range")));
                        }
                        for (iname, action) in table {
                            let iid = *name_to_id.get(iname).ok_or_else(|| {
                                CliError::Config(format!("unknown infoset {iname}"))
                            })?;
                            choices[p - 1].insert(iid, *action);
                        }
                    }
                    let m = MediatorAugmentedGame::from_game(game, choices)?;
                    Ok(Generated::Augmented(Arc::new(m)))
                }
            }
        }
        _ => Err(CliError::Config(
            "exactly one of --gen and --game is required".into(),
        )),
    }
}

fn augmented(config: &RunConfig) -> Result<Arc<MediatorAugmentedGame>, CliError> {
    match load_instance(config)? {
        Generated::Augmented(m) => Ok(m),
        Generated::Game(_) => Err(CliError::Config(
            "this verb needs a mediator-augmented instance (auction, randnf, or a game file \
             with a direct_strategy)"
                .into(),
        )),
    }
}

pub struct RunArtifacts {
    pub report_path: Option<PathBuf>,
    pub summary: String,
}

/// Executes a run and writes its artifacts (report.json, trace.csv,
/// plot.csv, strategy.json) under `out_dir`.
pub fn run(config: &RunConfig) -> Result<RunArtifacts, CliError> {
    if config.epsilon <= 0.0 {
        return Err(CliError::Config("epsilon must be positive".into()));
    }
    if config.iterations == 0 {
        return Err(CliError::Config("iteration count must be at least 1".into()));
    }
    if let Some(t) = config.threads {
        // One global pool; later calls with the same size are no-ops.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    match config.verb {
        Verb::Solve => run_solve(config),
        Verb::Oracle => run_oracle(config),
        Verb::Eval => run_eval(config),
        Verb::Gen => run_gen(config),
        Verb::Bench => run_bench(config),
    }
}

fn write_out(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, contents)?;
    Ok(path)
}

fn run_solve(config: &RunConfig) -> Result<RunArtifacts, CliError> {
    let m = augmented(config)?;
    let report = match config.method {
        Method::Direct => solve_direct(
            &m,
            &DirectConfig {
                schedule: config.schedule,
                algo: config.algo,
                iterations: config.iterations,
                epsilon: None,
                alternating: config.alternating,
                gap_every: None,
            },
        )?,
        Method::BinarySearch => solve_binary_search(
            &m,
            &BinarySearchConfig {
                epsilon: config.epsilon,
                algo: config.algo,
                inner_budget: config.inner_budget,
                alternating: config.alternating,
                check_every: 64,
            },
        )?,
    };
    let report_path = emit_report(config, &m, &report)?;
    let summary = format!(
        "objective {:.6}, equilibrium gap {:.3e}, saddle gap {:.3e}, {} iterations, {} ms",
        report.objective,
        report.equilibrium_gap,
        report.saddle_gap,
        report.iterations,
        report.wall_ms
    );
    Ok(RunArtifacts {
        report_path: Some(report_path),
        summary,
    })
}

fn emit_report(
    config: &RunConfig,
    m: &Arc<MediatorAugmentedGame>,
    report: &SolveReport,
) -> Result<PathBuf, CliError> {
    let strategy_doc = serde_json::json!({
        "agent": 0,
        "values": report.strategy.values,
        "last_values": report.last_strategy.values,
    });
    write_out(&config.out_dir, "strategy.json", &strategy_doc.to_string())?;
    write_out(&config.out_dir, "trace.csv", &report.trace_csv())?;
    let report_path = write_out(
        &config.out_dir,
        "report.json",
        &report.to_json("strategy.json"),
    )?;
    if m.is_auction() {
        let plot = plot_csv(m, Some(report))?;
        write_out(&config.out_dir, "plot.csv", &plot)?;
    }
    Ok(report_path)
}

/// Revenue-vs-exploitability rows for the solved mechanism and the classic
/// baselines.
fn plot_csv(
    m: &Arc<MediatorAugmentedGame>,
    solved: Option<&SolveReport>,
) -> Result<String, CliError> {
    let mut rows = String::from("label,revenue,exploitability\n");
    if let Some(report) = solved {
        let expl: f64 = report.per_player_gains.iter().sum();
        rows.push_str(&format!("ours,{},{}\n", report.objective, expl));
    }
    let spec = m.auction_spec().expect("auction");
    let mut mechanisms: Vec<(String, MechanismKind)> = vec![
        ("fp".into(), MechanismKind::FirstPrice),
        ("sp".into(), MechanismKind::SecondPrice),
    ];
    let units = spec.budget_units();
    for k in 1..=units {
        let p = spec.payment(k);
        mechanisms.push((format!("r_{p}"), MechanismKind::SecondPriceReserve(p)));
    }
    for (label, kind) in mechanisms {
        let mu = fixed_mechanism(kind, m)?;
        let cert = certify(m, &mu)?;
        let expl: f64 = cert.per_player_gains.iter().sum();
        rows.push_str(&format!("{label},{},{}\n", cert.objective, expl));
    }
    Ok(rows)
}

fn run_eval(config: &RunConfig) -> Result<RunArtifacts, CliError> {
    let m = augmented(config)?;
    if !m.is_auction() {
        return Err(CliError::Config("eval needs an auction instance".into()));
    }
    let kind = match config.mechanism.as_deref() {
        Some("sp") => MechanismKind::SecondPrice,
        Some("fp") => MechanismKind::FirstPrice,
        Some(r) if r.starts_with("r:") => {
            let p: f64 = r[2..]
                .parse()
                .map_err(|_| CliError::Config(format!("bad reserve in {r}")))?;
            MechanismKind::SecondPriceReserve(p)
        }
        other => {
            return Err(CliError::Config(format!(
                "--mechanism must be sp, fp or r:<price>, got {other:?}"
            )))
        }
    };
    let mu = fixed_mechanism(kind, &m)?;
    let cert = certify(&m, &mu)?;
    let free = free_item_rate(&m, &mu)?;
    let expl: f64 = cert.per_player_gains.iter().sum();
    let doc = serde_json::json!({
        "mechanism": config.mechanism,
        "revenue": cert.objective,
        "exploitability": expl,
        "per_player_gains": cert.per_player_gains,
        "free_item_rate": free,
    });
    let path = write_out(&config.out_dir, "eval.json", &serde_json::to_string_pretty(&doc).unwrap())?;
    write_out(&config.out_dir, "plot.csv", &plot_csv(&m, None)?)?;
    Ok(RunArtifacts {
        report_path: Some(path),
        summary: format!(
            "revenue {:.6}, exploitability {:.6}, free-item rate {:.4}",
            cert.objective, expl, free
        ),
    })
}

fn run_oracle(config: &RunConfig) -> Result<RunArtifacts, CliError> {
    let m = augmented(config)?;
    let sol = oracle::solve_lp(&m, &oracle::OracleConfig::default())?;
    let doc = serde_json::json!({
        "value": sol.value,
        "num_constraints": sol.num_constraints,
        "player_dual_weights": sol.player_dual_weights,
        "dual_bound": sol.dual_bound,
    });
    let path = write_out(&config.out_dir, "oracle.json", &serde_json::to_string_pretty(&doc).unwrap())?;
    Ok(RunArtifacts {
        report_path: Some(path),
        summary: format!("optimal value {:.9}", sol.value),
    })
}

fn run_gen(config: &RunConfig) -> Result<RunArtifacts, CliError> {
    let instance = load_instance(config)?;
    let (doc, what) = match instance {
        Generated::Game(g) => (game_to_json(&g), format!("{} nodes", g.num_nodes())),
        Generated::Augmented(m) => {
            let g = m.materialize()?;
            (game_to_json(&g), format!("{} nodes", g.num_nodes()))
        }
    };
    let path = write_out(&config.out_dir, "game.json", &doc)?;
    Ok(RunArtifacts {
        report_path: Some(path),
        summary: what,
    })
}

fn run_bench(config: &RunConfig) -> Result<RunArtifacts, CliError> {
    // A small smoke suite over the bundled generators: build each game and
    // report sizes plus a short self-play solve where applicable.
    let mut rows = String::from("instance,nodes,terminals,note\n");
    for spec in ["kuhn3:r=3", "kuhn3:r=4", "sheriff:N=1,B=2,r=1", "sheriff:N=1,B=2,r=2"] {
        let (name, params) = parse_generator_spec(spec)?;
        if let Generated::Game(g) = generate(&name, &params)? {
            rows.push_str(&format!(
                "{spec},{},{},benchmark game\n",
                g.num_nodes(),
                g.num_terminals()
            ));
        }
    }
    for spec in ["randnf:seed=1,p=2,a=2,concept=ce", "auction:R=1,V=3,B=1"] {
        let (name, params) = parse_generator_spec(spec)?;
        if let Generated::Augmented(m) = generate(&name, &params)? {
            let report = solve_direct(
                &m,
                &DirectConfig::new(10.0, config.algo, config.iterations.min(2000)),
            )?;
            rows.push_str(&format!(
                "{spec},,,objective {:.4} gap {:.2e}\n",
                report.objective, report.equilibrium_gap
            ));
        }
    }
    let path = write_out(&config.out_dir, "bench.csv", &rows)?;
    Ok(RunArtifacts {
        report_path: Some(path),
        summary: rows,
    })
}
