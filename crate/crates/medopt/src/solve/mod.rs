//! Top-level solvers: the direct-Lagrangian solve, the threshold binary
//! search, and strategy certification.

use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;

use crate::encode::{build_l1, build_l2, MediatorAugmentedGame};
use crate::game::{GameError, GameResult, SequenceFormStrategy};
use crate::regret::{Algo, LambdaSchedule, SelfPlay, TracePoint};

/// Slack under which an upper certificate ("the game value is negative") is
/// accepted; guards the bisection's bracket invariant against float noise.
const CERT_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Serialize)]
pub enum MethodInfo {
    Direct {
        lambda: f64,
        schedule: String,
    },
    BinarySearch {
        epsilon: f64,
        /// `(tau, lowered)` per outer iteration: `lowered` is true when the
        /// upper end moved down.
        bracket: Vec<(f64, bool)>,
    },
}

/// Everything a solve produces: the certified numbers, both iterates, the
/// certified convergence bounds and the trace.
pub struct SolveReport {
    pub method: MethodInfo,
    /// Mediator objective of `strategy` under the direct profile, in the
    /// source game's original units.
    pub objective: f64,
    /// Largest deviation gain across players (original units).
    pub equilibrium_gap: f64,
    pub per_player_gains: Vec<f64>,
    /// Saddle gap of the final average iterates in the zero-sum game.
    pub saddle_gap: f64,
    pub last_iterate_gap: f64,
    /// Optimality shortfall bound from measured regrets: the average
    /// strategy's objective is within this of any feasible strategy's.
    pub optimality_bound: Option<f64>,
    /// Equilibrium-gap bound `range / lambda + regrets / (lambda T)`.
    pub gap_bound: Option<f64>,
    pub iterations: u64,
    pub wall_ms: u128,
    /// Average mediator iterate (the certified strategy).
    pub strategy: SequenceFormStrategy,
    pub last_strategy: SequenceFormStrategy,
    pub trace: Vec<TracePoint>,
}

#[derive(Serialize)]
struct ReportDoc<'a> {
    method: &'a MethodInfo,
    objective: f64,
    equilibrium_gap: f64,
    per_player_gains: &'a [f64],
    saddle_gap: f64,
    last_iterate_gap: f64,
    optimality_bound: Option<f64>,
    gap_bound: Option<f64>,
    iterations: u64,
    wall_ms: u128,
    strategy_ref: &'a str,
}

impl SolveReport {
    /// Document form; `strategy_ref` names the sidecar file holding the
    /// mediator strategy.
    pub fn to_json(&self, strategy_ref: &str) -> String {
        serde_json::to_string_pretty(&ReportDoc {
            method: &self.method,
            objective: self.objective,
            equilibrium_gap: self.equilibrium_gap,
            per_player_gains: &self.per_player_gains,
            saddle_gap: self.saddle_gap,
            last_iterate_gap: self.last_iterate_gap,
            optimality_bound: self.optimality_bound,
            gap_bound: self.gap_bound,
            iterations: self.iterations,
            wall_ms: self.wall_ms,
            strategy_ref,
        })
        .expect("serializable")
    }

    pub fn trace_csv(&self) -> String {
        let mut out =
            String::from("iter,lambda_or_tau,objective,max_dev_gain,saddle_gap,last_iter_gap,wall_ms\n");
        for p in &self.trace {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                p.iter,
                p.lambda_or_tau,
                p.objective.map(|v| v.to_string()).unwrap_or_default(),
                p.max_dev_gain.map(|v| v.to_string()).unwrap_or_default(),
                p.saddle_gap,
                p.last_iter_gap,
                p.wall_ms
            ));
        }
        out
    }
}

/// Result of certifying a fixed mediator strategy.
#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub objective: f64,
    pub per_player_gains: Vec<f64>,
    pub equilibrium_gap: f64,
}

/// Evaluates a mediator strategy without touching any learning state:
/// objective under the direct profile and each player's best-response gain.
pub fn certify(m: &MediatorAugmentedGame, mu: &SequenceFormStrategy) -> GameResult<Certificate> {
    let utils = m.utilities_direct(mu)?;
    let mut gains = Vec::with_capacity(m.num_players());
    for i in 1..=m.num_players() {
        let (_, br) = m.wired_deviator(i).deviator_best_response(mu)?;
        gains.push(br - utils[i]);
    }
    let gap = gains.iter().copied().fold(0.0f64, f64::max);
    Ok(Certificate {
        objective: utils[0],
        per_player_gains: gains,
        equilibrium_gap: gap,
    })
}

/// Probability, under the direct profile and `mu`, that some auction round
/// allocates the item at a zero price.
pub fn free_item_rate(m: &MediatorAugmentedGame, mu: &SequenceFormStrategy) -> GameResult<f64> {
    let wired = m.wired_direct();
    let outcomes = wired
        .outcomes
        .as_ref()
        .ok_or_else(|| GameError::Dimension("free-item rate needs an auction game".into()))?;
    let tp = m.mediator_treeplex();
    mu.validate(tp, 1e-6)?;
    let game = &wired.game;
    let mut mass = 0.0;
    for z in 0..game.num_terminals() {
        let label = &outcomes[z];
        if label
            .iter()
            .any(|o| o.winner.is_some() && o.payment == 0.0)
        {
            mass += game.chance_reach(z) * mu.values[wired.eval.terminal_seq(z, 0)];
        }
    }
    Ok(mass)
}

#[derive(Debug, Clone)]
pub struct DirectConfig {
    pub schedule: LambdaSchedule,
    pub algo: Algo,
    pub iterations: u64,
    /// Stop early once both the certified equilibrium gap and the saddle
    /// gap are at or below this.
    pub epsilon: Option<f64>,
    pub alternating: bool,
    pub gap_every: Option<u64>,
}

impl DirectConfig {
    pub fn new(lambda: f64, algo: Algo, iterations: u64) -> Self {
        DirectConfig {
            schedule: LambdaSchedule::Fixed(lambda),
            algo,
            iterations,
            epsilon: None,
            alternating: false,
            gap_every: None,
        }
    }
}

/// Solves the direct Lagrangian relaxation: one zero-sum self-play run at a
/// fixed multiplier (or one resolved from the horizon), with certification
/// of the average mediator strategy.
pub fn solve_direct(
    m: &Arc<MediatorAugmentedGame>,
    config: &DirectConfig,
) -> GameResult<SolveReport> {
    if config.iterations == 0 {
        return Err(GameError::Invariant("need at least one iteration".into()));
    }
    let lambda = config.schedule.resolve(config.iterations);
    if !lambda.is_finite() {
        return Err(GameError::Invariant(format!("multiplier {lambda} is not finite")));
    }
    let zs = Arc::new(build_l1(m, lambda)?);
    let start = Instant::now();
    let mut sp = SelfPlay::new(zs.clone(), config.algo, config.algo, config.alternating, None);
    let cadence = config.gap_every.unwrap_or((config.iterations / 100).max(1));

    let mut trace: Vec<TracePoint> = Vec::new();
    let mut done = 0u64;
    let mut cert: Option<Certificate> = None;
    let mut gaps = (f64::INFINITY, f64::INFINITY);
    while done < config.iterations {
        let batch = cadence.min(config.iterations - done);
        sp.run(batch);
        done += batch;
        let avg_med = sp.average_mediator();
        let avg_dev = sp.average_deviator();
        let c = certify(m, &avg_med)?;
        let saddle = sp.saddle_gap(&avg_med, &avg_dev);
        let last_gap = sp.saddle_gap(&sp.last_mediator(), &sp.last_deviator());
        trace.push(TracePoint {
            iter: done,
            lambda_or_tau: lambda,
            objective: Some(c.objective),
            max_dev_gain: Some(c.equilibrium_gap),
            saddle_gap: saddle,
            last_iter_gap: last_gap,
            wall_ms: start.elapsed().as_millis(),
        });
        gaps = (saddle, last_gap);
        let stop = config
            .epsilon
            .map(|eps| c.equilibrium_gap <= eps && saddle <= eps)
            .unwrap_or(false);
        cert = Some(c);
        if stop {
            break;
        }
    }

    let cert = cert.expect("at least one batch ran");
    let regret_sum = sp.regret_sum();
    let (range_lo, range_hi) = m.objective_polytope_range()?;
    let t = done as f64;
    let optimality_bound = Some((regret_sum / t).max(0.0));
    let gap_bound = if lambda > 0.0 {
        Some(((range_hi - range_lo) / lambda + regret_sum / (lambda * t)).max(0.0))
    } else {
        None
    };
    Ok(SolveReport {
        method: MethodInfo::Direct {
            lambda,
            schedule: match config.schedule {
                LambdaSchedule::Fixed(_) => "fixed".into(),
                LambdaSchedule::HorizonQuarter => "sqrt4".into(),
                LambdaSchedule::HorizonHalf => "sqrt2".into(),
            },
        },
        objective: cert.objective,
        equilibrium_gap: cert.equilibrium_gap,
        per_player_gains: cert.per_player_gains,
        saddle_gap: gaps.0,
        last_iterate_gap: gaps.1,
        optimality_bound,
        gap_bound,
        iterations: done,
        wall_ms: start.elapsed().as_millis(),
        strategy: sp.average_mediator(),
        last_strategy: sp.last_mediator(),
        trace,
    })
}

#[derive(Debug, Clone)]
pub struct BinarySearchConfig {
    /// Target precision in the source game's objective units.
    pub epsilon: f64,
    pub algo: Algo,
    /// Iteration budget per threshold.
    pub inner_budget: u64,
    pub alternating: bool,
    /// Certificate-check cadence within an inner solve.
    pub check_every: u64,
}

impl BinarySearchConfig {
    pub fn new(epsilon: f64, algo: Algo, inner_budget: u64) -> Self {
        BinarySearchConfig {
            epsilon,
            algo,
            inner_budget,
            alternating: false,
            check_every: 64,
        }
    }
}

/// Error carrying the bisection state when an inner solve exhausts its
/// budget without either certificate.
#[derive(Debug)]
pub struct BudgetExhausted {
    pub bracket: (f64, f64),
    pub tau: f64,
    pub best_lower_certificate: f64,
    pub best_upper_certificate: f64,
}

impl std::fmt::Display for BudgetExhausted {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "inner budget exhausted at tau {} (bracket [{}, {}]): best lower certificate {}, \
             best upper certificate {}",
            self.tau, self.bracket.0, self.bracket.1, self.best_lower_certificate,
            self.best_upper_certificate
        )
    }
}

pub enum BinarySearchError {
    Budget(BudgetExhausted),
    Game(GameError),
}

impl From<GameError> for BinarySearchError {
    fn from(e: GameError) -> Self {
        BinarySearchError::Game(e)
    }
}

impl std::fmt::Display for BinarySearchError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BinarySearchError::Budget(b) => b.fmt(f),
            BinarySearchError::Game(g) => g.fmt(f),
        }
    }
}

impl std::fmt::Debug for BinarySearchError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Display::fmt(self, f)
    }
}

/// Binary search over the thresholded Lagrangian.
///
/// Utilities are rescaled to [0, 1] per agent; the threshold bracket starts
/// at [0, 1] and halves until it is narrower than the rescaled precision.
/// At each midpoint the bounded-payoff game is solved until either a lower
/// certificate (the deviator's best response against the average mediator
/// strategy scores at least `-eps`) or an upper certificate (the mediator's
/// best response against the average deviator stays negative) appears. The
/// returned strategy comes from the last lower certificate; its objective is
/// within `2 * epsilon` of the optimum and its equilibrium gap within
/// `epsilon`, both in original units.
pub fn solve_binary_search(
    m: &Arc<MediatorAugmentedGame>,
    config: &BinarySearchConfig,
) -> Result<SolveReport, BinarySearchError> {
    if config.epsilon <= 0.0 {
        return Err(GameError::Invariant("precision must be positive".into()).into());
    }
    let start = Instant::now();
    let rescaled = Arc::new(m.rescaled()?);

    // Precision in rescaled units: divide by the largest original range so
    // that every rescaled-unit guarantee maps back within epsilon.
    let max_range = (0..=m.num_players())
        .map(|a| {
            let (lo, hi) = m.utility_range(a);
            hi - lo
        })
        .fold(0.0f64, f64::max);
    if max_range <= 1e-12 {
        // Fully degenerate: every strategy is optimal and unexploitable.
        let mu = SequenceFormStrategy::uniform(m.mediator_treeplex());
        let cert = certify(m, &mu)?;
        return Ok(report_from_bisection(
            mu.clone(),
            mu,
            cert,
            config.epsilon,
            Vec::new(),
            0,
            start,
            Vec::new(),
        ));
    }
    let eps = (config.epsilon / max_range).min(0.5);

    let zs = Arc::new(build_l2(&rescaled, 0.5)?);
    let mut sp = SelfPlay::new(zs.clone(), config.algo, config.algo, config.alternating, None);

    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    let mut bracket = Vec::new();
    let mut best: Option<(SequenceFormStrategy, SequenceFormStrategy)> = None;
    let mut iterations = 0u64;
    let mut trace = Vec::new();

    while hi - lo > eps {
        let tau = 0.5 * (lo + hi);
        let (lower_ok, avg, last) = solve_threshold(
            &mut sp,
            tau,
            (lo, hi),
            eps,
            config,
            start,
            &mut iterations,
            &mut trace,
        )?;
        bracket.push((tau, !lower_ok));
        if lower_ok {
            lo = tau;
            best = Some((avg, last));
        } else {
            hi = tau;
        }
    }
    // If every midpoint certified high, anchor at the bracket's low end;
    // the value at tau = lo is nonnegative whenever an equilibrium exists.
    if best.is_none() {
        let (lower_ok, avg, last) = solve_threshold(
            &mut sp,
            lo,
            (lo, hi),
            eps,
            config,
            start,
            &mut iterations,
            &mut trace,
        )?;
        bracket.push((lo, !lower_ok));
        if lower_ok {
            best = Some((avg, last));
        }
    }
    let (avg, last) = best.ok_or_else(|| {
        BinarySearchError::Game(GameError::Invariant(
            "no threshold admitted a lower certificate; the instance may have no direct \
             equilibrium"
                .into(),
        ))
    })?;

    let cert = certify(m, &avg)?;
    Ok(report_from_bisection(
        avg,
        last,
        cert,
        config.epsilon,
        bracket,
        iterations,
        start,
        trace,
    ))
}

/// Inner solve of one thresholded game until a certificate appears.
/// Returns `(true, ...)` on a lower certificate (the average mediator
/// strategy secures value at least `-eps`), `(false, ...)` on an upper one
/// (the game value is provably negative).
#[allow(clippy::too_many_arguments)]
fn solve_threshold(
    sp: &mut SelfPlay,
    tau: f64,
    current_bracket: (f64, f64),
    eps: f64,
    config: &BinarySearchConfig,
    start: Instant,
    iterations: &mut u64,
    trace: &mut Vec<TracePoint>,
) -> Result<(bool, SequenceFormStrategy, SequenceFormStrategy), BinarySearchError> {
    sp.reparameterize(tau);
    let mut best_lower = f64::NEG_INFINITY;
    let mut best_upper = f64::INFINITY;
    let mut spent = 0u64;
    while spent < config.inner_budget {
        let batch = config.check_every.min(config.inner_budget - spent);
        sp.run(batch);
        spent += batch;
        *iterations += batch;
        let avg_med = sp.average_mediator();
        let lower = sp.worst_case_value_of(&avg_med);
        best_lower = best_lower.max(lower);
        let avg_dev = sp.average_deviator();
        let upper = sp.best_response_value_vs_deviator(&avg_dev);
        best_upper = best_upper.min(upper);
        trace.push(TracePoint {
            iter: *iterations,
            lambda_or_tau: tau,
            objective: None,
            max_dev_gain: None,
            saddle_gap: upper - lower,
            last_iter_gap: f64::NAN,
            wall_ms: start.elapsed().as_millis(),
        });
        if lower >= -eps {
            return Ok((true, avg_med, sp.last_mediator()));
        }
        if upper < -CERT_SLACK {
            return Ok((false, avg_med, sp.last_mediator()));
        }
    }
    Err(BinarySearchError::Budget(BudgetExhausted {
        bracket: current_bracket,
        tau,
        best_lower_certificate: best_lower,
        best_upper_certificate: best_upper,
    }))
}

#[allow(clippy::too_many_arguments)]
fn report_from_bisection(
    strategy: SequenceFormStrategy,
    last_strategy: SequenceFormStrategy,
    cert: Certificate,
    epsilon: f64,
    bracket: Vec<(f64, bool)>,
    iterations: u64,
    start: Instant,
    trace: Vec<TracePoint>,
) -> SolveReport {
    SolveReport {
        method: MethodInfo::BinarySearch {
            epsilon,
            bracket,
        },
        objective: cert.objective,
        equilibrium_gap: cert.equilibrium_gap,
        per_player_gains: cert.per_player_gains,
        saddle_gap: f64::NAN,
        last_iterate_gap: f64::NAN,
        optimality_bound: None,
        gap_bound: None,
        iterations,
        wall_ms: start.elapsed().as_millis(),
        strategy,
        last_strategy,
        trace,
    }
}
