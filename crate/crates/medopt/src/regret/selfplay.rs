//! Self-play on a zero-sum reduction.
//!
//! Both agents run treeplex regret matching against utility gradients,
//! computed as single passes over the reduction's compiled terminal arrays.
//! Updates are simultaneous by default, with alternating updates available
//! as a speedup. Saddle gaps are measured by exact best responses at a
//! fixed cadence; long terminal passes fan out over fixed-size chunks whose
//! partial sums combine in index order, so results do not depend on the
//! thread count.

use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;

use crate::encode::{Provenance, ZeroSumGame};
use crate::game::{best_response_value, GameError, GameResult, SequenceFormStrategy};

use super::matcher::{Algo, RegretState};

/// Multiplier schedule for direct-Lagrangian runs: fixed, or set from the
/// declared horizon before the run starts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaSchedule {
    Fixed(f64),
    /// `lambda = T^(1/4)`: balances optimality and equilibrium gap under
    /// plain regret minimizers.
    HorizonQuarter,
    /// `lambda = T^(1/2)`: the faster schedule for optimistic learners.
    HorizonHalf,
}

impl LambdaSchedule {
    pub fn resolve(&self, horizon: u64) -> f64 {
        match self {
            LambdaSchedule::Fixed(l) => *l,
            LambdaSchedule::HorizonQuarter => (horizon as f64).powf(0.25),
            LambdaSchedule::HorizonHalf => (horizon as f64).sqrt(),
        }
    }

    pub fn parse(text: &str) -> Option<LambdaSchedule> {
        match text.to_ascii_lowercase().as_str() {
            "sqrt4" | "t14" => Some(LambdaSchedule::HorizonQuarter),
            "sqrt2" | "t12" => Some(LambdaSchedule::HorizonHalf),
            other => other.parse::<f64>().ok().map(LambdaSchedule::Fixed),
        }
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct TracePoint {
    pub iter: u64,
    /// Multiplier (L1) or threshold (L2) in effect.
    pub lambda_or_tau: f64,
    /// Mediator objective of the average strategy in the source augmented
    /// game, when one exists.
    pub objective: Option<f64>,
    /// Largest deviation gain of the average strategy in the source game.
    pub max_dev_gain: Option<f64>,
    /// Saddle gap of the average strategy pair in the zero-sum game.
    pub saddle_gap: f64,
    /// Saddle gap of the last iterates.
    pub last_iter_gap: f64,
    pub wall_ms: u128,
}

#[derive(Debug, Clone)]
pub struct SelfPlayConfig {
    pub algo_max: Algo,
    pub algo_min: Algo,
    pub iterations: u64,
    pub alternating: bool,
    /// Gap-evaluation cadence; `None` means `max(T / 100, 1)`.
    pub gap_every: Option<u64>,
    /// Multiplier schedule; only valid for L1-provenance games.
    pub schedule: Option<LambdaSchedule>,
}

impl SelfPlayConfig {
    pub fn new(algo: Algo, iterations: u64) -> Self {
        SelfPlayConfig {
            algo_max: algo,
            algo_min: algo,
            iterations,
            alternating: false,
            gap_every: None,
            schedule: None,
        }
    }
}

pub struct SelfPlayOutcome {
    pub average_mediator: SequenceFormStrategy,
    pub last_mediator: SequenceFormStrategy,
    pub average_deviator: SequenceFormStrategy,
    pub last_deviator: SequenceFormStrategy,
    pub trace: Vec<TracePoint>,
    pub iterations: u64,
    /// Sum of both agents' measured regrets at the end of the run.
    pub regret_sum: f64,
    pub param: f64,
}

/// Terminal-array gradient engine plus the two learners.
pub struct SelfPlay {
    zs: Arc<ZeroSumGame>,
    /// Chance-weighted mediator payoff per terminal at the active parameter.
    weights: Vec<f64>,
    param: f64,
    med: RegretState,
    dev: RegretState,
    alternating: bool,
}

/// Terminal chunk length for parallel gradient passes. Fixed so that the
/// floating-point reduction order never depends on the thread count.
const CHUNK: usize = 1 << 18;

impl SelfPlay {
    pub fn new(
        zs: Arc<ZeroSumGame>,
        algo_max: Algo,
        algo_min: Algo,
        alternating: bool,
        param: Option<f64>,
    ) -> Self {
        let param = param.unwrap_or_else(|| zs.param());
        let weights = zs.weights_at(param);
        let med = RegretState::new(algo_max, zs.mediator_treeplex().clone());
        let dev = RegretState::new(algo_min, zs.deviator_treeplex().clone());
        SelfPlay {
            zs,
            weights,
            param,
            med,
            dev,
            alternating,
        }
    }

    pub fn zero_sum(&self) -> &Arc<ZeroSumGame> {
        &self.zs
    }

    pub fn param(&self) -> f64 {
        self.param
    }

    /// Re-weights the game (a new threshold or multiplier) and resets the
    /// strategy averages while keeping accumulated regrets as a warm start.
    pub fn reparameterize(&mut self, param: f64) {
        self.param = param;
        self.weights = self.zs.weights_at(param);
        self.med.reset_average();
        self.dev.reset_average();
    }

    /// Mediator utility gradient given the deviator's sequence values.
    pub fn gradient_mediator(&self, dev_vals: &[f64]) -> Vec<f64> {
        let (term_med, term_dev) = self.zs.terminal_seqs();
        let n = self.zs.mediator_treeplex().num_sequences();
        gradient_pass(n, term_med, term_dev, &self.weights, dev_vals, 1.0)
    }

    /// Deviator utility gradient (the deviator minimizes the mediator's
    /// payoff, so its own utility is the negation).
    pub fn gradient_deviator(&self, med_vals: &[f64]) -> Vec<f64> {
        let (term_med, term_dev) = self.zs.terminal_seqs();
        let n = self.zs.deviator_treeplex().num_sequences();
        gradient_pass(n, term_dev, term_med, &self.weights, med_vals, -1.0)
    }

    /// One self-play iteration.
    pub fn step(&mut self) {
        if self.alternating {
            let x_dev = self.dev.next_strategy();
            let g_med = self.gradient_mediator(&x_dev.values);
            self.med.observe_utility(&g_med);
            let x_med = self.med.next_strategy();
            let g_dev = self.gradient_deviator(&x_med.values);
            self.dev.observe_utility(&g_dev);
        } else {
            let x_med = self.med.next_strategy();
            let x_dev = self.dev.next_strategy();
            let g_med = self.gradient_mediator(&x_dev.values);
            let g_dev = self.gradient_deviator(&x_med.values);
            self.med.observe_utility(&g_med);
            self.dev.observe_utility(&g_dev);
        }
    }

    pub fn run(&mut self, iterations: u64) {
        for _ in 0..iterations {
            self.step();
        }
    }

    pub fn iterations(&self) -> u64 {
        self.med.iterations()
    }

    pub fn average_mediator(&self) -> SequenceFormStrategy {
        self.med.average_strategy()
    }

    pub fn average_deviator(&self) -> SequenceFormStrategy {
        self.dev.average_strategy()
    }

    pub fn last_mediator(&self) -> SequenceFormStrategy {
        self.med.next_strategy()
    }

    pub fn last_deviator(&self) -> SequenceFormStrategy {
        self.dev.next_strategy()
    }

    /// Best payoff the mediator could get against `dev`.
    pub fn best_response_value_vs_deviator(&self, dev: &SequenceFormStrategy) -> f64 {
        best_response_value(
            self.zs.mediator_treeplex(),
            &self.gradient_mediator(&dev.values),
        )
    }

    /// Worst payoff the deviator can force against `mu` (the deviator's best
    /// response, in mediator-payoff units).
    pub fn worst_case_value_of(&self, mu: &SequenceFormStrategy) -> f64 {
        -best_response_value(self.zs.deviator_treeplex(), &self.gradient_deviator(&mu.values))
    }

    /// Saddle gap of a strategy pair: how much each side can still improve.
    pub fn saddle_gap(&self, mu: &SequenceFormStrategy, dev: &SequenceFormStrategy) -> f64 {
        self.best_response_value_vs_deviator(dev) - self.worst_case_value_of(mu)
    }

    /// Sum of both agents' exactly-measured regrets.
    pub fn regret_sum(&self) -> f64 {
        self.med.measured_regret() + self.dev.measured_regret()
    }
}

fn gradient_pass(
    out_len: usize,
    own_seq: &[u32],
    other_seq: &[u32],
    weights: &[f64],
    other_vals: &[f64],
    sign: f64,
) -> Vec<f64> {
    let z = weights.len();
    if z <= CHUNK {
        let mut g = vec![0.0; out_len];
        for t in 0..z {
            g[own_seq[t] as usize] += sign * weights[t] * other_vals[other_seq[t] as usize];
        }
        return g;
    }
    let chunks: Vec<Vec<f64>> = (0..z.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(z);
            let mut g = vec![0.0; out_len];
            for t in lo..hi {
                g[own_seq[t] as usize] += sign * weights[t] * other_vals[other_seq[t] as usize];
            }
            g
        })
        .collect();
    let mut g = vec![0.0; out_len];
    for part in chunks {
        for (acc, v) in g.iter_mut().zip(part) {
            *acc += v;
        }
    }
    g
}

/// Runs self-play on a zero-sum reduction, recording trace points (saddle
/// gaps, and objective/deviation gains when the game has an augmented-game
/// source) at the configured cadence.
pub fn selfplay(zs: &Arc<ZeroSumGame>, config: &SelfPlayConfig) -> GameResult<SelfPlayOutcome> {
    if config.iterations == 0 {
        return Err(GameError::Invariant("self-play needs at least one iteration".into()));
    }
    let param = match (&config.schedule, &zs.provenance) {
        (None, _) => None,
        (Some(s), Provenance::L1 { .. }) => Some(s.resolve(config.iterations)),
        (Some(_), _) => {
            return Err(GameError::Invariant(
                "multiplier schedules apply only to direct-Lagrangian games".into(),
            ))
        }
    };
    let mut sp = SelfPlay::new(
        zs.clone(),
        config.algo_max,
        config.algo_min,
        config.alternating,
        param,
    );
    let cadence = config.gap_every.unwrap_or((config.iterations / 100).max(1));
    let start = Instant::now();
    let mut trace = Vec::new();
    let mut done = 0;
    while done < config.iterations {
        let batch = cadence.min(config.iterations - done);
        sp.run(batch);
        done += batch;
        trace.push(trace_point(&sp, done, start));
    }
    Ok(SelfPlayOutcome {
        average_mediator: sp.average_mediator(),
        last_mediator: sp.last_mediator(),
        average_deviator: sp.average_deviator(),
        last_deviator: sp.last_deviator(),
        regret_sum: sp.regret_sum(),
        param: sp.param(),
        iterations: done,
        trace,
    })
}

pub(crate) fn trace_point(sp: &SelfPlay, iter: u64, start: Instant) -> TracePoint {
    let avg_med = sp.average_mediator();
    let avg_dev = sp.average_deviator();
    let saddle_gap = sp.saddle_gap(&avg_med, &avg_dev);
    let last_iter_gap = sp.saddle_gap(&sp.last_mediator(), &sp.last_deviator());
    let (objective, max_dev_gain) = match &sp.zs.source {
        Some(m) => {
            let obj = m.objective(&avg_med).ok();
            let gain = (1..=m.num_players())
                .map(|i| m.deviation_gain(&avg_med, i))
                .try_fold(f64::NEG_INFINITY, |acc, g| g.map(|g| acc.max(g)))
                .ok();
            (obj, gain)
        }
        None => (None, None),
    };
    TracePoint {
        iter,
        lambda_or_tau: sp.param(),
        objective,
        max_dev_gain,
        saddle_gap,
        last_iter_gap,
        wall_ms: start.elapsed().as_millis(),
    }
}
