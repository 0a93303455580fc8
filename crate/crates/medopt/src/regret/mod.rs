//! No-regret learning over treeplexes and the self-play loop.

mod conic;
mod interval;
mod matcher;
mod selfplay;

pub use conic::ConicHullMinimizer;
pub use interval::{IntervalLearner, StepRule};
pub use matcher::{Algo, RegretState};
pub use selfplay::{selfplay, LambdaSchedule, SelfPlay, SelfPlayConfig, SelfPlayOutcome, TracePoint};
