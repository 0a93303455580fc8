//! Regret minimization over a truncated conic hull `{c * x : c in [0, K],
//! x in X}` of a treeplex `X`, composed from a treeplex minimizer and an
//! interval learner.
//!
//! The circuit forwards the full utility vector to the treeplex minimizer
//! and the scalar `<u, x>` (the utility of the point just played) to the
//! interval learner; its emitted point is the scaled strategy. The combined
//! regret over the cone is bounded by `K * max(0, R_X) + R_plus`.

use std::sync::Arc;

use crate::game::Treeplex;

use super::interval::{IntervalLearner, StepRule};
use super::matcher::{Algo, RegretState};

pub struct ConicHullMinimizer {
    inner: RegretState,
    scale: IntervalLearner,
    last_x: Vec<f64>,
    /// Instrumentation for the regret-bound property: cumulative utility
    /// vector, the interval learner's realized utility and the scalar
    /// stream total.
    cum_utility: Vec<f64>,
    scale_played: f64,
    inner_played: f64,
}

impl ConicHullMinimizer {
    pub fn new(algo: Algo, tp: Arc<Treeplex>, k: f64, eta: f64, rule: StepRule) -> Self {
        let n = tp.num_sequences();
        let inner = RegretState::new(algo, tp);
        let last_x = inner.next_strategy().values.clone();
        ConicHullMinimizer {
            inner,
            scale: IntervalLearner::maximizer(k, eta, rule),
            last_x,
            cum_utility: vec![0.0; n],
            scale_played: 0.0,
            inner_played: 0.0,
        }
    }

    pub fn bound(&self) -> f64 {
        self.scale.bound()
    }

    /// The next point of the cone: the interval learner's scale times the
    /// treeplex minimizer's strategy.
    pub fn next_point(&mut self) -> Vec<f64> {
        let x = self.inner.next_strategy();
        self.last_x = x.values.clone();
        let c = self.scale.value();
        x.values.iter().map(|v| c * v).collect()
    }

    /// Observes a utility vector over sequences: forwarded whole to the
    /// treeplex minimizer, and as `<u, x>` to the interval learner.
    pub fn observe_utility(&mut self, utility: &[f64]) {
        let scalar: f64 = utility.iter().zip(&self.last_x).map(|(u, x)| u * x).sum();
        let c = self.scale.value();
        self.inner.observe_utility(utility);
        self.scale.step(scalar);

        for (acc, u) in self.cum_utility.iter_mut().zip(utility) {
            *acc += u;
        }
        self.scale_played += c * scalar;
        self.inner_played += scalar;
    }

    /// Measured regret of the composite over the truncated cone:
    /// `max_{c, x} c * <U, x> - sum_t c_t <u_t, x_t>` with `U` the summed
    /// utilities.
    pub fn measured_cone_regret(&self) -> f64 {
        let best_dir = crate::game::best_response_value(self.inner.treeplex(), &self.cum_utility);
        self.bound() * best_dir.max(0.0) - self.scale_played
    }

    /// Measured regret of the inner treeplex minimizer.
    pub fn measured_inner_regret(&self) -> f64 {
        self.inner.measured_regret()
    }

    /// Measured regret of the interval learner over `[0, K]` against its
    /// scalar utility stream.
    pub fn measured_scale_regret(&self) -> f64 {
        let total: f64 = self.inner_played;
        self.bound() * total.max(0.0) - self.scale_played
    }

    /// The bound `K * max(0, R_X) + R_plus` from the circuit composition.
    pub fn regret_bound(&self) -> f64 {
        self.bound() * self.measured_inner_regret().max(0.0) + self.measured_scale_regret()
    }

    pub fn inner(&self) -> &RegretState {
        &self.inner
    }

    pub fn scale_value(&self) -> f64 {
        self.scale.value()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{GameBuilder, Treeplex};

    fn small_tp() -> Arc<Treeplex> {
        // Two sequential infosets for one player.
        let mut b = GameBuilder::new(1);
        let top = b.infoset_n(1, "top", 2);
        let bottom = b.infoset_n(1, "bottom", 2);
        let t1 = b.terminal(vec![0.0, 1.0]);
        let t2 = b.terminal(vec![0.0, -1.0]);
        let inner_node = b.agent(1, bottom, vec![t1, t2]);
        let t3 = b.terminal(vec![0.0, 0.5]);
        let root = b.agent(1, top, vec![inner_node, t3]);
        let game = b.finish(root).unwrap();
        Arc::new(Treeplex::for_agent(&game, 1).unwrap())
    }

    #[test]
    fn fresh_point_is_half_bound_times_uniform() {
        // The interval learner starts at K/2, the matcher uniform: for
        // K = 4 the first point is 2 * uniform.
        let tp = small_tp();
        let mut cone = ConicHullMinimizer::new(Algo::RmPlus, tp.clone(), 4.0, 0.1, StepRule::Plain);
        let p = cone.next_point();
        let u = tp.uniform();
        for (a, b) in p.iter().zip(&u) {
            assert!((a - 2.0 * b).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_utility_stream_keeps_points_constant_and_regret_zero() {
        let tp = small_tp();
        let mut cone = ConicHullMinimizer::new(Algo::RmPlus, tp, 5.0, 0.2, StepRule::Plain);
        let first = cone.next_point();
        for _ in 0..100 {
            let p = cone.next_point();
            assert_eq!(p, first);
            cone.observe_utility(&[0.0; 5]);
        }
        assert!(cone.measured_cone_regret().abs() < 1e-12);
    }

    #[test]
    fn cone_regret_bounded_by_circuit_bound() {
        use rand::{Rng, SeedableRng};
        let tp = small_tp();
        for seed in 0..50u64 {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut cone =
                ConicHullMinimizer::new(Algo::RmPlus, tp.clone(), 5.0, 0.05, StepRule::Plain);
            for _ in 0..300 {
                cone.next_point();
                let u: Vec<f64> = (0..5).map(|_| rng.random_range(-1.0..1.0)).collect();
                cone.observe_utility(&u);
            }
            assert!(
                cone.measured_cone_regret() <= cone.regret_bound() + 1e-6,
                "seed {seed}: {} > {}",
                cone.measured_cone_regret(),
                cone.regret_bound()
            );
        }
    }
}
