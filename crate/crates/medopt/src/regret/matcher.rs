//! Counterfactual regret matching over a treeplex.
//!
//! One `RegretState` owns an agent's learning state for a repeated game in
//! which the agent observes, each iteration, a utility gradient over its
//! sequences. Local regret matching at every infoset yields the next
//! behavioral strategy, converted to sequence form in one forward pass.
//!
//! Variants:
//! - `Rm`: plain regret matching (cumulative regrets may go negative);
//! - `RmPlus`: regrets clamped at zero after every update, linear strategy
//!   averaging (the CFR+ convention);
//! - `Dcfr`: positive regrets discounted by `t^1.5 / (t^1.5 + 1)`, negative
//!   regrets halved, quadratic strategy averaging;
//! - `PcfrPlus`: clamped regrets plus a prediction term equal to the last
//!   instantaneous regret, quadratic strategy averaging.

use std::sync::Arc;

use crate::game::{best_response_value, SequenceFormStrategy, Treeplex};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algo {
    Rm,
    RmPlus,
    Dcfr,
    PcfrPlus,
}

impl Algo {
    pub fn parse(name: &str) -> Option<Algo> {
        match name.to_ascii_lowercase().as_str() {
            "rm" | "cfr" => Some(Algo::Rm),
            "rm+" | "cfr+" | "rmplus" | "cfrplus" => Some(Algo::RmPlus),
            "dcfr" => Some(Algo::Dcfr),
            "pcfr+" | "pcfrplus" | "pcfr" => Some(Algo::PcfrPlus),
            _ => None,
        }
    }

    fn strategy_weight(self, t: u64) -> f64 {
        match self {
            // Linear averaging for the regret-matching family, quadratic for
            // the discounted and predictive variants.
            Algo::Rm | Algo::RmPlus => t as f64,
            Algo::Dcfr | Algo::PcfrPlus => (t as f64) * (t as f64),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RegretState {
    algo: Algo,
    tp: Arc<Treeplex>,
    /// Cumulative regret per sequence (per infoset-action pair).
    regrets: Vec<f64>,
    /// Prediction of the next instantaneous regret (PCFR+ only).
    prediction: Vec<f64>,
    /// Weighted cumulative sequence-form strategy and its total weight.
    avg_values: Vec<f64>,
    avg_weight: f64,
    /// Completed updates.
    t: u64,
    /// Measured-regret instrumentation: cumulative gradient and the total
    /// utility of the strategies actually played.
    cum_gradient: Vec<f64>,
    cum_played: f64,
}

impl RegretState {
    pub fn new(algo: Algo, tp: Arc<Treeplex>) -> Self {
        let n = tp.num_sequences();
        RegretState {
            algo,
            tp,
            regrets: vec![0.0; n],
            prediction: vec![0.0; n],
            avg_values: vec![0.0; n],
            avg_weight: 0.0,
            t: 0,
            cum_gradient: vec![0.0; n],
            cum_played: 0.0,
        }
    }

    pub fn algo(&self) -> Algo {
        self.algo
    }

    pub fn treeplex(&self) -> &Arc<Treeplex> {
        &self.tp
    }

    pub fn iterations(&self) -> u64 {
        self.t
    }

    /// Behavioral strategy per infoset proportional to clamped regrets
    /// (uniform where nothing is positive), written into sequence slots.
    fn behavioral(&self) -> Vec<f64> {
        let mut b = vec![0.0; self.tp.num_sequences()];
        for inf in self.tp.infosets() {
            let range = inf.seq_start..inf.seq_start + inf.num_actions;
            let mut total = 0.0;
            for s in range.clone() {
                let r = (self.regrets[s] + self.prediction[s]).max(0.0);
                b[s] = r;
                total += r;
            }
            if total > 0.0 {
                for s in range {
                    b[s] /= total;
                }
            } else {
                let u = 1.0 / inf.num_actions as f64;
                for s in range {
                    b[s] = u;
                }
            }
        }
        b
    }

    /// The strategy the state would play now. Deterministic; does not
    /// advance the state.
    pub fn next_strategy(&self) -> SequenceFormStrategy {
        SequenceFormStrategy::from_behavioral(&self.tp, &self.behavioral())
    }

    /// Observes the utility gradient for the strategy from
    /// [`next_strategy`](Self::next_strategy) and updates regrets and the
    /// averaged strategy.
    pub fn observe_utility(&mut self, gradient: &[f64]) {
        assert_eq!(gradient.len(), self.tp.num_sequences(), "gradient length");
        debug_assert!(gradient.iter().all(|g| g.is_finite()), "finite utility");
        let behavioral = self.behavioral();
        let played = SequenceFormStrategy::from_behavioral(&self.tp, &behavioral);
        self.t += 1;

        // Backward pass: counterfactual action values into parent sequences.
        let mut val = gradient.to_vec();
        let mut inst = vec![0.0; self.tp.num_sequences()];
        for inf in self.tp.infosets().iter().rev() {
            let range = inf.seq_start..inf.seq_start + inf.num_actions;
            let mut v_infoset = 0.0;
            for s in range.clone() {
                v_infoset += behavioral[s] * val[s];
            }
            for s in range {
                inst[s] = val[s] - v_infoset;
            }
            val[inf.parent_seq] += v_infoset;
        }

        match self.algo {
            Algo::Rm => {
                for s in 0..self.regrets.len() {
                    self.regrets[s] += inst[s];
                }
            }
            Algo::RmPlus => {
                for s in 0..self.regrets.len() {
                    self.regrets[s] = (self.regrets[s] + inst[s]).max(0.0);
                }
            }
            Algo::Dcfr => {
                let tf = self.t as f64;
                let pos = tf.powf(1.5) / (tf.powf(1.5) + 1.0);
                let neg = 0.5;
                for s in 0..self.regrets.len() {
                    let r = self.regrets[s] + inst[s];
                    self.regrets[s] = if r > 0.0 { r * pos } else { r * neg };
                }
            }
            Algo::PcfrPlus => {
                for s in 0..self.regrets.len() {
                    self.regrets[s] = (self.regrets[s] + inst[s]).max(0.0);
                }
                self.prediction.copy_from_slice(&inst);
            }
        }
        debug_assert!(
            !matches!(self.algo, Algo::RmPlus | Algo::PcfrPlus)
                || self.regrets.iter().all(|&r| r >= 0.0),
            "clamped regrets stay nonnegative"
        );

        let w = self.algo.strategy_weight(self.t);
        for s in 0..self.avg_values.len() {
            self.avg_values[s] += w * played.values[s];
            self.cum_gradient[s] += gradient[s];
        }
        self.avg_weight += w;
        self.cum_played += played
            .values
            .iter()
            .zip(gradient)
            .map(|(x, g)| x * g)
            .sum::<f64>();
    }

    /// Weighted average of all strategies played so far (uniform before the
    /// first update). Always a valid treeplex point.
    pub fn average_strategy(&self) -> SequenceFormStrategy {
        if self.avg_weight == 0.0 {
            return SequenceFormStrategy::uniform(&self.tp);
        }
        let values = self.avg_values.iter().map(|v| v / self.avg_weight).collect();
        SequenceFormStrategy::new(self.tp.agent, values)
    }

    /// Exact external regret accumulated so far: the best fixed sequence-form
    /// strategy against the observed gradients, minus what was earned.
    pub fn measured_regret(&self) -> f64 {
        best_response_value(&self.tp, &self.cum_gradient) - self.cum_played
    }

    /// Total utility earned by the played strategies.
    pub fn cumulative_played(&self) -> f64 {
        self.cum_played
    }

    pub fn cumulative_gradient(&self) -> &[f64] {
        &self.cum_gradient
    }

    /// Resets the strategy average (used when an outer loop reuses learned
    /// regrets on a reweighted game) without touching the regrets.
    pub fn reset_average(&mut self) {
        self.avg_values.iter_mut().for_each(|v| *v = 0.0);
        self.avg_weight = 0.0;
        self.cum_gradient.iter_mut().for_each(|v| *v = 0.0);
        self.cum_played = 0.0;
        self.t = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{GameBuilder, Treeplex};

    /// One infoset, `k` actions, via a tiny one-shot game.
    fn simplex_tp(k: usize) -> Arc<Treeplex> {
        let mut b = GameBuilder::new(1);
        let inf = b.infoset_n(1, "only", k);
        let terms: Vec<usize> = (0..k).map(|i| b.terminal(vec![0.0, i as f64])).collect();
        let root = b.agent(1, inf, terms);
        let game = b.finish(root).unwrap();
        Arc::new(Treeplex::for_agent(&game, 1).unwrap())
    }

    #[test]
    fn fresh_state_is_uniform() {
        let tp = simplex_tp(3);
        let s = RegretState::new(Algo::Rm, tp).next_strategy();
        for a in 1..=3 {
            assert!((s.values[a] - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn regret_matching_proportions() {
        // Cumulative regrets (3, 1) over two actions give probabilities
        // (3/4, 1/4).
        let tp = simplex_tp(2);
        let mut st = RegretState::new(Algo::Rm, tp);
        st.regrets[1] = 3.0;
        st.regrets[2] = 1.0;
        let s = st.next_strategy();
        assert!((s.values[1] - 0.75).abs() < 1e-12);
        assert!((s.values[2] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn rm_plus_clamps_negative_regret() {
        let tp = simplex_tp(2);
        let mut st = RegretState::new(Algo::RmPlus, tp.clone());
        // Action 0 better by 1: instantaneous regret +1/2 at 0, -1/2 at 1.
        st.observe_utility(&[0.0, 1.0, 0.0]);
        assert!(st.regrets[1] > 0.0);
        assert_eq!(st.regrets[2], 0.0);

        let mut plain = RegretState::new(Algo::Rm, tp);
        plain.observe_utility(&[0.0, 1.0, 0.0]);
        assert!(plain.regrets[2] < 0.0);
    }

    #[test]
    fn dcfr_discount_at_t1_is_half() {
        // 1^1.5 / (1^1.5 + 1) = 1/2 for positive regrets at t = 1.
        let tp = simplex_tp(2);
        let mut st = RegretState::new(Algo::Dcfr, tp);
        st.observe_utility(&[0.0, 1.0, 0.0]);
        // Instantaneous regrets are (+1/2, -1/2); after discounting the
        // positive is halved to 1/4 and the negative halved to -1/4.
        assert!((st.regrets[1] - 0.25).abs() < 1e-12);
        assert!((st.regrets[2] + 0.25).abs() < 1e-12);
    }

    #[test]
    fn sublinear_external_regret_on_adversarial_stream() {
        // Independent random utilities force regret to grow about like
        // sqrt(T); the average regret must shrink markedly between T = 100
        // and T = 10000.
        use rand::{Rng, SeedableRng};
        let tp = simplex_tp(3);
        let mut st = RegretState::new(Algo::RmPlus, tp);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let mut at_100 = 0.0;
        for t in 1..=10_000u64 {
            let g: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
            st.observe_utility(&g);
            if t == 100 {
                at_100 = st.measured_regret() / 100.0;
            }
        }
        let at_10k = st.measured_regret() / 10_000.0;
        assert!(at_100 > 0.0, "stream should be adversarial at T=100, got {at_100}");
        assert!(
            at_10k < at_100 / 4.0,
            "average regret {at_10k} vs {at_100} did not shrink"
        );
    }

    #[test]
    fn average_strategy_stays_on_treeplex() {
        let tp = simplex_tp(4);
        let mut st = RegretState::new(Algo::PcfrPlus, tp.clone());
        for t in 0..200u64 {
            let g: Vec<f64> = (0..5).map(|s| ((t * 7 + s * 13) % 11) as f64 / 11.0).collect();
            st.observe_utility(&g);
            st.average_strategy().validate(&tp, 1e-9).unwrap();
        }
    }
}
