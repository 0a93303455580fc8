//! Expected-utility evaluation and exact best responses.
//!
//! An `Evaluator` precomputes, for every terminal, each agent's sequence id
//! and the chance reach, so expected utilities and utility gradients are
//! single passes over flat terminal arrays. Evaluation is deterministic and
//! all methods take `&self`, so one evaluator can serve many threads.

use std::sync::Arc;

use super::strategy::SequenceFormStrategy;
use super::treeplex::{Treeplex, EMPTY_SEQ};
use super::{ExtensiveFormGame, GameError, GameResult, SeqId};

/// A full strategy profile, one sequence-form strategy per agent `0..=n`.
pub type Profile<'a> = &'a [SequenceFormStrategy];

pub struct Evaluator {
    game: Arc<ExtensiveFormGame>,
    treeplexes: Vec<Arc<Treeplex>>,
    /// `terminal * num_agents + agent` -> sequence id.
    term_seq: Vec<u32>,
}

impl Evaluator {
    /// Builds treeplexes for every agent. Fails if any agent (including the
    /// mediator) has imperfect recall.
    pub fn new(game: Arc<ExtensiveFormGame>) -> GameResult<Evaluator> {
        let tps = (0..game.num_agents())
            .map(|a| Treeplex::for_agent(&game, a).map(Arc::new))
            .collect::<GameResult<Vec<_>>>()?;
        Self::with_treeplexes(game, tps)
    }

    /// Uses caller-provided treeplexes. Each treeplex must cover every
    /// infoset its agent has in `game`; this is how strategies defined on an
    /// augmented game's decision space are evaluated in derived games that
    /// only contain part of it.
    pub fn with_treeplexes(
        game: Arc<ExtensiveFormGame>,
        treeplexes: Vec<Arc<Treeplex>>,
    ) -> GameResult<Evaluator> {
        if treeplexes.len() != game.num_agents() {
            return Err(GameError::Dimension(format!(
                "{} treeplexes for {} agents",
                treeplexes.len(),
                game.num_agents()
            )));
        }
        let num_agents = game.num_agents();
        let mut term_seq = vec![0u32; game.num_terminals() * num_agents];
        for (agent, tp) in treeplexes.iter().enumerate() {
            let seqs = tp.terminal_seqs(&game)?;
            for (z, &s) in seqs.iter().enumerate() {
                term_seq[z * num_agents + agent] = s as u32;
            }
        }
        Ok(Evaluator {
            game,
            treeplexes,
            term_seq,
        })
    }

    pub fn game(&self) -> &ExtensiveFormGame {
        &self.game
    }

    pub fn treeplex(&self, agent: usize) -> &Arc<Treeplex> {
        &self.treeplexes[agent]
    }

    #[inline]
    pub fn terminal_seq(&self, terminal: usize, agent: usize) -> SeqId {
        self.term_seq[terminal * self.game.num_agents() + agent] as usize
    }

    /// Expected utility vector for a full profile: one value per agent,
    /// summing `chance(z) * prod_i x_i[seq_i(z)] * u(z)` over terminals.
    pub fn expected_utilities(&self, profile: Profile) -> GameResult<Vec<f64>> {
        let num_agents = self.game.num_agents();
        if profile.len() != num_agents {
            return Err(GameError::Dimension(format!(
                "profile has {} strategies for {} agents",
                profile.len(),
                num_agents
            )));
        }
        for (a, s) in profile.iter().enumerate() {
            if s.values.len() != self.treeplexes[a].num_sequences() {
                return Err(GameError::Dimension(format!(
                    "agent {a}: strategy length {} != {} sequences",
                    s.values.len(),
                    self.treeplexes[a].num_sequences()
                )));
            }
        }
        let mut out = vec![0.0; num_agents];
        for z in 0..self.game.num_terminals() {
            let mut reach = self.game.chance_reach(z);
            for a in 0..num_agents {
                reach *= profile[a].values[self.terminal_seq(z, a)];
            }
            if reach != 0.0 {
                let u = self.game.utility(z);
                for a in 0..num_agents {
                    out[a] += reach * u[a];
                }
            }
        }
        Ok(out)
    }

    /// Utility gradient of `agent`: a vector `g` over the agent's sequences
    /// with `<g, x> = u_agent(x, others)` for every sequence-form `x`.
    pub fn gradient(&self, agent: usize, others: Profile) -> GameResult<Vec<f64>> {
        let num_agents = self.game.num_agents();
        let mut g = vec![0.0; self.treeplexes[agent].num_sequences()];
        for z in 0..self.game.num_terminals() {
            let mut reach = self.game.chance_reach(z);
            for a in 0..num_agents {
                if a != agent {
                    reach *= others[a].values[self.terminal_seq(z, a)];
                }
            }
            if reach != 0.0 {
                g[self.terminal_seq(z, agent)] += reach * self.game.utility(z)[agent];
            }
        }
        Ok(g)
    }

    /// Exact best response of `agent` against fixed strategies of everyone
    /// else. Returns the maximizing pure strategy and its value. Ties break
    /// toward the lowest action index, so identical inputs give identical
    /// outputs.
    ///
    /// `others[agent]` is ignored and may be any placeholder.
    pub fn best_response(
        &self,
        agent: usize,
        others: Profile,
    ) -> GameResult<(SequenceFormStrategy, f64)> {
        let g = self.gradient(agent, others)?;
        Ok(best_response_to_gradient(&self.treeplexes[agent], &g))
    }
}

/// Best response against an explicit sequence-form gradient: one backward
/// pass accumulating infoset values into parent sequences, then a forward
/// pass extracting the argmax pure strategy.
pub fn best_response_to_gradient(tp: &Treeplex, gradient: &[f64]) -> (SequenceFormStrategy, f64) {
    let mut val = gradient.to_vec();
    let mut choice = vec![0usize; tp.num_infosets()];
    for (idx, inf) in tp.infosets().iter().enumerate().rev() {
        let mut best = f64::NEG_INFINITY;
        let mut best_a = 0;
        for a in 0..inf.num_actions {
            let v = val[inf.seq_start + a];
            if v > best {
                best = v;
                best_a = a;
            }
        }
        choice[idx] = best_a;
        val[inf.parent_seq] += best;
    }
    let strategy = SequenceFormStrategy::pure(tp, &choice);
    (strategy, val[EMPTY_SEQ])
}

/// Best-response value only.
pub fn best_response_value(tp: &Treeplex, gradient: &[f64]) -> f64 {
    let mut val = gradient.to_vec();
    for inf in tp.infosets().iter().rev() {
        let mut best = f64::NEG_INFINITY;
        for a in 0..inf.num_actions {
            best = best.max(val[inf.seq_start + a]);
        }
        val[inf.parent_seq] += best;
    }
    val[EMPTY_SEQ]
}
