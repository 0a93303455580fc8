//! Sequence-form strategies.

use rand::Rng;

use super::treeplex::{Treeplex, EMPTY_SEQ};
use super::{GameError, GameResult};

/// A strategy of one agent in sequence form: one value per sequence of the
/// agent's treeplex, with flow conservation at every infoset.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceFormStrategy {
    pub agent: usize,
    pub values: Vec<f64>,
}

impl SequenceFormStrategy {
    pub fn new(agent: usize, values: Vec<f64>) -> Self {
        SequenceFormStrategy { agent, values }
    }

    /// Uniform behavioral play everywhere.
    pub fn uniform(tp: &Treeplex) -> Self {
        SequenceFormStrategy {
            agent: tp.agent,
            values: tp.uniform(),
        }
    }

    /// Converts per-infoset behavioral probabilities (indexed like the
    /// treeplex's sequences) into sequence form.
    pub fn from_behavioral(tp: &Treeplex, behavioral: &[f64]) -> Self {
        let mut values = vec![0.0; tp.num_sequences()];
        values[EMPTY_SEQ] = 1.0;
        for inf in tp.infosets() {
            let reach = values[inf.parent_seq];
            for s in inf.seq_start..inf.seq_start + inf.num_actions {
                values[s] = reach * behavioral[s];
            }
        }
        SequenceFormStrategy {
            agent: tp.agent,
            values,
        }
    }

    /// A pure strategy from per-infoset action choices (by treeplex infoset
    /// index). Unreachable infosets get zero mass on all their sequences.
    pub fn pure(tp: &Treeplex, choices: &[usize]) -> Self {
        assert_eq!(choices.len(), tp.num_infosets());
        let mut values = vec![0.0; tp.num_sequences()];
        values[EMPTY_SEQ] = 1.0;
        for (idx, inf) in tp.infosets().iter().enumerate() {
            if values[inf.parent_seq] > 0.0 {
                values[inf.seq_start + choices[idx]] = 1.0;
            }
        }
        SequenceFormStrategy {
            agent: tp.agent,
            values,
        }
    }

    /// Random behavioral strategy, each infoset's distribution drawn from
    /// normalized uniforms. Deterministic given the RNG state.
    pub fn random<R: Rng>(tp: &Treeplex, rng: &mut R) -> Self {
        let mut behavioral = vec![0.0; tp.num_sequences()];
        for inf in tp.infosets() {
            let mut total = 0.0;
            for s in inf.seq_start..inf.seq_start + inf.num_actions {
                let w: f64 = rng.random::<f64>() + 1e-9;
                behavioral[s] = w;
                total += w;
            }
            for s in inf.seq_start..inf.seq_start + inf.num_actions {
                behavioral[s] /= total;
            }
        }
        Self::from_behavioral(tp, &behavioral)
    }

    /// Checks entry range, unit mass at the empty sequence and per-infoset
    /// flow conservation against `tol`.
    pub fn validate(&self, tp: &Treeplex, tol: f64) -> GameResult<()> {
        if self.values.len() != tp.num_sequences() {
            return Err(GameError::Dimension(format!(
                "strategy has {} entries, treeplex has {} sequences",
                self.values.len(),
                tp.num_sequences()
            )));
        }
        if (self.values[EMPTY_SEQ] - 1.0).abs() > tol {
            return Err(GameError::Invariant(format!(
                "empty sequence has value {}, expected 1",
                self.values[EMPTY_SEQ]
            )));
        }
        for (i, &v) in self.values.iter().enumerate() {
            if !(-tol..=1.0 + tol).contains(&v) {
                return Err(GameError::Invariant(format!(
                    "sequence {i} has value {v} outside [0, 1]"
                )));
            }
        }
        for inf in tp.infosets() {
            let sum: f64 = (inf.seq_start..inf.seq_start + inf.num_actions)
                .map(|s| self.values[s])
                .sum();
            if (sum - self.values[inf.parent_seq]).abs() > tol {
                return Err(GameError::Invariant(format!(
                    "infoset {} (agent {}): children sum {} != parent {}",
                    inf.game_infoset, tp.agent, sum, self.values[inf.parent_seq]
                )));
            }
        }
        Ok(())
    }

    /// True when every entry is 0 or 1.
    pub fn is_pure(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0 || v == 1.0)
    }
}
