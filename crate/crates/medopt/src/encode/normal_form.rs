//! Correlated-equilibrium encoders for normal-form games.
//!
//! The mediator draws a pure action profile. Under the CE concept each
//! player observes its own recommended action before moving; under CCE the
//! player sees nothing. In both cases the realized profile substitutes the
//! player's move for its recommendation and everyone else follows theirs.
//!
//! Direct strategies: for CE the identity map (play what was recommended);
//! for CCE an explicit leading "follow" action, since a player who cannot
//! see the recommendation has no other way to express obedience.

use serde::{Deserialize, Serialize};

use crate::game::{
    ExtensiveFormGame, GameBuilder, GameError, GameResult, SequenceFormStrategy, Treeplex,
};

use super::{MagSource, MediatorAugmentedGame};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrelationConcept {
    /// Players observe their recommendation (correlated equilibrium).
    Ce,
    /// Players observe nothing (coarse correlated equilibrium).
    Cce,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum ObjectiveSpec {
    /// Mediator maximizes the sum of player utilities.
    Welfare,
    /// Mediator maximizes the utility of one player (1-based).
    Player(usize),
    /// Arbitrary objective tensor in profile-major order.
    Tensor(Vec<f64>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormalFormSpec {
    /// Action count per player.
    pub actions: Vec<usize>,
    /// `utilities[profile * n + (i-1)]`, profiles in row-major order with
    /// player 1's action as the most significant digit.
    pub utilities: Vec<f64>,
    pub concept: CorrelationConcept,
    pub objective: ObjectiveSpec,
}

impl NormalFormSpec {
    pub fn num_players(&self) -> usize {
        self.actions.len()
    }

    pub fn num_profiles(&self) -> usize {
        self.actions.iter().product()
    }

    fn check(&self) -> GameResult<()> {
        let n = self.num_players();
        if n < 2 {
            return Err(GameError::Invariant("need at least two players".into()));
        }
        if self.actions.iter().any(|&a| a == 0) {
            return Err(GameError::Invariant("empty action set".into()));
        }
        if self.utilities.len() != self.num_profiles() * n {
            return Err(GameError::Dimension(format!(
                "utility tensor has {} entries, expected {}",
                self.utilities.len(),
                self.num_profiles() * n
            )));
        }
        if let ObjectiveSpec::Tensor(t) = &self.objective {
            if t.len() != self.num_profiles() {
                return Err(GameError::Dimension(format!(
                    "objective tensor has {} entries, expected {}",
                    t.len(),
                    self.num_profiles()
                )));
            }
        }
        if let ObjectiveSpec::Player(p) = self.objective {
            if p == 0 || p > n {
                return Err(GameError::Dimension(format!("objective player {p} out of range")));
            }
        }
        Ok(())
    }

    fn profile_index(&self, profile: &[usize]) -> usize {
        let mut idx = 0;
        for (p, &a) in profile.iter().enumerate() {
            idx = idx * self.actions[p] + a;
        }
        idx
    }

    pub fn player_utility(&self, profile: &[usize], player: usize) -> f64 {
        self.utilities[self.profile_index(profile) * self.num_players() + (player - 1)]
    }

    pub fn objective_utility(&self, profile: &[usize]) -> f64 {
        match &self.objective {
            ObjectiveSpec::Welfare => (1..=self.num_players())
                .map(|i| self.player_utility(profile, i))
                .sum(),
            ObjectiveSpec::Player(p) => self.player_utility(profile, *p),
            ObjectiveSpec::Tensor(t) => t[self.profile_index(profile)],
        }
    }

    fn profiles(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::with_capacity(self.num_profiles());
        let n = self.num_players();
        let mut cur = vec![0usize; n];
        loop {
            out.push(cur.clone());
            let mut k = n;
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                cur[k] += 1;
                if cur[k] < self.actions[k] {
                    break;
                }
                cur[k] = 0;
            }
        }
    }

    /// Player `i`'s action count in the augmented game (with the extra
    /// "follow" action under CCE).
    fn augmented_actions(&self, player: usize) -> usize {
        match self.concept {
            CorrelationConcept::Ce => self.actions[player - 1],
            CorrelationConcept::Cce => self.actions[player - 1] + 1,
        }
    }

    /// Infoset id of player `i` when recommended `rec`. Mediator is id 0;
    /// players follow, CE keyed by recommendation.
    fn player_infoset(&self, player: usize, rec: usize) -> usize {
        let mut id = 1;
        for j in 1..player {
            id += match self.concept {
                CorrelationConcept::Ce => self.actions[j - 1],
                CorrelationConcept::Cce => 1,
            };
        }
        match self.concept {
            CorrelationConcept::Ce => id + rec,
            CorrelationConcept::Cce => id,
        }
    }

    fn declare_infosets(&self, b: &mut GameBuilder) {
        let profile_labels: Vec<String> = self
            .profiles()
            .iter()
            .map(|p| {
                p.iter()
                    .map(|a| a.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        b.infoset(0, "recommend", profile_labels);
        for i in 1..=self.num_players() {
            match self.concept {
                CorrelationConcept::Ce => {
                    for rec in 0..self.actions[i - 1] {
                        let labels = (0..self.actions[i - 1]).map(|a| a.to_string()).collect();
                        b.infoset(i, format!("p{i}_rec{rec}"), labels);
                    }
                }
                CorrelationConcept::Cce => {
                    let mut labels = vec!["follow".to_string()];
                    labels.extend((0..self.actions[i - 1]).map(|a| a.to_string()));
                    b.infoset(i, format!("p{i}"), labels);
                }
            }
        }
    }

    /// The realized action of player `i` given its recommendation and its
    /// move in the augmented game.
    fn realized(&self, player: usize, rec: usize, choice: usize) -> usize {
        let _ = player;
        match self.concept {
            CorrelationConcept::Ce => choice,
            CorrelationConcept::Cce => {
                if choice == 0 {
                    rec
                } else {
                    choice - 1
                }
            }
        }
    }

    fn terminal_utility(&self, realized: &[usize], affine: &[(f64, f64)]) -> Vec<f64> {
        let n = self.num_players();
        let mut u = Vec::with_capacity(n + 1);
        u.push(affine[0].0 * self.objective_utility(realized) + affine[0].1);
        for i in 1..=n {
            u.push(affine[i].0 * self.player_utility(realized, i) + affine[i].1);
        }
        u
    }

    pub(crate) fn build_wired(
        &self,
        affine: &[(f64, f64)],
        deviator: Option<usize>,
    ) -> GameResult<ExtensiveFormGame> {
        self.check()?;
        let n = self.num_players();
        let mut b = GameBuilder::new(n);
        self.declare_infosets(&mut b);
        let mut rec_children = Vec::with_capacity(self.num_profiles());
        for profile in self.profiles() {
            match deviator {
                None => {
                    // Everybody follows: realized = recommended.
                    rec_children.push(b.terminal(self.terminal_utility(&profile, affine)));
                }
                Some(i) => {
                    let mut choice_children = Vec::with_capacity(self.augmented_actions(i));
                    for choice in 0..self.augmented_actions(i) {
                        let mut realized = profile.clone();
                        realized[i - 1] = self.realized(i, profile[i - 1], choice);
                        choice_children.push(b.terminal(self.terminal_utility(&realized, affine)));
                    }
                    let iid = self.player_infoset(i, profile[i - 1]);
                    rec_children.push(b.agent(i, iid, choice_children));
                }
            }
        }
        let root = b.agent(0, 0, rec_children);
        b.finish(root)
    }

    pub(crate) fn materialize(&self, affine: &[(f64, f64)]) -> GameResult<ExtensiveFormGame> {
        self.check()?;
        let n = self.num_players();
        let mut b = GameBuilder::new(n);
        self.declare_infosets(&mut b);
        let mut rec_children = Vec::with_capacity(self.num_profiles());
        for profile in self.profiles() {
            // All players move in index order; each sees only what the
            // concept allows via its infoset.
            let mut realized = vec![0usize; n];
            let node = self.materialize_player(&mut b, affine, &profile, &mut realized, 1);
            rec_children.push(node);
        }
        let root = b.agent(0, 0, rec_children);
        b.finish(root)
    }

    fn materialize_player(
        &self,
        b: &mut GameBuilder,
        affine: &[(f64, f64)],
        profile: &[usize],
        realized: &mut Vec<usize>,
        player: usize,
    ) -> usize {
        if player > self.num_players() {
            return b.terminal(self.terminal_utility(realized, affine));
        }
        let mut children = Vec::with_capacity(self.augmented_actions(player));
        for choice in 0..self.augmented_actions(player) {
            realized[player - 1] = self.realized(player, profile[player - 1], choice);
            children.push(self.materialize_player(b, affine, profile, realized, player + 1));
        }
        let iid = self.player_infoset(player, profile[player - 1]);
        b.agent(player, iid, children)
    }

    pub(crate) fn direct_strategy(
        &self,
        player: usize,
        tp: &Treeplex,
    ) -> GameResult<SequenceFormStrategy> {
        let picks: Vec<usize> = tp
            .infosets()
            .iter()
            .map(|inf| match self.concept {
                CorrelationConcept::Ce => {
                    // Infoset ids for player i start at player_infoset(i, 0).
                    inf.game_infoset - self.player_infoset(player, 0)
                }
                CorrelationConcept::Cce => 0,
            })
            .collect();
        Ok(SequenceFormStrategy::pure(tp, &picks))
    }
}

/// Encodes an optimal-correlation problem over a normal-form game: the
/// mediator picks a profile of recommendations and maximizes `objective`
/// subject to every player preferring obedience.
pub fn encode_nf_correlated(spec: NormalFormSpec) -> GameResult<MediatorAugmentedGame> {
    spec.check()?;
    let n = spec.num_players();
    MediatorAugmentedGame::assemble(MagSource::NormalForm(spec), n)
}
