//! Mediator-augmented games and their zero-sum reductions.
//!
//! A [`MediatorAugmentedGame`] pairs a game description (agent 0 is the
//! mediator) with one direct pure strategy per player. Solvers never touch
//! the full product tree: every consumer works through *wired* games, in
//! which all players except at most one are pinned to their direct
//! strategies and their decision nodes collapse away. The full tree is
//! materialized only on demand, for small instances.
//!
//! Infoset ids are shared across every game derived from the same augmented
//! game, so a mediator strategy indexes identically into the augmented game,
//! its wired games and the zero-sum reductions built by [`build_l1`] and
//! [`build_l2`].

mod auction;
mod normal_form;
mod zerosum;

pub use auction::{
    encode_sequential_auction, fixed_mechanism, AuctionSpec, MechanismKind, RoundOutcome,
};
pub use normal_form::{encode_nf_correlated, CorrelationConcept, NormalFormSpec, ObjectiveSpec};
pub use zerosum::{build_l1, build_l2, Provenance, ZeroSumGame};

use std::collections::HashMap;
use std::sync::Arc;

use crate::game::{
    Evaluator, ExtensiveFormGame, GameError, GameResult, SequenceFormStrategy, Treeplex,
};

/// How the underlying game tree is produced.
#[derive(Clone)]
pub(crate) enum MagSource {
    /// Fully materialized game plus per-player direct action choices
    /// (game infoset id -> action index).
    Explicit {
        game: Arc<ExtensiveFormGame>,
        choices: Arc<Vec<HashMap<usize, usize>>>,
    },
    Auction(AuctionSpec),
    NormalForm(NormalFormSpec),
}

/// A game with players pinned to their direct strategies, except for
/// `deviator` when present. Pinned players have no decision nodes; terminal
/// utilities keep the full `(n+1)`-agent layout of the source game.
pub struct WiredGame {
    /// `None`: everyone direct. `Some(i)`: player `i` plays freely.
    pub deviator: Option<usize>,
    pub game: Arc<ExtensiveFormGame>,
    pub eval: Evaluator,
    /// Auction provenance only: per terminal, the outcome of every round.
    pub outcomes: Option<Vec<Vec<RoundOutcome>>>,
}

impl WiredGame {
    /// Expected utility vector under mediator strategy `mu` (and, for a
    /// deviator game, deviation strategy `dev`).
    pub fn utilities(
        &self,
        mu: &SequenceFormStrategy,
        dev: Option<&SequenceFormStrategy>,
    ) -> GameResult<Vec<f64>> {
        let profile = self.profile(mu, dev)?;
        self.eval.expected_utilities(&profile)
    }

    /// Best response of the deviating player against `mu`; the value is the
    /// deviator's expected utility.
    pub fn deviator_best_response(
        &self,
        mu: &SequenceFormStrategy,
    ) -> GameResult<(SequenceFormStrategy, f64)> {
        let i = self
            .deviator
            .ok_or_else(|| GameError::Dimension("no deviating player in this game".into()))?;
        let profile = self.profile(mu, None)?;
        self.eval.best_response(i, &profile)
    }

    pub(crate) fn profile(
        &self,
        mu: &SequenceFormStrategy,
        dev: Option<&SequenceFormStrategy>,
    ) -> GameResult<Vec<SequenceFormStrategy>> {
        let num_agents = self.game.num_agents();
        let mut profile: Vec<SequenceFormStrategy> = (0..num_agents)
            .map(|a| SequenceFormStrategy::new(a, vec![1.0; self.eval.treeplex(a).num_sequences()]))
            .collect();
        profile[0] = mu.clone();
        if let (Some(i), Some(x)) = (self.deviator, dev) {
            profile[i] = x.clone();
        }
        Ok(profile)
    }
}

/// An extensive-form game whose agent 0 is a mediator with commitment power,
/// plus a direct pure strategy for every player. Deviating from `d_i` never
/// helps player `i` exactly when `(mu, d)` is an equilibrium.
pub struct MediatorAugmentedGame {
    pub(crate) source: MagSource,
    num_players: usize,
    /// Per-agent affine utility transform `u' = scale * u + offset`;
    /// identity unless this instance came from [`rescaled`](Self::rescaled).
    affine: Vec<(f64, f64)>,
    mediator_tp: Arc<Treeplex>,
    player_tps: Vec<Arc<Treeplex>>,
    direct: Vec<SequenceFormStrategy>,
    /// Index 0 = everyone direct, index `i` = player `i` free.
    wired: Vec<Arc<WiredGame>>,
    utility_ranges: Vec<(f64, f64)>,
}

impl MediatorAugmentedGame {
    pub(crate) fn assemble(source: MagSource, num_players: usize) -> GameResult<Self> {
        let affine = vec![(1.0, 0.0); num_players + 1];
        Self::assemble_with_affine(source, num_players, affine)
    }

    pub(crate) fn assemble_with_affine(
        source: MagSource,
        num_players: usize,
        affine: Vec<(f64, f64)>,
    ) -> GameResult<Self> {
        let mut wired_raw = Vec::with_capacity(num_players + 1);
        for dev in 0..=num_players {
            let dev = if dev == 0 { None } else { Some(dev) };
            wired_raw.push(source.build_wired(num_players, &affine, dev)?);
        }

        let mediator_tp = Arc::new(match &source {
            // An explicit game may have mediator infosets reachable only
            // off the direct profile; take the full structure.
            MagSource::Explicit { game, .. } => Treeplex::for_agent(game, 0)?,
            _ => Treeplex::for_agent(&wired_raw[0].0, 0)?,
        });
        let mut player_tps = Vec::with_capacity(num_players);
        for i in 1..=num_players {
            let tp = match &source {
                MagSource::Explicit { game, .. } => Treeplex::for_agent(game, i)?,
                _ => Treeplex::for_agent(&wired_raw[i].0, i)?,
            };
            player_tps.push(Arc::new(tp));
        }

        let direct: Vec<SequenceFormStrategy> = (1..=num_players)
            .map(|i| source.direct_strategy(i, &player_tps[i - 1]))
            .collect::<GameResult<_>>()?;

        let mut wired = Vec::with_capacity(num_players + 1);
        for (dev, (game, outcomes)) in wired_raw.into_iter().enumerate() {
            let game = Arc::new(game);
            let deviator = if dev == 0 { None } else { Some(dev) };
            let mut tps: Vec<Arc<Treeplex>> = (0..=num_players)
                .map(|a| Arc::new(Treeplex::trivial(a)))
                .collect();
            tps[0] = mediator_tp.clone();
            if let Some(i) = deviator {
                tps[i] = player_tps[i - 1].clone();
            }
            let eval = Evaluator::with_treeplexes(game.clone(), tps)?;
            wired.push(Arc::new(WiredGame {
                deviator,
                game,
                eval,
                outcomes,
            }));
        }

        let mut utility_ranges = vec![(f64::INFINITY, f64::NEG_INFINITY); num_players + 1];
        for w in &wired {
            for agent in 0..=num_players {
                let (lo, hi) = w.game.utility_range(agent);
                utility_ranges[agent].0 = utility_ranges[agent].0.min(lo);
                utility_ranges[agent].1 = utility_ranges[agent].1.max(hi);
            }
        }

        let m = MediatorAugmentedGame {
            source,
            num_players,
            affine,
            mediator_tp,
            player_tps,
            direct,
            wired,
            utility_ranges,
        };
        m.check_direct_neutrality()?;
        Ok(m)
    }

    /// Wraps an explicit game. `direct_choices` gives, per player (index
    /// `i - 1`), the action taken at each of the player's game infosets;
    /// missing infosets default to action 0.
    pub fn from_game(
        game: Arc<ExtensiveFormGame>,
        direct_choices: Vec<HashMap<usize, usize>>,
    ) -> GameResult<Self> {
        if direct_choices.len() != game.num_players() {
            return Err(GameError::Dimension(format!(
                "{} direct strategies for {} players",
                direct_choices.len(),
                game.num_players()
            )));
        }
        let num_players = game.num_players();
        let source = MagSource::Explicit {
            game,
            choices: Arc::new(direct_choices),
        };
        Self::assemble(source, num_players)
    }

    pub fn num_players(&self) -> usize {
        self.num_players
    }

    pub fn mediator_treeplex(&self) -> &Arc<Treeplex> {
        &self.mediator_tp
    }

    /// Treeplex of player `i` (1-based).
    pub fn player_treeplex(&self, i: usize) -> &Arc<Treeplex> {
        &self.player_tps[i - 1]
    }

    /// Direct pure strategy of player `i` (1-based).
    pub fn direct_strategy(&self, i: usize) -> &SequenceFormStrategy {
        &self.direct[i - 1]
    }

    pub fn wired_direct(&self) -> &Arc<WiredGame> {
        &self.wired[0]
    }

    /// Wired game in which player `i` (1-based) plays freely.
    pub fn wired_deviator(&self, i: usize) -> &Arc<WiredGame> {
        &self.wired[i]
    }

    /// (min, max) of the mediator objective over reachable terminals.
    pub fn objective_range(&self) -> (f64, f64) {
        self.utility_ranges[0]
    }

    pub fn utility_range(&self, agent: usize) -> (f64, f64) {
        self.utility_ranges[agent]
    }

    /// Per-agent affine transform applied on top of the source utilities.
    pub fn affine(&self) -> &[(f64, f64)] {
        &self.affine
    }

    /// Expected utilities under `(mu, d)`; index 0 is the objective.
    pub fn utilities_direct(&self, mu: &SequenceFormStrategy) -> GameResult<Vec<f64>> {
        self.wired_direct().utilities(mu, None)
    }

    /// Mediator objective under `(mu, d)`.
    pub fn objective(&self, mu: &SequenceFormStrategy) -> GameResult<f64> {
        Ok(self.utilities_direct(mu)?[0])
    }

    /// Best-response gain of player `i` against `(mu, d)`:
    /// `max_x u_i(mu, x, d_-i) - u_i(mu, d)`. Nonnegative up to float error
    /// because `d_i` itself is always available to the deviator.
    pub fn deviation_gain(&self, mu: &SequenceFormStrategy, i: usize) -> GameResult<f64> {
        let (_, br) = self.wired_deviator(i).deviator_best_response(mu)?;
        let direct = self.utilities_direct(mu)?[i];
        Ok(br - direct)
    }

    /// Range of the objective `c . mu` over the whole mediator polytope,
    /// computed by two best responses in the all-direct game.
    pub fn objective_polytope_range(&self) -> GameResult<(f64, f64)> {
        let w = self.wired_direct();
        let ones = w.profile(&SequenceFormStrategy::uniform(&self.mediator_tp), None)?;
        let g = w.eval.gradient(0, &ones)?;
        let hi = crate::game::best_response_value(&self.mediator_tp, &g);
        let neg: Vec<f64> = g.iter().map(|v| -v).collect();
        let lo = -crate::game::best_response_value(&self.mediator_tp, &neg);
        Ok((lo, hi))
    }

    /// A copy whose utilities are affinely mapped so each agent's rewards
    /// over reachable terminals lie in [0, 1]. Agents with degenerate range
    /// are mapped to the constant 0. Structure, treeplexes and direct
    /// strategies are unchanged, so strategies transfer between the two.
    pub fn rescaled(&self) -> GameResult<MediatorAugmentedGame> {
        let mut affine = Vec::with_capacity(self.num_players + 1);
        for agent in 0..=self.num_players {
            let (lo, hi) = self.utility_ranges[agent];
            let (s0, o0) = self.affine[agent];
            if hi - lo > 1e-12 {
                let s = 1.0 / (hi - lo);
                affine.push((s0 * s, (o0 - lo) * s));
            } else {
                affine.push((0.0, 0.0));
            }
        }
        Self::assemble_with_affine(self.source.clone(), self.num_players, affine)
    }

    /// Maps an objective value of this (possibly rescaled) instance back to
    /// the source units of `original`.
    pub fn objective_to(&self, value: f64, original: &MediatorAugmentedGame) -> f64 {
        let (s, o) = self.affine[0];
        let (s2, o2) = original.affine[0];
        if s == 0.0 {
            // Degenerate objective: constant in these units.
            return original.utility_ranges[0].0;
        }
        s2 * ((value - o) / s) + o2
    }

    fn check_direct_neutrality(&self) -> GameResult<()> {
        let mu = SequenceFormStrategy::uniform(&self.mediator_tp);
        let base = self.utilities_direct(&mu)?;
        let scale = 1.0
            + self
                .utility_ranges
                .iter()
                .map(|r| r.1 - r.0)
                .fold(0.0f64, f64::max);
        for i in 1..=self.num_players {
            let with_d = self.wired_deviator(i).utilities(&mu, Some(&self.direct[i - 1]))?;
            for agent in 0..=self.num_players {
                if (with_d[agent] - base[agent]).abs() > 1e-9 * scale {
                    return Err(GameError::Invariant(format!(
                        "direct strategy of player {i} is not neutral: agent {agent} \
                         utility {} vs {}",
                        with_d[agent], base[agent]
                    )));
                }
            }
        }
        Ok(())
    }

    /// Materializes the full (unwired) game tree. Intended for small
    /// instances: tests, the oracle's imperfect-recall path and export.
    pub fn materialize(&self) -> GameResult<Arc<ExtensiveFormGame>> {
        self.source.materialize(self.num_players, &self.affine)
    }

    /// True when this instance came from the sequential-auction encoder.
    pub fn is_auction(&self) -> bool {
        matches!(self.source, MagSource::Auction(_))
    }

    pub fn auction_spec(&self) -> Option<&AuctionSpec> {
        match &self.source {
            MagSource::Auction(a) => Some(a),
            _ => None,
        }
    }
}

impl MagSource {
    fn build_wired(
        &self,
        num_players: usize,
        affine: &[(f64, f64)],
        deviator: Option<usize>,
    ) -> GameResult<(ExtensiveFormGame, Option<Vec<Vec<RoundOutcome>>>)> {
        match self {
            MagSource::Explicit { game, choices } => {
                explicit_wired(game, choices, num_players, affine, deviator).map(|g| (g, None))
            }
            MagSource::Auction(spec) => spec.build_wired(affine, deviator),
            MagSource::NormalForm(spec) => spec.build_wired(affine, deviator).map(|g| (g, None)),
        }
    }

    fn direct_strategy(&self, player: usize, tp: &Treeplex) -> GameResult<SequenceFormStrategy> {
        match self {
            MagSource::Explicit { choices, .. } => {
                let map = &choices[player - 1];
                let picks: Vec<usize> = tp
                    .infosets()
                    .iter()
                    .map(|inf| map.get(&inf.game_infoset).copied().unwrap_or(0))
                    .collect();
                for (idx, inf) in tp.infosets().iter().enumerate() {
                    if picks[idx] >= inf.num_actions {
                        return Err(GameError::Dimension(format!(
                            "direct strategy of player {player}: action {} out of range at \
                             infoset {}",
                            picks[idx], inf.game_infoset
                        )));
                    }
                }
                Ok(SequenceFormStrategy::pure(tp, &picks))
            }
            MagSource::Auction(spec) => spec.direct_strategy(player, tp),
            MagSource::NormalForm(spec) => spec.direct_strategy(player, tp),
        }
    }

    fn materialize(
        &self,
        num_players: usize,
        affine: &[(f64, f64)],
    ) -> GameResult<Arc<ExtensiveFormGame>> {
        match self {
            MagSource::Explicit { game, .. } => {
                if affine.iter().all(|&(s, o)| s == 1.0 && o == 0.0) {
                    Ok(game.clone())
                } else {
                    Err(GameError::Invariant(
                        "materializing a rescaled explicit game is not supported".into(),
                    ))
                }
            }
            MagSource::Auction(spec) => spec.materialize(num_players, affine).map(Arc::new),
            MagSource::NormalForm(spec) => spec.materialize(affine).map(Arc::new),
        }
    }
}

/// Generic wiring for explicit games: copy the tree, replacing each wired
/// player's decision node by its direct child.
fn explicit_wired(
    game: &Arc<ExtensiveFormGame>,
    choices: &[HashMap<usize, usize>],
    num_players: usize,
    affine: &[(f64, f64)],
    deviator: Option<usize>,
) -> GameResult<ExtensiveFormGame> {
    use crate::game::{GameBuilder, NodeKind};
    let mut b = GameBuilder::new(num_players);
    // Reuse the source's full infoset list so ids match across wirings.
    for inf in game.infosets() {
        b.infoset(inf.agent, inf.name.clone(), inf.actions.clone());
    }
    let root = copy_wired(game, choices, affine, deviator, game.root(), &mut b)?;
    return b.finish(root);

    fn copy_wired(
        game: &ExtensiveFormGame,
        choices: &[HashMap<usize, usize>],
        affine: &[(f64, f64)],
        deviator: Option<usize>,
        node: usize,
        b: &mut GameBuilder,
    ) -> GameResult<usize> {
        let n = game.node(node);
        match n.kind() {
            NodeKind::Terminal => {
                let u = game
                    .utility(n.terminal_index())
                    .iter()
                    .enumerate()
                    .map(|(a, &v)| affine[a].0 * v + affine[a].1)
                    .collect();
                Ok(b.terminal(u))
            }
            NodeKind::Chance => {
                let probs = game.chance_probs(node).to_vec();
                let mut outcomes = Vec::with_capacity(probs.len());
                for (slot, &c) in game.children(node).iter().enumerate() {
                    let child = copy_wired(game, choices, affine, deviator, c, b)?;
                    outcomes.push((probs[slot], child));
                }
                Ok(b.chance(outcomes))
            }
            NodeKind::Agent => {
                let agent = n.agent();
                let iid = n.infoset();
                let free = agent == 0 || Some(agent) == deviator;
                if free {
                    let mut children = Vec::with_capacity(n.num_children());
                    for &c in game.children(node) {
                        children.push(copy_wired(game, choices, affine, deviator, c, b)?);
                    }
                    Ok(b.agent(agent, iid, children))
                } else {
                    let pick = choices[agent - 1].get(&iid).copied().unwrap_or(0);
                    let c = *game.children(node).get(pick).ok_or_else(|| {
                        GameError::Dimension(format!(
                            "direct action {pick} out of range at infoset {iid}"
                        ))
                    })?;
                    copy_wired(game, choices, affine, deviator, c, b)
                }
            }
        }
    }
}
