//! Zero-sum reductions of the optimal-equilibrium program.
//!
//! Both constructions stitch the wired games of a mediator-augmented game
//! under a small root:
//!
//! - [`build_l1`]: nature first decides (probability 1/2) whether a deviator
//!   exists and, if so, picks one uniformly. On deviation branch `i` the
//!   mediator's payoff is `-2*lambda*n*u_i(z)`; on the no-deviator branch it
//!   is `2*u_0(z) + 2*lambda*sum_i u_i(z)`. The mediator's expected payoff
//!   then equals the Lagrangian of the constrained program at multiplier
//!   `lambda`.
//!
//! - [`build_l2`]: the deviator itself first picks an index in `{0..n}`.
//!   Index 0 scores the objective against a threshold, `u_0(z) - tau`;
//!   index `i != 0` flips a fair coin for whether the deviation is live,
//!   scoring `-2*u_i(z)` when it is and `+2*u_i(z)` when it is not. With
//!   utilities rescaled to [0, 1] every payoff lies in [-2, 2] regardless
//!   of the multiplier, which is the point of this construction.
//!
//! Mediator infosets keep their augmented-game ids in every branch, so one
//! mediator strategy spans all branches and nature's pick stays hidden from
//! it. Deviator infosets are fresh per branch: the deviator knows who it is.

use std::collections::HashMap;
use std::sync::Arc;

use crate::game::{
    ExtensiveFormGame, GameBuilder, GameError, GameResult, NodeKind, SequenceFormStrategy,
    Treeplex, EMPTY_SEQ,
};

use super::{MediatorAugmentedGame, WiredGame};

/// Which construction produced a zero-sum game, with its parameter and
/// source instance.
#[derive(Clone)]
pub enum Provenance {
    /// Direct Lagrangian at a fixed multiplier.
    L1 { lambda: f64 },
    /// Thresholded Lagrangian at a fixed threshold.
    L2 { tau: f64 },
    /// A plain two-agent zero-sum game with no augmented-game source.
    Plain,
}

/// A two-agent zero-sum extensive-form game: agent 0 (mediator) maximizes,
/// agent 1 (deviator) minimizes, plus chance. Terminal payoffs decompose as
/// `constant + parameter * coefficient`, so re-parameterizing (a different
/// `lambda` or `tau`) only reweights terminals.
pub struct ZeroSumGame {
    pub game: Arc<ExtensiveFormGame>,
    pub provenance: Provenance,
    /// Source augmented game, when one exists.
    pub source: Option<Arc<MediatorAugmentedGame>>,
    /// (min, max) mediator payoff over terminals at the build parameter.
    pub reward_range: (f64, f64),
    mediator_tp: Arc<Treeplex>,
    deviator_tp: Arc<Treeplex>,
    /// Per terminal: mediator sequence, deviator sequence.
    term_med: Vec<u32>,
    term_dev: Vec<u32>,
    /// Per terminal: chance reach times the constant and parameter parts of
    /// the mediator payoff.
    term_const: Vec<f64>,
    term_coef: Vec<f64>,
    /// Parameter the `game` utilities were baked with.
    param: f64,
    /// Per deviation branch (player i at index i-1), augmented-game infoset
    /// id -> zero-sum game infoset id.
    branch_infosets: Vec<HashMap<usize, usize>>,
    /// L2 only: infoset id of the deviator's index pick.
    root_infoset: Option<usize>,
}

impl ZeroSumGame {
    pub fn mediator_treeplex(&self) -> &Arc<Treeplex> {
        &self.mediator_tp
    }

    pub fn deviator_treeplex(&self) -> &Arc<Treeplex> {
        &self.deviator_tp
    }

    /// Build-time parameter (lambda for L1, tau for L2).
    pub fn param(&self) -> f64 {
        self.param
    }

    pub fn num_terminals(&self) -> usize {
        self.term_const.len()
    }

    #[inline]
    pub fn terminal_seqs(&self) -> (&[u32], &[u32]) {
        (&self.term_med, &self.term_dev)
    }

    /// Chance-weighted mediator payoffs at parameter `param`.
    pub fn weights_at(&self, param: f64) -> Vec<f64> {
        self.term_const
            .iter()
            .zip(&self.term_coef)
            .map(|(&c, &k)| c + param * k)
            .collect()
    }

    /// Mediator expected payoff for a (mediator, deviator) strategy pair,
    /// evaluated from the compiled terminal arrays at the build parameter.
    pub fn value(&self, mu: &SequenceFormStrategy, dev: &SequenceFormStrategy) -> f64 {
        let mut total = 0.0;
        for z in 0..self.num_terminals() {
            total += (self.term_const[z] + self.param * self.term_coef[z])
                * mu.values[self.term_med[z] as usize]
                * dev.values[self.term_dev[z] as usize];
        }
        total
    }

    /// Embeds per-player deviation strategies (and, for L2, a distribution
    /// over indices `0..=n`) into a deviator sequence-form strategy.
    pub fn embed_deviator(
        &self,
        index_mix: Option<&[f64]>,
        per_player: &[SequenceFormStrategy],
    ) -> GameResult<SequenceFormStrategy> {
        let source = self
            .source
            .as_ref()
            .ok_or_else(|| GameError::Dimension("no source augmented game".into()))?;
        let n = source.num_players();
        if per_player.len() != n {
            return Err(GameError::Dimension(format!(
                "{} deviation strategies for {n} players",
                per_player.len()
            )));
        }
        let mut values = vec![0.0; self.deviator_tp.num_sequences()];
        values[EMPTY_SEQ] = 1.0;
        // Root mixing: L1 has no deviator root node (nature picks); L2 does.
        let branch_scale: Vec<f64> = match (&self.provenance, index_mix) {
            (Provenance::L1 { .. }, None) => vec![1.0; n],
            (Provenance::L2 { .. }, Some(mix)) if mix.len() == n + 1 => {
                let root = self.root_infoset.expect("l2 root infoset");
                let idx = self
                    .deviator_tp
                    .infoset_index(root)
                    .expect("root in deviator treeplex");
                let inf = &self.deviator_tp.infosets()[idx];
                for (k, &w) in mix.iter().enumerate() {
                    values[inf.seq_start + k] = w;
                }
                mix[1..].to_vec()
            }
            _ => {
                return Err(GameError::Dimension(
                    "index mix must be present exactly for L2 embeddings, with n+1 entries".into(),
                ))
            }
        };
        for i in 1..=n {
            let ptp = source.player_treeplex(i);
            let x = &per_player[i - 1];
            if x.values.len() != ptp.num_sequences() {
                return Err(GameError::Dimension(format!(
                    "player {i}: deviation strategy has {} entries, treeplex has {}",
                    x.values.len(),
                    ptp.num_sequences()
                )));
            }
            let map = &self.branch_infosets[i - 1];
            for inf in ptp.infosets() {
                let Some(&zid) = map.get(&inf.game_infoset) else {
                    // Infoset unreachable in this branch.
                    continue;
                };
                let didx = self
                    .deviator_tp
                    .infoset_index(zid)
                    .expect("branch infoset in deviator treeplex");
                let dinf = &self.deviator_tp.infosets()[didx];
                for a in 0..inf.num_actions {
                    values[dinf.seq_start + a] = branch_scale[i - 1] * x.values[inf.seq_start + a];
                }
            }
        }
        Ok(SequenceFormStrategy::new(1, values))
    }
}

impl ZeroSumGame {
    /// Wraps a plain two-player zero-sum game (players 1 and 2, terminal
    /// utilities negations of each other) so the self-play machinery can
    /// run on it. Player 1 maximizes.
    pub fn from_zero_sum_game(game: Arc<ExtensiveFormGame>) -> GameResult<ZeroSumGame> {
        if game.num_players() != 2 {
            return Err(GameError::Dimension(format!(
                "zero-sum wrapper needs two players, got {}",
                game.num_players()
            )));
        }
        for z in 0..game.num_terminals() {
            let u = game.utility(z);
            if (u[1] + u[2]).abs() > 1e-9 {
                return Err(GameError::Invariant(format!(
                    "terminal {z}: utilities {} and {} do not sum to zero",
                    u[1], u[2]
                )));
            }
        }
        let mediator_tp = Arc::new(Treeplex::for_agent(&game, 1)?);
        let deviator_tp = Arc::new(Treeplex::for_agent(&game, 2)?);
        let term_med: Vec<u32> = mediator_tp
            .terminal_seqs(&game)?
            .into_iter()
            .map(|s| s as u32)
            .collect();
        let term_dev: Vec<u32> = deviator_tp
            .terminal_seqs(&game)?
            .into_iter()
            .map(|s| s as u32)
            .collect();
        let mut term_const = Vec::with_capacity(game.num_terminals());
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for z in 0..game.num_terminals() {
            let u = game.utility(z)[1];
            lo = lo.min(u);
            hi = hi.max(u);
            term_const.push(game.chance_reach(z) * u);
        }
        Ok(ZeroSumGame {
            game,
            provenance: Provenance::Plain,
            source: None,
            reward_range: (lo.min(hi), hi.max(lo)),
            mediator_tp,
            deviator_tp,
            term_med,
            term_dev,
            term_coef: vec![0.0; term_const.len()],
            term_const,
            param: 0.0,
            branch_infosets: Vec::new(),
            root_infoset: None,
        })
    }
}

/// Copies a wired game into the zero-sum builder. Mediator nodes keep their
/// infoset ids; the deviating player's nodes become agent-1 nodes with
/// branch-local infosets; terminal payoffs are produced by `payoff`,
/// returning (constant, coefficient) parts.
struct BranchCopier<'a> {
    wired: &'a WiredGame,
    builder: &'a mut GameBuilder,
    /// Augmented-game infoset id -> zs infoset id for the deviating player.
    branch_map: HashMap<usize, usize>,
    branch_label: String,
    term_const: &'a mut Vec<f64>,
    term_coef: &'a mut Vec<f64>,
}

impl<'a> BranchCopier<'a> {
    fn copy(&mut self, payoff: &dyn Fn(&[f64]) -> (f64, f64), param: f64) -> usize {
        self.copy_node(self.wired.game.root(), payoff, param)
    }

    fn copy_node(&mut self, node: usize, payoff: &dyn Fn(&[f64]) -> (f64, f64), param: f64) -> usize {
        let game = &self.wired.game;
        let n = game.node(node);
        match n.kind() {
            NodeKind::Terminal => {
                let (c, k) = payoff(game.utility(n.terminal_index()));
                self.term_const.push(c);
                self.term_coef.push(k);
                let med = c + param * k;
                self.builder.terminal(vec![med, -med])
            }
            NodeKind::Chance => {
                let probs = game.chance_probs(node).to_vec();
                let mut outcomes = Vec::with_capacity(probs.len());
                for (slot, &child) in game.children(node).iter().enumerate() {
                    outcomes.push((probs[slot], self.copy_node(child, payoff, param)));
                }
                self.builder.chance(outcomes)
            }
            NodeKind::Agent => {
                let mut children = Vec::with_capacity(n.num_children());
                for &child in game.children(node) {
                    children.push(self.copy_node(child, payoff, param));
                }
                if n.agent() == 0 {
                    self.builder.agent(0, n.infoset(), children)
                } else {
                    let src = n.infoset();
                    let zid = match self.branch_map.get(&src) {
                        Some(&z) => z,
                        None => {
                            let orig = self.wired.game.infoset(src);
                            let z = self.builder.infoset(
                                1,
                                format!("{}#{}", self.branch_label, src),
                                orig.actions.clone(),
                            );
                            self.branch_map.insert(src, z);
                            z
                        }
                    };
                    self.builder.agent(1, zid, children)
                }
            }
        }
    }
}

fn assemble_zs(
    m: &Arc<MediatorAugmentedGame>,
    provenance: Provenance,
    param: f64,
    game: ExtensiveFormGame,
    term_const: Vec<f64>,
    term_coef: Vec<f64>,
    branch_infosets: Vec<HashMap<usize, usize>>,
    root_infoset: Option<usize>,
) -> GameResult<ZeroSumGame> {
    let game = Arc::new(game);
    let mediator_tp = m.mediator_treeplex().clone();
    let deviator_tp = Arc::new(Treeplex::for_agent(&game, 1)?);
    debug_assert!(
        Treeplex::for_agent(&game, 0)
            .map(|tp| tp.same_structure(&mediator_tp))
            .unwrap_or(false),
        "mediator treeplex of the reduction matches the source"
    );
    let term_med: Vec<u32> = mediator_tp
        .terminal_seqs(&game)?
        .into_iter()
        .map(|s| s as u32)
        .collect();
    let term_dev: Vec<u32> = deviator_tp
        .terminal_seqs(&game)?
        .into_iter()
        .map(|s| s as u32)
        .collect();
    // The builder's depth-first renumbering preserves terminal creation
    // order, so the const/coef arrays align with terminal indices.
    debug_assert_eq!(term_const.len(), game.num_terminals());
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for z in 0..game.num_terminals() {
        let u = game.utility(z)[0];
        lo = lo.min(u);
        hi = hi.max(u);
    }
    // Weight the compiled payoff parts by chance reach.
    let mut term_const = term_const;
    let mut term_coef = term_coef;
    for z in 0..game.num_terminals() {
        let r = game.chance_reach(z);
        term_const[z] *= r;
        term_coef[z] *= r;
    }
    Ok(ZeroSumGame {
        game,
        provenance,
        source: Some(m.clone()),
        reward_range: (lo, hi),
        mediator_tp,
        deviator_tp,
        term_med,
        term_dev,
        term_const,
        term_coef,
        param,
        branch_infosets,
        root_infoset,
    })
}

/// Direct Lagrangian reduction at multiplier `lambda`.
pub fn build_l1(m: &Arc<MediatorAugmentedGame>, lambda: f64) -> GameResult<ZeroSumGame> {
    if !lambda.is_finite() {
        return Err(GameError::Invariant(format!("multiplier {lambda} is not finite")));
    }
    let n = m.num_players();
    let nf = n as f64;
    let mut builder = GameBuilder::new(1);
    declare_mediator_infosets(m, &mut builder);
    let mut term_const = Vec::new();
    let mut term_coef = Vec::new();

    // No-deviator branch: everyone direct, payoff 2*u0 + 2*lambda*sum(u_i).
    let no_dev = {
        let mut c = BranchCopier {
            wired: m.wired_direct(),
            builder: &mut builder,
            branch_map: HashMap::new(),
            branch_label: "nodev".into(),
            term_const: &mut term_const,
            term_coef: &mut term_coef,
        };
        c.copy(
            &|u: &[f64]| (2.0 * u[0], 2.0 * u[1..].iter().sum::<f64>()),
            lambda,
        )
    };

    let mut branch_infosets = Vec::with_capacity(n);
    let mut branch_roots = Vec::with_capacity(n);
    for i in 1..=n {
        let mut c = BranchCopier {
            wired: m.wired_deviator(i),
            builder: &mut builder,
            branch_map: HashMap::new(),
            branch_label: format!("dev{i}"),
            term_const: &mut term_const,
            term_coef: &mut term_coef,
        };
        let root = c.copy(&move |u: &[f64]| (0.0, -2.0 * nf * u[i]), lambda);
        branch_infosets.push(c.branch_map);
        branch_roots.push(root);
    }

    let mut outcomes = vec![(0.5, no_dev)];
    for root in branch_roots {
        outcomes.push((0.5 / nf, root));
    }
    let root = builder.chance(outcomes);
    let game = builder.finish(root)?;
    assemble_zs(
        m,
        Provenance::L1 { lambda },
        lambda,
        game,
        term_const,
        term_coef,
        branch_infosets,
        None,
    )
}

/// Thresholded Lagrangian reduction at threshold `tau`. Requires utilities
/// rescaled into [0, 1] (see [`MediatorAugmentedGame::rescaled`]); payoffs
/// of the result then lie in [-2, 2].
pub fn build_l2(m: &Arc<MediatorAugmentedGame>, tau: f64) -> GameResult<ZeroSumGame> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(GameError::Invariant(format!("threshold {tau} outside [0, 1]")));
    }
    for agent in 0..=m.num_players() {
        let (lo, hi) = m.utility_range(agent);
        if lo < -1e-9 || hi > 1.0 + 1e-9 {
            return Err(GameError::Invariant(format!(
                "agent {agent} utilities [{lo}, {hi}] not rescaled to [0, 1]"
            )));
        }
    }
    let n = m.num_players();
    let mut builder = GameBuilder::new(1);
    declare_mediator_infosets(m, &mut builder);
    let root_infoset = builder.infoset(
        1,
        "pick",
        (0..=n)
            .map(|i| if i == 0 { "objective".into() } else { format!("deviate{i}") })
            .collect(),
    );
    let mut term_const = Vec::new();
    let mut term_coef = Vec::new();

    // Index 0: objective minus threshold, everyone direct.
    let mut root_children = Vec::with_capacity(n + 1);
    {
        let mut c = BranchCopier {
            wired: m.wired_direct(),
            builder: &mut builder,
            branch_map: HashMap::new(),
            branch_label: "obj".into(),
            term_const: &mut term_const,
            term_coef: &mut term_coef,
        };
        root_children.push(c.copy(&|u: &[f64]| (u[0], -1.0), tau));
    }

    let mut branch_infosets = Vec::with_capacity(n);
    for i in 1..=n {
        // Coin: deviation live (payoff -2u_i, player i free) or dead
        // (payoff +2u_i, everyone direct).
        let live = {
            let mut c = BranchCopier {
                wired: m.wired_deviator(i),
                builder: &mut builder,
                branch_map: HashMap::new(),
                branch_label: format!("dev{i}"),
                term_const: &mut term_const,
                term_coef: &mut term_coef,
            };
            let node = c.copy(&move |u: &[f64]| (-2.0 * u[i], 0.0), tau);
            branch_infosets.push(c.branch_map);
            node
        };
        let dead = {
            let mut c = BranchCopier {
                wired: m.wired_direct(),
                builder: &mut builder,
                branch_map: HashMap::new(),
                branch_label: format!("dead{i}"),
                term_const: &mut term_const,
                term_coef: &mut term_coef,
            };
            c.copy(&move |u: &[f64]| (2.0 * u[i], 0.0), tau)
        };
        root_children.push(builder.chance(vec![(0.5, live), (0.5, dead)]));
    }
    let root = builder.agent(1, root_infoset, root_children);
    let game = builder.finish(root)?;
    assemble_zs(
        m,
        Provenance::L2 { tau },
        tau,
        game,
        term_const,
        term_coef,
        branch_infosets,
        Some(root_infoset),
    )
}

/// Declares the full mediator infoset list with ids matching the augmented
/// game, plus empty placeholders for any other infosets that the source
/// games referenced below the mediator's id range.
fn declare_mediator_infosets(m: &MediatorAugmentedGame, builder: &mut GameBuilder) {
    // Infoset ids used by mediator nodes in the wired games must exist in
    // the new game's infoset table at the same positions. Declare every id
    // up to the largest one referenced by any wired game, copying actions
    // for mediator infosets and leaving placeholders elsewhere.
    let mut max_id = 0;
    let mut decls: HashMap<usize, (usize, Vec<String>, String)> = HashMap::new();
    for dev in 0..=m.num_players() {
        let w = if dev == 0 { m.wired_direct() } else { m.wired_deviator(dev) };
        for (iid, inf) in w.game.infosets().iter().enumerate() {
            max_id = max_id.max(iid);
            if inf.agent == 0 && !inf.nodes.is_empty() {
                decls
                    .entry(iid)
                    .or_insert_with(|| (0, inf.actions.clone(), inf.name.clone()));
            }
        }
    }
    for iid in 0..=max_id {
        match decls.get(&iid) {
            Some((agent, actions, name)) => {
                builder.infoset(*agent, name.clone(), actions.clone());
            }
            None => {
                builder.infoset(0, format!("unused{iid}"), Vec::new());
            }
        }
    }
}
