//! Sequence-form decision spaces.
//!
//! A treeplex indexes an agent's sequences: the empty sequence is id 0 and
//! each (infoset, action) pair reachable in the game gets one id. Infosets
//! are ordered so a parent sequence always precedes the sequences of the
//! infosets it feeds, which lets solvers run single forward/backward passes
//! over flat arrays.
//!
//! The ordering is canonical: infosets are laid out level by level, keyed by
//! (parent sequence, infoset id). Two games that share an agent's infoset
//! structure therefore produce identical treeplexes, which is what lets a
//! mediator strategy move between an augmented game and the zero-sum games
//! derived from it without re-indexing.

use std::collections::HashMap;

use super::{ExtensiveFormGame, GameError, GameResult, InfosetId, NodeKind};

pub type SeqId = usize;

/// Sequence id of the empty sequence.
pub const EMPTY_SEQ: SeqId = 0;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeplexInfoset {
    /// Infoset id in the source game.
    pub game_infoset: InfosetId,
    /// Sequence the agent must hold to reach this infoset.
    pub parent_seq: SeqId,
    /// Sequences `seq_start .. seq_start + num_actions` belong to this
    /// infoset, one per action in action order.
    pub seq_start: SeqId,
    pub num_actions: usize,
}

/// An agent's sequence set and polytope structure.
#[derive(Debug, Clone)]
pub struct Treeplex {
    pub agent: usize,
    num_sequences: usize,
    infosets: Vec<TreeplexInfoset>,
    /// game infoset id -> index into `infosets`, for infosets of this agent.
    index_of: HashMap<InfosetId, usize>,
    /// Per game terminal, the agent's sequence at that terminal.
    terminal_seq: Vec<SeqId>,
}

impl Treeplex {
    /// Builds the treeplex of `agent` in `game`.
    ///
    /// Fails with `ImperfectRecall` if two nodes of one of the agent's
    /// infosets are reached holding different own sequences. Players are
    /// already validated at load; this surfaces only for a mediator whose
    /// infosets merge distinct mediator sequences.
    pub fn for_agent(game: &ExtensiveFormGame, agent: usize) -> GameResult<Treeplex> {
        // First pass: find each infoset's parent sequence, expressed as
        // (parent infoset index in discovery order, action) until final ids
        // are assigned. Sequences are identified by (infoset, action) of this
        // agent; the empty sequence is None.
        let mut parent_of: HashMap<InfosetId, Option<(InfosetId, usize)>> = HashMap::new();
        let mut stack: Vec<(usize, Option<(InfosetId, usize)>)> = vec![(game.root(), None)];
        while let Some((id, held)) = stack.pop() {
            let node = game.node(id);
            match node.kind() {
                NodeKind::Terminal => {}
                NodeKind::Chance => {
                    for &c in game.children(id) {
                        stack.push((c, held));
                    }
                }
                NodeKind::Agent => {
                    if node.agent() == agent {
                        let iid = node.infoset();
                        match parent_of.get(&iid) {
                            None => {
                                parent_of.insert(iid, held);
                            }
                            Some(&first) => {
                                if first != held {
                                    return Err(GameError::ImperfectRecall { agent });
                                }
                            }
                        }
                        for (a, &c) in game.children(id).iter().enumerate() {
                            stack.push((c, Some((iid, a))));
                        }
                    } else {
                        for &c in game.children(id) {
                            stack.push((c, held));
                        }
                    }
                }
            }
        }

        // Canonical level order: repeatedly take infosets whose parent
        // sequence is already numbered, sorted by (parent seq, infoset id).
        let mut remaining: Vec<InfosetId> = parent_of.keys().copied().collect();
        remaining.sort_unstable();
        let mut infosets: Vec<TreeplexInfoset> = Vec::with_capacity(remaining.len());
        let mut index_of: HashMap<InfosetId, usize> = HashMap::new();
        let mut seq_of_pair: HashMap<(InfosetId, usize), SeqId> = HashMap::new();
        let mut next_seq: SeqId = 1;
        while !remaining.is_empty() {
            let mut ready: Vec<(SeqId, InfosetId)> = Vec::new();
            for &iid in &remaining {
                let seq = match parent_of[&iid] {
                    None => Some(EMPTY_SEQ),
                    Some(pair) => seq_of_pair.get(&pair).copied(),
                };
                if let Some(s) = seq {
                    ready.push((s, iid));
                }
            }
            if ready.is_empty() {
                // Unreachable for a well-formed tree; defend against loops.
                return Err(GameError::Invariant(format!(
                    "treeplex for agent {agent}: cyclic infoset structure"
                )));
            }
            ready.sort_unstable();
            for &(parent_seq, iid) in &ready {
                let num_actions = game.infoset(iid).num_actions();
                index_of.insert(iid, infosets.len());
                for a in 0..num_actions {
                    seq_of_pair.insert((iid, a), next_seq + a);
                }
                infosets.push(TreeplexInfoset {
                    game_infoset: iid,
                    parent_seq,
                    seq_start: next_seq,
                    num_actions,
                });
                next_seq += num_actions;
            }
            remaining.retain(|iid| !index_of.contains_key(iid));
        }

        let mut tp = Treeplex {
            agent,
            num_sequences: next_seq,
            infosets,
            index_of,
            terminal_seq: Vec::new(),
        };
        tp.terminal_seq = tp.terminal_seqs(game)?;
        Ok(tp)
    }

    /// The one-point decision space of an agent that never acts.
    pub fn trivial(agent: usize) -> Treeplex {
        Treeplex {
            agent,
            num_sequences: 1,
            infosets: Vec::new(),
            index_of: HashMap::new(),
            terminal_seq: Vec::new(),
        }
    }

    /// Maps another game's terminals onto this treeplex's sequence ids. The
    /// other game must use the same infoset id space for this agent (built
    /// from the same augmented game); it may contain only a subset of the
    /// infosets.
    pub fn terminal_seqs(&self, game: &ExtensiveFormGame) -> GameResult<Vec<SeqId>> {
        let mut out = vec![EMPTY_SEQ; game.num_terminals()];
        let mut stack: Vec<(usize, SeqId)> = vec![(game.root(), EMPTY_SEQ)];
        while let Some((id, held)) = stack.pop() {
            let node = game.node(id);
            match node.kind() {
                NodeKind::Terminal => out[node.terminal_index()] = held,
                NodeKind::Chance => {
                    for &c in game.children(id) {
                        stack.push((c, held));
                    }
                }
                NodeKind::Agent => {
                    if node.agent() == self.agent {
                        let iid = node.infoset();
                        let idx = *self.index_of.get(&iid).ok_or_else(|| {
                            GameError::Dimension(format!(
                                "game infoset {iid} not part of agent {}'s treeplex",
                                self.agent
                            ))
                        })?;
                        let start = self.infosets[idx].seq_start;
                        for (a, &c) in game.children(id).iter().enumerate() {
                            stack.push((c, start + a));
                        }
                    } else {
                        for &c in game.children(id) {
                            stack.push((c, held));
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn num_sequences(&self) -> usize {
        self.num_sequences
    }

    pub fn infosets(&self) -> &[TreeplexInfoset] {
        &self.infosets
    }

    pub fn num_infosets(&self) -> usize {
        self.infosets.len()
    }

    /// Sequence held by the agent at each terminal of the source game.
    pub fn terminal_seq(&self) -> &[SeqId] {
        &self.terminal_seq
    }

    pub fn infoset_index(&self, game_infoset: InfosetId) -> Option<usize> {
        self.index_of.get(&game_infoset).copied()
    }

    /// Structural equality: same sequences, infoset layout and parents.
    /// Terminal maps are per-game and not compared.
    pub fn same_structure(&self, other: &Treeplex) -> bool {
        self.agent == other.agent
            && self.num_sequences == other.num_sequences
            && self.infosets == other.infosets
    }

    /// Uniform behavioral strategy in sequence form.
    pub fn uniform(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.num_sequences];
        x[EMPTY_SEQ] = 1.0;
        for inf in &self.infosets {
            let share = x[inf.parent_seq] / inf.num_actions as f64;
            for s in inf.seq_start..inf.seq_start + inf.num_actions {
                x[s] = share;
            }
        }
        x
    }
}
