//! Extensive-form game representation.
//!
//! Games are stored as flat arrays indexed by node id, with each node's
//! children occupying a contiguous range of the child arena. Terminal
//! utilities are dense `(n+1)`-vectors where index 0 is the mediator and
//! indices `1..=n` are the players. Chance reach probabilities are
//! precomputed per terminal so that utility evaluation is a single pass
//! over the terminal arrays.
//!
//! All types are immutable after construction and safe to share across
//! threads.

mod builder;
mod eval;
mod format;
mod strategy;
mod treeplex;
mod validate;

pub use builder::GameBuilder;
pub use eval::{best_response_to_gradient, best_response_value, Evaluator, Profile};
pub use format::{game_from_json, game_to_json, load_document, GameDocument};
pub use strategy::SequenceFormStrategy;
pub use treeplex::{SeqId, Treeplex, EMPTY_SEQ};

use serde::{Deserialize, Serialize};

/// Agent id of the mediator. Players are `1..=num_players`.
pub const MEDIATOR: usize = 0;

pub type NodeId = usize;
pub type InfosetId = usize;

/// Chance-probability mass errors larger than this are rejected.
pub const PROB_SUM_TOL: f64 = 1e-9;
/// Probabilities with magnitude below this are clamped to zero.
pub const PROB_CLAMP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Chance,
    Agent,
    Terminal,
}

#[derive(Debug, Clone)]
pub struct Node {
    pub(crate) kind: NodeKind,
    /// Agent id for agent nodes; unused otherwise.
    pub(crate) agent: u32,
    /// Infoset id for agent nodes; terminal index for terminals.
    pub(crate) payload: u32,
    pub(crate) child_start: u32,
    pub(crate) child_count: u32,
}

impl Node {
    #[inline]
    pub fn kind(&self) -> NodeKind {
        self.kind
    }
    #[inline]
    pub fn agent(&self) -> usize {
        debug_assert_eq!(self.kind, NodeKind::Agent);
        self.agent as usize
    }
    #[inline]
    pub fn infoset(&self) -> InfosetId {
        debug_assert_eq!(self.kind, NodeKind::Agent);
        self.payload as usize
    }
    #[inline]
    pub fn terminal_index(&self) -> usize {
        debug_assert_eq!(self.kind, NodeKind::Terminal);
        self.payload as usize
    }
    #[inline]
    pub fn num_children(&self) -> usize {
        self.child_count as usize
    }
}

/// An information set: the owning agent, its action labels and member nodes.
#[derive(Debug, Clone)]
pub struct Infoset {
    pub agent: usize,
    pub actions: Vec<String>,
    pub nodes: Vec<NodeId>,
    pub name: String,
}

impl Infoset {
    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }
}

/// A finite extensive-form game over agents `0..=num_players`, where agent 0
/// is the mediator and may be absent (never act).
///
/// Invariants established at construction:
/// - the node relation is a tree with a single root;
/// - all nodes of an infoset have the same action count and labels;
/// - chance distributions are nonnegative and sum to one;
/// - players `1..=n` have perfect recall (the mediator is exempt);
/// - terminal utilities are finite `(n+1)`-vectors.
#[derive(Debug, Clone)]
pub struct ExtensiveFormGame {
    num_players: usize,
    root: NodeId,
    nodes: Vec<Node>,
    children: Vec<NodeId>,
    /// Aligned with `children`; meaningful only under chance nodes.
    chance_probs: Vec<f64>,
    infosets: Vec<Infoset>,
    /// Terminal index -> node id, in depth-first order.
    terminals: Vec<NodeId>,
    /// Row-major `|Z| x (num_players + 1)` utility table.
    utilities: Vec<f64>,
    /// Product of chance probabilities along the path to each terminal.
    chance_reach: Vec<f64>,
    /// External node names; empty when the game was built programmatically
    /// without names.
    node_names: Vec<String>,
}

impl ExtensiveFormGame {
    pub fn num_players(&self) -> usize {
        self.num_players
    }

    /// Number of utility entries per terminal (`num_players + 1`).
    pub fn num_agents(&self) -> usize {
        self.num_players + 1
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        let n = &self.nodes[id];
        &self.children[n.child_start as usize..(n.child_start + n.child_count) as usize]
    }

    pub fn chance_probs(&self, id: NodeId) -> &[f64] {
        let n = &self.nodes[id];
        debug_assert_eq!(n.kind, NodeKind::Chance);
        &self.chance_probs[n.child_start as usize..(n.child_start + n.child_count) as usize]
    }

    pub fn infosets(&self) -> &[Infoset] {
        &self.infosets
    }

    pub fn infoset(&self, id: InfosetId) -> &Infoset {
        &self.infosets[id]
    }

    pub fn num_terminals(&self) -> usize {
        self.terminals.len()
    }

    pub fn terminals(&self) -> &[NodeId] {
        &self.terminals
    }

    /// Utility vector of terminal `z` (by terminal index, not node id).
    #[inline]
    pub fn utility(&self, terminal: usize) -> &[f64] {
        let w = self.num_players + 1;
        &self.utilities[terminal * w..(terminal + 1) * w]
    }

    #[inline]
    pub fn chance_reach(&self, terminal: usize) -> f64 {
        self.chance_reach[terminal]
    }

    pub fn node_name(&self, id: NodeId) -> String {
        if self.node_names.is_empty() {
            format!("#{id}")
        } else {
            self.node_names[id].clone()
        }
    }

    /// Minimum and maximum of one agent's utility over all terminals.
    pub fn utility_range(&self, agent: usize) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for z in 0..self.num_terminals() {
            let u = self.utility(z)[agent];
            lo = lo.min(u);
            hi = hi.max(u);
        }
        if self.num_terminals() == 0 {
            (0.0, 0.0)
        } else {
            (lo, hi)
        }
    }

    /// Walks from the root to a terminal node, returning the action indices
    /// taken. Used by test oracles; not on any solver path.
    pub fn path_to(&self, node: NodeId) -> Vec<(NodeId, usize)> {
        // Parent pointers are not stored; recompute by search from the root.
        let mut stack = vec![(self.root, Vec::new())];
        while let Some((id, path)) = stack.pop() {
            if id == node {
                return path;
            }
            for (slot, &c) in self.children(id).iter().enumerate() {
                let mut p = path.clone();
                p.push((id, slot));
                stack.push((c, p));
            }
        }
        panic!("node {node} not reachable from root");
    }
}

/// Errors from game construction, parsing and validation.
#[derive(Debug, thiserror::Error)]
pub enum GameError {
    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },
    #[error("invariant violation: {0}")]
    Invariant(String),
    #[error("agent {agent} has imperfect recall; treeplex undefined")]
    ImperfectRecall { agent: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

pub type GameResult<T> = Result<T, GameError>;
