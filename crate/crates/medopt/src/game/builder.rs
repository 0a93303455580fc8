//! Bottom-up construction of extensive-form games.
//!
//! Generators and encoders create children before parents, then `finish`
//! renumbers everything into depth-first preorder so that each node's
//! children are contiguous and terminals appear in traversal order.

use super::validate::validate;
use super::{
    ExtensiveFormGame, GameError, GameResult, Infoset, InfosetId, Node, NodeId, NodeKind,
};

struct ProtoNode {
    kind: NodeKind,
    agent: u32,
    infoset: u32,
    children: Vec<NodeId>,
    probs: Vec<f64>,
    utility: Vec<f64>,
    name: String,
}

/// Incremental builder. Node ids handed out during construction are
/// provisional; `finish` renumbers them.
pub struct GameBuilder {
    num_players: usize,
    nodes: Vec<ProtoNode>,
    infosets: Vec<(usize, Vec<String>, String)>,
    named: bool,
}

impl GameBuilder {
    pub fn new(num_players: usize) -> Self {
        assert!(num_players >= 1, "need at least one player");
        GameBuilder {
            num_players,
            nodes: Vec::new(),
            infosets: Vec::new(),
            named: false,
        }
    }

    /// Declares an infoset for `agent` with the given action labels.
    pub fn infoset(&mut self, agent: usize, name: impl Into<String>, actions: Vec<String>) -> InfosetId {
        self.infosets.push((agent, actions, name.into()));
        self.infosets.len() - 1
    }

    /// Convenience: action labels "0", "1", ... of the given count.
    pub fn infoset_n(&mut self, agent: usize, name: impl Into<String>, num_actions: usize) -> InfosetId {
        let actions = (0..num_actions).map(|a| a.to_string()).collect();
        self.infoset(agent, name, actions)
    }

    pub fn terminal(&mut self, utility: Vec<f64>) -> NodeId {
        self.push(ProtoNode {
            kind: NodeKind::Terminal,
            agent: 0,
            infoset: 0,
            children: Vec::new(),
            probs: Vec::new(),
            utility,
            name: String::new(),
        })
    }

    pub fn chance(&mut self, outcomes: Vec<(f64, NodeId)>) -> NodeId {
        let (probs, children) = outcomes.into_iter().map(|(p, c)| (p, c)).unzip();
        self.push(ProtoNode {
            kind: NodeKind::Chance,
            agent: 0,
            infoset: 0,
            children,
            probs,
            utility: Vec::new(),
            name: String::new(),
        })
    }

    /// An agent decision node. `children` must match the infoset's action
    /// count, ordered by action index.
    pub fn agent(&mut self, agent: usize, infoset: InfosetId, children: Vec<NodeId>) -> NodeId {
        self.push(ProtoNode {
            kind: NodeKind::Agent,
            agent: agent as u32,
            infoset: infoset as u32,
            children,
            probs: Vec::new(),
            utility: Vec::new(),
            name: String::new(),
        })
    }

    pub fn set_name(&mut self, node: NodeId, name: impl Into<String>) {
        self.nodes[node].name = name.into();
        self.named = true;
    }

    fn push(&mut self, n: ProtoNode) -> NodeId {
        self.nodes.push(n);
        self.nodes.len() - 1
    }

    /// Finalizes the game rooted at `root`, validating all invariants.
    pub fn finish(self, root: NodeId) -> GameResult<ExtensiveFormGame> {
        let GameBuilder {
            num_players,
            nodes: proto,
            infosets: proto_infosets,
            named,
        } = self;
        if root >= proto.len() {
            return Err(GameError::Invariant(format!("root node {root} does not exist")));
        }

        // Depth-first preorder renumbering with an explicit stack. `order`
        // maps new id -> old id.
        let mut order: Vec<NodeId> = Vec::with_capacity(proto.len());
        let mut seen = vec![false; proto.len()];
        let mut stack = vec![root];
        while let Some(old) = stack.pop() {
            if seen[old] {
                return Err(GameError::Invariant(format!(
                    "node {} has more than one parent",
                    old
                )));
            }
            seen[old] = true;
            order.push(old);
            // Push children reversed so they pop in order.
            for &c in proto[old].children.iter().rev() {
                if c >= proto.len() {
                    return Err(GameError::Invariant(format!("child {c} does not exist")));
                }
                stack.push(c);
            }
        }
        let mut new_id = vec![usize::MAX; proto.len()];
        for (new, &old) in order.iter().enumerate() {
            new_id[old] = new;
        }

        let width = num_players + 1;
        let mut nodes = Vec::with_capacity(order.len());
        let mut children = Vec::new();
        let mut chance_probs = Vec::new();
        let mut terminals = Vec::new();
        let mut utilities = Vec::new();
        let mut node_names = if named {
            Vec::with_capacity(order.len())
        } else {
            Vec::new()
        };
        let mut infosets: Vec<Infoset> = proto_infosets
            .into_iter()
            .map(|(agent, actions, name)| Infoset {
                agent,
                actions,
                nodes: Vec::new(),
                name,
            })
            .collect();

        for &old in &order {
            let p = &proto[old];
            let child_start = children.len() as u32;
            for &c in &p.children {
                children.push(new_id[c]);
            }
            let payload = match p.kind {
                NodeKind::Terminal => {
                    if p.utility.len() != width {
                        return Err(GameError::Dimension(format!(
                            "terminal utility has {} entries, expected {}",
                            p.utility.len(),
                            width
                        )));
                    }
                    terminals.push(nodes.len());
                    utilities.extend_from_slice(&p.utility);
                    (terminals.len() - 1) as u32
                }
                NodeKind::Chance => {
                    chance_probs.resize(children.len() - p.children.len(), 0.0);
                    chance_probs.extend_from_slice(&p.probs);
                    0
                }
                NodeKind::Agent => {
                    let iid = p.infoset as usize;
                    if iid >= infosets.len() {
                        return Err(GameError::Invariant(format!(
                            "node {old} references unknown infoset {iid}"
                        )));
                    }
                    infosets[iid].nodes.push(nodes.len());
                    p.infoset
                }
            };
            // Keep the probability arena aligned with the child arena.
            if p.kind != NodeKind::Chance {
                chance_probs.resize(children.len(), 0.0);
            }
            nodes.push(Node {
                kind: p.kind,
                agent: p.agent,
                payload,
                child_start,
                child_count: p.children.len() as u32,
            });
            if named {
                node_names.push(if p.name.is_empty() {
                    format!("#{}", nodes.len() - 1)
                } else {
                    p.name.clone()
                });
            }
        }

        let mut game = ExtensiveFormGame {
            num_players,
            root: 0,
            nodes,
            children,
            chance_probs,
            infosets,
            terminals,
            utilities,
            chance_reach: Vec::new(),
            node_names,
        };
        validate(&mut game)?;
        Ok(game)
    }
}
