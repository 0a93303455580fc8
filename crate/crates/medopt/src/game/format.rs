//! The EFG document format: a JSON object with string node ids.
//!
//! ```json
//! {
//!   "num_players": 2,
//!   "root": "n0",
//!   "nodes": [
//!     {"id": "n0", "kind": "chance", "children": ["a", "b"], "chance_probs": [0.5, 0.5]},
//!     {"id": "a", "kind": "agent", "owner": 1, "infoset": "p1", "children": ["z0", "z1"]},
//!     {"id": "z0", "kind": "terminal", "utilities": [0.0, 1.0, -1.0]}
//!   ],
//!   "infosets": [{"id": "p1", "owner": 1, "actions": ["heads", "tails"]}],
//!   "direct_strategy": {"1": {"p1": 0}}
//! }
//! ```
//!
//! Utilities are `(num_players + 1)`-vectors with the mediator objective at
//! index 0. `direct_strategy`, when present, maps each player to an
//! infoset-id -> action-index table.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::builder::GameBuilder;
use super::{ExtensiveFormGame, GameError, GameResult, NodeKind};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NodeDoc {
    pub id: String,
    pub kind: NodeKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub owner: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub infoset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub actions: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub children: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chance_probs: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub utilities: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InfosetDoc {
    pub id: String,
    pub owner: usize,
    pub actions: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GameDocument {
    pub num_players: usize,
    pub root: String,
    pub nodes: Vec<NodeDoc>,
    pub infosets: Vec<InfosetDoc>,
    /// Per player (key "1".."n"), infoset id -> action index.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direct_strategy: Option<HashMap<String, HashMap<String, usize>>>,
}

/// Parses and validates an EFG document.
pub fn load_document(text: &str) -> GameResult<(ExtensiveFormGame, GameDocument)> {
    let doc: GameDocument = serde_json::from_str(text).map_err(|e| GameError::Parse {
        path: format!("line {} column {}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    let game = game_from_doc(&doc)?;
    Ok((game, doc))
}

/// Parses an EFG document, dropping the raw document.
pub fn game_from_json(text: &str) -> GameResult<ExtensiveFormGame> {
    load_document(text).map(|(g, _)| g)
}

pub fn game_from_doc(doc: &GameDocument) -> GameResult<ExtensiveFormGame> {
    if doc.num_players < 1 {
        return Err(GameError::Parse {
            path: "num_players".into(),
            message: "need at least one player".into(),
        });
    }
    let mut builder = GameBuilder::new(doc.num_players);

    let mut infoset_ids: HashMap<&str, usize> = HashMap::new();
    for inf in &doc.infosets {
        if infoset_ids.contains_key(inf.id.as_str()) {
            return Err(GameError::Parse {
                path: format!("infosets/{}", inf.id),
                message: "duplicate infoset id".into(),
            });
        }
        let iid = builder.infoset(inf.owner, inf.id.clone(), inf.actions.clone());
        infoset_ids.insert(&inf.id, iid);
    }

    let mut node_ids: HashMap<&str, usize> = HashMap::new();
    // Two passes: allocate all nodes first so children can be referenced in
    // any order, then wire them. The builder wants children to exist, so we
    // instead topologically order by declaration: allocate placeholders via a
    // reverse sweep. Simpler: resolve names to dense indices first.
    for (i, nd) in doc.nodes.iter().enumerate() {
        if node_ids.insert(nd.id.as_str(), i).is_some() {
            return Err(GameError::Parse {
                path: format!("nodes/{}", nd.id),
                message: "duplicate node id".into(),
            });
        }
    }

    // Build bottom-up: process nodes in reverse topological order found by
    // DFS from the root over the name graph.
    let root_idx = *node_ids.get(doc.root.as_str()).ok_or_else(|| GameError::Parse {
        path: "root".into(),
        message: format!("root node {} not defined", doc.root),
    })?;
    let mut order = Vec::with_capacity(doc.nodes.len());
    let mut state = vec![0u8; doc.nodes.len()]; // 0 new, 1 open, 2 done
    let mut stack = vec![(root_idx, 0usize)];
    state[root_idx] = 1;
    while let Some(&mut (idx, ref mut next_child)) = stack.last_mut() {
        let nd = &doc.nodes[idx];
        let children = nd.children.as_deref().unwrap_or(&[]);
        if *next_child < children.len() {
            let cname = &children[*next_child];
            *next_child += 1;
            let cidx = *node_ids.get(cname.as_str()).ok_or_else(|| GameError::Parse {
                path: format!("nodes/{}/children", nd.id),
                message: format!("unknown child {cname}"),
            })?;
            match state[cidx] {
                0 => {
                    state[cidx] = 1;
                    stack.push((cidx, 0));
                }
                1 => {
                    return Err(GameError::Parse {
                        path: format!("nodes/{}", cname),
                        message: "cycle in node graph".into(),
                    })
                }
                _ => {
                    return Err(GameError::Parse {
                        path: format!("nodes/{}", cname),
                        message: "node has more than one parent".into(),
                    })
                }
            }
        } else {
            state[idx] = 2;
            order.push(idx);
            stack.pop();
        }
    }

    let mut built: Vec<Option<usize>> = vec![None; doc.nodes.len()];
    for &idx in &order {
        let nd = &doc.nodes[idx];
        let child_ids: Vec<usize> = nd
            .children
            .as_deref()
            .unwrap_or(&[])
            .iter()
            .map(|c| built[node_ids[c.as_str()]].expect("children built first"))
            .collect();
        let bid = match nd.kind {
            NodeKind::Terminal => {
                let u = nd.utilities.clone().ok_or_else(|| GameError::Parse {
                    path: format!("nodes/{}", nd.id),
                    message: "terminal node without utilities".into(),
                })?;
                if !child_ids.is_empty() {
                    return Err(GameError::Parse {
                        path: format!("nodes/{}", nd.id),
                        message: "terminal node with children".into(),
                    });
                }
                builder.terminal(u)
            }
            NodeKind::Chance => {
                let probs = nd.chance_probs.clone().ok_or_else(|| GameError::Parse {
                    path: format!("nodes/{}", nd.id),
                    message: "chance node without chance_probs".into(),
                })?;
                if probs.len() != child_ids.len() {
                    return Err(GameError::Parse {
                        path: format!("nodes/{}", nd.id),
                        message: format!(
                            "{} probabilities for {} children",
                            probs.len(),
                            child_ids.len()
                        ),
                    });
                }
                builder.chance(probs.into_iter().zip(child_ids).collect())
            }
            NodeKind::Agent => {
                let owner = nd.owner.ok_or_else(|| GameError::Parse {
                    path: format!("nodes/{}", nd.id),
                    message: "agent node without owner".into(),
                })?;
                let iname = nd.infoset.as_deref().ok_or_else(|| GameError::Parse {
                    path: format!("nodes/{}", nd.id),
                    message: "agent node without infoset".into(),
                })?;
                let iid = *infoset_ids.get(iname).ok_or_else(|| GameError::Parse {
                    path: format!("nodes/{}", nd.id),
                    message: format!("unknown infoset {iname}"),
                })?;
                if let Some(actions) = &nd.actions {
                    let declared = &doc.infosets[iid].actions;
                    if actions != declared {
                        return Err(GameError::Parse {
                            path: format!("nodes/{}", nd.id),
                            message: format!("infoset {iname}: action sets differ"),
                        });
                    }
                }
                builder.agent(owner, iid, child_ids)
            }
        };
        builder.set_name(bid, nd.id.clone());
        built[idx] = Some(bid);
    }

    builder.finish(built[root_idx].expect("root built"))
}

/// Serializes a game back to the document format. Node and infoset ids come
/// from the stored names (or `#<id>` when absent).
pub fn game_to_json(game: &ExtensiveFormGame) -> String {
    let infosets: Vec<InfosetDoc> = game
        .infosets()
        .iter()
        .enumerate()
        .map(|(iid, inf)| InfosetDoc {
            id: if inf.name.is_empty() {
                format!("i{iid}")
            } else {
                inf.name.clone()
            },
            owner: inf.agent,
            actions: inf.actions.clone(),
        })
        .collect();
    let nodes: Vec<NodeDoc> = (0..game.num_nodes())
        .map(|id| {
            let node = game.node(id);
            let children: Vec<String> = game.children(id).iter().map(|&c| game.node_name(c)).collect();
            match node.kind() {
                NodeKind::Terminal => NodeDoc {
                    id: game.node_name(id),
                    kind: NodeKind::Terminal,
                    owner: None,
                    infoset: None,
                    actions: None,
                    children: None,
                    chance_probs: None,
                    utilities: Some(game.utility(node.terminal_index()).to_vec()),
                },
                NodeKind::Chance => NodeDoc {
                    id: game.node_name(id),
                    kind: NodeKind::Chance,
                    owner: None,
                    infoset: None,
                    actions: None,
                    children: Some(children),
                    chance_probs: Some(game.chance_probs(id).to_vec()),
                    utilities: None,
                },
                NodeKind::Agent => NodeDoc {
                    id: game.node_name(id),
                    kind: NodeKind::Agent,
                    owner: Some(node.agent()),
                    infoset: Some(infosets[node.infoset()].id.clone()),
                    actions: None,
                    children: Some(children),
                    chance_probs: None,
                    utilities: None,
                },
            }
        })
        .collect();
    let doc = GameDocument {
        num_players: game.num_players(),
        root: game.node_name(game.root()),
        nodes,
        infosets,
        direct_strategy: None,
    };
    serde_json::to_string_pretty(&doc).expect("serializable")
}
