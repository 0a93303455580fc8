//! The Sheriff bargaining game.
//!
//! The smuggler loads `n` in `{0..N}` illegal items, then `r` rounds of
//! bargaining follow: the smuggler proposes a bribe in `{0..B}` and the
//! sheriff accepts or declines. Only the final round binds. If the final
//! bribe is accepted the sheriff collects it and the cargo passes; if
//! declined, the sheriff decides whether to inspect: catching items costs
//! the smuggler `p` per item, inspecting a clean cargo costs the sheriff a
//! compensation `s`, and no inspection lets the smuggler collect `v` per
//! item. Fixed parameters `v = 5`, `p = 1`, `s = 1`.
//!
//! The sheriff never observes the cargo; the smuggler sees everything
//! public.

use crate::game::{ExtensiveFormGame, GameBuilder, GameError, GameResult, InfosetId, NodeId};

#[derive(Debug, Clone, Copy)]
pub struct SheriffParams {
    /// Maximum number of illegal items `N`.
    pub max_items: usize,
    /// Maximum bribe `B`.
    pub max_bribe: usize,
    /// Bargaining rounds `r`.
    pub rounds: usize,
}

const ITEM_VALUE: f64 = 5.0;
const PENALTY: f64 = 1.0;
const COMPENSATION: f64 = 1.0;

pub fn sheriff(params: SheriffParams) -> GameResult<ExtensiveFormGame> {
    if params.rounds == 0 {
        return Err(GameError::Invariant("need at least one bargaining round".into()));
    }
    let mut ctx = Ctx {
        params,
        b: GameBuilder::new(2),
        smuggler_infosets: std::collections::HashMap::new(),
        sheriff_infosets: std::collections::HashMap::new(),
    };
    // Load decision: n in {0..N}, smuggler's very first infoset.
    let load_labels = (0..=params.max_items).map(|n| format!("load{n}")).collect();
    let load_infoset = ctx.b.infoset(1, "load", load_labels);
    let mut children = Vec::with_capacity(params.max_items + 1);
    for n in 0..=params.max_items {
        children.push(ctx.bargain(n, String::new(), 0));
    }
    let root = ctx.b.agent(1, load_infoset, children);
    ctx.b.finish(root)
}

struct Ctx {
    params: SheriffParams,
    b: GameBuilder,
    /// (items, public history) -> proposal infoset.
    smuggler_infosets: std::collections::HashMap<(usize, String), InfosetId>,
    /// public history -> response/inspect infoset (cargo stays hidden).
    sheriff_infosets: std::collections::HashMap<String, InfosetId>,
}

impl Ctx {
    fn bargain(&mut self, items: usize, history: String, round: usize) -> NodeId {
        if round == self.params.rounds {
            unreachable!("terminal handled at the final response");
        }
        // Smuggler proposes.
        let labels: Vec<String> = (0..=self.params.max_bribe).map(|b| format!("b{b}")).collect();
        let key = (items, history.clone());
        let iid = match self.smuggler_infosets.get(&key) {
            Some(&id) => id,
            None => {
                let id = self.b.infoset(1, format!("smuggler|{items}|{history}"), labels);
                self.smuggler_infosets.insert(key, id);
                id
            }
        };
        let mut proposals = Vec::with_capacity(self.params.max_bribe + 1);
        for bribe in 0..=self.params.max_bribe {
            proposals.push(self.respond(items, format!("{history}p{bribe}."), round, bribe));
        }
        self.b.agent(1, iid, proposals)
    }

    fn respond(&mut self, items: usize, history: String, round: usize, bribe: usize) -> NodeId {
        let key = format!("respond|{history}");
        let iid = match self.sheriff_infosets.get(&key) {
            Some(&id) => id,
            None => {
                let id = self
                    .b
                    .infoset(2, key.clone(), vec!["accept".into(), "decline".into()]);
                self.sheriff_infosets.insert(key, id);
                id
            }
        };
        let final_round = round + 1 == self.params.rounds;
        let accept = if final_round {
            // Accepted final bribe binds: smuggler nets v*n - b, sheriff b.
            let smuggler = ITEM_VALUE * items as f64 - bribe as f64;
            let sheriff_u = bribe as f64;
            self.terminal(smuggler, sheriff_u)
        } else {
            self.bargain(items, format!("{history}a."), round + 1)
        };
        let decline = if final_round {
            self.inspect(items, format!("{history}d."))
        } else {
            self.bargain(items, format!("{history}d."), round + 1)
        };
        self.b.agent(2, iid, vec![accept, decline])
    }

    fn inspect(&mut self, items: usize, history: String) -> NodeId {
        let key = format!("inspect|{history}");
        let iid = match self.sheriff_infosets.get(&key) {
            Some(&id) => id,
            None => {
                let id = self
                    .b
                    .infoset(2, key.clone(), vec!["inspect".into(), "pass".into()]);
                self.sheriff_infosets.insert(key, id);
                id
            }
        };
        let inspected = if items > 0 {
            // Caught: smuggler pays p per item to the sheriff.
            self.terminal(-PENALTY * items as f64, PENALTY * items as f64)
        } else {
            // Clean cargo: sheriff compensates.
            self.terminal(COMPENSATION, -COMPENSATION)
        };
        let passed = self.terminal(ITEM_VALUE * items as f64, 0.0);
        self.b.agent(2, iid, vec![inspected, passed])
    }

    fn terminal(&mut self, smuggler: f64, sheriff_u: f64) -> NodeId {
        // Objective slot carries social welfare.
        self.b.terminal(vec![smuggler + sheriff_u, smuggler, sheriff_u])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_instance_payoffs() {
        // N=1, B=2, r=1: uninspected smuggling pays 5n, caught pays -n.
        let g = sheriff(SheriffParams {
            max_items: 1,
            max_bribe: 2,
            rounds: 1,
        })
        .unwrap();
        let mut saw_unpunished = false;
        let mut saw_caught = false;
        for z in 0..g.num_terminals() {
            let u = g.utility(z);
            if u[1] == 5.0 && u[2] == 0.0 {
                saw_unpunished = true;
            }
            if u[1] == -1.0 && u[2] == 1.0 {
                saw_caught = true;
            }
        }
        assert!(saw_unpunished && saw_caught);
    }

    #[test]
    fn terminal_count_by_path_enumeration() {
        // r=1: per n (2 values) and bribe (3 values): accept -> 1 terminal,
        // decline -> inspect node -> 2 terminals. 2 * 3 * 3 = 18.
        let g = sheriff(SheriffParams {
            max_items: 1,
            max_bribe: 2,
            rounds: 1,
        })
        .unwrap();
        assert_eq!(g.num_terminals(), 18);
    }

    #[test]
    fn sheriff_cannot_see_cargo() {
        let g = sheriff(SheriffParams {
            max_items: 2,
            max_bribe: 1,
            rounds: 2,
        })
        .unwrap();
        // Sheriff infosets must merge across item counts: each of its
        // infosets contains one node per cargo size with that history.
        for inf in g.infosets() {
            if inf.agent == 2 && !inf.nodes.is_empty() {
                assert_eq!(inf.nodes.len() % 3, 0, "three cargo sizes merge");
            }
        }
    }
}
