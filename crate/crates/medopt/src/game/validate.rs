//! Game invariant checks run once at construction time.

use std::collections::HashMap;

use super::{
    ExtensiveFormGame, GameError, GameResult, NodeKind, MEDIATOR, PROB_CLAMP, PROB_SUM_TOL,
};

/// Validates all invariants and fills in derived data (chance reach).
/// Chance probabilities with magnitude below `PROB_CLAMP` are zeroed and the
/// distribution renormalized; larger deviations are errors.
pub fn validate(game: &mut ExtensiveFormGame) -> GameResult<()> {
    check_utilities(game)?;
    normalize_chance(game)?;
    check_infosets(game)?;
    check_perfect_recall(game)?;
    compute_chance_reach(game);
    Ok(())
}

fn check_utilities(game: &ExtensiveFormGame) -> GameResult<()> {
    for (z, &node) in game.terminals.iter().enumerate() {
        for (agent, &u) in game.utility(z).iter().enumerate() {
            if !u.is_finite() {
                return Err(GameError::Invariant(format!(
                    "terminal {}: utility for agent {agent} is not finite",
                    game.node_name(node)
                )));
            }
        }
    }
    Ok(())
}

fn normalize_chance(game: &mut ExtensiveFormGame) -> GameResult<()> {
    for id in 0..game.nodes.len() {
        if game.nodes[id].kind != NodeKind::Chance {
            continue;
        }
        let start = game.nodes[id].child_start as usize;
        let count = game.nodes[id].child_count as usize;
        if count == 0 {
            return Err(GameError::Invariant(format!(
                "chance node {}: no outcomes",
                game.node_name(id)
            )));
        }
        let mut sum = 0.0;
        for slot in start..start + count {
            let p = game.chance_probs[slot];
            if p < -PROB_CLAMP {
                return Err(GameError::Invariant(format!(
                    "chance node {}: negative mass {p}",
                    game.node_name(id)
                )));
            }
            let p = if p.abs() < PROB_CLAMP { 0.0 } else { p };
            game.chance_probs[slot] = p;
            sum += p;
        }
        if (sum - 1.0).abs() > PROB_SUM_TOL {
            return Err(GameError::Invariant(format!(
                "chance node {}: mass {sum}",
                game.node_name(id)
            )));
        }
        // Serialization noise within the tolerance is normalized away;
        // distributions already exact to clamping precision stay verbatim
        // so that round-trips are bit-exact.
        if (sum - 1.0).abs() > PROB_CLAMP {
            for slot in start..start + count {
                game.chance_probs[slot] /= sum;
            }
        }
    }
    Ok(())
}

fn check_infosets(game: &ExtensiveFormGame) -> GameResult<()> {
    for (iid, infoset) in game.infosets.iter().enumerate() {
        if infoset.agent > game.num_players {
            return Err(GameError::Invariant(format!(
                "infoset {iid}: owner {} out of range",
                infoset.agent
            )));
        }
        if infoset.num_actions() == 0 && !infoset.nodes.is_empty() {
            return Err(GameError::Invariant(format!("infoset {iid}: empty action set")));
        }
        for &node in &infoset.nodes {
            if game.nodes[node].num_children() != infoset.num_actions() {
                return Err(GameError::Invariant(format!(
                    "infoset {iid}: action sets differ (node {} has {} actions, infoset has {})",
                    game.node_name(node),
                    game.nodes[node].num_children(),
                    infoset.num_actions()
                )));
            }
        }
    }
    Ok(())
}

/// Every player 1..=n must have perfect recall: all nodes of an infoset see
/// the same own-action sequence. The mediator (agent 0) is exempt here; the
/// treeplex builder re-checks it when a mediator decision space is needed.
fn check_perfect_recall(game: &ExtensiveFormGame) -> GameResult<()> {
    // Interned own-sequence signature per (agent, node on the DFS path).
    // sig 0 = empty sequence.
    let num_agents = game.num_agents();
    let mut intern: HashMap<(u32, u32, u32), u32> = HashMap::new();
    let mut next_sig = 1u32;
    // Infoset -> first-seen signature of its owner at member nodes.
    let mut infoset_sig: Vec<Option<u32>> = vec![None; game.infosets.len()];

    // DFS carrying the per-agent signature vector.
    let mut stack: Vec<(usize, Vec<u32>)> = vec![(game.root, vec![0; num_agents])];
    while let Some((id, sigs)) = stack.pop() {
        let node = &game.nodes[id];
        match node.kind {
            NodeKind::Terminal => {}
            NodeKind::Chance => {
                for &c in game.children(id) {
                    stack.push((c, sigs.clone()));
                }
            }
            NodeKind::Agent => {
                let agent = node.agent();
                let iid = node.infoset();
                match infoset_sig[iid] {
                    None => infoset_sig[iid] = Some(sigs[agent]),
                    Some(first) => {
                        if first != sigs[agent] && agent != MEDIATOR {
                            return Err(GameError::Invariant(format!(
                                "player {agent} lacks perfect recall at node {}",
                                game.node_name(id)
                            )));
                        }
                    }
                }
                for (a, &c) in game.children(id).iter().enumerate() {
                    let key = (sigs[agent], iid as u32, a as u32);
                    let sig = *intern.entry(key).or_insert_with(|| {
                        let s = next_sig;
                        next_sig += 1;
                        s
                    });
                    let mut child_sigs = sigs.clone();
                    child_sigs[agent] = sig;
                    stack.push((c, child_sigs));
                }
            }
        }
    }
    Ok(())
}

fn compute_chance_reach(game: &mut ExtensiveFormGame) {
    let mut reach = vec![0.0; game.num_terminals()];
    let mut stack: Vec<(usize, f64)> = vec![(game.root, 1.0)];
    while let Some((id, r)) = stack.pop() {
        let node = &game.nodes[id];
        match node.kind {
            NodeKind::Terminal => reach[node.terminal_index()] = r,
            NodeKind::Chance => {
                let start = node.child_start as usize;
                for (slot, &c) in game.children(id).iter().enumerate() {
                    stack.push((c, r * game.chance_probs[start + slot]));
                }
            }
            NodeKind::Agent => {
                for &c in game.children(id) {
                    stack.push((c, r));
                }
            }
        }
    }
    game.chance_reach = reach;
}
