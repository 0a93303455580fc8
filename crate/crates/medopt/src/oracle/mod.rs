//! Exact ground truth for small instances: the optimal-equilibrium linear
//! program with explicitly enumerated deviation constraints.
//!
//! Never on a solver hot path; tests, acceptance checks and the `oracle`
//! CLI verb are the only callers.

mod simplex;

pub use simplex::{solve_lp as solve_dense_lp, DenseLp, LpError, LpSolution, Rational, Scalar};

use std::collections::HashMap;
use std::sync::Arc;

use crate::encode::MediatorAugmentedGame;
use crate::game::{
    ExtensiveFormGame, GameError, NodeKind, SequenceFormStrategy, Treeplex, EMPTY_SEQ,
};

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error("{0}")]
    Game(#[from] GameError),
    #[error("{0}")]
    Lp(#[from] LpError),
    #[error("enumeration cap exceeded: {0} strategies")]
    CapExceeded(u128),
}

pub type OracleResult<T> = Result<T, OracleError>;

/// Counts sequence-form-distinct pure strategies on a treeplex without
/// enumerating them.
pub fn count_pure_strategies(tp: &Treeplex) -> u128 {
    let mut children_of: Vec<Vec<usize>> = vec![Vec::new(); tp.num_sequences()];
    for (idx, inf) in tp.infosets().iter().enumerate() {
        children_of[inf.parent_seq].push(idx);
    }
    fn count(tp: &Treeplex, children_of: &[Vec<usize>], seq: usize) -> u128 {
        let mut total: u128 = 1;
        for &idx in &children_of[seq] {
            let inf = &tp.infosets()[idx];
            let mut per_infoset: u128 = 0;
            for a in 0..inf.num_actions {
                per_infoset = per_infoset.saturating_add(count(tp, children_of, inf.seq_start + a));
            }
            total = total.saturating_mul(per_infoset);
        }
        total
    }
    count(tp, &children_of, EMPTY_SEQ)
}

/// Exhaustive, duplicate-free enumeration of the sequence-form pure
/// strategies of a treeplex, pruned to reachable infosets.
pub fn enumerate_pure_strategies(
    tp: &Treeplex,
    cap: usize,
) -> OracleResult<Vec<SequenceFormStrategy>> {
    let total = count_pure_strategies(tp);
    if total > cap as u128 {
        return Err(OracleError::CapExceeded(total));
    }
    let mut children_of: Vec<Vec<usize>> = vec![Vec::new(); tp.num_sequences()];
    for (idx, inf) in tp.infosets().iter().enumerate() {
        children_of[inf.parent_seq].push(idx);
    }

    /// All ways to fill the subtree hanging off `seq`; each way lists the
    /// sequences set to one.
    fn expand(tp: &Treeplex, children_of: &[Vec<usize>], seq: usize) -> Vec<Vec<usize>> {
        let mut combos: Vec<Vec<usize>> = vec![Vec::new()];
        for &idx in &children_of[seq] {
            let inf = &tp.infosets()[idx];
            let mut per_infoset: Vec<Vec<usize>> = Vec::new();
            for a in 0..inf.num_actions {
                let s = inf.seq_start + a;
                for mut sub in expand(tp, children_of, s) {
                    sub.push(s);
                    per_infoset.push(sub);
                }
            }
            let mut next = Vec::with_capacity(combos.len() * per_infoset.len());
            for base in &combos {
                for add in &per_infoset {
                    let mut merged = base.clone();
                    merged.extend_from_slice(add);
                    next.push(merged);
                }
            }
            combos = next;
        }
        combos
    }

    let combos = expand(tp, &children_of, EMPTY_SEQ);
    debug_assert_eq!(combos.len() as u128, total);
    Ok(combos
        .into_iter()
        .map(|ones| {
            let mut values = vec![0.0; tp.num_sequences()];
            values[EMPTY_SEQ] = 1.0;
            for s in ones {
                values[s] = 1.0;
            }
            SequenceFormStrategy::new(tp.agent, values)
        })
        .collect())
}

/// All pure deviations of player `i` (1-based) in an augmented game.
pub fn enumerate_pure_deviations(
    m: &MediatorAugmentedGame,
    player: usize,
    cap: usize,
) -> OracleResult<Vec<SequenceFormStrategy>> {
    enumerate_pure_strategies(m.player_treeplex(player), cap)
}

/// The exact optimum: value, an optimal mediator strategy and per-player
/// dual weight of the deviation constraints.
pub struct OracleSolution {
    pub value: f64,
    pub strategy: MediatorSolution,
    /// Sum of deviation-constraint duals per player (player `i` at `i-1`).
    pub player_dual_weights: Vec<f64>,
    /// Upper bound on the critical multiplier of the direct Lagrangian: any
    /// fixed multiplier strictly above this leaves the optimum unchanged.
    pub dual_bound: f64,
    pub num_constraints: usize,
}

pub enum MediatorSolution {
    /// Perfect-recall mediator: a sequence-form strategy.
    Sequence(SequenceFormStrategy),
    /// Imperfect-recall mediator: weights over enumerated pure assignments
    /// (infoset id -> action choice).
    Mixture(Vec<(f64, HashMap<usize, usize>)>),
}

impl MediatorSolution {
    pub fn sequence(&self) -> Option<&SequenceFormStrategy> {
        match self {
            MediatorSolution::Sequence(s) => Some(s),
            MediatorSolution::Mixture(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct OracleConfig {
    /// Cap on enumerated pure strategies per agent.
    pub deviation_cap: usize,
    /// Cap on total constraints.
    pub constraint_cap: usize,
    /// Solve the LP in exact rational arithmetic.
    pub exact: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            deviation_cap: 1_000_000,
            constraint_cap: 200_000,
            exact: false,
        }
    }
}

/// Solves the optimal-equilibrium program exactly for an augmented game
/// (which always carries a perfect-recall mediator treeplex): variables are
/// the mediator's sequence weights, equalities are flow conservation, and
/// one inequality per enumerated pure deviation per player.
pub fn solve_lp(
    m: &Arc<MediatorAugmentedGame>,
    config: &OracleConfig,
) -> OracleResult<OracleSolution> {
    let tp = m.mediator_treeplex().clone();
    let n_seq = tp.num_sequences();
    let num_players = m.num_players();

    let wired0 = m.wired_direct();
    let mut objective = vec![0.0; n_seq];
    for z in 0..wired0.game.num_terminals() {
        let s = wired0.eval.terminal_seq(z, 0);
        objective[s] += wired0.game.chance_reach(z) * wired0.game.utility(z)[0];
    }

    let mut eq: Vec<(Vec<f64>, f64)> = Vec::with_capacity(1 + tp.num_infosets());
    let mut root = vec![0.0; n_seq];
    root[EMPTY_SEQ] = 1.0;
    eq.push((root, 1.0));
    for inf in tp.infosets() {
        let mut row = vec![0.0; n_seq];
        for s in inf.seq_start..inf.seq_start + inf.num_actions {
            row[s] = 1.0;
        }
        row[inf.parent_seq] -= 1.0;
        eq.push((row, 0.0));
    }

    // Deviation rows: sum_z chance * (x[z] - d_i[z]) * u_i(z) attached to
    // the mediator sequence at z, over the wired-deviator terminals.
    let mut le: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut owner: Vec<usize> = Vec::new();
    for i in 1..=num_players {
        let devs = enumerate_pure_deviations(m, i, config.deviation_cap)?;
        let w = m.wired_deviator(i);
        let d = m.direct_strategy(i);
        for x in &devs {
            let mut row = vec![0.0; n_seq];
            for z in 0..w.game.num_terminals() {
                let si = w.eval.terminal_seq(z, i);
                let diff = x.values[si] - d.values[si];
                if diff != 0.0 {
                    let s0 = w.eval.terminal_seq(z, 0);
                    row[s0] += w.game.chance_reach(z) * diff * w.game.utility(z)[i];
                }
            }
            le.push((row, 0.0));
            owner.push(i);
            if le.len() > config.constraint_cap {
                return Err(OracleError::CapExceeded(le.len() as u128));
            }
        }
    }

    let num_constraints = le.len();
    let (value, x, le_duals) = run_lp(n_seq, objective, eq, le, config.exact)?;

    let mut player_dual_weights = vec![0.0; num_players];
    for (k, &i) in owner.iter().enumerate() {
        player_dual_weights[i - 1] += le_duals[k].max(0.0);
    }
    let dual_bound = player_dual_weights.iter().copied().fold(0.0f64, f64::max);

    let strategy = SequenceFormStrategy::new(0, x);
    strategy.validate(&tp, 1e-6)?;
    Ok(OracleSolution {
        value,
        strategy: MediatorSolution::Sequence(strategy),
        player_dual_weights,
        dual_bound,
        num_constraints,
    })
}

/// Imperfect-recall fallback on a raw game: mixture weights over enumerated
/// mediator pure assignments, with all utilities computed by direct tree
/// walks. `direct_choices` gives each player's direct action per infoset.
pub fn solve_lp_enumerated(
    game: &Arc<ExtensiveFormGame>,
    direct_choices: &[HashMap<usize, usize>],
    config: &OracleConfig,
) -> OracleResult<OracleSolution> {
    let num_players = game.num_players();
    if direct_choices.len() != num_players {
        return Err(GameError::Dimension(format!(
            "{} direct strategies for {num_players} players",
            direct_choices.len()
        ))
        .into());
    }

    let assignments_for = |agent: usize| -> OracleResult<Vec<HashMap<usize, usize>>> {
        let infosets: Vec<usize> = (0..game.infosets().len())
            .filter(|&iid| game.infoset(iid).agent == agent && !game.infoset(iid).nodes.is_empty())
            .collect();
        let mut total: u128 = 1;
        for &iid in &infosets {
            total = total.saturating_mul(game.infoset(iid).num_actions() as u128);
        }
        if total > config.deviation_cap as u128 {
            return Err(OracleError::CapExceeded(total));
        }
        let mut out: Vec<HashMap<usize, usize>> = vec![HashMap::new()];
        for &iid in &infosets {
            let k = game.infoset(iid).num_actions();
            let mut next = Vec::with_capacity(out.len() * k);
            for base in &out {
                for a in 0..k {
                    let mut cur = base.clone();
                    cur.insert(iid, a);
                    next.push(cur);
                }
            }
            out = next;
        }
        Ok(out)
    };

    let mediator_assignments = assignments_for(0)?;
    let k = mediator_assignments.len();

    let mut objective = Vec::with_capacity(k);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut owner: Vec<usize> = Vec::new();
    let deviations: Vec<Vec<HashMap<usize, usize>>> = (1..=num_players)
        .map(assignments_for)
        .collect::<OracleResult<_>>()?;
    for (i, per_player) in deviations.iter().enumerate() {
        for _ in per_player {
            rows.push(Vec::with_capacity(k));
            owner.push(i + 1);
        }
        if rows.len() > config.constraint_cap {
            return Err(OracleError::CapExceeded(rows.len() as u128));
        }
    }

    for mu in &mediator_assignments {
        let mut profile: Vec<&HashMap<usize, usize>> = Vec::with_capacity(num_players + 1);
        profile.push(mu);
        for d in direct_choices {
            profile.push(d);
        }
        let base = pure_walk(game, &profile);
        objective.push(base[0]);
        let mut row_idx = 0;
        for i in 1..=num_players {
            for x in &deviations[i - 1] {
                let mut prof = profile.clone();
                prof[i] = x;
                let u = pure_walk(game, &prof);
                rows[row_idx].push(u[i] - base[i]);
                row_idx += 1;
            }
        }
    }

    let eq = vec![(vec![1.0; k], 1.0)];
    let le: Vec<(Vec<f64>, f64)> = rows.into_iter().map(|r| (r, 0.0)).collect();
    let num_constraints = le.len();
    let (value, x, le_duals) = run_lp(k, objective, eq, le, config.exact)?;

    let mut player_dual_weights = vec![0.0; num_players];
    for (c, &i) in owner.iter().enumerate() {
        player_dual_weights[i - 1] += le_duals[c].max(0.0);
    }
    let dual_bound = player_dual_weights.iter().copied().fold(0.0f64, f64::max);
    let mixture: Vec<(f64, HashMap<usize, usize>)> = x
        .iter()
        .zip(&mediator_assignments)
        .filter(|(&w, _)| w > 1e-12)
        .map(|(&w, a)| (w, a.clone()))
        .collect();
    Ok(OracleSolution {
        value,
        strategy: MediatorSolution::Mixture(mixture),
        player_dual_weights,
        dual_bound,
        num_constraints,
    })
}

/// Solves in floats first and verifies the result as a certified
/// primal/dual optimal pair; any doubt (solver error, feasibility residue,
/// duality gap) escalates to exact rational arithmetic.
fn run_lp(
    num_vars: usize,
    objective: Vec<f64>,
    eq: Vec<(Vec<f64>, f64)>,
    le: Vec<(Vec<f64>, f64)>,
    exact: bool,
) -> OracleResult<(f64, Vec<f64>, Vec<f64>)> {
    if !exact {
        let lp = DenseLp {
            num_vars,
            objective: objective.clone(),
            eq: eq.clone(),
            le: le.clone(),
        };
        if let Ok(sol) = simplex::solve_lp(&lp) {
            if verified_optimal(&lp, &sol) {
                return Ok((sol.value, sol.x, sol.le_duals));
            }
        }
    }
    let conv = |v: &[f64]| v.iter().map(|&x| Rational::from_f64(x)).collect::<Vec<_>>();
    let lp = DenseLp {
        num_vars,
        objective: conv(&objective),
        eq: eq
            .iter()
            .map(|(r, b)| (conv(r), Rational::from_f64(*b)))
            .collect(),
        le: le
            .iter()
            .map(|(r, b)| (conv(r), Rational::from_f64(*b)))
            .collect(),
    };
    let sol = simplex::solve_lp(&lp)?;
    Ok((
        Scalar::to_f64(&sol.value),
        sol.x.iter().map(Scalar::to_f64).collect(),
        sol.le_duals.iter().map(Scalar::to_f64).collect(),
    ))
}

/// Weak-duality certificate for a float solution: primal feasibility, dual
/// feasibility and a matching objective pair.
fn verified_optimal(lp: &DenseLp<f64>, sol: &LpSolution<f64>) -> bool {
    let scale = 1.0
        + lp.objective.iter().fold(0.0f64, |a, &v| a.max(v.abs()))
        + sol.value.abs();
    let tol = 1e-7 * scale;
    if sol.x.iter().any(|&v| v < -tol) {
        return false;
    }
    for (row, b) in &lp.eq {
        let lhs: f64 = row.iter().zip(&sol.x).map(|(a, x)| a * x).sum();
        if (lhs - b).abs() > tol {
            return false;
        }
    }
    for (row, b) in &lp.le {
        let lhs: f64 = row.iter().zip(&sol.x).map(|(a, x)| a * x).sum();
        if lhs > b + tol {
            return false;
        }
    }
    if sol.le_duals.iter().any(|&y| y < -tol) {
        return false;
    }
    // Dual feasibility: A^T y >= c componentwise.
    for j in 0..lp.num_vars {
        let mut aty = 0.0;
        for (k, (row, _)) in lp.eq.iter().enumerate() {
            aty += sol.eq_duals[k] * row[j];
        }
        for (k, (row, _)) in lp.le.iter().enumerate() {
            aty += sol.le_duals[k] * row[j];
        }
        if aty < lp.objective[j] - tol {
            return false;
        }
    }
    // Strong duality: y . b equals the primal value.
    let mut dual_value = 0.0;
    for (k, (_, b)) in lp.eq.iter().enumerate() {
        dual_value += sol.eq_duals[k] * b;
    }
    for (k, (_, b)) in lp.le.iter().enumerate() {
        dual_value += sol.le_duals[k] * b;
    }
    (dual_value - sol.value).abs() <= tol
}

/// Expected utilities when every agent plays a pure per-infoset assignment
/// (`profile[agent]`), by one recursive pass; handles imperfect recall.
fn pure_walk(game: &ExtensiveFormGame, profile: &[&HashMap<usize, usize>]) -> Vec<f64> {
    fn recurse(
        game: &ExtensiveFormGame,
        profile: &[&HashMap<usize, usize>],
        node: usize,
        reach: f64,
        out: &mut [f64],
    ) {
        let n = game.node(node);
        match n.kind() {
            NodeKind::Terminal => {
                let u = game.utility(n.terminal_index());
                for (acc, v) in out.iter_mut().zip(u) {
                    *acc += reach * v;
                }
            }
            NodeKind::Chance => {
                let probs = game.chance_probs(node);
                for (slot, &c) in game.children(node).iter().enumerate() {
                    if probs[slot] > 0.0 {
                        recurse(game, profile, c, reach * probs[slot], out);
                    }
                }
            }
            NodeKind::Agent => {
                let pick = profile[n.agent()]
                    .get(&n.infoset())
                    .copied()
                    .unwrap_or(0);
                recurse(game, profile, game.children(node)[pick], reach, out);
            }
        }
    }
    let mut out = vec![0.0; game.num_agents()];
    recurse(game, profile, game.root(), 1.0, &mut out);
    out
}
