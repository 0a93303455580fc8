//! Benchmark game generators.

mod kuhn;
mod randnf;
mod sheriff;

pub use kuhn::kuhn3;
pub use randnf::random_normal_form;
pub use sheriff::{sheriff, SheriffParams};

use std::collections::HashMap;
use std::sync::Arc;

use crate::encode::{
    encode_nf_correlated, encode_sequential_auction, AuctionSpec, CorrelationConcept,
    MediatorAugmentedGame, NormalFormSpec, ObjectiveSpec,
};
use crate::game::{ExtensiveFormGame, GameBuilder, GameError, GameResult};

/// What a generator produced: a plain benchmark game or a fully augmented
/// instance ready for the solvers.
pub enum Generated {
    Game(Arc<ExtensiveFormGame>),
    Augmented(Arc<MediatorAugmentedGame>),
}

/// Builds a named benchmark instance from `key=value` parameters.
///
/// Names: `kuhn3` (ranks `r`), `sheriff` (`N`, `B`, `r`), `auction`
/// (`R`, `V`, `B`, `n`, `step`), `randnf` (`seed`, `p`, `a`, plus `concept`
/// and `objective`), `pennies`, `rps`.
pub fn generate(name: &str, params: &HashMap<String, String>) -> GameResult<Generated> {
    let get_usize = |key: &str, default: usize| -> GameResult<usize> {
        match params.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| GameError::Parse {
                    path: format!("params/{key}"),
                    message: format!("not an integer: {v}"),
                }),
        }
    };
    let get_f64 = |key: &str, default: f64| -> GameResult<f64> {
        match params.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| GameError::Parse {
                path: format!("params/{key}"),
                message: format!("not a number: {v}"),
            }),
        }
    };
    match name {
        "kuhn3" => {
            let r = get_usize("r", 3)?;
            Ok(Generated::Game(Arc::new(kuhn3(r)?)))
        }
        "sheriff" => {
            let p = SheriffParams {
                max_items: get_usize("N", 1)?,
                max_bribe: get_usize("B", 2)?,
                rounds: get_usize("r", 1)?,
            };
            Ok(Generated::Game(Arc::new(sheriff(p)?)))
        }
        "auction" => {
            let grid = get_usize("V", 5)?;
            let spec = AuctionSpec {
                rounds: get_usize("R", 2)?,
                valuations: (0..grid)
                    .map(|k| k as f64 / (grid.max(2) - 1) as f64)
                    .collect(),
                budget: get_f64("B", 1.0)?,
                bidders: get_usize("n", 2)?,
                payment_step: get_f64("step", 1.0 / (grid.max(2) - 1) as f64)?,
                public_bids: get_usize("public", 0)? != 0,
                upfront_valuations: get_usize("upfront", 0)? != 0,
                deviator_sees_bids: get_usize("seesbids", 1)? != 0,
            };
            Ok(Generated::Augmented(Arc::new(encode_sequential_auction(spec)?)))
        }
        "randnf" => {
            let seed = get_usize("seed", 0)? as u64;
            let players = get_usize("p", 2)?;
            let actions = get_usize("a", 2)?;
            let concept = match params.get("concept").map(String::as_str) {
                None | Some("ce") => CorrelationConcept::Ce,
                Some("cce") => CorrelationConcept::Cce,
                Some(other) => {
                    return Err(GameError::Parse {
                        path: "params/concept".into(),
                        message: format!("unknown concept {other}"),
                    })
                }
            };
            let objective = match params.get("objective").map(String::as_str) {
                None | Some("welfare") => ObjectiveSpec::Welfare,
                Some(p) if p.starts_with('p') => {
                    let idx: usize = p[1..].parse().map_err(|_| GameError::Parse {
                        path: "params/objective".into(),
                        message: format!("unknown objective {p}"),
                    })?;
                    ObjectiveSpec::Player(idx)
                }
                Some(other) => {
                    return Err(GameError::Parse {
                        path: "params/objective".into(),
                        message: format!("unknown objective {other}"),
                    })
                }
            };
            let tensor = random_normal_form(seed, players, actions);
            let spec = NormalFormSpec {
                actions: vec![actions; players],
                utilities: tensor,
                concept,
                objective,
            };
            Ok(Generated::Augmented(Arc::new(encode_nf_correlated(spec)?)))
        }
        "pennies" => Ok(Generated::Game(Arc::new(matching_pennies()))),
        "rps" => Ok(Generated::Game(Arc::new(rock_paper_scissors()))),
        other => Err(GameError::Parse {
            path: "generator".into(),
            message: format!("unknown generator {other}"),
        }),
    }
}

/// Matching pennies: two players, one infoset each, payoffs +-1.
pub fn matching_pennies() -> ExtensiveFormGame {
    let mut b = GameBuilder::new(2);
    let i1 = b.infoset(1, "p1", vec!["heads".into(), "tails".into()]);
    let i2 = b.infoset(2, "p2", vec!["heads".into(), "tails".into()]);
    let mut p1_children = Vec::new();
    for first in 0..2 {
        let mut p2_children = Vec::new();
        for second in 0..2 {
            let p1_wins = first == second;
            let u1 = if p1_wins { 1.0 } else { -1.0 };
            p2_children.push(b.terminal(vec![0.0, u1, -u1]));
        }
        p1_children.push(b.agent(2, i2, p2_children));
    }
    let root = b.agent(1, i1, p1_children);
    b.finish(root).expect("valid game")
}

/// Rock-paper-scissors with the usual cyclic payoffs.
pub fn rock_paper_scissors() -> ExtensiveFormGame {
    let mut b = GameBuilder::new(2);
    let labels = || vec!["rock".into(), "paper".into(), "scissors".into()];
    let i1 = b.infoset(1, "p1", labels());
    let i2 = b.infoset(2, "p2", labels());
    let mut p1_children = Vec::new();
    for first in 0..3i32 {
        let mut p2_children = Vec::new();
        for second in 0..3i32 {
            let u1 = match (3 + first - second) % 3 {
                0 => 0.0,
                1 => 1.0,
                _ => -1.0,
            };
            p2_children.push(b.terminal(vec![0.0, u1, -u1]));
        }
        p1_children.push(b.agent(2, i2, p2_children));
    }
    let root = b.agent(1, i1, p1_children);
    b.finish(root).expect("valid game")
}
