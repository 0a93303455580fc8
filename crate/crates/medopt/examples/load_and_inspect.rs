//! Load an extensive-form game from its JSON document, validate it, and
//! inspect the sequence-form decision spaces.
//!
//! ```bash
//! cargo run --release --example load_and_inspect [path/to/game.json]
//! ```
//!
//! Without an argument, a bundled matching-pennies document is used.

use std::sync::Arc;

use medopt::game::{game_from_json, Evaluator, SequenceFormStrategy};

const PENNIES: &str = r#"{
  "num_players": 2,
  "root": "r",
  "nodes": [
    {"id": "r", "kind": "agent", "owner": 1, "infoset": "p1", "children": ["a", "b"]},
    {"id": "a", "kind": "agent", "owner": 2, "infoset": "p2", "children": ["aa", "ab"]},
    {"id": "b", "kind": "agent", "owner": 2, "infoset": "p2", "children": ["ba", "bb"]},
    {"id": "aa", "kind": "terminal", "utilities": [0.0, 1.0, -1.0]},
    {"id": "ab", "kind": "terminal", "utilities": [0.0, -1.0, 1.0]},
    {"id": "ba", "kind": "terminal", "utilities": [0.0, -1.0, 1.0]},
    {"id": "bb", "kind": "terminal", "utilities": [0.0, 1.0, -1.0]}
  ],
  "infosets": [
    {"id": "p1", "owner": 1, "actions": ["heads", "tails"]},
    {"id": "p2", "owner": 2, "actions": ["heads", "tails"]}
  ]
}"#;

fn main() {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path).expect("readable game file"),
        None => PENNIES.to_string(),
    };
    let game = Arc::new(game_from_json(&text).expect("valid game document"));
    println!(
        "{} players, {} nodes, {} terminals, {} infosets",
        game.num_players(),
        game.num_nodes(),
        game.num_terminals(),
        game.infosets().len()
    );

    let eval = Evaluator::new(game.clone()).expect("all agents have perfect recall");
    for agent in 0..=game.num_players() {
        let tp = eval.treeplex(agent);
        println!(
            "agent {agent}: {} sequences over {} infosets",
            tp.num_sequences(),
            tp.num_infosets()
        );
    }

    // Expected utilities under the all-uniform profile, and each agent's
    // best response against it.
    let profile: Vec<SequenceFormStrategy> = (0..=game.num_players())
        .map(|a| SequenceFormStrategy::uniform(eval.treeplex(a)))
        .collect();
    let values = eval.expected_utilities(&profile).expect("profile fits");
    println!("uniform profile utilities: {values:?}");
    for agent in 1..=game.num_players() {
        let (_, best) = eval.best_response(agent, &profile).expect("best response");
        println!(
            "agent {agent}: uniform value {:.4}, best response value {:.4}",
            values[agent], best
        );
    }
}
