//! The bundled benchmark generators: three-player Kuhn poker and the
//! Sheriff bargaining game. Builds a few instances, reports sizes and
//! exploitability of the uniform profile.
//!
//! ```bash
//! cargo run --release --example benchmark_games
//! ```

use std::sync::Arc;

use medopt::game::{Evaluator, SequenceFormStrategy};
use medopt::gen::{kuhn3, sheriff, SheriffParams};

fn inspect(name: &str, game: medopt::ExtensiveFormGame) {
    let game = Arc::new(game);
    let eval = Evaluator::new(game.clone()).expect("perfect recall");
    let profile: Vec<SequenceFormStrategy> = (0..=game.num_players())
        .map(|a| SequenceFormStrategy::uniform(eval.treeplex(a)))
        .collect();
    let values = eval.expected_utilities(&profile).expect("evaluates");
    print!(
        "{name}: {} nodes, {} terminals; uniform-profile values [",
        game.num_nodes(),
        game.num_terminals()
    );
    for agent in 1..=game.num_players() {
        print!("{}{:.4}", if agent > 1 { ", " } else { "" }, values[agent]);
    }
    println!("]");
    for agent in 1..=game.num_players() {
        let (_, br) = eval.best_response(agent, &profile).expect("best response");
        println!(
            "  player {agent} gains {:.4} by best-responding to uniform play",
            br - values[agent]
        );
    }
}

fn main() {
    for ranks in [3usize, 4, 5] {
        inspect(&format!("kuhn3 (r={ranks})"), kuhn3(ranks).expect("builds"));
    }
    for (n, b, r) in [(1usize, 2usize, 1usize), (1, 2, 2), (2, 3, 2)] {
        inspect(
            &format!("sheriff (N={n}, B={b}, r={r})"),
            sheriff(SheriffParams {
                max_items: n,
                max_bribe: b,
                rounds: r,
            })
            .expect("builds"),
        );
    }
}
