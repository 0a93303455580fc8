//! Regret-matching self-play on plain zero-sum games: matching pennies and
//! rock-paper-scissors, with saddle-gap traces from exact best responses.
//!
//! ```bash
//! cargo run --release --example selfplay_zero_sum
//! ```

use std::sync::Arc;

use medopt::encode::ZeroSumGame;
use medopt::gen::{matching_pennies, rock_paper_scissors};
use medopt::regret::{selfplay, Algo, SelfPlayConfig};

fn run(name: &str, game: medopt::ExtensiveFormGame, algo: Algo, iterations: u64) {
    let zs = Arc::new(ZeroSumGame::from_zero_sum_game(Arc::new(game)).expect("zero-sum"));
    let out = selfplay(&zs, &SelfPlayConfig::new(algo, iterations)).expect("self-play runs");
    println!("{name} ({algo:?}, T = {iterations})");
    for point in out.trace.iter().step_by(out.trace.len().div_ceil(6).max(1)) {
        println!(
            "  iter {:>6}: saddle gap {:.3e}, last-iterate gap {:.3e}",
            point.iter, point.saddle_gap, point.last_iter_gap
        );
    }
    println!(
        "  final average strategy of the maximizer: {:?}",
        &out.average_mediator.values[1..]
    );
}

fn main() {
    run("matching pennies", matching_pennies(), Algo::RmPlus, 1000);
    run("rock-paper-scissors", rock_paper_scissors(), Algo::RmPlus, 2000);
    run("rock-paper-scissors", rock_paper_scissors(), Algo::PcfrPlus, 2000);
}
