//! Classic auction baselines on the two-round budgeted auction: truthful
//! revenue and exploitability of first-price, second-price and reserve
//! variants, plus how often each hands the item out for free.
//!
//! ```bash
//! cargo run --release --example eval_mechanisms
//! ```

use std::sync::Arc;

use medopt::encode::{encode_sequential_auction, fixed_mechanism, AuctionSpec, MechanismKind};
use medopt::solve::{certify, free_item_rate};

fn main() {
    let m = Arc::new(
        encode_sequential_auction(AuctionSpec::uniform_grid(2, 5, 1.0, 2))
            .expect("valid auction"),
    );
    println!("{:<22} {:>10} {:>16} {:>12}", "mechanism", "revenue", "exploitability", "free items");
    for (name, kind) in [
        ("first price", MechanismKind::FirstPrice),
        ("second price", MechanismKind::SecondPrice),
        ("second price, r=1/4", MechanismKind::SecondPriceReserve(0.25)),
        ("second price, r=1/2", MechanismKind::SecondPriceReserve(0.5)),
        ("second price, r=3/4", MechanismKind::SecondPriceReserve(0.75)),
    ] {
        let mu = fixed_mechanism(kind, &m).expect("rule fits the grid");
        let cert = certify(&m, &mu).expect("certification");
        let expl: f64 = cert.per_player_gains.iter().sum();
        let free = free_item_rate(&m, &mu).expect("auction instance");
        println!(
            "{name:<22} {:>10.4} {:>16.4} {:>11.1}%",
            cert.objective,
            expl,
            100.0 * free
        );
    }
    println!();
    println!("exploitability sums each bidder's best-response gain against the rule");
}
