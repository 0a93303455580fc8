//! Revenue-optimal sequential auction design via the direct Lagrangian.
//!
//! Two rounds, two bidders with unit budgets, valuations uniform on
//! {0, 1/4, 1/2, 3/4, 1}: the mediator commits to an allocation-and-payment
//! rule; the solve finds the revenue-maximizing incentive-compatible one.
//!
//! ```bash
//! cargo run --release --example solve_auction [iterations]
//! ```
//!
//! The full run (10000 iterations, the experiment's setting) takes minutes;
//! the default here is a shorter demonstration.

use std::sync::Arc;

use medopt::encode::{encode_sequential_auction, AuctionSpec};
use medopt::regret::{Algo, LambdaSchedule};
use medopt::solve::{free_item_rate, solve_direct, DirectConfig};

fn main() {
    let iterations: u64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(2000);

    let m = Arc::new(
        encode_sequential_auction(AuctionSpec::uniform_grid(2, 5, 1.0, 2))
            .expect("valid auction"),
    );
    println!(
        "auction reduction: {} mediator sequences, solving {iterations} iterations at lambda 25",
        m.mediator_treeplex().num_sequences()
    );

    let report = solve_direct(
        &m,
        &DirectConfig {
            schedule: LambdaSchedule::Fixed(25.0),
            algo: Algo::RmPlus,
            iterations,
            epsilon: None,
            alternating: true,
            gap_every: Some((iterations / 25).max(1)),
        },
    )
    .expect("solve");

    for p in report.trace.iter().step_by(5) {
        println!(
            "  iter {:>6}: revenue {:.4}, deviation gain {:.2e}, saddle gap {:.2e}",
            p.iter,
            p.objective.unwrap(),
            p.max_dev_gain.unwrap(),
            p.saddle_gap
        );
    }
    let free = free_item_rate(&m, &report.strategy).expect("auction instance");
    println!(
        "optimal mechanism: revenue {:.4}, equilibrium gap {:.2e}, saddle gap {:.2e}",
        report.objective, report.equilibrium_gap, report.saddle_gap
    );
    println!(
        "gives an item away for free {:.1}% of the time; bounds: optimality {:.2e}, gap {:.2e}",
        100.0 * free,
        report.optimality_bound.unwrap_or(f64::NAN),
        report.gap_bound.unwrap_or(f64::NAN)
    );
}
