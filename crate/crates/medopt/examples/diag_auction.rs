use std::sync::Arc;
use std::time::Instant;
use medopt::encode::*;
use medopt::regret::{Algo, LambdaSchedule};
use medopt::solve::{free_item_rate, solve_direct, DirectConfig};

fn main() {
    let t: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(500);
    let alternating = std::env::var("ALT").is_ok();
    let algo = match std::env::var("ALGO").as_deref() {
        Ok("pcfr") => Algo::PcfrPlus,
        Ok("dcfr") => Algo::Dcfr,
        _ => Algo::RmPlus,
    };
    let start = Instant::now();
    let m = Arc::new(encode_sequential_auction(AuctionSpec::uniform_grid(2, 5, 1.0, 2)).unwrap());
    println!("encode: {:?}", start.elapsed());
    let t0 = Instant::now();
    let report = solve_direct(
        &m,
        &DirectConfig {
            schedule: LambdaSchedule::Fixed(25.0),
            algo,
            iterations: t,
            epsilon: None,
            alternating,
            gap_every: Some((t / 20).max(1)),
        },
    )
    .unwrap();
    println!("solve {t} iters: {:?}", t0.elapsed());
    println!(
        "revenue {:.6}  eq_gap {:.3e}  saddle_gap {:.3e}  last_gap {:.3e}",
        report.objective, report.equilibrium_gap, report.saddle_gap, report.last_iterate_gap
    );
    println!("gains {:?}", report.per_player_gains);
    println!("free-item rate {:.4}", free_item_rate(&m, &report.strategy).unwrap());
    println!("bounds: optimality {:?} gap {:?}", report.optimality_bound, report.gap_bound);
    for p in report.trace.iter().step_by(4) {
        println!(
            "  iter {:>6}  obj {:.4}  dev {:.2e}  saddle {:.2e}",
            p.iter, p.objective.unwrap(), p.max_dev_gain.unwrap(), p.saddle_gap
        );
    }
}
