//! Horizon-based multiplier schedules: with `lambda = T^(1/4)` the
//! equilibrium gap of the averaged mediator strategy shrinks as the horizon
//! grows, and the `T^(1/2)` schedule paired with a predictive learner
//! shrinks it faster.
//!
//! ```bash
//! cargo run --release --example lambda_schedules
//! ```

use std::sync::Arc;

use medopt::encode::{encode_nf_correlated, CorrelationConcept, NormalFormSpec, ObjectiveSpec};
use medopt::gen::random_normal_form;
use medopt::regret::{Algo, LambdaSchedule};
use medopt::solve::{solve_direct, DirectConfig};

fn main() {
    let m = Arc::new(
        encode_nf_correlated(NormalFormSpec {
            actions: vec![2, 2],
            utilities: random_normal_form(42, 2, 2),
            concept: CorrelationConcept::Ce,
            objective: ObjectiveSpec::Welfare,
        })
        .expect("valid spec"),
    );

    for (label, schedule, algo) in [
        ("lambda = T^(1/4), regret matching+", LambdaSchedule::HorizonQuarter, Algo::RmPlus),
        ("lambda = T^(1/2), predictive", LambdaSchedule::HorizonHalf, Algo::PcfrPlus),
    ] {
        println!("{label}");
        for t in [64u64, 256, 1024, 4096] {
            let report = solve_direct(
                &m,
                &DirectConfig {
                    schedule,
                    algo,
                    iterations: t,
                    epsilon: None,
                    alternating: false,
                    gap_every: None,
                },
            )
            .expect("solve");
            println!(
                "  T = {t:>5} (lambda {:>6.2}): objective {:.5}, equilibrium gap {:.3e}",
                schedule.resolve(t),
                report.objective,
                report.equilibrium_gap
            );
        }
    }
}
