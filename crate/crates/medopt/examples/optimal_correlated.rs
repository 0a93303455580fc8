//! Optimal correlated equilibria in a normal-form game, three ways: the
//! exact LP oracle, the direct Lagrangian solve, and the threshold binary
//! search. All three agree on the optimal objective.
//!
//! ```bash
//! cargo run --release --example optimal_correlated [seed]
//! ```

use std::sync::Arc;

use medopt::encode::{encode_nf_correlated, CorrelationConcept, NormalFormSpec, ObjectiveSpec};
use medopt::gen::random_normal_form;
use medopt::oracle::{self, OracleConfig};
use medopt::regret::Algo;
use medopt::solve::{solve_binary_search, solve_direct, BinarySearchConfig, DirectConfig};

fn main() {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(42);
    let m = Arc::new(
        encode_nf_correlated(NormalFormSpec {
            actions: vec![3, 3],
            utilities: random_normal_form(seed, 2, 3),
            concept: CorrelationConcept::Ce,
            objective: ObjectiveSpec::Welfare,
        })
        .expect("valid spec"),
    );

    let sol = oracle::solve_lp(&m, &OracleConfig::default()).expect("oracle solves");
    println!(
        "oracle: welfare-optimal correlated equilibrium value {:.6} ({} deviation constraints, \
         dual bound {:.3})",
        sol.value, sol.num_constraints, sol.dual_bound
    );

    // Direct Lagrangian at a multiplier above the certified dual bound.
    let lambda = 2.0 * sol.dual_bound.max(0.5) + 1.0;
    let direct = solve_direct(&m, &DirectConfig::new(lambda, Algo::PcfrPlus, 50_000))
        .expect("direct solve");
    println!(
        "direct lagrangian (lambda = {lambda:.2}): objective {:.6}, equilibrium gap {:.2e}",
        direct.objective, direct.equilibrium_gap
    );

    let bin = solve_binary_search(&m, &BinarySearchConfig::new(1e-3, Algo::RmPlus, 200_000))
        .expect("binary search");
    println!(
        "binary search (eps = 1e-3): objective {:.6}, equilibrium gap {:.2e}, {} thresholds",
        bin.objective,
        bin.equilibrium_gap,
        match &bin.method {
            medopt::solve::MethodInfo::BinarySearch { bracket, .. } => bracket.len(),
            _ => 0,
        }
    );

    assert!((direct.objective - sol.value).abs() < 5e-3);
    assert!(bin.objective >= sol.value - 2e-3 && bin.objective <= sol.value + 1e-6);
    println!("all three routes agree within tolerance");
}
