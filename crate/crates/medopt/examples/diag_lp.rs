use medopt::encode::*;
use medopt::gen::random_normal_form;
use medopt::oracle;
use std::sync::Arc;

fn main() {
    let m = Arc::new(
        encode_nf_correlated(NormalFormSpec {
            actions: vec![3, 3],
            utilities: random_normal_form(std::env::args().nth(1).unwrap().parse().unwrap(), 2, 3),
            concept: CorrelationConcept::Ce,
            objective: ObjectiveSpec::Welfare,
        })
        .unwrap(),
    );
    match oracle::solve_lp(&m, &oracle::OracleConfig::default()) {
        Ok(sol) => println!("value {}", sol.value),
        Err(e) => println!("error: {e}"),
    }
    // shrink: pure simplex repro of the treeplex structure
    let n = 4usize;
    let lp = oracle::DenseLp {
        num_vars: n,
        objective: vec![1.0, 0.5, 0.25, 0.1],
        eq: vec![
            (vec![1.0, 0.0, 0.0, 0.0], 1.0),
            (vec![-1.0, 1.0, 1.0, 1.0], 0.0),
        ],
        le: vec![(vec![0.0, 1.0, -1.0, 0.0], 0.0)],
    };
    match oracle::solve_dense_lp(&lp) {
        Ok(sol) => println!("small value {} x {:?}", sol.value, sol.x),
        Err(e) => println!("small error: {e}"),
    }
}
