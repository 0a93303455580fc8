// Dump the failing LP rows for seed 3 and re-solve in exact arithmetic.
use medopt::encode::*;
use medopt::gen::random_normal_form;
use medopt::oracle;
use std::sync::Arc;

fn main() {
    let m = Arc::new(
        encode_nf_correlated(NormalFormSpec {
            actions: vec![3, 3],
            utilities: random_normal_form(3, 2, 3),
            concept: CorrelationConcept::Ce,
            objective: ObjectiveSpec::Welfare,
        })
        .unwrap(),
    );
    let cfg = oracle::OracleConfig { exact: true, ..Default::default() };
    match oracle::solve_lp(&m, &cfg) {
        Ok(sol) => println!("exact value {}", sol.value),
        Err(e) => println!("exact error: {e}"),
    }
}
