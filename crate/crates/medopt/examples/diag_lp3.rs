// Rebuild the oracle LP for the failing seed and probe phase one by hand.
use medopt::encode::*;
use medopt::game::EMPTY_SEQ;
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
    let tp = m.mediator_treeplex();
    println!("sequences {} infosets {}", tp.num_sequences(), tp.num_infosets());

    // Rebuild rows exactly as oracle::solve_lp does.
    let n_seq = tp.num_sequences();
    let wired0 = m.wired_direct();
    let mut objective = vec![0.0; n_seq];
    for z in 0..wired0.game.num_terminals() {
        let s = wired0.eval.terminal_seq(z, 0);
        objective[s] += wired0.game.chance_reach(z) * wired0.game.utility(z)[0];
    }
    let mut eq: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut root = vec![0.0; n_seq];
    root[EMPTY_SEQ] = 1.0;
    eq.push((root, 1.0));
    for inf in tp.infosets() {
        let mut row = vec![0.0; n_seq];
        for s in inf.seq_start..inf.seq_start + inf.num_actions {
            row[s] = 1.0;
        }
        row[inf.parent_seq] -= 1.0;
        eq.push((row, 0.0));
    }
    let mut le: Vec<(Vec<f64>, f64)> = Vec::new();
    for i in 1..=2 {
        let devs = oracle::enumerate_pure_deviations(&m, i, 1_000_000).unwrap();
        let w = m.wired_deviator(i);
        let d = m.direct_strategy(i);
        for x in &devs {
            let mut row = vec![0.0; n_seq];
            for z in 0..w.game.num_terminals() {
                let si = w.eval.terminal_seq(z, i);
                let diff = x.values[si] - d.values[si];
                if diff != 0.0 {
                    let s0 = w.eval.terminal_seq(z, 0);
                    row[s0] += w.game.chance_reach(z) * diff * w.game.utility(z)[i];
                }
            }
            le.push((row, 0.0));
        }
    }
    println!("eq rows {} le rows {}", eq.len(), le.len());
    // Feasibility sanity: uniform mediator must satisfy everything.
    let uniform = tp.uniform();
    for (k, (row, b)) in eq.iter().enumerate() {
        let lhs: f64 = row.iter().zip(&uniform).map(|(a, x)| a * x).sum();
        if (lhs - b).abs() > 1e-9 {
            println!("eq {k} violated: {lhs} vs {b}");
        }
    }
    let mut viol = 0;
    for (row, b) in &le {
        let lhs: f64 = row.iter().zip(&uniform).map(|(a, x)| a * x).sum();
        if lhs > *b + 1e-9 {
            viol += 1;
        }
    }
    println!("uniform violates {viol} le rows (expected: some, that's fine)");
    let lp = oracle::DenseLp { num_vars: n_seq, objective, eq, le };
    match oracle::solve_dense_lp(&lp) {
        Ok(sol) => println!("value {}", sol.value),
        Err(e) => println!("error: {e}"),
    }
}
