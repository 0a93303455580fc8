// Standalone traced simplex replica on the failing instance.
use medopt::encode::*;
use medopt::game::EMPTY_SEQ;
use medopt::gen::random_normal_form;
use medopt::oracle;
use std::sync::Arc;

struct T { a: Vec<f64>, rows: usize, cols: usize, basis: Vec<usize> }
impl T {
    fn at(&self, r: usize, c: usize) -> f64 { self.a[r * (self.cols + 1) + c] }
    fn rhs(&self, r: usize) -> f64 { self.a[r * (self.cols + 1) + self.cols] }
    fn set(&mut self, r: usize, c: usize, v: f64) { self.a[r * (self.cols + 1) + c] = v; }
    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.cols + 1;
        let p = self.a[row * w + col];
        for c in 0..w { self.a[row * w + c] /= p; }
        for r in 0..self.rows {
            if r == row { continue; }
            let f = self.a[r * w + col];
            if f.abs() <= 1e-9 { continue; }
            for c in 0..w { self.a[r * w + c] -= f * self.a[row * w + c]; }
        }
        self.basis[row] = col;
    }
    fn red(&self, cost: &dyn Fn(usize) -> f64, c: usize) -> f64 {
        let mut v = cost(c);
        for r in 0..self.rows {
            let cb = cost(self.basis[r]);
            if cb != 0.0 { v -= cb * self.at(r, c); }
        }
        v
    }
}

fn main() {
    let m = Arc::new(encode_nf_correlated(NormalFormSpec {
        actions: vec![3, 3],
        utilities: random_normal_form(3, 2, 3),
        concept: CorrelationConcept::Ce,
        objective: ObjectiveSpec::Welfare,
    }).unwrap());
    let tp = m.mediator_treeplex();
    let n = tp.num_sequences();
    let mut eq: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut root = vec![0.0; n];
    root[EMPTY_SEQ] = 1.0;
    eq.push((root, 1.0));
    for inf in tp.infosets() {
        let mut row = vec![0.0; n];
        for s in inf.seq_start..inf.seq_start + inf.num_actions { row[s] = 1.0; }
        row[inf.parent_seq] -= 1.0;
        eq.push((row, 0.0));
    }
    let mut le: Vec<(Vec<f64>, f64)> = Vec::new();
    for i in 1..=2 {
        let devs = oracle::enumerate_pure_deviations(&m, i, 1_000_000).unwrap();
        let w = m.wired_deviator(i);
        let d = m.direct_strategy(i);
        for x in &devs {
            let mut row = vec![0.0; n];
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
    let num_eq = eq.len();
    let num_le = le.len();
    let rows = num_eq + num_le;
    let cols = n + num_le + num_eq;
    let mut t = T { a: vec![0.0; rows * (cols + 1)], rows, cols, basis: vec![usize::MAX; rows] };
    for (r, (coeffs, rhs)) in eq.iter().chain(le.iter()).enumerate() {
        for (c, v) in coeffs.iter().enumerate() { t.set(r, c, *v); }
        t.set(r, cols, *rhs);
    }
    for r in 0..num_eq { t.set(r, n + num_le + r, 1.0); t.basis[r] = n + num_le + r; }
    for r in 0..num_le { t.set(num_eq + r, n + r, 1.0); t.basis[num_eq + r] = n + r; }
    let barrier = n + num_le;
    let cost = move |c: usize| if c >= barrier { -1.0 } else { 0.0 };

    for step in 0..200 {
        let mut enter = None;
        for c in 0..cols {
            if c < barrier && !t.basis.contains(&c) && t.red(&cost, c) > 1e-9 { enter = Some(c); break; }
        }
        let Some(col) = enter else {
            let resid: f64 = (0..rows).filter(|&r| t.basis[r] >= barrier).map(|r| t.rhs(r)).sum();
            println!("stall at step {step}, residual {resid}");
            for r in 0..rows {
                if t.basis[r] >= barrier && t.rhs(r).abs() > 1e-12 {
                    println!("  artificial of row {r} basic at {}", t.rhs(r));
                    let maxcoef = (0..barrier).map(|c| t.at(r, c).abs()).fold(0.0f64, f64::max);
                    println!("  max |coef| in that row over real cols: {maxcoef}");
                }
            }
            break;
        };
        let mut leave: Option<(usize, f64)> = None;
        for r in 0..rows {
            let a = t.at(r, col);
            if a > 1e-9 {
                let ratio = t.rhs(r) / a;
                let better = match leave { None => true, Some((lr, lratio)) =>
                    ratio < lratio - 1e-15 || ((ratio - lratio).abs() <= 1e-15 && t.basis[r] < t.basis[lr]) };
                if better { leave = Some((r, ratio)); }
            }
        }
        let (row, ratio) = leave.unwrap();
        if step < 30 || t.basis[row] >= barrier {
            println!("step {step}: col {col} enters (red {:.4}), row {row} leaves (basis {}, ratio {:.4})",
                t.red(&cost, col), t.basis[row], ratio);
        }
        t.pivot(row, col);
    }
}
