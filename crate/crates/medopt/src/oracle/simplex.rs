//! Dense two-phase simplex with Bland's rule.
//!
//! Built for correctness on tiny, often degenerate programs: Bland's rule
//! guarantees termination, the tableau is dense, and the scalar type is
//! pluggable so adversarial cases can run in exact rational arithmetic.

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

/// Scalar field for the tableau.
pub trait Scalar:
    Clone
    + PartialOrd
    + std::fmt::Debug
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Div<Output = Self>
    + std::ops::Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_f64(v: f64) -> Self;
    fn to_f64(&self) -> f64;
    /// Entries with magnitude at most this are treated as zero.
    fn pivot_tol() -> Self;
    /// Ratios within this band count as tied in the leaving rule.
    fn ratio_band() -> Self;
    fn abs_val(&self) -> Self;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_f64(v: f64) -> Self {
        v
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn pivot_tol() -> Self {
        1e-9
    }
    fn ratio_band() -> Self {
        1e-12
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
}

pub type Rational = Ratio<BigInt>;

impl Scalar for Rational {
    fn zero() -> Self {
        <Rational as Zero>::zero()
    }
    fn one() -> Self {
        <Rational as One>::one()
    }
    fn from_f64(v: f64) -> Self {
        Ratio::from_float(v).expect("finite")
    }
    fn to_f64(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn pivot_tol() -> Self {
        <Rational as Zero>::zero()
    }
    fn ratio_band() -> Self {
        <Rational as Zero>::zero()
    }
    fn abs_val(&self) -> Self {
        Signed::abs(self)
    }
}

/// `maximize c . x` subject to `eq_lhs x = eq_rhs`, `le_lhs x <= le_rhs`,
/// `x >= 0`. Right-hand sides must be nonnegative.
pub struct DenseLp<S> {
    pub num_vars: usize,
    pub objective: Vec<S>,
    pub eq: Vec<(Vec<S>, S)>,
    pub le: Vec<(Vec<S>, S)>,
}

pub struct LpSolution<S> {
    pub value: S,
    pub x: Vec<S>,
    /// Dual values of the equality rows.
    pub eq_duals: Vec<S>,
    /// Dual values of the inequality rows (nonnegative).
    pub le_duals: Vec<S>,
}

#[derive(Debug, thiserror::Error)]
pub enum LpError {
    #[error("linear program is infeasible (phase-one residual {0})")]
    Infeasible(f64),
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("malformed program: {0}")]
    Malformed(String),
}

struct Tableau<S> {
    /// rows x cols, row-major; one extra rhs column at the end.
    a: Vec<S>,
    rows: usize,
    cols: usize,
    basis: Vec<usize>,
}

impl<S: Scalar> Tableau<S> {
    fn at(&self, r: usize, c: usize) -> &S {
        &self.a[r * (self.cols + 1) + c]
    }
    fn rhs(&self, r: usize) -> &S {
        &self.a[r * (self.cols + 1) + self.cols]
    }
    fn set(&mut self, r: usize, c: usize, v: S) {
        self.a[r * (self.cols + 1) + c] = v;
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.cols + 1;
        let p = self.a[row * w + col].clone();
        for c in 0..w {
            self.a[row * w + c] = self.a[row * w + c].clone() / p.clone();
        }
        for r in 0..self.rows {
            if r == row {
                continue;
            }
            let factor = self.a[r * w + col].clone();
            if factor.abs_val() <= S::pivot_tol() {
                continue;
            }
            for c in 0..w {
                let delta = factor.clone() * self.a[row * w + c].clone();
                self.a[r * w + c] = self.a[r * w + c].clone() - delta;
            }
        }
        self.basis[row] = col;
    }

    /// Reduced cost of column `c` under the cost vector, recomputed from
    /// the tableau (no incremental drift; these programs are tiny).
    fn reduced_cost(&self, cost: &dyn Fn(usize) -> S, c: usize) -> S {
        let mut r_c = cost(c);
        for r in 0..self.rows {
            let cb = cost(self.basis[r]);
            if cb.abs_val() > S::pivot_tol() {
                r_c = r_c - cb * self.at(r, c).clone();
            }
        }
        r_c
    }

    fn objective_value(&self, cost: &dyn Fn(usize) -> S) -> S {
        let mut v = S::zero();
        for r in 0..self.rows {
            let cb = cost(self.basis[r]);
            if cb.abs_val() > S::pivot_tol() {
                v = v + cb * self.rhs(r).clone();
            }
        }
        v
    }

    /// Bland's rule: enter the lowest-index improving column, leave by
    /// minimum ratio with the lowest basic variable breaking ties.
    /// `allowed` masks columns that may enter.
    fn simplex_loop(
        &mut self,
        cost: &dyn Fn(usize) -> S,
        allowed: &dyn Fn(usize) -> bool,
    ) -> Result<(), LpError> {
        let cap = 200 * (self.rows + self.cols + 10);
        let mut pivots = 0usize;
        loop {
            let mut enter = None;
            for c in 0..self.cols {
                if allowed(c)
                    && !self.basis.contains(&c)
                    && self.reduced_cost(cost, c) > S::pivot_tol()
                {
                    enter = Some(c);
                    break;
                }
            }
            let Some(col) = enter else {
                return Ok(());
            };
            // Leaving rule: minimum ratio; among (near-)ties prefer the
            // largest pivot element for numerical stability, then the
            // lowest basic variable for determinism. Exact arithmetic has
            // a zero tolerance, so ties resolve purely by magnitude-then-
            // index and termination is guarded by the iteration cap.
            let mut leave: Option<(usize, S, S)> = None;
            for r in 0..self.rows {
                let a = self.at(r, col).clone();
                if a > S::pivot_tol() {
                    let ratio = self.rhs(r).clone() / a.clone();
                    let better = match &leave {
                        None => true,
                        Some((lr, lratio, lpivot)) => {
                            let diff = ratio.clone() - lratio.clone();
                            if diff < -S::ratio_band() {
                                true
                            } else if diff.abs_val() <= S::ratio_band() {
                                a > *lpivot
                                    || (a == *lpivot && self.basis[r] < self.basis[*lr])
                            } else {
                                false
                            }
                        }
                    };
                    if better {
                        leave = Some((r, ratio, a));
                    }
                }
            }
            let Some((row, _, _)) = leave else {
                return Err(LpError::Unbounded);
            };
            self.pivot(row, col);
            pivots += 1;
            if pivots > cap {
                return Err(LpError::Malformed(format!(
                    "pivot cap {cap} exceeded; possible cycling"
                )));
            }
        }
    }
}

/// Solves the program, returning the optimum, a maximizer and dual values.
pub fn solve_lp<S: Scalar>(lp: &DenseLp<S>) -> Result<LpSolution<S>, LpError> {
    let n = lp.num_vars;
    if lp.objective.len() != n {
        return Err(LpError::Malformed("objective length".into()));
    }
    for (row, _) in lp.eq.iter().chain(&lp.le) {
        if row.len() != n {
            return Err(LpError::Malformed("row length".into()));
        }
    }
    let num_eq = lp.eq.len();
    let num_le = lp.le.len();
    let rows = num_eq + num_le;
    // Columns: structural, slacks (for <=), artificials (for =).
    let num_slack = num_le;
    let cols = n + num_slack + num_eq;
    let w = cols + 1;
    let mut t = Tableau {
        a: vec![S::zero(); rows * w],
        rows,
        cols,
        basis: vec![usize::MAX; rows],
    };

    for (r, (coeffs, rhs)) in lp.eq.iter().chain(lp.le.iter()).enumerate() {
        if *rhs < S::zero() {
            return Err(LpError::Malformed("negative right-hand side".into()));
        }
        for (c, v) in coeffs.iter().enumerate() {
            t.set(r, c, v.clone());
        }
        t.set(r, cols, rhs.clone());
    }
    for r in 0..num_eq {
        t.set(r, n + num_slack + r, S::one());
        t.basis[r] = n + num_slack + r;
    }
    for r in 0..num_le {
        t.set(num_eq + r, n + r, S::one());
        t.basis[num_eq + r] = n + r;
    }

    let barrier = n + num_slack;

    // Phase one: drive the artificials to zero by maximizing their negated
    // sum; they may not re-enter once left.
    if num_eq > 0 {
        let phase_one = move |c: usize| {
            if c >= barrier {
                -S::one()
            } else {
                S::zero()
            }
        };
        t.simplex_loop(&phase_one, &|c| c < barrier)?;
        let residual = -t.objective_value(&phase_one);
        if residual > S::pivot_tol() + S::pivot_tol() {
            return Err(LpError::Infeasible(residual.to_f64()));
        }
        // Pivot leftover basic artificials out where possible.
        for r in 0..rows {
            if t.basis[r] >= barrier {
                let mut col = None;
                for c in 0..barrier {
                    if t.at(r, c).abs_val() > S::pivot_tol() {
                        col = Some(c);
                        break;
                    }
                }
                if let Some(c) = col {
                    t.pivot(r, c);
                }
            }
        }
    }

    // Phase two: the real objective; artificials stay barred and priced at
    // zero (any still basic sit at zero value).
    let objective = lp.objective.clone();
    let phase_two = move |c: usize| {
        if c < n {
            objective[c].clone()
        } else {
            S::zero()
        }
    };
    t.simplex_loop(&phase_two, &|c| c < barrier)?;

    let mut x = vec![S::zero(); n];
    for r in 0..rows {
        if t.basis[r] < n {
            x[t.basis[r]] = t.rhs(r).clone();
        }
    }
    let value = t.objective_value(&phase_two);
    // Duals: the reduced cost of each row's identity column is -y_row.
    let mut eq_duals = Vec::with_capacity(num_eq);
    for r in 0..num_eq {
        eq_duals.push(-t.reduced_cost(&phase_two, n + num_slack + r));
    }
    let mut le_duals = Vec::with_capacity(num_le);
    for r in 0..num_le {
        le_duals.push(-t.reduced_cost(&phase_two, n + r));
    }
    Ok(LpSolution {
        value,
        x,
        eq_duals,
        le_duals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(
        objective: Vec<f64>,
        eq: Vec<(Vec<f64>, f64)>,
        le: Vec<(Vec<f64>, f64)>,
    ) -> DenseLp<f64> {
        DenseLp {
            num_vars: objective.len(),
            objective,
            eq,
            le,
        }
    }

    #[test]
    fn simple_box() {
        // max x + y, x <= 1, y <= 2.
        let sol = solve_lp(&lp(
            vec![1.0, 1.0],
            vec![],
            vec![(vec![1.0, 0.0], 1.0), (vec![0.0, 1.0], 2.0)],
        ))
        .unwrap();
        assert!((sol.value - 3.0).abs() < 1e-9);
        assert!((sol.x[0] - 1.0).abs() < 1e-9);
        assert!((sol.x[1] - 2.0).abs() < 1e-9);
        // Duals are 1 for both active rows.
        assert!((sol.le_duals[0] - 1.0).abs() < 1e-9);
        assert!((sol.le_duals[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn simplex_distribution() {
        // max 2a + b on the probability simplex.
        let sol = solve_lp(&lp(
            vec![2.0, 1.0, 0.0],
            vec![(vec![1.0, 1.0, 1.0], 1.0)],
            vec![],
        ))
        .unwrap();
        assert!((sol.value - 2.0).abs() < 1e-9);
        assert!((sol.x[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_detected() {
        // x + y = 1 and x + y <= 0.2 cannot both hold... encoded as
        // equalities: x + y = 1, x + y = 0 (x, y >= 0).
        let r = solve_lp(&lp(
            vec![1.0, 0.0],
            vec![(vec![1.0, 1.0], 1.0), (vec![1.0, 1.0], 0.0)],
            vec![],
        ));
        assert!(matches!(r, Err(LpError::Infeasible(_))));
    }

    #[test]
    fn unbounded_detected() {
        let r = solve_lp(&lp(vec![1.0], vec![], vec![(vec![-1.0], 1.0)]));
        assert!(matches!(r, Err(LpError::Unbounded)));
    }

    #[test]
    fn degenerate_cycling_guard() {
        // A classic degenerate instance; Bland's rule must terminate.
        let sol = solve_lp(&lp(
            vec![0.75, -150.0, 0.02, -6.0],
            vec![],
            vec![
                (vec![0.25, -60.0, -0.04, 9.0], 0.0),
                (vec![0.5, -90.0, -0.02, 3.0], 0.0),
                (vec![0.0, 0.0, 1.0, 0.0], 1.0),
            ],
        ))
        .unwrap();
        assert!((sol.value - 0.05).abs() < 1e-9);
    }

    #[test]
    fn exact_rational_mode() {
        let to_r = |v: &[f64]| v.iter().map(|&x| Rational::from_f64(x)).collect::<Vec<_>>();
        let sol = solve_lp(&DenseLp {
            num_vars: 3,
            objective: to_r(&[2.0, 1.0, 0.0]),
            eq: vec![(to_r(&[1.0, 1.0, 1.0]), Rational::from_f64(1.0))],
            le: vec![(to_r(&[1.0, 0.0, 0.0]), Rational::from_f64(0.5))],
        })
        .unwrap();
        assert_eq!(sol.value, Rational::from_f64(1.5));
    }
}
