//! Scalar learner over a bounded interval `[0, K]`.

/// Gradient update rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepRule {
    /// `v <- clip(v + dir * eta * g)`
    Plain,
    /// Optimistic: `v <- clip(v + dir * eta * (2 g - g_prev))`
    Optimistic,
}

/// Projected (optionally optimistic) gradient ascent or descent on an
/// interval. A maximizer moves with the gradient, a minimizer against it;
/// the iterate is clipped back into `[0, K]` after every step.
#[derive(Debug, Clone)]
pub struct IntervalLearner {
    value: f64,
    k: f64,
    eta: f64,
    rule: StepRule,
    /// +1.0 for a maximizer, -1.0 for a minimizer.
    direction: f64,
    prev_gradient: f64,
}

impl IntervalLearner {
    /// Starts at the midpoint `K / 2`, which keeps a multiplier learner from
    /// being stuck at zero on its first plays.
    pub fn maximizer(k: f64, eta: f64, rule: StepRule) -> Self {
        Self::with_value(k / 2.0, k, eta, rule, 1.0)
    }

    pub fn minimizer(k: f64, eta: f64, rule: StepRule) -> Self {
        Self::with_value(k / 2.0, k, eta, rule, -1.0)
    }

    pub fn with_value(value: f64, k: f64, eta: f64, rule: StepRule, direction: f64) -> Self {
        assert!(k > 0.0 && value >= 0.0 && value <= k);
        IntervalLearner {
            value,
            k,
            eta,
            rule,
            direction,
            prev_gradient: 0.0,
        }
    }

    /// Default step size: `K / sqrt(T)` when the horizon is known, else
    /// `0.1 * K`.
    pub fn default_eta(k: f64, horizon: Option<u64>) -> f64 {
        match horizon {
            Some(t) if t > 0 => k / (t as f64).sqrt(),
            _ => 0.1 * k,
        }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn bound(&self) -> f64 {
        self.k
    }

    /// One gradient step; the gradient is of the learner's utility in its
    /// current value.
    pub fn step(&mut self, gradient: f64) {
        debug_assert!(gradient.is_finite());
        let effective = match self.rule {
            StepRule::Plain => gradient,
            StepRule::Optimistic => 2.0 * gradient - self.prev_gradient,
        };
        self.prev_gradient = gradient;
        self.value = (self.value + self.direction * self.eta * effective).clamp(0.0, self.k);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn optimistic_step_formula() {
        // At value 5 with previous gradient 2, a maximizer stepping on
        // gradient 2 moves to 5 + eta * (2*2 - 2) = 7.
        let mut l = IntervalLearner::with_value(1.0, 10.0, 1.0, StepRule::Optimistic, 1.0);
        l.step(2.0); // 1 + (4 - 0) = 5, previous gradient now 2
        assert_eq!(l.value(), 5.0);
        l.step(2.0);
        assert_eq!(l.value(), 7.0);
    }

    #[test]
    fn optimistic_steps_from_cold_start() {
        let mut l = IntervalLearner::with_value(5.0, 10.0, 1.0, StepRule::Optimistic, 1.0);
        // First step has no previous gradient: 5 + (2*2 - 0) = 9.
        l.step(2.0);
        assert_eq!(l.value(), 9.0);
        // Then 9 + (2*2 - 2) = 11, clipped to 10.
        l.step(2.0);
        assert_eq!(l.value(), 10.0);
    }

    #[test]
    fn clipping_holds_value_at_zero() {
        // Negative gradients forever for a maximizer starting at 0.
        let mut l = IntervalLearner::with_value(0.0, 1.0, 0.5, StepRule::Optimistic, 1.0);
        for _ in 0..50 {
            l.step(-1.0);
            assert_eq!(l.value(), 0.0);
        }
    }

    #[test]
    fn constant_gradient_reaches_upper_bound() {
        // K = 1, eta = 0.1, gradient +1 from the midpoint: at the bound
        // within 12 steps and stays.
        let mut l = IntervalLearner::maximizer(1.0, 0.1, StepRule::Plain);
        let mut reached = None;
        for step in 1..=20 {
            l.step(1.0);
            if l.value() >= 1.0 && reached.is_none() {
                reached = Some(step);
            }
        }
        assert!(reached.unwrap() <= 12);
        assert_eq!(l.value(), 1.0);
    }
}
