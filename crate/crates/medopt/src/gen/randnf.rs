//! Seeded random normal-form utility tensors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Utilities uniform in [0, 1], profile-major: entry
/// `profile * players + (i - 1)` is player `i`'s payoff. The counter-based
/// generator makes the tensor a pure function of the seed on every
/// platform.
pub fn random_normal_form(seed: u64, players: usize, actions: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let profiles = actions.pow(players as u32);
    (0..profiles * players).map(|_| rng.random::<f64>()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_tensor_is_reproducible() {
        let a = random_normal_form(7, 2, 3);
        let b = random_normal_form(7, 2, 3);
        assert_eq!(a, b);
        assert_eq!(a.len(), 18);
        let c = random_normal_form(8, 2, 3);
        assert_ne!(a, c);
    }
}
