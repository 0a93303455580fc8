//! Solvers for optimal equilibria and optimal mechanisms in
//! mediator-augmented extensive-form games.
//!
//! The constrained program "maximize the mediator's objective subject to no
//! player gaining by deviating from its direct strategy" is reduced to
//! two-player zero-sum extensive-form games through two Lagrangian
//! relaxations:
//!
//! - a direct relaxation with a fixed (or horizon-scheduled) multiplier,
//!   solved by one self-play run ([`solve::solve_direct`]);
//! - a thresholded relaxation with simplex-mixed multipliers and bounded
//!   payoffs, driven by a binary search over the threshold
//!   ([`solve::solve_binary_search`]).
//!
//! Both run counterfactual-regret-style learning dynamics from [`regret`]
//! over sequence-form strategy polytopes from [`game`]. Ground truth for
//! small instances comes from an explicit linear program in [`oracle`].
//!
//! See the `examples/` directory for one runnable example per capability,
//! and the `medopt` binary for the command-line interface.

pub mod encode;
pub mod game;
pub mod gen;
pub mod oracle;
pub mod regret;
pub mod solve;

pub mod cli;

pub use encode::{MediatorAugmentedGame, ZeroSumGame};
pub use game::{ExtensiveFormGame, SequenceFormStrategy, Treeplex};
pub use solve::SolveReport;
