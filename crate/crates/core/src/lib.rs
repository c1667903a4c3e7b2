//! The two-player Zeckendorf game.
//!
//! Start from `n` copies of `F_1 = 1` and rewrite pairs of summands with the
//! Fibonacci recurrence (`F_1 = 1, F_2 = 2, F_{i+1} = F_i + F_{i-1}`) until
//! the Zeckendorf decomposition of `n` is reached. Whoever moves last wins.
//!
//! - [`state`]: positions, moves, legality, the monovariant
//! - [`strategy`]: greedy, conjectured-longest and uniform random play
//! - [`solver`]: exhaustive win/loss, extreme lengths, parities, bounds
//! - [`export`]: DOT/JSON game-graph export
//! - [`sim`]: seeded Monte Carlo length statistics

pub mod error;
pub mod export;
pub mod fib;
pub mod sim;
pub mod solver;
pub mod state;
pub mod strategy;
pub mod zeckendorf;

pub use error::{GameError, Result};
pub use export::{TreeDocument, TreeFormat};
pub use fib::{fib_table, FibTable};
pub use sim::{
    average_scaling, gaussian_fit, simulate, simulate_with, Execution, GaussianFit, ScalingReport,
    SimStats,
};
pub use solver::{
    bounds_report, extreme_lengths, solve, winning_line, BoundsReport, GameGraph, Parity,
    SolveReport, Solver, SolverConfig,
};
pub use state::{
    apply_move, canonical_key, initial_state, is_terminal, legal_moves, monovariant, GameState,
    Move, StateKey,
};
pub use strategy::{
    conjectured_longest_move, game_rng, greedy_largest_move, play_game, random_move, GameRecord,
    Policy, Winner,
};
pub use zeckendorf::{zeckendorf, Decomposition};
