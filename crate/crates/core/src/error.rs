use thiserror::Error;

use crate::state::Move;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("n must be a positive integer")]
    ZeroN,

    #[error("illegal move {mv} at {state}")]
    IllegalMove { mv: Move, state: String },

    #[error("no legal move: {0} is terminal")]
    Terminal(String),

    #[error("the game on n={0} has no moves")]
    NoMoves(u32),

    #[error("n={n} exceeds the configured {what} limit of {limit}")]
    Capacity {
        what: &'static str,
        n: u32,
        limit: u32,
    },

    #[error("invalid game state: {0}")]
    InvalidState(String),

    #[error("trials must be positive")]
    ZeroTrials,

    #[error("degenerate fit: sample variance is zero or fewer than two trials")]
    DegenerateFit,

    #[error("regression needs at least two points, got {0}")]
    TooFewPoints(usize),

    #[error("degenerate regression: every n is equal")]
    DegenerateRegression,

    #[error("malformed stats file: {0}")]
    Parse(String),
}

pub type Result<T, E = GameError> = std::result::Result<T, E>;
