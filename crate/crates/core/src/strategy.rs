//! Move-selection policies and complete playouts.

use std::fmt;
use std::io;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GameError, Result};
use crate::state::{GameState, Move};

/// Outcome of a finished game: whoever moved last wins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Winner {
    Player1,
    Player2,
    /// `n = 1`: the start is already terminal.
    NoMoves,
}

impl Winner {
    /// Player 1 makes the odd-numbered moves.
    pub fn from_length(length: usize) -> Winner {
        match length {
            0 => Winner::NoMoves,
            l if l % 2 == 1 => Winner::Player1,
            _ => Winner::Player2,
        }
    }
}

impl fmt::Display for Winner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Winner::Player1 => "player1",
            Winner::Player2 => "player2",
            Winner::NoMoves => "no_moves",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Policy {
    /// Always act on the largest summand that has a move.
    GreedyLargest,
    /// Merge ones, then split smallest first, then combine smallest first.
    ConjecturedLongest,
    /// Uniform over the legal-move list.
    UniformRandom { seed: u64 },
}

impl Policy {
    /// Parses the short CLI/API names; `seed` only matters for `random`.
    pub fn from_name(name: &str, seed: u64) -> Result<Policy, String> {
        match name {
            "greedy" | "greedy_largest" => Ok(Policy::GreedyLargest),
            "longest" | "conjectured_longest" => Ok(Policy::ConjecturedLongest),
            "random" | "uniform_random" => Ok(Policy::UniformRandom { seed }),
            other => Err(format!(
                "unknown policy `{other}` (expected greedy, longest or random)"
            )),
        }
    }

    /// Picks a move at `state`. `rng` is only consulted by the random policy.
    pub fn choose<R: Rng + ?Sized>(&self, state: &GameState, rng: &mut R) -> Result<Move> {
        match self {
            Policy::GreedyLargest => greedy_largest_move(state),
            Policy::ConjecturedLongest => conjectured_longest_move(state),
            Policy::UniformRandom { .. } => random_move(state, rng),
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Policy::GreedyLargest => f.write_str("greedy_largest"),
            Policy::ConjecturedLongest => f.write_str("conjectured_longest"),
            Policy::UniformRandom { seed } => write!(f, "uniform_random:{seed}"),
        }
    }
}

impl FromStr for Policy {
    type Err = String;

    /// Accepts the `Display` form, e.g. `uniform_random:42`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once(':') {
            Some((name, seed)) => {
                let seed = seed
                    .parse()
                    .map_err(|e| format!("bad seed `{seed}`: {e}"))?;
                Policy::from_name(name, seed)
            }
            None => Policy::from_name(s, 0),
        }
    }
}

/// The random stream for game number `game` of a run seeded with `seed`.
///
/// ChaCha8 keyed by `seed` (expanded through `seed_from_u64`) with the game
/// number as the stream id, so every game has its own independent stream
/// and results do not depend on scheduling.
pub fn game_rng(seed: u64, game: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(game);
    rng
}

pub fn greedy_largest_move(state: &GameState) -> Result<Move> {
    let Some(top) = state.top_index() else {
        return Err(GameError::Terminal(state.to_string()));
    };
    for i in (1..=top).rev().filter(|&i| state.count(i) > 0) {
        let idx = i as u32;
        let same = match i {
            1 => Move::MergeOnes,
            2 => Move::SplitTwos,
            _ => Move::Split(idx),
        };
        let below = (i >= 2).then(|| Move::Combine(idx - 1));
        let candidates = below.into_iter().chain([Move::Combine(idx), same]);
        if let Some(mv) = candidates.into_iter().find(|&m| state.is_legal(m)) {
            return Ok(mv);
        }
    }
    Err(GameError::Terminal(state.to_string()))
}

/// First move in the enumeration order.
pub fn conjectured_longest_move(state: &GameState) -> Result<Move> {
    state
        .legal_moves()
        .first()
        .copied()
        .ok_or_else(|| GameError::Terminal(state.to_string()))
}

/// One bounded-uniform draw over `legal_moves`, even when it has one entry.
pub fn random_move<R: Rng + ?Sized>(state: &GameState, rng: &mut R) -> Result<Move> {
    let moves = state.legal_moves();
    if moves.is_empty() {
        return Err(GameError::Terminal(state.to_string()));
    }
    let k = rng.random_range(0..moves.len() as u32) as usize;
    Ok(moves[k])
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameRecord {
    pub n: u32,
    pub policy: Policy,
    pub moves: Vec<Move>,
    pub length: usize,
    pub winner: Winner,
}

impl GameRecord {
    /// Replays the moves from `{1^n}`, failing on the first illegal one,
    /// and returns the final position.
    pub fn replay(&self) -> Result<GameState> {
        let mut state = GameState::initial(self.n)?;
        for &mv in &self.moves {
            state = state.apply(mv)?;
        }
        Ok(state)
    }
}

/// Drives `policy` from `{1^n}` until no move remains.
pub fn play_game(n: u32, policy: Policy) -> Result<GameRecord> {
    let seed = match policy {
        Policy::UniformRandom { seed } => seed,
        _ => 0,
    };
    play_with_rng(n, policy, &mut game_rng(seed, 0))
}

/// Like [`play_game`] but drawing from a caller-supplied stream.
pub fn play_with_rng<R: Rng + ?Sized>(n: u32, policy: Policy, rng: &mut R) -> Result<GameRecord> {
    let mut state = GameState::initial(n)?;
    let mut moves = Vec::new();
    while !state.is_terminal() {
        let mv = policy.choose(&state, rng)?;
        state = state.apply(mv)?;
        moves.push(mv);
    }
    let length = moves.len();
    Ok(GameRecord {
        n,
        policy,
        moves,
        length,
        winner: Winner::from_length(length),
    })
}

/// Writes `n,policy,length,winner` rows.
pub fn write_records_csv<W: io::Write>(records: &[GameRecord], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "policy", "length", "winner"])?;
    for r in records {
        w.write_record([
            r.n.to_string(),
            r.policy.to_string(),
            r.length.to_string(),
            r.winner.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeckendorf::zeckendorf;

    fn st(n: u32, counts: &[u32]) -> GameState {
        GameState::from_counts(n, counts.to_vec()).unwrap()
    }

    #[test]
    fn greedy_examples() {
        assert_eq!(greedy_largest_move(&st(6, &[6])).unwrap(), Move::MergeOnes);
        assert_eq!(
            greedy_largest_move(&st(5, &[3, 1])).unwrap(),
            Move::Combine(1)
        );
        assert_eq!(
            greedy_largest_move(&st(6, &[1, 1, 1])).unwrap(),
            Move::Combine(2)
        );
        assert_eq!(play_game(6, Policy::GreedyLargest).unwrap().length, 4);
        assert!(matches!(
            greedy_largest_move(&st(4, &[1, 0, 1])),
            Err(GameError::Terminal(_))
        ));
    }

    #[test]
    fn longest_examples() {
        assert_eq!(
            conjectured_longest_move(&st(4, &[4])).unwrap(),
            Move::MergeOnes
        );
        assert_eq!(
            conjectured_longest_move(&st(4, &[2, 1])).unwrap(),
            Move::MergeOnes
        );
        assert_eq!(
            conjectured_longest_move(&st(4, &[0, 2])).unwrap(),
            Move::SplitTwos
        );
        assert!(conjectured_longest_move(&st(1, &[1])).is_err());
    }

    #[test]
    fn random_single_choice_and_terminal() {
        let mut rng = game_rng(3, 0);
        for _ in 0..50 {
            assert_eq!(
                random_move(&st(4, &[4]), &mut rng).unwrap(),
                Move::MergeOnes
            );
        }
        assert!(random_move(&st(4, &[1, 0, 1]), &mut rng).is_err());
    }

    #[test]
    fn random_is_fair_on_two_moves() {
        let s = st(4, &[2, 1]);
        let mut rng = game_rng(11, 0);
        let merges = (0..10_000)
            .filter(|_| random_move(&s, &mut rng).unwrap() == Move::MergeOnes)
            .count();
        let freq = merges as f64 / 10_000.0;
        assert!((freq - 0.5).abs() <= 0.02, "freq={freq}");
    }

    #[test]
    fn small_games() {
        for policy in [
            Policy::GreedyLargest,
            Policy::ConjecturedLongest,
            Policy::UniformRandom { seed: 5 },
        ] {
            let r = play_game(1, policy).unwrap();
            assert_eq!((r.length, r.winner), (0, Winner::NoMoves));
            let r = play_game(2, policy).unwrap();
            assert_eq!((r.length, r.winner), (1, Winner::Player1));
            let r = play_game(3, policy).unwrap();
            assert_eq!(r.moves, vec![Move::MergeOnes, Move::Combine(1)]);
            assert_eq!(r.winner, Winner::Player2);
        }
        assert_eq!(play_game(0, Policy::GreedyLargest), Err(GameError::ZeroN));
    }

    #[test]
    fn greedy_500() {
        let r = play_game(500, Policy::GreedyLargest).unwrap();
        assert_eq!(r.length as u32, 500 - zeckendorf(500).unwrap().z());
    }

    #[test]
    fn seeded_playouts_repeat() {
        let a = play_game(10, Policy::UniformRandom { seed: 42 }).unwrap();
        let b = play_game(10, Policy::UniformRandom { seed: 42 }).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.replay().unwrap(), zeckendorf(10).unwrap().to_state());
    }

    #[test]
    fn winner_parity() {
        assert_eq!(Winner::from_length(0), Winner::NoMoves);
        assert_eq!(Winner::from_length(1), Winner::Player1);
        assert_eq!(Winner::from_length(2), Winner::Player2);
        assert_eq!(Winner::from_length(7), Winner::Player1);
    }

    #[test]
    fn policy_names_and_json() {
        assert_eq!("greedy".parse::<Policy>().unwrap(), Policy::GreedyLargest);
        assert_eq!(
            "uniform_random:9".parse::<Policy>().unwrap(),
            Policy::UniformRandom { seed: 9 }
        );
        assert!("minimax".parse::<Policy>().is_err());
        for p in [
            Policy::GreedyLargest,
            Policy::ConjecturedLongest,
            Policy::UniformRandom { seed: 1 },
        ] {
            assert_eq!(p.to_string().parse::<Policy>().unwrap(), p);
        }
        assert_eq!(
            serde_json::to_string(&Policy::UniformRandom { seed: 7 }).unwrap(),
            r#"{"kind":"uniform_random","seed":7}"#
        );
    }

    #[test]
    fn records_csv() {
        let recs = vec![play_game(3, Policy::GreedyLargest).unwrap()];
        let mut buf = Vec::new();
        write_records_csv(&recs, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "n,policy,length,winner\n3,greedy_largest,2,player2\n"
        );
    }
}
