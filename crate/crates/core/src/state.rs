//! Game positions and the four rewrite rules.
//!
//! A position is a multiset of Fibonacci summands stored as a dense
//! multiplicity vector: `counts[k]` is the number of copies of `F_{k+1}`.
//! The vector always has length `ell(n)`; no legal move can populate an
//! index above it, since two copies of `F_ell` would already exceed `n`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{GameError, Result};
use crate::fib::fib_table;

/// One legal rewrite, identified by its rule and lowest participating index.
///
/// The derived ordering is the fixed enumeration order used everywhere:
/// merges, then the 2-split, then splits and combines by ascending index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "MoveRepr", into = "MoveRepr")]
pub enum Move {
    /// `F_1 + F_1 -> F_2`
    MergeOnes,
    /// `F_2 + F_2 -> F_1 + F_3`
    SplitTwos,
    /// `F_i + F_i -> F_{i-2} + F_{i+1}`, `i >= 3`
    Split(u32),
    /// `F_i + F_{i+1} -> F_{i+2}`, `i >= 1`
    Combine(u32),
}

impl Move {
    pub fn kind(&self) -> MoveKind {
        match self {
            Move::MergeOnes => MoveKind::MergeOnes,
            Move::SplitTwos => MoveKind::SplitTwos,
            Move::Split(_) => MoveKind::Split,
            Move::Combine(_) => MoveKind::Combine,
        }
    }

    pub fn index(&self) -> Option<u32> {
        match *self {
            Move::Split(i) | Move::Combine(i) => Some(i),
            _ => None,
        }
    }

    /// Change in the number of summands (merges and combines remove one).
    pub fn summand_delta(&self) -> i32 {
        match self {
            Move::MergeOnes | Move::Combine(_) => -1,
            Move::SplitTwos | Move::Split(_) => 0,
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::MergeOnes => f.write_str("merge_ones"),
            Move::SplitTwos => f.write_str("split_twos"),
            Move::Split(i) => write!(f, "split({i})"),
            Move::Combine(i) => write!(f, "combine({i})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveKind {
    MergeOnes,
    SplitTwos,
    Split,
    Combine,
}

/// Wire form: `{"kind": "split", "index": 4}`; `index` only for split/combine.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MoveRepr {
    kind: MoveKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    index: Option<u32>,
}

impl TryFrom<MoveRepr> for Move {
    type Error = String;

    fn try_from(r: MoveRepr) -> std::result::Result<Self, Self::Error> {
        match (r.kind, r.index) {
            (MoveKind::MergeOnes, None) => Ok(Move::MergeOnes),
            (MoveKind::SplitTwos, None) => Ok(Move::SplitTwos),
            (MoveKind::Split, Some(i)) if i >= 3 => Ok(Move::Split(i)),
            (MoveKind::Combine, Some(i)) if i >= 1 => Ok(Move::Combine(i)),
            (MoveKind::Split, Some(i)) => Err(format!("split index must be >= 3, got {i}")),
            (MoveKind::Combine, Some(i)) => Err(format!("combine index must be >= 1, got {i}")),
            (MoveKind::Split | MoveKind::Combine, None) => Err("missing index".into()),
            (_, Some(_)) => Err("merge_ones/split_twos take no index".into()),
        }
    }
}

impl From<Move> for MoveRepr {
    fn from(m: Move) -> Self {
        MoveRepr {
            kind: m.kind(),
            index: m.index(),
        }
    }
}

/// Canonical, hash-seed independent identity of a position within one game.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateKey(Box<[u32]>);

impl StateKey {
    pub fn counts(&self) -> &[u32] {
        &self.0
    }
}

/// A position of the game on `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "StateRepr")]
pub struct GameState {
    n: u32,
    counts: Vec<u32>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StateRepr {
    n: u32,
    counts: Vec<u32>,
}

impl TryFrom<StateRepr> for GameState {
    type Error = GameError;

    fn try_from(r: StateRepr) -> Result<Self> {
        GameState::from_counts(r.n, r.counts)
    }
}

impl GameState {
    /// `{1^n}`.
    pub fn initial(n: u32) -> Result<Self> {
        let table = fib_table(n)?;
        let mut counts = vec![0; table.ell()];
        counts[0] = n;
        Ok(GameState { n, counts })
    }

    /// Builds a position from multiplicities (`counts[0]` is the count of
    /// `F_1`). Shorter vectors are zero-padded to `ell(n)`.
    pub fn from_counts(n: u32, mut counts: Vec<u32>) -> Result<Self> {
        let table = fib_table(n)?;
        let ell = table.ell();
        if counts.len() > ell {
            if counts[ell..].iter().any(|&c| c != 0) {
                return Err(GameError::InvalidState(format!(
                    "index above ell({n}) = {ell} is populated"
                )));
            }
            counts.truncate(ell);
        }
        counts.resize(ell, 0);
        let total: u64 = counts
            .iter()
            .enumerate()
            .map(|(k, &c)| u64::from(c) * table.get(k + 1))
            .sum();
        if total != u64::from(n) {
            return Err(GameError::InvalidState(format!(
                "summands total {total}, expected {n}"
            )));
        }
        Ok(GameState { n, counts })
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Dense multiplicities, `counts()[k]` belongs to `F_{k+1}`.
    #[inline]
    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    /// Multiplicity of `F_index` (1-based); zero outside the table.
    #[inline]
    pub fn count(&self, index: usize) -> u32 {
        if index == 0 {
            return 0;
        }
        self.counts.get(index - 1).copied().unwrap_or(0)
    }

    /// Total number of summands.
    pub fn summands(&self) -> u32 {
        self.counts.iter().sum()
    }

    /// Highest populated index, if any.
    pub fn top_index(&self) -> Option<usize> {
        self.counts.iter().rposition(|&c| c > 0).map(|k| k + 1)
    }

    pub fn is_legal(&self, mv: Move) -> bool {
        match mv {
            Move::MergeOnes => self.count(1) >= 2,
            Move::SplitTwos => self.count(2) >= 2,
            Move::Split(i) => i >= 3 && self.count(i as usize) >= 2,
            Move::Combine(i) => {
                i >= 1 && self.count(i as usize) >= 1 && self.count(i as usize + 1) >= 1
            }
        }
    }

    /// Every legal move, in the fixed enumeration order.
    pub fn legal_moves(&self) -> Vec<Move> {
        let len = self.counts.len();
        let mut moves = Vec::new();
        if self.count(1) >= 2 {
            moves.push(Move::MergeOnes);
        }
        if self.count(2) >= 2 {
            moves.push(Move::SplitTwos);
        }
        for i in 3..=len {
            if self.counts[i - 1] >= 2 {
                moves.push(Move::Split(i as u32));
            }
        }
        for i in 1..len {
            if self.counts[i - 1] >= 1 && self.counts[i] >= 1 {
                moves.push(Move::Combine(i as u32));
            }
        }
        moves
    }

    /// Returns the successor position; the receiver is left untouched.
    pub fn apply(&self, mv: Move) -> Result<GameState> {
        if !self.is_legal(mv) {
            return Err(GameError::IllegalMove {
                mv,
                state: self.to_string(),
            });
        }
        let mut next = self.clone();
        let c = &mut next.counts;
        match mv {
            Move::MergeOnes => {
                c[0] -= 2;
                c[1] += 1;
            }
            Move::SplitTwos => {
                c[1] -= 2;
                c[0] += 1;
                c[2] += 1;
            }
            Move::Split(i) => {
                let k = i as usize - 1;
                c[k] -= 2;
                c[k - 2] += 1;
                c[k + 1] += 1;
            }
            Move::Combine(i) => {
                let k = i as usize - 1;
                c[k] -= 1;
                c[k + 1] -= 1;
                c[k + 2] += 1;
            }
        }
        Ok(next)
    }

    /// No duplicates and no two consecutive indices: exactly the positions
    /// without a legal move.
    pub fn is_terminal(&self) -> bool {
        self.counts.iter().all(|&c| c <= 1)
            && self.counts.windows(2).all(|w| w[0] == 0 || w[1] == 0)
    }

    /// `Σ counts[i] · √i`; strictly decreases under every move.
    pub fn monovariant(&self) -> f64 {
        self.counts
            .iter()
            .enumerate()
            .map(|(k, &c)| f64::from(c) * ((k + 1) as f64).sqrt())
            .sum()
    }

    pub fn key(&self) -> StateKey {
        StateKey(self.counts.clone().into_boxed_slice())
    }

    /// Inverse of [`GameState::key`] for positions of the game on `n`.
    pub fn from_key(n: u32, key: &StateKey) -> Result<Self> {
        GameState::from_counts(n, key.0.to_vec())
    }
}

impl fmt::Display for GameState {
    /// Multiset notation with Fibonacci values, e.g. `{1^2 ∧ 2}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (mut a, mut b) = (1u64, 2u64);
        let mut first = true;
        f.write_str("{")?;
        for &c in &self.counts {
            if c > 0 {
                if !first {
                    f.write_str(" ∧ ")?;
                }
                first = false;
                if c == 1 {
                    write!(f, "{a}")?;
                } else {
                    write!(f, "{a}^{c}")?;
                }
            }
            (a, b) = (b, a + b);
        }
        f.write_str("}")
    }
}

/// `{1^n}`.
pub fn initial_state(n: u32) -> Result<GameState> {
    GameState::initial(n)
}

pub fn legal_moves(state: &GameState) -> Vec<Move> {
    state.legal_moves()
}

pub fn apply_move(state: &GameState, mv: Move) -> Result<GameState> {
    state.apply(mv)
}

pub fn is_terminal(state: &GameState) -> bool {
    state.is_terminal()
}

pub fn monovariant(state: &GameState) -> f64 {
    state.monovariant()
}

pub fn canonical_key(state: &GameState) -> StateKey {
    state.key()
}
