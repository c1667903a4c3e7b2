//! Exhaustive analysis of the game graph.
//!
//! The reachable positions from `{1^n}` form a DAG with the Zeckendorf
//! decomposition as its only sink: every move strictly lowers the
//! monovariant, so no position repeats along a line of play. That makes a
//! plain memoized depth-first traversal sufficient for every quantity here
//! (win/loss by backward induction, shortest and longest completion, and
//! which completion parities exist), with no on-stack cycle detection.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use dashmap::DashMap;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GameError, Result};
use crate::fib::fib_table;
use crate::state::{GameState, Move, StateKey};
use crate::strategy::Winner;
use crate::zeckendorf::zeckendorf_terms;

pub const DEFAULT_SOLVE_LIMIT: u32 = 25;
pub const DEFAULT_EXPORT_LIMIT: u32 = 15;

/// Everything the solver knows about one position, from the perspective of
/// the player about to move.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeValue {
    /// Normal play: a terminal position is lost for the mover.
    pub mover_wins: bool,
    /// Fewest moves left to the end of the game.
    pub min_remaining: u32,
    /// Most moves left to the end of the game.
    pub max_remaining: u32,
    pub finish_even: bool,
    pub finish_odd: bool,
}

impl NodeValue {
    const TERMINAL: NodeValue = NodeValue {
        mover_wins: false,
        min_remaining: 0,
        max_remaining: 0,
        finish_even: true,
        finish_odd: false,
    };

    fn from_children(children: &[NodeValue]) -> NodeValue {
        if children.is_empty() {
            return NodeValue::TERMINAL;
        }
        NodeValue {
            mover_wins: children.iter().any(|c| !c.mover_wins),
            min_remaining: 1 + children.iter().map(|c| c.min_remaining).min().unwrap(),
            max_remaining: 1 + children.iter().map(|c| c.max_remaining).max().unwrap(),
            // one more move flips parity
            finish_even: children.iter().any(|c| c.finish_odd),
            finish_odd: children.iter().any(|c| c.finish_even),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Odd,
    Even,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveReport {
    pub n: u32,
    pub winner: Winner,
    pub reachable_states: usize,
    pub min_length: u32,
    pub max_length: u32,
    pub parities: BTreeSet<Parity>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub n: u32,
    /// `n - Z(n)`, attained by the greedy game.
    pub lower: u32,
    pub ell: u32,
    /// `ell · n`.
    pub upper: u64,
    /// `n · log_φ(√5·n + 1/2)`, an upper bound on `ell · n`.
    pub log_upper: f64,
}

pub fn bounds_report(n: u32) -> Result<BoundsReport> {
    let ell = fib_table(n)?.ell() as u32;
    let lower = n - zeckendorf_terms(n)?;
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let nf = f64::from(n);
    let log_upper = nf * (5f64.sqrt() * nf + 0.5).ln() / phi.ln();
    Ok(BoundsReport {
        n,
        lower,
        ell,
        upper: u64::from(ell) * u64::from(n),
        log_upper,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub solve_limit: u32,
    pub export_limit: u32,
    /// Evaluate sibling subtrees on the rayon pool.
    pub parallel: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            solve_limit: DEFAULT_SOLVE_LIMIT,
            export_limit: DEFAULT_EXPORT_LIMIT,
            parallel: true,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Solver {
    pub config: SolverConfig,
}

impl Solver {
    pub fn new(config: SolverConfig) -> Self {
        Solver { config }
    }

    pub fn sequential() -> Self {
        Solver::new(SolverConfig {
            parallel: false,
            ..SolverConfig::default()
        })
    }

    /// Explores and evaluates every position reachable from `{1^n}`.
    pub fn analyze(&self, n: u32) -> Result<GameGraph> {
        let root = GameState::initial(n)?;
        if n > self.config.solve_limit {
            return Err(GameError::Capacity {
                what: "solve",
                n,
                limit: self.config.solve_limit,
            });
        }
        let table = DashMap::new();
        evaluate(&root, &table, self.config.parallel);
        Ok(GameGraph {
            root,
            values: table.into_iter().collect(),
        })
    }

    pub fn solve(&self, n: u32) -> Result<SolveReport> {
        Ok(self.analyze(n)?.report())
    }

    pub fn extreme_lengths(&self, n: u32) -> Result<(u32, u32)> {
        let r = self.solve(n)?;
        Ok((r.min_length, r.max_length))
    }

    pub fn winning_line(&self, n: u32) -> Result<Vec<Move>> {
        self.analyze(n)?.winning_line()
    }

    /// The full graph as DOT or JSON text; refuses `n` above the export limit.
    pub fn export_tree(&self, n: u32, format: crate::export::TreeFormat) -> Result<String> {
        GameState::initial(n)?;
        if n > self.config.export_limit {
            return Err(GameError::Capacity {
                what: "export",
                n,
                limit: self.config.export_limit,
            });
        }
        Ok(crate::export::render(&self.analyze(n)?, format))
    }
}

fn evaluate(state: &GameState, table: &DashMap<StateKey, NodeValue>, parallel: bool) -> NodeValue {
    let key = state.key();
    if let Some(v) = table.get(&key) {
        return *v;
    }
    let children: Vec<GameState> = state
        .legal_moves()
        .into_iter()
        .map(|m| state.apply(m).expect("enumerated move is legal"))
        .collect();
    let values: Vec<NodeValue> = if parallel && children.len() > 1 {
        children
            .par_iter()
            .map(|c| evaluate(c, table, parallel))
            .collect()
    } else {
        children
            .iter()
            .map(|c| evaluate(c, table, parallel))
            .collect()
    };
    let v = NodeValue::from_children(&values);
    // Concurrent workers may race to the same key; they compute the same value.
    table.insert(key, v);
    v
}

/// The evaluated game graph for one `n`.
#[derive(Debug, Clone)]
pub struct GameGraph {
    root: GameState,
    values: HashMap<StateKey, NodeValue>,
}

impl GameGraph {
    pub fn n(&self) -> u32 {
        self.root.n()
    }

    pub fn root(&self) -> &GameState {
        &self.root
    }

    /// Number of distinct reachable positions, the root and sink included.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, state: &GameState) -> Option<NodeValue> {
        self.values.get(&state.key()).copied()
    }

    fn expect_value(&self, state: &GameState) -> NodeValue {
        self.value(state).expect("state reachable from root")
    }

    pub fn report(&self) -> SolveReport {
        let v = self.expect_value(&self.root);
        let winner = if self.root.is_terminal() {
            Winner::NoMoves
        } else if v.mover_wins {
            Winner::Player1
        } else {
            Winner::Player2
        };
        let mut parities = BTreeSet::new();
        if v.finish_odd {
            parities.insert(Parity::Odd);
        }
        if v.finish_even {
            parities.insert(Parity::Even);
        }
        SolveReport {
            n: self.n(),
            winner,
            reachable_states: self.len(),
            min_length: v.min_remaining,
            max_length: v.max_remaining,
            parities,
        }
    }

    /// Principal variation: each mover takes the first move (in enumeration
    /// order) that leaves the opponent lost, or the first legal move when no
    /// such move exists.
    pub fn winning_line(&self) -> Result<Vec<Move>> {
        if self.root.is_terminal() {
            return Err(GameError::NoMoves(self.n()));
        }
        Ok(self
            .principal_variation()
            .into_iter()
            .map(|(_, m)| m)
            .collect())
    }

    /// `(position, move)` pairs along the principal variation.
    pub(crate) fn principal_variation(&self) -> Vec<(GameState, Move)> {
        let mut line = Vec::new();
        let mut state = self.root.clone();
        while !state.is_terminal() {
            let moves = state.legal_moves();
            let children: Vec<GameState> = moves
                .iter()
                .map(|&m| state.apply(m).expect("legal"))
                .collect();
            let pick = children
                .iter()
                .position(|c| !self.expect_value(c).mover_wins)
                .unwrap_or(0);
            line.push((state, moves[pick]));
            state = children.into_iter().nth(pick).unwrap();
        }
        line
    }

    /// Positions in breadth-first discovery order from the root, children in
    /// move-enumeration order. Deterministic for a given `n`.
    pub fn states_bfs(&self) -> Vec<GameState> {
        let mut seen = HashSet::new();
        let mut order = Vec::new();
        let mut queue = VecDeque::from([self.root.clone()]);
        seen.insert(self.root.key());
        while let Some(s) = queue.pop_front() {
            for m in s.legal_moves() {
                let c = s.apply(m).expect("legal");
                if seen.insert(c.key()) {
                    queue.push_back(c);
                }
            }
            order.push(s);
        }
        order
    }
}

/// [`Solver::solve`] with the default configuration.
pub fn solve(n: u32) -> Result<SolveReport> {
    Solver::default().solve(n)
}

pub fn winning_line(n: u32) -> Result<Vec<Move>> {
    Solver::default().winning_line(n)
}

pub fn extreme_lengths(n: u32) -> Result<(u32, u32)> {
    Solver::default().extreme_lengths(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_games() {
        let r = solve(1).unwrap();
        assert_eq!(r.winner, Winner::NoMoves);
        assert_eq!((r.min_length, r.max_length, r.reachable_states), (0, 0, 1));

        let r = solve(2).unwrap();
        assert_eq!(r.winner, Winner::Player1);
        assert_eq!((r.min_length, r.max_length), (1, 1));
        assert_eq!(r.parities, BTreeSet::from([Parity::Odd]));

        let r = solve(3).unwrap();
        assert_eq!(r.winner, Winner::Player2);
        assert_eq!((r.min_length, r.max_length), (2, 2));
        assert_eq!(r.parities, BTreeSet::from([Parity::Even]));
    }

    #[test]
    fn n4() {
        let r = solve(4).unwrap();
        assert_eq!((r.min_length, r.max_length), (2, 3));
        assert_eq!(r.parities, BTreeSet::from([Parity::Odd, Parity::Even]));
        assert_eq!(r.reachable_states, 4);
        assert_eq!(extreme_lengths(3).unwrap(), (2, 2));
        assert_eq!(extreme_lengths(10).unwrap().0, 8);
    }

    #[test]
    fn n9_player2() {
        assert_eq!(solve(9).unwrap().winner, Winner::Player2);
        let line = winning_line(9).unwrap();
        assert_eq!(line.len() % 2, 0);
    }

    #[test]
    fn lines() {
        assert_eq!(
            winning_line(3).unwrap(),
            vec![Move::MergeOnes, Move::Combine(1)]
        );
        assert_eq!(winning_line(2).unwrap(), vec![Move::MergeOnes]);
        assert_eq!(winning_line(1), Err(GameError::NoMoves(1)));
    }

    #[test]
    fn capacity_refuses() {
        let err = Solver::default().solve(26).unwrap_err();
        assert_eq!(
            err,
            GameError::Capacity {
                what: "solve",
                n: 26,
                limit: 25
            }
        );
        assert_eq!(solve(0), Err(GameError::ZeroN));
        let small = Solver::new(SolverConfig {
            solve_limit: 5,
            ..Default::default()
        });
        assert!(small.solve(5).is_ok());
        assert!(small.solve(6).is_err());
    }

    #[test]
    fn bounds_examples() {
        let b = bounds_report(60).unwrap();
        assert_eq!((b.lower, b.ell, b.upper), (58, 9, 540));
        let b = bounds_report(4).unwrap();
        assert_eq!((b.lower, b.ell, b.upper), (2, 3, 12));
        let b = bounds_report(1).unwrap();
        assert_eq!((b.lower, b.ell, b.upper), (0, 1, 1));
        for n in 1..=2000 {
            let b = bounds_report(n).unwrap();
            assert!(b.upper as f64 <= b.log_upper + 1e-9, "n={n}");
        }
        assert_eq!(bounds_report(0), Err(GameError::ZeroN));
    }

    #[test]
    fn sequential_and_parallel_agree() {
        for n in 1..=18 {
            let a = Solver::sequential().analyze(n).unwrap();
            let b = Solver::default().analyze(n).unwrap();
            assert_eq!(a.report(), b.report());
            assert_eq!(a.values, b.values);
            assert_eq!(a.winning_line().ok(), b.winning_line().ok());
        }
    }

    #[test]
    fn report_json_fields() {
        let v = serde_json::to_value(solve(4).unwrap()).unwrap();
        assert_eq!(
            v,
            serde_json::json!({
                "n": 4, "winner": "player2", "reachable_states": 4,
                "min_length": 2, "max_length": 3, "parities": ["odd", "even"]
            })
        );
    }
}
