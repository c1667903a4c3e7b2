//! Zeckendorf decompositions by the greedy construction.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::fib::fib_table;
use crate::state::GameState;

/// Strictly increasing, pairwise non-adjacent Fibonacci indices summing to `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub n: u32,
    pub indices: Vec<usize>,
    pub values: Vec<u64>,
}

impl Decomposition {
    /// `Z(n)`, the number of terms.
    pub fn z(&self) -> u32 {
        self.indices.len() as u32
    }

    /// The terminal game position with these summands.
    pub fn to_state(&self) -> GameState {
        let top = self.indices.last().copied().unwrap_or(0);
        let mut counts = vec![0; top];
        for &i in &self.indices {
            counts[i - 1] = 1;
        }
        GameState::from_counts(self.n, counts).expect("decomposition sums to n")
    }
}

pub fn zeckendorf(n: u32) -> Result<Decomposition> {
    let table = fib_table(n)?;
    let mut rest = u64::from(n);
    let mut indices = Vec::new();
    let mut i = table.ell();
    while rest > 0 {
        while table.get(i) > rest {
            i -= 1;
        }
        rest -= table.get(i);
        indices.push(i);
    }
    indices.reverse();
    let values = indices.iter().map(|&i| table.get(i)).collect();
    Ok(Decomposition { n, indices, values })
}

/// `Z(n)`.
pub fn zeckendorf_terms(n: u32) -> Result<u32> {
    zeckendorf(n).map(|d| d.z())
}
