//! Fibonacci numbers with the Zeckendorf indexing `F_1 = 1, F_2 = 2`.

use crate::error::{GameError, Result};

/// `F_1 ..= F_ell(n)+1` for a fixed game total `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FibTable {
    values: Vec<u64>,
    ell: usize,
}

impl FibTable {
    /// `F_index`, 1-based.
    ///
    /// Panics if `index` is zero or beyond the table.
    #[inline]
    pub fn get(&self, index: usize) -> u64 {
        self.values[index - 1]
    }

    /// Largest index with `F_ell <= n`.
    #[inline]
    pub fn ell(&self) -> usize {
        self.ell
    }

    /// The stored values, `values()[0] == F_1`.
    pub fn values(&self) -> &[u64] {
        &self.values
    }
}

/// Builds the table through index `ell(n) + 1`.
pub fn fib_table(n: u32) -> Result<FibTable> {
    if n == 0 {
        return Err(GameError::ZeroN);
    }
    let n = u64::from(n);
    let mut values = vec![1u64, 2];
    while *values.last().unwrap() <= n {
        let k = values.len();
        values.push(values[k - 1] + values[k - 2]);
    }
    // last entry is the first value above n
    let ell = values.len() - 1;
    Ok(FibTable { values, ell })
}

/// `ell(n)`: index of the largest Fibonacci number not exceeding `n`.
pub fn ell(n: u32) -> Result<usize> {
    fib_table(n).map(|t| t.ell())
}
