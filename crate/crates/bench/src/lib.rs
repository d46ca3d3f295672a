//! Benchmark fixtures shared by the criterion benches.

use muspec::mpnum::{BigReal, RealMatrix};

/// Hilbert matrix `1/(i+j+1)` at `prec` bits.
pub fn hilbert(n: usize, prec: u32) -> RealMatrix {
    RealMatrix::from_fn(n, |i, j| BigReal::from_ratio(prec, 1, (i + j + 1) as i64)).expect("square")
}
