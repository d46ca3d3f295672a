//! Arbitrary-precision scalars and the dense linear algebra built on them:
//! partial-pivoting LU determinants and a cyclic Jacobi eigensolver with an
//! adaptive-precision driver.

mod complex;
mod eigen;
mod lu;
mod matrix;
mod real;

pub use complex::BigComplex;
pub use eigen::{adaptive_solve, adaptive_solve_with, sym_eigenvalues, AdaptiveOptions, EigenResult};
pub use lu::det_lu;
pub use matrix::RealMatrix;
pub use real::{ten_pow_neg, BigReal, MIN_PREC};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MpError {
    #[error("matrix has dimension 0")]
    EmptyMatrix,
    #[error("matrix is not square: {rows} rows, row {bad_row} has {len} entries")]
    NotSquare { rows: usize, bad_row: usize, len: usize },
    #[error("precision {0} bits is below the minimum of 64")]
    PrecisionTooLow(u32),
    #[error("determinant left the exponent range at row {row} ({kind})")]
    ExponentRange { row: usize, kind: &'static str },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("tolerance must be positive")]
    BadTolerance,
    #[error("Jacobi iteration did not converge in {sweeps} sweeps (off-diagonal norm {residual})")]
    NoConvergence { sweeps: usize, residual: String },
    #[error("target of {0} digits is below the minimum of 10")]
    TargetTooLow(u32),
    #[error("eigenvalues still disagree at the {cap}-bit precision cap")]
    PrecisionCap {
        cap: u32,
        previous: Vec<BigReal>,
        last: Vec<BigReal>,
    },
    #[error("cannot parse {input:?} as a number: {reason}")]
    Parse { input: String, reason: String },
}

/// Internal working precision: `prec + 32 + 2*ceil(log2 m)` guard bits for
/// pivot growth and rotation accumulation.
pub fn working_prec(prec: u32, m: usize) -> u32 {
    let log2m = if m <= 1 {
        0
    } else {
        usize::BITS - (m - 1).leading_zeros()
    };
    prec + 32 + 2 * log2m
}
