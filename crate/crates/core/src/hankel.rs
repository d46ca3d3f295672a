//! Signed Hankel matrices `M_{l,m}(f)` built from a coefficient stream, and
//! the column-reversed Toeplitz core used to check the determinant sign
//! relation between the two layouts.

use thiserror::Error;

use crate::coeffs::{CoeffError, CoeffStream};
use crate::mpnum::{det_lu, BigReal, MpError, RealMatrix};

#[derive(Debug, Error)]
pub enum HankelError {
    #[error("l and m must be at least 1 (got l = {l}, m = {m})")]
    BadIndex { l: usize, m: usize },
    #[error("stream stops at theta_{max}; M_(l,m) needs theta_{missing}")]
    StreamTooShort { missing: usize, max: usize },
    #[error(transparent)]
    Coeff(#[from] CoeffError),
    #[error(transparent)]
    Mp(#[from] MpError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HankelSpec {
    pub l: usize,
    pub m: usize,
}

impl HankelSpec {
    pub fn new(l: usize, m: usize) -> Result<Self, HankelError> {
        if l == 0 || m == 0 {
            return Err(HankelError::BadIndex { l, m });
        }
        Ok(HankelSpec { l, m })
    }

    /// Largest coefficient index referenced: `l + m - 1`.
    pub fn max_index(&self) -> usize {
        self.l + self.m - 1
    }

    fn check(&self, stream: &CoeffStream) -> Result<(), HankelError> {
        if stream.max_index() < self.max_index() {
            return Err(HankelError::StreamTooShort {
                missing: self.max_index(),
                max: stream.max_index(),
            });
        }
        Ok(())
    }

    /// Coefficient index at 1-based `(i, j)`: `l + m + 1 - i - j`.
    pub fn index(&self, i: usize, j: usize) -> i64 {
        (self.l + self.m + 1) as i64 - i as i64 - j as i64
    }
}

/// `M_{l,m}(f)` with its scalar prefactor kept alongside the entries.
#[derive(Clone, Debug)]
pub struct SignedHankel {
    pub spec: HankelSpec,
    pub sign: i8,
    pub matrix: RealMatrix,
}

impl SignedHankel {
    /// The unsigned core `theta_{l+m+1-i-j}`.
    pub fn unsigned_core(&self) -> RealMatrix {
        if self.sign > 0 {
            self.matrix.clone()
        } else {
            self.matrix.scaled(&BigReal::from_i64(self.matrix.max_prec(), -1))
        }
    }
}

/// `-(-1)^((m+1)(m+2)/2)`, which cycles `+1, -1, -1, +1` in `m`.
pub fn sign_prefactor(m: usize) -> i8 {
    let e = (m as u128 + 1) * (m as u128 + 2) / 2;
    if e % 2 == 0 {
        -1
    } else {
        1
    }
}

fn core_entries(stream: &CoeffStream, spec: HankelSpec) -> Result<Vec<BigReal>, HankelError> {
    // entries depend only on i + j; fetch each anti-diagonal once
    (2..=2 * spec.m)
        .map(|ij| stream.theta(spec.index(ij, 0)).map_err(HankelError::from))
        .collect()
}

/// Builds `M_{l,m}(f)`: entry `(i, j)` is `sign * theta_{l+m+1-i-j}`, so the
/// top-left corner holds `theta_{l+m-1}` and the bottom-right `theta_{l-m+1}`.
pub fn build_m(stream: &CoeffStream, l: usize, m: usize) -> Result<SignedHankel, HankelError> {
    let spec = HankelSpec::new(l, m)?;
    spec.check(stream)?;
    let sign = sign_prefactor(m);
    let diag = core_entries(stream, spec)?;
    let signed: Vec<BigReal> = if sign > 0 {
        diag
    } else {
        diag.into_iter().map(|v| -v).collect()
    };
    let matrix = RealMatrix::from_fn(m, |i, j| signed[i + j].clone())?;
    debug_assert!(matrix.is_symmetric());
    Ok(SignedHankel { spec, sign, matrix })
}

/// Unsigned Toeplitz matrix with entry `(i, j) = theta_{l+j-i}`; its columns
/// are those of the unsigned Hankel core in reverse order.
pub fn raw_toeplitz(stream: &CoeffStream, l: usize, m: usize) -> Result<RealMatrix, HankelError> {
    let spec = HankelSpec::new(l, m)?;
    spec.check(stream)?;
    let by_offset: Vec<BigReal> = (0..2 * m - 1)
        .map(|d| stream.theta(l as i64 + d as i64 - (m as i64 - 1)))
        .collect::<Result<_, _>>()?;
    // offset j - i ranges over -(m-1)..=(m-1)
    Ok(RealMatrix::from_fn(m, |i, j| by_offset[j + m - 1 - i].clone())?)
}

/// Outcome of comparing `det(H)` with `(-1)^(m(m-1)/2) det(T)`.
#[derive(Clone, Debug)]
pub struct DetRelationReport {
    pub l: usize,
    pub m: usize,
    pub det_hankel: BigReal,
    pub det_toeplitz: BigReal,
    pub permutation_sign: i8,
    /// `|det H - sign det T| / |det H|` (absolute when `det H = 0`).
    pub relative_error: BigReal,
    pub holds: bool,
}

/// `(-1)^(m(m-1)/2)`: sign of reversing `m` columns.
pub fn reversal_sign(m: usize) -> i8 {
    if (m * (m.saturating_sub(1)) / 2) % 2 == 0 {
        1
    } else {
        -1
    }
}

pub const DET_RELATION_TOL_DIGITS: u32 = 30;

pub fn det_relation_check(stream: &CoeffStream, l: usize, m: usize, prec: u32) -> Result<DetRelationReport, HankelError> {
    let h = build_m(stream, l, m)?.unsigned_core();
    let t = raw_toeplitz(stream, l, m)?;
    let det_h = det_lu(&h, prec)?;
    let det_t = det_lu(&t, prec)?;
    let ps = reversal_sign(m);
    let signed_t = if ps > 0 { det_t.clone() } else { -&det_t };
    let diff = (&det_h - &signed_t).abs();
    let relative_error = if det_h.is_zero() { diff } else { &diff / &det_h.abs() };
    let tol = crate::mpnum::ten_pow_neg(prec, DET_RELATION_TOL_DIGITS);
    let holds = relative_error <= tol;
    Ok(DetRelationReport {
        l,
        m,
        det_hankel: det_h,
        det_toeplitz: det_t,
        permutation_sign: ps,
        relative_error,
        holds,
    })
}
