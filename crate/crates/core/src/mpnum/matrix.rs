use rug::Float;

use super::{BigReal, MpError};

/// Dense square matrix of [`BigReal`] entries in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct RealMatrix {
    dim: usize,
    entries: Vec<BigReal>,
    symmetric: bool,
}

impl RealMatrix {
    /// Builds a matrix from rows; the symmetric flag is set when the entries
    /// are bit-for-bit symmetric.
    pub fn from_rows(rows: Vec<Vec<BigReal>>) -> Result<Self, MpError> {
        let dim = rows.len();
        if dim == 0 {
            return Err(MpError::EmptyMatrix);
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != dim {
                return Err(MpError::NotSquare {
                    rows: dim,
                    bad_row: i,
                    len: row.len(),
                });
            }
            entries.extend(row);
        }
        let mut m = RealMatrix {
            dim,
            entries,
            symmetric: false,
        };
        m.symmetric = m.is_exactly_symmetric();
        Ok(m)
    }

    pub fn from_f64_rows(prec: u32, rows: &[&[f64]]) -> Result<Self, MpError> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| BigReal::from_f64(prec, v)).collect())
                .collect(),
        )
    }

    /// Builds an `m x m` matrix from a function of 0-based `(row, col)`.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> BigReal) -> Result<Self, MpError> {
        if dim == 0 {
            return Err(MpError::EmptyMatrix);
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        let mut m = RealMatrix {
            dim,
            entries,
            symmetric: false,
        };
        m.symmetric = m.is_exactly_symmetric();
        Ok(m)
    }

    pub fn identity(dim: usize, prec: u32) -> Result<Self, MpError> {
        Self::from_fn(dim, |i, j| {
            if i == j {
                BigReal::one(prec)
            } else {
                BigReal::zero(prec)
            }
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// 0-based entry access.
    pub fn get(&self, i: usize, j: usize) -> &BigReal {
        &self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[BigReal] {
        &self.entries
    }

    /// Highest precision carried by any entry.
    pub fn max_prec(&self) -> u32 {
        self.entries.iter().map(BigReal::prec).max().unwrap_or(super::MIN_PREC)
    }

    pub fn trace(&self, prec: u32) -> BigReal {
        let mut acc = Float::new(prec);
        for i in 0..self.dim {
            acc += &self.get(i, i).0;
        }
        BigReal::from(acc)
    }

    pub fn frobenius_sq(&self, prec: u32) -> BigReal {
        let mut acc = Float::new(prec);
        for e in &self.entries {
            acc += Float::with_val(prec, e.0.square_ref());
        }
        BigReal::from(acc)
    }

    pub fn frobenius(&self, prec: u32) -> BigReal {
        self.frobenius_sq(prec).sqrt()
    }

    /// Every entry multiplied by `s`.
    pub fn scaled(&self, s: &BigReal) -> RealMatrix {
        RealMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|e| e * s).collect(),
            symmetric: self.symmetric,
        }
    }

    /// Row-permuted copy: row `i` of the result is row `perm[i]` of `self`.
    pub fn permute_rows(&self, perm: &[usize]) -> RealMatrix {
        let m = self.dim;
        let mut out = Vec::with_capacity(m * m);
        for &src in perm {
            out.extend_from_slice(&self.entries[src * m..(src + 1) * m]);
        }
        let mut r = RealMatrix {
            dim: m,
            entries: out,
            symmetric: false,
        };
        r.symmetric = r.is_exactly_symmetric();
        r
    }

    /// `P A P^T` for the permutation `perm`.
    pub fn permute_symmetric(&self, perm: &[usize]) -> RealMatrix {
        let m = self.dim;
        Self::from_fn(m, |i, j| self.get(perm[i], perm[j]).clone()).expect("non-empty")
    }

    /// Columns in reverse order.
    pub fn reverse_columns(&self) -> RealMatrix {
        let m = self.dim;
        Self::from_fn(m, |i, j| self.get(i, m - 1 - j).clone()).expect("non-empty")
    }

    fn is_exactly_symmetric(&self) -> bool {
        let m = self.dim;
        (0..m).all(|i| (i + 1..m).all(|j| self.get(i, j) == self.get(j, i)))
    }
}
