use rug::Float;

use super::{working_prec, BigReal, MpError, RealMatrix, MIN_PREC};

/// Determinant by Gaussian elimination with partial pivoting.
///
/// The elimination runs at [`working_prec`] and the product of pivots times
/// the permutation sign is rounded back to `prec` bits. An exactly zero
/// pivot column yields an exact zero determinant.
pub fn det_lu(a: &RealMatrix, prec: u32) -> Result<BigReal, MpError> {
    if prec < MIN_PREC {
        return Err(MpError::PrecisionTooLow(prec));
    }
    let m = a.dim();
    if m == 0 {
        return Err(MpError::EmptyMatrix);
    }
    let w = working_prec(prec, m);
    let mut lu: Vec<Float> = a.entries().iter().map(|e| Float::with_val(w, &e.0)).collect();
    let mut det = Float::with_val(w, 1);
    let mut negate = false;

    for k in 0..m {
        let mut piv = k;
        for i in k + 1..m {
            if lu[i * m + k].cmp_abs(&lu[piv * m + k]) == Some(std::cmp::Ordering::Greater) {
                piv = i;
            }
        }
        if lu[piv * m + k].is_zero() {
            return Ok(BigReal::zero(prec));
        }
        if piv != k {
            for j in 0..m {
                lu.swap(k * m + j, piv * m + j);
            }
            negate = !negate;
        }
        let (upper, lower) = lu.split_at_mut((k + 1) * m);
        let pivot_row = &upper[k * m..(k + 1) * m];
        let pivot = &pivot_row[k];
        for i in 0..m - k - 1 {
            let row = &mut lower[i * m..(i + 1) * m];
            if row[k].is_zero() {
                continue;
            }
            let f = Float::with_val(w, &row[k] / pivot);
            for j in k + 1..m {
                row[j] -= Float::with_val(w, &f * &pivot_row[j]);
            }
        }
        det *= pivot;
        if !det.is_finite() {
            return Err(MpError::ExponentRange { row: k, kind: "overflow" });
        }
        if det.is_zero() {
            return Err(MpError::ExponentRange { row: k, kind: "underflow" });
        }
    }
    if negate {
        det = -det;
    }
    Ok(BigReal::from(Float::with_val(prec, det)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_has_unit_determinant() {
        let a = RealMatrix::identity(3, 128).unwrap();
        assert_eq!(det_lu(&a, 128).unwrap().to_f64(), 1.0);
    }

    #[test]
    fn two_by_two() {
        let a = RealMatrix::from_f64_rows(128, &[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        let d = det_lu(&a, 128).unwrap();
        assert!((d.to_f64() + 2.0).abs() < 1e-30);
    }

    #[test]
    fn catalan_three_by_three() {
        let a = RealMatrix::from_f64_rows(128, &[&[1.0, 1.0, 2.0], &[1.0, 2.0, 5.0], &[2.0, 5.0, 14.0]])
            .unwrap();
        let d = det_lu(&a, 128).unwrap();
        assert!((d.to_f64() - 1.0).abs() < 1e-30);
    }

    #[test]
    fn singular_matrix_is_exact_zero() {
        let a = RealMatrix::from_f64_rows(128, &[&[1.0, 1.0], &[1.0, 1.0]]).unwrap();
        assert!(det_lu(&a, 128).unwrap().is_zero());
    }

    #[test]
    fn low_precision_rejected() {
        let a = RealMatrix::identity(2, 64).unwrap();
        assert!(matches!(det_lu(&a, 32), Err(MpError::PrecisionTooLow(32))));
    }

    #[test]
    fn overflow_reports_row() {
        let e = BigReal::from_f64(128, 6e8).exp();
        let a = RealMatrix::from_fn(3, |i, j| if i == j { e.clone() } else { BigReal::zero(128) }).unwrap();
        match det_lu(&a, 128) {
            Err(MpError::ExponentRange { row, kind }) => {
                assert_eq!(kind, "overflow");
                assert!(row >= 1);
            }
            other => panic!("expected overflow, got {other:?}"),
        }
    }
}
