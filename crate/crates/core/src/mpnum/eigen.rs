use std::cmp::Ordering;

use rug::{Assign, Float};

use super::{ten_pow_neg, working_prec, BigReal, MpError, RealMatrix, MIN_PREC};

pub const DEFAULT_MAX_SWEEPS: usize = 64;

/// Real eigenvalues of a symmetric matrix, sorted ascending.
#[derive(Clone, Debug)]
pub struct EigenResult {
    pub eigenvalues: Vec<BigReal>,
    pub precision_used: u32,
    /// Frobenius norm of the off-diagonal part left after the last sweep.
    pub offdiag_residual: BigReal,
}

impl EigenResult {
    pub fn product(&self) -> BigReal {
        let prec = self.precision_used;
        let mut acc = Float::with_val(prec, 1);
        for v in &self.eigenvalues {
            acc *= &v.0;
        }
        BigReal::from(acc)
    }

    pub fn sum(&self) -> BigReal {
        let mut acc = Float::new(self.precision_used);
        for v in &self.eigenvalues {
            acc += &v.0;
        }
        BigReal::from(acc)
    }
}

/// Cyclic Jacobi eigenvalues of a symmetric matrix.
///
/// Rotations continue until every off-diagonal pair is negligible relative
/// to its diagonal entries; the result is then required to satisfy
/// `offdiag <= tol * ||A||_F`.
pub fn sym_eigenvalues(a: &RealMatrix, prec: u32, tol: &BigReal) -> Result<EigenResult, MpError> {
    jacobi(a, prec, tol, DEFAULT_MAX_SWEEPS)
}

fn jacobi(a: &RealMatrix, prec: u32, tol: &BigReal, max_sweeps: usize) -> Result<EigenResult, MpError> {
    if prec < MIN_PREC {
        return Err(MpError::PrecisionTooLow(prec));
    }
    if !a.is_symmetric() {
        return Err(MpError::NotSymmetric);
    }
    if tol.signum() <= 0 {
        return Err(MpError::BadTolerance);
    }
    let m = a.dim();
    let w = working_prec(prec, m);
    let mut s: Vec<Float> = a.entries().iter().map(|e| Float::with_val(w, &e.0)).collect();
    let norm = a.frobenius(w).0;

    // |a_pq| <= rot_eps * sqrt(|a_pp a_qq|) counts as converged.
    let rot_eps = Float::with_val(w, Float::i_exp(1, -(w as i32 - 8)));
    let rot_eps_sq = Float::with_val(w, rot_eps.square_ref());
    let floor = Float::with_val(w, &norm * &Float::with_val(w, Float::i_exp(1, -2 * w as i32)));

    let mut theta = Float::new(w);
    let mut t = Float::new(w);
    let mut c = Float::new(w);
    let mut sn = Float::new(w);
    let mut tau = Float::new(w);
    let mut t1 = Float::new(w);
    let mut t2 = Float::new(w);
    let big_theta = Float::with_val(w, Float::i_exp(1, w as i32));

    let mut converged = m == 1;
    let mut sweeps = 0;
    while !converged && sweeps < max_sweeps {
        sweeps += 1;
        let mut rotations = 0usize;
        for p in 0..m {
            for q in p + 1..m {
                let pq = p * m + q;
                if s[pq].is_zero() || s[pq].cmp_abs(&floor) != Some(Ordering::Greater) {
                    continue;
                }
                t1.assign(&s[p * m + p] * &s[q * m + q]);
                t1.abs_mut();
                t1 *= &rot_eps_sq;
                t2.assign(s[pq].square_ref());
                if t2 <= t1 {
                    continue;
                }
                rotations += 1;

                theta.assign(&s[q * m + q] - &s[p * m + p]);
                t1.assign(&s[pq] * 2u32);
                theta /= &t1;
                if theta.cmp_abs(&big_theta) == Some(Ordering::Greater) {
                    t.assign(&theta * 2u32);
                    t.recip_mut();
                } else {
                    t1.assign(theta.square_ref());
                    t1 += 1u32;
                    t1.sqrt_mut();
                    t2.assign(theta.abs_ref());
                    t1 += &t2;
                    t.assign(t1.recip_ref());
                    if theta.is_sign_negative() {
                        t = -t;
                    }
                }
                c.assign(t.square_ref());
                c += 1u32;
                c.sqrt_mut();
                c.recip_mut();
                sn.assign(&t * &c);
                t1.assign(&c + 1u32);
                tau.assign(&sn / &t1);

                t1.assign(&t * &s[pq]);
                s[p * m + p] -= &t1;
                s[q * m + q] += &t1;
                s[pq].assign(0u32);
                s[q * m + p].assign(0u32);

                for r in 0..m {
                    if r == p || r == q {
                        continue;
                    }
                    let (rp, rq) = (r * m + p, r * m + q);
                    // g = a_rp, h = a_rq
                    // a_rp <- g - s (h + g tau), a_rq <- h + s (g - h tau)
                    t1.assign(&s[rp] * &tau);
                    t1 += &s[rq];
                    t1 *= &sn;
                    t2.assign(&s[rq] * &tau);
                    t2 -= &s[rp];
                    t2 *= &sn;
                    s[rp] -= &t1;
                    s[rq] -= &t2;
                    let (vp, vq) = (s[rp].clone(), s[rq].clone());
                    s[p * m + r] = vp;
                    s[q * m + r] = vq;
                }
            }
        }
        converged = rotations == 0;
    }

    let mut off = Float::new(w);
    for p in 0..m {
        for q in p + 1..m {
            off += Float::with_val(w, s[p * m + q].square_ref());
        }
    }
    off *= 2u32;
    off.sqrt_mut();
    let residual = BigReal::from(Float::with_val(prec, &off));
    let bound = Float::with_val(w, &tol.0 * &norm);
    if !converged || off > bound {
        return Err(MpError::NoConvergence {
            sweeps,
            residual: residual.to_decimal_digits(6),
        });
    }

    let mut eigenvalues: Vec<BigReal> = (0..m)
        .map(|i| BigReal::from(Float::with_val(prec, &s[i * m + i])))
        .collect();
    eigenvalues.sort_by(BigReal::total_cmp);
    Ok(EigenResult {
        eigenvalues,
        precision_used: prec,
        offdiag_residual: residual,
    })
}

/// Knobs for [`adaptive_solve_with`].
#[derive(Clone, Debug)]
pub struct AdaptiveOptions {
    pub start_bits: u32,
    pub cap_bits: u32,
    /// Demand relative agreement for every eigenvalue, however small. When
    /// off, values below `10^-digits` are compared absolutely and values
    /// lying under the coarser run's resolution are flushed to exact zero.
    pub relative_only: bool,
    pub max_sweeps: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        AdaptiveOptions {
            start_bits: 256,
            cap_bits: 8192,
            relative_only: false,
            max_sweeps: DEFAULT_MAX_SWEEPS,
        }
    }
}

pub fn adaptive_solve(a: &RealMatrix, target_digits: u32) -> Result<EigenResult, MpError> {
    adaptive_solve_with(a, target_digits, &AdaptiveOptions::default())
}

/// Runs the Jacobi solver at doubling precision until two successive runs
/// agree on every eigenvalue to `target_digits`.
pub fn adaptive_solve_with(
    a: &RealMatrix,
    target_digits: u32,
    opts: &AdaptiveOptions,
) -> Result<EigenResult, MpError> {
    if target_digits < 10 {
        return Err(MpError::TargetTooLow(target_digits));
    }
    if !a.is_symmetric() {
        return Err(MpError::NotSymmetric);
    }
    let mut prec = opts.start_bits.max(MIN_PREC);
    let run = |prec: u32| {
        let tol = BigReal::from(Float::with_val(prec, Float::i_exp(1, -(prec as i32))));
        jacobi(a, prec, &tol, opts.max_sweeps)
    };

    let mut prev = run(prec)?;
    if prev.eigenvalues.iter().all(BigReal::is_zero) {
        return Ok(prev);
    }
    loop {
        let next_prec = prec.saturating_mul(2);
        if next_prec > opts.cap_bits {
            let last = run(opts.cap_bits.max(prec)).map(|r| r.eigenvalues).unwrap_or_default();
            return Err(MpError::PrecisionCap {
                cap: opts.cap_bits,
                previous: prev.eigenvalues,
                last,
            });
        }
        let mut cur = run(next_prec)?;
        if agree(&prev, &cur, target_digits, opts.relative_only) {
            if !opts.relative_only {
                flush_unresolved(a, &prev, &mut cur, prec);
            }
            return Ok(cur);
        }
        prev = cur;
        prec = next_prec;
    }
}

fn agree(lo: &EigenResult, hi: &EigenResult, digits: u32, relative_only: bool) -> bool {
    let p = hi.precision_used;
    let eps = ten_pow_neg(p, digits).0;
    lo.eigenvalues.iter().zip(&hi.eigenvalues).all(|(x, y)| {
        let diff = Float::with_val(p, &y.0 - &x.0).abs();
        let absolute = !relative_only && y.0.cmp_abs(&eps) == Some(Ordering::Less);
        if absolute {
            diff <= eps
        } else {
            let bound = Float::with_val(p, &y.0 * &eps).abs();
            diff <= bound
        }
    })
}

/// Eigenvalues sitting below the coarser run's resolution in both runs are
/// rounding noise around an exact zero.
fn flush_unresolved(a: &RealMatrix, lo: &EigenResult, hi: &mut EigenResult, lo_prec: u32) {
    let p = hi.precision_used;
    let norm = a.frobenius(p).0;
    let floor = Float::with_val(p, &norm * &Float::with_val(p, Float::i_exp(1, -(lo_prec as i32 - 16))));
    let mut changed = false;
    for (x, y) in lo.eigenvalues.iter().zip(hi.eigenvalues.iter_mut()) {
        if !y.is_zero()
            && y.0.cmp_abs(&floor) != Some(Ordering::Greater)
            && x.0.cmp_abs(&floor) != Some(Ordering::Greater)
        {
            *y = BigReal::zero(p);
            changed = true;
        }
    }
    if changed {
        hi.eigenvalues.sort_by(BigReal::total_cmp);
    }
}
