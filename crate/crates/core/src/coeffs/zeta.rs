//! Riemann zeta by Euler–Maclaurin summation, with the functional equation
//! for the left half-plane and the pole-removed variants used as expansion
//! subjects.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use rug::float::Constant;
use rug::Float;

use super::bernoulli::{em_coefficients, stirling_coefficients};
use super::CoeffError;
use crate::mpnum::BigComplex;

/// How the pole of zeta at `s = 1` is removed before expansion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PoleRemoval {
    /// `(s - 1) * zeta(s)`.
    Linear,
    /// `(1 - 2^(1-s)) * zeta(s)`, the alternating (eta) series.
    Eta,
    /// Plain `zeta(s)`.
    None,
}

impl PoleRemoval {
    pub fn parse(tag: &str) -> Option<Self> {
        match tag {
            "s-1" | "(s-1)" | "linear" => Some(PoleRemoval::Linear),
            "eta" | "1-2^(1-s)" => Some(PoleRemoval::Eta),
            "none" => Some(PoleRemoval::None),
            _ => None,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            PoleRemoval::Linear => "s-1",
            PoleRemoval::Eta => "eta",
            PoleRemoval::None => "none",
        }
    }

    pub fn is_entire(self) -> bool {
        !matches!(self, PoleRemoval::None)
    }
}

/// Riemann zeta at `s` with absolute error at most `2^-prec` for moderate
/// `|s|`.
pub fn zeta_em(s: &BigComplex, prec: u32) -> Result<BigComplex, CoeffError> {
    zeta_variant(s, prec, PoleRemoval::None)
}

/// `zeta(s)` multiplied by the pole-removal factor, evaluated so that the
/// removable singularity at `s = 1` causes no cancellation.
pub fn zeta_variant(s: &BigComplex, prec: u32, removal: PoleRemoval) -> Result<BigComplex, CoeffError> {
    let w = prec + 32;
    let s = s.with_prec(w);
    let one = Float::with_val(w, 1);
    let at_one = s.is_real() && s.re == one;
    if at_one {
        return match removal {
            PoleRemoval::None => Err(CoeffError::Pole),
            PoleRemoval::Linear => Ok(BigComplex::one(prec)),
            PoleRemoval::Eta => Ok(BigComplex::from_real(prec, &Float::with_val(prec, Constant::Log2))),
        };
    }

    let quarter = Float::with_val(w, 0.25);
    let use_reflection = s.re.is_sign_negative() && !s.re.is_zero() && s.abs() > quarter;
    let value = if use_reflection {
        let z = reflected_zeta(&s, w)?;
        apply_factor(&s, z, removal, w)
    } else {
        let (finite, u) = em_parts(&s, w);
        let sm1 = s.add_real(&Float::with_val(w, -1));
        match removal {
            // zeta = F + u/(s-1)
            PoleRemoval::None => finite.add(&u.div(&sm1)),
            PoleRemoval::Linear => sm1.mul(&finite).add(&u),
            PoleRemoval::Eta => {
                let factor = eta_factor(&s, w);
                let z = finite.add(&u.div(&sm1));
                factor.mul(&z)
            }
        }
    };
    Ok(value.with_prec(prec))
}

fn apply_factor(s: &BigComplex, z: BigComplex, removal: PoleRemoval, w: u32) -> BigComplex {
    match removal {
        PoleRemoval::None => z,
        PoleRemoval::Linear => s.add_real(&Float::with_val(w, -1)).mul(&z),
        PoleRemoval::Eta => eta_factor(s, w).mul(&z),
    }
}

/// `1 - 2^(1-s)`.
fn eta_factor(s: &BigComplex, w: u32) -> BigComplex {
    let ln2 = Float::with_val(w, Constant::Log2);
    let one_minus_s = BigComplex::one(w).sub(s);
    BigComplex::one(w).sub(&one_minus_s.exp_scaled(&ln2))
}

/// `zeta(s) = 2^s pi^(s-1) sin(pi s / 2) Gamma(1-s) zeta(1-s)`.
fn reflected_zeta(s: &BigComplex, w: u32) -> Result<BigComplex, CoeffError> {
    let w2 = w + 16;
    let s = s.with_prec(w2);
    let pi = Float::with_val(w2, Constant::Pi);
    let ln2 = Float::with_val(w2, Constant::Log2);
    let ln_pi = Float::with_val(w2, pi.ln_ref());
    let one_minus_s = BigComplex::one(w2).sub(&s);

    let two_s = s.exp_scaled(&ln2);
    let pi_s1 = s.add_real(&Float::with_val(w2, -1)).exp_scaled(&ln_pi);
    let half_pi = Float::with_val(w2, &pi / 2u32);
    let sine = s.scale(&half_pi).sin();
    let gamma = gamma(&one_minus_s, w2);
    let (finite, u) = em_parts(&one_minus_s, w2);
    let z1 = finite.add(&u.div(&s.neg()));
    Ok(two_s.mul(&pi_s1).mul(&sine).mul(&gamma).mul(&z1).with_prec(w))
}

fn ln_table(n: usize, prec: u32) -> Vec<Float> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Vec<Float>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    {
        let guard = cache.lock().expect("log cache poisoned");
        if let Some(v) = guard.get(&prec) {
            if v.len() > n {
                return v[..=n].to_vec();
            }
        }
    }
    let len = (n + 1).max(64);
    let table: Vec<Float> = (0..len)
        .map(|k| {
            if k == 0 {
                Float::new(prec)
            } else {
                Float::with_val(prec, Float::ln_u(k as u32))
            }
        })
        .collect();
    let mut guard = cache.lock().expect("log cache poisoned");
    let v = guard.entry(prec).or_default();
    if v.len() < table.len() {
        *v = table;
    }
    v[..=n].to_vec()
}

/// Splits Euler–Maclaurin into `zeta(s) = F + u / (s - 1)` with
/// `u = N^(1-s)`; `F` is entire in `s`.
fn em_parts(s: &BigComplex, prec: u32) -> (BigComplex, BigComplex) {
    let abs_s = s.abs().to_f64();
    let sigma = s.re.to_f64();
    let mut n_terms = (((prec + 20) as f64 * std::f64::consts::LN_2) / (2.0 * std::f64::consts::PI)).ceil() as usize
        + abs_s.ceil() as usize
        + 2;
    loop {
        // n^-s grows like N^|sigma| for sigma < 0
        let extra = if sigma < 0.0 {
            ((-sigma) * (n_terms as f64).log2()).ceil() as u32
        } else {
            0
        };
        let w = prec + 16 + extra;
        if let Some(parts) = em_parts_at(s, w, prec, n_terms) {
            return parts;
        }
        n_terms += n_terms / 4 + 1;
    }
}

fn em_parts_at(s: &BigComplex, w: u32, prec: u32, n: usize) -> Option<(BigComplex, BigComplex)> {
    let s = s.with_prec(w);
    let logs = ln_table(n, w);
    let neg_s = s.neg();
    let mut sum = BigComplex::zero(w);
    for ln_k in logs.iter().take(n).skip(1) {
        sum = sum.add(&neg_s.exp_scaled(ln_k));
    }
    // u = N^(1-s), N^-s = u / N
    let ln_n = &logs[n];
    let u = BigComplex::one(w).sub(&s).exp_scaled(ln_n);
    let n_f = Float::with_val(w, n as u32);
    let n_pow_neg_s = u.scale(&Float::with_val(w, n_f.recip_ref()));
    let half = Float::with_val(w, 0.5);
    sum = sum.add(&n_pow_neg_s.scale(&half));

    let eps = Float::with_val(w, Float::i_exp(1, -(prec as i32) - 12));
    let inv_n2 = Float::with_val(w, n_f.square_ref()).recip();
    let max_k = 4 * n + 16;
    let coeffs = em_coefficients(max_k, w);
    let mut wk = s.scale(&inv_n2);
    let mut tail = BigComplex::zero(w);
    let mut prev_mag: Option<Float> = None;
    for k in 1..=max_k {
        let term = wk.scale(&coeffs[k - 1]);
        let mag = term.abs();
        // the asymptotic series diverges once terms start growing
        if let Some(p) = &prev_mag {
            if mag > *p && mag > eps {
                return None;
            }
        }
        tail = tail.add(&term);
        let u_mag = Float::with_val(w, &mag * &u.abs());
        if u_mag < eps {
            let f = sum.add(&u.mul(&tail));
            return Some((f, u));
        }
        prev_mag = Some(mag);
        let a = s.add_real(&Float::with_val(w, 2 * k as u32 - 1));
        let b = s.add_real(&Float::with_val(w, 2 * k as u32));
        wk = wk.mul(&a).mul(&b).scale(&inv_n2);
    }
    None
}

/// Complex Gamma via the Stirling series after shifting the argument to
/// `Re z >= 0.12 * prec`.
pub fn gamma(z: &BigComplex, prec: u32) -> BigComplex {
    let w = prec + 32;
    let z = z.with_prec(w);
    let target = 0.12 * (w as f64) + 10.0;
    let shift = (target - z.re.to_f64()).ceil().max(0.0) as usize;
    let mut prod = BigComplex::one(w);
    for j in 0..shift {
        prod = prod.mul(&z.add_real(&Float::with_val(w, j as u32)));
    }
    let zs = z.add_real(&Float::with_val(w, shift as u32));

    // (z - 1/2) ln z - z + ln(2 pi)/2 + sum B_2k / (2k(2k-1) z^(2k-1))
    let ln_z = zs.ln();
    let half = Float::with_val(w, 0.5);
    let mut lg = zs.add_real(&-half).mul(&ln_z).sub(&zs);
    let two_pi = Float::with_val(w, Constant::Pi) * 2u32;
    let half_ln_2pi = two_pi.ln() / 2u32;
    lg = lg.add_real(&half_ln_2pi);

    let inv = zs.recip();
    let inv2 = inv.mul(&inv);
    let eps = Float::with_val(w, Float::i_exp(1, -(w as i32)));
    let max_k = w as usize;
    let coeffs = stirling_coefficients(max_k, w);
    let mut pw = inv;
    for c in coeffs.iter() {
        let term = pw.scale(c);
        let mag = term.abs();
        lg = lg.add(&term);
        if mag < eps {
            break;
        }
        pw = pw.mul(&inv2);
    }
    lg.exp().div(&prod).with_prec(prec)
}
