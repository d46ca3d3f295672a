//! Taylor coefficients from samples on a circle: trapezoidal rule applied to
//! the Cauchy integral `theta_k = (1 / 2 pi i) \oint f(z) / (z - s0)^(k+1) dz`.

use rug::float::Constant;
use rug::Float;

use super::CoeffError;
use crate::mpnum::{BigComplex, BigReal};

const MAX_DOUBLINGS: usize = 6;
const MAX_PREC_ROUNDS: usize = 4;

/// A function sampled on the ring; real on the real axis so that
/// `f(conj z) = conj f(z)`.
pub trait RingFunction: Sync {
    fn eval(&self, z: &BigComplex, prec: u32) -> Result<BigComplex, CoeffError>;
}

impl<F> RingFunction for F
where
    F: Fn(&BigComplex, u32) -> Result<BigComplex, CoeffError> + Sync,
{
    fn eval(&self, z: &BigComplex, prec: u32) -> Result<BigComplex, CoeffError> {
        self(z, prec)
    }
}

/// Samples on `nodes` equispaced points, of which only the upper half
/// (`j = 0..=nodes/2`) is evaluated.
struct Samples {
    nodes: usize,
    values: Vec<BigComplex>,
}

impl Samples {
    fn evaluate(
        f: &dyn RingFunction,
        center: &Float,
        radius: &Float,
        nodes: usize,
        prec: u32,
        reuse: Option<&Samples>,
    ) -> Result<Samples, CoeffError> {
        let half = nodes / 2;
        let two_pi = Float::with_val(prec, Constant::Pi) * 2u32;
        let mut values = Vec::with_capacity(half + 1);
        for j in 0..=half {
            if let Some(prev) = reuse {
                if j % 2 == 0 && prev.nodes * 2 == nodes {
                    values.push(prev.values[j / 2].clone());
                    continue;
                }
            }
            let angle = Float::with_val(prec, &two_pi * j as u32) / nodes as u32;
            let (sin, cos) = angle.sin_cos(Float::new(prec));
            let z = BigComplex {
                re: Float::with_val(prec, &cos * radius) + center,
                im: Float::with_val(prec, &sin * radius),
            };
            values.push(f.eval(&z, prec)?);
        }
        Ok(Samples { nodes, values })
    }

    fn max_abs(&self) -> Float {
        self.values
            .iter()
            .map(BigComplex::abs)
            .max_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal))
            .expect("at least one node")
    }

    /// `theta_0..=theta_n_max` at precision `prec`.
    fn coefficients(&self, radius: &Float, n_max: usize, prec: u32) -> Vec<Float> {
        let nq = self.nodes;
        let half = nq / 2;
        let two_pi = Float::with_val(prec, Constant::Pi) * 2u32;
        let table: Vec<(Float, Float)> = (0..nq)
            .map(|i| {
                let a = Float::with_val(prec, &two_pi * i as u32) / nq as u32;
                let (s, c) = a.sin_cos(Float::new(prec));
                (c, s)
            })
            .collect();
        let mut r_pow = Float::with_val(prec, 1);
        let mut out = Vec::with_capacity(n_max + 1);
        for k in 0..=n_max {
            let mut acc = Float::new(prec);
            for (j, v) in self.values.iter().enumerate().skip(1).take(half - 1) {
                let (c, s) = &table[(j * k) % nq];
                // Re(f_j e^{-i phi}) counted for j and nq - j
                acc += Float::with_val(prec, &v.re * c);
                acc += Float::with_val(prec, &v.im * s);
            }
            acc *= 2u32;
            acc += &self.values[0].re;
            if k % 2 == 0 {
                acc += &self.values[half].re;
            } else {
                acc -= &self.values[half].re;
            }
            acc /= nq as u32;
            acc /= &r_pow;
            out.push(acc);
            r_pow *= radius;
        }
        out
    }
}

/// Extracts `theta_0..=theta_n_max` of `f` around the real point `center`.
///
/// Node count starts at `8 (n_max + 1)` and doubles until every coefficient
/// agrees with the previous level to `prec / 2` bits. Working precision is
/// raised until the cancellation in the ring sum (`max|f| / r^k` against
/// `|theta_k|`) is covered with 64 guard bits.
pub fn ring_coefficients(
    f: &dyn RingFunction,
    center: &BigReal,
    radius: &BigReal,
    n_max: usize,
    prec: u32,
) -> Result<Vec<BigReal>, CoeffError> {
    let mut w = prec + 64;
    let nq0 = 8 * (n_max + 1);
    let log2_r = radius.as_float().clone().log2().to_f64();

    let mut samples;
    let mut coeffs;
    let mut rounds = 0;
    loop {
        let c = Float::with_val(w, center.as_float());
        let r = Float::with_val(w, radius.as_float());
        samples = Samples::evaluate(f, &c, &r, nq0, w, None)?;
        coeffs = samples.coefficients(&r, n_max, w);
        let m_log2 = log2_of(&samples.max_abs());
        let loss = coeffs
            .iter()
            .enumerate()
            .filter(|(_, t)| !t.is_zero())
            .map(|(k, t)| m_log2 - log2_of(t) - k as f64 * log2_r)
            .fold(0.0f64, f64::max);
        let needed = prec + 64 + loss.max(0.0).ceil() as u32;
        rounds += 1;
        if needed <= w || rounds >= MAX_PREC_ROUNDS {
            break;
        }
        w = needed;
    }

    let r = Float::with_val(w, radius.as_float());
    let c = Float::with_val(w, center.as_float());
    let half_bits = Float::with_val(w, Float::i_exp(1, -(prec as i32 / 2)));
    let mut nodes = nq0;
    for _ in 0..MAX_DOUBLINGS {
        nodes *= 2;
        let finer = Samples::evaluate(f, &c, &r, nodes, w, Some(&samples))?;
        let next = finer.coefficients(&r, n_max, w);
        let m = finer.max_abs();
        let mut first_bad = None;
        let mut r_pow = Float::with_val(w, 1);
        for (k, (a, b)) in coeffs.iter().zip(&next).enumerate() {
            let diff = Float::with_val(w, a - b).abs();
            let rel = Float::with_val(w, b * &half_bits).abs();
            // rounding floor of the ring sum for this index
            let floor = Float::with_val(w, &m / &r_pow) * Float::with_val(w, Float::i_exp(1, 16 - w as i32));
            if diff > rel && diff > floor {
                first_bad = Some(k);
                break;
            }
            r_pow *= &r;
        }
        samples = finer;
        coeffs = next;
        match first_bad {
            None => {
                return Ok(coeffs
                    .into_iter()
                    .map(|t| BigReal::from(Float::with_val(prec, t)))
                    .collect())
            }
            Some(_) if nodes >= nq0 << MAX_DOUBLINGS => {
                return Err(CoeffError::QuadratureNonConvergence {
                    index: first_bad.unwrap_or(0),
                    nodes,
                })
            }
            Some(_) => {}
        }
    }
    unreachable!("loop returns on the last doubling")
}

fn log2_of(x: &Float) -> f64 {
    let (m, e) = x.to_f64_exp();
    m.abs().log2() + e as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_series_on_half_radius() {
        let f = |z: &BigComplex, p: u32| -> Result<BigComplex, CoeffError> {
            Ok(BigComplex::one(p).sub(z).recip())
        };
        let theta = ring_coefficients(&f, &BigReal::zero(256), &BigReal::from_f64(256, 0.5), 16, 256).unwrap();
        for t in &theta {
            assert!((t.to_f64() - 1.0).abs() < 1e-40);
        }
    }

    #[test]
    fn exp_coefficients_are_reciprocal_factorials() {
        let f = |z: &BigComplex, _p: u32| -> Result<BigComplex, CoeffError> { Ok(z.exp()) };
        let theta = ring_coefficients(&f, &BigReal::zero(200), &BigReal::one(200), 20, 200).unwrap();
        let mut fact = Float::with_val(200, 1);
        for (k, t) in theta.iter().enumerate() {
            if k > 0 {
                fact *= k as u32;
            }
            let expect = Float::with_val(200, fact.recip_ref());
            let rel = Float::with_val(200, t.as_float() - &expect).abs() / &expect;
            assert!(rel.to_f64() < 1e-50, "k = {k}");
        }
    }
}
