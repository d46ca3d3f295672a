//! Taylor coefficient streams `theta_0, theta_1, ...` for the functions whose
//! Hankel spectra are studied: closed-form families and analytic generators
//! expanded by ring quadrature.

mod bernoulli;
pub(crate) mod cache;
mod quadrature;
mod zeta;

pub use bernoulli::bernoulli_even;
pub use cache::CoeffCache;
pub use quadrature::{ring_coefficients, RingFunction};
pub use zeta::{gamma, zeta_em, zeta_variant, PoleRemoval};

use std::fmt;
use std::str::FromStr;

use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::mpnum::{BigComplex, BigReal, MpError, MIN_PREC};

#[derive(Debug, Error)]
pub enum CoeffError {
    #[error("zeta has a pole at s = 1")]
    Pole,
    #[error("unknown generator {0:?}")]
    UnknownGenerator(String),
    #[error("invalid function spec: {0}")]
    InvalidSpec(String),
    #[error("ring quadrature did not converge at index {index} with {nodes} nodes")]
    QuadratureNonConvergence { index: usize, nodes: usize },
    #[error("theta_{k} requested but the stream stops at {max}; extend the stream first")]
    IndexBeyond { k: i64, max: usize },
    #[error("cached coefficient theta_{k} disagrees with recomputation: {detail}")]
    CacheCorruption { k: usize, detail: String },
    #[error("precision {0} bits is below the minimum of 64")]
    PrecisionTooLow(u32),
    #[error(transparent)]
    Mp(#[from] MpError),
    #[error("cache I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("cache format: {0}")]
    Json(#[from] serde_json::Error),
}

/// Closed-form coefficient families. Parameters are kept as exact decimal
/// or fraction strings so specs hash and serialize stably.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Builtin {
    /// `theta_k = r^k`
    Geometric { r: String },
    /// `theta_k = 1 / k!`
    Exponential,
    /// `theta_k = (a^(k+1) - b^(k+1)) / (a - b)`, i.e. `1 / ((1 - a z)(1 - b z))`
    Rational2 { a: String, b: String },
    /// Catalan numbers.
    Catalan,
    /// Explicit user-supplied values.
    UserMoments { values: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalyticSpec {
    pub generator: String,
    /// Real and imaginary part of the expansion point.
    pub expansion_point: (String, String),
    pub pole_removal: String,
    pub ring_radius: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SpecKind {
    Builtin(Builtin),
    Analytic(AnalyticSpec),
}

/// Named description of the function whose coefficients form a stream.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionSpec {
    pub name: String,
    #[serde(flatten)]
    pub kind: SpecKind,
}

pub const ZETA_STAR: &str = "zeta-star";
pub const ONE_OVER_ONE_MINUS_Z: &str = "one-over-one-minus-z";
pub const EXP_Z: &str = "exp-z";

impl FunctionSpec {
    pub fn builtin(name: &str, b: Builtin) -> Self {
        FunctionSpec {
            name: name.to_string(),
            kind: SpecKind::Builtin(b),
        }
    }

    pub fn geometric(r: &str) -> Self {
        Self::builtin(&format!("geometric:{r}"), Builtin::Geometric { r: r.to_string() })
    }

    pub fn exponential() -> Self {
        Self::builtin("exponential", Builtin::Exponential)
    }

    pub fn rational2(a: &str, b: &str) -> Self {
        Self::builtin(
            &format!("rational2:{a},{b}"),
            Builtin::Rational2 {
                a: a.to_string(),
                b: b.to_string(),
            },
        )
    }

    pub fn catalan() -> Self {
        Self::builtin("catalan", Builtin::Catalan)
    }

    pub fn user_moments(values: &[&str]) -> Self {
        Self::builtin(
            &format!("moments:{}", values.join(",")),
            Builtin::UserMoments {
                values: values.iter().map(|s| s.to_string()).collect(),
            },
        )
    }

    /// The default zeta-derived subject: `(s - 1) zeta(s)` expanded at
    /// `s0 = 0` on the unit ring. This is a stand-in until the intended
    /// expansion is supplied through configuration.
    pub fn zeta_star_placeholder() -> Self {
        Self::analytic(ZETA_STAR, ("0", "0"), "s-1", "1")
    }

    pub fn analytic(generator: &str, s0: (&str, &str), pole_removal: &str, radius: &str) -> Self {
        FunctionSpec {
            name: generator.to_string(),
            kind: SpecKind::Analytic(AnalyticSpec {
                generator: generator.to_string(),
                expansion_point: (s0.0.to_string(), s0.1.to_string()),
                pole_removal: pole_removal.to_string(),
                ring_radius: radius.to_string(),
            }),
        }
    }

    pub fn is_analytic(&self) -> bool {
        matches!(self.kind, SpecKind::Analytic(_))
    }

    /// Stable content hash (hex, 16 chars) used to key the on-disk cache.
    pub fn hash(&self) -> String {
        let canon = serde_json::to_string(self).expect("spec serializes");
        let digest = Sha256::digest(canon.as_bytes());
        hex::encode(&digest[..8])
    }

    pub fn provenance(&self) -> String {
        match &self.kind {
            SpecKind::Builtin(_) => format!("closed form: {}", self.name),
            SpecKind::Analytic(a) => {
                let base = format!(
                    "ring quadrature of {} (pole removal {}) at s0 = {}{:+}i, r = {}",
                    a.generator, a.pole_removal, a.expansion_point.0, a.expansion_point.1.parse::<f64>().unwrap_or(0.0), a.ring_radius
                );
                if *self == Self::zeta_star_placeholder() {
                    format!("PLACEHOLDER: {base}; intended zeta-star expansion not yet configured")
                } else {
                    base
                }
            }
        }
    }

    /// Checks parameters without generating anything.
    pub fn validate(&self) -> Result<(), CoeffError> {
        match &self.kind {
            SpecKind::Builtin(b) => match b {
                Builtin::Geometric { r } => parse_exact(r).map(drop),
                Builtin::Rational2 { a, b } => parse_exact(a).and(parse_exact(b)).map(drop),
                Builtin::UserMoments { values } => values.iter().try_for_each(|v| parse_exact(v).map(drop)),
                Builtin::Exponential | Builtin::Catalan => Ok(()),
            },
            SpecKind::Analytic(a) => {
                let g = Generator::resolve(a)?;
                let s0_re = parse_exact(&a.expansion_point.0)?;
                let s0_im = parse_exact(&a.expansion_point.1)?;
                if s0_im != 0 {
                    return Err(CoeffError::InvalidSpec(
                        "expansion point must be real for real coefficients".into(),
                    ));
                }
                let r = parse_exact(&a.ring_radius)?;
                if r <= 0 {
                    return Err(CoeffError::InvalidSpec("ring radius must be positive".into()));
                }
                if let Some(disc) = g.analyticity_radius(&s0_re) {
                    if r >= disc {
                        return Err(CoeffError::InvalidSpec(format!(
                            "ring radius {} is not inside the analyticity disc of radius {}",
                            a.ring_radius,
                            disc.to_f64()
                        )));
                    }
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Parses the command-line shorthand: `geometric:R`, `exponential`,
/// `rational2:A,B`, `catalan`, `moments:v0,v1,...`, `zeta-star[:s0=..,r=..,pole=..]`,
/// `one-over-one-minus-z[:r=..]`, `exp-z[:r=..]`.
impl FromStr for FunctionSpec {
    type Err = CoeffError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (head, args) = match s.split_once(':') {
            Some((h, a)) => (h.trim(), Some(a.trim())),
            None => (s.trim(), None),
        };
        let need = |what: &str| CoeffError::InvalidSpec(format!("{head} needs {what}"));
        let spec = match head {
            "geometric" => FunctionSpec::geometric(args.ok_or_else(|| need("a ratio"))?),
            "exponential" => FunctionSpec::exponential(),
            "catalan" => FunctionSpec::catalan(),
            "rational2" => {
                let (a, b) = args
                    .and_then(|a| a.split_once(','))
                    .ok_or_else(|| need("two parameters a,b"))?;
                FunctionSpec::rational2(a.trim(), b.trim())
            }
            "moments" | "user-moments" => {
                let vals: Vec<&str> = args
                    .ok_or_else(|| need("a value list"))?
                    .split(',')
                    .map(str::trim)
                    .collect();
                FunctionSpec::user_moments(&vals)
            }
            ZETA_STAR | ONE_OVER_ONE_MINUS_Z | EXP_Z | "zeta" => {
                let (generator, mut s0, mut pole, mut r) = match head {
                    ZETA_STAR => (ZETA_STAR, "0", "s-1", "1"),
                    "zeta" => (ZETA_STAR, "0", "none", "0.5"),
                    ONE_OVER_ONE_MINUS_Z => (ONE_OVER_ONE_MINUS_Z, "0", "none", "0.5"),
                    _ => (EXP_Z, "0", "none", "1"),
                };
                let mut s0_im = "0";
                if let Some(args) = args {
                    for kv in args.split(',').filter(|x| !x.trim().is_empty()) {
                        let (k, v) = kv
                            .split_once('=')
                            .ok_or_else(|| CoeffError::InvalidSpec(format!("expected key=value, got {kv:?}")))?;
                        match k.trim() {
                            "s0" => s0 = v.trim(),
                            "s0im" => s0_im = v.trim(),
                            "r" => r = v.trim(),
                            "pole" => pole = v.trim(),
                            other => return Err(CoeffError::InvalidSpec(format!("unknown key {other:?}"))),
                        }
                    }
                }
                let mut spec = FunctionSpec::analytic(generator, (s0, s0_im), pole, r);
                if spec != FunctionSpec::zeta_star_placeholder() || head != ZETA_STAR {
                    spec.name = s.trim().to_string();
                }
                spec
            }
            other => return Err(CoeffError::UnknownGenerator(other.to_string())),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Exact rational from an integer, fraction (`p/q`) or decimal string
/// (`-1.25`, `3e-2`).
pub fn parse_exact(s: &str) -> Result<Rational, CoeffError> {
    let s = s.trim();
    let bad = || CoeffError::InvalidSpec(format!("not a finite number: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: Integer = p.trim().parse().map_err(|_| bad())?;
        let q: Integer = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        return Ok(Rational::from((p, q)));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: Integer = format!("{int_part}{frac_part}0").parse::<Integer>().map_err(|_| bad())? / 10u32;
    let scale = exp - frac_part.len() as i32;
        let mut q = Rational::from(digits);
    if scale >= 0 {
        q *= Integer::from(Integer::u_pow_u(10, scale as u32));
    } else {
        q /= Integer::from(Integer::u_pow_u(10, (-scale) as u32));
    }
    Ok(if neg { -q } else { q })
}

enum Generator {
    Zeta(PoleRemoval),
    OneOverOneMinusZ,
    ExpZ,
}

impl Generator {
    fn resolve(a: &AnalyticSpec) -> Result<Self, CoeffError> {
        match a.generator.as_str() {
            ZETA_STAR => PoleRemoval::parse(&a.pole_removal)
                .map(Generator::Zeta)
                .ok_or_else(|| CoeffError::InvalidSpec(format!("unknown pole removal {:?}", a.pole_removal))),
            ONE_OVER_ONE_MINUS_Z => Ok(Generator::OneOverOneMinusZ),
            EXP_Z => Ok(Generator::ExpZ),
            other => Err(CoeffError::UnknownGenerator(other.to_string())),
        }
    }

    /// Radius of the largest disc around `s0` on which the generator is
    /// analytic; `None` for entire functions.
    fn analyticity_radius(&self, s0: &Rational) -> Option<Rational> {
        match self {
            Generator::Zeta(p) if p.is_entire() => None,
            Generator::Zeta(_) | Generator::OneOverOneMinusZ => Some(Rational::from(s0 - 1u32).abs()),
            Generator::ExpZ => None,
        }
    }

    fn eval(&self, z: &BigComplex, prec: u32) -> Result<BigComplex, CoeffError> {
        match self {
            Generator::Zeta(p) => zeta_variant(z, prec, *p),
            Generator::OneOverOneMinusZ => Ok(BigComplex::one(prec).sub(z).recip()),
            Generator::ExpZ => Ok(z.exp()),
        }
    }
}

/// Indexed coefficients `theta_0..=theta_N` of one function.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffStream {
    pub spec: FunctionSpec,
    values: Vec<BigReal>,
    pub precision_bits: u32,
    pub provenance: String,
}

impl CoeffStream {
    pub fn from_values(spec: FunctionSpec, values: Vec<BigReal>, precision_bits: u32, provenance: String) -> Self {
        CoeffStream {
            spec,
            values,
            precision_bits,
            provenance,
        }
    }

    pub fn max_index(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[BigReal] {
        &self.values
    }

    /// `theta_k`, with `theta_k = 0` exactly for every `k < 0`.
    pub fn theta(&self, k: i64) -> Result<BigReal, CoeffError> {
        if k < 0 {
            return Ok(BigReal::zero(self.precision_bits));
        }
        self.values
            .get(k as usize)
            .cloned()
            .ok_or(CoeffError::IndexBeyond {
                k,
                max: self.max_index(),
            })
    }

    fn truncated(mut self, n: usize) -> Self {
        self.values.truncate(n + 1);
        self
    }
}

/// Generates `theta_0..=theta_n` at `prec` bits.
pub fn generate(spec: &FunctionSpec, n: usize, prec: u32) -> Result<CoeffStream, CoeffError> {
    if prec < MIN_PREC {
        return Err(CoeffError::PrecisionTooLow(prec));
    }
    spec.validate()?;
    let values = match &spec.kind {
        SpecKind::Builtin(b) => builtin_values(b, n, prec)?,
        SpecKind::Analytic(a) => analytic_values(a, n, prec)?,
    };
    Ok(CoeffStream {
        spec: spec.clone(),
        values,
        precision_bits: prec,
        provenance: spec.provenance(),
    })
}

/// [`generate`] through an optional on-disk cache.
pub fn generate_cached(
    spec: &FunctionSpec,
    n: usize,
    prec: u32,
    cache: Option<&CoeffCache>,
) -> Result<CoeffStream, CoeffError> {
    if let Some(c) = cache {
        if let Some(stream) = c.load(spec, prec)? {
            if stream.max_index() >= n {
                return Ok(stream.truncated(n));
            }
            return extend(&stream, n, prec, Some(c));
        }
    }
    let stream = generate(spec, n, prec)?;
    if let Some(c) = cache {
        c.store(&stream)?;
    }
    Ok(stream)
}

/// Regenerates `stream` to cover `new_n` at `prec`, re-verifying every index
/// it already had.
pub fn extend(stream: &CoeffStream, new_n: usize, prec: u32, cache: Option<&CoeffCache>) -> Result<CoeffStream, CoeffError> {
    let prec = prec.max(stream.precision_bits);
    let new_n = new_n.max(stream.max_index());
    let fresh = generate(&stream.spec, new_n, prec)?;
    let common = stream.precision_bits.min(prec);
    // closed forms are correctly rounded; quadrature is validated to half precision
    let bits = if stream.spec.is_analytic() { common / 2 } else { common - 2 };
    let tol = BigReal::from(Float::with_val(prec, Float::i_exp(1, -(bits as i32))));
    for (k, (old, new)) in stream.values.iter().zip(&fresh.values).enumerate() {
        let agree = if new.is_zero() {
            old.is_zero()
        } else {
            old.rel_close(new, &tol)
        };
        if !agree {
            return Err(CoeffError::CacheCorruption {
                k,
                detail: format!("had {}, recomputed {}", old.to_decimal_digits(20), new.to_decimal_digits(20)),
            });
        }
    }
    if let Some(c) = cache {
        c.store(&fresh)?;
    }
    Ok(fresh)
}

fn builtin_values(b: &Builtin, n: usize, prec: u32) -> Result<Vec<BigReal>, CoeffError> {
    let round = |q: &Rational| BigReal::from(Float::with_val(prec, q));
    Ok(match b {
        Builtin::Geometric { r } => {
            let r = parse_exact(r)?;
            let mut p = Rational::from(1);
            (0..=n)
                .map(|_| {
                    let v = round(&p);
                    p *= &r;
                    v
                })
                .collect()
        }
        Builtin::Exponential => {
            let mut fact = Integer::from(1);
            (0..=n)
                .map(|k| {
                    if k > 0 {
                        fact *= k as u32;
                    }
                    round(&Rational::from((Integer::from(1), fact.clone())))
                })
                .collect()
        }
        Builtin::Rational2 { a, b } => {
            let a = parse_exact(a)?;
            let b = parse_exact(b)?;
            // theta_k = sum_{i=0}^k a^i b^(k-i), which also covers a == b
            let mut a_pow = vec![Rational::from(1)];
            let mut b_pow = vec![Rational::from(1)];
            for _ in 0..n {
                a_pow.push(Rational::from(a_pow.last().unwrap() * &a));
                b_pow.push(Rational::from(b_pow.last().unwrap() * &b));
            }
            (0..=n)
                .map(|k| {
                    let mut acc = Rational::new();
                    for i in 0..=k {
                        acc += Rational::from(&a_pow[i] * &b_pow[k - i]);
                    }
                    round(&acc)
                })
                .collect()
        }
        Builtin::Catalan => (0..=n)
            .map(|k| {
                let c = Integer::from(Integer::binomial_u(2 * k as u32, k as u32)) / (k as u32 + 1);
                round(&Rational::from(c))
            })
            .collect(),
        Builtin::UserMoments { values } => {
            if values.len() <= n {
                return Err(CoeffError::IndexBeyond {
                    k: n as i64,
                    max: values.len().saturating_sub(1),
                });
            }
            values[..=n]
                .iter()
                .map(|v| parse_exact(v).map(|q| round(&q)))
                .collect::<Result<_, _>>()?
        }
    })
}

fn analytic_values(a: &AnalyticSpec, n: usize, prec: u32) -> Result<Vec<BigReal>, CoeffError> {
    let g = Generator::resolve(a)?;
    let w = prec + 64;
    let s0 = BigReal::from(Float::with_val(w, &parse_exact(&a.expansion_point.0)?));
    let r = BigReal::from(Float::with_val(w, &parse_exact(&a.ring_radius)?));
    let f = move |z: &BigComplex, p: u32| g.eval(z, p);
    ring_coefficients(&f, &s0, &r, n, prec)
}
