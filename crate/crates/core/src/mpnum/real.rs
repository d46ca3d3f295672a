use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::float::Constant;
use rug::Float;

use super::MpError;

/// Smallest precision any [`BigReal`] is allowed to carry.
pub const MIN_PREC: u32 = 64;

/// Arbitrary-precision binary floating-point value with an explicit
/// precision in bits.
///
/// Backed by MPFR through `rug`; the exponent range is the MPFR default of
/// roughly `±2^30`, so magnitudes like `e^(±10^8)` stay representable.
#[derive(Clone, PartialEq, PartialOrd)]
#[repr(transparent)]
pub struct BigReal(pub(crate) Float);

impl BigReal {
    pub fn zero(prec: u32) -> Self {
        BigReal(Float::new(clamp(prec)))
    }

    pub fn one(prec: u32) -> Self {
        BigReal(Float::with_val(clamp(prec), 1))
    }

    pub fn from_i64(prec: u32, v: i64) -> Self {
        BigReal(Float::with_val(clamp(prec), v))
    }

    pub fn from_f64(prec: u32, v: f64) -> Self {
        BigReal(Float::with_val(clamp(prec), v))
    }

    /// Exact ratio `num/den` rounded to `prec` bits.
    pub fn from_ratio(prec: u32, num: i64, den: i64) -> Self {
        let r = rug::Rational::from((num, den));
        BigReal(Float::with_val(clamp(prec), &r))
    }

    pub fn pi(prec: u32) -> Self {
        BigReal(Float::with_val(clamp(prec), Constant::Pi))
    }

    /// Parses a decimal string (as produced by [`BigReal::to_decimal`]).
    pub fn parse(s: &str, prec: u32) -> Result<Self, MpError> {
        let parsed = Float::parse(s.trim()).map_err(|e| MpError::Parse {
            input: s.to_string(),
            reason: e.to_string(),
        })?;
        Ok(BigReal(Float::with_val(clamp(prec), parsed)))
    }

    pub fn prec(&self) -> u32 {
        self.0.prec()
    }

    pub fn as_float(&self) -> &Float {
        &self.0
    }

    pub fn into_float(self) -> Float {
        self.0
    }

    /// Same value rounded to a new precision.
    pub fn with_prec(&self, prec: u32) -> Self {
        BigReal(Float::with_val(clamp(prec), &self.0))
    }

    /// Shortest decimal string that reads back to the identical value at the
    /// same precision.
    pub fn to_decimal(&self) -> String {
        self.0.to_string_radix(10, None)
    }

    /// Decimal string rounded to `digits` significant digits.
    pub fn to_decimal_digits(&self, digits: usize) -> String {
        self.0.to_string_radix(10, Some(digits.max(1)))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    /// `-1`, `0` or `+1`.
    pub fn signum(&self) -> i8 {
        if self.0.is_zero() {
            0
        } else if self.0.is_sign_negative() {
            -1
        } else {
            1
        }
    }

    pub fn abs(&self) -> Self {
        BigReal(self.0.clone().abs())
    }

    /// `ln|x|`; `-inf` for zero.
    pub fn ln_abs(&self) -> Self {
        BigReal(self.0.clone().abs().ln())
    }

    pub fn exp(&self) -> Self {
        BigReal(self.0.clone().exp())
    }

    pub fn sqrt(&self) -> Self {
        BigReal(self.0.clone().sqrt())
    }

    /// `x^(1/n)` for `x >= 0`.
    pub fn root(&self, n: u32) -> Self {
        BigReal(self.0.clone().root(n))
    }

    pub fn pow_i(&self, n: i32) -> Self {
        BigReal(Float::with_val(self.prec(), rug::ops::Pow::pow(&self.0, n)))
    }

    pub fn cmp_abs(&self, other: &Self) -> Ordering {
        self.0.cmp_abs(&other.0).unwrap_or(Ordering::Equal)
    }

    /// Total order on finite values.
    pub fn total_cmp(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).unwrap_or(Ordering::Equal)
    }

    /// Binary exponent `e` with `2^(e-1) <= |x| < 2^e`, `None` for zero and
    /// non-finite values.
    pub fn exponent(&self) -> Option<i32> {
        self.0.get_exp()
    }

    /// `|self - other| <= tol * |other|`, with exact equality required when
    /// `other` is zero.
    pub fn rel_close(&self, other: &Self, tol: &BigReal) -> bool {
        let diff = Float::with_val(self.prec().max(other.prec()), &self.0 - &other.0).abs();
        let bound = Float::with_val(diff.prec(), &other.0 * &tol.0).abs();
        diff <= bound
    }
}

/// `10^(-digits)` at the given precision.
pub fn ten_pow_neg(prec: u32, digits: u32) -> BigReal {
    let mut t = Float::with_val(clamp(prec), digits);
    t = -t;
    BigReal(t.exp10())
}

fn clamp(prec: u32) -> u32 {
    prec.max(MIN_PREC)
}

impl From<Float> for BigReal {
    fn from(f: Float) -> Self {
        if f.prec() < MIN_PREC {
            BigReal(Float::with_val(MIN_PREC, f))
        } else {
            BigReal(f)
        }
    }
}

impl fmt::Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal_digits(24))
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(d) => f.write_str(&self.to_decimal_digits(d)),
            None => f.write_str(&self.to_decimal()),
        }
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident) => {
        impl $tr<&BigReal> for &BigReal {
            type Output = BigReal;
            fn $method(self, rhs: &BigReal) -> BigReal {
                let prec = self.prec().max(rhs.prec());
                BigReal(Float::with_val(prec, $tr::$method(&self.0, &rhs.0)))
            }
        }
        impl $tr<BigReal> for BigReal {
            type Output = BigReal;
            fn $method(self, rhs: BigReal) -> BigReal {
                $tr::$method(&self, &rhs)
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal(-self.0)
    }
}

impl Neg for &BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal(-self.0.clone())
    }
}
