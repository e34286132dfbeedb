//! Software extended-precision arithmetic for test oracles.
//!
//! Values are fixed-point: a [`BigFloat`] holds an arbitrary-size integer
//! mantissa `m` representing `m / 2^FRACTION_BITS`. With 256 fraction bits
//! the relative resolution is ~1e-77, comfortably beyond the 50 significant
//! digits the oracle comparisons need. This crate is test tooling only; the
//! production code paths never depend on it.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::OnceLock;

/// Fraction bits of the fixed-point representation.
pub const FRACTION_BITS: u32 = 256;

/// A fixed-point extended-precision real number.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct BigFloat(BigInt);

impl BigFloat {
    pub fn zero() -> Self {
        BigFloat(BigInt::zero())
    }

    pub fn one() -> Self {
        BigFloat(BigInt::from(1) << FRACTION_BITS)
    }

    pub fn from_int(v: i64) -> Self {
        BigFloat(BigInt::from(v) << FRACTION_BITS)
    }

    /// Exact ratio `p/q`, rounded to the fixed-point grid.
    pub fn from_ratio(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        BigFloat((BigInt::from(p) << FRACTION_BITS) / BigInt::from(q))
    }

    /// Exact conversion from an IEEE-754 double (every finite f64 is a
    /// dyadic rational, so no rounding happens unless the value is tiny).
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "non-finite input");
        if x == 0.0 {
            return Self::zero();
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1 } else { 1 };
        let biased_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        // value = mantissa * 2^(exp2 - 52)
        let (mantissa, exp2) = if biased_exp == 0 {
            (frac, -1022i64)
        } else {
            (frac | (1u64 << 52), biased_exp - 1023)
        };
        let shift = exp2 - 52 + FRACTION_BITS as i64;
        let m = BigInt::from(mantissa);
        let m = if shift >= 0 { m << shift } else { m >> (-shift) };
        BigFloat(m * sign)
    }

    /// Parse a plain decimal literal like `"-0.069336464195"`.
    pub fn from_decimal_str(s: &str) -> Self {
        let (sign, s) = match s.strip_prefix('-') {
            Some(rest) => (-1, rest),
            None => (1, s),
        };
        let (int_part, frac_part) = match s.split_once('.') {
            Some((i, f)) => (i, f),
            None => (s, ""),
        };
        let int: BigInt = int_part.parse().expect("bad integer part");
        let mut m = int << FRACTION_BITS;
        if !frac_part.is_empty() {
            let frac: BigInt = frac_part.parse().expect("bad fraction part");
            let denom = BigInt::from(10).pow(frac_part.len() as u32);
            m += (frac << FRACTION_BITS) / denom;
        }
        BigFloat(m * sign)
    }

    pub fn to_f64(&self) -> f64 {
        // Reduce magnitude first so the conversion never saturates.
        let neg = self.0.is_negative();
        let mut abs = self.0.abs();
        let bits = abs.bits();
        let mut drop = 0u32;
        if bits > 1000 {
            drop = (bits - 1000) as u32;
            abs >>= drop;
        }
        let v = abs.to_f64().unwrap() * 2f64.powi(drop as i32 - FRACTION_BITS as i32);
        if neg {
            -v
        } else {
            v
        }
    }

    pub fn abs(&self) -> Self {
        BigFloat(self.0.abs())
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    /// Floor square root on the fixed-point grid; requires a nonnegative value.
    pub fn sqrt(&self) -> Self {
        assert!(!self.0.is_negative(), "sqrt of negative value");
        BigFloat((self.0.clone() << FRACTION_BITS).sqrt())
    }

    /// Natural logarithm via `ln x = k ln 2 + 2 atanh((r-1)/(r+1))` with
    /// `x = 2^k r`, `r` in `[1, 2)`.
    pub fn ln(&self) -> Self {
        assert!(self.0.is_positive(), "ln of non-positive value");
        let one_bits = FRACTION_BITS as i64 + 1;
        let k = self.0.bits() as i64 - one_bits; // x in [2^k, 2^(k+1))
        let r = if k >= 0 {
            BigFloat(self.0.clone() >> k)
        } else {
            BigFloat(self.0.clone() << (-k))
        };
        let num = r.clone() - Self::one();
        let den = r + Self::one();
        let z = num / den; // in [0, 1/3)
        let z2 = z.clone() * z.clone();
        let mut term = z.clone();
        let mut sum = Self::zero();
        let mut n = 1i64;
        while !term.0.is_zero() && n < 4000 {
            sum = sum + term.clone() / Self::from_int(n);
            term = term * z2.clone();
            n += 2;
        }
        Self::from_int(2) * sum + Self::from_int(k) * ln2()
    }

    /// Exponential via `e^x = 2^k e^r` with `x = k ln 2 + r`, `|r| <= ln2/2`.
    pub fn exp(&self) -> Self {
        let k_f = (self.clone() / ln2()).to_f64().round() as i64;
        let r = self.clone() - Self::from_int(k_f) * ln2();
        let mut term = Self::one();
        let mut sum = Self::one();
        let mut n = 1i64;
        while !term.0.is_zero() && n < 500 {
            term = term * r.clone() / Self::from_int(n);
            sum = sum + term.clone();
            n += 1;
        }
        if k_f >= 0 {
            BigFloat(sum.0 << k_f)
        } else {
            BigFloat(sum.0 >> (-k_f))
        }
    }
}

fn ln2() -> BigFloat {
    static LN2: OnceLock<BigFloat> = OnceLock::new();
    LN2.get_or_init(|| {
        // ln 2 = 2 atanh(1/3)
        let z = BigFloat::from_ratio(1, 3);
        let z2 = z.clone() * z.clone();
        let mut term = z.clone();
        let mut sum = BigFloat::zero();
        let mut n = 1i64;
        while !term.0.is_zero() && n < 4000 {
            sum = sum + term.clone() / BigFloat::from_int(n);
            term = term * z2.clone();
            n += 2;
        }
        BigFloat::from_int(2) * sum
    })
    .clone()
}

impl Add for BigFloat {
    type Output = BigFloat;
    fn add(self, rhs: BigFloat) -> BigFloat {
        BigFloat(self.0 + rhs.0)
    }
}

impl Sub for BigFloat {
    type Output = BigFloat;
    fn sub(self, rhs: BigFloat) -> BigFloat {
        BigFloat(self.0 - rhs.0)
    }
}

impl Mul for BigFloat {
    type Output = BigFloat;
    fn mul(self, rhs: BigFloat) -> BigFloat {
        BigFloat((self.0 * rhs.0) >> FRACTION_BITS)
    }
}

impl Div for BigFloat {
    type Output = BigFloat;
    fn div(self, rhs: BigFloat) -> BigFloat {
        assert!(!rhs.0.is_zero(), "division by zero");
        BigFloat((self.0 << FRACTION_BITS) / rhs.0)
    }
}

impl Neg for BigFloat {
    type Output = BigFloat;
    fn neg(self) -> BigFloat {
        BigFloat(-self.0)
    }
}
