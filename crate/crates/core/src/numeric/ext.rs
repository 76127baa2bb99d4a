//! Extended-exponent floating point.
//!
//! Big q-Bessel values at the n-th zero grow roughly like `2^(n^2)`, which
//! leaves the `f64` range after a few dozen zeros. [`Ext`] keeps an `f64`
//! mantissa in `[0.5, 1)` and a separate `i64` binary exponent so products
//! and ratios of such values stay representable.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::dd::Dd;

/// Splits a finite nonzero `x` into `(m, e)` with `x = m * 2^e`, `|m|` in `[0.5, 1)`.
pub fn frexp(x: f64) -> (f64, i64) {
    if x == 0.0 || !x.is_finite() {
        return (x, 0);
    }
    let bits = x.to_bits();
    let biased = ((bits >> 52) & 0x7ff) as i64;
    if biased == 0 {
        // subnormal
        let (m, e) = frexp(x * f64::from_bits(0x4350_0000_0000_0000)); // 2^54
        return (m, e - 54);
    }
    let m = f64::from_bits((bits & !(0x7ff << 52)) | (1022 << 52));
    (m, biased - 1022)
}

/// `x * 2^n`, correctly handling exponents outside the directly encodable range.
pub fn ldexp(mut x: f64, mut n: i64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    while n > 1023 {
        x *= f64::from_bits(0x7fe0_0000_0000_0000); // 2^1023
        n -= 1023;
        if x.is_infinite() {
            return x;
        }
    }
    while n < -1022 {
        x *= f64::from_bits(0x0010_0000_0000_0000); // 2^-1022
        n += 1022;
        if x == 0.0 {
            return x;
        }
    }
    x * f64::from_bits(((n + 1023) as u64) << 52)
}

/// A real number `m * 2^e` with a 53-bit mantissa and unbounded exponent.
#[derive(Clone, Copy, Debug, Default)]
pub struct Ext {
    m: f64,
    e: i64,
}

impl Ext {
    pub const ZERO: Ext = Ext { m: 0.0, e: 0 };
    pub const ONE: Ext = Ext { m: 0.5, e: 1 };

    pub fn new(mantissa: f64, exp2: i64) -> Self {
        let (m, e) = frexp(mantissa);
        if m == 0.0 {
            return Ext::ZERO;
        }
        Ext { m, e: e + exp2 }
    }

    pub fn from_f64(x: f64) -> Self {
        Ext::new(x, 0)
    }

    /// Rounds a double-double carried at scale `2^exp2`.
    pub fn from_dd(x: Dd, exp2: i64) -> Self {
        Ext::new(x.to_f64(), exp2)
    }

    pub fn mantissa(self) -> f64 {
        self.m
    }

    pub fn exponent(self) -> i64 {
        self.e
    }

    /// Nearest `f64`; overflows to infinity and underflows to zero.
    pub fn to_f64(self) -> f64 {
        ldexp(self.m, self.e)
    }

    pub fn is_zero(self) -> bool {
        self.m == 0.0
    }

    pub fn is_finite(self) -> bool {
        self.m.is_finite()
    }

    /// True when the value fits a normal `f64` without loss.
    pub fn fits_f64(self) -> bool {
        self.m == 0.0 || (self.e > -1021 && self.e <= 1024 && self.m.is_finite())
    }

    pub fn abs(self) -> Self {
        Ext {
            m: self.m.abs(),
            e: self.e,
        }
    }

    pub fn signum(self) -> f64 {
        if self.m == 0.0 {
            0.0
        } else {
            self.m.signum()
        }
    }

    /// `log2 |x|`; `-inf` at zero.
    pub fn log2_abs(self) -> f64 {
        if self.m == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.m.abs().log2() + self.e as f64
        }
    }

    pub fn sqrt(self) -> Self {
        if self.m <= 0.0 {
            return Ext::from_f64(self.m.sqrt());
        }
        if self.e % 2 == 0 {
            Ext::new(self.m.sqrt(), self.e / 2)
        } else {
            Ext::new((2.0 * self.m).sqrt(), (self.e - 1) / 2)
        }
    }

    pub fn max_abs(self, other: Ext) -> Ext {
        if self.abs() >= other.abs() {
            self.abs()
        } else {
            other.abs()
        }
    }

    /// Ratio `self / other` as a plain `f64`.
    pub fn ratio(self, other: Ext) -> f64 {
        (self / other).to_f64()
    }
}

impl From<f64> for Ext {
    fn from(x: f64) -> Self {
        Ext::from_f64(x)
    }
}

impl PartialEq for Ext {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for Ext {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if self.m.is_nan() || other.m.is_nan() {
            return None;
        }
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb {
            return sa.partial_cmp(&sb);
        }
        if sa == 0.0 {
            return Some(Ordering::Equal);
        }
        let mag = match self.e.cmp(&other.e) {
            Ordering::Equal => self.m.abs().partial_cmp(&other.m.abs())?,
            o => o,
        };
        Some(if sa > 0.0 { mag } else { mag.reverse() })
    }
}

impl Neg for Ext {
    type Output = Ext;
    fn neg(self) -> Ext {
        Ext {
            m: -self.m,
            e: self.e,
        }
    }
}

impl Mul for Ext {
    type Output = Ext;
    fn mul(self, rhs: Ext) -> Ext {
        Ext::new(self.m * rhs.m, self.e + rhs.e)
    }
}

impl Mul<f64> for Ext {
    type Output = Ext;
    fn mul(self, rhs: f64) -> Ext {
        self * Ext::from_f64(rhs)
    }
}

impl Div for Ext {
    type Output = Ext;
    fn div(self, rhs: Ext) -> Ext {
        Ext::new(self.m / rhs.m, self.e - rhs.e)
    }
}

impl Div<f64> for Ext {
    type Output = Ext;
    fn div(self, rhs: f64) -> Ext {
        self / Ext::from_f64(rhs)
    }
}

impl Add for Ext {
    type Output = Ext;
    fn add(self, rhs: Ext) -> Ext {
        if self.m == 0.0 {
            return rhs;
        }
        if rhs.m == 0.0 {
            return self;
        }
        if self.e >= rhs.e {
            Ext::new(self.m + ldexp(rhs.m, rhs.e - self.e), self.e)
        } else {
            Ext::new(ldexp(self.m, self.e - rhs.e) + rhs.m, rhs.e)
        }
    }
}

impl Sub for Ext {
    type Output = Ext;
    fn sub(self, rhs: Ext) -> Ext {
        self + (-rhs)
    }
}

impl fmt::Display for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.fits_f64() {
            write!(f, "{:.16e}", self.to_f64())
        } else {
            write!(f, "{:.16e}p{}", self.m, self.e)
        }
    }
}

impl std::str::FromStr for Ext {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        match s.split_once('p') {
            Some((m, e)) => {
                let m: f64 = m.parse().map_err(|_| format!("bad mantissa in {s:?}"))?;
                let e: i64 = e.parse().map_err(|_| format!("bad exponent in {s:?}"))?;
                Ok(Ext::new(m, e))
            }
            None => s
                .parse::<f64>()
                .map(Ext::from_f64)
                .map_err(|_| format!("bad number {s:?}")),
        }
    }
}

/// Serialized as a JSON number when it fits an `f64`, otherwise as a string
/// `"<mantissa>p<exp2>"` meaning `mantissa * 2^exp2`.
impl Serialize for Ext {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.fits_f64() {
            serializer.serialize_f64(self.to_f64())
        } else {
            serializer.serialize_str(&self.to_string())
        }
    }
}

impl<'de> Deserialize<'de> for Ext {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct ExtVisitor;

        impl<'de> Visitor<'de> for ExtVisitor {
            type Value = Ext;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or a \"<mantissa>p<exp2>\" string")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Ext, E> {
                Ok(Ext::from_f64(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Ext, E> {
                Ok(Ext::from_f64(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Ext, E> {
                Ok(Ext::from_f64(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Ext, E> {
                v.parse().map_err(E::custom)
            }
        }

        deserializer.deserialize_any(ExtVisitor)
    }
}
