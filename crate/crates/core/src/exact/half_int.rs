use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;

use super::Rational;
use crate::{Error, Result};

/// An integer or half-integer, stored as twice its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt(i64);

impl HalfInt {
    pub const fn from_twice(twice: i64) -> Self {
        HalfInt(twice)
    }

    pub const fn from_int(v: i64) -> Self {
        HalfInt(2 * v)
    }

    pub const fn twice(self) -> i64 {
        self.0
    }

    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    /// `self + halves/2`.
    pub const fn add_halves(self, halves: i64) -> Self {
        HalfInt(self.0 + halves)
    }

    pub fn to_rational(self) -> Rational {
        Rational::new(BigInt::from(self.0), BigInt::from(2))
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }

    /// Every half-integer in `[lo, hi]`, ascending.
    pub fn range_inclusive(lo: HalfInt, hi: HalfInt) -> impl Iterator<Item = HalfInt> {
        (lo.0..=hi.0).map(HalfInt)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl FromStr for HalfInt {
    type Err = Error;

    /// Accepts `"-1"`, `"3"`, `"1/2"`, `"-5/2"`, and any fraction that
    /// reduces to a half-integer (`"4/2"`). Decimal input is rejected.
    fn from_str(s: &str) -> Result<Self> {
        let q = super::parse_rational(s)?;
        let twice = q * Rational::from_integer(BigInt::from(2));
        if !twice.is_integer() {
            return Err(Error::Parse(format!("{s:?} is not an integer or half-integer")));
        }
        let t: i64 = twice
            .to_integer()
            .try_into()
            .map_err(|_| Error::Parse(format!("{s:?} is out of range")))?;
        Ok(HalfInt(t))
    }
}
