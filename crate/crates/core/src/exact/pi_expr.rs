use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use astro_float::BigFloat;
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::hp::{self, Decimal, Hp};
use super::{fraction_string, parse_rational, Rational};
use crate::{Error, Result};

/// A finite Laurent polynomial in `√π` with rational coefficients.
///
/// The map sends the exponent of `√π` to its coefficient; zero coefficients
/// are never stored, so structural equality is value equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct PiExpr {
    terms: BTreeMap<i32, Rational>,
}

impl PiExpr {
    pub fn zero() -> Self {
        PiExpr::default()
    }

    pub fn one() -> Self {
        PiExpr::rational(Rational::one())
    }

    pub fn rational(q: Rational) -> Self {
        PiExpr::monomial(q, 0)
    }

    pub fn int(v: i64) -> Self {
        PiExpr::rational(Rational::from_integer(BigInt::from(v)))
    }

    pub fn frac(num: i64, den: i64) -> Self {
        PiExpr::rational(Rational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// `q · (√π)^e`.
    pub fn monomial(q: Rational, e: i32) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(e, q);
        }
        PiExpr { terms }
    }

    /// `(√π)^e`.
    pub fn sqrt_pi_pow(e: i32) -> Self {
        PiExpr::monomial(Rational::one(), e)
    }

    /// `π^k`.
    pub fn pi_pow(k: i32) -> Self {
        PiExpr::sqrt_pi_pow(2 * k)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when the value is a rational number (support ⊆ {0}).
    pub fn is_rational(&self) -> bool {
        self.terms.keys().all(|&e| e == 0)
    }

    pub fn as_rational(&self) -> Option<Rational> {
        if !self.is_rational() {
            return None;
        }
        Some(self.coeff(0))
    }

    /// True when every exponent of `√π` is even, i.e. the value lies in `ℚ[π, 1/π]`.
    pub fn is_integer_pi_form(&self) -> bool {
        self.terms.keys().all(|e| e % 2 == 0)
    }

    /// The single term `(q, e)` if the expression is a nonzero monomial.
    pub fn as_monomial(&self) -> Option<(&Rational, i32)> {
        if self.terms.len() != 1 {
            return None;
        }
        self.terms.iter().next().map(|(e, q)| (q, *e))
    }

    /// Exponents of `√π` carrying a nonzero coefficient, ascending.
    pub fn support(&self) -> Vec<i32> {
        self.terms.keys().copied().collect()
    }

    pub fn coeff(&self, e: i32) -> Rational {
        self.terms.get(&e).cloned().unwrap_or_else(Rational::zero)
    }

    /// `(exponent, coefficient)` pairs in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i32, &Rational)> {
        self.terms.iter().map(|(e, q)| (*e, q))
    }

    pub fn scale(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return PiExpr::zero();
        }
        PiExpr {
            terms: self.terms.iter().map(|(e, c)| (*e, c * q)).collect(),
        }
    }

    /// Multiplies by `(√π)^shift`.
    pub fn shift(&self, shift: i32) -> Self {
        PiExpr {
            terms: self.terms.iter().map(|(e, c)| (e + shift, c.clone())).collect(),
        }
    }

    fn add_term(&mut self, e: i32, q: &Rational) {
        if q.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(Rational::zero);
        *slot += q;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    /// Multiplicative inverse; defined only for nonzero monomials.
    pub fn recip(&self) -> Result<Self> {
        match self.as_monomial() {
            Some((q, e)) => Ok(PiExpr::monomial(q.recip(), -e)),
            None => Err(Error::Domain(format!("{self} is not an invertible monomial"))),
        }
    }

    /// Integer power; negative exponents require a monomial.
    pub fn pow(&self, e: i64) -> Result<Self> {
        if e < 0 {
            return self.recip()?.pow(-e);
        }
        let mut base = self.clone();
        let mut acc = PiExpr::one();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Ok(acc)
    }

    pub fn to_f64(&self) -> f64 {
        let sp = std::f64::consts::PI.sqrt();
        self.terms
            .iter()
            .map(|(e, q)| q.to_f64().unwrap_or(f64::NAN) * sp.powi(*e))
            .sum()
    }

    /// Evaluates in the given high-precision context.
    pub fn eval(&self, hp: &mut Hp) -> BigFloat {
        let mut acc = hp.small(0);
        if self.terms.is_empty() {
            return acc;
        }
        let pi = hp.pi();
        let sp = hp.sqrt(&pi);
        for (e, q) in &self.terms {
            let c = hp.rational(q);
            let p = hp.powi(&sp, *e as i64);
            let t = hp.mul(&c, &p);
            acc = hp.add(&acc, &t);
        }
        acc
    }

    /// Decimal rendering with `digits` significant digits, round-half-even.
    pub fn to_decimal(&self, digits: usize) -> String {
        if let Some(q) = self.as_rational() {
            return Decimal::from_rational(&q, digits.max(1)).to_string();
        }
        // Estimate cancellation between terms to size the working precision.
        let magnitudes: Vec<f64> = self
            .terms
            .iter()
            .map(|(e, q)| {
                let q = q.abs();
                let lq = q.numer().bits() as f64 - q.denom().bits() as f64;
                lq + *e as f64 * 0.5 * std::f64::consts::PI.log2()
            })
            .collect();
        let top = magnitudes.iter().cloned().fold(f64::MIN, f64::max);
        let mut probe = Hp::with_bits(256 + top.abs() as usize);
        let v = self.eval(&mut probe);
        let lost = match v.exponent() {
            Some(ex) if !v.is_zero() => (top - ex as f64).max(0.0) as usize,
            _ => 512,
        };
        hp::decimal_string(digits, lost + 16, |hp| self.eval(hp))
    }

    pub(crate) fn to_json_value(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|(e, q)| serde_json::json!([e, fraction_string(q)]))
            .collect();
        serde_json::json!({ "terms": terms })
    }

    /// Canonical JSON text: `{"terms":[[e,"num/den"],…]}` with ascending `e`.
    pub fn to_json(&self) -> String {
        self.to_json_value().to_string()
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

fn pi_factor(e: i32) -> String {
    if e % 2 == 0 {
        match e / 2 {
            1 => "pi".to_string(),
            k => format!("pi^{k}"),
        }
    } else {
        format!("pi^({e}/2)")
    }
}

impl fmt::Display for PiExpr {
    /// Descending powers of `π`, e.g. `7 - 2144238917/190270080 * pi^-2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (e, q)) in self.terms.iter().rev().enumerate() {
            let neg = q.is_negative();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let a = q.abs();
            if *e == 0 {
                write!(f, "{a}")?;
            } else if a.is_one() {
                f.write_str(&pi_factor(*e))?;
            } else {
                write!(f, "{a} * {}", pi_factor(*e))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for PiExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PiExpr({self})")
    }
}

fn parse_pi_factor(s: &str) -> Result<i32> {
    let bad = || Error::Parse(format!("bad power of pi: {s:?}"));
    let s = s.trim();
    if s == "pi" {
        return Ok(2);
    }
    let exp = s.strip_prefix("pi^").ok_or_else(bad)?;
    let exp = exp
        .strip_prefix('(')
        .and_then(|x| x.strip_suffix(')'))
        .unwrap_or(exp);
    let q = parse_rational(exp)?;
    let twice = q * Rational::from_integer(BigInt::from(2));
    if !twice.is_integer() {
        return Err(bad());
    }
    twice.to_integer().to_i32().ok_or_else(bad)
}

impl FromStr for PiExpr {
    type Err = Error;

    /// Inverse of `Display`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty expression".into()));
        }
        let normalized = s.replace(" - ", " + -");
        let mut out = PiExpr::zero();
        for term in normalized.split(" + ") {
            let term = term.trim();
            let (coeff, e) = if let Some((c, p)) = term.split_once(" * ") {
                (parse_rational(c)?, parse_pi_factor(p)?)
            } else if let Some(p) = term.strip_prefix('-').filter(|p| p.starts_with("pi")) {
                (-Rational::one(), parse_pi_factor(p)?)
            } else if term.starts_with("pi") {
                (Rational::one(), parse_pi_factor(term)?)
            } else {
                (parse_rational(term)?, 0)
            };
            out.add_term(e, &coeff);
        }
        Ok(out)
    }
}

impl Serialize for PiExpr {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json_value().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PiExpr {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            terms: Vec<(i32, String)>,
        }
        let raw = Raw::deserialize(deserializer)?;
        let mut out = PiExpr::zero();
        for (e, q) in raw.terms {
            let q = parse_rational(&q).map_err(D::Error::custom)?;
            if out.terms.contains_key(&e) {
                return Err(D::Error::custom(format!("duplicate exponent {e}")));
            }
            out.add_term(e, &q);
        }
        Ok(out)
    }
}

impl From<Rational> for PiExpr {
    fn from(q: Rational) -> Self {
        PiExpr::rational(q)
    }
}

impl<'a> Add<&'a PiExpr> for &PiExpr {
    type Output = PiExpr;
    fn add(self, rhs: &'a PiExpr) -> PiExpr {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for PiExpr {
    type Output = PiExpr;
    fn add(mut self, rhs: PiExpr) -> PiExpr {
        self += &rhs;
        self
    }
}

impl AddAssign<&PiExpr> for PiExpr {
    fn add_assign(&mut self, rhs: &PiExpr) {
        for (e, q) in &rhs.terms {
            self.add_term(*e, q);
        }
    }
}

impl SubAssign<&PiExpr> for PiExpr {
    fn sub_assign(&mut self, rhs: &PiExpr) {
        for (e, q) in &rhs.terms {
            self.add_term(*e, &-q);
        }
    }
}

impl<'a> Sub<&'a PiExpr> for &PiExpr {
    type Output = PiExpr;
    fn sub(self, rhs: &'a PiExpr) -> PiExpr {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for PiExpr {
    type Output = PiExpr;
    fn sub(mut self, rhs: PiExpr) -> PiExpr {
        self -= &rhs;
        self
    }
}

impl Neg for &PiExpr {
    type Output = PiExpr;
    fn neg(self) -> PiExpr {
        PiExpr {
            terms: self.terms.iter().map(|(e, q)| (*e, -q)).collect(),
        }
    }
}

impl Neg for PiExpr {
    type Output = PiExpr;
    fn neg(self) -> PiExpr {
        -&self
    }
}

impl<'a> Mul<&'a PiExpr> for &PiExpr {
    type Output = PiExpr;
    fn mul(self, rhs: &'a PiExpr) -> PiExpr {
        let mut out = PiExpr::zero();
        for (ea, qa) in &self.terms {
            for (eb, qb) in &rhs.terms {
                out.add_term(ea + eb, &(qa * qb));
            }
        }
        out
    }
}

impl Mul for PiExpr {
    type Output = PiExpr;
    fn mul(self, rhs: PiExpr) -> PiExpr {
        &self * &rhs
    }
}

impl std::iter::Sum for PiExpr {
    fn sum<I: Iterator<Item = PiExpr>>(iter: I) -> Self {
        let mut acc = PiExpr::zero();
        for x in iter {
            acc += &x;
        }
        acc
    }
}
