//! High-precision floating evaluation and decimal rounding.
//!
//! Arithmetic is delegated to `astro-float`; this module adds conversion
//! from exact rationals, a Stirling-series Gamma function for rational
//! arguments, and deterministic significant-digit formatting.

use std::sync::{Mutex, OnceLock};

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Rational;

const RM: RoundingMode = RoundingMode::ToEven;

/// Guard digits added on top of the requested significant digits.
pub const GUARD_DIGITS: usize = 15;

/// Working context: binary precision plus the constants cache.
pub struct Hp {
    prec: usize,
    cc: Consts,
}

impl Hp {
    pub fn with_bits(bits: usize) -> Self {
        Hp {
            prec: bits.max(64),
            cc: Consts::new().expect("constants cache"),
        }
    }

    /// Enough bits for `digits` decimal digits plus a word of slack.
    pub fn with_digits(digits: usize) -> Self {
        Self::with_bits(digits_to_bits(digits) + 64)
    }

    pub fn prec(&self) -> usize {
        self.prec
    }

    pub fn int(&mut self, n: &BigInt) -> BigFloat {
        match n.to_i64() {
            Some(v) => BigFloat::from_i64(v, self.prec),
            None => {
                let p = self.prec.max(n.bits() as usize + 64);
                BigFloat::parse(&n.to_string(), Radix::Dec, p, RM, &mut self.cc)
            }
        }
    }

    pub fn small(&mut self, n: i64) -> BigFloat {
        BigFloat::from_i64(n, self.prec)
    }

    pub fn rational(&mut self, q: &Rational) -> BigFloat {
        let n = self.int(q.numer());
        if q.denom().is_one() {
            return n;
        }
        let d = self.int(q.denom());
        n.div(&d, self.prec, RM)
    }

    pub fn f64(&mut self, x: f64) -> BigFloat {
        BigFloat::from_f64(x, self.prec)
    }

    pub fn pi(&mut self) -> BigFloat {
        self.cc.pi(self.prec, RM)
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.prec, RM)
    }

    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.prec, RM)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.prec, RM)
    }

    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.prec, RM)
    }

    pub fn sqrt(&self, a: &BigFloat) -> BigFloat {
        a.sqrt(self.prec, RM)
    }

    pub fn exp(&mut self, a: &BigFloat) -> BigFloat {
        a.exp(self.prec, RM, &mut self.cc)
    }

    pub fn ln(&mut self, a: &BigFloat) -> BigFloat {
        a.ln(self.prec, RM, &mut self.cc)
    }

    pub fn sin(&mut self, a: &BigFloat) -> BigFloat {
        a.sin(self.prec, RM, &mut self.cc)
    }

    pub fn cos(&mut self, a: &BigFloat) -> BigFloat {
        a.cos(self.prec, RM, &mut self.cc)
    }

    /// Integer power, negative exponents via the reciprocal.
    pub fn powi(&self, a: &BigFloat, e: i64) -> BigFloat {
        let r = a.powi(e.unsigned_abs() as usize, self.prec, RM);
        if e < 0 {
            r.reciprocal(self.prec, RM)
        } else {
            r
        }
    }

    /// `base^exp` for a positive rational base and rational exponent.
    pub fn pow_rational(&mut self, base: &Rational, exp: &Rational) -> BigFloat {
        assert!(base.is_positive(), "pow_rational needs a positive base");
        if exp.is_integer() {
            let b = self.rational(base);
            if let Some(e) = exp.to_integer().to_i64() {
                return self.powi(&b, e);
            }
        }
        let b = self.rational(base);
        let lb = self.ln(&b);
        let e = self.rational(exp);
        let t = self.mul(&lb, &e);
        self.exp(&t)
    }

    /// `π^exp` for rational `exp`.
    pub fn pi_pow(&mut self, exp: &Rational) -> BigFloat {
        let pi = self.pi();
        if exp.is_integer() {
            if let Some(e) = exp.to_integer().to_i64() {
                return self.powi(&pi, e);
            }
        }
        let l = self.ln(&pi);
        let e = self.rational(exp);
        let t = self.mul(&l, &e);
        self.exp(&t)
    }

    /// `ln Γ(x)` for rational `x > 0`.
    pub fn ln_gamma(&mut self, x: &Rational) -> BigFloat {
        assert!(x.is_positive(), "ln_gamma needs a positive argument");
        // Shift the argument until the Stirling remainder is below 2^-prec:
        // the terms decay like (k / (π z))^2 until k ≈ π z.
        let zmin = (self.prec as f64 * std::f64::consts::LN_2 / (2.0 * std::f64::consts::PI)).ceil()
            as i64
            + 8;
        let xf = x.to_f64().unwrap_or(f64::MAX);
        let shift = if xf >= zmin as f64 { 0 } else { zmin - xf.floor() as i64 };
        let mut prod = Rational::one();
        for i in 0..shift {
            prod *= x + Rational::from_integer(BigInt::from(i));
        }
        let z = x + Rational::from_integer(BigInt::from(shift));
        let lg = self.stirling(&z);
        if shift == 0 {
            return lg;
        }
        let p = self.rational(&prod);
        let lp = self.ln(&p);
        self.sub(&lg, &lp)
    }

    pub fn gamma(&mut self, x: &Rational) -> BigFloat {
        if x.is_integer() && x.is_positive() {
            if let Some(n) = x.to_integer().to_u64() {
                if n <= 1000 {
                    let mut f = BigInt::one();
                    for i in 2..n {
                        f *= i;
                    }
                    return self.int(&f);
                }
            }
        }
        let l = self.ln_gamma(x);
        self.exp(&l)
    }

    fn stirling(&mut self, z: &Rational) -> BigFloat {
        let zf = self.rational(z);
        let lz = self.ln(&zf);
        let half = self.rational(&Rational::new(BigInt::from(1), BigInt::from(2)));
        let two_pi = {
            let pi = self.pi();
            let two = self.small(2);
            self.mul(&two, &pi)
        };
        let l2pi = self.ln(&two_pi);
        // (z - 1/2) ln z - z + ln(2π)/2
        let mut acc = self.mul(&self.sub(&zf, &half), &lz);
        acc = self.sub(&acc, &zf);
        acc = self.add(&acc, &self.mul(&l2pi, &half));
        let threshold = -(self.prec as i64) - 16;
        let z2 = self.mul(&zf, &zf);
        let mut zpow = zf.clone(); // z^(2k-1)
        let mut k = 1usize;
        loop {
            let b = bernoulli_even(k);
            let denom = BigInt::from((2 * k) * (2 * k - 1));
            let coef = self.rational(&(b / Rational::from_integer(denom)));
            let term = self.div(&coef, &zpow);
            acc = self.add(&acc, &term);
            let small = term.is_zero()
                || term.exponent().map(|e| (e as i64) < threshold).unwrap_or(true);
            if small || k > 4000 {
                break;
            }
            zpow = self.mul(&zpow, &z2);
            k += 1;
        }
        acc
    }

    /// Best-effort conversion to `f64`.
    pub fn to_f64(&mut self, x: &BigFloat) -> f64 {
        if x.is_zero() {
            return 0.0;
        }
        match x.convert_to_radix(Radix::Dec, RM, &mut self.cc) {
            Ok((sign, digits, e)) => {
                let mut s = String::with_capacity(24);
                if sign == Sign::Neg {
                    s.push('-');
                }
                s.push_str("0.");
                for d in digits.iter().take(20) {
                    s.push(char::from(b'0' + d));
                }
                s.push_str(&format!("e{e}"));
                s.parse().unwrap_or(f64::NAN)
            }
            Err(_) => f64::NAN,
        }
    }

    /// Rounds to `digits` significant decimal digits, round-half-even.
    ///
    /// Returns `None` when the value sits too close to a rounding boundary
    /// for the working precision to decide; the caller retries with more
    /// guard digits.
    pub fn round_significant(&mut self, x: &BigFloat, digits: usize, guard: usize) -> Option<Decimal> {
        if x.is_zero() {
            return Some(Decimal::zero(digits));
        }
        let (sign, raw, exp) = x.convert_to_radix(Radix::Dec, RM, &mut self.cc).ok()?;
        let mut raw: Vec<u8> = raw;
        // strip leading zeros (defensive against denormalized output)
        let lead = raw.iter().take_while(|&&d| d == 0).count();
        raw.drain(..lead);
        let exp = exp as i64 - lead as i64;
        if raw.is_empty() {
            return Some(Decimal::zero(digits));
        }
        let total = digits + guard;
        raw.resize(total.max(raw.len()), 0);
        let kept: Vec<u8> = raw[..digits].to_vec();
        let rest = &raw[digits..total];
        // compare the guard block with 500…0, allowing ±2 units of noise
        let guard_val: BigInt = rest.iter().fold(BigInt::zero(), |a, &d| a * 10 + d);
        let half = BigInt::from(5) * BigInt::from(10).pow(guard as u32 - 1);
        // Only a tie is ambiguous: just below 0.5 ulp and just above round differently.
        if (&guard_val - &half).abs() <= BigInt::from(2) {
            return None;
        }
        let round_up = guard_val > half;
        Some(Decimal::from_digits(sign == Sign::Neg, kept, exp, round_up))
    }
}

/// Evaluates `f` at increasing precision until `digits` significant digits
/// round unambiguously, and renders them positionally.
///
/// `extra_bits` is added to the working precision (callers pass an estimate
/// of cancellation). Up to four attempts double the guard; the last one
/// accepts whatever rounding the working value gives.
pub fn decimal_string<F>(digits: usize, extra_bits: usize, mut f: F) -> String
where
    F: FnMut(&mut Hp) -> BigFloat,
{
    let digits = digits.max(1);
    let mut guard = GUARD_DIGITS;
    for attempt in 0..4 {
        let mut hp = Hp::with_bits(digits_to_bits(digits + guard) + 64 + extra_bits);
        let x = f(&mut hp);
        if let Some(d) = hp.round_significant(&x, digits, guard) {
            return d.to_string();
        }
        if attempt == 3 {
            let (sign, raw, e) = x
                .convert_to_radix(Radix::Dec, RM, &mut hp.cc)
                .expect("finite value");
            let mut raw = raw;
            raw.resize(digits.max(raw.len()), 0);
            let up = raw.get(digits).is_some_and(|&d| d >= 5);
            raw.truncate(digits);
            return Decimal::from_digits(sign == Sign::Neg, raw, e as i64, up).to_string();
        }
        guard *= 2;
    }
    unreachable!()
}

pub fn digits_to_bits(digits: usize) -> usize {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize
}

/// A decimal rounded to a fixed number of significant digits:
/// value = ±0.d₁d₂…dₙ × 10^exp.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decimal {
    negative: bool,
    digits: Vec<u8>,
    exp: i64,
}

impl Decimal {
    fn zero(n: usize) -> Self {
        Decimal {
            negative: false,
            digits: vec![0; n],
            exp: 1,
        }
    }

    fn from_digits(negative: bool, mut digits: Vec<u8>, mut exp: i64, round_up: bool) -> Self {
        if round_up {
            let mut i = digits.len();
            loop {
                if i == 0 {
                    digits.insert(0, 1);
                    digits.pop();
                    exp += 1;
                    break;
                }
                i -= 1;
                if digits[i] == 9 {
                    digits[i] = 0;
                } else {
                    digits[i] += 1;
                    break;
                }
            }
        }
        Decimal { negative, digits, exp }
    }

    /// Exact round-half-even of a rational.
    pub fn from_rational(q: &Rational, n: usize) -> Self {
        if q.is_zero() {
            return Decimal::zero(n);
        }
        let negative = q.is_negative();
        let a = q.abs();
        // exp such that 10^(exp-1) <= a < 10^exp
        let mut exp = a.numer().to_string().len() as i64 - a.denom().to_string().len() as i64;
        loop {
            let lo = pow10(exp - 1);
            let hi = pow10(exp);
            if a < lo {
                exp -= 1;
            } else if a >= hi {
                exp += 1;
            } else {
                break;
            }
        }
        let scaled = &a * pow10(n as i64 - exp);
        let (fl, frac) = (scaled.floor(), scaled.fract());
        let mut int = fl.to_integer();
        let half = Rational::new(BigInt::one(), BigInt::from(2));
        if frac > half || (frac == half && int.is_odd()) {
            int += 1;
        }
        let mut s = int.to_string();
        if s.len() > n {
            // carry into a new leading digit; the dropped digit is a zero
            s.truncate(n);
            exp += 1;
        }
        Decimal {
            negative,
            digits: s.bytes().map(|b| b - b'0').collect(),
            exp,
        }
    }
}

fn pow10(e: i64) -> Rational {
    let p = BigInt::from(10).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        Rational::from_integer(p)
    } else {
        Rational::new(BigInt::one(), p)
    }
}

impl std::fmt::Display for Decimal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let body: String = self.digits.iter().map(|d| char::from(b'0' + d)).collect();
        let n = body.len() as i64;
        let all_zero = self.digits.iter().all(|&d| d == 0);
        if self.negative && !all_zero {
            f.write_str("-")?;
        }
        if all_zero {
            // "0" followed by n-1 zeros after the point
            if n <= 1 {
                return f.write_str("0");
            }
            return write!(f, "0.{}", "0".repeat(n as usize - 1));
        }
        if self.exp <= 0 {
            write!(f, "0.{}{}", "0".repeat((-self.exp) as usize), body)
        } else if self.exp < n {
            let (a, b) = body.split_at(self.exp as usize);
            write!(f, "{a}.{b}")
        } else {
            write!(f, "{}{}", body, "0".repeat((self.exp - n) as usize))
        }
    }
}

/// Bernoulli number `B_{2k}` (k ≥ 1), cached.
pub fn bernoulli_even(k: usize) -> Rational {
    static CACHE: OnceLock<Mutex<Vec<Rational>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(Vec::new()));
    let mut b = cache.lock().unwrap();
    // b[m] holds B_m for all m (odd ones > 1 are zero)
    if b.is_empty() {
        b.push(Rational::one());
    }
    while b.len() <= 2 * k {
        let m = b.len();
        // Σ_{j=0}^{m} C(m+1, j) B_j = 0
        let mut s = Rational::zero();
        let mut c = BigInt::one(); // C(m+1, 0)
        for (j, bj) in b.iter().enumerate() {
            if !bj.is_zero() {
                s += bj * Rational::from_integer(c.clone());
            }
            c = c * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
        }
        let next = -s / Rational::from_integer(BigInt::from(m + 1));
        b.push(next);
    }
    b[2 * k].clone()
}
