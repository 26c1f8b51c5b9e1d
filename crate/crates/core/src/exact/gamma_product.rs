use std::collections::BTreeMap;
use std::fmt;

use astro_float::BigFloat;
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::hp::{self, Hp};
use super::{fraction_string, gamma_half, parse_rational, HalfInt, PiExpr, Rational};
use crate::error::domain;
use crate::{Error, Result};

/// A formal product `q · π^a · ∏ Γ(xᵢ)^{eᵢ} · ∏ rⱼ^{sⱼ}`.
///
/// Power bases are split into primes when they fit in a machine word and the
/// integer part of every power exponent is folded into `q`, so each stored
/// exponent lies in `(0, 1)`. No equality is provided: two products are
/// compared by evaluating them.
#[derive(Clone, Debug)]
pub struct GammaProduct {
    rational: Rational,
    pi_exp: Rational,
    gammas: BTreeMap<Rational, i64>,
    powers: BTreeMap<Rational, Rational>,
}

impl Default for GammaProduct {
    fn default() -> Self {
        GammaProduct::one()
    }
}

fn small_factor(n: &BigInt) -> Option<Vec<(u64, i64)>> {
    let mut n = n.to_u64()?;
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    Some(out)
}

fn rat_pow(q: &Rational, e: &BigInt) -> Rational {
    let mag = e.abs().to_u32().expect("exponent fits in u32");
    let r = num_traits::pow(q.clone(), mag as usize);
    if e.is_negative() {
        r.recip()
    } else {
        r
    }
}

impl GammaProduct {
    pub fn one() -> Self {
        GammaProduct::rational(Rational::one())
    }

    pub fn rational(q: Rational) -> Self {
        GammaProduct {
            rational: q,
            pi_exp: Rational::zero(),
            gammas: BTreeMap::new(),
            powers: BTreeMap::new(),
        }
    }

    /// Embeds a single-term `PiExpr`.
    pub fn from_monomial(x: &PiExpr) -> Result<Self> {
        if x.is_zero() {
            return Ok(GammaProduct::rational(Rational::zero()));
        }
        let (q, e) = x
            .as_monomial()
            .ok_or_else(|| Error::Domain(format!("{x} is not a monomial")))?;
        let mut g = GammaProduct::rational(q.clone());
        g.pi_exp = Rational::new(BigInt::from(e), BigInt::from(2));
        Ok(g)
    }

    pub fn rational_factor(&self) -> &Rational {
        &self.rational
    }

    pub fn pi_exponent(&self) -> &Rational {
        &self.pi_exp
    }

    /// `(argument, exponent)` pairs, ascending by argument.
    pub fn gamma_factors(&self) -> impl Iterator<Item = (&Rational, i64)> {
        self.gammas.iter().map(|(a, e)| (a, *e))
    }

    /// `(base, exponent)` pairs, ascending by base.
    pub fn power_factors(&self) -> impl Iterator<Item = (&Rational, &Rational)> {
        self.powers.iter()
    }

    /// Multiplies by `π^e`.
    pub fn times_pi(mut self, e: Rational) -> Self {
        self.pi_exp += e;
        self
    }

    /// Multiplies by `Γ(arg)^exp`.
    pub fn times_gamma(mut self, arg: Rational, exp: i64) -> Result<Self> {
        if !arg.is_positive() {
            return domain(format!("Gamma argument must be positive, got {arg}"));
        }
        let slot = self.gammas.entry(arg.clone()).or_insert(0);
        *slot += exp;
        if *slot == 0 {
            self.gammas.remove(&arg);
        }
        Ok(self)
    }

    /// Multiplies by `base^exp`.
    pub fn times_power(mut self, base: Rational, exp: Rational) -> Result<Self> {
        if !base.is_positive() {
            return domain(format!("power base must be positive, got {base}"));
        }
        if exp.is_zero() || base.is_one() {
            return Ok(self);
        }
        let num = small_factor(base.numer());
        let den = small_factor(base.denom());
        match (num, den) {
            (Some(num), Some(den)) => {
                for (p, m) in num {
                    self.add_power(Rational::from_integer(p.into()), &exp * BigInt::from(m));
                }
                for (p, m) in den {
                    self.add_power(Rational::from_integer(p.into()), -(&exp * BigInt::from(m)));
                }
            }
            _ => self.add_power(base, exp),
        }
        Ok(self)
    }

    fn add_power(&mut self, base: Rational, exp: Rational) {
        let total = self.powers.remove(&base).unwrap_or_else(Rational::zero) + exp;
        let whole = total.floor();
        let frac = &total - &whole;
        self.rational *= rat_pow(&base, &whole.to_integer());
        if !frac.is_zero() {
            self.powers.insert(base, frac);
        }
    }

    pub fn mul(&self, other: &GammaProduct) -> GammaProduct {
        let mut out = self.clone();
        out.rational *= &other.rational;
        out.pi_exp += &other.pi_exp;
        for (a, e) in &other.gammas {
            out = out.times_gamma(a.clone(), *e).expect("stored arguments are positive");
        }
        for (b, e) in &other.powers {
            out.add_power(b.clone(), e.clone());
        }
        out
    }

    pub fn recip(&self) -> Result<GammaProduct> {
        if self.rational.is_zero() {
            return domain("cannot invert a zero product");
        }
        let mut out = GammaProduct::rational(self.rational.recip()).times_pi(-&self.pi_exp);
        for (a, e) in &self.gammas {
            out = out.times_gamma(a.clone(), -e)?;
        }
        for (b, e) in &self.powers {
            out.add_power(b.clone(), -e.clone());
        }
        Ok(out)
    }

    /// Raises to a rational power. Gamma exponents must stay integral and
    /// the rational factor must be positive unless `exp` is an integer.
    pub fn pow(&self, exp: &Rational) -> Result<GammaProduct> {
        let mut out = if exp.is_integer() {
            GammaProduct::rational(rat_pow(&self.rational, &exp.to_integer()))
        } else {
            if !self.rational.is_positive() {
                return domain("fractional power of a non-positive factor");
            }
            GammaProduct::one().times_power(self.rational.clone(), exp.clone())?
        };
        out.pi_exp = &self.pi_exp * exp;
        for (a, e) in &self.gammas {
            let ne = exp * BigInt::from(*e);
            if !ne.is_integer() {
                return domain(format!("Gamma({a})^{e} raised to {exp} is not integral"));
            }
            let ne = ne.to_integer().to_i64().expect("small exponent");
            out = out.times_gamma(a.clone(), ne)?;
        }
        for (b, e) in &self.powers {
            out.add_power(b.clone(), e * exp);
        }
        Ok(out)
    }

    /// Absorbs every Gamma factor at an integer or half-integer argument into
    /// the rational factor and the power of `π`.
    pub fn fold_half_integers(&self) -> GammaProduct {
        let mut out = self.clone();
        let two = Rational::from_integer(BigInt::from(2));
        let foldable: Vec<(Rational, i64)> = out
            .gammas
            .iter()
            .filter(|(a, _)| (*a * &two).is_integer())
            .map(|(a, e)| (a.clone(), *e))
            .collect();
        for (a, e) in foldable {
            out.gammas.remove(&a);
            let twice = (&a * &two).to_integer().to_i64().expect("small argument");
            let g = gamma_half(HalfInt::from_twice(twice)).expect("positive argument");
            let (q, pe) = g.as_monomial().expect("Gamma at half-integers is a monomial");
            out.rational *= rat_pow(q, &BigInt::from(e));
            out.pi_exp += Rational::new(BigInt::from(pe as i64 * e), BigInt::from(2));
        }
        out
    }

    /// The value as a `PiExpr`, when it lies in the ring after folding.
    pub fn to_pi_expr(&self) -> Option<PiExpr> {
        let f = self.fold_half_integers();
        if !f.gammas.is_empty() || !f.powers.is_empty() {
            return None;
        }
        let twice = &f.pi_exp * BigInt::from(2);
        if !twice.is_integer() {
            return None;
        }
        Some(PiExpr::monomial(f.rational, twice.to_integer().to_i32()?))
    }

    pub fn eval(&self, hp: &mut Hp) -> BigFloat {
        let mut acc = hp.rational(&self.rational);
        if !self.pi_exp.is_zero() {
            let p = hp.pi_pow(&self.pi_exp);
            acc = hp.mul(&acc, &p);
        }
        for (a, e) in &self.gammas {
            let g = hp.gamma(a);
            let g = hp.powi(&g, *e);
            acc = hp.mul(&acc, &g);
        }
        for (b, e) in &self.powers {
            let p = hp.pow_rational(b, e);
            acc = hp.mul(&acc, &p);
        }
        acc
    }

    pub fn to_f64(&self) -> f64 {
        let mut h = Hp::with_bits(128);
        let v = self.eval(&mut h);
        h.to_f64(&v)
    }

    /// Decimal rendering with `digits` significant digits, round-half-even.
    pub fn to_decimal(&self, digits: usize) -> String {
        hp::decimal_string(digits, 32, |h| self.eval(h))
    }

    pub(crate) fn to_json_value(&self) -> serde_json::Value {
        let gamma: Vec<serde_json::Value> = self
            .gammas
            .iter()
            .map(|(a, e)| serde_json::json!([fraction_string(a), e]))
            .collect();
        let powers: Vec<serde_json::Value> = self
            .powers
            .iter()
            .map(|(b, e)| serde_json::json!([fraction_string(b), fraction_string(e)]))
            .collect();
        serde_json::json!({
            "rational": fraction_string(&self.rational),
            "pi_exp": fraction_string(&self.pi_exp),
            "gamma": gamma,
            "powers": powers,
        })
    }

    /// `{"rational":"p/q","pi_exp":"a/b","gamma":[["arg",exp],…],"powers":[["base","exp"],…]}`.
    pub fn to_json(&self) -> String {
        self.to_json_value().to_string()
    }

    pub fn from_json(s: &str) -> Result<GammaProduct> {
        #[derive(serde::Deserialize)]
        struct Raw {
            rational: String,
            pi_exp: String,
            gamma: Vec<(String, i64)>,
            powers: Vec<(String, String)>,
        }
        let raw: Raw = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let mut out = GammaProduct::rational(parse_rational(&raw.rational)?)
            .times_pi(parse_rational(&raw.pi_exp)?);
        for (a, e) in raw.gamma {
            out = out.times_gamma(parse_rational(&a)?, e)?;
        }
        for (b, e) in raw.powers {
            out = out.times_power(parse_rational(&b)?, parse_rational(&e)?)?;
        }
        Ok(out)
    }
}

impl serde::Serialize for GammaProduct {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json_value().serialize(s)
    }
}

fn paren(q: &Rational) -> String {
    if q.is_integer() && !q.is_negative() {
        q.to_string()
    } else {
        format!("({q})")
    }
}

impl fmt::Display for GammaProduct {
    /// e.g. `35/12 * pi^(1/2) * 3^(1/2)` or `2 * pi^(2/3) * (2/3)^(1/3) * Gamma(5/3)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rational)?;
        if !self.pi_exp.is_zero() {
            if self.pi_exp.is_one() {
                f.write_str(" * pi")?;
            } else {
                write!(f, " * pi^{}", paren(&self.pi_exp))?;
            }
        }
        for (b, e) in &self.powers {
            write!(f, " * {}^{}", paren(b), paren(e))?;
        }
        for (a, e) in &self.gammas {
            if *e == 1 {
                write!(f, " * Gamma({a})")?;
            } else {
                write!(f, " * Gamma({a})^{}", paren(&Rational::from_integer((*e).into())))?;
            }
        }
        Ok(())
    }
}
