//! Exact algebra and definite integration of sums of
//! `q · (φ/π)^p · cos(mφ)` and `q · (φ/π)^p · sin(mφ)` on `[-π/2, π/2]`.
//!
//! Coefficients are [`PiExpr`] values. Tracking `φ` through `φ/π` keeps every
//! power of `π` explicit in the coefficients, so the `π`-structure of an
//! integral can be read off its result.

use std::collections::BTreeMap;
use std::fmt;

use astro_float::BigFloat;
use num_bigint::BigInt;
use num_traits::One;

use crate::error::domain;
use crate::exact::hp::Hp;
use crate::exact::{binomial, c_one, c_tilde_one, HalfInt, PiExpr, Rational};
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TrigKind {
    Cos,
    Sin,
}

/// One term `coeff · (φ/π)^power · kind(freq · φ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrigTerm {
    pub coeff: PiExpr,
    pub power: u32,
    pub freq: u32,
    pub kind: TrigKind,
}

impl fmt::Display for TrigTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            TrigKind::Cos => "cos",
            TrigKind::Sin => "sin",
        };
        write!(f, "({}) * (phi/pi)^{} * {}({} phi)", self.coeff, self.power, kind, self.freq)
    }
}

/// Canonical sum of [`TrigTerm`]s keyed by `(kind, freq, power)`.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct TrigPoly {
    terms: BTreeMap<(TrigKind, u32, u32), PiExpr>,
}

impl TrigPoly {
    pub fn zero() -> Self {
        TrigPoly::default()
    }

    pub fn one() -> Self {
        TrigPoly::constant(PiExpr::one())
    }

    pub fn constant(c: PiExpr) -> Self {
        let mut t = TrigPoly::zero();
        t.add_term(TrigKind::Cos, 0, 0, &c);
        t
    }

    /// `coeff · (φ/π)^power · kind(freq·φ)`; `sin(0)` yields zero.
    pub fn term(coeff: PiExpr, power: u32, freq: u32, kind: TrigKind) -> Self {
        let mut t = TrigPoly::zero();
        t.add_term(kind, freq, power, &coeff);
        t
    }

    pub fn cos(freq: u32) -> Self {
        TrigPoly::term(PiExpr::one(), 0, freq, TrigKind::Cos)
    }

    pub fn sin(freq: u32) -> Self {
        TrigPoly::term(PiExpr::one(), 0, freq, TrigKind::Sin)
    }

    /// `(φ/π)^p`.
    pub fn phi_power(p: u32) -> Self {
        TrigPoly::term(PiExpr::one(), p, 0, TrigKind::Cos)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms sorted by `(kind, freq, power)`.
    pub fn terms(&self) -> impl Iterator<Item = TrigTerm> + '_ {
        self.terms.iter().map(|(&(kind, freq, power), c)| TrigTerm {
            coeff: c.clone(),
            power,
            freq,
            kind,
        })
    }

    pub fn max_power(&self) -> u32 {
        self.terms.keys().map(|k| k.2).max().unwrap_or(0)
    }

    pub fn max_freq(&self) -> u32 {
        self.terms.keys().map(|k| k.1).max().unwrap_or(0)
    }

    fn add_term(&mut self, kind: TrigKind, freq: u32, power: u32, c: &PiExpr) {
        if c.is_zero() || (kind == TrigKind::Sin && freq == 0) {
            return;
        }
        let key = (kind, freq, power);
        match self.terms.get_mut(&key) {
            Some(slot) => {
                *slot += c;
                if slot.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c.clone());
            }
        }
    }

    /// Adds `sign · c · kind(freq)` where `freq` may be negative.
    fn add_signed(&mut self, kind: TrigKind, freq: i64, power: u32, c: &PiExpr) {
        if freq < 0 && kind == TrigKind::Sin {
            self.add_term(kind, (-freq) as u32, power, &-c);
        } else {
            self.add_term(kind, freq.unsigned_abs() as u32, power, c);
        }
    }

    pub fn add(&self, other: &TrigPoly) -> TrigPoly {
        let mut out = self.clone();
        for (&(kind, m, p), c) in &other.terms {
            out.add_term(kind, m, p, c);
        }
        out
    }

    pub fn sub(&self, other: &TrigPoly) -> TrigPoly {
        let mut out = self.clone();
        for (&(kind, m, p), c) in &other.terms {
            out.add_term(kind, m, p, &-c);
        }
        out
    }

    pub fn scale(&self, q: &PiExpr) -> TrigPoly {
        let mut out = TrigPoly::zero();
        for (&(kind, m, p), c) in &self.terms {
            out.add_term(kind, m, p, &(c * q));
        }
        out
    }

    /// Exact product via the product-to-sum identities.
    pub fn mul(&self, other: &TrigPoly) -> TrigPoly {
        use TrigKind::{Cos, Sin};
        let half = Rational::new(BigInt::from(1), BigInt::from(2));
        let mut out = TrigPoly::zero();
        for (&(ka, ma, pa), ca) in &self.terms {
            for (&(kb, mb, pb), cb) in &other.terms {
                let c = (ca * cb).scale(&half);
                let p = pa + pb;
                let (a, b) = (i64::from(ma), i64::from(mb));
                match (ka, kb) {
                    (Cos, Cos) => {
                        out.add_signed(Cos, a - b, p, &c);
                        out.add_signed(Cos, a + b, p, &c);
                    }
                    (Sin, Sin) => {
                        out.add_signed(Cos, a - b, p, &c);
                        out.add_signed(Cos, a + b, p, &-&c);
                    }
                    (Sin, Cos) => {
                        out.add_signed(Sin, a + b, p, &c);
                        out.add_signed(Sin, a - b, p, &c);
                    }
                    (Cos, Sin) => {
                        out.add_signed(Sin, a + b, p, &c);
                        out.add_signed(Sin, a - b, p, &-&c);
                    }
                }
            }
        }
        out
    }

    /// `self^e` by binary exponentiation.
    pub fn pow(&self, e: u32) -> TrigPoly {
        let mut acc = TrigPoly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// `∫_{-π/2}^{π/2} self(φ) dφ`, exact.
    pub fn integrate_full(&self) -> PiExpr {
        let mut by_freq: BTreeMap<u32, u32> = BTreeMap::new();
        for &(_, m, p) in self.terms.keys() {
            let e = by_freq.entry(m).or_insert(0);
            *e = (*e).max(p);
        }
        let mut tables: BTreeMap<u32, (Vec<PiExpr>, Vec<PiExpr>)> = BTreeMap::new();
        for (m, pmax) in by_freq {
            tables.insert(m, moment_table(m, pmax));
        }
        let mut acc = PiExpr::zero();
        for (&(kind, m, p), c) in &self.terms {
            let (cos_t, sin_t) = &tables[&m];
            let v = match kind {
                TrigKind::Cos => &cos_t[p as usize],
                TrigKind::Sin => &sin_t[p as usize],
            };
            if !v.is_zero() {
                acc += &(c * v);
            }
        }
        acc
    }

    /// `∫_{-π/2}^{π/2} self(φ) · other(φ) dφ` without building the product.
    ///
    /// Equal to `self.mul(other).integrate_full()`; cheaper when `other` has
    /// few terms with rational coefficients.
    pub fn integrate_product(&self, other: &TrigPoly) -> PiExpr {
        use TrigKind::{Cos, Sin};
        let fmax = self.max_freq() + other.max_freq();
        let pmax = self.max_power() + other.max_power();
        let moments: Vec<(Vec<PiExpr>, Vec<PiExpr>)> =
            (0..=fmax).map(|m| moment_table(m, pmax)).collect();
        // value of ∫ (φ/π)^p kind(fφ) for a possibly negative f
        let moment = |kind: TrigKind, f: i64, p: u32| -> PiExpr {
            let (c, s) = &moments[f.unsigned_abs() as usize];
            match kind {
                Cos => c[p as usize].clone(),
                Sin if f < 0 => -&s[p as usize],
                Sin => s[p as usize].clone(),
            }
        };
        let half = Rational::new(BigInt::one(), BigInt::from(2));
        let other_terms: Vec<((TrigKind, u32, u32), Option<Rational>, &PiExpr)> = other
            .terms
            .iter()
            .map(|(k, c)| (*k, c.as_rational(), c))
            .collect();
        let mut acc = PiExpr::zero();
        for (&(ka, ma, pa), ca) in &self.terms {
            let mut w = PiExpr::zero();
            for &((kb, mb, pb), ref qb, cb) in &other_terms {
                let p = pa + pb;
                let (a, b) = (i64::from(ma), i64::from(mb));
                let v = match (ka, kb) {
                    (Cos, Cos) => &moment(Cos, a - b, p) + &moment(Cos, a + b, p),
                    (Sin, Sin) => &moment(Cos, a - b, p) - &moment(Cos, a + b, p),
                    (Sin, Cos) => &moment(Sin, a + b, p) + &moment(Sin, a - b, p),
                    (Cos, Sin) => &moment(Sin, a + b, p) - &moment(Sin, a - b, p),
                };
                if v.is_zero() {
                    continue;
                }
                let t = match qb {
                    Some(q) => v.scale(q),
                    None => &v * cb,
                };
                w += &t;
            }
            if !w.is_zero() {
                acc += &(ca * &w);
            }
        }
        acc.scale(&half)
    }

    pub fn eval_f64(&self, phi: f64) -> f64 {
        let u = phi / std::f64::consts::PI;
        self.terms
            .iter()
            .map(|(&(kind, m, p), c)| {
                let t = match kind {
                    TrigKind::Cos => (f64::from(m) * phi).cos(),
                    TrigKind::Sin => (f64::from(m) * phi).sin(),
                };
                c.to_f64() * u.powi(p as i32) * t
            })
            .sum()
    }

    pub fn eval(&self, hp: &mut Hp, phi: &BigFloat) -> BigFloat {
        let pi = hp.pi();
        let u = hp.div(phi, &pi);
        let mut acc = hp.small(0);
        for (&(kind, m, p), c) in &self.terms {
            let mf = hp.small(i64::from(m));
            let arg = hp.mul(&mf, phi);
            let t = match kind {
                TrigKind::Cos => hp.cos(&arg),
                TrigKind::Sin => hp.sin(&arg),
            };
            let up = hp.powi(&u, i64::from(p));
            let cv = c.eval(hp);
            let term = hp.mul(&hp.mul(&cv, &up), &t);
            acc = hp.add(&acc, &term);
        }
        acc
    }
}

/// `∫ (φ/π)^p cos(mφ)` and `∫ (φ/π)^p sin(mφ)` over `[-π/2, π/2]` for `p = 0..=pmax`,
/// by repeated integration by parts.
fn moment_table(m: u32, pmax: u32) -> (Vec<PiExpr>, Vec<PiExpr>) {
    let n = pmax as usize + 1;
    let mut cos_t = Vec::with_capacity(n);
    let mut sin_t = Vec::with_capacity(n);
    if m == 0 {
        for p in 0..n {
            let v = if p % 2 == 0 {
                let den = BigInt::from(p + 1) << p;
                PiExpr::monomial(Rational::new(BigInt::one(), den), 2)
            } else {
                PiExpr::zero()
            };
            cos_t.push(v);
            sin_t.push(PiExpr::zero());
        }
        return (cos_t, sin_t);
    }
    // sin(mπ/2), cos(mπ/2) ∈ {0, ±1}
    let (s, c) = match m % 4 {
        0 => (0, 1),
        1 => (1, 0),
        2 => (0, -1),
        _ => (-1, 0),
    };
    let mq = BigInt::from(m);
    for p in 0..n {
        let half_p = Rational::new(BigInt::one(), BigInt::one() << p);
        let even = p % 2 == 0;
        // boundary terms: sin part nonzero only for even p, cos part only for odd p
        let cb = if even && s != 0 {
            PiExpr::rational(half_p.clone() * Rational::new(BigInt::from(2 * s), mq.clone()))
        } else {
            PiExpr::zero()
        };
        let sb = if !even && c != 0 {
            PiExpr::rational(half_p * Rational::new(BigInt::from(-2 * c), mq.clone()))
        } else {
            PiExpr::zero()
        };
        let (cv, sv) = if p == 0 {
            (cb, PiExpr::zero())
        } else {
            let f = Rational::new(BigInt::from(p), mq.clone());
            let cv = &cb - &sin_t[p - 1].scale(&f).shift(-2);
            let sv = &sb + &cos_t[p - 1].scale(&f).shift(-2);
            (cv, sv)
        };
        cos_t.push(cv);
        sin_t.push(sv);
    }
    (cos_t, sin_t)
}

impl fmt::Display for TrigPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for TrigPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TrigPoly[{self}]")
    }
}

/// `cos^k φ = 2^-k Σ_j C(k,j) cos((k-2j)φ)`.
pub fn cos_power_expand(k: u32) -> TrigPoly {
    let scale = Rational::new(BigInt::one(), BigInt::one() << k);
    let mut out = TrigPoly::zero();
    for j in 0..=k {
        let f = i64::from(k) - 2 * i64::from(j);
        let c = PiExpr::rational(Rational::from_integer(binomial(k, j)) * &scale);
        out.add_signed(TrigKind::Cos, f, 0, &c);
    }
    out
}

/// `c · ∫_{-π/2}^{φ} cos^a θ dθ` as a trigonometric polynomial in `φ`.
fn cos_power_antiderivative(a: u32, c: &PiExpr) -> TrigPoly {
    let mut out = TrigPoly::zero();
    for t in cos_power_expand(a).terms() {
        let q = &t.coeff * c;
        if t.freq == 0 {
            // φ + π/2 = π·(φ/π) + π/2
            let qpi = q.shift(2);
            out.add_term(TrigKind::Cos, 0, 1, &qpi);
            out.add_term(TrigKind::Cos, 0, 0, &qpi.scale(&Rational::new(1.into(), 2.into())));
        } else {
            let f = t.freq;
            let qf = q.scale(&Rational::new(BigInt::one(), BigInt::from(f)));
            out.add_term(TrigKind::Sin, f, 0, &qf);
            let s = match f % 4 {
                1 => 1,
                3 => -1,
                _ => 0,
            };
            if s != 0 {
                out.add_term(TrigKind::Cos, 0, 0, &qf.scale(&Rational::from_integer(s.into())));
            }
        }
    }
    out
}

/// Distribution function of the one-dimensional beta law with density
/// `c · cos^α θ` on `[-π/2, π/2]`, as a function of `φ`.
pub fn inner_cdf(alpha: i64) -> Result<TrigPoly> {
    if alpha < 0 {
        return domain(format!("inner_cdf needs alpha >= 0, got {alpha}"));
    }
    let c = c_one(HalfInt::from_twice(alpha - 1))?;
    Ok(cos_power_antiderivative(alpha as u32, &c))
}

/// Beta' analogue of [`inner_cdf`]: density `c̃ · cos^{α-1} θ`.
pub fn inner_cdf_tilde(alpha: i64) -> Result<TrigPoly> {
    if alpha < 1 {
        return domain(format!("inner_cdf_tilde needs alpha >= 1, got {alpha}"));
    }
    let c = c_tilde_one(HalfInt::from_twice(alpha + 1))?;
    Ok(cos_power_antiderivative((alpha - 1) as u32, &c))
}

pub fn trig_mul(a: &TrigPoly, b: &TrigPoly) -> TrigPoly {
    a.mul(b)
}

pub fn trig_pow(a: &TrigPoly, e: u32) -> TrigPoly {
    a.pow(e)
}

pub fn integrate_full(a: &TrigPoly) -> PiExpr {
    a.integrate_full()
}

/// Value of a polynomial at `φ = ±π/2`, exact.
pub fn eval_at_half_pi(a: &TrigPoly, positive: bool) -> PiExpr {
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let mut acc = PiExpr::zero();
    for t in a.terms() {
        // (φ/π)^p = (±1/2)^p
        let mut u = num_traits::pow(half.clone(), t.power as usize);
        if !positive && t.power % 2 == 1 {
            u = -u;
        }
        let trig = match (t.kind, t.freq % 4) {
            (TrigKind::Cos, 0) => 1,
            (TrigKind::Cos, 2) => -1,
            (TrigKind::Cos, _) => 0,
            (TrigKind::Sin, 1) => 1,
            (TrigKind::Sin, 3) => -1,
            (TrigKind::Sin, _) => 0,
        };
        let sign = if t.kind == TrigKind::Sin && !positive { -trig } else { trig };
        if sign != 0 {
            acc += &t.coeff.scale(&(u * Rational::from_integer(sign.into())));
        }
    }
    acc
}
