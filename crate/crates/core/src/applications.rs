//! Stochastic-geometry quantities built from the angle tables: f-vectors of
//! the typical Poisson-Voronoi cell, limiting f-vector constants of random
//! polytopes in and on the unit ball, and closed forms for `J(n, 1, ±1/2)`.

use num_bigint::BigInt;

use crate::error::domain;
use crate::exact::{central_binomial, gamma_half, GammaProduct, HalfInt, PiExpr, Rational};
use crate::tables::{arithmetic_structure_check, AngleTable, ConjectureRow, Family, StructureCheck};
use crate::{Error, Result};

fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn qf(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// `Γ(t/2)` for `t ≥ 1`.
fn g2(t: i64) -> PiExpr {
    gamma_half(HalfInt::from_twice(t)).expect("positive argument")
}

fn div(a: &PiExpr, b: &PiExpr) -> PiExpr {
    a * &b.recip().expect("Gamma values are monomials")
}

fn entry_json(x: &PiExpr, digits: usize) -> serde_json::Value {
    let mut v = x.to_json_value();
    v["decimal"] = serde_json::Value::String(x.to_decimal(digits));
    v
}

/// Expected f-vector `(E f₀, …, E f_{d−1})` of a random polytope.
#[derive(Clone, Debug, PartialEq)]
pub struct FVector {
    pub dim: u32,
    pub entries: Vec<PiExpr>,
}

impl FVector {
    /// `Σ (−1)ᵏ fₖ`.
    pub fn euler_characteristic(&self) -> PiExpr {
        self.entries
            .iter()
            .enumerate()
            .map(|(k, x)| if k % 2 == 0 { x.clone() } else { -x })
            .sum()
    }

    /// `{"dim":d,"entries":[{"terms":…,"decimal":"…"},…]}`.
    pub fn to_json(&self, digits: usize) -> String {
        let entries: Vec<_> = self.entries.iter().map(|x| entry_json(x, digits)).collect();
        serde_json::json!({ "dim": self.dim, "entries": entries }).to_string()
    }
}

/// Limiting f-vector constants for random polytopes in the unit ball,
/// stored as `C_{d,k} = prefactor × vector[k]`.
#[derive(Clone, Debug)]
pub struct ReitznerResult {
    pub dim: u32,
    pub prefactor: GammaProduct,
    pub vector: Vec<PiExpr>,
}

impl ReitznerResult {
    /// Factor turning `C_{d,k}` into the body-independent constant
    /// `c_{d,k} = C_{d,k} · Γ(1+d/2)^{2/(d+1)} / (d π^{d/(d+1)})`.
    pub fn normalization(&self) -> GammaProduct {
        let d = i64::from(self.dim);
        let g = GammaProduct::from_monomial(&g2(d + 2))
            .expect("monomial")
            .pow(&qf(2, d + 1))
            .expect("positive factor");
        g.mul(&GammaProduct::rational(qf(1, d)).times_pi(-qf(d, d + 1)))
    }

    /// `prefactor` of `c_{d,•}`, so that `c_{d,k} = c_prefactor() × vector[k]`.
    pub fn c_prefactor(&self) -> GammaProduct {
        self.prefactor.mul(&self.normalization())
    }

    /// Decimal value of `C_{d,k}`.
    pub fn constant_decimal(&self, k: usize, digits: usize) -> Result<String> {
        let v = self
            .vector
            .get(k)
            .ok_or_else(|| Error::Domain(format!("k = {k} out of range for d = {}", self.dim)))?;
        Ok(crate::exact::hp::decimal_string(digits, 64, |h| {
            let a = self.prefactor.eval(h);
            let b = v.eval(h);
            h.mul(&a, &b)
        }))
    }

    pub fn to_json(&self, digits: usize) -> String {
        let mut pref = self.prefactor.to_json_value();
        pref["decimal"] = serde_json::Value::String(self.prefactor.to_decimal(digits));
        let vector: Vec<_> = self.vector.iter().map(|x| entry_json(x, digits)).collect();
        let constants: Vec<_> = (0..self.vector.len())
            .map(|k| self.constant_decimal(k, digits).expect("index in range"))
            .collect();
        serde_json::json!({
            "dim": self.dim,
            "prefactor": pref,
            "vector": vector,
            "constants_decimal": constants,
        })
        .to_string()
    }
}

/// `lim_{n→∞} Ĩ(n, m, d) = Γ((md+1)/2)/Γ(md/2) · (Γ(d/2)/Γ((d+1)/2))^m · (√π d)^{m−1}/m`.
pub fn i_inf_tilde(m: u32, d: u32) -> Result<PiExpr> {
    if m < 1 || d < 1 {
        return domain(format!("I_inf_tilde needs m, d >= 1, got m = {m}, d = {d}"));
    }
    let (m, d) = (i64::from(m), i64::from(d));
    let lead = div(&g2(m * d + 1), &g2(m * d));
    let ratio = div(&g2(d), &g2(d + 1)).pow(m)?;
    let tail = PiExpr::sqrt_pi_pow((m - 1) as i32).scale(&(num_traits::pow(q(d), (m - 1) as usize) / q(m)));
    Ok(&(&lead * &ratio) * &tail)
}

/// Expected f-vector of the typical cell of a unit-intensity Poisson-Voronoi
/// tessellation of `ℝ^d`.
pub fn voronoi_f_vector(table: &AngleTable, d: u32) -> Result<FVector> {
    if d < 2 {
        return domain(format!("Voronoi f-vector needs d >= 2, got {d}"));
    }
    let mut entries = Vec::with_capacity(d as usize);
    for k in 0..d {
        let mut acc = PiExpr::zero();
        for m in (d - k..=d).filter(|m| (d - m).is_multiple_of(2)) {
            let beta = HalfInt::from_twice(i64::from(m) - 1 + i64::from(d));
            let j = table.big_j_tilde(m, d - k, beta)?;
            acc += &(&i_inf_tilde(m, d)? * &j);
        }
        entries.push(acc.scale(&q(2)));
    }
    Ok(FVector { dim: d, entries })
}

/// `E f₀` of the typical Poisson-Voronoi cell:
/// `2^{d+1}π^{(d−1)/2}/d² · Γ((d²+1)/2)/Γ(d²/2) · (Γ((d+2)/2)/Γ((d+1)/2))^d`.
pub fn moller_f0(d: u32) -> Result<PiExpr> {
    if d < 2 {
        return domain(format!("E f0 of the Voronoi cell needs d >= 2, got {d}"));
    }
    let d = i64::from(d);
    let lead = PiExpr::sqrt_pi_pow((d - 1) as i32).scale(&(num_traits::pow(q(2), (d + 1) as usize) / q(d * d)));
    let g = div(&g2(d * d + 1), &g2(d * d));
    let r = div(&g2(d + 2), &g2(d + 1)).pow(d)?;
    Ok(&(&lead * &g) * &r)
}

/// `C_{d,d−1}`, the Gamma prefactor of the ball constants:
/// `2π^{d(d−1)/(2(d+1))}/(d+1)! · Γ(1+d²/2)Γ((d²+1)/(d+1))/Γ((d²+1)/2)
///  · ((d+1)Γ((d+1)/2)/Γ(1+d/2))^{(d²+1)/(d+1)}`.
pub fn reitzner_ball_prefactor(d: u32) -> Result<GammaProduct> {
    if d < 1 {
        return domain("ball constants need d >= 1");
    }
    let d = i64::from(d);
    let fact: BigInt = (1..=d + 1).map(BigInt::from).product();
    let inner = GammaProduct::rational(q(d + 1))
        .times_gamma(qf(d + 1, 2), 1)?
        .times_gamma(qf(d + 2, 2), -1)?
        .fold_half_integers()
        .pow(&qf(d * d + 1, d + 1))?;
    let out = GammaProduct::rational(Rational::new(BigInt::from(2), fact))
        .times_pi(qf(d * (d - 1), 2 * (d + 1)))
        .times_gamma(qf(d * d + 2, 2), 1)?
        .times_gamma(qf(d * d + 1, d + 1), 1)?
        .times_gamma(qf(d * d + 1, 2), -1)?
        .mul(&inner);
    Ok(out.fold_half_integers())
}

/// Limiting constants `C_{d,k} = lim n^{−(d−1)/(d+1)} E f_k` for the convex
/// hull of `n` uniform points in the unit `d`-ball.
pub fn reitzner_ball(table: &AngleTable, d: u32) -> Result<ReitznerResult> {
    let prefactor = reitzner_ball_prefactor(d)?;
    let vector = table.j_row(d, HalfInt::from_twice(1), Default::default())?;
    Ok(ReitznerResult { dim: d, prefactor, vector })
}

/// `K_d = 2^d π^{d/2−1}/(d(d−1)²) · Γ(1+d(d−2)/2)/Γ((d−1)²/2) · (Γ((d+1)/2)/Γ(d/2))^{d−1}`.
pub fn reitzner_sphere_prefactor(d: u32) -> Result<PiExpr> {
    if d < 2 {
        return domain(format!("sphere constants need d >= 2, got {d}"));
    }
    let d = i64::from(d);
    let g = GammaProduct::rational(num_traits::pow(q(2), d as usize) / q(d * (d - 1) * (d - 1)))
        .times_pi(qf(d - 2, 2))
        .times_gamma(qf(d * (d - 2) + 2, 2), 1)?
        .times_gamma(qf((d - 1) * (d - 1), 2), -1)?
        .times_gamma(qf(d + 1, 2), d - 1)?
        .times_gamma(qf(d, 2), 1 - d)?;
    g.to_pi_expr()
        .ok_or_else(|| Error::Internal(format!("sphere prefactor for d = {d} left the ring: {g}")))
}

/// Limiting constants `C*_{d,k} = lim E f_k / n` for the convex hull of `n`
/// uniform points on the unit sphere `S^{d−1}`. Entry 0 is always 1.
pub fn reitzner_sphere(table: &AngleTable, d: u32) -> Result<Vec<PiExpr>> {
    let k = reitzner_sphere_prefactor(d)?;
    let row = table.j_row(d, HalfInt::from_twice(-1), Default::default())?;
    Ok(row.iter().map(|j| &k * j).collect())
}

/// `J(n, 1, 1/2)` from its Gamma form
/// `n(n²+1)(n²+n+2)/(2^{n+1}(n+3)π^{(n−2)/2}) · (Γ((n+2)/2)/Γ((n+3)/2))^{n−1} · Γ((n²+1)/2)/Γ((n²+2)/2)`.
pub fn closed_j_n1_half(n: u32) -> Result<PiExpr> {
    if n < 1 {
        return domain("closed form needs n >= 1");
    }
    let n = i64::from(n);
    let lead = qf(n * (n * n + 1) * (n * n + n + 2), n + 3) / num_traits::pow(q(2), (n + 1) as usize);
    let r = div(&g2(n + 2), &g2(n + 3)).pow(n - 1)?;
    let g = div(&g2(n * n + 1), &g2(n * n + 2));
    Ok((&r * &g).shift(-(n as i32 - 2)).scale(&lead))
}

/// `J(n, 1, 1/2)` from the central-binomial form
/// `n(n²+1)(n²+n+2)π/((n+3)2^{n(2n+1)}) · C(n+1, (n+1)/2)^{n−1} · C(n², n²/2)`.
pub fn closed_j_n1_half_binomial(n: u32) -> Result<PiExpr> {
    if n < 1 {
        return domain("closed form needs n >= 1");
    }
    let m = i64::from(n);
    let lead = qf(m * (m * m + 1) * (m * m + m + 2), m + 3) / num_traits::pow(q(2), (m * (2 * m + 1)) as usize);
    let b = &central_binomial(n + 1).pow(m - 1)? * &central_binomial(n * n);
    Ok(b.shift(2).scale(&lead))
}

/// `J(n, 1, −1/2)` from its Gamma form
/// `n(n−1)²/(2^n π^{(n−2)/2}) · (Γ(n/2)/Γ((n+1)/2))^{n−1} · Γ((n−1)²/2)/Γ(((n−1)²+1)/2)`.
pub fn closed_j_n1_minus_half(n: u32) -> Result<PiExpr> {
    if n < 2 {
        return domain(format!("closed form needs n >= 2, got {n}"));
    }
    let n = i64::from(n);
    let lead = qf(n * (n - 1) * (n - 1), 1) / num_traits::pow(q(2), n as usize);
    let r = div(&g2(n), &g2(n + 1)).pow(n - 1)?;
    let s = (n - 1) * (n - 1);
    let g = div(&g2(s), &g2(s + 1));
    Ok((&r * &g).shift(-(n as i32 - 2)).scale(&lead))
}

/// `J(n, 1, −1/2)` from the central-binomial form
/// `2^{1−n} n C(n−1, (n−1)/2)^{n−1} / C((n−1)², (n−1)²/2)`.
pub fn closed_j_n1_minus_half_binomial(n: u32) -> Result<PiExpr> {
    if n < 2 {
        return domain(format!("closed form needs n >= 2, got {n}"));
    }
    let m = i64::from(n);
    let lead = q(m) / num_traits::pow(q(2), (m - 1) as usize);
    let b = &central_binomial(n - 1).pow(m - 1)? * &central_binomial((n - 1) * (n - 1)).recip()?;
    Ok(b.scale(&lead))
}

/// Checks entry `k` of the Voronoi f-vector in dimension `d` against the
/// allowed support: rational for even `d`, otherwise a combination of
/// `π^{d−1}, π^{d−3}, …` down to `π^{d−k−1}` (even `k`) or `π^{d−k}` (odd `k`).
pub fn voronoi_structure_check(value: &PiExpr, d: u32, k: u32) -> StructureCheck {
    let allowed: Vec<i32> = if d.is_multiple_of(2) {
        vec![0]
    } else {
        let (d, k) = (d as i32, k as i32);
        let low = if k % 2 == 0 { d - k - 1 } else { d - k };
        (low..=d - 1).step_by(2).map(|p| 2 * p).collect()
    };
    let support = value.support();
    let violations: Vec<i32> = support.iter().copied().filter(|e| !allowed.contains(e)).collect();
    StructureCheck { pass: violations.is_empty(), support, allowed, violations }
}

/// Instances of the monomial pattern `E f_k = q π^{d−k}` for odd `d` and odd `k`.
pub fn voronoi_conjecture_rows(f: &FVector) -> Vec<ConjectureRow> {
    let d = f.dim;
    if d.is_multiple_of(2) {
        return Vec::new();
    }
    (1..d)
        .step_by(2)
        .map(|k| {
            let value = f.entries[k as usize].clone();
            let expected = (d - k) as i32;
            let holds = matches!(value.as_monomial(), Some((_, e)) if e == 2 * expected);
            ConjectureRow {
                family: Family::JTilde,
                n: d,
                k,
                beta: HalfInt::from_int(i64::from(d)),
                value,
                expected_pi_exp: expected,
                holds,
            }
        })
        .collect()
}

/// Structure check of every entry of a J or J-tilde row.
pub fn row_structure(row: &[PiExpr], n: u32, param: HalfInt, family: Family) -> Vec<StructureCheck> {
    row.iter()
        .enumerate()
        .map(|(i, v)| arithmetic_structure_check(v, n, i as u32 + 1, param, family))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pe(s: &str) -> PiExpr {
        s.parse().unwrap()
    }

    #[test]
    fn i_inf_values() {
        for d in 1..8 {
            assert_eq!(i_inf_tilde(1, d).unwrap(), PiExpr::one());
        }
        assert_eq!(i_inf_tilde(2, 2).unwrap(), PiExpr::int(3));
        assert!(i_inf_tilde(0, 2).is_err());
    }

    #[test]
    fn low_dimensional_voronoi() {
        let t = AngleTable::new();
        let f2 = voronoi_f_vector(&t, 2).unwrap();
        assert_eq!(f2.entries, vec![PiExpr::int(6), PiExpr::int(6)]);
        let f3 = voronoi_f_vector(&t, 3).unwrap();
        assert_eq!(
            f3.entries,
            vec![pe("96/35 * pi^2"), pe("144/35 * pi^2"), pe("2 + 48/35 * pi^2")]
        );
        assert_eq!(moller_f0(3).unwrap(), f3.entries[0]);
        assert_eq!(moller_f0(2).unwrap(), PiExpr::int(6));
        assert!(voronoi_f_vector(&t, 1).is_err());
    }

    #[test]
    fn euler_relation() {
        let t = AngleTable::new();
        for d in 2..=6u32 {
            let f = voronoi_f_vector(&t, d).unwrap();
            let expected = if d % 2 == 0 { PiExpr::zero() } else { PiExpr::int(2) };
            assert_eq!(f.euler_characteristic(), expected, "d = {d}");
            for (k, x) in f.entries.iter().enumerate() {
                assert!(voronoi_structure_check(x, d, k as u32).pass, "d = {d}, k = {k}");
            }
        }
    }

    #[test]
    fn ball_constants() {
        let t = AngleTable::new();
        let r1 = reitzner_ball(&t, 1).unwrap();
        assert_eq!(r1.prefactor.to_pi_expr(), Some(PiExpr::int(2)));
        assert_eq!(r1.vector, vec![PiExpr::one()]);
        let r3 = reitzner_ball(&t, 3).unwrap();
        // 35/4 · √(π/3)
        let expected = GammaProduct::rational(qf(35, 4))
            .times_pi(qf(1, 2))
            .times_power(q(3), qf(-1, 2))
            .unwrap();
        assert_eq!(r3.prefactor.to_decimal(25), expected.to_decimal(25));
        assert_eq!(r3.vector, vec![pe("1/2"), pe("3/2"), pe("1")]);
        let r2 = reitzner_ball(&t, 2).unwrap();
        // 2 · (2/3)^{1/3} · π^{2/3} · Γ(5/3), reference value from mpmath
        assert_eq!(r2.prefactor.to_decimal(15), "3.38322896579692");
        assert!(r2.constant_decimal(2, 5).is_err());
    }

    #[test]
    fn sphere_constants() {
        let t = AngleTable::new();
        assert_eq!(reitzner_sphere(&t, 3).unwrap(), vec![pe("1"), pe("3"), pe("2")]);
        assert_eq!(
            reitzner_sphere(&t, 4).unwrap(),
            vec![pe("1"), pe("1 + 24/35 * pi^2"), pe("48/35 * pi^2"), pe("24/35 * pi^2")]
        );
        assert!(reitzner_sphere(&t, 1).is_err());
    }

    #[test]
    fn closed_forms() {
        assert_eq!(closed_j_n1_half(3).unwrap(), pe("1/2"));
        assert_eq!(closed_j_n1_half(1).unwrap(), PiExpr::one());
        assert_eq!(closed_j_n1_minus_half(2).unwrap(), PiExpr::one());
        assert_eq!(closed_j_n1_minus_half(4).unwrap(), pe("35/24 * pi^-2"));
        for n in 1..=12 {
            assert_eq!(closed_j_n1_half(n).unwrap(), closed_j_n1_half_binomial(n).unwrap(), "n = {n}");
        }
        for n in 2..=12 {
            assert_eq!(
                closed_j_n1_minus_half(n).unwrap(),
                closed_j_n1_minus_half_binomial(n).unwrap(),
                "n = {n}"
            );
        }
    }

    #[test]
    fn json_has_decimals() {
        let t = AngleTable::new();
        let j: serde_json::Value = serde_json::from_str(&voronoi_f_vector(&t, 2).unwrap().to_json(5)).unwrap();
        assert_eq!(j["entries"][0]["decimal"], "6.0000");
        let back = PiExpr::from_json(&j["entries"][1].to_string()).unwrap();
        assert_eq!(back, PiExpr::int(6));
    }
}
