//! Exact expected external-angle sums `I`, `Ĩ` and internal-angle sums `J`, `J̃`
//! of beta and beta' simplices, memoized in an [`AngleTable`].
//!
//! `I` and `Ĩ` are one-dimensional trigonometric integrals evaluated
//! symbolically. `J` and `J̃` follow from them either by recursion over the
//! number of vertices or by summing over decreasing chains of vertex counts.

mod cache;
mod checks;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use rayon::prelude::*;

use crate::error::domain;
use crate::exact::{binomial, c_one, c_tilde_one, HalfInt, PiExpr, Rational};
use crate::trig::{cos_power_expand, inner_cdf, inner_cdf_tilde, TrigPoly};
use crate::{Error, Result};

pub use cache::{CacheLoad, CACHE_SCHEMA};
pub use checks::{
    arithmetic_structure_check, ConjectureReport, ConjectureRow, RelationReport, StructureCheck,
};

/// Which of the four tabulated quantities a key refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    I,
    ITilde,
    J,
    JTilde,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::I => "I",
            Family::ITilde => "I-tilde",
            Family::J => "J",
            Family::JTilde => "J-tilde",
        }
    }

    pub fn from_name(s: &str) -> Option<Family> {
        match s {
            "I" => Some(Family::I),
            "I-tilde" => Some(Family::ITilde),
            "J" => Some(Family::J),
            "J-tilde" => Some(Family::JTilde),
            _ => None,
        }
    }
}

/// The simplex model: vertices from a beta or a beta' distribution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimplexFamily {
    Beta,
    BetaPrime,
}

impl fmt::Display for SimplexFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SimplexFamily::Beta => "beta",
            SimplexFamily::BetaPrime => "beta-prime",
        })
    }
}

impl std::str::FromStr for SimplexFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "beta" => Ok(SimplexFamily::Beta),
            "beta-prime" => Ok(SimplexFamily::BetaPrime),
            _ => Err(Error::Parse(format!("unknown family {s:?}; expected beta or beta-prime"))),
        }
    }
}

/// How a stored value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Provenance {
    Recursion,
    DirectSum,
    ClosedForm,
}

impl Provenance {
    pub fn name(self) -> &'static str {
        match self {
            Provenance::Recursion => "recursion",
            Provenance::DirectSum => "direct-sum",
            Provenance::ClosedForm => "closed-form",
        }
    }

    pub fn from_name(s: &str) -> Option<Provenance> {
        match s {
            "recursion" => Some(Provenance::Recursion),
            "direct-sum" => Some(Provenance::DirectSum),
            "closed-form" => Some(Provenance::ClosedForm),
            _ => None,
        }
    }
}

/// Computation path for `J` and `J̃`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum JPath {
    /// Recursion over `n − 2s` (half the terms of the full recursion).
    #[default]
    Recursion,
    /// Recursion over every `n − s`.
    RecursionFull,
    /// Sum over all decreasing chains `n > n₁ > … ≥ k`.
    Direct,
    /// Sum over chains with `n − nᵢ` even.
    DirectParity,
}

/// Table key; `param` is `α` for `I`, `Ĩ` and `β` for `J`, `J̃`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Key {
    pub family: Family,
    pub n: u32,
    pub k: u32,
    pub param: HalfInt,
}

#[derive(Clone, Debug)]
struct Entry {
    value: PiExpr,
    provenance: Provenance,
}

/// Memo store for exact table values.
///
/// Readers run concurrently; values are computed outside the lock and
/// published whole. A second computation of a stored key must agree with the
/// stored value, otherwise [`Error::Inconsistent`] is returned.
#[derive(Default)]
pub struct AngleTable {
    entries: RwLock<HashMap<Key, Entry>>,
    cdf_powers: RwLock<HashMap<(bool, i64), Arc<Vec<TrigPoly>>>>,
}

fn binom_q(n: u32, k: u32) -> Rational {
    Rational::from_integer(binomial(n, k))
}

fn check_nk(n: u32, k: u32) -> Result<()> {
    if n == 0 || k == 0 || k > n {
        return domain(format!("need 1 <= k <= n, got n = {n}, k = {k}"));
    }
    Ok(())
}

impl AngleTable {
    pub fn new() -> Self {
        AngleTable::default()
    }

    /// Process-wide shared table.
    pub fn global() -> &'static AngleTable {
        static GLOBAL: OnceLock<AngleTable> = OnceLock::new();
        GLOBAL.get_or_init(AngleTable::new)
    }

    pub fn len(&self) -> usize {
        self.entries.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, key: &Key) -> Option<(PiExpr, Provenance)> {
        self.entries
            .read()
            .unwrap()
            .get(key)
            .map(|e| (e.value.clone(), e.provenance))
    }

    /// All entries sorted by key.
    pub fn snapshot(&self) -> Vec<(Key, PiExpr, Provenance)> {
        let map = self.entries.read().unwrap();
        let mut v: Vec<_> = map
            .iter()
            .map(|(k, e)| (*k, e.value.clone(), e.provenance))
            .collect();
        v.sort_by_key(|a| a.0);
        v
    }

    /// Publishes a value; an existing entry must agree exactly.
    fn store(&self, key: Key, value: PiExpr, provenance: Provenance) -> Result<PiExpr> {
        let mut map = self.entries.write().unwrap();
        if let Some(old) = map.get(&key) {
            if old.value != value {
                return Err(Error::Inconsistent(format!(
                    "{} n={} k={} param={}: stored ({}) {} but recomputed ({}) {}",
                    key.family.name(),
                    key.n,
                    key.k,
                    key.param,
                    old.provenance.name(),
                    old.value,
                    provenance.name(),
                    value
                )));
            }
            return Ok(old.value.clone());
        }
        map.insert(key, Entry { value: value.clone(), provenance });
        Ok(value)
    }

    fn lookup(&self, key: &Key) -> Option<PiExpr> {
        self.entries.read().unwrap().get(key).map(|e| e.value.clone())
    }

    /// `F^0, …, F^j` for the distribution function of the given law.
    fn cdf_powers(&self, tilde: bool, alpha: i64, j: u32) -> Result<Arc<Vec<TrigPoly>>> {
        let key = (tilde, alpha);
        if let Some(v) = self.cdf_powers.read().unwrap().get(&key) {
            if v.len() > j as usize {
                return Ok(v.clone());
            }
        }
        let f = if tilde { inner_cdf_tilde(alpha)? } else { inner_cdf(alpha)? };
        let mut powers = match self.cdf_powers.read().unwrap().get(&key) {
            Some(v) => v.as_ref().clone(),
            None => vec![TrigPoly::one()],
        };
        while powers.len() <= j as usize {
            let next = powers.last().unwrap().mul(&f);
            powers.push(next);
        }
        let powers = Arc::new(powers);
        let mut map = self.cdf_powers.write().unwrap();
        let keep = match map.get(&key) {
            Some(existing) if existing.len() >= powers.len() => existing.clone(),
            _ => {
                map.insert(key, powers.clone());
                powers
            }
        };
        Ok(keep)
    }

    /// Expected sum of external angles of the beta simplex with `n` vertices
    /// at its `k`-vertex faces, for integer `α ≥ 0`.
    pub fn big_i(&self, n: u32, k: u32, alpha: i64) -> Result<PiExpr> {
        check_nk(n, k)?;
        if alpha < 0 {
            return domain(format!("I needs integer alpha >= 0, got {alpha}"));
        }
        self.external(false, n, k, alpha)
    }

    /// Beta' analogue of [`AngleTable::big_i`], for integer `α ≥ 1`.
    pub fn big_i_tilde(&self, n: u32, k: u32, alpha: i64) -> Result<PiExpr> {
        check_nk(n, k)?;
        if alpha < 1 {
            return domain(format!("I-tilde needs integer alpha >= 1, got {alpha}"));
        }
        self.external(true, n, k, alpha)
    }

    fn external(&self, tilde: bool, n: u32, k: u32, alpha: i64) -> Result<PiExpr> {
        let family = if tilde { Family::ITilde } else { Family::I };
        let key = Key { family, n, k, param: HalfInt::from_int(alpha) };
        if let Some(v) = self.lookup(&key) {
            return Ok(v);
        }
        let value = if k == n {
            PiExpr::one()
        } else {
            self.external_integral(tilde, n, k, alpha)?
        };
        self.store(key, value, Provenance::ClosedForm)
    }

    fn external_integral(&self, tilde: bool, n: u32, k: u32, alpha: i64) -> Result<PiExpr> {
        let ak = alpha * i64::from(k);
        // density constant and power of cos in front of F^{n-k}
        let (c, cos_pow) = if tilde {
            (c_tilde_one(HalfInt::from_twice(ak + 1))?, ak - 1)
        } else {
            (c_one(HalfInt::from_twice(ak - 1))?, ak)
        };
        let powers = self.cdf_powers(tilde, alpha, n - k)?;
        let outer = cos_power_expand(cos_pow as u32);
        let integral = powers[(n - k) as usize].integrate_product(&outer);
        Ok((&integral * &c).scale(&binom_q(n, k)))
    }

    /// Computes `I(n', m, α)` for every pair in `pairs` in parallel.
    fn prefetch_external(&self, tilde: bool, alpha: i64, pairs: BTreeSet<(u32, u32)>) -> Result<()> {
        let family = if tilde { Family::ITilde } else { Family::I };
        let missing: Vec<(u32, u32)> = pairs
            .into_iter()
            .filter(|&(n, m)| {
                m < n && self.lookup(&Key { family, n, k: m, param: HalfInt::from_int(alpha) }).is_none()
            })
            .collect();
        if missing.len() < 2 {
            return Ok(());
        }
        let jmax = missing.iter().map(|(n, m)| n - m).max().unwrap_or(0);
        self.cdf_powers(tilde, alpha, jmax)?;
        missing
            .par_iter()
            .map(|&(n, m)| self.external(tilde, n, m, alpha).map(|_| ()))
            .collect::<Result<Vec<()>>>()?;
        Ok(())
    }

    /// Expected sum of internal angles of the beta simplex with `n` vertices
    /// at its `k`-vertex faces, for half-integer `β ≥ −1`.
    pub fn big_j(&self, n: u32, k: u32, beta: HalfInt) -> Result<PiExpr> {
        self.big_j_with(n, k, beta, JPath::Recursion)
    }

    /// Beta' analogue of [`AngleTable::big_j`]; needs `2β − n + 1 ≥ 1`.
    pub fn big_j_tilde(&self, n: u32, k: u32, beta: HalfInt) -> Result<PiExpr> {
        self.big_j_tilde_with(n, k, beta, JPath::Recursion)
    }

    pub fn big_j_with(&self, n: u32, k: u32, beta: HalfInt, path: JPath) -> Result<PiExpr> {
        self.internal(false, n, k, beta, path)
    }

    pub fn big_j_tilde_with(&self, n: u32, k: u32, beta: HalfInt, path: JPath) -> Result<PiExpr> {
        self.internal(true, n, k, beta, path)
    }

    /// `J` by the chain sum; `parity_restricted` selects chains with `n − nᵢ` even.
    pub fn big_j_direct(&self, n: u32, k: u32, beta: HalfInt, parity_restricted: bool) -> Result<PiExpr> {
        let path = if parity_restricted { JPath::DirectParity } else { JPath::Direct };
        self.internal(false, n, k, beta, path)
    }

    pub fn big_j_tilde_direct(
        &self,
        n: u32,
        k: u32,
        beta: HalfInt,
        parity_restricted: bool,
    ) -> Result<PiExpr> {
        let path = if parity_restricted { JPath::DirectParity } else { JPath::Direct };
        self.internal(true, n, k, beta, path)
    }

    /// `(J(n,1,β), …, J(n,n,β))`.
    pub fn j_row(&self, n: u32, beta: HalfInt, path: JPath) -> Result<Vec<PiExpr>> {
        (1..=n).map(|k| self.big_j_with(n, k, beta, path)).collect()
    }

    pub fn j_tilde_row(&self, n: u32, beta: HalfInt, path: JPath) -> Result<Vec<PiExpr>> {
        (1..=n).map(|k| self.big_j_tilde_with(n, k, beta, path)).collect()
    }

    /// The `I`/`Ĩ` parameter shared by every term of the expansion.
    fn external_param(tilde: bool, n: u32, beta: HalfInt) -> i64 {
        if tilde {
            beta.twice() - i64::from(n) + 1
        } else {
            beta.twice() + i64::from(n) - 1
        }
    }

    fn check_internal(tilde: bool, n: u32, k: u32, beta: HalfInt) -> Result<()> {
        check_nk(n, k)?;
        if tilde {
            if Self::external_param(true, n, beta) < 1 {
                return domain(format!(
                    "J-tilde needs 2*beta - n + 1 >= 1, got n = {n}, beta = {beta}"
                ));
            }
        } else if beta.twice() < -2 {
            return domain(format!("J needs beta >= -1, got {beta}"));
        }
        Ok(())
    }

    fn internal(&self, tilde: bool, n: u32, k: u32, beta: HalfInt, path: JPath) -> Result<PiExpr> {
        Self::check_internal(tilde, n, k, beta)?;
        let family = if tilde { Family::JTilde } else { Family::J };
        let key = Key { family, n, k, param: beta };
        if k == n {
            return self.store(key, PiExpr::one(), Provenance::ClosedForm);
        }
        if k + 1 == n {
            return self.store(key, PiExpr::frac(i64::from(n), 2), Provenance::ClosedForm);
        }
        let alpha = Self::external_param(tilde, n, beta);
        match path {
            JPath::Recursion | JPath::RecursionFull => {
                if let Some(v) = self.lookup(&key) {
                    return Ok(v);
                }
                let step = if path == JPath::Recursion { 2 } else { 1 };
                let mut pairs = BTreeSet::new();
                let (k64, step64) = (i64::from(k), i64::from(step));
                let mut top = i64::from(n);
                while top >= k64 + 2 {
                    let mut m = top - step64;
                    while m >= k64 {
                        pairs.insert((top as u32, m as u32));
                        m -= step64;
                    }
                    top -= step64;
                }
                self.prefetch_external(tilde, alpha, pairs)?;
                let value = self.recurse(tilde, n, k, beta, step)?;
                self.store(key, value, Provenance::Recursion)
            }
            JPath::Direct | JPath::DirectParity => {
                let parity = path == JPath::DirectParity;
                let step = if parity { 2 } else { 1 };
                let mut pairs = BTreeSet::new();
                for top in k..=n {
                    for m in k..top {
                        if !parity || ((n - top).is_multiple_of(2) && (n - m).is_multiple_of(2)) {
                            pairs.insert((top, m));
                        }
                    }
                }
                self.prefetch_external(tilde, alpha, pairs)?;
                let mut memo = HashMap::new();
                let sum = self.chain_sum(tilde, alpha, n, k, step, &mut memo)?;
                let value = if parity { sum.scale(&Rational::new(1.into(), 2.into())) } else { sum };
                self.store(key, value, Provenance::DirectSum)
            }
        }
    }

    /// One recursion step; `step` 2 uses `½C(n,k) − Σ_s I(n,n−2s)J(n−2s,k,β±s)`,
    /// `step` 1 uses `C(n,k) − Σ_s I(n,n−s)J(n−s,k,β±s/2)`.
    fn recurse(&self, tilde: bool, n: u32, k: u32, beta: HalfInt, step: u32) -> Result<PiExpr> {
        let alpha = Self::external_param(tilde, n, beta);
        let mut acc = if step == 2 {
            PiExpr::rational(binom_q(n, k) * Rational::new(1.into(), 2.into()))
        } else {
            PiExpr::rational(binom_q(n, k))
        };
        let sign: i64 = if tilde { -1 } else { 1 };
        let mut drop = step;
        while drop <= n - k {
            let m = n - drop;
            let i = self.external(tilde, n, m, alpha)?;
            let b = beta.add_halves(sign * i64::from(drop));
            let j = self.internal(tilde, m, k, b, if step == 2 { JPath::Recursion } else { JPath::RecursionFull })?;
            acc -= &(&i * &j);
            drop += step;
        }
        Ok(acc)
    }

    /// `Σ` over chains `n = n₀ > n₁ > … > n_ℓ ≥ k` (steps of `step`) of
    /// `(−1)^ℓ ∏ I(nᵢ, nᵢ₊₁) · w(n_ℓ)`; with `step` 2 the end weight is
    /// `C(n_ℓ,k) + δ(n_ℓ,k)` so that the sum equals `2J`.
    fn chain_sum(
        &self,
        tilde: bool,
        alpha: i64,
        top: u32,
        k: u32,
        step: u32,
        memo: &mut HashMap<u32, PiExpr>,
    ) -> Result<PiExpr> {
        if let Some(v) = memo.get(&top) {
            return Ok(v.clone());
        }
        let mut acc = PiExpr::rational(binom_q(top, k));
        if step == 2 && top == k {
            acc += &PiExpr::one();
        }
        let mut drop = step;
        while drop <= top - k {
            let m = top - drop;
            let i = self.external(tilde, top, m, alpha)?;
            let rest = self.chain_sum(tilde, alpha, m, k, step, memo)?;
            acc -= &(&i * &rest);
            drop += step;
        }
        memo.insert(top, acc.clone());
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(s: &str) -> HalfInt {
        s.parse().unwrap()
    }

    fn pe(s: &str) -> PiExpr {
        s.parse().unwrap()
    }

    #[test]
    fn small_external_sums() {
        let t = AngleTable::new();
        for a in 0..=8 {
            assert_eq!(t.big_i(3, 2, a).unwrap(), PiExpr::frac(3, 2));
            assert_eq!(t.big_i(4, 3, a).unwrap(), PiExpr::int(2));
            assert_eq!(t.big_i(5, 5, a).unwrap(), PiExpr::one());
        }
        assert_eq!(t.big_i(7, 5, 4).unwrap(), pe("7 - 2144238917/190270080 * pi^-2"));
        assert_eq!(
            t.big_i(7, 3, 4).unwrap(),
            pe("7 - 1692197/60480 * pi^-2 + 1250163908136617/30981823488000 * pi^-4")
        );
        assert_eq!(t.big_i_tilde(4, 3, 2).unwrap(), PiExpr::int(2));
        assert!(t.big_i(3, 4, 1).is_err());
        assert!(t.big_i_tilde(3, 2, 0).is_err());
    }

    #[test]
    fn small_internal_sums() {
        let t = AngleTable::new();
        for b in ["-1", "-1/2", "0", "3/2"] {
            let row = t.j_row(3, h(b), JPath::Recursion).unwrap();
            assert_eq!(row, vec![PiExpr::frac(1, 2), PiExpr::frac(3, 2), PiExpr::one()]);
        }
        let row = t.j_row(4, h("-1"), JPath::Recursion).unwrap();
        assert_eq!(row, vec![PiExpr::frac(1, 8), PiExpr::frac(9, 8), PiExpr::int(2), PiExpr::one()]);
        let row = t.j_row(4, h("0"), JPath::Recursion).unwrap();
        assert_eq!(
            row,
            vec![PiExpr::frac(401, 2560), PiExpr::frac(2961, 2560), PiExpr::int(2), PiExpr::one()]
        );
        assert_eq!(t.big_j(5, 2, h("0")).unwrap(), pe("1692197/282240 * pi^-2"));
        assert_eq!(t.big_j(7, 2, h("-1")).unwrap(), pe("113537407/16128000 * pi^-4"));
        assert!(t.big_j(3, 1, h("-3/2")).is_err());
        assert_eq!(t.get(&Key { family: Family::J, n: 7, k: 2, param: h("-1") }).unwrap().1, Provenance::Recursion);
    }

    #[test]
    fn paths_agree() {
        for path in [JPath::RecursionFull, JPath::Direct, JPath::DirectParity] {
            let t = AngleTable::new();
            for n in 1..=6 {
                for k in 1..=n {
                    for b in [-2, -1, 0, 1, 2, 3] {
                        let beta = HalfInt::from_twice(b);
                        let fresh = AngleTable::new();
                        let a = fresh.big_j(n, k, beta).unwrap();
                        assert_eq!(t.big_j_with(n, k, beta, path).unwrap(), a, "{path:?} {n} {k} {beta}");
                    }
                }
            }
        }
        let t = AngleTable::new();
        assert_eq!(t.big_j_direct(6, 2, h("-1"), false).unwrap(), PiExpr::frac(233445, 1048576));
        // the second path recomputes and is checked against the stored value
        assert_eq!(t.big_j(6, 2, h("-1")).unwrap(), PiExpr::frac(233445, 1048576));
    }

    #[test]
    fn tilde_paths_agree() {
        let t = AngleTable::new();
        assert_eq!(t.big_j_tilde(4, 3, h("3")).unwrap(), PiExpr::int(2));
        assert!(t.big_j_tilde(4, 1, h("3/2")).is_err());
        let a = t.big_j_tilde(4, 2, h("4")).unwrap();
        let d = AngleTable::new().big_j_tilde_direct(4, 2, h("4"), false).unwrap();
        let p = AngleTable::new().big_j_tilde_direct(4, 2, h("4"), true).unwrap();
        assert_eq!(a, d);
        assert_eq!(a, p);
        assert_eq!(AngleTable::new().big_j_tilde_direct(5, 4, h("3"), true).unwrap(), PiExpr::frac(5, 2));
    }

    #[test]
    fn inconsistent_store_is_rejected() {
        let t = AngleTable::new();
        let key = Key { family: Family::J, n: 4, k: 1, param: h("0") };
        t.store(key, PiExpr::one(), Provenance::DirectSum).unwrap();
        assert!(matches!(t.big_j_direct(4, 1, h("0"), false), Err(Error::Inconsistent(_))));
    }
}
