use super::{binom_q, AngleTable, Family, JPath, SimplexFamily};
use crate::error::domain;
use crate::exact::{HalfInt, PiExpr};
use crate::Result;

/// Outcome of comparing the `√π`-exponent support of a value with the set
/// allowed by the parity case of `(n, k, param)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureCheck {
    pub pass: bool,
    /// Exponents of `√π` present in the value.
    pub support: Vec<i32>,
    /// Exponents of `√π` the value may carry.
    pub allowed: Vec<i32>,
    /// Present but not allowed.
    pub violations: Vec<i32>,
}

/// Whether the value is known to be rational for this parity case.
fn rational_case(family: Family, n: u32, param: HalfInt) -> bool {
    let n = i64::from(n);
    let t = param.twice();
    match family {
        // param is α (integer): twice = 2α
        Family::I => (t / 2) % 2 != 0,
        Family::ITilde => (t / 2) % 2 == 0,
        // param is β: 2β + n even / 2β − n odd
        Family::J => (t + n).rem_euclid(2) == 0,
        Family::JTilde => (t - n).rem_euclid(2) != 0,
    }
}

/// Checks that `value` lies in the span allowed for the table entry
/// `(family, n, k, param)`: rational in the rational parity case, otherwise
/// a combination of `1, π⁻², …, π^{-2⌊(n−k)/2⌋}`.
pub fn arithmetic_structure_check(
    value: &PiExpr,
    n: u32,
    k: u32,
    param: HalfInt,
    family: Family,
) -> StructureCheck {
    let allowed: Vec<i32> = if rational_case(family, n, param) {
        vec![0]
    } else {
        let depth = (n.saturating_sub(k) / 2) as i32;
        (0..=depth).rev().map(|i| -4 * i).collect()
    };
    let support = value.support();
    let violations: Vec<i32> = support.iter().copied().filter(|e| !allowed.contains(e)).collect();
    StructureCheck { pass: violations.is_empty(), support, allowed, violations }
}

/// Residuals of the linear relations between external and internal angle sums.
#[derive(Clone, Debug)]
pub struct RelationReport {
    pub n: u32,
    pub beta: HalfInt,
    pub family: SimplexFamily,
    /// `(label, residual)`; every residual must be exactly zero.
    pub residuals: Vec<(String, PiExpr)>,
}

impl RelationReport {
    pub fn passed(&self) -> bool {
        self.residuals.iter().all(|(_, r)| r.is_zero())
    }

    pub fn failures(&self) -> impl Iterator<Item = &(String, PiExpr)> {
        self.residuals.iter().filter(|(_, r)| !r.is_zero())
    }
}

/// One instance examined by [`AngleTable::conjecture_scan`].
#[derive(Clone, Debug)]
pub struct ConjectureRow {
    pub family: Family,
    pub n: u32,
    pub k: u32,
    pub beta: HalfInt,
    pub value: PiExpr,
    /// Conjectured exponent of `π`.
    pub expected_pi_exp: i32,
    pub holds: bool,
}

#[derive(Clone, Debug, Default)]
pub struct ConjectureReport {
    pub rows: Vec<ConjectureRow>,
}

impl ConjectureReport {
    pub fn all_hold(&self) -> bool {
        self.rows.iter().all(|r| r.holds)
    }
}

fn is_monomial_at(value: &PiExpr, pi_exp: i32) -> bool {
    matches!(value.as_monomial(), Some((_, e)) if e == 2 * pi_exp)
}

impl AngleTable {
    /// External/internal angle-sum parameter pair for the given family at `n`.
    fn relation_params(n: u32, beta: HalfInt, family: SimplexFamily) -> Result<i64> {
        if n < 2 {
            return domain("relations need n >= 2");
        }
        match family {
            SimplexFamily::Beta => {
                let alpha = beta.twice() + i64::from(n) - 1;
                if beta.twice() < -2 || alpha < 0 {
                    return domain(format!("no symbolic relations at n = {n}, beta = {beta}"));
                }
                Ok(alpha)
            }
            SimplexFamily::BetaPrime => {
                let alpha = beta.twice() - i64::from(n) + 1;
                if alpha < 1 {
                    return domain(format!("beta' relations need 2*beta - n + 1 >= 1, got n = {n}, beta = {beta}"));
                }
                Ok(alpha)
            }
        }
    }

    fn ext(&self, family: SimplexFamily, n: u32, k: u32, alpha: i64) -> Result<PiExpr> {
        match family {
            SimplexFamily::Beta => self.big_i(n, k, alpha),
            SimplexFamily::BetaPrime => self.big_i_tilde(n, k, alpha),
        }
    }

    fn int(&self, family: SimplexFamily, n: u32, k: u32, beta: HalfInt) -> Result<PiExpr> {
        match family {
            SimplexFamily::Beta => self.big_j(n, k, beta),
            SimplexFamily::BetaPrime => self.big_j_tilde(n, k, beta),
        }
    }

    /// Evaluates every linear relation between the external and internal
    /// angle sums at `(n, β)`: the sum and alternating-sum relations, their
    /// duals, and the triangular matrix identities `AB = BA = E` of size `n`.
    pub fn verify_relations(&self, n: u32, beta: HalfInt, family: SimplexFamily) -> Result<RelationReport> {
        let alpha = Self::relation_params(n, beta, family)?;
        // β shifts by +s/2 along the beta recursion and by −s/2 along the beta' one
        let dir: i64 = match family {
            SimplexFamily::Beta => 1,
            SimplexFamily::BetaPrime => -1,
        };
        let mut residuals = Vec::new();
        for k in 1..n {
            let mut sum = PiExpr::zero();
            let mut alt = PiExpr::zero();
            let mut dual = PiExpr::zero();
            for s in 0..=(n - k) {
                let i = self.ext(family, n, n - s, alpha)?;
                let j = self.int(family, n - s, k, beta.add_halves(dir * i64::from(s)))?;
                let t = &i * &j;
                sum += &t;
                if s % 2 == 0 {
                    alt += &t;
                } else {
                    alt -= &t;
                }
                let jd = self.int(family, n, n - s, beta)?;
                let id = self.ext(family, n - s, k, alpha)?;
                let td = &jd * &id;
                if s % 2 == 0 {
                    dual += &td;
                } else {
                    dual -= &td;
                }
            }
            sum -= &PiExpr::rational(binom_q(n, k));
            residuals.push((format!("sum k={k}"), sum));
            residuals.push((format!("alternating k={k}"), alt));
            residuals.push((format!("dual k={k}"), dual));
        }
        // Matrices at γ = β ± (n−1)/2: A[i][m] = (−1)^i I(i, m, 2γ),
        // B[m][k] = (−1)^m J(m, k, γ ∓ (m−1)/2).
        let size = n as usize;
        let mut a = vec![vec![PiExpr::zero(); size]; size];
        let mut b = vec![vec![PiExpr::zero(); size]; size];
        for i in 1..=n {
            let sign = if i % 2 == 0 { PiExpr::one() } else { -PiExpr::one() };
            for m in 1..=i {
                let iv = self.ext(family, i, m, alpha)?;
                a[(i - 1) as usize][(m - 1) as usize] = &sign * &iv;
                // β at row i: the internal parameter that keeps 2γ fixed
                let bi = beta.add_halves(dir * i64::from(n - i));
                let jv = self.int(family, i, m, bi)?;
                b[(i - 1) as usize][(m - 1) as usize] = &sign * &jv;
            }
        }
        for (name, x, y) in [("AB", &a, &b), ("BA", &b, &a)] {
            for r in 0..size {
                for c in 0..=r {
                    let mut acc = PiExpr::zero();
                    for m in c..=r {
                        acc += &(&x[r][m] * &y[m][c]);
                    }
                    if r == c {
                        acc -= &PiExpr::one();
                    }
                    residuals.push((format!("{name}[{},{}]", r + 1, c + 1), acc));
                }
            }
        }
        Ok(RelationReport { n, beta, family, residuals })
    }

    /// Expected conic intrinsic volumes `υ_j`, `j = 0..n`, of the tangent cone
    /// of the simplex at a `k`-vertex face; entries below `j = k − 1` are zero.
    pub fn conic_intrinsic_volumes(
        &self,
        n: u32,
        k: u32,
        beta: HalfInt,
        family: SimplexFamily,
    ) -> Result<Vec<PiExpr>> {
        let alpha = Self::relation_params(n, beta, family)?;
        if k == 0 || k > n {
            return domain(format!("need 1 <= k <= n, got n = {n}, k = {k}"));
        }
        let dir: i64 = match family {
            SimplexFamily::Beta => 1,
            SimplexFamily::BetaPrime => -1,
        };
        let inv = binom_q(n, k).recip();
        let mut out = vec![PiExpr::zero(); n as usize];
        for j in (k - 1)..n {
            let i = self.ext(family, n, j + 1, alpha)?;
            let jv = self.int(family, j + 1, k, beta.add_halves(dir * i64::from(n - 1 - j)))?;
            out[j as usize] = (&i * &jv).scale(&inv);
        }
        Ok(out)
    }

    /// Examines the monomial conjectures on every matching instance with
    /// `n ≤ max_n`. For `J`, `β` runs over `beta_range`; for `J̃`, `β` runs over
    /// `(n+1)/2 + t` with `t` covering the same width as `beta_range`.
    /// Instances are reported, never enforced.
    pub fn conjecture_scan(&self, max_n: u32, beta_range: (HalfInt, HalfInt)) -> Result<ConjectureReport> {
        let (lo, hi) = beta_range;
        let mut rows = Vec::new();
        for n in 3..=max_n {
            let ni = i64::from(n);
            for beta in HalfInt::range_inclusive(lo, hi) {
                if beta.twice() < -2 || (beta.twice() + ni) % 2 == 0 {
                    continue;
                }
                for k in 1..n {
                    if (n - k) % 2 == 0 {
                        continue;
                    }
                    let value = self.big_j_with(n, k, beta, JPath::Recursion)?;
                    let expected = -((n - k - 1) as i32);
                    let holds = is_monomial_at(&value, expected);
                    rows.push(ConjectureRow { family: Family::J, n, k, beta, value, expected_pi_exp: expected, holds });
                }
            }
            let width = hi.twice() - lo.twice();
            for t in 0..=width.max(0) {
                let beta = HalfInt::from_twice(ni + 1 + t);
                if (beta.twice() - ni).rem_euclid(2) != 0 {
                    continue;
                }
                for k in (2..n).step_by(2) {
                    let value = self.big_j_tilde_with(n, k, beta, JPath::Recursion)?;
                    let expected = -2 * ((n - k) / 2) as i32;
                    let holds = is_monomial_at(&value, expected);
                    rows.push(ConjectureRow {
                        family: Family::JTilde,
                        n,
                        k,
                        beta,
                        value,
                        expected_pi_exp: expected,
                        holds,
                    });
                }
            }
        }
        Ok(ConjectureReport { rows })
    }
}
