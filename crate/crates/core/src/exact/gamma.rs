use num_bigint::BigInt;
use num_traits::One;

use super::{HalfInt, PiExpr, Rational};
use crate::error::domain;
use crate::Result;

/// `Γ(q)` for a positive integer or half-integer `q`.
///
/// Integers give a rational, half-integers a rational multiple of `√π`.
pub fn gamma_half(q: HalfInt) -> Result<PiExpr> {
    let t = q.twice();
    if t <= 0 {
        return domain(format!("Gamma is evaluated only at positive arguments, got {q}"));
    }
    // Γ(q) = Γ(q0) · ∏_{j} (q0 + j) with q0 ∈ {1, 1/2}
    let (start, e) = if t % 2 == 0 { (2, 0) } else { (1, 1) };
    let mut acc = Rational::one();
    let mut x = start;
    while x < t {
        acc *= Rational::new(BigInt::from(x), BigInt::from(2));
        x += 2;
    }
    Ok(PiExpr::monomial(acc, e))
}

/// `Γ(3/2 + β) / (√π Γ(β + 1))`, the normalizing constant of the
/// one-dimensional beta density `(1 - x²)^β`.
pub fn c_one(beta: HalfInt) -> Result<PiExpr> {
    if beta.twice() <= -2 {
        return domain(format!("beta density needs beta > -1, got {beta}"));
    }
    let num = gamma_half(beta.add_halves(3))?;
    let den = gamma_half(beta.add_halves(2))?.shift(1);
    Ok(&num * &den.recip()?)
}

/// `Γ(β) / (√π Γ(β - 1/2))`, the normalizing constant of the
/// one-dimensional beta' density `(1 + x²)^-β`.
pub fn c_tilde_one(beta: HalfInt) -> Result<PiExpr> {
    if beta.twice() <= 1 {
        return domain(format!("beta' density needs beta > 1/2, got {beta}"));
    }
    let num = gamma_half(beta)?;
    let den = gamma_half(beta.add_halves(-1))?.shift(1);
    Ok(&num * &den.recip()?)
}

/// The central binomial coefficient `C(z, z/2) = 2^z Γ((z+1)/2) / (√π Γ(z/2 + 1))`
/// for integer `z ≥ 0`; rational for even `z`, a rational multiple of `1/π` for odd `z`.
pub fn central_binomial(z: u32) -> PiExpr {
    let z2 = i64::from(z);
    let num = gamma_half(HalfInt::from_twice(z2 + 1)).expect("positive argument");
    let den = gamma_half(HalfInt::from_twice(z2 + 2))
        .expect("positive argument")
        .shift(1);
    let pow2 = Rational::from_integer(BigInt::one() << z);
    (&num * &den.recip().expect("monomial")).scale(&pow2)
}
