//! Exact scalar arithmetic: rationals, the Laurent ring `ℚ[√π, 1/√π]`,
//! Gamma values at half-integers, formal Gamma products and their
//! high-precision decimal evaluation.

mod gamma;
mod gamma_product;
mod half_int;
pub mod hp;
mod pi_expr;

pub use gamma::{c_one, c_tilde_one, central_binomial, gamma_half};
pub use gamma_product::GammaProduct;
pub use half_int::HalfInt;
pub use pi_expr::PiExpr;

/// Arbitrary-precision reduced fraction with positive denominator.
pub type Rational = num_rational::BigRational;

use num_bigint::BigInt;

/// Parses `"p"` or `"p/q"` into a reduced rational. Decimal notation is rejected.
pub fn parse_rational(s: &str) -> crate::Result<Rational> {
    let s = s.trim();
    let bad = || crate::Error::Parse(format!("not an exact fraction: {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den == BigInt::from(0) {
        return Err(crate::Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(num, den))
}

/// Renders a rational as `"num/den"` (always with a denominator).
pub fn fraction_string(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

#[cfg(test)]
pub(crate) fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub(crate) fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let k = k.min(n - k);
    let mut acc = BigInt::from(1);
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}
