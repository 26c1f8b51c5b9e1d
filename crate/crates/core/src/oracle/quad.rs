//! Nested adaptive Gauss–Legendre quadrature of the external angle integrals,
//! in `f64` and independent of the symbolic engine.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::domain;
use crate::Result;

const ORDER: usize = 16;
const MAX_DEPTH: u32 = 48;
const INNER_NOISE: f64 = 8.0 * f64::EPSILON;
const INNER_BUDGET: u64 = 4_000;
const OUTER_BUDGET: u64 = 40_000;
/// Relative accuracy below which `f64` evaluation cannot certify convergence.
pub const F64_FLOOR: f64 = 1e-14;

/// Nodes and weights of the `ORDER`-point Gauss–Legendre rule on `[-1, 1]`.
fn rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = ORDER;
        (0..n)
            .map(|i| {
                // Newton iteration from the Chebyshev-like initial guess
                let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
                let mut dp = 0.0;
                for _ in 0..100 {
                    let (mut p0, mut p1) = (1.0, x);
                    for j in 2..=n {
                        let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                        p0 = p1;
                        p1 = p2;
                    }
                    dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                    let dx = p1 / dp;
                    x -= dx;
                    if dx.abs() < 1e-16 {
                        break;
                    }
                }
                (x, 2.0 / ((1.0 - x * x) * dp * dp))
            })
            .collect()
    })
}

fn gl<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, evals: &mut u64) -> f64 {
    let (c, h) = ((a + b) / 2.0, (b - a) / 2.0);
    *evals += ORDER as u64;
    rule().iter().map(|&(x, w)| w * f(c + h * x)).sum::<f64>() * h
}

struct Adaptive {
    evals: u64,
    error: f64,
    exhausted: bool,
    /// Relative size of the integrand's own evaluation error.
    noise: f64,
    budget: u64,
}

impl Adaptive {
    fn run<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, tol: f64, noise: f64, budget: u64) -> (f64, Adaptive) {
        let mut st = Adaptive { evals: 0, error: 0.0, exhausted: false, noise, budget };
        let whole = gl(f, a, b, &mut st.evals);
        let v = st.step(f, a, b, whole, tol, 0);
        (v, st)
    }

    fn step<F: FnMut(f64) -> f64>(&mut self, f: &mut F, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = (a + b) / 2.0;
        let left = gl(f, a, m, &mut self.evals);
        let right = gl(f, m, b, &mut self.evals);
        let diff = (left + right - whole).abs();
        // below roundoff further bisection only accumulates noise
        let noise = self.noise * (left.abs() + right.abs());
        let out_of_budget = self.evals >= self.budget;
        if diff <= tol || diff <= noise || depth >= MAX_DEPTH || out_of_budget || m <= a || m >= b {
            if diff > tol && diff > noise {
                self.exhausted = true;
            }
            self.error += diff;
            return left + right;
        }
        self.step(f, a, m, left, tol / 2.0, depth + 1) + self.step(f, m, b, right, tol / 2.0, depth + 1)
    }
}

/// Outcome of a numerical integration.
#[derive(Clone, Debug, Serialize)]
pub struct QuadResult {
    pub value: f64,
    /// Sum over accepted panels of the difference between the one-panel and
    /// two-panel rules.
    pub error_estimate: f64,
    pub evaluations: u64,
    /// Whether `error_estimate < rel_tol · |value|` was reached.
    pub converged: bool,
}

/// `Γ(3/2 + β) / (√π Γ(β + 1))` through log-Gamma.
fn density_const(beta: f64) -> f64 {
    (ln_gamma(1.5 + beta) - ln_gamma(beta + 1.0)).exp() / PI.sqrt()
}

/// `Γ(β) / (√π Γ(β − 1/2))` through log-Gamma.
fn density_const_tilde(beta: f64) -> f64 {
    (ln_gamma(beta) - ln_gamma(beta - 0.5)).exp() / PI.sqrt()
}

fn binom(n: u32, k: u32) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * f64::from(n - k + i) / f64::from(i))
}

/// `C(n,k) ∫ c_outer cos^p φ · F(φ)^{n−k} dφ` over `(−π/2, π/2)`, where
/// `F(φ) = ∫_{−π/2}^{φ} c_inner cos^q θ dθ` is itself computed adaptively.
fn nested(n: u32, k: u32, c_outer: f64, p: f64, c_inner: f64, q: f64, rel_tol: f64) -> QuadResult {
    let inner_tol = (rel_tol * 1e-2).max(1e-17);
    let mut inner_evals = 0u64;
    let mut inner_ok = true;
    let mut cdf = |phi: f64| -> f64 {
        let mut g = |t: f64| c_inner * t.cos().max(0.0).powf(q);
        // integrate over the shorter tail; the density integrates to one
        let (v, st) = if phi <= 0.0 {
            Adaptive::run(&mut g, -FRAC_PI_2, phi, inner_tol, INNER_NOISE, INNER_BUDGET)
        } else {
            let (v, st) = Adaptive::run(&mut g, phi, FRAC_PI_2, inner_tol, INNER_NOISE, INNER_BUDGET);
            (1.0 - v, st)
        };
        inner_evals += st.evals;
        inner_ok &= !st.exhausted;
        v
    };
    let power = (n - k) as i32;
    let mut outer = |phi: f64| {
        let base = c_outer * phi.cos().max(0.0).powf(p);
        if power == 0 {
            base
        } else {
            base * cdf(phi).powi(power)
        }
    };
    let mut rough_evals = 0;
    let rough = gl(&mut outer, -FRAC_PI_2, 0.0, &mut rough_evals) + gl(&mut outer, 0.0, FRAC_PI_2, &mut rough_evals);
    let tol = rel_tol * rough.abs().max(f64::MIN_POSITIVE) / 4.0;
    let outer_noise = INNER_NOISE * f64::from(power.max(1) as u32) * 4.0;
    let (v, st) = Adaptive::run(&mut outer, -FRAC_PI_2, FRAC_PI_2, tol, outer_noise, OUTER_BUDGET);
    let scale = binom(n, k);
    let value = v * scale;
    let error_estimate = st.error * scale;
    QuadResult {
        value,
        error_estimate,
        evaluations: st.evals + rough_evals + inner_evals,
        converged: inner_ok && !st.exhausted && rel_tol >= F64_FLOOR && error_estimate < rel_tol * value.abs(),
    }
}

fn check_nk(n: u32, k: u32) -> Result<()> {
    if k < 1 || k > n {
        return domain(format!("need 1 <= k <= n, got n = {n}, k = {k}"));
    }
    Ok(())
}

/// Numerical `I(n, k, α) = C(n,k) ∫ c_{1,(αk−1)/2} cos^{αk} φ · F_α(φ)^{n−k} dφ`
/// for real `α > −1/k`.
pub fn quad_i(n: u32, k: u32, alpha: f64, rel_tol: f64) -> Result<QuadResult> {
    check_nk(n, k)?;
    let kf = f64::from(k);
    if !(alpha * kf > -1.0) || (n > k && !(alpha > -1.0)) {
        return domain(format!("quadrature needs alpha > -1/k, got alpha = {alpha}"));
    }
    if !(rel_tol >= 1e-20) {
        return domain(format!("rel_tol must be at least 1e-20, got {rel_tol}"));
    }
    Ok(nested(
        n,
        k,
        density_const((alpha * kf - 1.0) / 2.0),
        alpha * kf,
        density_const((alpha - 1.0) / 2.0),
        alpha,
        rel_tol,
    ))
}

/// Numerical `Ĩ(n, k, α) = C(n,k) ∫ c̃_{1,(αk+1)/2} cos^{αk−1} φ · F̃_α(φ)^{n−k} dφ`
/// for real `α > 0`.
pub fn quad_i_tilde(n: u32, k: u32, alpha: f64, rel_tol: f64) -> Result<QuadResult> {
    check_nk(n, k)?;
    if !(alpha > 0.0) {
        return domain(format!("quadrature needs alpha > 0, got alpha = {alpha}"));
    }
    if !(rel_tol >= 1e-20) {
        return domain(format!("rel_tol must be at least 1e-20, got {rel_tol}"));
    }
    let kf = f64::from(k);
    Ok(nested(
        n,
        k,
        density_const_tilde((alpha * kf + 1.0) / 2.0),
        alpha * kf - 1.0,
        density_const_tilde((alpha + 1.0) / 2.0),
        alpha - 1.0,
        rel_tol,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials() {
        let mut evals = 0;
        let v = gl(&mut |x: f64| x.powi(30), -1.0, 1.0, &mut evals);
        assert!((v - 2.0 / 31.0).abs() < 1e-15);
        let w: f64 = rule().iter().map(|p| p.1).sum();
        assert!((w - 2.0).abs() < 1e-14);
    }

    #[test]
    fn known_values() {
        let r = quad_i(3, 2, 3.0, 1e-12).unwrap();
        assert!(r.converged);
        assert!((r.value - 1.5).abs() < 1e-11, "{r:?}");
        for alpha in [0.5, 1.0, 2.5, 4.0] {
            let r = quad_i_tilde(5, 5, alpha, 1e-12).unwrap();
            assert!((r.value - 1.0).abs() < 1e-11, "alpha = {alpha}: {r:?}");
        }
        let r = quad_i_tilde(4, 3, 2.0, 1e-12).unwrap();
        assert!((r.value - 2.0).abs() < 1e-11, "{r:?}");
        // facets: n/2 for any admissible alpha
        let r = quad_i(4, 3, 2.5, 1e-10).unwrap();
        assert!((r.value - 2.0).abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn non_integer_alpha_is_monotone_in_codimension() {
        // I(4,k,α) / C(4,k) decreases as the face shrinks
        let per_face: Vec<f64> =
            (1..=4).map(|k| quad_i(4, k, 2.5, 1e-8).unwrap().value / binom(4, k)).collect();
        assert!(per_face.windows(2).all(|w| w[0] < w[1]), "{per_face:?}");
    }

    #[test]
    fn too_strict_tolerance_is_not_certified() {
        let r = quad_i(3, 1, 2.0, 1e-18).unwrap();
        assert!(!r.converged);
        assert!(quad_i(3, 1, 2.0, 1e-21).is_err());
        assert!(quad_i(3, 1, -1.5, 1e-8).is_err());
        assert!(quad_i(3, 1, -0.5, 1e-8).unwrap().value.is_finite());
        assert!(quad_i_tilde(3, 1, 0.0, 1e-8).is_err());
    }
}
