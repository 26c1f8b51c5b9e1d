//! Samplers for the beta and beta' point distributions.

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::domain;
use crate::Result;

/// Overwrites `out` with a uniform direction on the unit sphere
/// (a normalized standard Gaussian vector).
pub fn sample_direction<R: Rng + ?Sized>(out: &mut [f64], rng: &mut R) {
    loop {
        let mut norm2 = 0.0;
        for x in out.iter_mut() {
            *x = StandardNormal.sample(rng);
            norm2 += *x * *x;
        }
        if norm2 > 0.0 {
            let inv = norm2.sqrt().recip();
            out.iter_mut().for_each(|x| *x *= inv);
            return;
        }
    }
}

/// Radial law of a beta or beta' point: the squared radius is
/// `G₁/(G₁+G₂)` (beta) or `G₁/G₂` (beta') for independent Gamma draws.
#[derive(Clone, Debug)]
pub enum Radial {
    Sphere,
    Beta { shape_a: Gamma<f64>, shape_b: Gamma<f64> },
    BetaPrime { shape_a: Gamma<f64>, shape_b: Gamma<f64> },
}

impl Radial {
    /// Law of `‖X‖` for density `∝ (1 − ‖x‖²)^β` on the unit ball of `ℝ^d`;
    /// `β = −1` is the uniform law on the sphere.
    pub fn beta(d: usize, beta: f64) -> Result<Radial> {
        if d < 1 {
            return domain("dimension must be at least 1");
        }
        if beta == -1.0 {
            return Ok(Radial::Sphere);
        }
        if !(beta > -1.0) {
            return domain(format!("beta distribution needs beta >= -1, got {beta}"));
        }
        Ok(Radial::Beta {
            shape_a: Gamma::new(d as f64 / 2.0, 1.0).expect("positive shape"),
            shape_b: Gamma::new(beta + 1.0, 1.0).expect("positive shape"),
        })
    }

    /// Law of `‖X‖` for density `∝ (1 + ‖x‖²)^{−β}` on `ℝ^d`, `β > d/2`.
    pub fn beta_prime(d: usize, beta: f64) -> Result<Radial> {
        if d < 1 {
            return domain("dimension must be at least 1");
        }
        let half = d as f64 / 2.0;
        if !(beta > half) {
            return domain(format!("beta' distribution in dimension {d} needs beta > {half}, got {beta}"));
        }
        Ok(Radial::BetaPrime {
            shape_a: Gamma::new(half, 1.0).expect("positive shape"),
            shape_b: Gamma::new(beta - half, 1.0).expect("positive shape"),
        })
    }

    pub fn sample_radius<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Radial::Sphere => 1.0,
            Radial::Beta { shape_a, shape_b } => {
                let a = shape_a.sample(rng);
                let b = shape_b.sample(rng);
                (a / (a + b)).sqrt()
            }
            Radial::BetaPrime { shape_a, shape_b } => {
                let a = shape_a.sample(rng);
                let b = shape_b.sample(rng);
                (a / b).sqrt()
            }
        }
    }

    pub fn sample_into<R: Rng + ?Sized>(&self, out: &mut [f64], rng: &mut R) {
        sample_direction(out, rng);
        let r = self.sample_radius(rng);
        out.iter_mut().for_each(|x| *x *= r);
    }
}

/// One point of the beta distribution in `ℝ^d`.
pub fn sample_beta_point<R: Rng + ?Sized>(d: usize, beta: f64, rng: &mut R) -> Result<Vec<f64>> {
    let law = Radial::beta(d, beta)?;
    let mut out = vec![0.0; d];
    law.sample_into(&mut out, rng);
    Ok(out)
}

/// One point of the beta' distribution in `ℝ^d`.
pub fn sample_beta_prime_point<R: Rng + ?Sized>(d: usize, beta: f64, rng: &mut R) -> Result<Vec<f64>> {
    let law = Radial::beta_prime(d, beta)?;
    let mut out = vec![0.0; d];
    law.sample_into(&mut out, rng);
    Ok(out)
}
