//! Monte Carlo estimation of the expected vertex angle sum `J(n, 1, β)`.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;
use serde::Serialize;

use super::sample::{sample_direction, Radial};
use crate::error::domain;
use crate::tables::SimplexFamily;
use crate::Result;

/// Simplices per random stream.
const CHUNK: usize = 16;
/// Maximum accepted condition number of the edge matrix.
const MAX_CONDITION: f64 = 1e12;
/// Relative slack of the cone membership test.
const MEMBERSHIP_TOL: f64 = 1e-10;
const MAX_REJECTIONS_PER_SIMPLEX: usize = 1000;

/// Parameters of a Monte Carlo run.
///
/// Streams: the generator `Xoshiro256PlusPlus::seed_from_u64(seed)` is
/// advanced by `jump()` once per chunk of 16 simplices, and chunk `c` uses the
/// state after `c` jumps. Common directions, when enabled, come from the state
/// after one `long_jump()`.
#[derive(Clone, Debug, Serialize)]
pub struct McConfig {
    pub n: u32,
    pub family: SimplexFamily,
    pub beta: f64,
    pub simplices: usize,
    pub directions: usize,
    pub seed: u64,
    /// Reuse one set of directions for every simplex.
    pub common_directions: bool,
}

impl McConfig {
    pub fn new(n: u32, family: SimplexFamily, beta: f64, simplices: usize, directions: usize, seed: u64) -> Self {
        McConfig { n, family, beta, simplices, directions, seed, common_directions: false }
    }
}

/// Estimate of `J(n, 1, β)` with its standard error.
#[derive(Clone, Debug, Serialize)]
pub struct McResult {
    pub estimate: f64,
    /// Standard error computed from the per-simplex angle estimates.
    pub stderr: f64,
    pub n_simplices: usize,
    pub n_directions: usize,
    pub seed: u64,
    /// Redrawn simplices whose edge matrix was too ill-conditioned.
    pub rejections: usize,
    /// Directions whose smallest cone coordinate fell within the membership slack.
    pub boundary_hits: u64,
    pub params: McConfig,
}

struct SimplexOutcome {
    fraction: f64,
    rejections: usize,
    boundary_hits: u64,
}

/// Inverse of the edge matrix `[X₂−X₁, …, Xₙ−X₁]` of a fresh simplex.
fn draw_simplex(law: &Radial, d: usize, rng: &mut Xoshiro256PlusPlus, rejections: &mut usize) -> Result<Vec<f64>> {
    let mut pts = vec![0.0; d * (d + 1)];
    loop {
        for p in pts.chunks_mut(d) {
            law.sample_into(p, rng);
        }
        let m = DMatrix::from_fn(d, d, |r, c| pts[(c + 1) * d + r] - pts[r]);
        let sv = m.clone().singular_values();
        let (lo, hi) = (sv.min(), sv.max());
        if lo > 0.0 && hi / lo <= MAX_CONDITION {
            if let Some(inv) = m.try_inverse() {
                // row-major copy for the inner loop
                return Ok((0..d).flat_map(|r| (0..d).map(move |c| (r, c))).map(|(r, c)| inv[(r, c)]).collect());
            }
        }
        *rejections += 1;
        if *rejections > MAX_REJECTIONS_PER_SIMPLEX {
            return domain("too many degenerate simplices; the parameters are numerically unusable");
        }
    }
}

/// Counts directions inside the tangent cone at the first vertex.
fn count_inside(inv: &[f64], d: usize, dirs: &mut dyn FnMut(&mut [f64]) -> bool, hits: &mut u64) -> u64 {
    let mut u = vec![0.0; d];
    let mut lambda = vec![0.0; d];
    let mut inside = 0;
    while dirs(&mut u) {
        let mut max_abs: f64 = 0.0;
        let mut min: f64 = f64::INFINITY;
        for (r, l) in lambda.iter_mut().enumerate() {
            let row = &inv[r * d..(r + 1) * d];
            *l = row.iter().zip(&u).map(|(a, b)| a * b).sum();
            max_abs = max_abs.max(l.abs());
            min = min.min(*l);
        }
        let slack = MEMBERSHIP_TOL * max_abs;
        if min >= -slack {
            inside += 1;
        }
        if min.abs() <= slack {
            *hits += 1;
        }
    }
    inside
}

/// Estimates `J(n, 1, β) = n · E[angle at X₁]` by sampling simplices and, for
/// each, the fraction of uniform directions lying in the cone spanned by the
/// edges at the first vertex. Results are bit-reproducible for a fixed
/// configuration regardless of the thread count.
pub fn mc_vertex_angle(cfg: &McConfig) -> Result<McResult> {
    if cfg.n < 3 {
        return domain(format!("vertex angles need n >= 3, got {}", cfg.n));
    }
    if cfg.simplices < 2 || cfg.directions < 1 {
        return domain("need at least 2 simplices and 1 direction");
    }
    let d = (cfg.n - 1) as usize;
    let law = match cfg.family {
        SimplexFamily::Beta => Radial::beta(d, cfg.beta)?,
        SimplexFamily::BetaPrime => Radial::beta_prime(d, cfg.beta)?,
    };
    let base = Xoshiro256PlusPlus::seed_from_u64(cfg.seed);
    let chunks = cfg.simplices.div_ceil(CHUNK);
    let mut streams = Vec::with_capacity(chunks);
    let mut s = base.clone();
    for _ in 0..chunks {
        streams.push(s.clone());
        s.jump();
    }
    let common: Option<Vec<f64>> = cfg.common_directions.then(|| {
        let mut r = base.clone();
        r.long_jump();
        let mut v = vec![0.0; d * cfg.directions];
        v.chunks_mut(d).for_each(|u| sample_direction(u, &mut r));
        v
    });

    let per_chunk: Vec<Result<Vec<SimplexOutcome>>> = streams
        .into_par_iter()
        .enumerate()
        .map(|(c, mut rng)| {
            let count = CHUNK.min(cfg.simplices - c * CHUNK);
            let mut out = Vec::with_capacity(count);
            for _ in 0..count {
                let mut rejections = 0;
                let inv = draw_simplex(&law, d, &mut rng, &mut rejections)?;
                let mut hits = 0;
                let mut left = cfg.directions;
                let inside = match &common {
                    Some(dirs) => {
                        let mut it = dirs.chunks(d);
                        count_inside(
                            &inv,
                            d,
                            &mut |u: &mut [f64]| it.next().map(|v| u.copy_from_slice(v)).is_some(),
                            &mut hits,
                        )
                    }
                    None => count_inside(
                        &inv,
                        d,
                        &mut |u: &mut [f64]| {
                            if left == 0 {
                                return false;
                            }
                            left -= 1;
                            sample_direction(u, &mut rng);
                            true
                        },
                        &mut hits,
                    ),
                };
                out.push(SimplexOutcome {
                    fraction: inside as f64 / cfg.directions as f64,
                    rejections,
                    boundary_hits: hits,
                });
            }
            Ok(out)
        })
        .collect();

    let mut fractions = Vec::with_capacity(cfg.simplices);
    let (mut rejections, mut boundary_hits) = (0, 0);
    for chunk in per_chunk {
        for o in chunk? {
            fractions.push(o.fraction);
            rejections += o.rejections;
            boundary_hits += o.boundary_hits;
        }
    }
    let m = fractions.len() as f64;
    let mean = fractions.iter().sum::<f64>() / m;
    let var = fractions.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / (m - 1.0);
    let scale = f64::from(cfg.n);
    Ok(McResult {
        estimate: scale * mean,
        stderr: scale * (var / m).sqrt(),
        n_simplices: cfg.simplices,
        n_directions: cfg.directions,
        seed: cfg.seed,
        rejections,
        boundary_hits,
        params: cfg.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_angles_sum_to_half() {
        let cfg = McConfig::new(3, SimplexFamily::Beta, 0.0, 200, 2000, 1);
        let r = mc_vertex_angle(&cfg).unwrap();
        assert!((r.estimate - 0.5).abs() < 4.0 * r.stderr + 1e-3, "{r:?}");
    }

    #[test]
    fn reproducible() {
        let cfg = McConfig::new(4, SimplexFamily::BetaPrime, 2.5, 40, 500, 99);
        let a = mc_vertex_angle(&cfg).unwrap();
        let b = mc_vertex_angle(&cfg).unwrap();
        assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
        assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
        let mut common = cfg.clone();
        common.common_directions = true;
        let c = mc_vertex_angle(&common).unwrap();
        assert!(c.estimate.is_finite());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(mc_vertex_angle(&McConfig::new(2, SimplexFamily::Beta, 0.0, 10, 10, 0)).is_err());
        assert!(mc_vertex_angle(&McConfig::new(4, SimplexFamily::BetaPrime, 1.5, 10, 10, 0)).is_err());
        assert!(mc_vertex_angle(&McConfig::new(4, SimplexFamily::Beta, -2.0, 10, 10, 0)).is_err());
    }
}
