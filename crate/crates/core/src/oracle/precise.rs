//! Tanh-sinh quadrature at arbitrary precision, for integrands analytic on
//! a closed interval.

use astro_float::BigFloat;

use crate::exact::hp::Hp;

/// Result of [`tanh_sinh`]: the value and the change between the last two
/// step sizes.
pub struct PreciseQuad {
    pub value: BigFloat,
    pub error_estimate: BigFloat,
    pub levels: u32,
}

/// `∫_a^b f` with the double-exponential rule, halving the step until two
/// successive levels agree to `2^-(prec - 16)` relative or `max_levels` is hit.
pub fn tanh_sinh<F>(hp: &mut Hp, a: &BigFloat, b: &BigFloat, max_levels: u32, mut f: F) -> PreciseQuad
where
    F: FnMut(&mut Hp, &BigFloat) -> BigFloat,
{
    let prec = hp.prec();
    let half = hp.rational(&crate::exact::Rational::new(1.into(), 2.into()));
    let center = hp.mul(&hp.add(a, b), &half);
    let radius = hp.mul(&hp.sub(b, a), &half);
    let pi = hp.pi();
    let half_pi = hp.mul(&pi, &half);
    let one = hp.small(1);
    let two = hp.small(2);
    // weights below this no longer matter
    let cutoff = -(prec as i64) - 8;

    // contribution of the node at t (and its mirror when t > 0), unscaled by h
    let mut node = |hp: &mut Hp, t: &BigFloat| -> Option<BigFloat> {
        let et = hp.exp(t);
        let emt = hp.div(&one, &et);
        let sinh = hp.mul(&hp.sub(&et, &emt), &half);
        let cosh = hp.mul(&hp.add(&et, &emt), &half);
        let u = hp.mul(&half_pi, &sinh);
        let e2u = hp.exp(&hp.mul(&two, &u));
        // distance to the endpoint: 1 - tanh(u) = 2 / (e^{2u} + 1)
        let delta = hp.div(&two, &hp.add(&e2u, &one));
        // w = (π/2) cosh t / cosh²(u) = 2π cosh t · e^{2u} / (e^{2u} + 1)²
        let den = hp.add(&e2u, &one);
        let w = hp.div(&hp.mul(&hp.mul(&pi, &cosh), &hp.mul(&two, &e2u)), &hp.mul(&den, &den));
        if w.is_zero() || w.exponent().map(|e| (e as i64) < cutoff).unwrap_or(true) {
            return None;
        }
        let off = hp.mul(&radius, &hp.sub(&one, &delta));
        let x_hi = hp.add(&center, &off);
        let x_lo = hp.sub(&center, &off);
        let s = if t.is_zero() {
            f(hp, &center)
        } else {
            let fh = f(hp, &x_hi);
            let fl = f(hp, &x_lo);
            hp.add(&fh, &fl)
        };
        Some(hp.mul(&w, &s))
    };

    // level 0: h = 1/2, nodes t = j/2
    let mut h = hp.mul(&one, &half);
    let mut sum = hp.small(0);
    let mut j = 0i64;
    loop {
        let jf = hp.small(j);
        let t = hp.mul(&jf, &h);
        match node(hp, &t) {
            Some(v) => sum = hp.add(&sum, &v),
            None => break,
        }
        j += 1;
    }
    let mut estimate = hp.mul(&hp.mul(&sum, &h), &radius);
    let mut error = estimate.clone();
    let mut levels = 0;
    while levels < max_levels {
        levels += 1;
        h = hp.mul(&h, &half);
        // new nodes are the odd multiples of the halved step
        let mut j = 1i64;
        loop {
            let jf = hp.small(j);
        let t = hp.mul(&jf, &h);
            match node(hp, &t) {
                Some(v) => sum = hp.add(&sum, &v),
                None => break,
            }
            j += 2;
        }
        let next = hp.mul(&hp.mul(&sum, &h), &radius);
        error = hp.sub(&next, &estimate).abs();
        estimate = next;
        let scale = estimate.abs();
        let target = prec as i64 - 16;
        let good = match (error.exponent(), scale.exponent()) {
            _ if error.is_zero() => true,
            (Some(e), Some(s)) => (s as i64) - (e as i64) >= target,
            _ => false,
        };
        if good && levels >= 3 {
            break;
        }
    }
    PreciseQuad { value: estimate, error_estimate: error, levels }
}
