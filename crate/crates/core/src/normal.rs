//! Standard normal density, tails and the inverse Mills ratio.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Switch point between the direct ratio and the continued fraction.
const MILLS_SWITCH: f64 = 5.0;
const MILLS_CF_TERMS: u32 = 120;

pub fn pdf(x: f64) -> f64 {
    (-0.5 * x * x - LN_SQRT_2PI).exp()
}

pub fn ln_pdf(x: f64) -> f64 {
    -0.5 * x * x - LN_SQRT_2PI
}

pub fn cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Upper tail `1 − Φ(x)`.
pub fn sf(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

/// `ln(1 − Φ(x))`, finite for all finite `x`.
pub fn ln_sf(x: f64) -> f64 {
    if x < 0.0 {
        (-cdf(x)).ln_1p()
    } else if x <= MILLS_SWITCH {
        sf(x).ln()
    } else {
        let (lambda, _) = mills_parts(x);
        ln_pdf(x) - lambda.ln()
    }
}

/// `(λ(x), λ(x) − x)`. The continued fraction
/// `λ(x) = x + 1/(x + 2/(x + 3/(x + …)))` delivers `λ − x` without cancellation
/// in the upper tail.
fn mills_parts(x: f64) -> (f64, f64) {
    if x <= MILLS_SWITCH {
        let lambda = pdf(x) / sf(x);
        (lambda, lambda - x)
    } else {
        let mut t = x;
        for n in (2..=MILLS_CF_TERMS).rev() {
            t = x + f64::from(n) / t;
        }
        let excess = 1.0 / t;
        (x + excess, excess)
    }
}

/// Inverse Mills ratio `λ(x) = φ(x) / (1 − Φ(x))`.
pub fn inverse_mills(x: f64) -> f64 {
    mills_parts(x).0
}

/// `λ′(x) = λ(x)(λ(x) − x)`, which lies in `(0, 1)`.
pub fn inverse_mills_derivative(x: f64) -> f64 {
    let (lambda, excess) = mills_parts(x);
    lambda * excess
}

/// Standard normal quantile: Acklam's rational approximation followed by one
/// Halley correction step.
pub fn quantile(p: f64) -> f64 {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return f64::NAN;
    }
    if p == 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 1.0 {
        return f64::INFINITY;
    }
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.02425;
    let x = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    let e = cdf(x) - p;
    let u = e * (2.0 * PI).sqrt() * (0.5 * x * x).exp();
    x - u / (1.0 + 0.5 * x * u)
}

/// Two-sided critical value `z_{1−level/2}`.
pub fn two_sided_critical(level: f64) -> f64 {
    quantile(1.0 - 0.5 * level)
}
