//! Error function family.
//!
//! | Function | Method |
//! |---|---|
//! | [`erf`], [`erfc`] | Taylor series for \|x\| ≤ 0.5, continued fraction for the scaled erfc beyond |
//! | [`erfc_scaled`] | e^{x²} erfc(x), x > 0 |
//! | [`inverfc`] | odd series near y = 1, tail seed plus Halley steps elsewhere |
//! | [`normal_cdf`], [`normal_quantile`] | standard normal via erfc / inverfc |

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::util::{exp_neg_sq, exp_sq};
use crate::ProbabilityPair;

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;
const SQRT_PI: f64 = 1.772_453_850_905_516;
const SERIES_LIMIT: f64 = 0.5;
const CF_DEPTH_SCALE: f64 = 110.0;
const CF_MAX_DEPTH: usize = 500;
/// Beyond this erfcx(x) = 1/(x sqrt(pi)) to double precision.
const ERFCX_LARGE: f64 = 1e8;

const INVERFC_SERIES_RADIUS: f64 = 0.25;
const INVERFC_MAX_ITER: usize = 10;

/// Error function.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let ax = x.abs();
    if ax <= SERIES_LIMIT {
        erf_series(x)
    } else {
        (1.0 - erfc_pos(ax)).copysign(x)
    }
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < -SERIES_LIMIT {
        2.0 - erfc_pos(-x)
    } else if x <= SERIES_LIMIT {
        1.0 - erf_series(x)
    } else {
        erfc_pos(x)
    }
}

/// Scaled complementary error function e^{x²} erfc(x) for x > 0.
pub fn erfc_scaled(x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 {
        return Err(Error::range(format!("erfc_scaled needs x > 0, got {x}")));
    }
    Ok(erfcx_nonneg(x))
}

/// e^{x²} erfc(x) for x ≥ 0.
pub(crate) fn erfcx_nonneg(x: f64) -> f64 {
    if x <= SERIES_LIMIT {
        (1.0 - erf_series(x)) * exp_sq(x)
    } else if x >= ERFCX_LARGE {
        FRAC_1_SQRT_PI / x
    } else {
        erfcx_cf(x)
    }
}

// 2/sqrt(pi) * sum (-1)^n x^(2n+1) / (n! (2n+1))
fn erf_series(x: f64) -> f64 {
    let z = x * x;
    let mut term = x;
    let mut sum = x;
    for n in 1..40 {
        term *= -z / n as f64;
        let t = term / (2 * n + 1) as f64;
        sum += t;
        if t.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    2.0 * FRAC_1_SQRT_PI * sum
}

fn erfc_pos(x: f64) -> f64 {
    if x >= ERFCX_LARGE {
        return 0.0;
    }
    erfcx_cf(x) * exp_neg_sq(x)
}

// Contracted continued fraction
//   erfcx(x) = x/sqrt(pi) / (z + 1/2 - (1·1/2)/(z + 5/2 - (2·3/2)/(z + 9/2 - ...))),  z = x²,
// evaluated backward from a depth that gives double precision (about 110/z terms).
fn erfcx_cf(x: f64) -> f64 {
    let z = x * x;
    let n = ((CF_DEPTH_SCALE / z).ceil() as usize + 10).min(CF_MAX_DEPTH);
    let mut tail = 0.0;
    for k in (1..=n).rev() {
        let kf = k as f64;
        tail = kf * (kf - 0.5) / (z + 2.0 * kf + 0.5 - tail);
    }
    x * FRAC_1_SQRT_PI / (z + 0.5 - tail)
}

fn inverfc_series_coefficients() -> &'static [f64] {
    static COEFFS: OnceLock<Vec<f64>> = OnceLock::new();
    COEFFS.get_or_init(|| {
        // c_k = sum_{m<k} c_m c_{k-1-m} / ((m+1)(2m+1)); series coefficient c_k/(2k+1)
        let n = 40;
        let mut c = vec![1.0f64];
        for k in 1..n {
            let mut s = 0.0;
            for m in 0..k {
                s += c[m] * c[k - 1 - m] / (((m + 1) * (2 * m + 1)) as f64);
            }
            c.push(s);
        }
        c.iter().enumerate().map(|(k, ck)| ck / (2 * k + 1) as f64).collect()
    })
}

/// Inverse complementary error function: x with erfc(x) = y, 0 < y < 2.
pub fn inverfc(y: f64) -> Result<f64> {
    if y.is_nan() || y <= 0.0 || y >= 2.0 {
        return Err(Error::range(format!("inverfc needs 0 < y < 2, got {y}")));
    }
    if y == 1.0 {
        return Ok(0.0);
    }
    if y > 1.0 {
        return Ok(-inverfc_lower(2.0 - y));
    }
    Ok(inverfc_lower(y))
}

// 0 < y < 1, result > 0
fn inverfc_lower(y: f64) -> f64 {
    let w = 1.0 - y;
    if w <= INVERFC_SERIES_RADIUS {
        let t = 0.5 * SQRT_PI * w;
        let t2 = t * t;
        let coeffs = inverfc_series_coefficients();
        let mut sum = 0.0;
        let mut p = t;
        for &ck in coeffs {
            let term = ck * p;
            sum += term;
            if term.abs() < 1e-17 * sum.abs() {
                break;
            }
            p *= t2;
        }
        return sum + halley_delta(sum, y);
    }
    let ly = -y.ln();
    let mut x = (-(y * SQRT_PI * ly.sqrt()).ln()).sqrt();
    if !(x > 0.0) {
        x = 0.3;
    }
    for _ in 0..INVERFC_MAX_ITER {
        let dx = halley_delta(x, y);
        x += dx;
        if dx.abs() <= 1e-15 * x.max(1.0) {
            break;
        }
    }
    x
}

// Halley correction for erfc(x) = y, x ≥ 0:
// delta = sqrt(pi)/2 e^{x²} (erfc(x) - y), step delta / (1 - x delta).
fn halley_delta(x: f64, y: f64) -> f64 {
    let delta = 0.5 * SQRT_PI * (erfcx_nonneg(x) - y * exp_sq(x));
    delta / (1.0 - x * delta)
}

/// Standard normal distribution function as a (P, Q) pair.
pub fn normal_cdf(x: f64) -> ProbabilityPair {
    if x.is_nan() {
        return ProbabilityPair::new(f64::NAN, f64::NAN);
    }
    let u = x * std::f64::consts::FRAC_1_SQRT_2;
    ProbabilityPair::new(0.5 * erfc(-u), 0.5 * erfc(u))
}

/// Standard normal quantile, -sqrt(2) inverfc(2p).
pub fn normal_quantile(p: f64) -> Result<f64> {
    if p.is_nan() || p <= 0.0 || p >= 1.0 {
        return Err(Error::range(format!("normal_quantile needs 0 < p < 1, got {p}")));
    }
    Ok(-std::f64::consts::SQRT_2 * inverfc(2.0 * p)?)
}
