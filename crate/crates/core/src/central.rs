//! Central gamma distribution: P(a, x), Q(a, x) and their inversion.
//!
//! The smaller of P and Q is computed directly and the other as its
//! complement. Methods:
//!
//! | Region | Method |
//! |---|---|
//! | a ≥ 30, \|η\| ≤ 1 | uniform expansion in erfc and Γ*(a) |
//! | a > α(x) | Taylor series for P |
//! | a ≤ α(x), x < 1 | Taylor series for Q (small a) |
//! | a ≤ α(x), x ≥ 1 | continued fraction for Q |
//!
//! with α(x) = x for x ≥ ½ and ln ½ / ln(x/2) below. Tail values are carried
//! as logarithms so that values far below the double range still feed the
//! noncentral series.

use crate::asymptotic::{eta_from_ratio, eta_to_lambda, invert_expansion, uniform_tail, EtaFrame};
use crate::error::{Error, Result};
use crate::gamma::{gamma_1p_m1, ln_dterm, ln_dterm_dd, ln_gamma_1p, loggam_pos};
use crate::util::{gamma_exponent, Dd};
use crate::{DistributionKind, ProbabilityPair};

pub(crate) const UNIFORM_MIN_A: f64 = 30.0;
const UNIFORM_MAX_ETA: f64 = 1.0;
const SERIES_MAX_TERMS: usize = 100_000;
const CF_MAX_ITER: usize = 100_000;
/// Smallest admissible shape parameter.
pub const A_MIN: f64 = 1e-300;
/// Smallest admissible tail probability for the inversion.
pub const INV_TAIL_MIN: f64 = 1e-150;
pub const INV_MAX_ITER: usize = 35;
const PQ_CONSISTENCY: f64 = 1e-10;

/// Both tails at one point; `ln_small` is the log of the smaller-tail
/// value actually computed (finite even when that value underflows).
#[derive(Debug, Clone, Copy)]
pub struct Tails {
    pub lower_small: bool,
    pub small: f64,
    pub ln_small: f64,
}

impl Tails {
    pub fn p(&self) -> f64 {
        if self.lower_small {
            self.small
        } else {
            1.0 - self.small
        }
    }

    pub fn q(&self) -> f64 {
        if self.lower_small {
            1.0 - self.small
        } else {
            self.small
        }
    }

    /// Natural log of P (lower) or Q.
    pub fn ln_tail(&self, lower: bool) -> f64 {
        if lower == self.lower_small {
            self.ln_small
        } else {
            (-self.small).ln_1p()
        }
    }

    pub fn pair(&self) -> ProbabilityPair {
        ProbabilityPair::new(self.p(), self.q())
    }

    fn from_ln(lower_small: bool, ln_small: Dd) -> Self {
        Tails {
            lower_small,
            small: ln_small.exp(),
            ln_small: ln_small.value(),
        }
    }
}

fn alpha(x: f64) -> f64 {
    if x >= 0.5 {
        x
    } else {
        std::f64::consts::LN_2 / (-(0.5 * x).ln())
    }
}

/// P(a, x), Q(a, x) for a > 0, finite x ≥ 0 (no argument checks).
pub fn incgam(a: f64, x: f64) -> Tails {
    if x == 0.0 {
        return Tails {
            lower_small: true,
            small: 0.0,
            ln_small: f64::NEG_INFINITY,
        };
    }
    if a >= UNIFORM_MIN_A {
        let eta = eta_from_ratio(x, a);
        if eta.abs() <= UNIFORM_MAX_ETA {
            let (lower, ln_v) = uniform_tail(a, eta, gamma_exponent(a, x));
            return Tails::from_ln(lower, ln_v);
        }
    }
    if a > alpha(x) {
        Tails::from_ln(true, ln_p_series(a, x))
    } else if x < 1.0 {
        let q = q_small_a(a, x);
        Tails {
            lower_small: false,
            small: q,
            ln_small: q.ln(),
        }
    } else {
        Tails::from_ln(false, ln_q_fraction(a, x))
    }
}

// P = D(a,x) Σ_{n≥0} x^n / ((a+1)...(a+n))
fn ln_p_series(a: f64, x: f64) -> Dd {
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 1..SERIES_MAX_TERMS {
        term *= x / (a + n as f64);
        sum += term;
        if term <= 1e-17 * sum {
            break;
        }
    }
    ln_dterm_dd(a, x).add_f64(sum.ln())
}

// Q = a D(a,x) / (x + 1 - a - 1(1-a)/(x + 3 - a - 2(2-a)/(x + 5 - a - ...)))
fn ln_q_fraction(a: f64, x: f64) -> Dd {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..CF_MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() <= 1e-16 {
            break;
        }
    }
    ln_dterm_dd(a, x).add_f64(a.ln()).add_f64(h.ln())
}

// Q for small a and x < 1:
//   Q = (g - expm1(a ln x))/Γ(1+a) - x^a/Γ(1+a) · a Σ_{n≥1} (-x)^n/(n!(a+n)),  g = Γ(1+a) - 1
fn q_small_a(a: f64, x: f64) -> f64 {
    let g = gamma_1p_m1(a);
    let lx = x.ln();
    let gam1p = 1.0 + g;
    let u = (g - (a * lx).exp_m1()) / gam1p;
    let mut term = 1.0;
    let mut sum = 0.0;
    for n in 1..200 {
        let nf = n as f64;
        term *= -x / nf;
        let t = term / (a + nf);
        sum += t;
        if t.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    let v = (a * lx).exp() / gam1p * a * sum;
    u - v
}

fn map_kind(kind: DistributionKind, a: f64, x: f64) -> (f64, f64) {
    match kind {
        DistributionKind::Gamma => (a, x),
        DistributionKind::ChiSquare => (0.5 * a, 0.5 * x),
    }
}

/// P(a, x) and Q(a, x). For the chi-square form the arguments are the
/// degrees of freedom and the abscissa.
pub fn cdf_central(kind: DistributionKind, a: f64, x: f64) -> Result<ProbabilityPair> {
    let (a, x) = map_kind(kind, a, x);
    if !(a.is_finite() && a > A_MIN) {
        return Err(Error::range(format!("cdf_central needs a > 1e-300, got {a}")));
    }
    if !(x.is_finite() && x >= 0.0) {
        return Err(Error::range(format!("cdf_central needs finite x >= 0, got {x}")));
    }
    let t = incgam(a, x);
    let pair = t.pair();
    if x > 0.0 && t.small < f64::MIN_POSITIVE {
        return Err(Error::OverflowUnderflow {
            what: format!("smaller tail underflows at a={a}, x={x}"),
            pair: Some(pair),
        });
    }
    Ok(pair)
}

/// x with P(a, x) = p, Q(a, x) = q. The smaller of p and q is the one
/// matched; both must satisfy p + q = 1 within 1e-10.
pub fn inv_central(kind: DistributionKind, a: f64, p: f64, q: f64) -> Result<f64> {
    let scale = match kind {
        DistributionKind::Gamma => 1.0,
        DistributionKind::ChiSquare => 2.0,
    };
    let a = a / scale;
    check_pq(p, q)?;
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::range(format!("inv_central needs a > 0, got {a}")));
    }
    if p.min(q) < INV_TAIL_MIN {
        return Err(Error::range(format!(
            "inv_central needs min(p, q) >= 1e-150, got p={p:e}, q={q:e}"
        )));
    }
    Ok(scale * invert_gamma(a, ProbabilityPair::new(p, q))?)
}

pub(crate) fn check_pq(p: f64, q: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&q) || ((p + q) - 1.0).abs() > PQ_CONSISTENCY {
        return Err(Error::range(format!(
            "p and q must be probabilities with p + q = 1, got p={p:e}, q={q:e}"
        )));
    }
    Ok(())
}

/// Initial estimate of the root of P(a, x) = p.
pub(crate) fn initial_guess(a: f64, target: ProbabilityPair) -> Result<f64> {
    let lower = target.lower_is_smaller();
    // P ≈ x^a / Γ(1+a) for small x
    let ln_p = if lower { target.p.ln() } else { (-target.q).ln_1p() };
    let x0 = ((ln_p + ln_gamma_1p_any(a)) / a).exp();
    if x0 < 0.2 * (a + 1.0) {
        if x0 < f64::MIN_POSITIVE {
            return Err(Error::flow(format!("quantile underflows for a={a}, p={:e}", target.p)));
        }
        return Ok(x0);
    }
    if !lower {
        // Q ≈ x^{a-1} e^{-x} / Γ(a) for large x
        let c = -(target.q.ln() + loggam_pos(a));
        let mut x = c.max(1.0);
        for _ in 0..8 {
            x = c + (a - 1.0) * x.ln();
            if !(x > 0.0) {
                break;
            }
        }
        if x > 2.0 * (a + 1.0) && x.is_finite() {
            return Ok(x);
        }
    }
    let frame = EtaFrame::incomplete_gamma(a, a)?;
    let e = invert_expansion(&frame, target)?;
    let x = a * eta_to_lambda(e.eta(a));
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Ok(a)
    }
}

fn ln_gamma_1p_any(a: f64) -> f64 {
    if a <= 1.0 {
        ln_gamma_1p(a)
    } else {
        loggam_pos(a + 1.0)
    }
}

// Halley iteration on the smaller tail, with a bracket and a log-space
// Newton step while the iterate is far from the root.
pub(crate) fn invert_gamma(a: f64, target: ProbabilityPair) -> Result<f64> {
    let lower = target.lower_is_smaller();
    let t = target.smaller();
    let ln_t = t.ln();
    let mut x = initial_guess(a, target)?;
    let mut lo = 0.0f64;
    let mut hi = f64::INFINITY;
    for _ in 0..INV_MAX_ITER {
        let tails = incgam(a, x);
        let ln_tail = tails.ln_tail(lower);
        let r_ln = ln_tail - ln_t;
        if r_ln == 0.0 {
            return Ok(x);
        }
        // tail too small with P means x too small; with Q, x too large
        if (r_ln < 0.0) == lower {
            lo = lo.max(x);
        } else {
            hi = hi.min(x);
        }
        // T/T' with T' = ±a D(a,x)/x
        let ln_deriv = a.ln() + ln_dterm(a, x) - x.ln();
        let sign = if lower { 1.0 } else { -1.0 };
        let ratio = sign * (ln_tail - ln_deriv).exp();
        let step = if r_ln.abs() > 0.5 || !ratio.is_finite() {
            -r_ln * ratio
        } else {
            // Halley on T(x) - t; T''/T' = (a-1)/x - 1
            let delta = ratio * (-r_ln).exp_m1();
            let h = (a - 1.0) / x - 1.0;
            delta / (1.0 + 0.5 * delta * h)
        };
        let mut xn = x + step;
        if step.abs() <= 1e-15 * x {
            return Ok(xn);
        }
        if xn <= 0.0 {
            // same step taken in ln x
            xn = x * (step / x).exp();
        }
        if !(xn > lo && xn < hi) || !xn.is_finite() {
            xn = if hi.is_finite() {
                if lo > 0.0 && hi / lo > 4.0 {
                    (lo * hi).sqrt()
                } else {
                    0.5 * (lo + hi)
                }
            } else if step > 0.0 {
                x * 4.0
            } else {
                x * 0.25
            };
        }
        x = xn;
        if lo == hi {
            return Ok(x);
        }
    }
    Err(Error::MaxIterations {
        limit: INV_MAX_ITER,
        best: x,
    })
}
