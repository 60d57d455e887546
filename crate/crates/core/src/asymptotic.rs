//! Standard-form machinery for the incomplete gamma ratios.
//!
//! A distribution function is written as a Gaussian integral in the variable
//! η defined by λ - ln λ - 1 = ½η², sign(η) = sign(λ - 1), with a weight
//! f(η) = η/(λ - 1) (for the gamma case λ = x/a). From the Maclaurin series
//! of f follow
//!
//! * the coefficients A_n, C_n(η) of the uniform expansion
//!   `P = ½ erfc(-η sqrt(a/2)) + e^{-aη²/2}/(sqrt(2πa) Γ*(a)) Σ C_n(η)/a^n`,
//! * the large-a inversion η ≈ η₀ + η₁/a + η₂/a² + η₃/a³.

use std::sync::OnceLock;

use crate::erf::{erfcx_nonneg, inverfc};
use crate::error::{Error, Result};
use crate::gamma::{stirling_value, SQRT_2PI};
use crate::util::{ln1pmx, Dd};
use crate::ProbabilityPair;

/// Number of stored Maclaurin coefficients of τ(ζ) and f(ζ).
const SERIES_LEN: usize = 160;
/// Orders n of C_n(η) kept for the uniform expansion.
const UNIFORM_ORDERS: usize = 25;
/// f and its derivatives are summed from the series for |η| ≤ this.
const SERIES_EVAL_RADIUS: f64 = 1.0;
/// Switch to the small-η₀ forms of the inversion coefficients below this.
const ETA0_SMALL: f64 = 0.2;
/// Step for the numerical derivative of η₂.
const DIFF_STEP: f64 = 1e-3;
const F_SERIES_MAX_ORDER: usize = 8;

/// Coefficients b_k of τ(ζ) = 1 + Σ_{k≥1} b_k ζ^k, with τ - ln τ - 1 = ½ζ².
fn tau_series() -> &'static [f64] {
    static B: OnceLock<Vec<f64>> = OnceLock::new();
    B.get_or_init(|| {
        let mut b = vec![0.0, 1.0];
        for m in 2..SERIES_LEN + 2 {
            let mut s = b[m - 1];
            for i in 2..m {
                s -= (m + 1 - i) as f64 * b[i] * b[m + 1 - i];
            }
            b.push(s / (m + 1) as f64);
        }
        b
    })
}

/// Maclaurin coefficients of f(ζ) = ζ/(τ - 1) for the gamma case.
pub(crate) fn gamma_f_series() -> &'static [f64] {
    static A: OnceLock<Vec<f64>> = OnceLock::new();
    A.get_or_init(|| {
        let b = tau_series();
        let mut a = vec![1.0];
        for k in 1..SERIES_LEN {
            let s: f64 = (1..=k).map(|j| b[j + 1] * a[k - j]).sum();
            a.push(-s);
        }
        a
    })
}

/// Coefficients a_0..a_order of the Maclaurin series of the gamma-case f.
pub fn f_gamma_series(order: usize) -> Result<Vec<f64>> {
    if !(1..=F_SERIES_MAX_ORDER).contains(&order) {
        return Err(Error::range(format!(
            "f series order must be in 1..={F_SERIES_MAX_ORDER}, got {order}"
        )));
    }
    Ok(gamma_f_series()[..=order].to_vec())
}

/// Series of f_n for n = 0, 1, ...: f_{n+1} coefficients c'_k = (k+1) c_{k+2}.
fn derived_series(series: &[f64], depth: usize) -> Vec<Vec<f64>> {
    let mut out = vec![series.to_vec()];
    for _ in 0..depth {
        let prev = out.last().unwrap();
        if prev.len() < 3 {
            out.push(vec![0.0]);
            continue;
        }
        let next: Vec<f64> = (0..prev.len() - 2).map(|k| (k + 1) as f64 * prev[k + 2]).collect();
        out.push(next);
    }
    out
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ck| acc * x + ck)
}

// C_n(η) = -Σ_k c_{k+1} η^k from the series of f_n
fn c_from_series(c: &[f64], eta: f64) -> f64 {
    if c.len() < 2 {
        0.0
    } else {
        -horner(&c[1..], eta)
    }
}

/// A_n and C_n(η), n = 0..=depth, from Maclaurin coefficients of f.
pub fn coefficient_scheme_series(series: &[f64], eta: f64, depth: usize) -> (Vec<f64>, Vec<f64>) {
    let fs = derived_series(series, depth);
    let a = fs.iter().map(|c| c[0]).collect();
    let c = fs.iter().map(|c| c_from_series(c, eta)).collect();
    (a, c)
}

/// A_n and C_n(η), n = 0..=depth (depth ≤ 3), for a weight function f given
/// by its values. The Maclaurin coefficients are recovered by Chebyshev
/// interpolation on [-r, r], r = max(1.5, 1.25|η|); f must be analytic on a
/// neighbourhood of that interval.
pub fn coefficient_scheme(f: &dyn Fn(f64) -> f64, eta: f64, depth: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if depth > 3 || !eta.is_finite() {
        return Err(Error::range(format!(
            "coefficient_scheme needs depth <= 3, finite eta; got {depth}, {eta}"
        )));
    }
    let r = (1.25 * eta.abs()).max(1.5);
    let series = maclaurin_by_interpolation(f, r, 32);
    Ok(coefficient_scheme_series(&series, eta, depth))
}

// Chebyshev interpolant of f on [-r, r] at n first-kind nodes, converted to
// monomial coefficients in the original variable.
fn maclaurin_by_interpolation(f: &dyn Fn(f64) -> f64, r: f64, n: usize) -> Vec<f64> {
    use std::f64::consts::PI;
    let nodes: Vec<f64> = (0..n).map(|j| (PI * (j as f64 + 0.5) / n as f64).cos()).collect();
    let vals: Vec<f64> = nodes.iter().map(|&t| f(r * t)).collect();
    let mut cheb = vec![0.0; n];
    for (k, ck) in cheb.iter_mut().enumerate() {
        let s: f64 = (0..n)
            .map(|j| vals[j] * (PI * k as f64 * (j as f64 + 0.5) / n as f64).cos())
            .sum();
        *ck = 2.0 * s / n as f64;
    }
    cheb[0] *= 0.5;
    // coefficients at rounding level only feed noise into the monomial form
    let cmax = cheb.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    for c in cheb.iter_mut() {
        if c.abs() < 1e-14 * cmax {
            *c = 0.0;
        }
    }
    // T_k in monomial form via T_{k+1} = 2t T_k - T_{k-1}
    let mut t: Vec<Vec<f64>> = vec![vec![0.0; n]; n];
    t[0][0] = 1.0;
    if n > 1 {
        t[1][1] = 1.0;
    }
    for k in 1..n.saturating_sub(1) {
        for i in 0..n {
            let up = if i > 0 { 2.0 * t[k][i - 1] } else { 0.0 };
            t[k + 1][i] = up - t[k - 1][i];
        }
    }
    let mut mono = vec![0.0; n];
    for (ck, tk) in cheb.iter().zip(&t) {
        for (m, v) in mono.iter_mut().zip(tk) {
            *m += ck * v;
        }
    }
    let mut scale = 1.0;
    for m in mono.iter_mut() {
        *m *= scale;
        scale /= r;
    }
    mono
}

/// η from t = λ - 1 (t > -1), accurate for t near 0.
pub(crate) fn eta_from_t(t: f64) -> f64 {
    if t.is_infinite() {
        return f64::INFINITY;
    }
    (-2.0 * ln1pmx(t)).max(0.0).sqrt().copysign(t)
}

/// η for λ = x/a, computing λ - 1 as (x - a)/a.
pub(crate) fn eta_from_ratio(x: f64, a: f64) -> f64 {
    let t = (x - a) / a;
    if t.abs() < 0.5 {
        eta_from_t(t)
    } else {
        let lambda = x / a;
        (2.0 * (lambda - 1.0 - lambda.ln())).sqrt().copysign(t)
    }
}

/// η with λ - ln λ - 1 = ½η², sign(η) = sign(λ - 1).
pub fn lambda_to_eta(lambda: f64) -> Result<f64> {
    if lambda.is_nan() || lambda <= 0.0 {
        return Err(Error::range(format!("lambda_to_eta needs lambda > 0, got {lambda}")));
    }
    Ok(eta_from_ratio(lambda, 1.0))
}

/// Inverse of [`lambda_to_eta`].
pub fn eta_to_lambda(eta: f64) -> f64 {
    if eta.is_nan() {
        return f64::NAN;
    }
    if eta == 0.0 {
        return 1.0;
    }
    let half = 0.5 * eta * eta;
    if eta.abs() <= SERIES_EVAL_RADIUS {
        let b = tau_series();
        let mut t = eta * horner(&b[1..60], eta);
        // one Newton step on t - ln(1+t) = ½η²
        let g = -ln1pmx(t) - half;
        t -= g * (1.0 + t) / t;
        return 1.0 + t;
    }
    if eta > 0.0 {
        if eta.is_infinite() {
            return f64::INFINITY;
        }
        let c = 1.0 + half;
        let mut lam = c + c.ln();
        for _ in 0..30 {
            let g = lam - lam.ln() - c;
            let d = g / (1.0 - 1.0 / lam);
            lam -= d;
            if d.abs() <= 1e-16 * lam {
                break;
            }
        }
        lam
    } else {
        // Newton in u = ln λ on e^u - 1 - u = ½η²
        let mut u = -1.0 - half;
        for _ in 0..50 {
            let e = u.exp();
            let g = (e - 1.0 - u) - half;
            let d = g / (e - 1.0);
            u -= d;
            if d.abs() <= 1e-16 * u.abs() {
                break;
            }
        }
        u.exp()
    }
}

/// Weight function f of the standard form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kernel {
    /// f ≡ 1: the distribution is exactly normal in η.
    Normal,
    /// f(η) = η/(λ - 1) of the incomplete gamma ratio.
    IncompleteGamma,
}

/// Standard-form variables at one point: large parameter `a`, ratio
/// `lambda` = x/a and the transformed variable `eta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaFrame {
    pub kernel: Kernel,
    pub a: f64,
    pub lambda: f64,
    pub eta: f64,
}

impl EtaFrame {
    /// Frame of P(a, x), Q(a, x).
    pub fn incomplete_gamma(a: f64, x: f64) -> Result<Self> {
        if !(a > 0.0) || !(x > 0.0) {
            return Err(Error::range(format!("frame needs a > 0, x > 0, got a={a}, x={x}")));
        }
        Ok(EtaFrame {
            kernel: Kernel::IncompleteGamma,
            a,
            lambda: x / a,
            eta: eta_from_ratio(x, a),
        })
    }

    /// Frame with f ≡ 1, λ = 1 + η.
    pub fn normal(a: f64) -> Self {
        EtaFrame {
            kernel: Kernel::Normal,
            a,
            lambda: 1.0,
            eta: 0.0,
        }
    }

    /// Maclaurin coefficients of f up to `order`.
    pub fn f_series(&self, order: usize) -> Vec<f64> {
        match self.kernel {
            Kernel::Normal => {
                let mut v = vec![0.0; order + 1];
                v[0] = 1.0;
                v
            }
            Kernel::IncompleteGamma => gamma_f_series()[..=order.min(SERIES_LEN - 1)].to_vec(),
        }
    }

    /// τ as a function of ζ.
    pub fn zeta_to_tau(&self, zeta: f64) -> f64 {
        match self.kernel {
            Kernel::Normal => 1.0 + zeta,
            Kernel::IncompleteGamma => eta_to_lambda(zeta),
        }
    }

    pub fn f(&self, zeta: f64) -> f64 {
        self.f_derivatives(zeta)[0]
    }

    /// f, f', f'' at ζ.
    pub fn f_derivatives(&self, zeta: f64) -> [f64; 3] {
        match self.kernel {
            Kernel::Normal => [1.0, 0.0, 0.0],
            Kernel::IncompleteGamma => gamma_f_derivatives(zeta),
        }
    }

    /// Coefficients A_0..A_2 of the expansion of F_a(∞).
    pub fn a_coefficients(&self) -> [f64; 3] {
        let s = self.f_series(4);
        [s[0], s[2], 3.0 * s[4]]
    }
}

fn gamma_f_derivatives(eta: f64) -> [f64; 3] {
    if eta.abs() <= SERIES_EVAL_RADIUS {
        let a = gamma_f_series();
        let n = 60;
        let f = horner(&a[..n], eta);
        let d1: Vec<f64> = (1..n).map(|k| k as f64 * a[k]).collect();
        let d2: Vec<f64> = (2..n).map(|k| (k * (k - 1)) as f64 * a[k]).collect();
        return [f, horner(&d1, eta), horner(&d2, eta)];
    }
    // f' = (1 - λ f²)/(λ - 1),  f'' = -λ f (f² + 3 f')/(λ - 1)
    let lam = eta_to_lambda(eta);
    let lm1 = lam - 1.0;
    let f = eta / lm1;
    let f1 = (1.0 - lam * f * f) / lm1;
    let f2 = -lam * f * (f * f + 3.0 * f1) / lm1;
    [f, f1, f2]
}

/// Terms of the large-a inversion η ≈ η₀ + η₁/a + η₂/a² + η₃/a³.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionExpansion {
    pub eta0: f64,
    pub eta1: f64,
    pub eta2: f64,
    pub eta3: f64,
    /// A_0, A_1, A_2.
    pub a: [f64; 3],
}

impl InversionExpansion {
    /// Sum of the expansion for parameter `a`.
    pub fn eta(&self, a: f64) -> f64 {
        self.eta0 + (self.eta1 + (self.eta2 + self.eta3 / a) / a) / a
    }
}

/// Large-a inversion of F_a(η) = F_a(∞) p for the frame's kernel and `a`.
pub fn invert_expansion(frame: &EtaFrame, target: ProbabilityPair) -> Result<InversionExpansion> {
    let a = frame.a;
    if !(a > 0.0) {
        return Err(Error::range(format!("invert_expansion needs a > 0, got {a}")));
    }
    let eta0 = if target.lower_is_smaller() {
        -(2.0 / a).sqrt() * inverfc(2.0 * target.p)?
    } else {
        (2.0 / a).sqrt() * inverfc(2.0 * target.q)?
    };
    let acoef = frame.a_coefficients();
    if frame.kernel == Kernel::Normal {
        return Ok(InversionExpansion {
            eta0,
            eta1: 0.0,
            eta2: 0.0,
            eta3: 0.0,
            a: acoef,
        });
    }
    let (eta1, eta2, eta3) = if eta0.abs() < ETA0_SMALL {
        small_eta0_terms(&frame.f_series(5), eta0)
    } else {
        let eta1 = eta1_direct(frame, eta0);
        let eta2 = eta2_direct(frame, eta0, acoef[1]);
        let h = DIFF_STEP;
        let d2 = (eta2_direct(frame, eta0 - 2.0 * h, acoef[1]) - 8.0 * eta2_direct(frame, eta0 - h, acoef[1])
            + 8.0 * eta2_direct(frame, eta0 + h, acoef[1])
            - eta2_direct(frame, eta0 + 2.0 * h, acoef[1]))
            / (12.0 * h);
        let [f, f1, f2] = frame.f_derivatives(eta0);
        let e1d = eta1_derivative(frame, eta0);
        let (a1, a2) = (acoef[1], acoef[2]);
        let e0 = eta0;
        let num = 8.0 * f * eta1 * eta2
            + 4.0 * a1 * f * eta1 * eta1
            + f * eta1.powi(4)
            + 4.0 * f * eta1 * eta1 * e0 * eta2
            + 4.0 * f * e0 * e0 * eta2 * eta2
            - 8.0 * f * d2
            + 8.0 * a1 * f * e0 * eta2
            + 8.0 * a2 * f
            - 8.0 * f1 * eta1 * e1d
            - 8.0 * f1 * eta2
            - 4.0 * f2 * eta1 * eta1;
        (eta1, eta2, -num / (8.0 * e0 * f))
    };
    Ok(InversionExpansion {
        eta0,
        eta1,
        eta2,
        eta3,
        a: acoef,
    })
}

fn eta1_direct(frame: &EtaFrame, e0: f64) -> f64 {
    frame.f(e0).ln() / e0
}

// d/dη₀ of ln f(η₀)/η₀
fn eta1_derivative(frame: &EtaFrame, e0: f64) -> f64 {
    let [f, f1, _] = frame.f_derivatives(e0);
    f1 / (f * e0) - f.ln() / (e0 * e0)
}

fn eta2_direct(frame: &EtaFrame, e0: f64, a1: f64) -> f64 {
    let [f, f1, _] = frame.f_derivatives(e0);
    let eta1 = f.ln() / e0;
    let e1d = f1 / (f * e0) - f.ln() / (e0 * e0);
    -(f * (2.0 * a1 + eta1 * eta1 - 2.0 * e1d) - 2.0 * eta1 * f1) / (2.0 * e0 * f)
}

// Taylor forms in η₀ of η₁, η₂, η₃ for small η₀.
fn small_eta0_terms(s: &[f64], e0: f64) -> (f64, f64, f64) {
    let (a1, a2, a3, a4, a5) = (s[1], s[2], s[3], s[4], s[5]);
    let eta1 = a1 + 0.5 * (2.0 * a2 - a1 * a1) * e0 + (3.0 * a3 - 3.0 * a1 * a2 + a1.powi(3)) / 3.0 * e0 * e0;
    let eta2 = -a1.powi(3) / 3.0 + 2.0 * a3 + (-12.0 * a2 * a1 * a1 + 5.0 * a1.powi(4) + 24.0 * a4) / 8.0 * e0;
    let eta3 = (4.0 * a1.powi(5) - 5.0 * a2 * a1.powi(3) - 15.0 * a3 * a1 * a1 + 120.0 * a5) / 15.0;
    (eta1, eta2, eta3)
}

/// C_n(η) series for the gamma case, n < UNIFORM_ORDERS.
fn uniform_c_series() -> &'static [Vec<f64>] {
    static C: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
    C.get_or_init(|| derived_series(gamma_f_series(), UNIFORM_ORDERS - 1))
}

/// Smaller tail of P(a, x), Q(a, x) from the uniform expansion, |η| moderate,
/// a large. `half_a_eta2` is ½aη² in double-double. Returns (lower tail?,
/// natural log of the tail).
pub(crate) fn uniform_tail(a: f64, eta: f64, half_a_eta2: Dd) -> (bool, Dd) {
    let series = uniform_c_series();
    let mut s = 0.0;
    let mut p = 1.0;
    for c in series {
        let term = c_from_series(c, eta) * p;
        s += term;
        if term.abs() <= 1e-17 * s.abs() {
            break;
        }
        p /= a;
    }
    let u = eta.abs() * (0.5 * a).sqrt();
    let lead = 0.5 * erfcx_nonneg(u);
    let corr = s / (SQRT_2PI * a.sqrt() * stirling_value(a).exp());
    let lower = eta <= 0.0;
    let bracket = if lower { lead + corr } else { lead - corr };
    (lower, half_a_eta2.neg().add_f64(bracket.ln()))
}
