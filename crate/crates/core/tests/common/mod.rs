//! Multiprecision reference values (MPFR through rug).
#![allow(dead_code)]

use rug::Float;

pub const PREC: u32 = 320;

pub fn fl(v: f64) -> Float {
    Float::with_val(PREC, v)
}

pub fn rel_err(got: f64, want: &Float) -> f64 {
    if *want == 0 {
        return got.abs();
    }
    (fl(got) / want - 1u32).to_f64().abs()
}

/// ln of x^a e^{-x} / Γ(a+1).
fn ln_d(a: &Float, x: &Float) -> Float {
    a.clone() * x.clone().ln() - x - (a.clone() + 1u32).ln_gamma()
}

/// P(a, x) from the positive series.
pub fn p_central(a: &Float, x: &Float) -> Float {
    if *x == 0 {
        return Float::with_val(PREC, 0);
    }
    let mut term = Float::with_val(PREC, 1);
    let mut sum = Float::with_val(PREC, 1);
    let mut n = 1u32;
    loop {
        term *= x;
        term /= a.clone() + n;
        sum += &term;
        if term.clone() / &sum < 1e-90 {
            break;
        }
        n += 1;
    }
    ln_d(a, x).exp() * sum
}

/// Q(a, x): 1 - P below x = max(a, 1), the Legendre continued fraction above.
pub fn q_central(a: &Float, x: &Float) -> Float {
    if x < a || *x < 1 {
        return 1u32 - p_central(a, x);
    }
    // Q = a D(a, x) / (x + 1 - a - 1(1 - a)/(x + 3 - a - 2(2 - a)/(...)))
    let tiny = Float::with_val(PREC, 1e-300);
    let mut b = x.clone() + 1u32 - a;
    let mut c = Float::with_val(PREC, 1) / &tiny;
    let mut d = Float::with_val(PREC, 1) / &b;
    let mut h = d.clone();
    for i in 1..1_000_000u32 {
        let an = (a.clone() - i) * i;
        b += 2u32;
        d = an.clone() * &d + &b;
        if d.clone().abs() < tiny {
            d = tiny.clone();
        }
        c = an / &c + &b;
        if c.clone().abs() < tiny {
            c = tiny.clone();
        }
        d = d.recip();
        let del = d.clone() * &c;
        h *= &del;
        if (del - 1u32).abs() < 1e-95 {
            break;
        }
    }
    ln_d(a, x).exp() * a * h
}

/// (P, Q) of the central gamma distribution, each accurate even when tiny.
pub fn central(a: f64, x: f64) -> (Float, Float) {
    let (fa, fx) = (fl(a), fl(x));
    let p = p_central(&fa, &fx);
    if p < 0.5 {
        let q = Float::with_val(PREC, 1) - &p;
        return (p, q);
    }
    let q = q_central(&fa, &fx);
    (Float::with_val(PREC, 1) - &q, q)
}

fn k_top(x: f64) -> u32 {
    (x + 40.0 * x.sqrt() + 200.0) as u32
}

/// P_μ(x, y), summed downward from far above the Poisson mode.
pub fn p_noncentral(mu: f64, x: f64, y: f64) -> Float {
    let (fmu, fx, fy) = (fl(mu), fl(x), fl(y));
    if y == 0.0 {
        return Float::with_val(PREC, 0);
    }
    let top = k_top(x);
    let mut a = fmu.clone() + top;
    let mut p = p_central(&a, &fy);
    // D(a-1) = y^{a-1} e^{-y} / Γ(a)
    let mut d = ln_d(&(a.clone() - 1u32), &fy).exp();
    let mut w = if x == 0.0 {
        Float::with_val(PREC, 0)
    } else {
        (fl(top as f64) * fx.clone().ln() - &fx - Float::with_val(PREC, top + 1).ln_gamma()).exp()
    };
    let mut sum = w.clone() * &p;
    for k in (0..top).rev() {
        p += &d;
        a -= 1u32;
        d = d * &a / &fy;
        if x == 0.0 {
            if k == 0 {
                return p;
            }
            continue;
        }
        w = w * (k + 1) / &fx;
        sum += w.clone() * &p;
    }
    sum
}

/// Q_μ(x, y), summed upward from k = 0.
pub fn q_noncentral(mu: f64, x: f64, y: f64) -> Float {
    let (fmu, fx, fy) = (fl(mu), fl(x), fl(y));
    let mut a = fmu.clone();
    let mut q = q_central(&a, &fy);
    if x == 0.0 {
        return q;
    }
    if y == 0.0 {
        return Float::with_val(PREC, 1);
    }
    let mut d = ln_d(&a, &fy).exp();
    let mut w = (-fx.clone()).exp();
    let mut sum = w.clone() * &q;
    for k in 1..=k_top(x) {
        q += &d;
        a += 1u32;
        d = d * &fy / &a;
        w = w * &fx / k;
        sum += w.clone() * &q;
    }
    sum
}

/// Γ(x).
pub fn gamma(x: f64) -> Float {
    fl(x).gamma()
}

/// ln Γ(x), x > 0.
pub fn loggam(x: f64) -> Float {
    fl(x).ln_gamma()
}

/// Γ(x) / (√(2π) x^{x-½} e^{-x}), x > 0.
pub fn gamstar(x: f64) -> Float {
    let fx = fl(x);
    let ln_2pi = (Float::with_val(PREC, rug::float::Constant::Pi) * 2u32).ln();
    let l = fx.clone().ln_gamma() - (fx.clone() - 0.5f64) * fx.clone().ln() + &fx - ln_2pi / 2u32;
    l.exp()
}

/// Γ(x) / Γ(y).
pub fn quotgamm(x: f64, y: f64) -> Float {
    let (lx, sx) = fl(x).ln_abs_gamma();
    let (ly, sy) = fl(y).ln_abs_gamma();
    let v = (lx - ly).exp();
    if sx == sy {
        v
    } else {
        -v
    }
}

pub fn erfc(x: f64) -> Float {
    fl(x).erfc()
}

/// e^{-x} x^a / Γ(a+1).
pub fn dterm(a: f64, x: f64) -> Float {
    ln_d(&fl(a), &fl(x)).exp()
}
