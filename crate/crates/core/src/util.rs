//! Small floating-point helpers.

/// Product accumulated in double-double form.
#[derive(Debug, Clone, Copy)]
pub(crate) struct DdProduct {
    hi: f64,
    lo: f64,
}

impl DdProduct {
    pub(crate) fn one() -> Self {
        DdProduct { hi: 1.0, lo: 0.0 }
    }

    pub(crate) fn mul(&mut self, b: f64) {
        let p = self.hi * b;
        let e = self.hi.mul_add(b, -p) + self.lo * b;
        let hi = p + e;
        self.lo = e - (hi - p);
        self.hi = hi;
    }

    pub(crate) fn value(&self) -> f64 {
        self.hi + self.lo
    }

    /// Natural log of the product, keeping the low part.
    pub(crate) fn ln(&self) -> f64 {
        self.hi.ln() + self.lo / self.hi
    }
}

/// sin(pi x) with exact argument reduction.
pub(crate) fn sinpi(x: f64) -> f64 {
    if !x.is_finite() {
        return f64::NAN;
    }
    let mut r = x - 2.0 * (x / 2.0).round();
    if r > 0.5 {
        r = 1.0 - r;
    } else if r < -0.5 {
        r = -1.0 - r;
    }
    if r.abs() <= 0.25 {
        (std::f64::consts::PI * r).sin()
    } else {
        (std::f64::consts::PI * (0.5 - r.abs())).cos().copysign(r)
    }
}

/// ln(1+t) - t, accurate for small |t|.
pub(crate) fn ln1pmx(t: f64) -> f64 {
    if t.abs() > 0.25 {
        return t.ln_1p() - t;
    }
    // -t^2 * sum_j (-t)^j / (j+2)
    let mut s = 0.0;
    let mut p = 1.0;
    for j in 0..80 {
        let term = p / (j as f64 + 2.0);
        s += term;
        if term.abs() <= 1e-17 * s.abs() {
            break;
        }
        p *= -t;
    }
    -t * t * s
}

/// x*x as an unevaluated sum hi + lo.
pub(crate) fn square_split(x: f64) -> (f64, f64) {
    let hi = x * x;
    (hi, x.mul_add(x, -hi))
}

/// exp(-x^2) without the rounding error of forming x^2.
pub(crate) fn exp_neg_sq(x: f64) -> f64 {
    let (hi, lo) = square_split(x);
    (-hi).exp() * (1.0 - lo)
}

/// exp(x^2), same idea.
pub(crate) fn exp_sq(x: f64) -> f64 {
    let (hi, lo) = square_split(x);
    hi.exp() * (1.0 + lo)
}

/// Mantissa in [0.5, 1) and binary exponent, subnormals included.
pub(crate) fn frexp(x: f64) -> (f64, i64) {
    if x == 0.0 || !x.is_finite() {
        return (x, 0);
    }
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64;
    if exp == 0 {
        let (m, e) = frexp(x * 2f64.powi(64));
        return (m, e - 64);
    }
    let m = f64::from_bits((bits & !(0x7ff << 52)) | (1022 << 52));
    (m, exp - 1022)
}

/// Unevaluated sum hi + lo with |lo| <= ulp(hi)/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    Dd {
        hi: s,
        lo: (a - (s - bb)) + (b - bb),
    }
}

fn fast_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd { hi: s, lo: b - (s - a) }
}

impl Dd {
    pub(crate) fn from(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub(crate) fn add(self, o: Dd) -> Dd {
        let s = two_sum(self.hi, o.hi);
        fast_two_sum(s.hi, s.lo + self.lo + o.lo)
    }

    pub(crate) fn add_f64(self, b: f64) -> Dd {
        self.add(Dd::from(b))
    }

    pub(crate) fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    pub(crate) fn mul_f64(self, b: f64) -> Dd {
        let p = self.hi * b;
        fast_two_sum(p, self.hi.mul_add(b, -p) + self.lo * b)
    }

    pub(crate) fn value(self) -> f64 {
        self.hi + self.lo
    }

    /// exp(hi + lo) with only the rounding of exp(hi).
    pub(crate) fn exp(self) -> f64 {
        self.hi.exp() * (1.0 + self.lo)
    }
}

const LN2_HI: f64 = 6.93147180369123816490e-01;
const LN2_LO: f64 = 1.90821492927058770002e-10;

/// ln v in double-double for finite v > 0.
pub(crate) fn ln_dd(v: f64) -> Dd {
    let (mut m, mut k) = frexp(v);
    if m < std::f64::consts::FRAC_1_SQRT_2 {
        m *= 2.0;
        k -= 1;
    }
    // ln m = 2 atanh s, s = (m-1)/(m+1), |s| < 0.172
    let f = m - 1.0;
    let u = two_sum(2.0, f);
    let s_hi = f / u.hi;
    let s_lo = (s_hi.mul_add(-u.hi, f) - s_hi * u.lo) / u.hi;
    let s2 = s_hi * s_hi;
    let mut r = 0.0;
    for j in (1..=12).rev() {
        r = r * s2 + 2.0 / (2 * j + 1) as f64;
    }
    let ln_m = fast_two_sum(2.0 * s_hi, 2.0 * s_lo + s_hi * s2 * r);
    // k * LN2_HI is exact: LN2_HI has 21 trailing zero bits
    let kf = k as f64;
    fast_two_sum(kf * LN2_HI, kf * LN2_LO).add(ln_m)
}

/// x - a - a ln(x/a) >= 0 in double-double, for a > 0, x > 0.
pub(crate) fn gamma_exponent(a: f64, x: f64) -> Dd {
    let l_hi = x / a;
    let l_lo = l_hi.mul_add(-a, x) / a;
    let ln_l = ln_dd(l_hi).add_f64(l_lo / l_hi);
    two_sum(x, -a).add(ln_l.mul_f64(a).neg())
}
