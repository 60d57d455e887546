mod common;

use ncgamma::asymptotic::{coefficient_scheme_series, f_gamma_series, invert_expansion, EtaFrame};
use ncgamma::central::incgam;
use ncgamma::{
    cdf_central, dterm, eta_to_lambda, inv_central, lambda_to_eta, DistributionKind, ProbabilityPair, Routine,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EPS: f64 = f64::EPSILON;
use DistributionKind::{ChiSquare, Gamma};

#[test]
fn smaller_tail_against_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut n = 0;
    while n < 1500 {
        let a = 10f64.powf(rng.gen_range(-8.0..4.0));
        let x = 10f64.powf(rng.gen_range(-6.0..4.0));
        let (p, q) = common::central(a, x);
        let (want, lower) = if p < q { (p, true) } else { (q, false) };
        let w = want.to_f64();
        if w < 1e-290 {
            continue;
        }
        n += 1;
        let t = incgam(a, x);
        let got = if lower { t.p() } else { t.q() };
        assert!(common::rel_err(got, &want) <= 2e-14, "a={a} x={x}: {got:e}");
    }
}

#[test]
fn trivial_cases() {
    let r = cdf_central(Gamma, 3.7, 0.0).unwrap();
    assert_eq!((r.p, r.q), (0.0, 1.0));
    let q = cdf_central(Gamma, 1.0, 2.5).unwrap().q;
    assert!((q - (-2.5f64).exp()).abs() <= 2.0 * EPS * q);
    assert_eq!(
        cdf_central(ChiSquare, 4.0, 3.0).unwrap(),
        cdf_central(Gamma, 2.0, 1.5).unwrap()
    );
    let x = inv_central(Gamma, 1.0, 0.5, 0.5).unwrap();
    assert!((x - 2f64.ln()).abs() <= 2.0 * EPS * x);
    let x = inv_central(ChiSquare, 2.0, 0.9, 0.1).unwrap();
    assert!((x + 2.0 * 0.1f64.ln()).abs() <= 4.0 * EPS * x);
}

#[test]
fn status_codes() {
    let e = cdf_central(Gamma, -1.0, 1.0).unwrap_err();
    assert_eq!(Routine::CdfCentral.ierr(e.status()), 2);
    let e = inv_central(Gamma, 2.0, 1e-200, 1.0).unwrap_err();
    assert_eq!(Routine::InvCentral.ierr(e.status()), 3);
    let e = inv_central(Gamma, 2.0, 0.3, 0.8).unwrap_err();
    assert_eq!(Routine::InvCentral.ierr(e.status()), 3);
    let e = cdf_central(Gamma, 1.0, 800.0).unwrap_err();
    assert_eq!(Routine::CdfCentral.ierr(e.status()), 1);
}

#[test]
fn inversion_round_trip_random() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..3000 {
        let a = 10f64.powf(rng.gen_range(-3.0..4.0));
        let small = 10f64.powf(rng.gen_range(-100.0..-0.302));
        let lower = rng.gen_bool(0.5);
        let pair = ProbabilityPair::from_tail(small, !lower);
        let x = match inv_central(Gamma, a, pair.p, pair.q) {
            Ok(x) => x,
            // the quantile x ~ (p Γ(1+a))^(1/a) is below the normal range
            Err(ncgamma::Error::OverflowUnderflow { .. })
                if lower && (small.ln() + ncgamma::loggam(1.0 + a).unwrap()) / a < -700.0 =>
            {
                continue
            }
            Err(e) => panic!("a={a} small={small:e} lower={lower}: {e}"),
        };
        let t = incgam(a, x);
        let got = if lower { t.p() } else { t.q() };
        // one ulp of x moves the tail by kappa eps, kappa = |x T'(x) / T| = a D(a, x) / T
        let kappa = a * dterm(a, x).unwrap_or(0.0) / got;
        let tol = 1e-13 + kappa * EPS;
        assert!(
            (got / small - 1.0).abs() <= tol,
            "a={a} small={small:e} lower={lower}: {got:e}"
        );
    }
}

#[test]
fn expansion_seed_then_newton() {
    let (a, p) = (10.0, 0.3);
    let frame = EtaFrame::incomplete_gamma(a, a).unwrap();
    let e = invert_expansion(&frame, ProbabilityPair::new(p, 1.0 - p)).unwrap();
    let mut x = a * eta_to_lambda(e.eta(a));
    let seed_res = (cdf_central(Gamma, a, x).unwrap().p - p).abs();
    assert!(seed_res <= 1e-3, "seed residual {seed_res:e}");
    for _ in 0..3 {
        let r = cdf_central(Gamma, a, x).unwrap().p - p;
        // P'(x) = a D(a, x) / x
        x -= r / (a * dterm(a, x).unwrap() / x);
    }
    let res = (cdf_central(Gamma, a, x).unwrap().p / p - 1.0).abs();
    assert!(res <= 1e-15, "after 3 steps {res:e}");
}

#[test]
fn seeds_degrade_gracefully() {
    let mut worst: f64 = 0.0;
    for i in 0..40 {
        let a = 10f64.powf(4.0 * i as f64 / 39.0);
        for j in 0..25 {
            let p = 10f64.powf(-8.0 + 8.0 * j as f64 / 24.0).min(1.0 - 1e-8);
            for pair in [ProbabilityPair::new(p, 1.0 - p), ProbabilityPair::new(1.0 - p, p)] {
                let frame = EtaFrame::incomplete_gamma(a, a).unwrap();
                let e = invert_expansion(&frame, pair).unwrap();
                let x = a * eta_to_lambda(e.eta(a));
                let got = cdf_central(Gamma, a, x).map(|r| r.p).unwrap_or(0.0);
                worst = worst.max((got - pair.p).abs());
            }
        }
    }
    assert!(worst <= 1e-2, "worst seed residual {worst:e}");
}

#[test]
fn eta_lambda_grid() {
    let mut prev = f64::NEG_INFINITY;
    for i in 0..=4000 {
        let lam = 10f64.powf(-4.0 + 8.0 * i as f64 / 4000.0);
        let eta = lambda_to_eta(lam).unwrap();
        assert!(eta > prev, "lambda={lam}");
        prev = eta;
        let back = eta_to_lambda(eta);
        assert!((back / lam - 1.0).abs() <= 1e-13, "lambda={lam}");
        let g = lam - lam.ln() - 1.0;
        assert!((0.5 * eta * eta - g).abs() <= 1e-14 * g.max(1.0), "lambda={lam}");
    }
}

#[test]
fn a_coefficients_relation() {
    let a = f_gamma_series(8).unwrap();
    let (big_a, _) = coefficient_scheme_series(&f_gamma_series(8).unwrap(), 0.3, 2);
    // A_n = (1/2)_n 2^n a_{2n}
    let expected = [a[0], a[2], 3.0 * a[4]];
    for n in 0..3 {
        assert!(
            (big_a[n] - expected[n]).abs() <= 1e-14 * expected[n].abs().max(1e-3),
            "n={n}"
        );
    }
}

proptest! {
    #[test]
    fn complementarity(a in 1e-6f64..1e4, x in 0.0f64..1e4) {
        if let Ok(r) = cdf_central(Gamma, a, x) {
            prop_assert!((r.p + r.q - 1.0).abs() <= 2.0 * EPS);
        }
    }

    #[test]
    fn monotone_in_x(a in 1e-3f64..1e3, x in 1e-3f64..1e3, h in 1e-6f64..1.0) {
        let (t0, t1) = (incgam(a, x), incgam(a, x + h * x));
        prop_assert!(t1.p() >= t0.p());
        prop_assert!(t1.q() <= t0.q());
    }

    #[test]
    fn chi_square_is_prescaling(n in 1e-3f64..2e4, t in 0.0f64..2e4) {
        let a = cdf_central(ChiSquare, n, t);
        let b = cdf_central(Gamma, n / 2.0, t / 2.0);
        prop_assert_eq!(a, b);
    }
}
