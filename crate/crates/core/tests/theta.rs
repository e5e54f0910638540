mod common;

use std::f64::consts::PI;

use common::{golden, random_reals, silver};
use modtheta::precision::{phase_mod2, Cplx, RealInput, ThetaPhase};
use modtheta::theta::{hl_witness, partial_sum, theta_slice, SeriesParams};
use proptest::prelude::*;

fn f(s: f64, x: &RealInput, t: &RealInput, n: u64) -> Cplx {
    partial_sum(&SeriesParams::new(s, t.clone()), x, n).unwrap().value
}

/// Term-by-term sum with phases from `phase_mod2`, independent of the turn kernel.
fn naive(s: f64, x: &RealInput, n1: u64, n2: u64) -> Cplx {
    let mut acc = Cplx::new(0.0, 0.0);
    for k in n1 + 1..=n2 {
        let th = PI * phase_mod2(k, x, 128).to_f64();
        acc += Cplx::from_polar((k as f64).powf(-s), th);
    }
    acc
}

#[test]
fn empty_and_alternating() {
    assert_eq!(f(0.7, &silver(), &RealInput::int(0), 0), Cplx::new(0.0, 0.0));
    let v = f(2.0, &RealInput::int(1), &RealInput::int(0), 1_000_000);
    assert!((v.re + PI * PI / 12.0).abs() < 1e-6);
    assert!(v.im.abs() < 1e-12);
}

#[test]
fn silver_fixture() {
    // 400-bit mpmath evaluation of F_{0.7,100}(sqrt2 - 1)
    let want = Cplx::new(1.397_076_211_508_164_9, 0.719_211_074_986_296_2);
    let v = f(0.7, &silver(), &RealInput::int(0), 100);
    assert!((v - want).norm() < 1e-10, "{v}");
}

#[test]
fn additivity() {
    let ph = ThetaPhase::new(&silver(), &RealInput::int(0));
    for (n1, n2) in [(0u64, 10u64), (100, 5000), (7, 100_000), (40_000, 100_000)] {
        let a = f(0.7, &silver(), &RealInput::int(0), n2) - f(0.7, &silver(), &RealInput::int(0), n1);
        let slice = theta_slice(&ph, 0.7, n1, n2);
        assert!((a - slice).norm() < 1e-12);
        if n2 - n1 <= 5000 {
            assert!((slice - naive(0.7, &silver(), n1, n2)).norm() < 1e-12);
        }
    }
}

#[test]
fn hl_ratios_share_a_constant() {
    let mut worst: f64 = 0.0;
    for n in [100u64, 1000, 10_000] {
        let r = hl_witness(&silver(), n).unwrap();
        worst = worst.max(r.bound_ratio);
    }
    // mpmath direct summation gives 0.454, 0.436, 0.581
    assert!((worst - 0.580_836_156).abs() < 1e-6, "{worst}");
    let g = hl_witness(&golden(), 10_000).unwrap().bound_ratio;
    assert!((g - 0.513_528_875).abs() < 1e-6);
    assert!(g / worst < 3.0 && worst / g < 3.0);
    let one = hl_witness(&silver(), 1).unwrap();
    assert!(one.bound_ratio <= 1.0 / 2.0 + 1e-15);
}

#[test]
fn hl_ratio_bounded_on_random_reals() {
    for x in random_reals(99, 10) {
        for n in [100u64, 1000, 10_000, 100_000] {
            let r = hl_witness(&x, n).unwrap();
            assert!(r.bound_ratio < 2.0, "{} at N={n}", r.bound_ratio);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn periodic_in_x_and_t(p in -500i64..500, q in 1i64..500, a in -50i64..50, b in 1i64..50, n in 0u64..3000) {
        let x = RealInput::ratio(p, q);
        let t = RealInput::ratio(a, b);
        let base = f(0.7, &x, &t, n);
        prop_assert_eq!(base, f(0.7, &x.add(&RealInput::int(2)).unwrap(), &t, n));
        prop_assert_eq!(base, f(0.7, &x, &t.add(&RealInput::int(1)).unwrap(), n));
        let y = RealInput::surd_i(p, 1, 3, q);
        prop_assert_eq!(f(1.0, &y, &t, n), f(1.0, &y.add(&RealInput::int(-2)).unwrap(), &t, n));
    }

    #[test]
    fn conjugation(p in -500i64..500, q in 1i64..500, a in -50i64..50, b in 1i64..50, n in 0u64..3000) {
        let x = RealInput::ratio(p, q);
        let t = RealInput::ratio(a, b);
        let v = f(0.7, &x, &t, n);
        let w = f(0.7, &x.neg(), &t.neg(), n);
        prop_assert!((v - w.conj()).norm() < 1e-12);
    }
}
