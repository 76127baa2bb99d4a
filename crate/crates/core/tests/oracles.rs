//! Values checked against exact rational arithmetic or against constants
//! computed once at high precision and frozen here.

#![allow(clippy::excessive_precision)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use qbessel::bqbessel::{
    big_cos_displayed, big_sin_displayed, eval_big_cos, eval_big_sin, eval_j, weight_ratio,
};
use qbessel::orthogonality::weight;
use qbessel::qcalc::{basic_hypergeometric, q_integral, qpoch, qpoch_inf};
use qbessel::zerofinder::find_zeros;
use qbessel::QContext;

fn rat(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().expect("representable")
}

fn close(got: f64, want: f64, tol: f64) {
    let err = (got - want).abs() / want.abs().max(1e-300);
    assert!(err <= tol, "got {got:e}, want {want:e}, rel err {err:e}");
}

/// `J_alpha(x, sqrt(z); q^2)` for integer `2 alpha + 2 = m`, summed exactly
/// until a certified tail is below `2^-80` relative.
fn exact_j(q: f64, m: u32, x: f64, z: f64) -> BigRational {
    let one = BigRational::one();
    let (q, x2, z) = (rat(q), rat(x) * rat(x), rat(z));
    let q2 = &q * &q;
    let qa = (0..m).fold(one.clone(), |acc, _| acc * &q); // q^{2 alpha + 2}
    let mut sum = one.clone();
    let mut t = one.clone();
    let mut q2k = one.clone();
    let eps = BigRational::new(BigInt::one(), BigInt::one() << 80);
    for k in 0..500 {
        let q2k1 = &q2k * &q2;
        let num = -(&qa * &q2k * (&x2 + &q2k) * &z);
        let den = (&one - &q2k1) * (&one - &qa * &q2k);
        t = t * num / den;
        sum = &sum + &t;
        q2k = q2k1;
        if k > 4 && t.abs() < &eps * sum.abs() {
            break;
        }
    }
    sum
}

#[test]
fn finite_pochhammer_matches_rational_product() {
    for &(a, q, n) in &[
        (0.3, 0.5, 7usize),
        (-1.75, 0.9, 25),
        (2.5, 0.25, 12),
        (0.999, 0.1, 40),
    ] {
        let (ra, rq) = (rat(a), rat(q));
        let mut prod = BigRational::one();
        let mut aq = ra.clone();
        for _ in 0..n {
            prod *= BigRational::one() - &aq;
            aq *= &rq;
        }
        close(qpoch(a, q, n), to_f64(&prod), 4e-16);
    }
}

#[test]
fn terminating_hypergeometric_matches_rational_sum() {
    // 2phi1(q^-4, 0.3; 0.7 | q, z) terminates after five terms.
    let (q, z) = (0.5f64, 0.8f64);
    let one = BigRational::one();
    let rq = rat(q);
    let a = [rat(16.0), rat(0.3)];
    let b = rat(0.7);
    let mut t = one.clone();
    let mut sum = one.clone();
    let mut qk = one.clone();
    for _ in 0..4 {
        let num = a
            .iter()
            .fold(one.clone(), |acc, ai| acc * (&one - ai * &qk));
        let den = (&one - &rq * &qk) * (&one - &b * &qk);
        t = t * num / den * rat(z);
        sum = &sum + &t;
        qk *= &rq;
    }
    let got = basic_hypergeometric(&[16.0, 0.3], &[0.7], q, z, 1e-15).unwrap();
    close(got.value, to_f64(&sum), 1e-15);
}

#[test]
fn series_matches_exact_rational_sum() {
    // (q, 2 alpha + 2, x, z)
    let cases = [
        (0.5, 2u32, 1.0, 0.01),
        (0.5, 2, 1.0, 1.5),
        (0.5, 2, 0.25, 30.0),
        (0.75, 3, 0.5, 4.0),
        (0.25, 4, 2.0, 0.7),
        (0.875, 6, 1.0, 9.0),
    ];
    for &(q, m, x, z) in &cases {
        let alpha = m as f64 / 2.0 - 1.0;
        let c = QContext::new(q, alpha).unwrap().with_tol(1e-18).unwrap();
        let got = eval_j(&c, x, z).unwrap();
        let want = to_f64(&exact_j(q, m, x, z));
        let err = (got.value - want).abs();
        assert!(
            err <= got.abs_error + 2.0 * f64::EPSILON * want.abs(),
            "q={q} alpha={alpha} x={x} z={z}: got {} want {want} err {err:e} bound {:e}",
            got.value,
            got.abs_error
        );
    }
}

#[test]
fn jackson_integral_of_monomials() {
    // int_0^a x^n d_q x = (1-q) a^{n+1} / (1 - q^{n+1})
    for &(q, a, n) in &[
        (0.5, 1.0, 0i32),
        (0.5, 2.0, 3),
        (0.9, 0.7, 5),
        (0.3, 1.5, 1),
    ] {
        let got = q_integral(|x| x.powi(n), a, q, 1e-15).unwrap().value;
        let want = (1.0 - q) * a.powi(n + 1) / (1.0 - q.powi(n + 1));
        close(got, want, 1e-14);
    }
}

#[test]
fn frozen_pochhammer_constants() {
    close(
        qpoch_inf(0.5, 0.5, 1e-17).unwrap().value,
        0.2887880950866024212788997,
        2e-16,
    );
    close(
        qpoch_inf(-1.0, 0.25, 1e-17).unwrap().value,
        2.711819347726958760691088,
        2e-16,
    );
    close(
        qpoch_inf(0.3, 0.5, 1e-17).unwrap().value,
        0.5101178266339875718322722,
        4e-16,
    );
}

#[test]
fn frozen_series_value() {
    let c = QContext::new(0.5, 0.0).unwrap().with_tol(1e-18).unwrap();
    close(
        eval_j(&c, 1.0, 0.01).unwrap().value,
        0.9911190109920320792818971,
        2e-16,
    );
}

#[test]
fn weight_value() {
    let c = QContext::new(0.5, 0.0).unwrap();
    close(weight(&c, 1.0).unwrap(), 1.25, 1e-16);
    // (-q^2;q^2)_inf / (-q^4;q^2)_inf = 1 + q^2 for alpha = 0
    close(
        weight_ratio(0.7, 1.0, 2.0, 4.0, 1e-17).unwrap(),
        1.49,
        1e-15,
    );
}

#[test]
fn frozen_zeros() {
    let sets: [(f64, f64, [f64; 5]); 2] = [
        (
            0.5,
            0.0,
            [
                1.1242533587940895586,
                3.6118374054514274213,
                7.9428262520268600599,
                15.998017186351276015,
                31.999984055128014604,
            ],
        ),
        (
            0.8,
            0.5,
            [
                0.49117754248360505007,
                1.0424586026952823569,
                1.6900994970466877513,
                2.4428920041643517438,
                3.2906529969917472145,
            ],
        ),
    ];
    for (q, alpha, want) in sets {
        let t = find_zeros(&QContext::new(q, alpha).unwrap(), 5).unwrap();
        for (got, want) in t.zeros.iter().zip(want) {
            close(*got, want, 4e-16);
        }
    }
}

#[test]
fn trigonometric_specialisations_match_their_series() {
    for &(q, x, z) in &[(0.5, 1.0, 0.3), (0.8, 0.5, 2.0), (0.3, 2.0, 0.05)] {
        let c = QContext::new(q, 0.0).unwrap().with_tol(1e-17).unwrap();
        let cos = eval_big_cos(&c, x, z).unwrap().value;
        let sin = eval_big_sin(&c, x, z).unwrap().value;
        close(cos, big_cos_displayed(q, x, z, 1e-17), 1e-13);
        close(sin, big_sin_displayed(q, x, z, 1e-17), 1e-13);
    }
}

#[test]
fn zero_sign_change_is_exact() {
    // J_0(1, j; 1/4) changes sign across the first computed zero.
    let t = find_zeros(&QContext::new(0.5, 0.0).unwrap(), 1).unwrap();
    let j = t.zeros[0];
    let lo = exact_j(0.5, 2, 1.0, (j * (1.0 - 1e-12)).powi(2));
    let hi = exact_j(0.5, 2, 1.0, (j * (1.0 + 1e-12)).powi(2));
    assert!(lo.is_positive() && hi.is_negative());
    assert!(!lo.is_zero());
}
