use proptest::prelude::*;

use qbessel::bqbessel::{eval_j, eval_j_lambda_ext};
use qbessel::json;
use qbessel::orthogonality::inner_product;
use qbessel::qcalc::{q_derivative, q_integral, qpoch};
use qbessel::sampling::{q_hankel_transform, sampling_kernel};
use qbessel::zerofinder::find_zeros;
use qbessel::{Dd, Ext, QContext, QLatticeSignal, ZeroTable};

fn ctx(q: f64, alpha: f64) -> QContext {
    QContext::new(q, alpha).unwrap()
}

fn near(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pochhammer_splits(a in -3.0f64..3.0, q in 0.05f64..0.95, m in 0usize..15, n in 0usize..15) {
        let whole = qpoch(a, q, m + n);
        let split = qpoch(a, q, m) * qpoch(a * q.powi(m as i32), q, n);
        prop_assert!(near(whole, split, 1e-12), "{whole} vs {split}");
    }

    #[test]
    fn jackson_integral_is_linear(q in 0.1f64..0.9, a in 0.2f64..3.0, s in -2.0f64..2.0, t in -2.0f64..2.0) {
        let f = |x: f64| (1.0 + x).ln();
        let g = |x: f64| x * x - 0.5 * x;
        let lhs = q_integral(|x| s * f(x) + t * g(x), a, q, 1e-15).unwrap().value;
        let rhs = s * q_integral(f, a, q, 1e-15).unwrap().value
            + t * q_integral(g, a, q, 1e-15).unwrap().value;
        prop_assert!(near(lhs, rhs, 1e-12));
    }

    #[test]
    fn jackson_integral_inverts_q_derivative(q in 0.1f64..0.9, a in 0.2f64..2.0) {
        // int_0^a D_q f d_q x = f(a) - f(0)
        let f = |x: f64| (x * 1.3).sin() + x * x;
        let lhs = q_integral(|x| q_derivative(f, x, q).unwrap(), a, q, 1e-15).unwrap().value;
        prop_assert!(near(lhs, f(a) - f(0.0), 1e-11), "{lhs} vs {}", f(a));
    }

    #[test]
    fn q_derivative_of_monomial(q in 0.05f64..0.95, x in 0.1f64..3.0, n in 1i32..8) {
        let got = q_derivative(|t| t.powi(n), x, q).unwrap();
        let qn = (1.0 - q.powi(n)) / (1.0 - q);
        prop_assert!(near(got, qn * x.powi(n - 1), 1e-11));
    }

    #[test]
    fn q_derivative_tends_to_derivative(x in 0.2f64..2.0) {
        let d = q_derivative(f64::exp, x, 1.0 - 1e-7).unwrap();
        prop_assert!(near(d, x.exp(), 1e-6));
    }

    #[test]
    fn series_is_one_at_zero_spectral_parameter(q in 0.05f64..0.95, alpha in -0.9f64..3.0, x in -3.0f64..3.0) {
        prop_assert_eq!(eval_j(&ctx(q, alpha), x, 0.0).unwrap().value, 1.0);
    }

    #[test]
    fn series_is_even_in_x(q in 0.05f64..0.95, alpha in -0.9f64..3.0, x in 0.0f64..3.0, z in -5.0f64..50.0) {
        let c = ctx(q, alpha);
        prop_assert_eq!(eval_j(&c, x, z).unwrap().value, eval_j(&c, -x, z).unwrap().value);
    }

    #[test]
    fn series_exceeds_one_for_negative_z(q in 0.05f64..0.95, alpha in -0.9f64..3.0, x in -3.0f64..3.0, z in -20.0f64..-1e-6) {
        prop_assert!(eval_j(&ctx(q, alpha), x, z).unwrap().value > 1.0);
    }

    #[test]
    fn error_bound_covers_tighter_sum(q in 0.1f64..0.9, alpha in -0.5f64..2.0, x in 0.0f64..2.0, z in 0.0f64..200.0) {
        let loose = eval_j(&ctx(q, alpha).with_tol(1e-8).unwrap(), x, z).unwrap();
        let tight = eval_j(&ctx(q, alpha).with_tol(1e-20).unwrap(), x, z).unwrap();
        prop_assert!((loose.value - tight.value).abs() <= loose.abs_error + tight.abs_error + 1e-15 * tight.value.abs().max(1.0));
    }

    #[test]
    fn lambda_and_z_forms_agree(q in 0.1f64..0.9, alpha in -0.5f64..2.0, lam in 0.0f64..10.0) {
        let c = ctx(q, alpha).with_tol(1e-18).unwrap();
        let a = eval_j_lambda_ext(&c, 1.0, lam).unwrap().value.to_f64();
        let b = eval_j(&c, 1.0, lam * lam).unwrap();
        prop_assert!((a - b.value).abs() <= b.abs_error + 1e-12 * b.value.abs().max(1.0));
    }

    #[test]
    fn inner_product_is_symmetric_and_bilinear(
        q in 0.2f64..0.9,
        f in prop::collection::vec(-2.0f64..2.0, 1..6),
        g in prop::collection::vec(-2.0f64..2.0, 1..6),
        h in prop::collection::vec(-2.0f64..2.0, 1..6),
        s in -2.0f64..2.0,
    ) {
        let c = ctx(q, 0.5);
        let sig = |v: &Vec<f64>| QLatticeSignal::new(1.0, v.clone()).unwrap();
        let n = g.len().min(h.len());
        let comb: Vec<f64> = (0..n).map(|i| s * g[i] + h[i]).collect();
        let ip = |a: &QLatticeSignal, b: &QLatticeSignal| inner_product(&c, a, b).unwrap().value;
        let (fs, gs, hs, cs) = (sig(&f), sig(&g[..n].to_vec()), sig(&h[..n].to_vec()), sig(&comb));
        prop_assert!(near(ip(&fs, &gs), ip(&gs, &fs), 1e-15));
        prop_assert!((ip(&fs, &cs) - (s * ip(&fs, &gs) + ip(&fs, &hs))).abs() <= 1e-13);
    }

    #[test]
    fn transform_is_linear(
        f in prop::collection::vec(-2.0f64..2.0, 3),
        g in prop::collection::vec(-2.0f64..2.0, 3),
        s in -2.0f64..2.0,
        lam in 0.1f64..5.0,
    ) {
        let c = ctx(0.5, 0.0);
        let comb: Vec<f64> = f.iter().zip(&g).map(|(a, b)| s * a + b).collect();
        let t = |v: &Vec<f64>| q_hankel_transform(&c, &QLatticeSignal::new(1.0, v.clone()).unwrap(), lam).unwrap().value;
        prop_assert!((t(&comb) - (s * t(&f) + t(&g))).abs() <= 1e-13);
    }

    #[test]
    fn dd_sum_is_exact(a in -1e10f64..1e10, b in -1e-10f64..1e-10) {
        let s = Dd::from_f64(a) + Dd::from_f64(b);
        prop_assert_eq!(s.hi + s.lo, a + b);
        prop_assert_eq!((s - Dd::from_f64(a)).to_f64(), b);
    }

    #[test]
    fn ext_products_keep_range(m in 0.5f64..1.0, e in -5000i64..5000, x in -1e100f64..1e100) {
        let big = Ext::new(m, e);
        let back = (big * x) / big;
        prop_assert!(near(back.to_f64(), x, 1e-15));
        let s: Ext = big.to_string().parse().unwrap();
        prop_assert_eq!(s, big);
    }

    #[test]
    fn zero_table_json_round_trip(
        zeros in prop::collection::vec(0.01f64..1e6, 1..8),
        exps in prop::collection::vec(-3000i64..3000, 8),
        res in prop::collection::vec(0.0f64..1e-9, 8),
    ) {
        let mut zeros = zeros;
        zeros.sort_by(f64::total_cmp);
        zeros.dedup();
        let n = zeros.len();
        let t = ZeroTable {
            q: 0.5,
            alpha: 0.25,
            a: 1.0,
            zeros,
            derivs: exps[..n].iter().map(|&e| Ext::new(-0.75, e)).collect(),
            residuals: res[..n].to_vec(),
        };
        let back = json::parse_zero_table(&json::to_string(&t).unwrap()).unwrap();
        prop_assert_eq!(back, t);
    }
}

#[test]
fn kernel_is_linear_in_its_samples() {
    // reconstruction of a + b equals the sum of the reconstructions
    let c = ctx(0.5, 0.0);
    let t = find_zeros(&c, 10).unwrap();
    let lam = 0.77;
    let f = QLatticeSignal::new(1.0, vec![0.3, -1.2]).unwrap();
    let g = QLatticeSignal::new(1.0, vec![2.0, 0.5]).unwrap();
    let h = QLatticeSignal::new(1.0, vec![2.3, -0.7]).unwrap();
    let rec = |s: &QLatticeSignal| -> f64 {
        (0..t.len())
            .map(|k| {
                q_hankel_transform(&c, s, t.zeros[k]).unwrap().value
                    * sampling_kernel(&c, &t, k, lam).unwrap()
            })
            .sum()
    };
    assert!((rec(&h) - rec(&f) - rec(&g)).abs() < 1e-13);
}
