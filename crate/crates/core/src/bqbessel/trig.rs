//! Big q-cosine and q-sine.

use super::eval_j;
use crate::error::Result;
use crate::numeric::NeumaierSum;
use crate::qcalc::{QContext, SeriesValue};

/// `cos(x, lambda; q^2) = J_{-1/2}(x, lambda; q^2)`.
pub fn eval_big_cos(ctx: &QContext, x: f64, z: f64) -> Result<SeriesValue> {
    eval_j(&ctx.with_alpha(-0.5), x, z)
}

/// `sin(x, lambda; q^2) = J_{1/2}(x, lambda; q^2) / (1 - q)`.
pub fn eval_big_sin(ctx: &QContext, x: f64, z: f64) -> Result<SeriesValue> {
    let v = eval_j(&ctx.with_alpha(0.5), x, z)?;
    let s = 1.0 - ctx.q();
    Ok(SeriesValue {
        value: v.value / s,
        abs_error: v.abs_error / s,
        terms_used: v.terms_used,
    })
}

/// Sums `sum_k (-1)^k q^{2C(k,2) + shift k} P_k(x) z^k / (q;q)_{2k + odd}`
/// term by term from its own factors, without the order-alpha ratio.
fn displayed_series(q: f64, x: f64, z: f64, shift: i32, odd: usize, tol: f64) -> f64 {
    let mut acc = NeumaierSum::new();
    let mut qpoch = 1.0; // (q;q)_{2k+odd}
    for i in 1..=odd {
        qpoch *= 1.0 - q.powi(i as i32);
    }
    let mut pk = 1.0; // P_k(x)
    let mut zk = 1.0;
    let mut prev = f64::INFINITY;
    for k in 0..10_000usize {
        let e = (k * k.saturating_sub(1)) as i32 + shift * k as i32;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let t = sign * q.powi(e) * pk * zk / qpoch;
        acc.add(t);
        if t.abs() <= tol * acc.value().abs().max(1.0) * 1e-3 && t.abs() < prev {
            break;
        }
        prev = t.abs();
        pk *= x * x + q.powi(2 * k as i32);
        zk *= z;
        let m = 2 * k + odd;
        qpoch *= (1.0 - q.powi(m as i32 + 1)) * (1.0 - q.powi(m as i32 + 2));
    }
    acc.value()
}

/// Big q-cosine from its own displayed `(q;q)_{2k}` series.
pub fn big_cos_displayed(q: f64, x: f64, z: f64, tol: f64) -> f64 {
    displayed_series(q, x, z, 1, 0, tol)
}

/// Big q-sine from its own displayed `(q;q)_{2k+1}` series.
pub fn big_sin_displayed(q: f64, x: f64, z: f64, tol: f64) -> f64 {
    displayed_series(q, x, z, 3, 1, tol)
}
