//! q-calculus primitives: q-shifted factorials, infinite q-products, basic
//! hypergeometric series, q-difference quotients and the Jackson q-integral.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::series::{sum_ratio_series, RatioStep};
use crate::numeric::{Dd, NeumaierSum};

/// Default relative truncation tolerance for every series.
pub const DEFAULT_TOL: f64 = 1e-13;

/// Default hard cap on the number of series terms.
pub const DEFAULT_TERMS_MAX: usize = 10_000;

/// Number of leading lattice samples used to estimate `sup |f|` in [`q_integral`].
pub const SUP_SAMPLES: usize = 64;

/// Safety factor applied to the sampled supremum in [`q_integral`].
pub const SUP_SAFETY: f64 = 2.0;

/// Base `q`, order `alpha` and the numerical knobs shared by all operations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QContext {
    q: f64,
    alpha: f64,
    tol: f64,
    terms_max: usize,
}

impl QContext {
    pub fn new(q: f64, alpha: f64) -> Result<Self> {
        check_base(q)?;
        if !alpha.is_finite() {
            return Err(Error::InvalidInput(format!(
                "order alpha = {alpha} is not finite"
            )));
        }
        Ok(QContext {
            q,
            alpha,
            tol: DEFAULT_TOL,
            terms_max: DEFAULT_TERMS_MAX,
        })
    }

    pub fn with_tol(mut self, tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "tolerance {tol} must be positive"
            )));
        }
        self.tol = tol;
        Ok(self)
    }

    pub fn with_terms_max(mut self, terms_max: usize) -> Self {
        self.terms_max = terms_max.max(2);
        self
    }

    /// Same base and settings, order replaced.
    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    /// Same base and settings, order shifted by `delta`.
    pub fn shifted(self, delta: f64) -> Self {
        self.with_alpha(self.alpha + delta)
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn terms_max(&self) -> usize {
        self.terms_max
    }

    /// Rejects `alpha <= -1`, the range where the series coefficients can hit poles.
    pub fn require_order_above_minus_one(&self) -> Result<()> {
        if self.alpha > -1.0 {
            Ok(())
        } else {
            Err(Error::InvalidOrder { alpha: self.alpha })
        }
    }

    pub(crate) fn require_order(
        &self,
        lower: f64,
        range: &'static str,
        operation: &'static str,
    ) -> Result<()> {
        if self.alpha > lower {
            Ok(())
        } else {
            Err(Error::OrderOutOfRange {
                alpha: self.alpha,
                range,
                operation,
            })
        }
    }
}

/// A truncated series or product together with its error bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: f64,
    /// Bound on the truncation tail plus rounding.
    pub abs_error: f64,
    pub terms_used: usize,
}

impl SeriesValue {
    pub(crate) fn from_sum(s: &crate::numeric::SeriesSum) -> Result<Self> {
        let value = s.value.to_f64();
        if !s.value.fits_f64() {
            return Err(Error::Overflow(format!(
                "series value {} exceeds the f64 range; use the extended-range variant",
                s.value
            )));
        }
        Ok(SeriesValue {
            value,
            abs_error: s.error_bound().to_f64(),
            terms_used: s.terms,
        })
    }
}

pub(crate) fn check_base(q: f64) -> Result<()> {
    if q > 0.0 && q < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidBase { q })
    }
}

/// `(a; q)_n = prod_{i<n} (1 - a q^i)`.
pub fn qpoch(a: f64, q: f64, n: usize) -> f64 {
    let mut prod = Dd::ONE;
    let mut aqi = Dd::from_f64(a);
    let qd = Dd::from_f64(q);
    for _ in 0..n {
        prod = prod * (Dd::ONE - aqi);
        aqi = aqi * qd;
    }
    prod.to_f64()
}

/// `(a_1, ..., a_k; q)_n`, the product of [`qpoch`] over all parameters.
pub fn qpoch_multi(params: &[f64], q: f64, n: usize) -> f64 {
    params.iter().map(|&a| qpoch(a, q, n)).product()
}

/// `(a; q)_inf` truncated so that the relative error is below `tol`.
///
/// The bound uses `|log prod_{i>=N} (1 - a q^i)| <= |a| q^N / ((1-q)(1-|a| q^N))`.
pub fn qpoch_inf(a: f64, q: f64, tol: f64) -> Result<SeriesValue> {
    qpoch_ratio_inf(a, 0.0, q, tol)
}

/// `(a; q)_inf / (b; q)_inf` as one fused product `prod (1 - a q^j)/(1 - b q^j)`.
///
/// Fusing the two products keeps every partial product near the final value,
/// which avoids overflow when `|a|, |b|` are large.
pub fn qpoch_ratio_inf(a: f64, b: f64, q: f64, tol: f64) -> Result<SeriesValue> {
    check_base(q)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!(
            "tolerance {tol} must be positive"
        )));
    }
    let qd = Dd::from_f64(q);
    let mut aq = Dd::from_f64(a);
    let mut bq = Dd::from_f64(b);
    let mut qn = 1.0f64; // q^n
    let mut prod = Dd::ONE;
    let mut n = 0usize;
    loop {
        let den = Dd::ONE - bq;
        if den.hi.abs() <= 8.0 * f64::EPSILON {
            return Err(Error::PoleInDenominator { b, index: n });
        }
        let num = Dd::ONE - aq;
        prod = prod * (num / den);
        n += 1;
        aq = aq * qd;
        bq = bq * qd;
        qn *= q;
        if prod.is_zero() {
            return Ok(SeriesValue {
                value: 0.0,
                abs_error: 0.0,
                terms_used: n,
            });
        }
        let (ab, bb) = (a.abs() * qn, b.abs() * qn);
        let guard = 1.0 - ab - 2.0 * bb;
        if guard > 0.5 {
            let log_tail = (a - b).abs().max(a.abs() + b.abs()) * qn / ((1.0 - q) * guard);
            let rel = log_tail.exp_m1();
            if rel < tol || n >= 200_000 {
                let value = prod.to_f64();
                return Ok(SeriesValue {
                    value,
                    abs_error: value.abs() * (rel + 4.0 * n as f64 * f64::EPSILON * f64::EPSILON)
                        + value.abs() * f64::EPSILON,
                    terms_used: n,
                });
            }
        }
    }
}

/// The basic hypergeometric series `r phi s (a; b | q, z)` with the
/// `(-1)^{k(1+s-r)} q^{(1+s-r) C(k,2)}` factor.
///
/// Terminating series (some `a_i = q^{-m}`) are summed exactly; a denominator
/// parameter `q^{-m}` reached before termination is a pole.
pub fn basic_hypergeometric(
    nums: &[f64],
    dens: &[f64],
    q: f64,
    z: f64,
    tol: f64,
) -> Result<SeriesValue> {
    check_base(q)?;
    let (r, s) = (nums.len() as i64, dens.len() as i64);
    let d = 1 + s - r;
    if d < 0 {
        return Err(Error::DivergentSeries {
            reason: format!("{r}phi{s} has r > s + 1"),
        });
    }
    if d == 0 && z.abs() >= 1.0 {
        return Err(Error::DivergentSeries {
            reason: format!("{r}phi{s} needs |z| < 1, got z = {z}"),
        });
    }
    let qd = Dd::from_f64(q);
    let zd = Dd::from_f64(z);
    let mut qk = Dd::ONE; // q^k
    let mut pole: Option<Error> = None;
    let sum = sum_ratio_series(Dd::ZERO, Dd::ONE, tol, DEFAULT_TERMS_MAX, |k| {
        let mut num = Dd::ONE;
        let mut terminated = false;
        for &a in nums {
            let f = Dd::ONE - qk * a;
            if f.hi.abs() <= 8.0 * f64::EPSILON {
                terminated = true;
            }
            num = num * f;
        }
        let mut den = Dd::ONE - qk * qd;
        for &b in dens {
            let f = Dd::ONE - qk * b;
            if f.hi.abs() <= 8.0 * f64::EPSILON && !terminated && pole.is_none() {
                pole = Some(Error::PoleInDenominator { b, index: k });
            }
            den = den * f;
        }
        let qkf = qk.to_f64();
        let mut sign_pow = Dd::ONE;
        for _ in 0..d {
            sign_pow = -(sign_pow * qk);
        }
        let ratio = if terminated || pole.is_some() {
            Dd::ZERO
        } else {
            num / den * sign_pow * zd
        };
        // uniform bound over j >= k
        let mut bound = qkf.powi(d as i32) * z.abs() / (1.0 - qkf * q);
        for &a in nums {
            bound *= 1.0 + a.abs() * qkf;
        }
        for &b in dens {
            let g = 1.0 - b.abs() * qkf;
            bound = if g > 0.0 { bound / g } else { f64::INFINITY };
        }
        qk = qk * qd;
        RatioStep {
            ratio,
            bound: bound * (1.0 + 1e-12),
        }
    })?;
    if let Some(e) = pole {
        return Err(e);
    }
    SeriesValue::from_sum(&sum)
}

/// `D_q f(x) = (f(x) - f(qx)) / ((1 - q) x)` for `x != 0`.
pub fn q_derivative<F: Fn(f64) -> f64>(f: F, x: f64, q: f64) -> Result<f64> {
    check_base(q)?;
    if x == 0.0 {
        return Err(Error::ZeroArgument);
    }
    Ok((f(x) - f(q * x)) / ((1.0 - q) * x))
}

/// `D_{q^{-1}} f(x) = (f(x) - f(x/q)) / ((1 - 1/q) x)` for `x != 0`.
pub fn q_derivative_inv<F: Fn(f64) -> f64>(f: F, x: f64, q: f64) -> Result<f64> {
    check_base(q)?;
    if x == 0.0 {
        return Err(Error::ZeroArgument);
    }
    Ok((f(x) - f(x / q)) / ((1.0 - 1.0 / q) * x))
}

/// Jackson q-integral `int_0^a f(t) d_q t = (1-q) a sum_n f(a q^n) q^n`.
///
/// `sup |f|` is estimated from the first [`SUP_SAMPLES`] lattice values times
/// [`SUP_SAFETY`]; the sum stops once `a q^{N+1} sup|f| < tol * max(1, |S|)`.
/// A sampled value exceeding the estimated bound is reported as an error.
pub fn q_integral<F: Fn(f64) -> f64>(f: F, a: f64, q: f64, tol: f64) -> Result<SeriesValue> {
    check_base(q)?;
    if !(a > 0.0) {
        return Err(Error::NonPositiveUpperLimit { a });
    }
    let head: Vec<f64> = (0..SUP_SAMPLES).map(|n| f(a * q.powi(n as i32))).collect();
    if let Some(n) = head.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "integrand not finite at lattice index {n}"
        )));
    }
    let sup = SUP_SAFETY * head.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut acc = NeumaierSum::new();
    let mut qn = 1.0f64;
    let mut n = 0usize;
    loop {
        let v = if n < SUP_SAMPLES { head[n] } else { f(a * qn) };
        if v.abs() > sup {
            return Err(Error::SupBoundExceeded {
                index: n,
                value: v,
                bound: sup,
            });
        }
        acc.add(v * qn);
        let tail = a * qn * q * sup;
        let total = (1.0 - q) * a * acc.value();
        n += 1;
        qn *= q;
        if n >= SUP_SAMPLES && tail < tol * total.abs().max(1.0) {
            return Ok(SeriesValue {
                value: total,
                abs_error: tail + 4.0 * n as f64 * f64::EPSILON * a * sup,
                terms_used: n,
            });
        }
        if n > 10 * DEFAULT_TERMS_MAX {
            return Err(Error::DivergentSeries {
                reason: "q-integral did not reach tolerance".into(),
            });
        }
    }
}
