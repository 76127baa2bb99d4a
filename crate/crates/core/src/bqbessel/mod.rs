//! Big q-Bessel functions
//!
//! `J_alpha(x, lambda; q^2) = sum_k c_k P_k(x) z^k` with `z = lambda^2`,
//! `P_k(x) = prod_{j<k} (x^2 + q^{2j})` and
//! `c_k = (-1)^k q^{2 C(k,2) + 2k(alpha+1)} / ((q^2;q^2)_k (q^{2alpha+2};q^2)_k)`.
//!
//! All evaluation goes through the ratio engine in [`crate::numeric::series`]
//! with double-double terms and a floating exponent, so arguments whose terms
//! overflow `f64` (large zeros, large `x`) are still handled by the `_ext`
//! variants.

mod identities;
mod trig;

pub use identities::{
    apply_l, identity_residual, recurrence_alpha_step, recurrence_alpha_step_regularized,
    recurrence_shifted, recurrence_shifted_printed, recurrence_shifted_regularized,
    sin_inverse_difference_constant, IdentityKind,
};
pub use trig::{big_cos_displayed, big_sin_displayed, eval_big_cos, eval_big_sin};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::series::{sum_ratio_series, RatioStep};
use crate::numeric::{Dd, Ext, SeriesSum};
use crate::qcalc::{qpoch_ratio_inf, QContext, SeriesValue};

/// A point `(x, z = lambda^2)` at which a big q-Bessel function of order
/// `alpha` is evaluated. Negative `z` puts `lambda` on the imaginary axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BigQBesselPoint {
    pub x: f64,
    pub z: f64,
    pub alpha: f64,
}

impl BigQBesselPoint {
    pub fn new(x: f64, z: f64, alpha: f64) -> Result<Self> {
        if !(x.is_finite() && z.is_finite() && alpha.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite point x = {x}, z = {z}, alpha = {alpha}"
            )));
        }
        Ok(BigQBesselPoint { x, z, alpha })
    }

    pub fn from_lambda(x: f64, lambda: f64, alpha: f64) -> Result<Self> {
        Self::new(x, lambda * lambda, alpha)
    }

    pub fn eval(&self, ctx: &QContext) -> Result<SeriesValue> {
        eval_j(&ctx.with_alpha(self.alpha), self.x, self.z)
    }
}

/// Per-order constants shared by the term-ratio recurrences.
struct Coeffs {
    q2: Dd,
    /// `q^{2 alpha + 2}`
    qa: Dd,
    x2: Dd,
    z: Dd,
}

impl Coeffs {
    fn new(q: f64, alpha: f64, x: f64, z: Dd) -> Self {
        Coeffs {
            q2: Dd::mul_f64s(q, q),
            qa: Dd::pow_real(q, 2.0 * alpha + 2.0),
            x2: Dd::mul_f64s(x, x),
            z,
        }
    }

    /// `t_{k+1}/t_k` of the J series, given `q2k = q^{2k}`.
    fn ratio(&self, q2k: Dd) -> Dd {
        let a = self.qa * q2k;
        let num = -(a * (self.x2 + q2k) * self.z);
        let den = (Dd::ONE - q2k * self.q2) * (Dd::ONE - a);
        num / den
    }
}

fn step_bound(r: Dd) -> f64 {
    r.hi.abs() * (1.0 + 1e-12)
}

fn j_series(ctx: &QContext, x: f64, z: Dd) -> Result<SeriesSum> {
    ctx.require_order_above_minus_one()?;
    let c = Coeffs::new(ctx.q(), ctx.alpha(), x, z);
    let mut q2k = Dd::ONE;
    sum_ratio_series(Dd::ZERO, Dd::ONE, ctx.tol(), ctx.terms_max(), |_| {
        // the magnitude of the ratio is nonincreasing in k for alpha > -1,
        // so the current ratio bounds all later ones
        let r = c.ratio(q2k);
        q2k = q2k * c.q2;
        RatioStep {
            ratio: r,
            bound: step_bound(r),
        }
    })
}

/// Series of `J_alpha(x, sqrt(z); q^2)` with extended exponent range.
pub fn eval_j_ext(ctx: &QContext, x: f64, z: f64) -> Result<SeriesSum> {
    j_series(ctx, x, Dd::from_f64(z))
}

/// `J_alpha(x, lambda; q^2)` with `lambda^2` formed exactly.
pub fn eval_j_lambda_ext(ctx: &QContext, x: f64, lambda: f64) -> Result<SeriesSum> {
    j_series(ctx, x, Dd::mul_f64s(lambda, lambda))
}

/// `J_alpha(x, sqrt(z); q^2)` for the order stored in `ctx`.
pub fn eval_j(ctx: &QContext, x: f64, z: f64) -> Result<SeriesValue> {
    SeriesValue::from_sum(&eval_j_ext(ctx, x, z)?)
}

fn dj_series(ctx: &QContext, x: f64, z: Dd) -> Result<SeriesSum> {
    ctx.require_order_above_minus_one()?;
    let c = Coeffs::new(ctx.q(), ctx.alpha(), x, z);
    // u_k = (k+1) c_{k+1} P_{k+1} z^k; u_0 = c_1 P_1
    let first = -(c.qa * (c.x2 + Dd::ONE)) / ((Dd::ONE - c.q2) * (Dd::ONE - c.qa));
    let mut q2k = c.q2;
    sum_ratio_series(Dd::ZERO, first, ctx.tol(), ctx.terms_max(), |k| {
        let r = c.ratio(q2k);
        q2k = q2k * c.q2;
        let grow = (k as f64 + 2.0) / (k as f64 + 1.0);
        let ratio = r * Dd::from_f64(k as f64 + 2.0) / Dd::from_f64(k as f64 + 1.0);
        RatioStep {
            ratio,
            bound: step_bound(r) * grow,
        }
    })
}

/// Term-wise `d/dz` of the series, extended range.
pub fn eval_dj_dz_ext(ctx: &QContext, x: f64, z: f64) -> Result<SeriesSum> {
    dj_series(ctx, x, Dd::from_f64(z))
}

/// `d/dlambda J_alpha(x, lambda; q^2) = 2 lambda dJ/dz`, extended range.
pub fn eval_dj_dlambda_ext(ctx: &QContext, x: f64, lambda: f64) -> Result<Ext> {
    let d = dj_series(ctx, x, Dd::mul_f64s(lambda, lambda))?;
    Ok(d.value * (2.0 * lambda))
}

/// `d/dz J_alpha(x, sqrt(z); q^2)`; the lambda-derivative is `2 lambda` times this.
pub fn eval_dj_dz(ctx: &QContext, x: f64, z: f64) -> Result<SeriesValue> {
    SeriesValue::from_sum(&eval_dj_dz_ext(ctx, x, z)?)
}

/// `(1 - q^{2 alpha}) J_{alpha-1}(x, sqrt(z); q^2)` for `alpha > -1`.
///
/// The prefactor cancels the pole of `J_{alpha-1}` at `alpha = 0`, so this is
/// finite on the whole range `alpha > -1`:
/// `(1 - q^{2a}) + sum_{k>=1} (-1)^k q^{2C(k,2)+2ka} P_k z^k / ((q^2;q^2)_k (q^{2a+2};q^2)_{k-1})`.
pub fn eval_lower_regularized_ext(ctx: &QContext, x: f64, z: f64) -> Result<SeriesSum> {
    ctx.require_order_above_minus_one()?;
    let q = ctx.q();
    let lower = Coeffs::new(q, ctx.alpha() - 1.0, x, Dd::from_f64(z));
    let q2a = lower.qa; // q^{2 alpha}
    let offset = Dd::ONE - q2a;
    let first = -(q2a * (lower.x2 + Dd::ONE) * lower.z) / (Dd::ONE - lower.q2);
    let mut q2k = lower.q2;
    sum_ratio_series(offset, first, ctx.tol(), ctx.terms_max(), |_| {
        let r = lower.ratio(q2k);
        q2k = q2k * lower.q2;
        RatioStep {
            ratio: r,
            bound: step_bound(r),
        }
    })
}

pub fn eval_lower_regularized(ctx: &QContext, x: f64, z: f64) -> Result<SeriesValue> {
    SeriesValue::from_sum(&eval_lower_regularized_ext(ctx, x, z)?)
}

/// Normalized Bessel function `j_alpha(t) = 0F1(; alpha + 1; -t^2/4)`.
pub fn classical_j(alpha: f64, t: f64) -> Result<f64> {
    if !(alpha > -1.0) {
        return Err(Error::InvalidOrder { alpha });
    }
    let w = Dd::from_f64(-t * t / 4.0);
    let s = sum_ratio_series(Dd::ZERO, Dd::ONE, 1e-17, 100_000, |k| {
        let d = Dd::from_f64(k as f64 + 1.0) * Dd::from_f64(alpha + 1.0 + k as f64);
        let r = w / d;
        RatioStep {
            ratio: r,
            bound: step_bound(r),
        }
    })?;
    Ok(s.value.to_f64())
}

/// `prod_j (1 + x^2 q^{p_num + 2j}) / (1 + x^2 q^{p_den + 2j})`, i.e.
/// `(-x^2 q^{p_num}; q^2)_inf / (-x^2 q^{p_den}; q^2)_inf`, as one fused product.
pub fn weight_ratio(q: f64, x: f64, p_num: f64, p_den: f64, tol: f64) -> Result<f64> {
    let x2 = x * x;
    let v = qpoch_ratio_inf(-x2 * q.powf(p_num), -x2 * q.powf(p_den), q * q, tol)?;
    Ok(v.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(q: f64, alpha: f64) -> QContext {
        QContext::new(q, alpha).unwrap()
    }

    #[test]
    fn value_at_zero_spectral_parameter() {
        for &(q, a, x) in &[(0.5, 0.0, 1.0), (0.3, -0.7, 2.0), (0.9, 3.5, 0.0)] {
            let v = eval_j(&ctx(q, a), x, 0.0).unwrap();
            assert_eq!(v.value, 1.0);
        }
    }

    #[test]
    fn small_argument_reference() {
        let v = eval_j(&ctx(0.5, 0.0), 1.0, 0.01).unwrap();
        assert!((v.value - 0.991119010992032).abs() <= v.abs_error);
        let tight = eval_j(&ctx(0.5, 0.0).with_tol(1e-20).unwrap(), 1.0, 0.01).unwrap();
        assert!((tight.value - 0.991119010992032).abs() < 2e-16);
        assert!(v.abs_error < 1e-13);
    }

    #[test]
    fn positive_on_imaginary_axis() {
        let v = eval_j(&ctx(0.5, 0.0), 1.0, -0.04).unwrap();
        assert!(v.value >= 1.0);
        let v = eval_j(&ctx(0.8, -0.5), 3.0, -50.0).unwrap();
        assert!(v.value >= 1.0);
    }

    #[test]
    fn order_must_exceed_minus_one() {
        assert_eq!(
            eval_j(&ctx(0.5, -1.0), 1.0, 0.1),
            Err(Error::InvalidOrder { alpha: -1.0 })
        );
    }

    #[test]
    fn derivative_at_zero_is_first_coefficient() {
        let (q, a, x) = (0.5f64, 0.3f64, 0.7f64);
        let d = eval_dj_dz(&ctx(q, a), x, 0.0).unwrap();
        let qa = q.powf(2.0 * a + 2.0);
        let expect = -qa * (x * x + 1.0) / ((1.0 - q * q) * (1.0 - qa));
        assert!((d.value - expect).abs() < 1e-15);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let c = ctx(0.5, 0.0);
        let h = 1e-6;
        let fd = (eval_j(&c, 1.0, 0.01 + h).unwrap().value
            - eval_j(&c, 1.0, 0.01 - h).unwrap().value)
            / (2.0 * h);
        let d = eval_dj_dz(&c, 1.0, 0.01).unwrap().value;
        assert!(((fd - d) / d).abs() < 1e-6);
    }

    #[test]
    fn lambda_chain_rule() {
        let c = ctx(0.5, 0.0);
        let (lam, h) = (0.1f64, 1e-5f64);
        let f = |l: f64| eval_j(&c, 1.0, l * l).unwrap().value;
        let fd = (f(lam + h) - f(lam - h)) / (2.0 * h);
        let d = 2.0 * lam * eval_dj_dz(&c, 1.0, lam * lam).unwrap().value;
        assert!(((fd - d) / d).abs() < 1e-6);
    }

    #[test]
    fn regularized_lower_order_matches_plain_series() {
        // alpha = 1.5: (1 - q^3) J_{0.5}
        let (q, a) = (0.6f64, 1.5f64);
        let r = eval_lower_regularized(&ctx(q, a), 0.8, 0.7).unwrap().value;
        let j = eval_j(&ctx(q, a - 1.0), 0.8, 0.7).unwrap().value;
        assert!((r - (1.0 - q.powf(2.0 * a)) * j).abs() < 1e-14);
        // alpha = 0 stays finite
        let r0 = eval_lower_regularized(&ctx(q, 0.0), 0.8, 0.7)
            .unwrap()
            .value;
        assert!(r0.is_finite() && r0 != 0.0);
    }

    #[test]
    fn classical_bessel_closed_forms() {
        assert_eq!(classical_j(0.3, 0.0).unwrap(), 1.0);
        let pi = std::f64::consts::PI;
        assert!(classical_j(0.5, pi).unwrap().abs() < 1e-15);
        assert!((classical_j(-0.5, pi / 3.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(classical_j(-1.0, 1.0).is_err());
    }

    #[test]
    fn huge_spectral_parameter_stays_finite_in_extended_range() {
        let s = eval_j_ext(&ctx(0.5, 0.0), 1.0, 1e24).unwrap();
        assert!(s.value.is_finite());
        assert!(s.abs_sum.log2_abs() > 1024.0);
        assert!(matches!(
            eval_j(&ctx(0.5, 0.0), 1.0, 1e24),
            Err(Error::Overflow(_))
        ));
    }

    #[test]
    fn weight_ratio_telescopes_for_shift_two() {
        // p_den = p_num + 2 leaves a single factor
        let (q, x) = (0.5f64, 1.0f64);
        let w = weight_ratio(q, x, 2.0, 4.0, 1e-15).unwrap();
        assert!((w - 1.25).abs() < 1e-15);
    }
}
