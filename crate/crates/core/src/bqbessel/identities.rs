//! Difference relations, order recurrences and the second-order q-difference
//! operator, plus a residual harness that evaluates both sides of each
//! relation independently.

use std::cell::RefCell;

use serde::{Deserialize, Serialize};

use super::{eval_big_cos, eval_big_sin, eval_j, eval_lower_regularized, weight_ratio};
use crate::error::{Error, Result};
use crate::qcalc::{q_derivative, q_derivative_inv, QContext};

/// Tolerance for the weight products inside the identities.
const PRODUCT_TOL: f64 = 1e-16;

/// Relations checked by [`identity_residual`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityKind {
    /// `D_q J_alpha = -z q^{2a+2} x / ((1-q)(1-q^{2a+2})) J_{alpha+1}`.
    QDerivativeRaise,
    /// `D_{1/q}[W_{a+1} J_{alpha+1}] = -x (1-q^{2a+2}) W_a / (1 - 1/q) J_alpha`.
    WeightedDerivativeLower,
    /// `L J_alpha = -z q^{2a+3} / (1-q)^2 J_alpha`.
    DifferenceEquation,
    /// `J_{alpha+1}` from `J_alpha` and `J_{alpha-1}` at the same `x`.
    OrderRecurrence,
    /// `J_{alpha+1}(x/q)` from `J_alpha(x)` and `(1-q^{2a}) J_{alpha-1}(x)`.
    ShiftedRecurrence,
    /// Same as [`IdentityKind::ShiftedRecurrence`] but with `J_{alpha-1}` lacking
    /// its `(1-q^{2a})` factor. Does not hold; kept for comparison.
    ShiftedRecurrenceUnscaled,
    /// `D_q cos = -z q x / (1-q) sin`.
    CosineDerivative,
    /// `D_{1/q}[W sin] = x q / (1-q) (-x^2q^2;q^2)/(-x^2q;q^2) cos`.
    SineDerivative,
    /// The sine relation with constant `-x q (1-q)^2`. Does not hold; kept
    /// for comparison.
    SineDerivativeAltConstant,
}

impl IdentityKind {
    /// The relations that hold and form the verification suite.
    pub const VALID: [IdentityKind; 7] = [
        IdentityKind::QDerivativeRaise,
        IdentityKind::WeightedDerivativeLower,
        IdentityKind::DifferenceEquation,
        IdentityKind::OrderRecurrence,
        IdentityKind::ShiftedRecurrence,
        IdentityKind::CosineDerivative,
        IdentityKind::SineDerivative,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IdentityKind::QDerivativeRaise => "q_derivative_raise",
            IdentityKind::WeightedDerivativeLower => "weighted_derivative_lower",
            IdentityKind::DifferenceEquation => "difference_equation",
            IdentityKind::OrderRecurrence => "order_recurrence",
            IdentityKind::ShiftedRecurrence => "shifted_recurrence",
            IdentityKind::ShiftedRecurrenceUnscaled => "shifted_recurrence_unscaled",
            IdentityKind::CosineDerivative => "cosine_derivative",
            IdentityKind::SineDerivative => "sine_derivative",
            IdentityKind::SineDerivativeAltConstant => "sine_derivative_alt_constant",
        }
    }
}

/// Runs a q-difference quotient over a fallible function, returning the first
/// evaluation error if any.
fn difference<F>(f: F, x: f64, q: f64, inverse: bool) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let g = |t: f64| match f(t) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let d = if inverse {
        q_derivative_inv(g, x, q)?
    } else {
        q_derivative(g, x, q)?
    };
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(d),
    }
}

fn require_nonzero_z(z: f64) -> Result<()> {
    if z == 0.0 {
        Err(Error::ZeroSpectralParameter)
    } else {
        Ok(())
    }
}

fn qpow(ctx: &QContext, p: f64) -> f64 {
    ctx.q().powf(p)
}

/// `J_{alpha+1}(x)` from `j_prev = (1-q^{2a}) J_{alpha-1}(x)` and
/// `j_curr = J_alpha(x)`; valid for every `alpha > -1`, including `alpha = 0`
/// where the lower-order term does not vanish.
pub fn recurrence_alpha_step_regularized(
    ctx: &QContext,
    x: f64,
    z: f64,
    r_prev: f64,
    j_curr: f64,
) -> Result<f64> {
    ctx.require_order_above_minus_one()?;
    require_nonzero_z(z)?;
    let a = ctx.alpha();
    let q2a = qpow(ctx, 2.0 * a);
    let q2a2 = qpow(ctx, 2.0 * a + 2.0);
    let pre = (1.0 - q2a2) / (z * q2a * (q2a2 * x * x + 1.0));
    Ok(pre * ((1.0 - q2a - z * q2a * x * x) * j_curr - r_prev))
}

/// `J_{alpha+1}(x)` from `J_{alpha-1}(x)` and `J_alpha(x)`; needs `alpha > 0`.
pub fn recurrence_alpha_step(
    ctx: &QContext,
    x: f64,
    z: f64,
    j_prev: f64,
    j_curr: f64,
) -> Result<f64> {
    ctx.require_order(0.0, "alpha > 0", "order recurrence with J_{alpha-1}")?;
    let scale = 1.0 - qpow(ctx, 2.0 * ctx.alpha());
    recurrence_alpha_step_regularized(ctx, x, z, scale * j_prev, j_curr)
}

/// `J_{alpha+1}(x/q)` from `r_prev = (1-q^{2a}) J_{alpha-1}(x)` and `J_alpha(x)`.
pub fn recurrence_shifted_regularized(
    ctx: &QContext,
    x: f64,
    z: f64,
    r_prev: f64,
    j_curr: f64,
) -> Result<f64> {
    ctx.require_order_above_minus_one()?;
    require_nonzero_z(z)?;
    let a = ctx.alpha();
    let q2a = qpow(ctx, 2.0 * a);
    let q2a2 = qpow(ctx, 2.0 * a + 2.0);
    let pre = (1.0 - q2a2) / (z * q2a * (1.0 + x * x));
    Ok(pre * ((1.0 - q2a) * j_curr - r_prev))
}

/// `J_{alpha+1}(x/q)` from `J_{alpha-1}(x)` and `J_alpha(x)`; needs `alpha > 0`.
pub fn recurrence_shifted(ctx: &QContext, x: f64, z: f64, j_prev: f64, j_curr: f64) -> Result<f64> {
    ctx.require_order(0.0, "alpha > 0", "shifted recurrence with J_{alpha-1}")?;
    let scale = 1.0 - qpow(ctx, 2.0 * ctx.alpha());
    recurrence_shifted_regularized(ctx, x, z, scale * j_prev, j_curr)
}

/// The shifted recurrence with the lower-order term missing its
/// `(1-q^{2a})` factor. Wrong in general; exposed for comparison only.
pub fn recurrence_shifted_printed(
    ctx: &QContext,
    x: f64,
    z: f64,
    j_prev: f64,
    j_curr: f64,
) -> Result<f64> {
    ctx.require_order(0.0, "alpha > 0", "shifted recurrence with J_{alpha-1}")?;
    recurrence_shifted_regularized(ctx, x, z, j_prev, j_curr)
}

fn apply_l_fallible<F>(ctx: &QContext, f: F, x: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let (q, a) = (ctx.q(), ctx.alpha());
    if x == 0.0 {
        return Err(Error::ZeroArgument);
    }
    let inner = |t: f64| -> Result<f64> {
        let w = weight_ratio(q, t, 2.0, 2.0 * a + 4.0, PRODUCT_TOL)?;
        Ok(w / t * difference(&f, t, q, false)?)
    };
    let outer = difference(inner, x, q, true)?;
    let w = weight_ratio(q, x, 2.0 * a + 2.0, 2.0, PRODUCT_TOL)?;
    Ok(w / x * outer)
}

/// The operator `L f(x) = W_a(x)/x D_{1/q}[ W_{a+1}(x)/x D_q f(x) ]` with
/// `W_a(x) = (-x^2q^{2a+2};q^2)_inf / (-x^2q^2;q^2)_inf` and
/// `W_{a+1}(x) = (-x^2q^2;q^2)_inf / (-x^2q^{2a+4};q^2)_inf`.
pub fn apply_l<F: Fn(f64) -> f64>(ctx: &QContext, f: F, x: f64) -> Result<f64> {
    apply_l_fallible(ctx, |t| Ok(f(t)), x)
}

fn relative(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs).abs() / rhs.abs().max(1.0)
}

/// `|LHS - RHS| / max(1, |RHS|)` for the chosen relation at `(x, z)`, using
/// the order stored in `ctx`. Both sides are evaluated from independent
/// series values.
pub fn identity_residual(ctx: &QContext, kind: IdentityKind, x: f64, z: f64) -> Result<f64> {
    let (q, a) = (ctx.q(), ctx.alpha());
    let up = ctx.shifted(1.0);
    let j = |c: &QContext, t: f64| eval_j(c, t, z).map(|v| v.value);
    match kind {
        IdentityKind::QDerivativeRaise => {
            ctx.require_order_above_minus_one()?;
            let lhs = difference(|t| j(ctx, t), x, q, false)?;
            let q2a2 = qpow(ctx, 2.0 * a + 2.0);
            let rhs = -z * q2a2 * x / ((1.0 - q) * (1.0 - q2a2)) * j(&up, x)?;
            Ok(relative(lhs, rhs))
        }
        IdentityKind::WeightedDerivativeLower => {
            ctx.require_order_above_minus_one()?;
            let lhs = difference(
                |t| Ok(weight_ratio(q, t, 2.0, 2.0 * a + 4.0, PRODUCT_TOL)? * j(&up, t)?),
                x,
                q,
                true,
            )?;
            let w = weight_ratio(q, x, 2.0, 2.0 * a + 2.0, PRODUCT_TOL)?;
            let rhs = -x * (1.0 - qpow(ctx, 2.0 * a + 2.0)) * w / (1.0 - 1.0 / q) * j(ctx, x)?;
            Ok(relative(lhs, rhs))
        }
        IdentityKind::DifferenceEquation => {
            ctx.require_order_above_minus_one()?;
            let lhs = apply_l_fallible(ctx, |t| j(ctx, t), x)?;
            let rhs = -z * qpow(ctx, 2.0 * a + 3.0) / ((1.0 - q) * (1.0 - q)) * j(ctx, x)?;
            Ok(relative(lhs, rhs))
        }
        IdentityKind::OrderRecurrence => {
            let r = eval_lower_regularized(ctx, x, z)?.value;
            let lhs = recurrence_alpha_step_regularized(ctx, x, z, r, j(ctx, x)?)?;
            Ok(relative(lhs, j(&up, x)?))
        }
        IdentityKind::ShiftedRecurrence => {
            let r = eval_lower_regularized(ctx, x, z)?.value;
            let lhs = recurrence_shifted_regularized(ctx, x, z, r, j(ctx, x)?)?;
            Ok(relative(lhs, j(&up, x / q)?))
        }
        IdentityKind::ShiftedRecurrenceUnscaled => {
            let down = ctx.shifted(-1.0);
            ctx.require_order(0.0, "alpha > 0", "shifted recurrence with J_{alpha-1}")?;
            let lhs = recurrence_shifted_printed(ctx, x, z, j(&down, x)?, j(ctx, x)?)?;
            Ok(relative(lhs, j(&up, x / q)?))
        }
        IdentityKind::CosineDerivative => {
            let lhs = difference(|t| eval_big_cos(ctx, t, z).map(|v| v.value), x, q, false)?;
            let rhs = -z * q * x / (1.0 - q) * eval_big_sin(ctx, x, z)?.value;
            Ok(relative(lhs, rhs))
        }
        IdentityKind::SineDerivative | IdentityKind::SineDerivativeAltConstant => {
            let lhs = sine_weighted_difference(ctx, x, z)?;
            let constant = if kind == IdentityKind::SineDerivative {
                x * q / (1.0 - q)
            } else {
                -x * q * (1.0 - q) * (1.0 - q)
            };
            let w = weight_ratio(q, x, 2.0, 1.0, PRODUCT_TOL)?;
            let rhs = constant * w * eval_big_cos(ctx, x, z)?.value;
            Ok(relative(lhs, rhs))
        }
    }
}

fn sine_weighted_difference(ctx: &QContext, x: f64, z: f64) -> Result<f64> {
    let q = ctx.q();
    difference(
        |t| Ok(weight_ratio(q, t, 2.0, 3.0, PRODUCT_TOL)? * eval_big_sin(ctx, t, z)?.value),
        x,
        q,
        true,
    )
}

/// The constant `c(x)` for which `D_{1/q}[W sin](x) = c(x) (-x^2q^2;q^2)/(-x^2q;q^2) cos(x)`
/// holds numerically; it equals `x q / (1 - q)`.
pub fn sin_inverse_difference_constant(ctx: &QContext, x: f64, z: f64) -> Result<f64> {
    let lhs = sine_weighted_difference(ctx, x, z)?;
    let w = weight_ratio(ctx.q(), x, 2.0, 1.0, PRODUCT_TOL)?;
    Ok(lhs / (w * eval_big_cos(ctx, x, z)?.value))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(q: f64, alpha: f64) -> QContext {
        QContext::new(q, alpha).unwrap()
    }

    #[test]
    fn recurrence_step_matches_direct_series() {
        for &(q, a, x, z) in &[(0.5, 1.0, 1.0, 0.25), (0.9, 0.5, 0.5, 1.0)] {
            let c = ctx(q, a);
            let prev = eval_j(&c.shifted(-1.0), x, z).unwrap().value;
            let curr = eval_j(&c, x, z).unwrap().value;
            let next = recurrence_alpha_step(&c, x, z, prev, curr).unwrap();
            let direct = eval_j(&c.shifted(1.0), x, z).unwrap().value;
            assert!(((next - direct) / direct).abs() < 1e-10);
        }
    }

    #[test]
    fn recurrence_step_at_order_zero_needs_lower_term() {
        let c = ctx(0.5, 0.0);
        let (x, z) = (1.0, 0.25);
        let r = eval_lower_regularized(&c, x, z).unwrap().value;
        let curr = eval_j(&c, x, z).unwrap().value;
        let next = recurrence_alpha_step_regularized(&c, x, z, r, curr).unwrap();
        let direct = eval_j(&c.shifted(1.0), x, z).unwrap().value;
        assert!(((next - direct) / direct).abs() < 1e-12);
        // dropping the lower term is visibly wrong
        let dropped = recurrence_alpha_step_regularized(&c, x, z, 0.0, curr).unwrap();
        assert!((dropped - direct).abs() > 1e-3);
        assert!(recurrence_alpha_step(&c, x, z, 0.0, curr).is_err());
    }

    #[test]
    fn shifted_recurrence_matches_direct_series() {
        for &(q, a, x, z) in &[(0.5f64, 1.0f64, 1.0f64, 0.25f64), (0.3, 0.25, 0.3, 4.0)] {
            let c = ctx(q, a);
            let prev = eval_j(&c.shifted(-1.0), x, z).unwrap().value;
            let curr = eval_j(&c, x, z).unwrap().value;
            let got = recurrence_shifted(&c, x, z, prev, curr).unwrap();
            let direct = eval_j(&c.shifted(1.0), x / q, z).unwrap().value;
            assert!(((got - direct) / direct).abs() < 1e-10, "{got} vs {direct}");
        }
        // x = 0
        let c = ctx(0.5, 1.0);
        let prev = eval_j(&c.shifted(-1.0), 0.0, 0.25).unwrap().value;
        let curr = eval_j(&c, 0.0, 0.25).unwrap().value;
        let got = recurrence_shifted(&c, 0.0, 0.25, prev, curr).unwrap();
        let direct = eval_j(&c.shifted(1.0), 0.0, 0.25).unwrap().value;
        assert!((got - direct).abs() < 1e-10);
    }

    #[test]
    fn recurrences_reject_zero_spectral_parameter() {
        let c = ctx(0.5, 1.0);
        assert_eq!(
            recurrence_alpha_step(&c, 1.0, 0.0, 1.0, 1.0),
            Err(Error::ZeroSpectralParameter)
        );
        assert_eq!(
            recurrence_shifted(&c, 1.0, 0.0, 1.0, 1.0),
            Err(Error::ZeroSpectralParameter)
        );
    }

    #[test]
    fn unscaled_shifted_recurrence_fails() {
        let r = identity_residual(
            &ctx(0.5, 1.0),
            IdentityKind::ShiftedRecurrenceUnscaled,
            1.0,
            0.25,
        )
        .unwrap();
        assert!(r > 1e-3);
    }

    #[test]
    fn operator_eigenvalue() {
        for &(q, a, lam, xp) in &[(0.5f64, 0.5f64, 1.0f64, 2), (0.8, 0.0, 0.5, 3)] {
            let c = ctx(q, a);
            let z = lam * lam;
            let x = q.powi(xp);
            let f = |t: f64| eval_j(&c, t, z).unwrap().value;
            let lhs = apply_l(&c, f, x).unwrap();
            let rhs = -z * q.powf(2.0 * a + 3.0) / ((1.0 - q) * (1.0 - q)) * f(x);
            assert!(((lhs - rhs) / rhs).abs() < 1e-9);
        }
    }

    #[test]
    fn operator_annihilates_constants() {
        assert_eq!(apply_l(&ctx(0.5, 0.3), |_| 2.5, 0.5).unwrap(), 0.0);
        assert_eq!(
            apply_l(&ctx(0.5, 0.3), |_| 2.5, 0.0),
            Err(Error::ZeroArgument)
        );
    }

    #[test]
    fn residual_examples() {
        let r =
            identity_residual(&ctx(0.5, 0.0), IdentityKind::QDerivativeRaise, 1.0, 0.25).unwrap();
        assert!(r < 1e-10);
        let r = identity_residual(
            &ctx(0.5, 0.5),
            IdentityKind::WeightedDerivativeLower,
            0.5,
            1.0,
        )
        .unwrap();
        assert!(r < 1e-10);
        let r = identity_residual(&ctx(0.9, 1.0), IdentityKind::DifferenceEquation, 0.81, 0.04)
            .unwrap();
        assert!(r < 1e-9);
    }

    #[test]
    fn trig_relations() {
        let c = ctx(0.5, 0.0);
        for &(x, z) in &[(1.0, 0.25), (0.5, 1.0)] {
            assert!(identity_residual(&c, IdentityKind::CosineDerivative, x, z).unwrap() < 1e-12);
            assert!(identity_residual(&c, IdentityKind::SineDerivative, x, z).unwrap() < 1e-12);
            assert!(
                identity_residual(&c, IdentityKind::SineDerivativeAltConstant, x, z).unwrap()
                    > 1e-2
            );
            let k = sin_inverse_difference_constant(&c, x, z).unwrap();
            assert!((k - x * 0.5 / 0.5).abs() < 1e-12);
        }
    }
}
