//! Finite big q-Hankel transform and its Kramer-type sampling expansion.
//!
//! `F(lambda) = int_0^1 w(x) f(x) J_{alpha+1}(x, lambda; q^2) d_q x` is recovered
//! from its values at the zeros `j_k` of `J_alpha(1, .; q^2)` through
//! `F(lambda) = sum_k F(j_k) S_k(lambda)` with
//! `S_k(lambda) = 2 j_k J_alpha(1, lambda) / ((lambda^2 - j_k^2) dJ_alpha/dlambda(1, j_k))`.

use serde::{Deserialize, Serialize};

use crate::bqbessel::{eval_dj_dlambda_ext, eval_j_lambda_ext};
use crate::error::{Error, Result};
use crate::numeric::{Ext, ExtAccumulator};
use crate::orthogonality::{weight, QLatticeSignal};
use crate::qcalc::{QContext, SeriesValue};
use crate::zerofinder::ZeroTable;

/// Relative distance to a zero below which the kernel uses its limit form.
pub const NEAR_POLE_REL: f64 = 1e-6;
const SERIES_TOL: f64 = 1e-20;

/// Which Bessel order the kernel numerator and derivative use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelForm {
    /// `J_alpha` and `dJ_alpha/dlambda`: interpolates at the zeros.
    Standard,
    /// `J_{alpha+1}` and `dJ_{alpha+1}/dlambda`: has poles at the zeros and
    /// does not interpolate. For comparison only.
    ShiftedOrder,
}

fn require_transform_order(ctx: &QContext) -> Result<()> {
    ctx.require_order(-1.5, "alpha > -3/2", "the finite big q-Hankel transform")
}

fn tight(ctx: &QContext) -> Result<QContext> {
    ctx.with_tol(ctx.tol().min(SERIES_TOL))
}

/// `F(lambda)` with extended range.
pub fn q_hankel_transform_ext(ctx: &QContext, f: &QLatticeSignal, lam: f64) -> Result<Ext> {
    require_transform_order(ctx)?;
    f.validate()?;
    let up = tight(&ctx.shifted(1.0))?;
    let q = ctx.q();
    let mut acc = ExtAccumulator::new();
    for (n, &v) in f.values.iter().enumerate() {
        if v == 0.0 {
            continue;
        }
        let x = f.point(q, n);
        let m = (1.0 - q) * x * weight(ctx, x)?;
        acc.add_ext(eval_j_lambda_ext(&up, x, lam)?.value * (m * v));
    }
    Ok(acc.value())
}

/// `F(lambda) = int_0^a w(x) f(x) J_{alpha+1}(x, lambda; q^2) d_q x` for a
/// lattice signal (a finite sum).
pub fn q_hankel_transform(ctx: &QContext, f: &QLatticeSignal, lam: f64) -> Result<SeriesValue> {
    let v = q_hankel_transform_ext(ctx, f, lam)?;
    if !v.fits_f64() {
        return Err(Error::Overflow(format!("transform value {v}")));
    }
    Ok(SeriesValue {
        value: v.to_f64(),
        abs_error: v.abs().to_f64() * 1e-15,
        terms_used: f.len(),
    })
}

fn check_index(table: &ZeroTable, k: usize) -> Result<()> {
    if k < table.len() {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange {
            index: k,
            len: table.len(),
        })
    }
}

/// `S_k(lambda)` with extended range, for either kernel form. `k` is 0-based.
pub fn sampling_kernel_ext(
    ctx: &QContext,
    table: &ZeroTable,
    k: usize,
    lam: f64,
    form: KernelForm,
) -> Result<Ext> {
    check_index(table, k)?;
    let jk = table.zeros[k];
    let (order_ctx, deriv) = match form {
        KernelForm::Standard => (tight(ctx)?, table.derivs[k]),
        KernelForm::ShiftedOrder => {
            let up = tight(&ctx.shifted(1.0))?;
            let d = eval_dj_dlambda_ext(&up, table.a, jk)?;
            (up, d)
        }
    };
    let lam = lam.abs();
    if form == KernelForm::Standard && (lam - jk).abs() < NEAR_POLE_REL * jk {
        // removable singularity: S_k -> 2 j_k / (lambda + j_k)
        return Ok(Ext::from_f64(2.0 * jk / (lam + jk)));
    }
    let num = eval_j_lambda_ext(&order_ctx, table.a, lam)?.value * (2.0 * jk);
    let gap = (lam - jk) * (lam + jk);
    if gap == 0.0 {
        return Ok(Ext::from_f64(f64::INFINITY));
    }
    Ok(num / (deriv * gap))
}

/// `S_k(lambda)` in the standard form. `k` is 0-based.
pub fn sampling_kernel(ctx: &QContext, table: &ZeroTable, k: usize, lam: f64) -> Result<f64> {
    Ok(sampling_kernel_ext(ctx, table, k, lam, KernelForm::Standard)?.to_f64())
}

/// `max_{k, m < n} |S_k(j_m) - delta_km|` over the first `n` zeros.
pub fn kernel_delta_error(
    ctx: &QContext,
    table: &ZeroTable,
    n: usize,
    form: KernelForm,
) -> Result<f64> {
    let n = n.min(table.len());
    let mut worst = 0.0f64;
    for k in 0..n {
        for m in 0..n {
            let s = sampling_kernel_ext(ctx, table, k, table.zeros[m], form)?.to_f64();
            let target = if k == m { 1.0 } else { 0.0 };
            let e = (s - target).abs();
            worst = if e.is_nan() {
                f64::INFINITY
            } else {
                worst.max(e)
            };
        }
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionReport {
    pub q: f64,
    pub alpha: f64,
    pub kernel: KernelForm,
    /// Number of sampling terms.
    pub terms: usize,
    pub lambdas: Vec<f64>,
    pub direct: Vec<f64>,
    pub reconstructed: Vec<f64>,
    /// `max |direct - reconstructed| / max(1, |direct|)`.
    pub max_rel_err: f64,
}

/// Reconstructs `F` on `lambdas` from its samples at every zero in `table`.
pub fn reconstruct(
    ctx: &QContext,
    f: &QLatticeSignal,
    table: &ZeroTable,
    lambdas: &[f64],
) -> Result<ReconstructionReport> {
    reconstruct_with(ctx, f, table, lambdas, KernelForm::Standard)
}

/// [`reconstruct`] with a chosen kernel form.
pub fn reconstruct_with(
    ctx: &QContext,
    f: &QLatticeSignal,
    table: &ZeroTable,
    lambdas: &[f64],
    form: KernelForm,
) -> Result<ReconstructionReport> {
    require_transform_order(ctx)?;
    if ctx.alpha() <= -0.5 {
        log::warn!(
            "alpha = {} <= -1/2: orthogonality of the sampling basis is not established here",
            ctx.alpha()
        );
    }
    table.check_context(ctx)?;
    if table.is_empty() {
        return Err(Error::InvalidInput("zero table is empty".into()));
    }
    if f.a != table.a {
        return Err(Error::ScaleMismatch { a: f.a, b: table.a });
    }
    let samples = table
        .zeros
        .iter()
        .map(|&j| q_hankel_transform_ext(ctx, f, j))
        .collect::<Result<Vec<_>>>()?;
    let mut direct = Vec::with_capacity(lambdas.len());
    let mut reconstructed = Vec::with_capacity(lambdas.len());
    let mut worst = 0.0f64;
    for &lam in lambdas {
        let d = q_hankel_transform_ext(ctx, f, lam)?.to_f64();
        let mut acc = ExtAccumulator::new();
        for (k, s) in samples.iter().enumerate() {
            if s.is_zero() {
                continue;
            }
            acc.add_ext(*s * sampling_kernel_ext(ctx, table, k, lam, form)?);
        }
        let r = acc.value().to_f64();
        worst = worst.max((d - r).abs() / d.abs().max(1.0));
        direct.push(d);
        reconstructed.push(r);
    }
    Ok(ReconstructionReport {
        q: ctx.q(),
        alpha: ctx.alpha(),
        kernel: form,
        terms: table.len(),
        lambdas: lambdas.to_vec(),
        direct,
        reconstructed,
        max_rel_err: worst,
    })
}

/// Both sides of the sampling expansion of the single-point signal at `x = 1`:
/// `J_{alpha+1}(1, lambda) / (2 J_alpha(1, lambda)) = sum_k j_k J_{alpha+1}(1, j_k) / ((lambda^2 - j_k^2) dJ_alpha/dlambda(1, j_k))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedSumCheck {
    pub lambda: f64,
    pub lhs: f64,
    pub rhs_partial: f64,
    pub gap: f64,
    /// `gaps[n]` is the gap after `n + 1` terms.
    pub gaps: Vec<f64>,
}

pub fn closed_sum_check(ctx: &QContext, table: &ZeroTable, lam: f64) -> Result<ClosedSumCheck> {
    require_transform_order(ctx)?;
    table.check_context(ctx)?;
    let lam_abs = lam.abs();
    if table
        .zeros
        .iter()
        .any(|&j| (lam_abs - j).abs() < NEAR_POLE_REL * j)
    {
        return Err(Error::AtPole { lambda: lam });
    }
    let base = tight(ctx)?;
    let up = tight(&ctx.shifted(1.0))?;
    let j = eval_j_lambda_ext(&base, table.a, lam_abs)?;
    if (j.value.abs() / j.abs_sum.max_abs(Ext::ONE)).to_f64() < 1e-12 {
        return Err(Error::AtPole { lambda: lam });
    }
    let lhs = (eval_j_lambda_ext(&up, table.a, lam_abs)?.value / (j.value * 2.0)).to_f64();
    let mut acc = ExtAccumulator::new();
    let mut gaps = Vec::with_capacity(table.len());
    for (k, &jk) in table.zeros.iter().enumerate() {
        let num = eval_j_lambda_ext(&up, table.a, jk)?.value * jk;
        let den = table.derivs[k] * ((lam_abs - jk) * (lam_abs + jk));
        acc.add_ext(num / den);
        gaps.push((lhs - acc.value().to_f64()).abs());
    }
    let rhs = acc.value().to_f64();
    Ok(ClosedSumCheck {
        lambda: lam,
        lhs,
        rhs_partial: rhs,
        gap: (lhs - rhs).abs(),
        gaps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bqbessel::{eval_j, weight_ratio};
    use crate::zerofinder::find_zeros;

    fn ctx(q: f64, alpha: f64) -> QContext {
        QContext::new(q, alpha).unwrap()
    }

    #[test]
    fn transform_of_zero_signal() {
        let c = ctx(0.5, 0.0);
        let f = QLatticeSignal::zeros(1.0, 4).unwrap();
        assert_eq!(q_hankel_transform(&c, &f, 1.3).unwrap().value, 0.0);
    }

    #[test]
    fn transform_of_single_point_signal() {
        for &(q, a, lam) in &[(0.5f64, 0.0f64, 0.7f64), (0.8, 0.5, 2.0)] {
            let c = ctx(q, a);
            let f = QLatticeSignal::new(1.0, vec![1.0 / (1.0 - q)]).unwrap();
            let got = q_hankel_transform(&c, &f, lam).unwrap().value;
            let w = weight_ratio(q, 1.0, 2.0, 2.0 * a + 4.0, 1e-16).unwrap();
            let expect = w * eval_j(&c.shifted(1.0), 1.0, lam * lam).unwrap().value;
            assert!(((got - expect) / expect).abs() < 1e-12);
        }
    }

    #[test]
    fn transform_order_range() {
        let f = QLatticeSignal::new(1.0, vec![1.0]).unwrap();
        assert!(matches!(
            q_hankel_transform(&ctx(0.5, -1.6), &f, 1.0),
            Err(Error::OrderOutOfRange { .. })
        ));
    }

    #[test]
    fn kernel_interpolates() {
        let c = ctx(0.5, 0.0);
        let t = find_zeros(&c, 5).unwrap();
        assert_eq!(sampling_kernel(&c, &t, 2, t.zeros[2]).unwrap(), 1.0);
        assert!(kernel_delta_error(&c, &t, 5, KernelForm::Standard).unwrap() <= 1e-8);
        assert!(kernel_delta_error(&c, &t, 5, KernelForm::ShiftedOrder).unwrap() > 1.0);
        assert!(matches!(
            sampling_kernel(&c, &t, 5, 1.0),
            Err(Error::IndexOutOfRange { index: 5, len: 5 })
        ));
    }

    #[test]
    fn reconstruction_at_the_zeros_is_exact() {
        let c = ctx(0.5, 0.0);
        let t = find_zeros(&c, 6).unwrap();
        let f = QLatticeSignal::new(1.0, vec![1.0, -0.5, 2.0]).unwrap();
        let r = reconstruct(&c, &f, &t, &t.zeros).unwrap();
        assert!(r.max_rel_err < 1e-8);
        let z = QLatticeSignal::zeros(1.0, 3).unwrap();
        let r = reconstruct(&c, &z, &t, &[0.3, 0.9]).unwrap();
        assert!(r.reconstructed.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn closed_sum_is_even_and_rejects_poles() {
        let c = ctx(0.5, 0.0);
        let t = find_zeros(&c, 10).unwrap();
        let a = closed_sum_check(&c, &t, 0.4).unwrap();
        let b = closed_sum_check(&c, &t, -0.4).unwrap();
        assert_eq!(a.lhs, b.lhs);
        assert_eq!(a.rhs_partial, b.rhs_partial);
        assert!(a.gap < 1e-12);
        assert!(matches!(
            closed_sum_check(&c, &t, t.zeros[1]),
            Err(Error::AtPole { .. })
        ));
    }
}
