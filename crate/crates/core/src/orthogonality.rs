//! Weighted inner products on the q-lattice, the Lommel-type integral of two
//! big q-Bessel functions, norms, Gram matrices and Fourier big q-Bessel
//! series.
//!
//! The inner product is
//! `<f, g> = int_0^a f(x) g(x) w(x) d_q x` with
//! `w(x) = x (-x^2q^2;q^2)_inf / (-x^2q^{2a+4};q^2)_inf`, which on the lattice
//! `x_n = a q^n` is `sum_n m_n f(x_n) g(x_n)` with `m_n = (1-q) a q^n w(x_n)`.
//!
//! The basis functions are `phi_k(x) = J_{alpha+1}(x, j_k; q^2)` where `j_k`
//! are the positive zeros of `J_alpha(1, .; q^2)`. Basis values can exceed the
//! `f64` range for large `j_k`, so they are carried as [`Ext`].

use serde::{Deserialize, Serialize};

use crate::bqbessel::{eval_dj_dlambda_ext, eval_j_lambda_ext, weight_ratio};
use crate::error::{Error, Result};
use crate::numeric::{Ext, ExtAccumulator, NeumaierSum};
use crate::qcalc::{QContext, SeriesValue};
use crate::zerofinder::ZeroTable;

/// Tolerance for the infinite products inside the weight.
const PRODUCT_TOL: f64 = 1e-16;
/// Series tolerance for basis function values.
const BASIS_TOL: f64 = 1e-20;
const MIN_LATTICE_POINTS: usize = 8;
const MAX_LATTICE_POINTS: usize = 20_000;
/// Residual bound used to accept a value as a zero in the norm formulas.
pub const ZERO_RESIDUAL_TOL: f64 = 1e-9;

fn default_scale() -> f64 {
    1.0
}

/// A function on the lattice `{a q^k : k = 0..K}`, zero elsewhere.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QLatticeSignal {
    #[serde(default = "default_scale")]
    pub a: f64,
    /// `values[k] = f(a q^k)`.
    pub values: Vec<f64>,
}

impl QLatticeSignal {
    pub fn new(a: f64, values: Vec<f64>) -> Result<Self> {
        let s = QLatticeSignal { a, values };
        s.validate()?;
        Ok(s)
    }

    pub fn zeros(a: f64, len: usize) -> Result<Self> {
        Self::new(a, vec![0.0; len])
    }

    /// Samples `f` on the lattice, keeping enough points that the dropped
    /// part of the weighted norm, bounded through the largest sampled `|f|`,
    /// is below `tol`.
    pub fn sample<F: Fn(f64) -> f64>(ctx: &QContext, f: F, a: f64, tol: f64) -> Result<Self> {
        let q = ctx.q();
        let mut values = Vec::new();
        let mut sup = 0.0f64;
        let mut norm = 0.0f64;
        for n in 0..MAX_LATTICE_POINTS {
            let x = a * q.powi(n as i32);
            let v = f(x);
            sup = sup.max(v.abs());
            let m = measure(ctx, a, n)?;
            norm += m * v * v;
            values.push(v);
            let w = weight_ratio(q, x, 2.0, 2.0 * ctx.alpha() + 4.0, PRODUCT_TOL)?;
            let tail = (1.0 - q) * w * sup * sup * a * a * q.powi(2 * n as i32 + 2) / (1.0 - q * q);
            if n + 1 >= MIN_LATTICE_POINTS && tail <= tol * norm.max(1.0) {
                break;
            }
        }
        Self::new(a, values)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "scale a = {} must be positive",
                self.a
            )));
        }
        if self.values.is_empty() {
            return Err(Error::InvalidInput(
                "signal needs at least one value".into(),
            ));
        }
        if let Some(k) = self.values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "signal value {k} is not finite"
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Lattice point `a q^k`.
    pub fn point(&self, q: f64, k: usize) -> f64 {
        self.a * q.powi(k as i32)
    }
}

/// `x (-x^2q^2;q^2)_inf / (-x^2q^{2alpha+4};q^2)_inf`.
pub fn weight(ctx: &QContext, x: f64) -> Result<f64> {
    if x < 0.0 {
        return Err(Error::InvalidInput(format!("weight needs x >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    Ok(x * weight_ratio(ctx.q(), x, 2.0, 2.0 * ctx.alpha() + 4.0, PRODUCT_TOL)?)
}

/// Lattice mass `m_n = (1-q) a q^n w(a q^n)`.
fn measure(ctx: &QContext, a: f64, n: usize) -> Result<f64> {
    let q = ctx.q();
    let qn = q.powi(n as i32);
    Ok((1.0 - q) * a * qn * weight(ctx, a * qn)?)
}

fn check_scale(a: f64, b: f64) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::ScaleMismatch { a, b })
    }
}

/// `<f, g>` for two lattice signals on the same scale.
pub fn inner_product(
    ctx: &QContext,
    f: &QLatticeSignal,
    g: &QLatticeSignal,
) -> Result<SeriesValue> {
    f.validate()?;
    g.validate()?;
    check_scale(f.a, g.a)?;
    let n = f.len().min(g.len());
    let mut acc = NeumaierSum::new();
    let mut abs = 0.0f64;
    for k in 0..n {
        let t = measure(ctx, f.a, k)? * f.values[k] * g.values[k];
        acc.add(t);
        abs += t.abs();
    }
    Ok(SeriesValue {
        value: acc.value(),
        abs_error: 4.0 * (n as f64 + 2.0) * f64::EPSILON * abs,
        terms_used: n.max(1),
    })
}

/// Values of `J_{alpha+1}(a q^n, lambda_i)` on a common lattice prefix,
/// long enough that each function's weighted norm tail is below `tol`
/// relative to its norm.
struct Basis {
    measure: Vec<f64>,
    values: Vec<Vec<Ext>>,
    /// Bound on `sum_{n >= N} m_n |phi_i(x_n)|^2`.
    tails: Vec<Ext>,
}

impl Basis {
    fn build(ctx: &QContext, lambdas: &[f64], a: f64, tol: f64, min_len: usize) -> Result<Basis> {
        let q = ctx.q();
        let up = ctx.shifted(1.0).with_tol(BASIS_TOL)?;
        let mut measure_v: Vec<f64> = Vec::new();
        let mut values: Vec<Vec<Ext>> = Vec::with_capacity(lambdas.len());
        let mut len = min_len.max(MIN_LATTICE_POINTS);
        // tail bound after N points, using monotonicity of W and of the
        // absolute term sum in x
        let tail_at = |n: usize, abs_sum: Ext| -> Result<Ext> {
            let x = a * q.powi(n as i32);
            let w = weight_ratio(q, x, 2.0, 2.0 * ctx.alpha() + 4.0, PRODUCT_TOL)?;
            let geo = (1.0 - q) * w * a * a * q.powi(2 * n as i32) / (1.0 - q * q);
            Ok(abs_sum * abs_sum * geo)
        };
        for &lam in lambdas {
            let mut col = Vec::new();
            let mut norm = ExtAccumulator::new();
            let mut n = 0usize;
            loop {
                let x = a * q.powi(n as i32);
                let s = eval_j_lambda_ext(&up, x, lam)?;
                if measure_v.len() <= n {
                    measure_v.push(measure(ctx, a, n)?);
                }
                norm.add_ext(s.value * s.value * measure_v[n]);
                col.push(s.value);
                n += 1;
                if n >= len {
                    let t = tail_at(n, s.abs_sum)?;
                    if t <= norm.value().abs() * tol {
                        break;
                    }
                }
                if n >= MAX_LATTICE_POINTS {
                    return Err(Error::DivergentSeries {
                        reason: format!(
                            "basis function at lambda = {lam} needs too many lattice points"
                        ),
                    });
                }
            }
            len = len.max(n);
            values.push(col);
        }
        // extend everything to the common length
        let mut tails = Vec::with_capacity(lambdas.len());
        for (i, &lam) in lambdas.iter().enumerate() {
            let mut last_abs = Ext::ZERO;
            while values[i].len() < len {
                let n = values[i].len();
                let s = eval_j_lambda_ext(&up, a * q.powi(n as i32), lam)?;
                if measure_v.len() <= n {
                    measure_v.push(measure(ctx, a, n)?);
                }
                values[i].push(s.value);
                last_abs = s.abs_sum;
            }
            if last_abs.is_zero() {
                last_abs = eval_j_lambda_ext(&up, a * q.powi(len as i32 - 1), lam)?.abs_sum;
            }
            tails.push(tail_at(len, last_abs)?);
        }
        Ok(Basis {
            measure: measure_v,
            values,
            tails,
        })
    }

    fn inner(&self, i: usize, j: usize) -> (Ext, Ext) {
        let mut acc = ExtAccumulator::new();
        for (n, &m) in self.measure.iter().enumerate().take(self.values[i].len()) {
            acc.add_ext(self.values[i][n] * self.values[j][n] * m);
        }
        (acc.value(), (self.tails[i] * self.tails[j]).sqrt())
    }
}

/// `(lambda^2 - mu^2) int_0^a w J_{alpha+1}(x, lambda) J_{alpha+1}(x, mu) d_q x`
/// summed directly on the lattice.
pub fn lommel_integral_direct(ctx: &QContext, a: f64, lam: f64, mu: f64) -> Result<SeriesValue> {
    ctx.require_order_above_minus_one()?;
    if !(a > 0.0) {
        return Err(Error::NonPositiveUpperLimit { a });
    }
    let factor = (lam - mu) * (lam + mu);
    let basis = Basis::build(ctx, &[lam, mu], a, ctx.tol(), 0)?;
    let (v, tail) = basis.inner(0, 1);
    Ok(SeriesValue {
        value: (v * factor).to_f64(),
        abs_error: (tail * factor.abs()).to_f64(),
        terms_used: basis.measure.len(),
    })
}

fn lommel_constant(ctx: &QContext) -> f64 {
    let q = ctx.q();
    let qa = q.powf(2.0 * ctx.alpha() + 2.0);
    (1.0 - q) * (1.0 - qa) / qa
}

struct Pair {
    up: QContext,
    base: QContext,
}

impl Pair {
    fn new(ctx: &QContext) -> Result<Self> {
        Ok(Pair {
            up: ctx.shifted(1.0).with_tol(BASIS_TOL)?,
            base: ctx.with_tol(BASIS_TOL)?,
        })
    }

    fn up(&self, x: f64, lam: f64) -> Result<Ext> {
        Ok(eval_j_lambda_ext(&self.up, x, lam)?.value)
    }

    fn base(&self, x: f64, lam: f64) -> Result<Ext> {
        Ok(eval_j_lambda_ext(&self.base, x, lam)?.value)
    }
}

/// The closed form
/// `C (-a^2;q^2)_inf/(-a^2q^{2alpha+2};q^2)_inf [J_{alpha+1}(a/q, mu) J_alpha(a, lambda) - J_{alpha+1}(a/q, lambda) J_alpha(a, mu)]`
/// with `C = (1-q)(1-q^{2alpha+2})/q^{2alpha+2}`.
///
/// This omits the contribution of the lower end `x = 0` and has the opposite
/// sign of the upper-end term, so it does not agree with
/// [`lommel_integral_direct`]; [`lommel_rhs_with_boundary`] does.
pub fn lommel_rhs_closed(ctx: &QContext, a: f64, lam: f64, mu: f64) -> Result<SeriesValue> {
    ctx.require_order_above_minus_one()?;
    let p = Pair::new(ctx)?;
    let q = ctx.q();
    let w = weight_ratio(q, a, 0.0, 2.0 * ctx.alpha() + 2.0, PRODUCT_TOL)?;
    let bracket = p.up(a / q, mu)? * p.base(a, lam)? - p.up(a / q, lam)? * p.base(a, mu)?;
    let v = bracket * (lommel_constant(ctx) * w);
    Ok(SeriesValue {
        value: v.to_f64(),
        abs_error: v.abs().to_f64() * 1e-14,
        terms_used: 1,
    })
}

/// `C { W(a) [J_{alpha+1}(a, lambda) J_alpha(a, mu) - J_{alpha+1}(a, mu) J_alpha(a, lambda)] + B }`
/// with `W(a) = (-a^2q^2;q^2)_inf/(-a^2q^{2alpha+4};q^2)_inf` and the
/// boundary term `B = J_{alpha+1}(0, mu) J_alpha(0, lambda) - J_{alpha+1}(0, lambda) J_alpha(0, mu)`.
pub fn lommel_rhs_with_boundary(ctx: &QContext, a: f64, lam: f64, mu: f64) -> Result<SeriesValue> {
    ctx.require_order_above_minus_one()?;
    let p = Pair::new(ctx)?;
    let w = weight_ratio(ctx.q(), a, 2.0, 2.0 * ctx.alpha() + 4.0, PRODUCT_TOL)?;
    let upper = (p.up(a, lam)? * p.base(a, mu)? - p.up(a, mu)? * p.base(a, lam)?) * w;
    let lower = p.up(0.0, mu)? * p.base(0.0, lam)? - p.up(0.0, lam)? * p.base(0.0, mu)?;
    let v = (upper + lower) * lommel_constant(ctx);
    Ok(SeriesValue {
        value: v.to_f64(),
        abs_error: v.abs().to_f64() * 1e-14,
        terms_used: 1,
    })
}

fn check_zero(ctx: &QContext, a: f64, zero: f64) -> Result<()> {
    let s = eval_j_lambda_ext(&ctx.with_tol(BASIS_TOL)?, a, zero)?;
    let residual = (s.value.abs() / s.abs_sum.max_abs(Ext::ONE)).to_f64();
    if residual > ZERO_RESIDUAL_TOL {
        return Err(Error::NotAZero {
            lambda: zero,
            residual,
        });
    }
    Ok(())
}

/// `C / (2 j) (-a^2;q^2)_inf/(-a^2q^{2alpha+2};q^2)_inf J_{alpha+1}(a/q, j) dJ_alpha/dlambda(a, j)`
/// at a zero `j` of `J_alpha(a, .)`, obtained by letting `mu -> j` in
/// [`lommel_rhs_closed`]. Inherits its defect: the value is not the norm.
pub fn norm_sq_closed(ctx: &QContext, zero: f64, deriv: Ext, a: f64) -> Result<Ext> {
    ctx.require_order_above_minus_one()?;
    check_zero(ctx, a, zero)?;
    let p = Pair::new(ctx)?;
    let q = ctx.q();
    let w = weight_ratio(q, a, 0.0, 2.0 * ctx.alpha() + 2.0, PRODUCT_TOL)?;
    let c = lommel_constant(ctx) / (2.0 * zero) * w;
    Ok(p.up(a / q, zero)? * deriv * c)
}

/// The squared norm `<phi, phi>` of `phi = J_{alpha+1}(., j)` at a zero `j`
/// of `J_alpha(a, .)`, from the limit `mu -> j` of [`lommel_rhs_with_boundary`]:
/// `-C/(2j) [W(a) J_{alpha+1}(a,j) J_alpha'(a,j) + J_{alpha+1}'(0,j) J_alpha(0,j) - J_{alpha+1}(0,j) J_alpha'(0,j)]`
/// where primes are lambda-derivatives.
pub fn norm_sq_with_boundary(ctx: &QContext, zero: f64, deriv: Ext, a: f64) -> Result<Ext> {
    ctx.require_order_above_minus_one()?;
    check_zero(ctx, a, zero)?;
    let p = Pair::new(ctx)?;
    let w = weight_ratio(ctx.q(), a, 2.0, 2.0 * ctx.alpha() + 4.0, PRODUCT_TOL)?;
    let d_up0 = eval_dj_dlambda_ext(&p.up, 0.0, zero)?;
    let d_base0 = eval_dj_dlambda_ext(&p.base, 0.0, zero)?;
    let upper = p.up(a, zero)? * deriv * w;
    let lower = d_up0 * p.base(0.0, zero)? - p.up(0.0, zero)? * d_base0;
    Ok((upper + lower) * (-lommel_constant(ctx) / (2.0 * zero)))
}

/// Gram matrix of `J_{alpha+1}(., j_k)` for the zeros in a table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GramReport {
    pub q: f64,
    pub alpha: f64,
    pub zeros: Vec<f64>,
    /// Row-major `<phi_i, phi_j>` from direct lattice sums.
    pub matrix: Vec<Vec<Ext>>,
    /// [`norm_sq_closed`] at each zero.
    pub norm_closed: Vec<Ext>,
    /// [`norm_sq_with_boundary`] at each zero.
    pub norm_boundary: Vec<Ext>,
    /// `max_{i != j} |G_ij| / sqrt(G_ii G_jj)`.
    pub max_offdiag_rel: f64,
    /// `max_k |norm_closed_k - G_kk| / |G_kk|`.
    pub max_closed_norm_rel_err: f64,
    /// `max_k |norm_boundary_k - G_kk| / |G_kk|`.
    pub max_boundary_norm_rel_err: f64,
    /// Bound on the lattice truncation error of each entry, relative to
    /// `sqrt(G_ii G_jj)`.
    pub truncation_rel: f64,
}

fn require_expansion_order(ctx: &QContext) -> Result<()> {
    ctx.require_order(-0.5, "alpha > -1/2", "orthogonal expansions")
}

#[allow(clippy::needless_range_loop)]
pub fn gram_matrix(ctx: &QContext, table: &ZeroTable) -> Result<GramReport> {
    require_expansion_order(ctx)?;
    table.check_context(ctx)?;
    let n = table.len();
    let basis = Basis::build(ctx, &table.zeros, table.a, ctx.tol(), 0)?;
    let mut matrix = vec![vec![Ext::ZERO; n]; n];
    let mut trunc = 0.0f64;
    for i in 0..n {
        for j in i..n {
            let (v, t) = basis.inner(i, j);
            matrix[i][j] = v;
            matrix[j][i] = v;
            if i == j {
                trunc = trunc.max(t.ratio(v.abs()));
            }
        }
    }
    let mut max_off = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let scale = (matrix[i][i] * matrix[j][j]).abs().sqrt();
                max_off = max_off.max(matrix[i][j].abs().ratio(scale));
            }
        }
    }
    let mut norm_closed = Vec::with_capacity(n);
    let mut norm_boundary = Vec::with_capacity(n);
    let (mut err_closed, mut err_boundary) = (0.0f64, 0.0f64);
    for k in 0..n {
        let c = norm_sq_closed(ctx, table.zeros[k], table.derivs[k], table.a)?;
        let b = norm_sq_with_boundary(ctx, table.zeros[k], table.derivs[k], table.a)?;
        let d = matrix[k][k];
        err_closed = err_closed.max((c - d).abs().ratio(d.abs()));
        err_boundary = err_boundary.max((b - d).abs().ratio(d.abs()));
        norm_closed.push(c);
        norm_boundary.push(b);
    }
    Ok(GramReport {
        q: ctx.q(),
        alpha: ctx.alpha(),
        zeros: table.zeros.clone(),
        matrix,
        norm_closed,
        norm_boundary,
        max_offdiag_rel: max_off,
        max_closed_norm_rel_err: err_closed,
        max_boundary_norm_rel_err: err_boundary,
        truncation_rel: trunc,
    })
}

/// `a_k = <f, phi_k> / <phi_k, phi_k>` with the squared norms summed directly.
pub fn fourier_coefficients(
    ctx: &QContext,
    f: &QLatticeSignal,
    table: &ZeroTable,
) -> Result<Vec<Ext>> {
    require_expansion_order(ctx)?;
    table.check_context(ctx)?;
    f.validate()?;
    check_scale(f.a, table.a)?;
    let basis = Basis::build(ctx, &table.zeros, table.a, ctx.tol(), f.len())?;
    let mut out = Vec::with_capacity(table.len());
    for k in 0..table.len() {
        let (norm, _) = basis.inner(k, k);
        let mut acc = ExtAccumulator::new();
        for (n, &v) in f.values.iter().enumerate() {
            acc.add_ext(basis.values[k][n] * (basis.measure[n] * v));
        }
        out.push(acc.value() / norm);
    }
    Ok(out)
}

/// `sum_k c_k J_{alpha+1}(x, j_k; q^2)`.
pub fn fourier_partial_sum(
    ctx: &QContext,
    coeffs: &[Ext],
    table: &ZeroTable,
    x: f64,
) -> Result<f64> {
    if coeffs.len() != table.len() {
        return Err(Error::LengthMismatch {
            left: coeffs.len(),
            right: table.len(),
        });
    }
    let up = ctx.shifted(1.0).with_tol(BASIS_TOL)?;
    let mut acc = ExtAccumulator::new();
    for (c, &lam) in coeffs.iter().zip(&table.zeros) {
        if c.is_zero() {
            continue;
        }
        acc.add_ext(*c * eval_j_lambda_ext(&up, x, lam)?.value);
    }
    Ok(acc.value().to_f64())
}

/// A Fourier big q-Bessel expansion evaluated back on the lattice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierReport {
    pub q: f64,
    pub alpha: f64,
    /// Number of basis functions.
    pub terms: usize,
    pub coefficients: Vec<Ext>,
    /// Lattice points `a q^m`.
    pub points: Vec<f64>,
    /// `f` at each point (zero beyond its support).
    pub values: Vec<f64>,
    pub partial_sums: Vec<f64>,
    /// `max_m |partial_sums[m] - values[m]|`.
    pub max_abs_err: f64,
}

/// Expands `f` in the basis of `table` and evaluates the partial sum at the
/// first `points` lattice points.
pub fn fourier_expand(
    ctx: &QContext,
    f: &QLatticeSignal,
    table: &ZeroTable,
    points: usize,
) -> Result<FourierReport> {
    let coefficients = fourier_coefficients(ctx, f, table)?;
    let q = ctx.q();
    let mut xs = Vec::with_capacity(points);
    let mut values = Vec::with_capacity(points);
    let mut sums = Vec::with_capacity(points);
    let mut worst = 0.0f64;
    for m in 0..points {
        let x = f.point(q, m);
        let v = f.values.get(m).copied().unwrap_or(0.0);
        let s = fourier_partial_sum(ctx, &coefficients, table, x)?;
        worst = worst.max((s - v).abs());
        xs.push(x);
        values.push(v);
        sums.push(s);
    }
    Ok(FourierReport {
        q,
        alpha: ctx.alpha(),
        terms: table.len(),
        coefficients,
        points: xs,
        values,
        partial_sums: sums,
        max_abs_err: worst,
    })
}
