//! Positive zeros `0 < j_1 < j_2 < ...` of `lambda -> J_alpha(a, lambda; q^2)`.
//!
//! The scan runs over `z = lambda^2` on a geometric grid starting at zero.
//! No zeros lie at `z < 0`: every series term is positive there, so the
//! function is at least 1. Each grid step is split into equal sub-steps, and
//! each sub-step with a sign change is split again until it holds exactly one
//! change. Brackets are narrowed by bisection, then by safeguarded Newton
//! steps on `dJ/dz`, and the final `lambda` is the double among a few
//! neighbours of `sqrt(z*)` that minimizes `|J|`.

use serde::{Deserialize, Serialize};

use crate::bqbessel::{eval_dj_dlambda_ext, eval_dj_dz_ext, eval_j_ext, eval_j_lambda_ext};
use crate::error::{Error, Result};
use crate::numeric::Ext;
use crate::qcalc::QContext;

pub const DEFAULT_Z_START: f64 = 1e-3;
pub const DEFAULT_SUBDIVISIONS: usize = 8;
pub const DEFAULT_Z_CEILING: f64 = 1e250;
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-9;
pub const DEFAULT_SIMPLICITY_FLOOR: f64 = 1e-12;

/// Series tolerance used for sign decisions near zeros.
const SERIES_TOL: f64 = 1e-24;
const MAX_CERTIFY_DEPTH: usize = 6;
const NEWTON_START_WIDTH: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeroFinderConfig {
    /// First argument of `J_alpha(a, lambda; q^2)`.
    pub a: f64,
    pub z_start: f64,
    /// Grid growth factor; `None` means `q^{-1/2}`.
    pub growth: Option<f64>,
    pub subdivisions: usize,
    pub z_ceiling: f64,
    /// Bound on `|J| / max(1, sum |terms|)` at each reported zero.
    pub residual_tol: f64,
    /// Lower bound on `|dJ/dlambda|` at each reported zero.
    pub simplicity_floor: f64,
}

impl Default for ZeroFinderConfig {
    fn default() -> Self {
        ZeroFinderConfig {
            a: 1.0,
            z_start: DEFAULT_Z_START,
            growth: None,
            subdivisions: DEFAULT_SUBDIVISIONS,
            z_ceiling: DEFAULT_Z_CEILING,
            residual_tol: DEFAULT_RESIDUAL_TOL,
            simplicity_floor: DEFAULT_SIMPLICITY_FLOOR,
        }
    }
}

impl ZeroFinderConfig {
    pub fn growth_for(&self, q: f64) -> f64 {
        self.growth.unwrap_or_else(|| q.powf(-0.5))
    }

    /// The same configuration with half the logarithmic grid step.
    pub fn halved(mut self, q: f64) -> Self {
        self.growth = Some(self.growth_for(q).sqrt());
        self
    }
}

fn default_scale() -> f64 {
    1.0
}

fn is_default_scale(a: &f64) -> bool {
    *a == 1.0
}

/// Ordered zeros with the lambda-derivative and relative residual at each.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroTable {
    pub q: f64,
    pub alpha: f64,
    #[serde(default = "default_scale", skip_serializing_if = "is_default_scale")]
    pub a: f64,
    pub zeros: Vec<f64>,
    /// `dJ_alpha/dlambda (a, j_k; q^2)`; may exceed the `f64` range.
    pub derivs: Vec<Ext>,
    /// `|J_alpha(a, j_k)| / max(1, sum_n |t_n|)` over the series terms `t_n`.
    pub residuals: Vec<f64>,
}

impl ZeroTable {
    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }

    /// First `n` zeros.
    pub fn truncated(&self, n: usize) -> ZeroTable {
        let n = n.min(self.len());
        ZeroTable {
            q: self.q,
            alpha: self.alpha,
            a: self.a,
            zeros: self.zeros[..n].to_vec(),
            derivs: self.derivs[..n].to_vec(),
            residuals: self.residuals[..n].to_vec(),
        }
    }

    /// Structural checks for tables read from outside.
    pub fn validate(&self) -> Result<()> {
        if self.derivs.len() != self.zeros.len() {
            return Err(Error::LengthMismatch {
                left: self.zeros.len(),
                right: self.derivs.len(),
            });
        }
        if self.residuals.len() != self.zeros.len() {
            return Err(Error::LengthMismatch {
                left: self.zeros.len(),
                right: self.residuals.len(),
            });
        }
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "scale a = {} must be positive",
                self.a
            )));
        }
        let mut prev = 0.0;
        for (k, &z) in self.zeros.iter().enumerate() {
            if !(z.is_finite() && z > prev) {
                return Err(Error::InvalidInput(format!(
                    "zeros must be positive and strictly increasing (index {k})"
                )));
            }
            prev = z;
        }
        if self.derivs.iter().any(|d| !d.is_finite() || d.is_zero()) {
            return Err(Error::InvalidInput(
                "derivatives must be finite and nonzero".into(),
            ));
        }
        Ok(())
    }

    /// Checks that the table belongs to `ctx`.
    pub fn check_context(&self, ctx: &QContext) -> Result<()> {
        self.validate()?;
        if self.q != ctx.q() || self.alpha != ctx.alpha() {
            return Err(Error::InvalidInput(format!(
                "zero table is for q = {}, alpha = {} but the context has q = {}, alpha = {}",
                self.q,
                self.alpha,
                ctx.q(),
                ctx.alpha()
            )));
        }
        Ok(())
    }
}

/// A single polished zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RefinedZero {
    pub lambda: f64,
    pub z: f64,
    pub deriv: Ext,
    pub residual: f64,
}

struct Probe {
    ctx: QContext,
    a: f64,
}

impl Probe {
    fn new(ctx: &QContext, a: f64) -> Result<Self> {
        let tol = ctx.tol().min(SERIES_TOL);
        Ok(Probe {
            ctx: ctx.with_tol(tol)?,
            a,
        })
    }

    fn value(&self, z: f64) -> Result<Ext> {
        Ok(eval_j_ext(&self.ctx, self.a, z)?.value)
    }

    fn sign(&self, z: f64) -> Result<f64> {
        Ok(self.value(z)?.signum())
    }
}

fn changes(s0: f64, s1: f64) -> bool {
    s0 * s1 < 0.0 || (s1 == 0.0 && s0 != 0.0)
}

/// Sub-brackets of `[lo, hi]` (signs `slo`, `shi`) that each hold one sign change.
#[allow(clippy::too_many_arguments)]
fn certify(
    probe: &Probe,
    lo: f64,
    slo: f64,
    hi: f64,
    shi: f64,
    parts: usize,
    depth: usize,
    out: &mut Vec<(f64, f64)>,
) -> Result<()> {
    let mut found = Vec::new();
    let (mut a, mut sa) = (lo, slo);
    for i in 1..=parts {
        let b = if i == parts {
            hi
        } else {
            lo + (hi - lo) * i as f64 / parts as f64
        };
        let sb = if i == parts { shi } else { probe.sign(b)? };
        if changes(sa, sb) {
            found.push((a, sa, b, sb));
        }
        a = b;
        sa = sb;
    }
    if found.len() <= 1 || depth >= MAX_CERTIFY_DEPTH {
        if found.len() > 1 {
            log::warn!(
                "could not isolate {} sign changes in [{lo:e}, {hi:e}]",
                found.len()
            );
        }
        out.extend(found.iter().map(|&(a, _, b, _)| (a, b)));
        return Ok(());
    }
    for (a, sa, b, sb) in found {
        certify(probe, a, sa, b, sb, parts, depth + 1, out)?;
    }
    Ok(())
}

/// Sign-change brackets in `z`, ascending, at least `count` of them.
fn scan(ctx: &QContext, count: usize, cfg: &ZeroFinderConfig) -> Result<Vec<(f64, f64)>> {
    let probe = Probe::new(ctx, cfg.a)?;
    let growth = cfg.growth_for(ctx.q());
    if !(growth > 1.0) {
        return Err(Error::InvalidInput(format!(
            "grid growth {growth} must exceed 1"
        )));
    }
    let parts = cfg.subdivisions.max(1);
    let mut brackets = Vec::new();
    let (mut z0, mut s0) = (0.0, 1.0);
    let mut z1 = cfg.z_start;
    while brackets.len() < count {
        if z1 > cfg.z_ceiling {
            return Err(Error::BracketingFailure {
                found: brackets.len(),
                requested: count,
                z_reached: z0,
            });
        }
        let s1 = probe.sign(z1)?;
        certify(&probe, z0, s0, z1, s1, parts, 0, &mut brackets)?;
        z0 = z1;
        s0 = s1;
        z1 *= growth;
    }
    brackets.truncate(count);
    Ok(brackets)
}

fn ulp_neighbour(x: f64, steps: i64) -> f64 {
    f64::from_bits((x.to_bits() as i64 + steps) as u64)
}

/// Narrows a sign-change bracket `[z_lo, z_hi]` of `J_alpha(a, sqrt z)` to a
/// polished zero.
pub fn refine_zero_at(ctx: &QContext, a: f64, z_lo: f64, z_hi: f64) -> Result<RefinedZero> {
    ctx.require_order_above_minus_one()?;
    let probe = Probe::new(ctx, a)?;
    let (mut lo, mut hi) = if z_lo <= z_hi {
        (z_lo, z_hi)
    } else {
        (z_hi, z_lo)
    };
    if lo < 0.0 {
        return Err(Error::NoSignChange { lo, hi });
    }
    let slo = probe.sign(lo)?;
    let shi = probe.sign(hi)?;
    let mut z;
    if slo == 0.0 {
        z = lo;
    } else if shi == 0.0 {
        z = hi;
    } else if slo * shi > 0.0 {
        return Err(Error::NoSignChange { lo, hi });
    } else {
        while hi - lo > NEWTON_START_WIDTH * hi {
            let mid = 0.5 * (lo + hi);
            let s = probe.sign(mid)?;
            if s == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if s == slo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        z = 0.5 * (lo + hi);
        for _ in 0..200 {
            let g = probe.value(z)?;
            if g.is_zero() {
                break;
            }
            if g.signum() == slo {
                lo = z;
            } else {
                hi = z;
            }
            let d = eval_dj_dz_ext(&probe.ctx, a, z)?.value;
            let newton = z - (g / d).to_f64();
            let next = if newton > lo && newton < hi && newton.is_finite() {
                newton
            } else {
                0.5 * (lo + hi)
            };
            let done =
                (next - z).abs() <= 2.0 * f64::EPSILON * z || hi - lo <= 4.0 * f64::EPSILON * hi;
            z = next;
            if done {
                break;
            }
        }
    }

    // best double lambda near sqrt(z)
    let centre = z.sqrt();
    let mut best: Option<(f64, Ext, Ext)> = None;
    for step in -4i64..=4 {
        let lam = ulp_neighbour(centre, step);
        if !(lam > 0.0) {
            continue;
        }
        let s = eval_j_lambda_ext(&probe.ctx, a, lam)?;
        if best.is_none_or(|(_, v, _)| s.value.abs() < v.abs()) {
            best = Some((lam, s.value, s.abs_sum));
        }
    }
    let (lambda, value, abs_sum) = best.ok_or(Error::NoSignChange { lo, hi })?;
    let residual = (value.abs() / abs_sum.max_abs(Ext::ONE)).to_f64();
    let deriv = eval_dj_dlambda_ext(&probe.ctx, a, lambda)?;
    Ok(RefinedZero {
        lambda,
        z: lambda * lambda,
        deriv,
        residual,
    })
}

/// [`refine_zero_at`] with `a = 1`.
pub fn refine_zero(ctx: &QContext, z_lo: f64, z_hi: f64) -> Result<RefinedZero> {
    refine_zero_at(ctx, 1.0, z_lo, z_hi)
}

/// First `count` positive zeros of `J_alpha(1, lambda; q^2)`.
pub fn find_zeros(ctx: &QContext, count: usize) -> Result<ZeroTable> {
    find_zeros_with(ctx, count, &ZeroFinderConfig::default())
}

pub fn find_zeros_with(ctx: &QContext, count: usize, cfg: &ZeroFinderConfig) -> Result<ZeroTable> {
    ctx.require_order(-0.5, "alpha > -1/2", "zero finding")?;
    if count == 0 {
        return Err(Error::InvalidInput("zero count must be at least 1".into()));
    }
    if !(cfg.a > 0.0 && cfg.a.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "scale a = {} must be positive",
            cfg.a
        )));
    }
    let brackets = scan(ctx, count, cfg)?;
    let mut table = ZeroTable {
        q: ctx.q(),
        alpha: ctx.alpha(),
        a: cfg.a,
        zeros: Vec::with_capacity(count),
        derivs: Vec::with_capacity(count),
        residuals: Vec::with_capacity(count),
    };
    for (lo, hi) in brackets {
        let r = refine_zero_at(ctx, cfg.a, lo, hi)?;
        if r.residual > cfg.residual_tol {
            return Err(Error::NotAZero {
                lambda: r.lambda,
                residual: r.residual,
            });
        }
        if r.deriv.abs() < Ext::from_f64(cfg.simplicity_floor) {
            log::warn!(
                "zero {} has derivative {} below the simplicity floor",
                r.lambda,
                r.deriv
            );
        }
        log::debug!("zero {} residual {:e}", r.lambda, r.residual);
        table.zeros.push(r.lambda);
        table.derivs.push(r.deriv);
        table.residuals.push(r.residual);
    }
    Ok(table)
}
