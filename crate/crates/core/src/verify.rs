//! Residual suites over fixed parameter grids.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bqbessel::{identity_residual, weight_ratio, IdentityKind};
use crate::error::{Error, Result};
use crate::orthogonality::{
    gram_matrix, lommel_integral_direct, lommel_rhs_closed, lommel_rhs_with_boundary,
    QLatticeSignal,
};
use crate::qcalc::QContext;
use crate::sampling::{
    closed_sum_check, kernel_delta_error, q_hankel_transform, reconstruct, KernelForm,
};
use crate::zerofinder::find_zeros;

pub const IDENTITY_THRESHOLD: f64 = 1e-9;
pub const ORTHOGONALITY_THRESHOLD: f64 = 1e-8;
pub const SAMPLING_THRESHOLD: f64 = 1e-6;

/// Spectral parameters of the identity grid.
pub const IDENTITY_Z_GRID: [f64; 3] = [0.04, 0.25, 1.0];
/// Spectral parameters paired in the Lommel checks.
pub const LOMMEL_LAMBDAS: [f64; 3] = [0.5, 1.0, 3.0];
/// Evaluation points of the reconstruction check.
pub const SAMPLING_LAMBDAS: [f64; 4] = [0.3, 0.7, 1.1, 1.5];
const GRAM_SIZE: usize = 5;
const SAMPLING_TERMS: usize = 20;
const CLOSED_SUM_LAMBDA: f64 = 0.4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Identities,
    Orthogonality,
    Sampling,
    All,
}

impl Suite {
    pub fn threshold(self) -> Option<f64> {
        match self {
            Suite::Identities => Some(IDENTITY_THRESHOLD),
            Suite::Orthogonality => Some(ORTHOGONALITY_THRESHOLD),
            Suite::Sampling => Some(SAMPLING_THRESHOLD),
            Suite::All => None,
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identities" => Ok(Suite::Identities),
            "orthogonality" => Ok(Suite::Orthogonality),
            "sampling" => Ok(Suite::Sampling),
            "all" => Ok(Suite::All),
            _ => Err(Error::InvalidInput(format!("unknown suite '{s}'"))),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Suite::Identities => "identities",
            Suite::Orthogonality => "orthogonality",
            Suite::Sampling => "sampling",
            Suite::All => "all",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyEntry {
    pub identity: String,
    pub point: BTreeMap<String, f64>,
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl VerifyEntry {
    fn new(identity: &str, point: &[(&str, f64)], residual: f64, threshold: f64) -> Self {
        VerifyEntry {
            identity: identity.to_string(),
            point: point.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
            residual,
            threshold,
            pass: residual < threshold,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub q: f64,
    pub alpha: f64,
    pub entries: Vec<VerifyEntry>,
    pub max_residual: f64,
    pub pass: bool,
}

impl VerifyReport {
    fn from_entries(suite: Suite, ctx: &QContext, entries: Vec<VerifyEntry>) -> Self {
        let max_residual = entries.iter().map(|e| e.residual).fold(0.0f64, |m, r| {
            if r.is_nan() {
                f64::INFINITY
            } else {
                m.max(r)
            }
        });
        let pass = entries.iter().all(|e| e.pass);
        VerifyReport {
            suite,
            q: ctx.q(),
            alpha: ctx.alpha(),
            entries,
            max_residual,
            pass,
        }
    }
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

/// Relations that hold, at `x in {q^2, q, 1}` and `z` in [`IDENTITY_Z_GRID`].
pub fn identity_entries(ctx: &QContext) -> Result<Vec<VerifyEntry>> {
    let q = ctx.q();
    let mut out = Vec::new();
    for kind in IdentityKind::VALID {
        for &x in &[q * q, q, 1.0] {
            for &z in &IDENTITY_Z_GRID {
                let r = identity_residual(ctx, kind, x, z)?;
                out.push(VerifyEntry::new(
                    kind.name(),
                    &[("x", x), ("z", z)],
                    r,
                    IDENTITY_THRESHOLD,
                ));
            }
        }
    }
    Ok(out)
}

/// Lommel integral against both closed forms, Gram off-diagonals and both
/// norm formulas for the first zeros.
pub fn orthogonality_entries(ctx: &QContext) -> Result<Vec<VerifyEntry>> {
    let mut out = Vec::new();
    let t = ORTHOGONALITY_THRESHOLD;
    for (i, &lam) in LOMMEL_LAMBDAS.iter().enumerate() {
        for &mu in &LOMMEL_LAMBDAS[i + 1..] {
            let d = lommel_integral_direct(ctx, 1.0, lam, mu)?.value;
            let closed = lommel_rhs_closed(ctx, 1.0, lam, mu)?.value;
            let boundary = lommel_rhs_with_boundary(ctx, 1.0, lam, mu)?.value;
            let p = [("lambda", lam), ("mu", mu)];
            out.push(VerifyEntry::new(
                "lommel_closed",
                &p,
                relative(d, closed),
                t,
            ));
            out.push(VerifyEntry::new(
                "lommel_with_boundary",
                &p,
                relative(d, boundary),
                t,
            ));
        }
    }
    let zeros = find_zeros(ctx, GRAM_SIZE)?;
    let g = gram_matrix(ctx, &zeros)?;
    let n = [("zeros", GRAM_SIZE as f64)];
    out.push(VerifyEntry::new(
        "gram_offdiagonal",
        &n,
        g.max_offdiag_rel,
        t,
    ));
    out.push(VerifyEntry::new(
        "norm_closed",
        &n,
        g.max_closed_norm_rel_err,
        t,
    ));
    out.push(VerifyEntry::new(
        "norm_with_boundary",
        &n,
        g.max_boundary_norm_rel_err,
        t,
    ));
    Ok(out)
}

/// Kernel interpolation, reconstruction of a three-point signal, the
/// single-point transform and its closed sum.
pub fn sampling_entries(ctx: &QContext) -> Result<Vec<VerifyEntry>> {
    let t = SAMPLING_THRESHOLD;
    let q = ctx.q();
    let zeros = find_zeros(ctx, SAMPLING_TERMS)?;
    let mut out = Vec::new();
    let delta = kernel_delta_error(ctx, &zeros, 5, KernelForm::Standard)?;
    out.push(VerifyEntry::new(
        "kernel_delta",
        &[("zeros", 5.0)],
        delta,
        t,
    ));

    let f = QLatticeSignal::new(1.0, vec![1.0, 1.0, 1.0])?;
    let r = reconstruct(ctx, &f, &zeros, &SAMPLING_LAMBDAS)?;
    out.push(VerifyEntry::new(
        "reconstruction",
        &[("terms", SAMPLING_TERMS as f64)],
        r.max_rel_err,
        t,
    ));

    let single = QLatticeSignal::new(1.0, vec![1.0 / (1.0 - q)])?;
    let w = weight_ratio(q, 1.0, 2.0, 2.0 * ctx.alpha() + 4.0, 1e-16)?;
    let up = ctx.shifted(1.0);
    for &lam in &SAMPLING_LAMBDAS {
        let got = q_hankel_transform(ctx, &single, lam)?.value;
        let expect = w * crate::bqbessel::eval_j(&up, 1.0, lam * lam)?.value;
        out.push(VerifyEntry::new(
            "single_point_transform",
            &[("lambda", lam)],
            relative(got, expect),
            t,
        ));
    }
    let c = closed_sum_check(ctx, &zeros, CLOSED_SUM_LAMBDA)?;
    out.push(VerifyEntry::new(
        "closed_sum",
        &[
            ("lambda", CLOSED_SUM_LAMBDA),
            ("terms", SAMPLING_TERMS as f64),
        ],
        c.gap / c.lhs.abs().max(1.0),
        t,
    ));
    Ok(out)
}

pub fn verify(ctx: &QContext, suite: Suite) -> Result<VerifyReport> {
    let entries = match suite {
        Suite::Identities => identity_entries(ctx)?,
        Suite::Orthogonality => orthogonality_entries(ctx)?,
        Suite::Sampling => sampling_entries(ctx)?,
        Suite::All => {
            let mut e = identity_entries(ctx)?;
            e.extend(orthogonality_entries(ctx)?);
            e.extend(sampling_entries(ctx)?);
            e
        }
    };
    Ok(VerifyReport::from_entries(suite, ctx, entries))
}
