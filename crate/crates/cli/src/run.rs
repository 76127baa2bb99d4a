use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use qbessel::bqbessel::eval_j;
use qbessel::json::{self, format_f64};
use qbessel::orthogonality::{fourier_expand, gram_matrix};
use qbessel::sampling::reconstruct_with;
use qbessel::verify::verify;
use qbessel::zerofinder::find_zeros;
use qbessel::{Error, QContext, QLatticeSignal, ZeroTable};

use crate::args::{
    Command, Common, EvalArgs, Format, FourierArgs, GramArgs, SampleArgs, VerifyArgs, ZerosArgs,
    Q_MAX,
};

/// Lattice points past the end of the signal at which a Fourier expansion is
/// also evaluated.
const FOURIER_EXTRA_POINTS: usize = 3;
const FOURIER_MIN_POINTS: usize = 6;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Numeric(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Numeric(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Numeric(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidBase { .. }
            | Error::InvalidOrder { .. }
            | Error::OrderOutOfRange { .. }
            | Error::InvalidInput(_)
            | Error::ScaleMismatch { .. }
            | Error::LengthMismatch { .. }
            | Error::IndexOutOfRange { .. }
            | Error::AtPole { .. }
            | Error::NotAZero { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

/// Document for standard output and whether a verification failed.
pub struct Outcome {
    pub text: String,
    pub verified: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome {
            text,
            verified: true,
        }
    }
}

pub fn execute(cmd: &Command) -> Result<Outcome, Failure> {
    match cmd {
        Command::Eval(a) => eval(a),
        Command::Zeros(a) => zeros(a),
        Command::Gram(a) => gram(a),
        Command::Fourier(a) => fourier(a),
        Command::Sample(a) => sample(a),
        Command::Verify(a) => run_verify(a),
    }
}

fn read(path: &Path, what: &str) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {what} file {}: {e}", path.display())))
}

fn load_table(path: &Path) -> Result<ZeroTable, Failure> {
    Ok(json::parse_zero_table(&read(path, "zero table")?)?)
}

fn load_signal(path: &Path) -> Result<QLatticeSignal, Failure> {
    Ok(json::parse_signal(&read(path, "signal")?)?)
}

/// Context from the flags, filling `q` and `alpha` from a zero table when
/// they are not given.
fn context(c: &Common, table: Option<&ZeroTable>) -> Result<QContext, Failure> {
    let q = match (c.q, table) {
        (Some(q), Some(t)) if q != t.q => {
            return Err(Failure::Usage(format!(
                "--q {q} disagrees with the zero table (q = {})",
                t.q
            )))
        }
        (Some(q), _) => q,
        (None, Some(t)) => t.q,
        (None, None) => return Err(Failure::Usage("--q is required".into())),
    };
    if !(q > 0.0 && q <= Q_MAX) {
        return Err(Failure::Usage(format!("q = {q} must lie in (0, {Q_MAX}]")));
    }
    let alpha = match (c.alpha, table) {
        (Some(a), Some(t)) if a != t.alpha => {
            return Err(Failure::Usage(format!(
                "--alpha {a} disagrees with the zero table (alpha = {})",
                t.alpha
            )))
        }
        (Some(a), _) => a,
        (None, Some(t)) => t.alpha,
        (None, None) => 0.0,
    };
    Ok(QContext::new(q, alpha)?
        .with_tol(c.tol)?
        .with_terms_max(c.terms_max))
}

fn table_for(
    c: &Common,
    path: Option<&Path>,
    count: usize,
) -> Result<(QContext, ZeroTable), Failure> {
    match path {
        Some(p) => {
            let t = load_table(p)?;
            let ctx = context(c, Some(&t))?;
            Ok((ctx, t))
        }
        None => {
            if count == 0 {
                return Err(Failure::Usage("--count must be positive".into()));
            }
            let ctx = context(c, None)?;
            let t = find_zeros(&ctx, count)?;
            Ok((ctx, t))
        }
    }
}

fn to_json<T: Serialize + ?Sized>(v: &T) -> Result<String, Failure> {
    let mut s = json::to_string(v)?;
    s.push('\n');
    Ok(s)
}

fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{}", r.join(","));
    }
    out
}

#[derive(Serialize)]
struct EvalPoint {
    q: f64,
    alpha: f64,
    x: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda: Option<f64>,
    z: f64,
    value: f64,
    abs_error: f64,
    terms_used: usize,
}

fn eval(a: &EvalArgs) -> Result<Outcome, Failure> {
    let ctx = context(&a.common, None)?;
    let specs: Vec<(Option<f64>, f64)> = match (&a.lambdas, a.lambda, a.z) {
        (Some(g), _, _) => g.0.iter().map(|&l| (Some(l), l * l)).collect(),
        (None, Some(l), _) => vec![(Some(l), l * l)],
        (None, None, Some(z)) => vec![(None, z)],
        (None, None, None) => {
            return Err(Failure::Usage(
                "one of --lambda, --z, --lambdas is required".into(),
            ))
        }
    };
    let mut points = Vec::with_capacity(specs.len());
    for (lambda, z) in specs {
        let v = eval_j(&ctx, a.x, z)?;
        points.push(EvalPoint {
            q: ctx.q(),
            alpha: ctx.alpha(),
            x: a.x,
            lambda,
            z,
            value: v.value,
            abs_error: v.abs_error,
            terms_used: v.terms_used,
        });
    }
    let text = match a.common.format {
        Format::Json if a.lambdas.is_none() => to_json(&points[0])?,
        Format::Json => to_json(&points)?,
        Format::Csv => csv(
            &["x", "lambda", "z", "value", "abs_error", "terms_used"],
            points.iter().map(|p| {
                vec![
                    format_f64(p.x),
                    p.lambda.map(format_f64).unwrap_or_default(),
                    format_f64(p.z),
                    format_f64(p.value),
                    format_f64(p.abs_error),
                    p.terms_used.to_string(),
                ]
            }),
        ),
    };
    Ok(Outcome::ok(text))
}

fn zeros(a: &ZerosArgs) -> Result<Outcome, Failure> {
    let (_, t) = table_for(&a.common, None, a.count)?;
    let text = match a.common.format {
        Format::Json => to_json(&t)?,
        Format::Csv => csv(
            &["index", "zero", "deriv", "residual"],
            (0..t.len()).map(|k| {
                vec![
                    k.to_string(),
                    format_f64(t.zeros[k]),
                    t.derivs[k].to_string(),
                    format_f64(t.residuals[k]),
                ]
            }),
        ),
    };
    Ok(Outcome::ok(text))
}

fn gram(a: &GramArgs) -> Result<Outcome, Failure> {
    let (ctx, t) = table_for(&a.common, a.zeros.as_deref(), a.count)?;
    let g = gram_matrix(&ctx, &t)?;
    let text = match a.common.format {
        Format::Json => to_json(&g)?,
        Format::Csv => {
            let idx: Vec<String> = (0..g.matrix.len()).map(|i| i.to_string()).collect();
            let mut header = vec!["index"];
            header.extend(idx.iter().map(String::as_str));
            csv(
                &header,
                g.matrix.iter().enumerate().map(|(i, row)| {
                    std::iter::once(i.to_string())
                        .chain(row.iter().map(|v| v.to_string()))
                        .collect()
                }),
            )
        }
    };
    Ok(Outcome::ok(text))
}

fn fourier(a: &FourierArgs) -> Result<Outcome, Failure> {
    let f = load_signal(&a.signal)?;
    let (ctx, t) = table_for(&a.common, a.zeros.as_deref(), a.count)?;
    let points = (f.len() + FOURIER_EXTRA_POINTS).max(FOURIER_MIN_POINTS);
    let r = fourier_expand(&ctx, &f, &t, points)?;
    let text = match a.common.format {
        Format::Json => to_json(&r)?,
        Format::Csv => csv(
            &["m", "x", "value", "partial_sum"],
            (0..r.points.len()).map(|m| {
                vec![
                    m.to_string(),
                    format_f64(r.points[m]),
                    format_f64(r.values[m]),
                    format_f64(r.partial_sums[m]),
                ]
            }),
        ),
    };
    Ok(Outcome::ok(text))
}

fn sample(a: &SampleArgs) -> Result<Outcome, Failure> {
    let f = load_signal(&a.signal)?;
    let (ctx, t) = table_for(&a.common, a.zeros.as_deref(), a.count)?;
    let r = reconstruct_with(&ctx, &f, &t, &a.lambdas.0, a.kernel.into())?;
    let text = match a.common.format {
        Format::Json => to_json(&r)?,
        Format::Csv => csv(
            &["lambda", "direct", "reconstructed"],
            (0..r.lambdas.len()).map(|i| {
                vec![
                    format_f64(r.lambdas[i]),
                    format_f64(r.direct[i]),
                    format_f64(r.reconstructed[i]),
                ]
            }),
        ),
    };
    Ok(Outcome::ok(text))
}

fn run_verify(a: &VerifyArgs) -> Result<Outcome, Failure> {
    let ctx = context(&a.common, None)?;
    let r = verify(&ctx, a.suite.into())?;
    let text = match a.common.format {
        Format::Json => to_json(&r)?,
        Format::Csv => csv(
            &["identity", "point", "residual", "threshold", "pass"],
            r.entries.iter().map(|e| {
                let point: Vec<String> = e
                    .point
                    .iter()
                    .map(|(k, v)| format!("{k}={}", format_f64(*v)))
                    .collect();
                vec![
                    e.identity.clone(),
                    point.join(";"),
                    format_f64(e.residual),
                    format_f64(e.threshold),
                    e.pass.to_string(),
                ]
            }),
        ),
    };
    Ok(Outcome {
        text,
        verified: r.pass,
    })
}
