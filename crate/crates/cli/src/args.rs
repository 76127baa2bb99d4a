use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qbessel::qcalc::{DEFAULT_TERMS_MAX, DEFAULT_TOL};
use qbessel::{KernelForm, Suite};

/// Largest accepted base.
pub const Q_MAX: f64 = 0.999;

#[derive(Debug, Parser)]
#[command(
    name = "qbessel",
    version,
    about = "Big q-Bessel functions: values, zeros, expansions and sampling"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate J_alpha(x, lambda; q^2) at one point or on a lambda grid.
    Eval(EvalArgs),
    /// Tabulate the first positive zeros of J_alpha(1, .; q^2).
    Zeros(ZerosArgs),
    /// Gram matrix of the Fourier basis and both norm formulas.
    Gram(GramArgs),
    /// Fourier big q-Bessel expansion of a lattice signal.
    Fourier(FourierArgs),
    /// Sampling reconstruction of the finite big q-Hankel transform.
    Sample(SampleArgs),
    /// Residual suites over fixed parameter grids.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kernel {
    Standard,
    ShiftedOrder,
}

impl From<Kernel> for KernelForm {
    fn from(k: Kernel) -> Self {
        match k {
            Kernel::Standard => KernelForm::Standard,
            Kernel::ShiftedOrder => KernelForm::ShiftedOrder,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Identities,
    Orthogonality,
    Sampling,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Identities => Suite::Identities,
            SuiteArg::Orthogonality => Suite::Orthogonality,
            SuiteArg::Sampling => Suite::Sampling,
            SuiteArg::All => Suite::All,
        }
    }
}

/// Flags shared by every subcommand.
#[derive(Debug, Args)]
pub struct Common {
    /// Base q in (0, 0.999].
    #[arg(long, value_parser = parse_q)]
    pub q: Option<f64>,
    #[arg(long, allow_negative_numbers = true, value_parser = parse_finite)]
    pub alpha: Option<f64>,
    /// Series truncation tolerance.
    #[arg(long, default_value_t = DEFAULT_TOL, value_parser = parse_positive)]
    pub tol: f64,
    /// Hard cap on the number of series terms.
    #[arg(long, default_value_t = DEFAULT_TERMS_MAX)]
    pub terms_max: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("spectral").required(true))]
pub struct EvalArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true, value_parser = parse_finite)]
    pub x: f64,
    #[arg(long, group = "spectral", allow_negative_numbers = true, value_parser = parse_finite)]
    pub lambda: Option<f64>,
    /// Squared spectral parameter; may be negative.
    #[arg(long, group = "spectral", allow_negative_numbers = true, value_parser = parse_finite)]
    pub z: Option<f64>,
    /// JSON array or "start:stop:count".
    #[arg(long, group = "spectral", value_parser = parse_grid)]
    pub lambdas: Option<Grid>,
}

#[derive(Debug, Args)]
pub struct ZerosArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 5)]
    pub count: usize,
}

#[derive(Debug, Args)]
pub struct GramArgs {
    #[command(flatten)]
    pub common: Common,
    /// Zero table written by `zeros`; computed when absent.
    #[arg(long)]
    pub zeros: Option<PathBuf>,
    #[arg(long, default_value_t = 5)]
    pub count: usize,
}

#[derive(Debug, Args)]
pub struct FourierArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub signal: PathBuf,
    #[arg(long)]
    pub zeros: Option<PathBuf>,
    #[arg(long, default_value_t = 40)]
    pub count: usize,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub signal: PathBuf,
    #[arg(long)]
    pub zeros: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    pub count: usize,
    /// JSON array or "start:stop:count".
    #[arg(long, value_parser = parse_grid)]
    pub lambdas: Grid,
    /// `shifted-order` uses J_{alpha+1} in the kernel, which does not
    /// interpolate; for comparison only.
    #[arg(long, value_enum, default_value_t = Kernel::Standard)]
    pub kernel: Kernel,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value_t = SuiteArg::All)]
    pub suite: SuiteArg,
}

/// A list of spectral parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid(pub Vec<f64>);

fn parse_finite(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("'{s}' is not finite"))
    }
}

fn parse_q(s: &str) -> Result<f64, String> {
    let q = parse_finite(s)?;
    if q > 0.0 && q <= Q_MAX {
        Ok(q)
    } else {
        Err(format!("q = {q} must lie in (0, {Q_MAX}]"))
    }
}

fn parse_positive(s: &str) -> Result<f64, String> {
    let v = parse_finite(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("{v} must be positive"))
    }
}

/// `[l0, l1, ...]` or `start:stop:count` (inclusive, evenly spaced).
pub fn parse_grid(s: &str) -> Result<Grid, String> {
    let t = s.trim();
    let values = if t.starts_with('[') {
        serde_json::from_str::<Vec<f64>>(t).map_err(|e| format!("bad lambda array: {e}"))?
    } else {
        let parts: Vec<&str> = t.split(':').collect();
        let [start, stop, count] = parts[..] else {
            return Err(format!(
                "'{s}' is neither a JSON array nor start:stop:count"
            ));
        };
        let start = parse_finite(start)?;
        let stop = parse_finite(stop)?;
        let count: usize = count
            .parse()
            .map_err(|_| format!("bad count '{count}' in '{s}'"))?;
        match count {
            0 => Vec::new(),
            1 => vec![start],
            _ => (0..count)
                .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
                .collect(),
        }
    };
    if values.is_empty() {
        return Err("lambda grid is empty".into());
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err("lambda grid has a non-finite value".into());
    }
    Ok(Grid(values))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<Cli, clap::Error> {
        Cli::try_parse_from(std::iter::once("qbessel").chain(args.iter().copied()))
    }

    #[test]
    fn zeros_plan() {
        let cli = parse(&["zeros", "--q", "0.5", "--alpha", "0", "--count", "5"]).unwrap();
        let Command::Zeros(z) = cli.command else {
            panic!("wrong command")
        };
        assert_eq!(z.common.q, Some(0.5));
        assert_eq!(z.common.alpha, Some(0.0));
        assert_eq!(z.count, 5);
        assert_eq!(z.common.format, Format::Json);
    }

    #[test]
    fn rejects_bad_base() {
        for q in ["1.5", "0", "1", "-0.2", "nan", "0.9995"] {
            assert!(parse(&["eval", "--q", q, "--z", "1"]).is_err(), "{q}");
        }
        assert!(parse(&["eval", "--q", "0.999", "--z", "1"]).is_ok());
    }

    #[test]
    fn verify_plan() {
        let cli = parse(&[
            "verify",
            "--suite",
            "identities",
            "--q",
            "0.5",
            "--alpha",
            "0.5",
        ])
        .unwrap();
        let Command::Verify(v) = cli.command else {
            panic!("wrong command")
        };
        assert_eq!(v.suite, SuiteArg::Identities);
    }

    #[test]
    fn negative_order_and_unknown_flags() {
        assert!(parse(&["eval", "--q", "0.5", "--alpha", "-0.25", "--z", "-3"]).is_ok());
        assert!(parse(&["eval", "--q", "0.5", "--z", "1", "--bogus", "1"]).is_err());
        assert!(parse(&["eval", "--q", "0.5", "--z", "1", "--lambda", "1"]).is_err());
        assert!(parse(&["eval", "--q", "0.5"]).is_err());
        assert!(parse(&["eval", "--q", "0.5", "--z", "1", "--tol", "0"]).is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("[0.3, 0.7]").unwrap(), Grid(vec![0.3, 0.7]));
        assert_eq!(
            parse_grid("0:1:5").unwrap(),
            Grid(vec![0.0, 0.25, 0.5, 0.75, 1.0])
        );
        assert_eq!(parse_grid("2:3:1").unwrap(), Grid(vec![2.0]));
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("0:1:0").is_err());
        assert!(parse_grid("[]").is_err());
        assert!(parse_grid("a:b:c").is_err());
    }
}
