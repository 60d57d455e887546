//! Command-line front end.
//!
//! One evaluation per invocation, or one per line of a batch file. Batch
//! lines read `command,key=value,...`, e.g. `cdf-central,a=1,x=2.5` or
//! `cdf-noncentral,kind=chi-square,mu=4,x=1,y=3`. Results are written as
//! `key=value` pairs in scientific notation.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::{Error, Routine, Status};
use crate::{DistributionKind, InversionTarget, ProbabilityPair};

pub const EXIT_USAGE: i32 = 64;
pub const EXIT_NO_INPUT: i32 = 66;

#[derive(Debug, Parser)]
#[command(
    name = "ncgamma",
    version,
    about = "Central and noncentral gamma / chi-square distributions"
)]
pub struct Cli {
    /// Parameterisation of the distribution arguments.
    #[arg(long, global = true, value_enum, default_value_t = KindArg::Gamma)]
    pub kind: KindArg,
    /// Significant digits in the output.
    #[arg(long, global = true, default_value_t = 17, value_parser = clap::value_parser!(u32).range(1..=40))]
    pub digits: u32,
    /// Read one request per line from this file (`-` for stdin).
    #[arg(long, value_name = "PATH")]
    pub batch: Option<String>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Gamma,
    ChiSquare,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TargetArg {
    /// Noncentrality x at fixed y.
    X,
    /// Quantile y at fixed x.
    Y,
}

fn finite(s: &str) -> Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("`{s}` is not a finite number")),
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// P(a, x) and Q(a, x).
    CdfCentral {
        #[arg(long, value_parser = finite, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, value_parser = finite, allow_hyphen_values = true)]
        x: f64,
    },
    /// x with P(a, x) = p, Q(a, x) = q.
    InvCentral {
        #[arg(long, value_parser = finite, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, value_parser = finite, allow_hyphen_values = true)]
        p: Option<f64>,
        #[arg(long, value_parser = finite, allow_hyphen_values = true)]
        q: Option<f64>,
    },
    /// P_mu(x, y) and Q_mu(x, y).
    CdfNoncentral {
        #[arg(long, value_parser = finite, allow_hyphen_values = true)]
        mu: f64,
        #[arg(long, value_parser = finite, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, value_parser = finite, allow_hyphen_values = true)]
        y: f64,
    },
    /// Noncentrality x (given y) or quantile y (given x) of the noncentral distribution.
    InvNoncentral {
        #[arg(long, value_enum)]
        target: TargetArg,
        #[arg(long, value_parser = finite, allow_hyphen_values = true)]
        mu: f64,
        #[arg(long, value_parser = finite, allow_hyphen_values = true)]
        p: Option<f64>,
        #[arg(long, value_parser = finite, allow_hyphen_values = true)]
        q: Option<f64>,
        #[arg(long, value_parser = finite, allow_hyphen_values = true)]
        x: Option<f64>,
        #[arg(long, value_parser = finite, allow_hyphen_values = true)]
        y: Option<f64>,
    },
    Erf {
        #[arg(long, value_parser = finite, allow_hyphen_values = true)]
        x: f64,
    },
    Erfc {
        #[arg(long, value_parser = finite, allow_hyphen_values = true)]
        x: f64,
    },
    /// exp(x^2) erfc(x).
    ErfcScaled {
        #[arg(long, value_parser = finite, allow_hyphen_values = true)]
        x: f64,
    },
    Inverfc {
        #[arg(long, value_parser = finite, allow_hyphen_values = true)]
        y: f64,
    },
    NormalCdf {
        #[arg(long, value_parser = finite, allow_hyphen_values = true)]
        x: f64,
    },
    NormalQuantile {
        #[arg(long, value_parser = finite, allow_hyphen_values = true)]
        p: f64,
    },
    Gamma {
        #[arg(long, value_parser = finite, allow_hyphen_values = true)]
        x: f64,
    },
    Loggam {
        #[arg(long, value_parser = finite, allow_hyphen_values = true)]
        x: f64,
    },
    Gamstar {
        #[arg(long, value_parser = finite, allow_hyphen_values = true)]
        x: f64,
    },
    /// Gamma(x) / Gamma(y).
    Quotgamm {
        #[arg(long, value_parser = finite, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, value_parser = finite, allow_hyphen_values = true)]
        y: f64,
    },
}

/// Result of one evaluation: the stdout line, its ierr and an optional
/// diagnostic for stderr.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub line: String,
    pub ierr: i32,
    pub diagnostic: Option<String>,
}

impl Outcome {
    fn usage(msg: impl Into<String>) -> Self {
        Outcome {
            line: format!("ierr={EXIT_USAGE}"),
            ierr: EXIT_USAGE,
            diagnostic: Some(msg.into()),
        }
    }

    fn failed(routine: Routine, e: &Error) -> Self {
        let ierr = routine.ierr(e.status());
        Outcome {
            line: format!("ierr={ierr}"),
            ierr,
            diagnostic: Some(e.to_string()),
        }
    }
}

/// Scientific notation with `digits` significant digits: the shortest
/// round-trip digits, zero-padded, or rounded when `digits` is smaller.
pub fn format_value(v: f64, digits: u32) -> String {
    let digits = digits.max(1) as usize;
    let shortest = format!("{v:e}");
    let (mantissa, exp) = shortest.split_once('e').unwrap_or((&shortest, "0"));
    let sig = mantissa.chars().filter(char::is_ascii_digit).count();
    if !v.is_finite() || sig > digits {
        return format!("{:.*e}", digits - 1, v);
    }
    let mut m = mantissa.to_string();
    if digits > 1 && !m.contains('.') {
        m.push('.');
    }
    m.extend(std::iter::repeat_n('0', digits - sig));
    format!("{m}e{exp}")
}

fn kind_of(k: KindArg) -> DistributionKind {
    match k {
        KindArg::Gamma => DistributionKind::Gamma,
        KindArg::ChiSquare => DistributionKind::ChiSquare,
    }
}

fn pair_line(pair: ProbabilityPair, ierr: i32, digits: u32) -> String {
    format!(
        "p={} q={} ierr={ierr}",
        format_value(pair.p, digits),
        format_value(pair.q, digits)
    )
}

fn cdf_outcome(routine: Routine, r: crate::Result<ProbabilityPair>, digits: u32) -> Outcome {
    match r {
        Ok(pair) => Outcome {
            line: pair_line(pair, 0, digits),
            ierr: 0,
            diagnostic: None,
        },
        Err(e) => match &e {
            Error::OverflowUnderflow { pair: Some(pair), .. } => {
                let ierr = routine.ierr(Status::OverflowUnderflow);
                Outcome {
                    line: pair_line(*pair, ierr, digits),
                    ierr,
                    diagnostic: Some(e.to_string()),
                }
            }
            _ => Outcome::failed(routine, &e),
        },
    }
}

fn inv_outcome(routine: Routine, r: crate::Result<f64>, digits: u32) -> Outcome {
    match r {
        Ok(x) => Outcome {
            line: format!("x={} ierr=0", format_value(x, digits)),
            ierr: 0,
            diagnostic: None,
        },
        Err(e) => Outcome::failed(routine, &e),
    }
}

fn scalar_outcome(r: crate::Result<f64>, digits: u32) -> Outcome {
    match r {
        Ok(v) => Outcome {
            line: format!("value={}", format_value(v, digits)),
            ierr: 0,
            diagnostic: None,
        },
        Err(e) => Outcome::failed(Routine::Scalar, &e),
    }
}

// Missing tail filled in as the complement of the given one.
fn tails(p: Option<f64>, q: Option<f64>) -> Result<(f64, f64), String> {
    match (p, q) {
        (Some(p), Some(q)) => Ok((p, q)),
        (Some(p), None) => Ok((p, 1.0 - p)),
        (None, Some(q)) => Ok((1.0 - q, q)),
        (None, None) => Err("one of --p, --q is required".into()),
    }
}

/// Evaluates one request.
pub fn evaluate(command: &Command, kind: KindArg, digits: u32) -> Outcome {
    let kind = kind_of(kind);
    match *command {
        Command::CdfCentral { a, x } => cdf_outcome(Routine::CdfCentral, crate::cdf_central(kind, a, x), digits),
        Command::InvCentral { a, p, q } => match tails(p, q) {
            Ok((p, q)) => inv_outcome(Routine::InvCentral, crate::inv_central(kind, a, p, q), digits),
            Err(m) => Outcome::usage(m),
        },
        Command::CdfNoncentral { mu, x, y } => {
            cdf_outcome(Routine::CdfNoncentral, crate::cdf_noncentral(kind, mu, x, y), digits)
        }
        Command::InvNoncentral { target, mu, p, q, x, y } => {
            let (p, q) = match tails(p, q) {
                Ok(t) => t,
                Err(m) => return Outcome::usage(m),
            };
            let (target, fixed) = match (target, x, y) {
                (TargetArg::X, None, Some(y)) => (InversionTarget::Noncentrality, y),
                (TargetArg::Y, Some(x), None) => (InversionTarget::Quantile, x),
                (TargetArg::X, _, _) => return Outcome::usage("--target x takes --y and no --x"),
                (TargetArg::Y, _, _) => return Outcome::usage("--target y takes --x and no --y"),
            };
            inv_outcome(
                Routine::InvNoncentral,
                crate::inv_noncentral(kind, target, mu, p, q, fixed),
                digits,
            )
        }
        Command::Erf { x } => scalar_outcome(Ok(crate::erf(x)), digits),
        Command::Erfc { x } => scalar_outcome(Ok(crate::erfc(x)), digits),
        Command::ErfcScaled { x } => scalar_outcome(crate::erfc_scaled(x), digits),
        Command::Inverfc { y } => inv_outcome(Routine::Scalar, crate::inverfc(y), digits),
        Command::NormalCdf { x } => cdf_outcome(Routine::Scalar, Ok(crate::normal_cdf(x)), digits),
        Command::NormalQuantile { p } => inv_outcome(Routine::Scalar, crate::normal_quantile(p), digits),
        Command::Gamma { x } => scalar_outcome(crate::gammafun(x), digits),
        Command::Loggam { x } => scalar_outcome(crate::loggam(x), digits),
        Command::Gamstar { x } => scalar_outcome(crate::gamstar(x), digits),
        Command::Quotgamm { x, y } => scalar_outcome(crate::quotgamm(x, y), digits),
    }
}

/// Turns `command,key=value,...` into an argument vector.
fn batch_args(line: &str) -> Result<Vec<String>, String> {
    let mut parts = line.split(',').map(str::trim);
    let command = parts.next().filter(|c| !c.is_empty()).ok_or("empty command")?;
    let mut args = vec!["ncgamma".to_string(), command.to_string()];
    for tok in parts {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| format!("token `{tok}` is not key=value"))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || k == "batch" {
            return Err(format!("invalid key in `{tok}`"));
        }
        args.push(format!("--{k}"));
        args.push(v.to_string());
    }
    Ok(args)
}

/// Evaluates one batch line.
pub fn evaluate_line(line: &str) -> Outcome {
    let args = match batch_args(line) {
        Ok(a) => a,
        Err(m) => return Outcome::usage(m),
    };
    match Cli::try_parse_from(args) {
        Ok(Cli {
            kind,
            digits,
            command: Some(cmd),
            ..
        }) => evaluate(&cmd, kind, digits),
        Ok(_) => Outcome::usage("missing command"),
        Err(e) => Outcome::usage(e.to_string().lines().next().unwrap_or("parse error").to_string()),
    }
}

fn run_batch(reader: impl BufRead, out: &mut impl Write, err: &mut impl Write) -> io::Result<i32> {
    let mut exit = 0;
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let o = evaluate_line(&line);
        writeln!(out, "{}", o.line)?;
        if let Some(d) = &o.diagnostic {
            writeln!(err, "line {}: {d}", n + 1)?;
        }
        if exit == 0 {
            exit = o.ierr;
        }
    }
    Ok(exit)
}

/// Runs the front end on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let _ = write!(err, "{e}");
            return EXIT_USAGE;
        }
    };
    let result = match (&cli.batch, &cli.command) {
        (Some(_), Some(_)) => {
            let _ = writeln!(err, "--batch cannot be combined with a command");
            return EXIT_USAGE;
        }
        (Some(path), None) => {
            let reader: Box<dyn BufRead> = if path == "-" {
                Box::new(BufReader::new(io::stdin()))
            } else {
                match File::open(path) {
                    Ok(f) => Box::new(BufReader::new(f)),
                    Err(e) => {
                        let _ = writeln!(err, "cannot read {path}: {e}");
                        return EXIT_NO_INPUT;
                    }
                }
            };
            run_batch(reader, out, err)
        }
        (None, Some(cmd)) => {
            let o = evaluate(cmd, cli.kind, cli.digits);
            (|| {
                writeln!(out, "{}", o.line)?;
                if let Some(d) = &o.diagnostic {
                    writeln!(err, "{d}")?;
                }
                Ok(o.ierr)
            })()
        }
        (None, None) => {
            let _ = writeln!(err, "a command or --batch is required (see --help)");
            return EXIT_USAGE;
        }
    };
    result.unwrap_or_else(|e| {
        let _ = writeln!(err, "{e}");
        EXIT_NO_INPUT
    })
}
