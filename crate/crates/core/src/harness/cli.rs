use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_traits::Signed;

use super::{Experiment, ExperimentSpec, Format, Named, Task};
use crate::error::{Error, Result};
use crate::precision::{pow10, Real};

#[derive(Parser, Debug)]
#[command(
    name = "qrke-lab",
    version,
    about = "Chebyshev key exchange over high-precision reals, and attacks on it"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a named experiment with all parameters fixed.
    Reproduce(Flags),
    /// Attack a public value.
    Attack {
        #[arg(value_enum)]
        method: Method,
        #[command(flatten)]
        flags: Flags,
    },
    /// Generate a key pair and the shared secret.
    Kex(Flags),
    /// Time the decimal and modular sieves against each other.
    Bench(Flags),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Method {
    Diophantine,
    Contfrac,
    Sieve,
    IntSieve,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FormatArg {
    Text,
    Structured,
}

#[derive(Args, Debug)]
struct Flags {
    #[arg(long)]
    experiment: Option<String>,
    #[arg(long)]
    digits: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    #[arg(long)]
    r: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    tr: Option<String>,
    /// LO:HI, each a plain integer or shorthand such as 1e8.
    #[arg(long)]
    r_range: Option<String>,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    match_digits: Option<u64>,
    #[arg(long)]
    comp: Option<String>,
    #[arg(long)]
    modulus: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    chunks: Option<usize>,
    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,
    #[arg(long)]
    insecure_export_secrets: bool,
}

/// What the command line asked for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Parsed {
    Run(Box<ExperimentSpec>),
    /// `--help` or `--version`: print and exit successfully.
    Info(String),
}

/// Parse `args` (without the program name).
pub fn parse_cli<I, S>(args: I) -> Result<Parsed>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv = std::iter::once("qrke-lab".to_string()).chain(args.into_iter().map(Into::into));
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            return Ok(Parsed::Info(e.to_string()));
        }
        Err(e) => return Err(Error::Usage(e.to_string())),
    };
    let spec = match cli.command {
        Command::Reproduce(flags) => reproduce(flags)?,
        Command::Attack { method, flags } => {
            let task = match method {
                Method::Diophantine => Task::Diophantine,
                Method::Contfrac => Task::ContFrac,
                Method::Sieve => Task::FloatSieve,
                Method::IntSieve => Task::IntSieve,
            };
            custom(task, flags)?
        }
        Command::Kex(flags) => custom(Task::Kex, flags)?,
        Command::Bench(flags) => custom(Task::Bench, flags)?,
    };
    Ok(Parsed::Run(Box::new(spec)))
}

fn reproduce(flags: Flags) -> Result<ExperimentSpec> {
    let name = flags
        .experiment
        .as_deref()
        .ok_or_else(|| Error::Usage("reproduce needs --experiment NAME".into()))?;
    let named = Named::from_name(name).ok_or_else(|| {
        let known: Vec<_> = Named::ALL.iter().map(|n| n.name()).collect();
        Error::Usage(format!(
            "unknown experiment '{name}' (known: {})",
            known.join(", ")
        ))
    })?;
    let pinned = [
        ("--digits", flags.digits.is_some()),
        ("--x", flags.x.is_some()),
        ("--r", flags.r.is_some()),
        ("--tr", flags.tr.is_some()),
        ("--r-range", flags.r_range.is_some()),
        ("--m", flags.m.is_some()),
        ("--match-digits", flags.match_digits.is_some()),
        ("--comp", flags.comp.is_some()),
        ("--modulus", flags.modulus.is_some()),
    ];
    if let Some((flag, _)) = pinned.iter().find(|(_, set)| *set) {
        return Err(Error::Usage(format!(
            "{flag} is fixed by experiment '{name}'"
        )));
    }
    if flags.seed.is_some() && named != Named::KexDemo {
        return Err(Error::Usage(format!(
            "--seed only applies to {}",
            Named::KexDemo.name()
        )));
    }
    let mut spec = ExperimentSpec::named(named);
    spec.seed = flags.seed;
    spec.chunks = flags.chunks;
    spec.format = format(flags.format);
    spec.export_secrets = flags.insecure_export_secrets;
    Ok(spec)
}

fn custom(task: Task, flags: Flags) -> Result<ExperimentSpec> {
    if let Some(name) = flags.experiment {
        return Err(Error::Usage(format!(
            "--experiment {name} only applies to reproduce"
        )));
    }
    let spec = ExperimentSpec {
        experiment: Experiment::Custom(task),
        digits: flags.digits,
        x: flags.x.as_deref().map(|s| decimal("--x", s)).transpose()?,
        r: flags.r.as_deref().map(|s| integer("--r", s)).transpose()?,
        tr: flags
            .tr
            .as_deref()
            .map(|s| decimal("--tr", s))
            .transpose()?,
        r_range: flags.r_range.as_deref().map(range).transpose()?,
        m: flags.m,
        match_digits: flags.match_digits,
        comp: flags
            .comp
            .as_deref()
            .map(|s| integer("--comp", s))
            .transpose()?,
        modulus: flags
            .modulus
            .as_deref()
            .map(|s| integer("--modulus", s))
            .transpose()?,
        seed: flags.seed,
        chunks: flags.chunks,
        format: format(flags.format),
        export_secrets: flags.insecure_export_secrets,
    };
    let missing = |flag: &str, present: bool| {
        if present {
            Ok(())
        } else {
            Err(Error::Usage(format!("{} needs {flag}", task.name())))
        }
    };
    missing("--digits", spec.digits.is_some())?;
    missing("--x", spec.x.is_some())?;
    missing("--r-range", spec.r_range.is_some())?;
    match task {
        Task::Kex => missing("--seed or --r", spec.seed.is_some() || spec.r.is_some())?,
        _ => missing("--tr", spec.tr.is_some())?,
    }
    match task {
        Task::Diophantine | Task::Bench => missing("--m", spec.m.is_some())?,
        Task::IntSieve => {
            missing(
                "--m or --modulus",
                spec.m.is_some() || spec.modulus.is_some(),
            )?;
            missing("--comp", spec.comp.is_some())?;
        }
        _ => {}
    }
    if spec.m.is_some() && spec.modulus.is_some() {
        return Err(Error::Usage(
            "give either --m or --modulus, not both".into(),
        ));
    }
    Ok(spec)
}

fn format(f: FormatArg) -> Format {
    match f {
        FormatArg::Text => Format::Text,
        FormatArg::Structured => Format::Structured,
    }
}

fn decimal(flag: &str, s: &str) -> Result<Real> {
    s.parse()
        .map_err(|_| Error::Usage(format!("{flag}: malformed decimal '{s}'")))
}

fn integer(flag: &str, s: &str) -> Result<BigInt> {
    s.parse()
        .map_err(|_| Error::Usage(format!("{flag}: malformed integer '{s}'")))
}

/// A range bound: a plain integer or `MANTISSAeEXP` denoting an integer.
fn bound(s: &str) -> Result<BigInt> {
    let bad = || Error::Usage(format!("--r-range: malformed bound '{s}'"));
    let Some((mant, exp)) = s.split_once(['e', 'E']) else {
        return integer("--r-range", s);
    };
    let mant: Real = mant.parse().map_err(|_| bad())?;
    let exp: u64 = exp.parse().map_err(|_| bad())?;
    let v = &mant * &Real::from_integer(pow10(exp));
    if Real::from_integer(v.floor()) != v {
        return Err(bad());
    }
    Ok(v.floor())
}

fn range(s: &str) -> Result<(BigInt, BigInt)> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| Error::Usage(format!("--r-range: expected LO:HI, got '{s}'")))?;
    let (lo, hi) = (bound(lo)?, bound(hi)?);
    if lo.is_negative() || lo >= hi {
        return Err(Error::Usage(format!(
            "--r-range: need 0 <= LO < HI, got {lo}:{hi}"
        )));
    }
    Ok((lo, hi))
}
