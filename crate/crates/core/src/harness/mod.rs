//! Command-line orchestration: experiment specs, runs and reports.

mod cli;
mod experiments;
mod report;

use num_bigint::BigInt;

use crate::precision::Real;

pub use cli::{parse_cli, Parsed};
pub use experiments::run_experiment;
pub use report::{Check, Outcome, RunReport, Table, SCHEMA_VERSION};

/// Fixed runs with every parameter pinned.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Named {
    Sec3Diophantine,
    Sec3Contfrac,
    Sec5FloatSieve,
    Sec5IntSieve,
    KexDemo,
}

impl Named {
    pub const ALL: [Named; 5] = [
        Named::Sec3Diophantine,
        Named::Sec3Contfrac,
        Named::Sec5FloatSieve,
        Named::Sec5IntSieve,
        Named::KexDemo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Named::Sec3Diophantine => "sec3-diophantine",
            Named::Sec3Contfrac => "sec3-contfrac",
            Named::Sec5FloatSieve => "sec5-float-sieve",
            Named::Sec5IntSieve => "sec5-int-sieve",
            Named::KexDemo => "kex-demo",
        }
    }

    pub fn from_name(s: &str) -> Option<Named> {
        Named::ALL.into_iter().find(|n| n.name() == s)
    }
}

/// What a custom run does.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Task {
    Diophantine,
    ContFrac,
    FloatSieve,
    IntSieve,
    Kex,
    Bench,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Diophantine => "diophantine",
            Task::ContFrac => "contfrac",
            Task::FloatSieve => "sieve",
            Task::IntSieve => "int-sieve",
            Task::Kex => "kex",
            Task::Bench => "bench",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    Named(Named),
    Custom(Task),
}

impl Experiment {
    pub fn name(&self) -> String {
        match self {
            Experiment::Named(n) => n.name().to_string(),
            Experiment::Custom(t) => format!("custom-{}", t.name()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Structured,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExperimentSpec {
    pub experiment: Experiment,
    pub digits: Option<u64>,
    pub x: Option<Real>,
    /// The true secret: forces key generation, or turns an attack into an oracle run.
    pub r: Option<BigInt>,
    pub tr: Option<Real>,
    pub r_range: Option<(BigInt, BigInt)>,
    pub m: Option<u32>,
    pub match_digits: Option<u64>,
    pub comp: Option<BigInt>,
    pub modulus: Option<BigInt>,
    pub seed: Option<u64>,
    pub chunks: Option<usize>,
    pub format: Format,
    pub export_secrets: bool,
}

impl ExperimentSpec {
    pub fn named(n: Named) -> Self {
        ExperimentSpec {
            experiment: Experiment::Named(n),
            digits: None,
            x: None,
            r: None,
            tr: None,
            r_range: None,
            m: None,
            match_digits: None,
            comp: None,
            modulus: None,
            seed: None,
            chunks: None,
            format: Format::Text,
            export_secrets: false,
        }
    }

    pub fn custom(t: Task) -> Self {
        ExperimentSpec {
            experiment: Experiment::Custom(t),
            ..Self::named(Named::KexDemo)
        }
    }

    pub fn render(&self, report: &RunReport) -> String {
        match self.format {
            Format::Text => report.render_text(),
            Format::Structured => report.render_structured(true),
        }
    }
}
