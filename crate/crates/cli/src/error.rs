//! Error classification and exit codes.
//!
//! Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical
//! degeneracy. Every failure prints one machine-parseable line to stderr:
//! `error[CODE]: message`.

use std::fmt;

use crease_core::ca::CaError;
use crease_core::corpus::CorpusError;
use crease_core::lexicon::LexiconError;
use crease_core::report::PlotError;
use crease_core::rules::RuleError;
use crease_core::similarity::TsneError;
use crease_core::validation::ValidationError;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Degenerate(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        CliError::Data(msg.into())
    }

    pub fn degenerate(msg: impl Into<String>) -> Self {
        CliError::Degenerate(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Degenerate(_) => 4,
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "USAGE",
            CliError::Data(_) => "DATA",
            CliError::Degenerate(_) => "DEGENERATE",
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(msg) | CliError::Data(msg) | CliError::Degenerate(msg) => msg,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // One line, machine parseable.
        let flat = self.message().replace('\n', "; ");
        write!(f, "error[{}]: {}", self.code(), flat)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<LexiconError> for CliError {
    fn from(e: LexiconError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<CaError> for CliError {
    fn from(e: CaError) -> Self {
        CliError::Degenerate(e.to_string())
    }
}

impl From<RuleError> for CliError {
    fn from(e: RuleError) -> Self {
        CliError::Degenerate(e.to_string())
    }
}

impl From<TsneError> for CliError {
    fn from(e: TsneError) -> Self {
        CliError::Degenerate(e.to_string())
    }
}

impl From<PlotError> for CliError {
    fn from(e: PlotError) -> Self {
        CliError::Degenerate(e.to_string())
    }
}

impl From<ValidationError> for CliError {
    fn from(e: ValidationError) -> Self {
        match e {
            ValidationError::Corpus(inner) => CliError::Data(inner.to_string()),
            other => CliError::Degenerate(other.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Data(e.to_string())
    }
}
