//! Error model for the command line: every failure is classified into one
//! of three categories that map onto exit codes, and printed as a single
//! machine-parsable line `error: <category>/<Kind>: <message>`.

use std::fmt;

use volcorr::corr::CorrError;
use volcorr::garchx::GarchError;
use volcorr::ingest::IngestError;
use volcorr::scaling::ScalingError;
use volcorr::series::SeriesError;
use volcorr::tails::TailsError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    /// Unusable input: missing files, unparsable data, bad flag values.
    Input,
    /// Input was fine but a method precondition failed (too short, sign
    /// crossing, not enough exceedances, ...).
    Method,
    /// Our own failures: writing output, serialization.
    Internal,
}

impl Category {
    pub fn exit_code(self) -> i32 {
        match self {
            Category::Input => 2,
            Category::Method => 3,
            Category::Internal => 4,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Category::Input => "input",
            Category::Method => "method",
            Category::Internal => "internal",
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub category: Category,
    /// Stable identifier, usually the library error variant name.
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    pub fn input(kind: &'static str, message: impl Into<String>) -> Self {
        Self { category: Category::Input, kind, message: message.into() }
    }

    pub fn method(kind: &'static str, message: impl Into<String>) -> Self {
        Self { category: Category::Method, kind, message: message.into() }
    }

    pub fn internal(kind: &'static str, message: impl Into<String>) -> Self {
        Self { category: Category::Internal, kind, message: message.into() }
    }

    /// The display line without its `error: ` prefix, for embedding in
    /// structured output.
    pub fn detail(&self) -> String {
        format!("{}/{}: {}", self.category.label(), self.kind, self.message)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error: {}", self.detail())
    }
}

impl std::error::Error for CliError {}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        let kind = match &e {
            IngestError::MalformedHeader(_) => "MalformedHeader",
            IngestError::EmptySeries(_) => "EmptySeries",
            IngestError::DuplicateDate(_) => "DuplicateDate",
        };
        CliError::input(kind, e.to_string())
    }
}

impl From<SeriesError> for CliError {
    fn from(e: SeriesError) -> Self {
        CliError::method("DegenerateSeries", e.to_string())
    }
}

impl From<CorrError> for CliError {
    fn from(e: CorrError) -> Self {
        let kind = match &e {
            CorrError::SeriesTooShort { .. } => "SeriesTooShort",
            CorrError::LengthMismatch { .. } => "LengthMismatch",
            CorrError::ZeroVariance { .. } => "ZeroVariance",
            CorrError::InvalidLevel(_) => "InvalidLevel",
        };
        CliError::method(kind, e.to_string())
    }
}

impl From<ScalingError> for CliError {
    fn from(e: ScalingError) -> Self {
        let kind = match &e {
            ScalingError::LengthMismatch { .. } => "LengthMismatch",
            ScalingError::WindowTooSmall { .. } => "WindowTooSmall",
            ScalingError::WindowTooLarge { .. } => "WindowTooLarge",
            ScalingError::EmptyGrid => "EmptyGrid",
            ScalingError::InsufficientPoints { .. } => "InsufficientPoints",
            ScalingError::SignCrossing => "SignCrossing",
        };
        CliError::method(kind, e.to_string())
    }
}

impl From<TailsError> for CliError {
    fn from(e: TailsError) -> Self {
        let kind = match &e {
            TailsError::NonpositiveValue => "NonpositiveValue",
            TailsError::TailTooSmall(_) => "TailTooSmall",
            TailsError::TailTooLarge { .. } => "TailTooLarge",
            TailsError::DegenerateTail => "DegenerateTail",
            TailsError::InsufficientExceedances { .. } => "InsufficientExceedances",
            TailsError::InsufficientPoints { .. } => "InsufficientPoints",
            TailsError::SparseTail { .. } => "SparseTail",
            TailsError::BadRange => "BadRange",
        };
        CliError::method(kind, e.to_string())
    }
}

impl From<GarchError> for CliError {
    fn from(e: GarchError) -> Self {
        match &e {
            GarchError::InvalidParams(_) => CliError::input("InvalidParams", e.to_string()),
            GarchError::NoPositiveSolution => CliError::method("NoPositiveSolution", e.to_string()),
        }
    }
}
