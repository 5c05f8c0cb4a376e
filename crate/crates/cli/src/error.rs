use posdef_core::bodies::BodyError;
use posdef_core::criteria::CriteriaError;
use posdef_core::numerics::NumericsError;
use posdef_core::profiles::ProfileError;
use posdef_core::transforms::TransformError;
use thiserror::Error;

/// Exit code for malformed input or out-of-range parameters.
pub const EXIT_USAGE: i32 = 64;
/// Exit code for numerical failure or non-convergence.
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Usage(_) | CliError::Io { .. } => EXIT_USAGE,
        }
    }

    pub fn io(path: &str, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_string(), source }
    }
}

impl From<NumericsError> for CliError {
    fn from(e: NumericsError) -> Self {
        match e {
            NumericsError::InvalidArgument(_) | NumericsError::InvalidInterval { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<ProfileError> for CliError {
    fn from(e: ProfileError) -> Self {
        match e {
            ProfileError::Numerics(n) => n.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<BodyError> for CliError {
    fn from(e: BodyError) -> Self {
        match e {
            BodyError::Numerics(n) => n.into(),
            BodyError::LowAcceptance { .. } => CliError::Numerical(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<TransformError> for CliError {
    fn from(e: TransformError) -> Self {
        match e {
            TransformError::Numerics(n) => n.into(),
            TransformError::Profile(p) => p.into(),
            TransformError::Body(b) => b.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<CriteriaError> for CliError {
    fn from(e: CriteriaError) -> Self {
        match e {
            CriteriaError::Transform(t) => t.into(),
            CriteriaError::Profile(p) => p.into(),
            CriteriaError::Body(b) => b.into(),
            CriteriaError::Numerics(n) => n.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}
