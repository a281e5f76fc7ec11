use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A value lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The linearized cavity response is singular or unstable at this sideband.
    #[error("threshold singularity at omega = {omega} rad/s (denominator {denominator:e})")]
    ThresholdSingularity { omega: f64, denominator: f64 },

    /// A formula denominator vanished outside the cavity solver.
    #[error("singularity: {0}")]
    Singular(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("input error: {0}")]
    Input(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }

    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Io(_) => 2,
            Error::Parse { .. } => 3,
            Error::Domain(_) | Error::Singular(_) | Error::Input(_) => 4,
            Error::ThresholdSingularity { .. } => 5,
        }
    }

    /// Short machine-readable category name.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::ThresholdSingularity { .. } => "threshold_singularity",
            Error::Singular(_) => "singularity",
            Error::Config(_) => "config",
            Error::Parse { .. } => "parse",
            Error::Input(_) => "input",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
