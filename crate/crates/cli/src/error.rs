use std::fmt;

/// Failure of a CLI invocation, reported as `ERROR <code>: <detail>`.
#[derive(Debug)]
pub enum CliError {
    Core(nullsim::Error),
    Parse(String),
    Io(String),
    Usage(String),
    OutputExists(String),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.code(),
            CliError::Parse(_) => "ParseError",
            CliError::Io(_) => "IoError",
            CliError::Usage(_) => "UsageError",
            CliError::OutputExists(_) => "OutputExists",
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Parse(m) | CliError::Io(m) | CliError::Usage(m) => f.write_str(m),
            CliError::OutputExists(p) => write!(f, "refusing to overwrite existing file {p}"),
        }
    }
}

impl From<nullsim::Error> for CliError {
    fn from(e: nullsim::Error) -> Self {
        CliError::Core(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;
