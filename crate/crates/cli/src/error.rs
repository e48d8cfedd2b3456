use std::fmt;
use std::process::ExitCode;

/// A failed run, classified by exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, configuration or run directory: exit 2.
    Config(String),
    /// Blow-up of a single (non-ensemble) evolution: exit 3.
    Numerical(String),
    /// Reading or writing files failed: exit 1.
    Io(String),
}

impl Failure {
    pub fn config(msg: impl Into<String>) -> Self {
        Failure::Config(msg.into())
    }

    pub fn io(context: impl fmt::Display, err: std::io::Error) -> Self {
        Failure::Io(format!("{context}: {err}"))
    }

    pub fn from_core(err: nlslab_core::Error) -> Self {
        if err.is_numerical_failure() {
            Failure::Numerical(err.to_string())
        } else {
            Failure::Config(err.to_string())
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            Failure::Io(_) => 1,
            Failure::Config(_) => 2,
            Failure::Numerical(_) => 3,
        })
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "configuration error: {m}"),
            Failure::Numerical(m) => write!(f, "numerical failure: {m}"),
            Failure::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<nlslab_core::Error> for Failure {
    fn from(err: nlslab_core::Error) -> Self {
        Failure::from_core(err)
    }
}
