//! Exit-code classification: 2 for bad input, 1 for everything else.

use std::fmt::Display;

#[derive(Debug)]
pub enum Failure {
    BadInput(anyhow::Error),
    Internal(anyhow::Error),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::BadInput(_) => 2,
            Failure::Internal(_) => 1,
        }
    }

    pub fn error(&self) -> &anyhow::Error {
        match self {
            Failure::BadInput(e) | Failure::Internal(e) => e,
        }
    }

    pub fn bad_input(message: impl Display + Send + Sync + 'static) -> Self {
        Failure::BadInput(anyhow::anyhow!("{message}"))
    }
}

pub type CliResult<T = ()> = Result<T, Failure>;

/// Tags a fallible call with the exit code its error should produce.
pub trait Classify<T> {
    fn bad_input(self) -> CliResult<T>;
    fn internal(self) -> CliResult<T>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn bad_input(self) -> CliResult<T> {
        self.map_err(|e| Failure::BadInput(e.into()))
    }

    fn internal(self) -> CliResult<T> {
        self.map_err(|e| Failure::Internal(e.into()))
    }
}
