use thiserror::Error;

use crate::eval::{load, run, LineSource, Outcome, RunError, RunResult};
use crate::syntax::{Expr, SyntaxError};
use crate::trace::{compose_display, DisplayTrace, ElisionPolicy};

pub const EXIT_VALUE: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_EXCEPTION: i32 = 2;
pub const EXIT_LIMIT: i32 = 3;

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{line}:{column}: {error}")]
    Syntax {
        line: usize,
        column: usize,
        error: SyntaxError,
    },
    #[error(transparent)]
    Runtime(#[from] RunError),
    #[error("{0}")]
    Usage(String),
}

/// 1-based line and column of character offset `offset`.
pub fn line_column(source: &str, offset: usize) -> (usize, usize) {
    let mut line = 1;
    let mut column = 1;
    for c in source.chars().take(offset) {
        if c == '\n' {
            line += 1;
            column = 1;
        } else {
            column += 1;
        }
    }
    (line, column)
}

/// A program together with its completed run.
#[derive(Debug, Clone)]
pub struct Session {
    pub source: String,
    pub program: Expr,
    pub result: RunResult,
}

impl Session {
    pub fn new(source: &str, input: &mut dyn LineSource, max_steps: usize) -> Result<Session, SessionError> {
        let program = load(source).map_err(|error| {
            let (line, column) = line_column(source, error.offset());
            SessionError::Syntax { line, column, error }
        })?;
        let result = run(&program, input, max_steps)?;
        Ok(Session {
            source: source.to_string(),
            program,
            result,
        })
    }

    pub fn compose(&self, policy: &ElisionPolicy) -> DisplayTrace {
        compose_display(&self.result.trace, policy)
    }

    pub fn exit_code(&self) -> i32 {
        match self.result.outcome {
            Outcome::Value(_) => EXIT_VALUE,
            Outcome::UncaughtException(_) => EXIT_EXCEPTION,
            Outcome::StepLimitExceeded => EXIT_LIMIT,
        }
    }
}

pub fn read_file(path: &std::path::Path) -> Result<String, SessionError> {
    std::fs::read_to_string(path).map_err(|source| SessionError::Io {
        path: path.display().to_string(),
        source,
    })
}
