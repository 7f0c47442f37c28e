//! Small-step call-by-value evaluation with a full record of every rewrite.

mod input;
mod machine;
pub mod oracle;
mod scope;
mod stdlib;
mod store;

pub use input::{LineSource, ReaderInput, ScriptedInput};
pub use machine::{
    is_value, map_backward, map_forward, EvalError, Machine, MicroStep, MicroTrace, Outcome,
    Rewrite, RunError, RunResult, StepKind, DEFAULT_MAX_STEPS,
};
pub use stdlib::{bind_channels, Prelude, IN_CHANNEL, OUT_CHANNEL};
pub use store::Store;

use crate::syntax::{parse_program_str, Expr, SyntaxError};

/// Parses user source and binds `stdin`/`stdout` to the channel values.
pub fn load(source: &str) -> Result<Expr, SyntaxError> {
    let program = parse_program_str(source)?;
    Ok(bind_channels(&program.expr))
}

/// Runs `program` on the standard prelude.
pub fn run(program: &Expr, input: &mut dyn LineSource, max_steps: usize) -> Result<RunResult, RunError> {
    Machine::standard().run(program, input, max_steps)
}

pub fn find_redex(e: &Expr, store: &Store) -> Result<Option<(crate::syntax::Path, StepKind)>, EvalError> {
    Machine::standard().find_redex(e, store)
}
