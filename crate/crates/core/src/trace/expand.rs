use thiserror::Error;

use crate::eval::{MicroTrace, StepKind};
use crate::syntax::{pretty, Span};

use super::compose::DisplayTrace;

/// A single micro-step printed in full.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MicroView {
    pub index: usize,
    pub kind: StepKind,
    pub before: String,
    /// Span of the redex within `before`.
    pub redex: Span,
    pub after: String,
    pub stdout: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("no display step {index} (trace has {len})")]
pub struct StepOutOfRange {
    pub index: usize,
    pub len: usize,
}

/// The micro-steps merged into display step `index`, without any elision.
pub fn expand(trace: &MicroTrace, display: &DisplayTrace, index: usize) -> Result<Vec<MicroView>, StepOutOfRange> {
    let step = display.steps.get(index).ok_or(StepOutOfRange {
        index,
        len: display.len(),
    })?;
    Ok(trace.steps[step.micro.0..step.micro.1]
        .iter()
        .map(|s| {
            let before = pretty(&s.before);
            MicroView {
                index: s.index,
                kind: s.kind,
                redex: before.span_of(&s.redex).unwrap_or((0, 0)),
                before: before.text,
                after: pretty(&s.after).text,
                stdout: s.stdout.clone(),
            }
        })
        .collect())
}
