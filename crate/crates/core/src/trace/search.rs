use crate::eval::{MicroStep, MicroTrace, StepKind};

use super::compose::{DisplayStep, DisplayTrace};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchMode {
    Substring(String),
    AppliedFunction(String),
    ExceptionRaised(String),
    StepKind(StepKind),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchQuery {
    pub mode: SearchMode,
    pub case_sensitive: bool,
}

impl SearchQuery {
    pub fn substring(text: impl Into<String>) -> Self {
        SearchQuery {
            mode: SearchMode::Substring(text.into()),
            case_sensitive: true,
        }
    }

    pub fn function(name: impl Into<String>) -> Self {
        SearchQuery {
            mode: SearchMode::AppliedFunction(name.into()),
            case_sensitive: true,
        }
    }

    pub fn exception(name: impl Into<String>) -> Self {
        SearchQuery {
            mode: SearchMode::ExceptionRaised(name.into()),
            case_sensitive: true,
        }
    }

    pub fn kind(kind: StepKind) -> Self {
        SearchQuery {
            mode: SearchMode::StepKind(kind),
            case_sensitive: true,
        }
    }

    pub fn ignore_case(mut self) -> Self {
        self.case_sensitive = false;
        self
    }

    fn names_equal(&self, a: &str, b: &str) -> bool {
        if self.case_sensitive {
            a == b
        } else {
            a.eq_ignore_ascii_case(b)
        }
    }

    fn micro_matches(&self, s: &MicroStep) -> bool {
        match &self.mode {
            SearchMode::Substring(_) => false,
            SearchMode::AppliedFunction(name) => {
                matches!(s.kind, StepKind::Unfold | StepKind::Beta)
                    && s.function.as_deref().is_some_and(|f| self.names_equal(f, name))
            }
            SearchMode::ExceptionRaised(name) => {
                matches!(s.kind, StepKind::RaisePropagate | StepKind::TryResolve)
                    && s.exception.as_deref().is_some_and(|x| self.names_equal(x, name))
            }
            SearchMode::StepKind(k) => s.kind == *k,
        }
    }

    /// Whether display step `step` of `trace` satisfies the query.
    pub fn matches(&self, trace: &MicroTrace, step: &DisplayStep) -> bool {
        match &self.mode {
            SearchMode::Substring(needle) => {
                if self.case_sensitive {
                    step.text.contains(needle.as_str())
                } else {
                    step.text.to_lowercase().contains(&needle.to_lowercase())
                }
            }
            _ => trace.steps[step.micro.0..step.micro.1]
                .iter()
                .any(|s| self.micro_matches(s)),
        }
    }
}

/// Indices of matching display steps, ascending.
pub fn search(trace: &MicroTrace, display: &DisplayTrace, q: &SearchQuery) -> Vec<usize> {
    display
        .steps
        .iter()
        .filter(|s| q.matches(trace, s))
        .map(|s| s.index)
        .collect()
}
