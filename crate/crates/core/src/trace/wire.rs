use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eval::Outcome;
use crate::syntax::to_source;

use super::compose::{Arrow, DisplayStep, DisplayTrace};
use super::policy::ElisionPolicy;

pub const WIRE_VERSION: u32 = 1;

/// Serialized display trace consumed by the browser front end.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireTrace {
    pub version: u32,
    pub source: String,
    pub policy: BTreeMap<String, bool>,
    pub result: WireResult,
    pub steps: Vec<WireStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireResult {
    /// `value`, `exception` or `limit`.
    pub kind: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireStep {
    pub i: usize,
    pub arrow: String,
    pub text: String,
    pub underline: Vec<[usize; 2]>,
    pub keywords: Vec<[usize; 2]>,
    pub bindings: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stdout: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub store: Option<Vec<String>>,
    pub micro: [usize; 2],
}

#[derive(Debug, Error)]
pub enum WireError {
    #[error("malformed trace document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported trace version {0}")]
    Version(u32),
    #[error("step {0} has unknown arrow '{1}'")]
    Arrow(usize, String),
}

impl WireResult {
    pub fn of_outcome(outcome: &Outcome) -> WireResult {
        let (kind, text) = match outcome {
            Outcome::Value(v) => ("value", to_source(v)),
            Outcome::UncaughtException(x) => ("exception", x.clone()),
            Outcome::StepLimitExceeded => ("limit", String::new()),
        };
        WireResult {
            kind: kind.to_string(),
            text,
        }
    }
}

fn pairs(spans: &[(usize, usize)]) -> Vec<[usize; 2]> {
    spans.iter().map(|&(s, e)| [s, e]).collect()
}

impl WireStep {
    fn of_step(s: &DisplayStep) -> WireStep {
        WireStep {
            i: s.index,
            arrow: s.arrow.symbol().to_string(),
            text: s.text.clone(),
            underline: pairs(&s.underline),
            keywords: pairs(&s.keywords),
            bindings: s.bindings.clone(),
            stdout: s.stdout.clone(),
            store: s.store.clone(),
            micro: [s.micro.0, s.micro.1],
        }
    }

    fn to_step(&self) -> Result<DisplayStep, WireError> {
        let unpair = |v: &[[usize; 2]]| v.iter().map(|p| (p[0], p[1])).collect();
        Ok(DisplayStep {
            index: self.i,
            text: self.text.clone(),
            underline: unpair(&self.underline),
            keywords: unpair(&self.keywords),
            bindings: self.bindings.clone(),
            arrow: Arrow::from_symbol(&self.arrow)
                .ok_or_else(|| WireError::Arrow(self.i, self.arrow.clone()))?,
            micro: (self.micro[0], self.micro[1]),
            stdout: self.stdout.clone(),
            store: self.store.clone(),
        })
    }
}

impl WireTrace {
    pub fn new(display: &DisplayTrace, source: &str, policy: &ElisionPolicy, outcome: &Outcome) -> WireTrace {
        WireTrace {
            version: WIRE_VERSION,
            source: source.to_string(),
            policy: policy.to_map(),
            result: WireResult::of_outcome(outcome),
            steps: display.steps.iter().map(WireStep::of_step).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("wire trace serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<WireTrace, WireError> {
        let w: WireTrace = serde_json::from_str(text)?;
        if w.version != WIRE_VERSION {
            return Err(WireError::Version(w.version));
        }
        Ok(w)
    }

    pub fn to_display(&self) -> Result<DisplayTrace, WireError> {
        Ok(DisplayTrace {
            steps: self.steps.iter().map(WireStep::to_step).collect::<Result<_, _>>()?,
        })
    }
}

/// Serializes a composed trace to the wire format.
pub fn export_trace(display: &DisplayTrace, source: &str, policy: &ElisionPolicy, outcome: &Outcome) -> Vec<u8> {
    WireTrace::new(display, source, policy, outcome).to_json().into_bytes()
}
