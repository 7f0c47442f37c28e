//! Grouping micro-steps of a recorded run into the display steps the user
//! sees. Expansion, search and the JSON form live here as well.

mod compose;
mod expand;
mod policy;
mod search;
mod wire;

pub use compose::{compose_display, Arrow, DisplayStep, DisplayTrace};
pub use expand::{expand, MicroView, StepOutOfRange};
pub use policy::{ElisionPolicy, UnknownFlag, FLAG_NAMES};
pub use search::{search, SearchMode, SearchQuery};
pub use wire::{export_trace, WireError, WireResult, WireStep, WireTrace, WIRE_VERSION};
