pub mod cli;
pub mod eval;
pub mod render;
pub mod syntax;
pub mod trace;
