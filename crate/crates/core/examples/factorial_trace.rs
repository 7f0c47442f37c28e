//! Trace factorial with the default policy, then with every rule off.
//!
//!     cargo run --example factorial_trace

use stepml::eval::{load, run, ScriptedInput, DEFAULT_MAX_STEPS};
use stepml::render::{render_trace, RenderConfig, Style};
use stepml::trace::{compose_display, ElisionPolicy};

const PROGRAM: &str = "let rec factorial n = if n = 1 then 1 else n * factorial (n - 1) in factorial 4";

fn main() {
    let program = load(PROGRAM).expect("program parses");
    let result = run(&program, &mut ScriptedInput::empty(), DEFAULT_MAX_STEPS).expect("program runs");
    let cfg = RenderConfig::with_style(Style::Ansi);

    println!("-- default policy");
    let trimmed = compose_display(&result.trace, &ElisionPolicy::default());
    print!("{}", render_trace(&trimmed, &cfg));

    println!("\n-- naive policy");
    let naive = compose_display(&result.trace, &ElisionPolicy::naive());
    print!("{}", render_trace(&naive, &cfg));

    println!(
        "\n{} micro-steps, shown as {} and {} display steps",
        result.trace.len(),
        trimmed.len() - 1,
        naive.len() - 1
    );
}
