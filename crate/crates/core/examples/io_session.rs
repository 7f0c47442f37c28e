//! Program output appears in the trace at the step that produced it. Input is
//! scripted here; the `stepml` binary reads it from standard input.
//!
//!     cargo run --example io_session

use stepml::eval::{load, run, ScriptedInput, DEFAULT_MAX_STEPS};
use stepml::render::{render_trace, RenderConfig, Style};
use stepml::trace::{compose_display, ElisionPolicy};

fn main() {
    let program = load("print_string (input_line stdin)").expect("program parses");
    let mut input = ScriptedInput::new(["SLATE"]);
    let result = run(&program, &mut input, DEFAULT_MAX_STEPS).expect("program runs");
    let cfg = RenderConfig::with_style(Style::BarePlain);

    println!("-- library steps hidden");
    print!("{}", render_trace(&compose_display(&result.trace, &ElisionPolicy::default()), &cfg));

    println!("-- library steps shown");
    let policy = ElisionPolicy {
        hide_stdlib: false,
        ..ElisionPolicy::default()
    };
    print!("{}", render_trace(&compose_display(&result.trace, &policy), &cfg));

    println!("-- stdout transcript: {:?}", result.trace.stdout());
}
