//! Exceptions unwinding to a handler, and a reference cell shown next to each
//! step.
//!
//!     cargo run --example exceptions_and_refs

use stepml::eval::{load, run, Outcome, ScriptedInput, DEFAULT_MAX_STEPS};
use stepml::render::{render_trace, RenderConfig, Style};
use stepml::trace::{compose_display, ElisionPolicy};

fn show(source: &str) {
    let program = load(source).expect("program parses");
    let result = run(&program, &mut ScriptedInput::empty(), DEFAULT_MAX_STEPS).expect("program runs");
    let cfg = RenderConfig {
        style: Style::PlainMarkers,
        show_store: true,
        ..RenderConfig::default()
    };
    println!("-- {source}");
    print!("{}", render_trace(&compose_display(&result.trace, &ElisionPolicy::naive()), &cfg));
    match &result.outcome {
        Outcome::Value(v) => println!("value: {}", stepml::syntax::to_source(v)),
        Outcome::UncaughtException(x) => println!("uncaught exception {x}"),
        Outcome::StepLimitExceeded => println!("step limit reached"),
    }
    println!();
}

fn main() {
    show("try (1 + raise Not_found) with Not_found -> 42");
    show("let r = ref 1 in r := 2; !r");
    show("let count = ref 0 in let bump = fun u -> count := !count + 1 in bump (); bump (); !count");
    show("10 / (3 - 3)");
}
