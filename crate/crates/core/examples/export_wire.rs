//! Write a trace as JSON and read it back.
//!
//!     cargo run --example export_wire

use stepml::eval::{load, run, ScriptedInput, DEFAULT_MAX_STEPS};
use stepml::render::{render_trace, RenderConfig, Style};
use stepml::trace::{compose_display, export_trace, ElisionPolicy, WireTrace};

fn main() {
    let source = "let x = 1 in\nlet f = fun y -> x + y in\nlet x = 10 in\nf x\n";
    let program = load(source).expect("program parses");
    let result = run(&program, &mut ScriptedInput::empty(), DEFAULT_MAX_STEPS).expect("program runs");
    let policy = ElisionPolicy::default();
    let display = compose_display(&result.trace, &policy);

    let bytes = export_trace(&display, source, &policy, &result.outcome);
    let json = String::from_utf8(bytes).expect("utf-8");
    print!("{json}");

    let wire = WireTrace::from_json(&json).expect("valid document");
    let restored = wire.to_display().expect("known arrows");
    assert_eq!(restored, display);
    print!("{}", render_trace(&restored, &RenderConfig::with_style(Style::PlainMarkers)));
}
