//! Drive the interactive stepper with a fixed command script, as `stepml step`
//! does with lines typed at the terminal.
//!
//!     cargo run --example navigator

use stepml::cli::{Navigator, Reply};
use stepml::eval::{load, run, ScriptedInput, DEFAULT_MAX_STEPS};
use stepml::render::{RenderConfig, Style};
use stepml::trace::ElisionPolicy;

fn main() {
    let program = load("let rec factorial n = if n = 1 then 1 else n * factorial (n - 1) in factorial 4")
        .expect("program parses");
    let result = run(&program, &mut ScriptedInput::empty(), DEFAULT_MAX_STEPS).expect("program runs");
    let mut nav = Navigator::new(&result.trace, ElisionPolicy::default(), RenderConfig::with_style(Style::PlainMarkers));
    print!("{}", nav.current());
    for command in ["n", "n", "b", "/factorial 2", "p naive", "g 99", "e", "q"] {
        println!("> {command}");
        match nav.execute(command) {
            Reply::Show(text) => print!("{text}"),
            Reply::Quit => break,
        }
    }
}
