//! Find display steps with several kinds of query, then look inside one.
//!
//!     cargo run --example search_and_expand

use stepml::eval::{load, run, ScriptedInput, StepKind, DEFAULT_MAX_STEPS};
use stepml::trace::{compose_display, expand, search, ElisionPolicy, SearchQuery};

fn main() {
    let program = load("let rec factorial n = if n = 1 then 1 else n * factorial (n - 1) in factorial 4")
        .expect("program parses");
    let result = run(&program, &mut ScriptedInput::empty(), DEFAULT_MAX_STEPS).expect("program runs");
    let display = compose_display(&result.trace, &ElisionPolicy::default());

    for query in [
        SearchQuery::substring("factorial 2"),
        SearchQuery::function("factorial"),
        SearchQuery::kind(StepKind::IfResolve),
    ] {
        let hits = search(&result.trace, &display, &query);
        println!("{query:?}");
        for i in hits {
            println!("  step {i}: {}", display.steps[i].text);
        }
    }

    let last = display.len() - 1;
    println!("\nstep {last} is made of:");
    for view in expand(&result.trace, &display, last).expect("step exists") {
        let (a, b) = view.redex;
        let redex: String = view.before.chars().skip(a).take(b - a).collect();
        println!("  #{:<3} {:<10} {redex:<12} -> {}", view.index, view.kind.name(), view.after);
    }
}
