//! Byte-exact rendered traces and wire documents for the checked-in
//! programs. Regenerate with `STEPML_BLESS=1 cargo test --test golden`.

mod common;

use stepml::render::{render_trace, RenderConfig, Style};
use stepml::trace::{export_trace, ElisionPolicy};

fn policies() -> [(&'static str, ElisionPolicy); 3] {
    let full = ElisionPolicy {
        hide_stdlib: false,
        ..ElisionPolicy::default()
    };
    [
        ("default", ElisionPolicy::default()),
        ("naive", ElisionPolicy::naive()),
        ("stdlib", full),
    ]
}

#[test]
fn rendered_traces() {
    let cfg = RenderConfig {
        style: Style::PlainMarkers,
        show_store: true,
        ..Default::default()
    };
    for name in common::PROGRAMS {
        let s = common::session(name);
        for (label, policy) in policies() {
            let text = render_trace(&s.compose(&policy), &cfg);
            common::check_golden(&format!("{name}.{label}.txt"), &text);
        }
    }
}

#[test]
fn wire_documents() {
    for name in common::PROGRAMS {
        let s = common::session(name);
        let policy = ElisionPolicy::default();
        let bytes = export_trace(&s.compose(&policy), &s.source, &policy, &s.result.outcome);
        common::check_golden(&format!("{name}.json"), &String::from_utf8(bytes).unwrap());
    }
}
