//! Text output of display traces: margin bindings, arrows, highlighting and
//! interleaved program output.

use crate::syntax::Span;
use crate::trace::{Arrow, DisplayStep, DisplayTrace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Style {
    /// Terminal escape sequences.
    #[default]
    Ansi,
    /// `**bold**` and `__underline__`.
    PlainMarkers,
    BarePlain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RenderConfig {
    pub style: Style,
    /// Width of the bindings column; `None` sizes it to the widest entry.
    pub binding_width: Option<usize>,
    pub show_store: bool,
}

impl RenderConfig {
    pub fn with_style(style: Style) -> Self {
        RenderConfig {
            style,
            ..RenderConfig::default()
        }
    }
}

struct Markers {
    bold: (&'static str, &'static str),
    underline: (&'static str, &'static str),
}

fn markers(style: Style) -> Option<Markers> {
    match style {
        Style::Ansi => Some(Markers {
            bold: ("\x1b[1m", "\x1b[22m"),
            underline: ("\x1b[4m", "\x1b[24m"),
        }),
        Style::PlainMarkers => Some(Markers {
            bold: ("**", "**"),
            underline: ("__", "__"),
        }),
        Style::BarePlain => None,
    }
}

/// `text` with keyword and underline spans marked up. Underlines enclose
/// keywords, so at each position closing markers go before opening ones.
pub fn style_text(text: &str, keywords: &[Span], underline: &[Span], style: Style) -> String {
    let Some(m) = markers(style) else {
        return text.to_string();
    };
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len() + 16);
    for pos in 0..=chars.len() {
        for _ in keywords.iter().filter(|s| s.1 == pos && s.0 < s.1) {
            out.push_str(m.bold.1);
        }
        for _ in underline.iter().filter(|s| s.1 == pos && s.0 < s.1) {
            out.push_str(m.underline.1);
        }
        for _ in underline.iter().filter(|s| s.0 == pos && s.0 < s.1) {
            out.push_str(m.underline.0);
        }
        for _ in keywords.iter().filter(|s| s.0 == pos && s.0 < s.1) {
            out.push_str(m.bold.0);
        }
        if let Some(c) = chars.get(pos) {
            out.push(*c);
        }
    }
    out
}

fn bindings_text(step: &DisplayStep) -> String {
    step.bindings.join(", ")
}

/// Output for one display step: any program output, then the step line.
pub fn render_step(step: &DisplayStep, cfg: &RenderConfig) -> String {
    let width = cfg
        .binding_width
        .unwrap_or_else(|| bindings_text(step).chars().count());
    render_with_width(step, cfg, width)
}

fn render_with_width(step: &DisplayStep, cfg: &RenderConfig, width: usize) -> String {
    let mut out = String::new();
    if let Some(s) = &step.stdout {
        out.push_str(s);
    }
    if width > 0 {
        let b = bindings_text(step);
        out.push_str(&b);
        out.extend(std::iter::repeat_n(' ', width.saturating_sub(b.chars().count()) + 2));
    }
    out.push_str(match step.arrow {
        Arrow::Start => "    ",
        Arrow::Single => "=>  ",
        Arrow::Multi => "=>* ",
    });
    out.push_str(&style_text(&step.text, &step.keywords, &step.underline, cfg.style));
    if cfg.show_store {
        if let Some(store) = &step.store {
            out.push_str(&format!(" {{{}}}", store.join(", ")));
        }
    }
    out.push('\n');
    out
}

/// Width of the bindings column used for a whole trace.
pub fn binding_width(steps: &[DisplayStep], cfg: &RenderConfig) -> usize {
    cfg.binding_width.unwrap_or_else(|| {
        steps
            .iter()
            .map(|s| bindings_text(s).chars().count())
            .max()
            .unwrap_or(0)
    })
}

pub fn render_steps(steps: &[DisplayStep], cfg: &RenderConfig) -> String {
    let width = binding_width(steps, cfg);
    steps.iter().map(|s| render_with_width(s, cfg, width)).collect()
}

pub fn render_trace(display: &DisplayTrace, cfg: &RenderConfig) -> String {
    render_steps(&display.steps, cfg)
}

/// Renders one step using a column width fixed in advance.
pub fn render_step_in_column(step: &DisplayStep, cfg: &RenderConfig, width: usize) -> String {
    render_with_width(step, cfg, width)
}
