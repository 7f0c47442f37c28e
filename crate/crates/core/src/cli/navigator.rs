use crate::eval::MicroTrace;
use crate::render::{binding_width, render_step_in_column, RenderConfig};
use crate::trace::{compose_display, expand, search, DisplayTrace, ElisionPolicy, SearchQuery};

pub const HELP: &str = "commands: n (next), b (back), g N (goto), e (expand), /TEXT (search), p FLAG (toggle a,b,c,d,e,f,g,naive,normalize,stdlib), q (quit)\n";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reply {
    Show(String),
    Quit,
}

/// Interactive movement over a recorded trace. Every command but `q`
/// answers with the current step rendered last.
pub struct Navigator<'t> {
    trace: &'t MicroTrace,
    policy: ElisionPolicy,
    config: RenderConfig,
    display: DisplayTrace,
    width: usize,
    cursor: usize,
}

impl<'t> Navigator<'t> {
    pub fn new(trace: &'t MicroTrace, policy: ElisionPolicy, config: RenderConfig) -> Self {
        let display = compose_display(trace, &policy);
        let width = binding_width(&display.steps, &config);
        Navigator {
            trace,
            policy,
            config,
            display,
            width,
            cursor: 0,
        }
    }

    pub fn cursor(&self) -> usize {
        self.cursor
    }

    pub fn display(&self) -> &DisplayTrace {
        &self.display
    }

    pub fn policy(&self) -> &ElisionPolicy {
        &self.policy
    }

    pub fn current(&self) -> String {
        let step = &self.display.steps[self.cursor];
        format!(
            "[{}/{}] {}",
            self.cursor,
            self.display.len() - 1,
            render_step_in_column(step, &self.config, self.width)
        )
    }

    pub fn execute(&mut self, line: &str) -> Reply {
        let line = line.trim();
        let last = self.display.len() - 1;
        let mut out = String::new();
        match line.split_once(' ').map_or((line, ""), |(c, a)| (c, a.trim())) {
            ("q", "") => return Reply::Quit,
            ("n", "") => self.cursor = (self.cursor + 1).min(last),
            ("b", "") => self.cursor = self.cursor.saturating_sub(1),
            ("g", n) if n.parse::<usize>().is_ok() => {
                self.cursor = n.parse::<usize>().unwrap_or(0).min(last);
            }
            ("e", "") => {
                let views = expand(self.trace, &self.display, self.cursor).unwrap_or_default();
                if views.is_empty() {
                    out.push_str("  (no micro-steps)\n");
                }
                for v in views {
                    out.push_str(&format!("  {:>5} {:<15} {}\n", v.index, v.kind.name(), v.after));
                }
            }
            ("p", flag) if !flag.is_empty() => match self.policy.toggle(flag) {
                Ok(on) => {
                    self.recompose();
                    out.push_str(&format!("{flag} {}\n", if on { "on" } else { "off" }));
                }
                Err(e) => out.push_str(&format!("{e}\n")),
            },
            _ if line.starts_with('/') && line.len() > 1 => {
                let hits = search(self.trace, &self.display, &SearchQuery::substring(&line[1..]));
                match hits
                    .iter()
                    .find(|&&i| i > self.cursor)
                    .or_else(|| hits.first())
                {
                    Some(&i) => self.cursor = i,
                    None => out.push_str("no match\n"),
                }
            }
            _ => out.push_str(HELP),
        }
        out.push_str(&self.current());
        Reply::Show(out)
    }

    /// Re-composes after a policy change, keeping the first micro-step of
    /// the focused step in view.
    fn recompose(&mut self) {
        let anchor = self.display.steps[self.cursor].micro;
        self.display = compose_display(self.trace, &self.policy);
        self.width = binding_width(&self.display.steps, &self.config);
        self.cursor = if anchor.0 == anchor.1 {
            0
        } else {
            self.display.step_containing(anchor.0)
        };
    }
}
