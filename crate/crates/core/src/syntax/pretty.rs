use std::collections::{BTreeMap, BTreeSet};

use super::ast::{BinOp, Expr, Path};
use super::lexer::escape;

/// Half-open character range `[start, end)`.
pub type Span = (usize, usize);

/// One-line rendering of an expression with the character span of every
/// printed subterm and of every keyword.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Pretty {
    pub text: String,
    pub spans: BTreeMap<Path, Span>,
    pub keywords: Vec<Span>,
}

impl Pretty {
    /// Span of the subterm at `path`, or of its closest printed ancestor.
    pub fn span_of(&self, path: &Path) -> Option<Span> {
        let mut p = path.clone();
        loop {
            if let Some(s) = self.spans.get(&p) {
                return Some(*s);
            }
            p = p.parent()?;
        }
    }

    pub fn slice(&self, span: Span) -> String {
        self.text.chars().skip(span.0).take(span.1 - span.0).collect()
    }
}

/// Printing options; `erase` lists `Let` frames printed as their body alone.
#[derive(Debug, Clone, Default)]
pub struct PrettyOptions {
    pub erase: BTreeSet<Path>,
}

pub fn pretty(e: &Expr) -> Pretty {
    pretty_with(e, &PrettyOptions::default())
}

pub fn to_source(e: &Expr) -> String {
    pretty(e).text
}

pub fn pretty_with(e: &Expr, opts: &PrettyOptions) -> Pretty {
    let mut p = Printer {
        out: Pretty::default(),
        len: 0,
        opts,
    };
    p.expr(e, Path::root(), 0, true);
    p.out
}

const LEVEL_DEREF: u8 = 7;
const LEVEL_APP: u8 = 8;
const LEVEL_ATOM: u8 = 9;

fn is_open(e: &Expr) -> bool {
    matches!(
        e,
        Expr::Fun(..) | Expr::Let { .. } | Expr::If(..) | Expr::TryWith(..)
    )
}

fn level(e: &Expr) -> u8 {
    match e {
        Expr::BinOp(op, _, _) => op.precedence(),
        Expr::Deref(_) => LEVEL_DEREF,
        Expr::App(..) | Expr::Ref(_) | Expr::Raise(_) => LEVEL_APP,
        Expr::Int(n) if *n < 0 => LEVEL_APP,
        _ if is_open(e) => 0,
        _ => LEVEL_ATOM,
    }
}

struct Printer<'o> {
    out: Pretty,
    len: usize,
    opts: &'o PrettyOptions,
}

impl Printer<'_> {
    fn push(&mut self, s: &str) {
        self.out.text.push_str(s);
        self.len += s.chars().count();
    }

    fn keyword(&mut self, kw: &str) {
        let start = self.len;
        self.push(kw);
        self.out.keywords.push((start, self.len));
    }

    /// `min` is the weakest binding level allowed without parentheses; `tail`
    /// is true when nothing follows this subterm before a closing delimiter.
    fn expr(&mut self, e: &Expr, path: Path, min: u8, tail: bool) {
        if let Expr::Let { body, .. } = e {
            if self.opts.erase.contains(&path) {
                let body_path = path.child(1);
                self.expr(body, body_path.clone(), min, tail);
                let span = self.out.spans[&body_path];
                self.out.spans.insert(path, span);
                return;
            }
        }
        let parens = if is_open(e) {
            min > 0 || !tail
        } else {
            level(e) < min
        };
        if parens {
            self.push("(");
            self.bare(e, path, 0, true);
            self.push(")");
        } else {
            self.bare(e, path, min, tail);
        }
    }

    fn bare(&mut self, e: &Expr, path: Path, _min: u8, tail: bool) {
        let start = self.len;
        match e {
            Expr::Int(n) => self.push(&n.to_string()),
            Expr::Bool(b) => self.push(if *b { "true" } else { "false" }),
            Expr::Str(s) => self.push(&escape(s)),
            Expr::Unit => self.push("()"),
            Expr::Var(x) => self.push(x),
            Expr::Abstract(tag) => self.push(&format!("<{tag}>")),
            Expr::Location(id) => self.push(&format!("<ref:{id}>")),
            Expr::Primitive(p) => self.push(&format!("<<{}>>", p.name)),
            Expr::Raise(x) => {
                self.keyword("raise");
                self.push(" ");
                self.push(x);
            }
            Expr::Ref(inner) => {
                self.keyword("ref");
                self.push(" ");
                self.expr(inner, path.child(0), LEVEL_ATOM, false);
            }
            Expr::Deref(inner) => {
                self.push("!");
                self.expr(inner, path.child(0), LEVEL_DEREF, tail);
            }
            Expr::App(f, a) => {
                self.expr(f, path.child(0), LEVEL_APP, false);
                self.push(" ");
                self.expr(a, path.child(1), LEVEL_ATOM, false);
            }
            Expr::BinOp(op, l, r) => {
                let lvl = op.precedence();
                let (lmin, rmin) = if op.is_right_assoc() {
                    (lvl + 1, lvl)
                } else {
                    (lvl, lvl + 1)
                };
                self.expr(l, path.child(0), lmin, false);
                if *op == BinOp::Seq {
                    self.push("; ");
                } else {
                    self.push(&format!(" {} ", op.symbol()));
                }
                self.expr(r, path.child(1), rmin, tail);
            }
            Expr::Fun(x, body) => {
                self.keyword("fun");
                self.push(&format!(" {x} -> "));
                self.expr(body, path.child(0), 0, true);
            }
            Expr::Let {
                recursive,
                name,
                bound,
                body,
            } => {
                self.keyword("let");
                self.push(" ");
                if *recursive {
                    self.keyword("rec");
                    self.push(" ");
                }
                self.push(name);
                if let Expr::Fun(param, fbody) = bound.as_ref() {
                    self.push(&format!(" {param} = "));
                    self.expr(fbody, path.child(0).child(0), 0, true);
                } else {
                    self.push(" = ");
                    self.expr(bound, path.child(0), 0, true);
                }
                self.push(" ");
                self.keyword("in");
                self.push(" ");
                self.expr(body, path.child(1), 0, true);
            }
            Expr::If(c, t, f) => {
                self.keyword("if");
                self.push(" ");
                self.expr(c, path.child(0), 0, true);
                self.push(" ");
                self.keyword("then");
                self.push(" ");
                self.expr(t, path.child(1), 0, true);
                self.push(" ");
                self.keyword("else");
                self.push(" ");
                self.expr(f, path.child(2), 0, true);
            }
            Expr::TryWith(b, x, h) => {
                self.keyword("try");
                self.push(" ");
                self.expr(b, path.child(0), 0, true);
                self.push(" ");
                self.keyword("with");
                self.push(&format!(" {x} -> "));
                self.expr(h, path.child(1), 0, true);
            }
        }
        self.out.spans.insert(path, (start, self.len));
    }
}
