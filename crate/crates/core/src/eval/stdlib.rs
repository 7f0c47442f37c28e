use std::sync::OnceLock;

use crate::syntax::{parse, tokenize_with, Expr, LexMode};

/// Prelude definitions, in dependency order. Channels are written directly as
/// abstract values; `<<name>>` marks a primitive.
const PRELUDE: &[(&str, &str)] = &[
    ("output_string", "fun x -> fun y -> <<output_string>>"),
    ("print_string", "fun x -> output_string <out_channel> x"),
    ("input_line", "fun x -> <<input_line>>"),
    ("string_of_int", "fun x -> <<string_of_int>>"),
    ("print_int", "fun x -> print_string (string_of_int x)"),
    ("print_newline", "fun x -> print_string \"\\n\""),
];

pub const IN_CHANNEL: &str = "in_channel";
pub const OUT_CHANNEL: &str = "out_channel";

/// The bundled mini standard library: named definitions visible to every
/// program unless shadowed.
#[derive(Debug, Clone)]
pub struct Prelude {
    defs: Vec<(String, Expr)>,
}

impl Prelude {
    pub fn standard() -> &'static Prelude {
        static PRELUDE_DEFS: OnceLock<Prelude> = OnceLock::new();
        PRELUDE_DEFS.get_or_init(|| Prelude {
            defs: PRELUDE
                .iter()
                .map(|(name, src)| {
                    let toks = tokenize_with(src, LexMode::Prelude).expect("prelude lexes");
                    (name.to_string(), parse(&toks).expect("prelude parses"))
                })
                .collect(),
        })
    }

    pub fn empty() -> Prelude {
        Prelude { defs: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.defs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.defs.is_empty()
    }

    /// Index and body of the last definition of `name` among the first `limit`.
    pub fn lookup(&self, name: &str, limit: usize) -> Option<(usize, &Expr)> {
        self.defs[..limit.min(self.defs.len())]
            .iter()
            .enumerate()
            .rev()
            .find(|(_, (n, _))| n == name)
            .map(|(i, (_, e))| (i, e))
    }

    pub fn get(&self, index: usize) -> &(String, Expr) {
        &self.defs[index]
    }

    pub fn iter(&self) -> impl Iterator<Item = &(String, Expr)> {
        self.defs.iter()
    }
}

/// Replaces free `stdin`/`stdout` with the channel values.
pub fn bind_channels(e: &Expr) -> Expr {
    fn go(e: &Expr, shadow: &mut Vec<String>) -> Expr {
        match e {
            Expr::Var(x) if !shadow.contains(x) && x == "stdin" => Expr::Abstract(IN_CHANNEL.into()),
            Expr::Var(x) if !shadow.contains(x) && x == "stdout" => {
                Expr::Abstract(OUT_CHANNEL.into())
            }
            Expr::Fun(p, b) => {
                shadow.push(p.clone());
                let b = go(b, shadow);
                shadow.pop();
                Expr::Fun(p.clone(), Box::new(b))
            }
            Expr::Let {
                recursive,
                name,
                bound,
                body,
            } => {
                if *recursive {
                    shadow.push(name.clone());
                }
                let bound = go(bound, shadow);
                if !*recursive {
                    shadow.push(name.clone());
                }
                let body = go(body, shadow);
                shadow.pop();
                Expr::Let {
                    recursive: *recursive,
                    name: name.clone(),
                    bound: Box::new(bound),
                    body: Box::new(body),
                }
            }
            other => {
                let mut out = other.clone();
                for i in 0..other.children().len() as u8 {
                    let child = go(other.child(i).unwrap(), shadow);
                    *out.child_mut(i).unwrap() = child;
                }
                out
            }
        }
    }
    go(e, &mut Vec::new())
}
