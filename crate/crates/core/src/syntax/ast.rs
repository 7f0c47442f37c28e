use std::collections::BTreeSet;
use std::fmt;

/// Binary operators of the core language, including sequencing and assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Eq,
    Lt,
    Gt,
    Le,
    Ge,
    Ne,
    And,
    Or,
    Concat,
    Seq,
    Assign,
}

impl BinOp {
    pub const ALL: [BinOp; 15] = [
        BinOp::Add,
        BinOp::Sub,
        BinOp::Mul,
        BinOp::Div,
        BinOp::Eq,
        BinOp::Lt,
        BinOp::Gt,
        BinOp::Le,
        BinOp::Ge,
        BinOp::Ne,
        BinOp::And,
        BinOp::Or,
        BinOp::Concat,
        BinOp::Seq,
        BinOp::Assign,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Eq => "=",
            BinOp::Lt => "<",
            BinOp::Gt => ">",
            BinOp::Le => "<=",
            BinOp::Ge => ">=",
            BinOp::Ne => "<>",
            BinOp::And => "&&",
            BinOp::Or => "||",
            BinOp::Concat => "^",
            BinOp::Seq => ";",
            BinOp::Assign => ":=",
        }
    }

    pub fn from_symbol(s: &str) -> Option<BinOp> {
        BinOp::ALL.into_iter().find(|op| op.symbol() == s)
    }

    /// Binding strength; higher binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Seq => 0,
            BinOp::Assign => 1,
            BinOp::Or => 2,
            BinOp::And => 3,
            BinOp::Eq | BinOp::Lt | BinOp::Gt | BinOp::Le | BinOp::Ge | BinOp::Ne => 4,
            BinOp::Add | BinOp::Sub | BinOp::Concat => 5,
            BinOp::Mul | BinOp::Div => 6,
        }
    }

    pub fn is_right_assoc(self) -> bool {
        matches!(self, BinOp::Seq | BinOp::Assign)
    }

    pub fn is_arith(self) -> bool {
        matches!(self, BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div)
    }

    pub fn is_compare(self) -> bool {
        matches!(
            self,
            BinOp::Eq | BinOp::Lt | BinOp::Gt | BinOp::Le | BinOp::Ge | BinOp::Ne
        )
    }
}

impl fmt::Display for BinOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Abstract syntax of the core language.
///
/// `Abstract`, `Location` and `Primitive` never come from user source: they
/// appear in the bundled prelude or are produced by evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Int(i64),
    Bool(bool),
    Str(String),
    Unit,
    Var(String),
    Fun(String, Box<Expr>),
    App(Box<Expr>, Box<Expr>),
    Let {
        recursive: bool,
        name: String,
        bound: Box<Expr>,
        body: Box<Expr>,
    },
    If(Box<Expr>, Box<Expr>, Box<Expr>),
    BinOp(BinOp, Box<Expr>, Box<Expr>),
    Ref(Box<Expr>),
    Deref(Box<Expr>),
    Raise(String),
    TryWith(Box<Expr>, String, Box<Expr>),
    Abstract(String),
    Location(usize),
    Primitive(Primitive),
}

/// A built-in operation. It reads the variables named in `args`; each slot is
/// filled in as the enclosing `let` frames are consumed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Primitive {
    pub name: String,
    pub args: Vec<(String, Option<Box<Expr>>)>,
}

impl Primitive {
    pub fn new(name: impl Into<String>, reads: &[&str]) -> Self {
        Primitive {
            name: name.into(),
            args: reads.iter().map(|r| (r.to_string(), None)).collect(),
        }
    }

    /// Builds a primitive node from the built-in table of variables each
    /// primitive reads. Unknown names read nothing and fail when applied.
    pub fn known(name: &str) -> Self {
        let reads: &[&str] = match name {
            "input_line" => &["x"],
            "output_string" => &["x", "y"],
            "string_of_int" => &["x"],
            _ => &[],
        };
        Primitive::new(name, reads)
    }

    pub fn reads_unfilled(&self, var: &str) -> bool {
        self.args.iter().any(|(n, v)| n == var && v.is_none())
    }

    pub fn is_saturated(&self) -> bool {
        self.args.iter().all(|(_, v)| v.is_some())
    }

    pub fn arg(&self, var: &str) -> Option<&Expr> {
        self.args
            .iter()
            .find(|(n, _)| n == var)
            .and_then(|(_, v)| v.as_deref())
    }
}

/// Sequence of child indices from the root of an [`Expr`] to a subterm.
///
/// Child numbering: `Fun` body 0; `App` function 0, argument 1; `Let` bound 0,
/// body 1; `If` condition 0, then 1, else 2; `BinOp` left 0, right 1; `Ref`,
/// `Deref` operand 0; `TryWith` body 0, handler 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Path(pub Vec<u8>);

impl Path {
    pub fn root() -> Self {
        Path(Vec::new())
    }

    pub fn child(&self, i: u8) -> Path {
        let mut v = self.0.clone();
        v.push(i);
        Path(v)
    }

    pub fn parent(&self) -> Option<Path> {
        if self.0.is_empty() {
            None
        } else {
            Some(Path(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn starts_with(&self, prefix: &Path) -> bool {
        self.0.starts_with(&prefix.0)
    }

    pub fn join(&self, rest: &[u8]) -> Path {
        let mut v = self.0.clone();
        v.extend_from_slice(rest);
        Path(v)
    }

    pub fn common_prefix(&self, other: &Path) -> Path {
        Path(
            self.0
                .iter()
                .zip(&other.0)
                .take_while(|(a, b)| a == b)
                .map(|(a, _)| *a)
                .collect(),
        )
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl Expr {
    pub fn int(n: i64) -> Expr {
        Expr::Int(n)
    }

    pub fn var(name: &str) -> Expr {
        Expr::Var(name.to_string())
    }

    pub fn fun(param: &str, body: Expr) -> Expr {
        Expr::Fun(param.to_string(), Box::new(body))
    }

    pub fn app(f: Expr, a: Expr) -> Expr {
        Expr::App(Box::new(f), Box::new(a))
    }

    pub fn binop(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::BinOp(op, Box::new(l), Box::new(r))
    }

    pub fn let_(name: &str, bound: Expr, body: Expr) -> Expr {
        Expr::Let {
            recursive: false,
            name: name.to_string(),
            bound: Box::new(bound),
            body: Box::new(body),
        }
    }

    pub fn let_rec(name: &str, bound: Expr, body: Expr) -> Expr {
        Expr::Let {
            recursive: true,
            name: name.to_string(),
            bound: Box::new(bound),
            body: Box::new(body),
        }
    }

    pub fn if_(c: Expr, t: Expr, e: Expr) -> Expr {
        Expr::If(Box::new(c), Box::new(t), Box::new(e))
    }

    pub fn is_literal(&self) -> bool {
        matches!(
            self,
            Expr::Int(_) | Expr::Bool(_) | Expr::Str(_) | Expr::Unit
        )
    }

    /// Immediate children in path order.
    pub fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::Fun(_, b) => vec![b],
            Expr::App(f, a) => vec![f, a],
            Expr::Let { bound, body, .. } => vec![bound, body],
            Expr::If(c, t, e) => vec![c, t, e],
            Expr::BinOp(_, l, r) => vec![l, r],
            Expr::Ref(e) | Expr::Deref(e) => vec![e],
            Expr::TryWith(b, _, h) => vec![b, h],
            _ => vec![],
        }
    }

    pub fn child(&self, i: u8) -> Option<&Expr> {
        self.children().get(i as usize).copied()
    }

    pub fn child_mut(&mut self, i: u8) -> Option<&mut Expr> {
        let c: Option<&mut Box<Expr>> = match (self, i) {
            (Expr::Fun(_, b), 0) => Some(b),
            (Expr::App(f, _), 0) => Some(f),
            (Expr::App(_, a), 1) => Some(a),
            (Expr::Let { bound, .. }, 0) => Some(bound),
            (Expr::Let { body, .. }, 1) => Some(body),
            (Expr::If(c, _, _), 0) => Some(c),
            (Expr::If(_, t, _), 1) => Some(t),
            (Expr::If(_, _, e), 2) => Some(e),
            (Expr::BinOp(_, l, _), 0) => Some(l),
            (Expr::BinOp(_, _, r), 1) => Some(r),
            (Expr::Ref(e), 0) | (Expr::Deref(e), 0) => Some(e),
            (Expr::TryWith(b, _, _), 0) => Some(b),
            (Expr::TryWith(_, _, h), 1) => Some(h),
            _ => None,
        };
        c.map(|b| b.as_mut())
    }

    pub fn at(&self, path: &Path) -> Option<&Expr> {
        path.0.iter().try_fold(self, |e, &i| e.child(i))
    }

    pub fn at_mut(&mut self, path: &Path) -> Option<&mut Expr> {
        let mut cur = self;
        for &i in &path.0 {
            cur = cur.child_mut(i)?;
        }
        Some(cur)
    }

    /// Returns a copy of `self` with the subterm at `path` replaced.
    pub fn replace_at(&self, path: &Path, new: Expr) -> Option<Expr> {
        let mut out = self.clone();
        *out.at_mut(path)? = new;
        Some(out)
    }

    /// Every path in pre-order.
    pub fn paths(&self) -> Vec<Path> {
        fn go(e: &Expr, p: Path, out: &mut Vec<Path>) {
            for (i, c) in e.children().into_iter().enumerate() {
                go(c, p.child(i as u8), out);
            }
            out.push(p);
        }
        let mut out = Vec::new();
        go(self, Path::root(), &mut out);
        out.sort();
        out
    }

    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    pub fn occurs_free(&self, name: &str) -> bool {
        match self {
            Expr::Var(x) => x == name,
            Expr::Fun(p, b) => p != name && b.occurs_free(name),
            Expr::Let {
                recursive,
                name: n,
                bound,
                body,
            } => {
                let in_bound = !(*recursive && n == name) && bound.occurs_free(name);
                in_bound || (n != name && body.occurs_free(name))
            }
            Expr::Primitive(p) => p.reads_unfilled(name),
            other => other.children().iter().any(|c| c.occurs_free(name)),
        }
    }

    fn collect_free<'a>(&'a self, bound: &mut Vec<&'a str>, out: &mut BTreeSet<String>) {
        match self {
            Expr::Var(x) => {
                if !bound.contains(&x.as_str()) {
                    out.insert(x.clone());
                }
            }
            Expr::Fun(p, b) => {
                bound.push(p);
                b.collect_free(bound, out);
                bound.pop();
            }
            Expr::Let {
                recursive,
                name,
                bound: rhs,
                body,
            } => {
                if *recursive {
                    bound.push(name);
                    rhs.collect_free(bound, out);
                    bound.pop();
                } else {
                    rhs.collect_free(bound, out);
                }
                bound.push(name);
                body.collect_free(bound, out);
                bound.pop();
            }
            Expr::Primitive(p) => {
                for (n, v) in &p.args {
                    if v.is_none() && !bound.contains(&n.as_str()) {
                        out.insert(n.clone());
                    }
                }
            }
            other => {
                for c in other.children() {
                    c.collect_free(bound, out);
                }
            }
        }
    }

    /// True when the term contains only source-level constructs.
    pub fn is_source_expressible(&self) -> bool {
        match self {
            Expr::Abstract(_) | Expr::Location(_) | Expr::Primitive(_) => false,
            other => other.children().iter().all(|c| c.is_source_expressible()),
        }
    }
}
