use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::syntax::{BinOp, Expr, Path, Primitive};

use super::input::LineSource;
use super::scope::{relocate, BinderId, Entry, Resolved, Scope};
use super::stdlib::{Prelude, IN_CHANNEL, OUT_CHANNEL};
use super::store::Store;

pub const DEFAULT_MAX_STEPS: usize = 1_000_000;

/// The rewrite rule applied by one micro-step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StepKind {
    VarSubst,
    Arith,
    Compare,
    StrConcat,
    BoolShortCircuit,
    IfResolve,
    Beta,
    Unfold,
    LetElim,
    LetPushIntoFun,
    RefAlloc,
    Deref,
    Assign,
    Seq,
    RaisePropagate,
    TryResolve,
    PrimApply,
}

impl StepKind {
    pub const ALL: [StepKind; 17] = [
        StepKind::VarSubst,
        StepKind::Arith,
        StepKind::Compare,
        StepKind::StrConcat,
        StepKind::BoolShortCircuit,
        StepKind::IfResolve,
        StepKind::Beta,
        StepKind::Unfold,
        StepKind::LetElim,
        StepKind::LetPushIntoFun,
        StepKind::RefAlloc,
        StepKind::Deref,
        StepKind::Assign,
        StepKind::Seq,
        StepKind::RaisePropagate,
        StepKind::TryResolve,
        StepKind::PrimApply,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StepKind::VarSubst => "VarSubst",
            StepKind::Arith => "Arith",
            StepKind::Compare => "Compare",
            StepKind::StrConcat => "StrConcat",
            StepKind::BoolShortCircuit => "BoolShortCircuit",
            StepKind::IfResolve => "IfResolve",
            StepKind::Beta => "Beta",
            StepKind::Unfold => "Unfold",
            StepKind::LetElim => "LetElim",
            StepKind::LetPushIntoFun => "LetPushIntoFun",
            StepKind::RefAlloc => "RefAlloc",
            StepKind::Deref => "Deref",
            StepKind::Assign => "Assign",
            StepKind::Seq => "Seq",
            StepKind::RaisePropagate => "RaisePropagate",
            StepKind::TryResolve => "TryResolve",
            StepKind::PrimApply => "PrimApply",
        }
    }
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StepKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StepKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown step kind '{s}'"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("free variable '{0}'")]
    FreeVariable(String),
    #[error("unknown primitive '<<{0}>>'")]
    UnknownPrimitive(String),
    #[error("reference to unallocated cell {0}")]
    DanglingLocation(usize),
    #[error("stuck: {0}")]
    Stuck(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("evaluation failed at step {step}: {error}")]
pub struct RunError {
    pub step: usize,
    pub error: EvalError,
}

/// One elementary rewrite of the whole program term.
#[derive(Debug, Clone, PartialEq)]
pub struct MicroStep {
    pub index: usize,
    pub before: Arc<Expr>,
    pub after: Arc<Expr>,
    pub kind: StepKind,
    /// Location of the rewritten subterm in `before`.
    pub redex: Path,
    /// The redex lies inside code entered through a prelude function.
    pub stdlib_origin: bool,
    /// This step is a call of a prelude function from outside the prelude.
    pub enters_stdlib: bool,
    /// Name of the applied function for `Unfold` steps.
    pub function: Option<String>,
    /// Exception name involved in this step.
    pub exception: Option<String>,
    pub stdout: Option<String>,
    pub stdin: Option<String>,
    pub store_after: Arc<Store>,
    /// Prelude calls still in progress after this step.
    pub stdlib_regions: Vec<Path>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MicroTrace {
    pub initial: Arc<Expr>,
    pub steps: Vec<MicroStep>,
}

impl MicroTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Term after `count` steps.
    pub fn term_after(&self, count: usize) -> &Arc<Expr> {
        if count == 0 {
            &self.initial
        } else {
            &self.steps[count - 1].after
        }
    }

    pub fn last_term(&self) -> &Arc<Expr> {
        self.term_after(self.steps.len())
    }

    pub fn stdout(&self) -> String {
        self.steps
            .iter()
            .filter_map(|s| s.stdout.as_deref())
            .collect()
    }

    pub fn regions_after(&self, count: usize) -> &[Path] {
        if count == 0 {
            &[]
        } else {
            &self.steps[count - 1].stdlib_regions
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Value(Expr),
    UncaughtException(String),
    StepLimitExceeded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub outcome: Outcome,
    pub trace: MicroTrace,
    pub final_store: Arc<Store>,
}

/// A rewrite chosen by [`Machine::micro_step`].
#[derive(Debug, Clone, PartialEq)]
pub struct Rewrite {
    pub kind: StepKind,
    pub redex: Path,
    pub after: Expr,
    pub function: Option<String>,
    pub exception: Option<String>,
    pub enters_stdlib: bool,
    pub stdout: Option<String>,
    pub stdin: Option<String>,
}

enum Action {
    Replace(Expr),
    Alloc(Expr),
    Assign(usize, Expr),
    Prim(Primitive),
}

struct Located {
    path: Path,
    kind: StepKind,
    action: Action,
    function: Option<String>,
    exception: Option<String>,
    enters_stdlib: bool,
}

impl Located {
    fn new(path: Path, kind: StepKind, action: Action) -> Self {
        Located {
            path,
            kind,
            action,
            function: None,
            exception: None,
            enters_stdlib: false,
        }
    }

    fn replace(path: Path, kind: StepKind, new: Expr) -> Self {
        Located::new(path, kind, Action::Replace(new))
    }

    fn raise(path: Path, name: &str) -> Self {
        let mut l = Located::replace(path, StepKind::RaisePropagate, Expr::Raise(name.to_string()));
        l.exception = Some(name.to_string());
        l
    }
}

/// True for terms with no further rewrite: literals, functions, channels,
/// locations, and `let` frames closing over a function.
pub fn is_value(e: &Expr) -> bool {
    match e {
        Expr::Int(_)
        | Expr::Bool(_)
        | Expr::Str(_)
        | Expr::Unit
        | Expr::Fun(..)
        | Expr::Abstract(_)
        | Expr::Location(_) => true,
        Expr::Let {
            name, bound, body, ..
        } => is_value(bound) && is_value(body) && body.occurs_free(name),
        _ => false,
    }
}

fn stuck(msg: impl Into<String>) -> EvalError {
    EvalError::Stuck(msg.into())
}

fn arith(op: BinOp, a: i64, b: i64) -> Expr {
    match op {
        BinOp::Add => Expr::Int(a.wrapping_add(b)),
        BinOp::Sub => Expr::Int(a.wrapping_sub(b)),
        BinOp::Mul => Expr::Int(a.wrapping_mul(b)),
        BinOp::Div if b == 0 => Expr::Raise("Division_by_zero".into()),
        BinOp::Div => Expr::Int(a.wrapping_div(b)),
        _ => unreachable!("not an arithmetic operator"),
    }
}

fn compare(op: BinOp, l: &Expr, r: &Expr) -> Result<Expr, EvalError> {
    use std::cmp::Ordering;
    let ord: Ordering = match (l, r) {
        (Expr::Int(a), Expr::Int(b)) => a.cmp(b),
        (Expr::Str(a), Expr::Str(b)) => a.cmp(b),
        (Expr::Bool(a), Expr::Bool(b)) => a.cmp(b),
        (Expr::Unit, Expr::Unit) => Ordering::Equal,
        _ => return Err(stuck(format!("cannot compare with '{}'", op.symbol()))),
    };
    let b = match op {
        BinOp::Eq => ord == Ordering::Equal,
        BinOp::Ne => ord != Ordering::Equal,
        BinOp::Lt => ord == Ordering::Less,
        BinOp::Gt => ord == Ordering::Greater,
        BinOp::Le => ord != Ordering::Greater,
        BinOp::Ge => ord != Ordering::Less,
        _ => unreachable!("not a comparison"),
    };
    Ok(Expr::Bool(b))
}

/// Where a subterm at `p` (in the term before a rewrite) ends up afterwards.
/// `None` when it is consumed by the rewrite.
pub fn map_forward(kind: StepKind, redex: &Path, p: &Path) -> Option<Path> {
    if !p.starts_with(redex) {
        return Some(p.clone());
    }
    let rest = &p.0[redex.len()..];
    match (kind, rest) {
        (_, []) => Some(redex.clone()),
        (StepKind::LetElim, [1, tail @ ..]) => Some(redex.join(tail)),
        (StepKind::LetPushIntoFun, [1, 0, tail @ ..]) => Some(redex.join(&[0, 1]).join(tail)),
        (StepKind::LetPushIntoFun, [0, tail @ ..]) => Some(redex.join(&[0, 0]).join(tail)),
        (StepKind::LetPushIntoFun, [1]) => Some(redex.clone()),
        _ => None,
    }
}

/// Where a subterm at `p` (in the term after a rewrite) came from.
pub fn map_backward(kind: StepKind, redex: &Path, p: &Path) -> Path {
    if !p.starts_with(redex) {
        return p.clone();
    }
    let rest = &p.0[redex.len()..];
    match (kind, rest) {
        (StepKind::LetElim, tail) => redex.join(&[1]).join(tail),
        (StepKind::LetPushIntoFun, [0, 1, tail @ ..]) => redex.join(&[1, 0]).join(tail),
        (StepKind::LetPushIntoFun, [0, 0, tail @ ..]) => redex.join(&[0]).join(tail),
        (StepKind::LetPushIntoFun, [0]) => redex.join(&[1]),
        _ => redex.clone(),
    }
}

/// The small-step call-by-value machine over a fixed prelude.
#[derive(Debug, Clone, Copy)]
pub struct Machine<'p> {
    prelude: &'p Prelude,
}

impl Machine<'static> {
    pub fn standard() -> Self {
        Machine {
            prelude: Prelude::standard(),
        }
    }
}

impl Default for Machine<'static> {
    fn default() -> Self {
        Machine::standard()
    }
}

impl<'p> Machine<'p> {
    pub fn with_prelude(prelude: &'p Prelude) -> Self {
        Machine { prelude }
    }

    pub fn prelude(&self) -> &'p Prelude {
        self.prelude
    }

    /// The next redex and the rule that applies there; `None` for values and
    /// for an unhandled `raise` at the top.
    pub fn find_redex(&self, e: &Expr, store: &Store) -> Result<Option<(Path, StepKind)>, EvalError> {
        Ok(self.locate(e, store)?.map(|l| (l.path, l.kind)))
    }

    fn locate(&self, e: &Expr, store: &Store) -> Result<Option<Located>, EvalError> {
        let mut scope = Scope::new(self.prelude);
        Analyzer { store }.analyze(e, Path::root(), &mut scope, false)
    }

    /// Performs exactly one rewrite. Returns `None` when `e` has no redex.
    pub fn micro_step(
        &self,
        e: &Expr,
        store: &mut Store,
        input: &mut dyn LineSource,
    ) -> Result<Option<Rewrite>, EvalError> {
        let Some(loc) = self.locate(e, store)? else {
            return Ok(None);
        };
        let mut stdout = None;
        let mut stdin = None;
        let mut exception = loc.exception;
        let new = match loc.action {
            Action::Replace(new) => new,
            Action::Alloc(v) => Expr::Location(store.alloc(v)),
            Action::Assign(id, v) => {
                if !store.set(id, v) {
                    return Err(EvalError::DanglingLocation(id));
                }
                Expr::Unit
            }
            Action::Prim(p) => {
                let r = apply_primitive(&p, input)?;
                stdout = r.1;
                stdin = r.2;
                if let Expr::Raise(x) = &r.0 {
                    exception = Some(x.clone());
                }
                r.0
            }
        };
        let after = e
            .replace_at(&loc.path, new)
            .expect("redex path resolves in its own term");
        Ok(Some(Rewrite {
            kind: loc.kind,
            redex: loc.path,
            after,
            function: loc.function,
            exception,
            enters_stdlib: loc.enters_stdlib,
            stdout,
            stdin,
        }))
    }

    /// Rewrites until a value, an uncaught exception, or `max_steps`.
    pub fn run(
        &self,
        program: &Expr,
        input: &mut dyn LineSource,
        max_steps: usize,
    ) -> Result<RunResult, RunError> {
        let initial = Arc::new(program.clone());
        let mut term = Arc::clone(&initial);
        let mut store = Arc::new(Store::new());
        let mut regions: Vec<Path> = Vec::new();
        let mut steps: Vec<MicroStep> = Vec::new();
        let outcome = loop {
            if is_value(&term) {
                break Outcome::Value((*term).clone());
            }
            if let Expr::Raise(x) = term.as_ref() {
                break Outcome::UncaughtException(x.clone());
            }
            if steps.len() >= max_steps {
                break Outcome::StepLimitExceeded;
            }
            let index = steps.len();
            let fail = |error| RunError { step: index, error };
            let mut next_store = (*store).clone();
            let rw = self
                .micro_step(&term, &mut next_store, input)
                .map_err(fail)?
                .ok_or_else(|| fail(stuck("no applicable rule")))?;
            if next_store != *store {
                store = Arc::new(next_store);
            }
            let stdlib_origin = regions.iter().any(|r| rw.redex.starts_with(r));
            let after = Arc::new(rw.after);
            let mut next_regions: Vec<Path> = regions
                .iter()
                .filter_map(|r| map_forward(rw.kind, &rw.redex, r))
                .collect();
            if rw.enters_stdlib {
                next_regions.push(rw.redex.clone());
            }
            next_regions.retain(|r| {
                after
                    .at(r)
                    .is_some_and(|sub| !is_value(sub) && !matches!(sub, Expr::Raise(_)))
            });
            next_regions.sort();
            next_regions.dedup();
            regions = next_regions;
            steps.push(MicroStep {
                index,
                before: Arc::clone(&term),
                after: Arc::clone(&after),
                kind: rw.kind,
                redex: rw.redex,
                stdlib_origin,
                enters_stdlib: rw.enters_stdlib,
                function: rw.function,
                exception: rw.exception,
                stdout: rw.stdout,
                stdin: rw.stdin,
                store_after: Arc::clone(&store),
                stdlib_regions: regions.clone(),
            });
            term = after;
        };
        Ok(RunResult {
            outcome,
            trace: MicroTrace { initial, steps },
            final_store: store,
        })
    }
}

/// Executes a saturated primitive: `(result, stdout, stdin line)`.
fn apply_primitive(
    p: &Primitive,
    input: &mut dyn LineSource,
) -> Result<(Expr, Option<String>, Option<String>), EvalError> {
    let arg = |name: &str| {
        p.arg(name)
            .ok_or_else(|| EvalError::FreeVariable(name.to_string()))
    };
    match p.name.as_str() {
        "input_line" => match arg("x")? {
            Expr::Abstract(tag) if tag == IN_CHANNEL => match input.read_line() {
                Some(line) => Ok((Expr::Str(line.clone()), None, Some(line))),
                None => Ok((Expr::Raise("End_of_file".into()), None, None)),
            },
            _ => Err(stuck("input_line expects an input channel")),
        },
        "output_string" => match (arg("x")?, arg("y")?) {
            (Expr::Abstract(tag), Expr::Str(s)) if tag == OUT_CHANNEL => {
                let out = (!s.is_empty()).then(|| s.clone());
                Ok((Expr::Unit, out, None))
            }
            _ => Err(stuck("output_string expects an output channel and a string")),
        },
        "string_of_int" => match arg("x")? {
            Expr::Int(n) => Ok((Expr::Str(n.to_string()), None, None)),
            _ => Err(stuck("string_of_int expects an integer")),
        },
        other => Err(EvalError::UnknownPrimitive(other.to_string())),
    }
}

struct Analyzer<'s> {
    store: &'s Store,
}

impl Analyzer<'_> {
    fn analyze<'a>(
        &self,
        e: &'a Expr,
        path: Path,
        scope: &mut Scope<'a>,
        applied: bool,
    ) -> Result<Option<Located>, EvalError> {
        match e {
            Expr::Int(_)
            | Expr::Bool(_)
            | Expr::Str(_)
            | Expr::Unit
            | Expr::Fun(..)
            | Expr::Abstract(_)
            | Expr::Location(_)
            | Expr::Raise(_) => Ok(None),
            Expr::Var(x) => substitute(x, path, scope).map(Some),
            Expr::Primitive(p) => {
                if let Some((name, _)) = p.args.iter().find(|(_, v)| v.is_none()) {
                    return Err(EvalError::FreeVariable(name.clone()));
                }
                Ok(Some(Located::new(path, StepKind::PrimApply, Action::Prim(p.clone()))))
            }
            Expr::Let {
                recursive,
                name,
                bound,
                body,
            } => {
                if !is_value(bound) {
                    if let Expr::Raise(x) = bound.as_ref() {
                        return Ok(Some(Located::raise(path, x)));
                    }
                    return self.analyze(bound, path.child(0), scope, false);
                }
                if !body.occurs_free(name) {
                    return Ok(Some(Located::replace(path, StepKind::LetElim, (**body).clone())));
                }
                if let Expr::Primitive(p) = body.as_ref() {
                    if p.reads_unfilled(name) {
                        let mut filled = p.clone();
                        for slot in filled.args.iter_mut().filter(|(n, v)| n == name && v.is_none()) {
                            slot.1 = Some(bound.clone());
                        }
                        return Ok(Some(Located::replace(
                            path,
                            StepKind::LetElim,
                            Expr::Primitive(filled),
                        )));
                    }
                }
                let entry = Entry {
                    name: name.as_str(),
                    id: BinderId::Frame(path.clone()),
                    value: Some(bound.as_ref()),
                    recursive: *recursive,
                };
                if is_value(body) {
                    if !applied {
                        return Ok(None);
                    }
                    if let Expr::Fun(param, fbody) = body.as_ref() {
                        let mut def = scope.clone();
                        let mut target = scope.clone();
                        target.push(Entry {
                            name: param.as_str(),
                            id: BinderId::Param(path.child(1)),
                            value: None,
                            recursive: false,
                        });
                        if *recursive {
                            def.push(entry.clone());
                            target.push(entry);
                        }
                        let moved = relocate(bound, &def, &target);
                        return Ok(Some(Located::replace(
                            path,
                            StepKind::LetPushIntoFun,
                            Expr::Fun(
                                param.clone(),
                                Box::new(Expr::Let {
                                    recursive: *recursive,
                                    name: name.clone(),
                                    bound: Box::new(moved),
                                    body: fbody.clone(),
                                }),
                            ),
                        )));
                    }
                }
                scope.push(entry);
                let r = self.analyze(body, path.child(1), scope, applied);
                scope.frames.pop();
                r
            }
            Expr::App(f, a) => {
                if let Expr::Raise(x) = f.as_ref() {
                    return Ok(Some(Located::raise(path, x)));
                }
                if let Expr::Var(name) = f.as_ref() {
                    let (w, def, _) = scope
                        .definition(name)
                        .ok_or_else(|| EvalError::FreeVariable(name.clone()))?;
                    if let Expr::Fun(param, fbody) = w {
                        if let Expr::Raise(x) = a.as_ref() {
                            return Ok(Some(Located::raise(path, x)));
                        }
                        if !is_value(a) {
                            return self.analyze(a, path.child(1), scope, false);
                        }
                        if scope.agrees_with(&def, w) {
                            let global = matches!(scope.resolve(name), Some(Resolved::Global(_)));
                            let mut l = Located::replace(
                                path,
                                StepKind::Unfold,
                                Expr::let_(param, (**a).clone(), (**fbody).clone()),
                            );
                            l.function = Some(name.clone());
                            l.enters_stdlib = global;
                            return Ok(Some(l));
                        }
                    }
                    return substitute(name, path.child(0), scope).map(Some);
                }
                if let Some(l) = self.analyze(f, path.child(0), scope, true)? {
                    return Ok(Some(l));
                }
                if !is_value(f) {
                    return Err(stuck("function position cannot be evaluated"));
                }
                if let Expr::Raise(x) = a.as_ref() {
                    return Ok(Some(Located::raise(path, x)));
                }
                if !is_value(a) {
                    return self.analyze(a, path.child(1), scope, false);
                }
                match f.as_ref() {
                    Expr::Fun(param, body) => Ok(Some(Located::replace(
                        path,
                        StepKind::Beta,
                        Expr::let_(param, (**a).clone(), (**body).clone()),
                    ))),
                    _ => Err(stuck("application of a non-function value")),
                }
            }
            Expr::If(c, t, f) => {
                if let Some(l) = self.operand(c, &path, 0, scope)? {
                    return Ok(Some(l));
                }
                match c.as_ref() {
                    Expr::Bool(b) => Ok(Some(Located::replace(
                        path,
                        StepKind::IfResolve,
                        if *b { (**t).clone() } else { (**f).clone() },
                    ))),
                    _ => Err(stuck("if condition is not a boolean")),
                }
            }
            Expr::BinOp(op, l, r) => {
                if let Some(found) = self.operand(l, &path, 0, scope)? {
                    return Ok(Some(found));
                }
                match op {
                    BinOp::Seq => return Ok(Some(Located::replace(path, StepKind::Seq, (**r).clone()))),
                    BinOp::And | BinOp::Or => {
                        let Expr::Bool(b) = l.as_ref() else {
                            return Err(stuck(format!("'{}' expects booleans", op.symbol())));
                        };
                        let result = match (op, b) {
                            (BinOp::And, true) | (BinOp::Or, false) => (**r).clone(),
                            (BinOp::And, false) => Expr::Bool(false),
                            _ => Expr::Bool(true),
                        };
                        return Ok(Some(Located::replace(path, StepKind::BoolShortCircuit, result)));
                    }
                    _ => {}
                }
                if let Some(found) = self.operand(r, &path, 1, scope)? {
                    return Ok(Some(found));
                }
                match (op, l.as_ref(), r.as_ref()) {
                    (op, Expr::Int(a), Expr::Int(b)) if op.is_arith() => {
                        Ok(Some(Located::replace(path, StepKind::Arith, arith(*op, *a, *b))))
                    }
                    (op, _, _) if op.is_arith() => {
                        Err(stuck(format!("'{}' expects integers", op.symbol())))
                    }
                    (op, l, r) if op.is_compare() => Ok(Some(Located::replace(
                        path,
                        StepKind::Compare,
                        compare(*op, l, r)?,
                    ))),
                    (BinOp::Concat, Expr::Str(a), Expr::Str(b)) => Ok(Some(Located::replace(
                        path,
                        StepKind::StrConcat,
                        Expr::Str(format!("{a}{b}")),
                    ))),
                    (BinOp::Concat, _, _) => Err(stuck("'^' expects strings")),
                    (BinOp::Assign, Expr::Location(id), v) => {
                        if !self.store.contains(*id) {
                            return Err(EvalError::DanglingLocation(*id));
                        }
                        let closed = relocate(v, scope, &scope.globals_only());
                        Ok(Some(Located::new(path, StepKind::Assign, Action::Assign(*id, closed))))
                    }
                    (BinOp::Assign, _, _) => Err(stuck("':=' expects a reference")),
                    _ => unreachable!("all operators handled"),
                }
            }
            Expr::Ref(inner) => {
                if let Some(l) = self.operand(inner, &path, 0, scope)? {
                    return Ok(Some(l));
                }
                let closed = relocate(inner, scope, &scope.globals_only());
                Ok(Some(Located::new(path, StepKind::RefAlloc, Action::Alloc(closed))))
            }
            Expr::Deref(inner) => {
                if let Some(l) = self.operand(inner, &path, 0, scope)? {
                    return Ok(Some(l));
                }
                match inner.as_ref() {
                    Expr::Location(id) => {
                        let v = self
                            .store
                            .get(*id)
                            .ok_or(EvalError::DanglingLocation(*id))?;
                        let moved = relocate(v, &scope.globals_only(), scope);
                        Ok(Some(Located::replace(path, StepKind::Deref, moved)))
                    }
                    _ => Err(stuck("'!' expects a reference")),
                }
            }
            Expr::TryWith(body, handles, handler) => match body.as_ref() {
                Expr::Raise(x) => {
                    let new = if x == handles {
                        (**handler).clone()
                    } else {
                        Expr::Raise(x.clone())
                    };
                    let mut l = Located::replace(path, StepKind::TryResolve, new);
                    l.exception = Some(x.clone());
                    Ok(Some(l))
                }
                b if is_value(b) => Ok(Some(Located::replace(path, StepKind::TryResolve, b.clone()))),
                b => self.analyze(b, path.child(0), scope, false),
            },
        }
    }

    /// Evaluates a strict operand: propagates a raise from it, descends into
    /// it while it is not a value, and yields `None` once it is a value.
    fn operand<'a>(
        &self,
        child: &'a Expr,
        path: &Path,
        index: u8,
        scope: &mut Scope<'a>,
    ) -> Result<Option<Located>, EvalError> {
        if let Expr::Raise(x) = child {
            return Ok(Some(Located::raise(path.clone(), x)));
        }
        if is_value(child) {
            return Ok(None);
        }
        match self.analyze(child, path.child(index), scope, false)? {
            Some(l) => Ok(Some(l)),
            None => Err(stuck("operand cannot be evaluated")),
        }
    }
}

fn substitute(name: &str, path: Path, scope: &Scope<'_>) -> Result<Located, EvalError> {
    let (value, def, _) = scope
        .definition(name)
        .ok_or_else(|| EvalError::FreeVariable(name.to_string()))?;
    Ok(Located::replace(path, StepKind::VarSubst, relocate(value, &def, scope)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::input::ScriptedInput;
    use crate::eval::load;
    use crate::syntax::{parse_str, to_source};

    fn run_src(src: &str, stdin: &str) -> RunResult {
        let e = load(src).unwrap();
        Machine::standard()
            .run(&e, &mut ScriptedInput::from_text(stdin), DEFAULT_MAX_STEPS)
            .unwrap()
    }

    fn redex_of(src: &str) -> Option<(String, StepKind)> {
        let e = parse_str(src).unwrap();
        Machine::standard()
            .find_redex(&e, &Store::new())
            .unwrap()
            .map(|(p, k)| (to_source(e.at(&p).unwrap()), k))
    }

    const FACT: &str =
        "let rec factorial n = if n = 1 then 1 else n * factorial (n - 1) in ";

    #[test]
    fn values() {
        assert!(is_value(&Expr::Int(24)));
        assert!(is_value(&parse_str("fun y -> y").unwrap()));
        assert!(!is_value(&parse_str("factorial 4").unwrap()));
        assert!(is_value(&parse_str("let x = 1 in fun y -> x").unwrap()));
        assert!(!is_value(&parse_str("let x = 1 in fun y -> y").unwrap()));
    }

    #[test]
    fn redex_positions() {
        let src = format!("{FACT}4 * factorial 3");
        assert_eq!(redex_of(&src), Some(("factorial 3".into(), StepKind::Unfold)));
        assert_eq!(redex_of("(1 + 2) * (3 + 4)"), Some(("1 + 2".into(), StepKind::Arith)));
        assert_eq!(redex_of("7"), None);
        assert_eq!(redex_of("false && 1 / 0 = 1"), Some(("false && 1 / 0 = 1".into(), StepKind::BoolShortCircuit)));
    }

    #[test]
    fn free_variable_is_reported() {
        let e = parse_str("1 + y").unwrap();
        let err = Machine::standard().find_redex(&e, &Store::new()).unwrap_err();
        assert_eq!(err, EvalError::FreeVariable("y".into()));
    }

    #[test]
    fn unfold_keeps_recursive_binding() {
        let e = parse_str(&format!("{FACT}factorial 4")).unwrap();
        let rw = Machine::standard()
            .micro_step(&e, &mut Store::new(), &mut ScriptedInput::empty())
            .unwrap()
            .unwrap();
        assert_eq!(rw.kind, StepKind::Unfold);
        assert_eq!(rw.function.as_deref(), Some("factorial"));
        assert_eq!(
            to_source(&rw.after),
            format!("{FACT}let n = 4 in if n = 1 then 1 else n * factorial (n - 1)")
        );
    }

    #[test]
    fn beta_introduces_let() {
        let e = parse_str(r#"(fun y -> 1) "SLATE""#).unwrap();
        let rw = Machine::standard()
            .micro_step(&e, &mut Store::new(), &mut ScriptedInput::empty())
            .unwrap()
            .unwrap();
        assert_eq!(rw.kind, StepKind::Beta);
        assert_eq!(to_source(&rw.after), r#"let y = "SLATE" in 1"#);
    }

    #[test]
    fn if_resolve() {
        assert_eq!(redex_of("if true then 1 else 2").unwrap().1, StepKind::IfResolve);
    }

    #[test]
    fn run_outcomes() {
        assert_eq!(run_src(&format!("{FACT}factorial 4"), "").outcome, Outcome::Value(Expr::Int(24)));
        assert_eq!(run_src("let f x = 2 * x in f 3 = 1 + 2 * 3", "").outcome, Outcome::Value(Expr::Bool(false)));
        assert_eq!(
            run_src("1 + raise Not_found", "").outcome,
            Outcome::UncaughtException("Not_found".into())
        );
        assert_eq!(run_src("try raise Not_found with Not_found -> 42", "").outcome, Outcome::Value(Expr::Int(42)));
        assert_eq!(run_src("try raise Exit with Not_found -> 42", "").outcome, Outcome::UncaughtException("Exit".into()));
        assert_eq!(run_src("let r = ref 1 in r := 2; !r", "").outcome, Outcome::Value(Expr::Int(2)));
        assert_eq!(run_src("7 / 0", "").outcome, Outcome::UncaughtException("Division_by_zero".into()));
        assert_eq!(run_src("input_line stdin", "").outcome, Outcome::UncaughtException("End_of_file".into()));
    }

    #[test]
    fn step_limit() {
        let r = Machine::standard()
            .run(&load("let rec f x = f x in f 1").unwrap(), &mut ScriptedInput::empty(), 50)
            .unwrap();
        assert_eq!(r.outcome, Outcome::StepLimitExceeded);
        assert_eq!(r.trace.len(), 50);
    }

    #[test]
    fn slate_io() {
        let r = run_src("print_string (input_line stdin)", "SLATE\n");
        assert_eq!(r.outcome, Outcome::Value(Expr::Unit));
        assert_eq!(r.trace.stdout(), "SLATE");
        assert_eq!(r.trace.len(), 12);
        assert!(r.trace.steps.iter().all(|s| s.stdlib_origin || s.enters_stdlib));
        let consumed: Vec<_> = r.trace.steps.iter().filter_map(|s| s.stdin.clone()).collect();
        assert_eq!(consumed, vec!["SLATE".to_string()]);
        let out = r.trace.steps.iter().find(|s| s.stdout.is_some()).unwrap();
        assert_eq!(out.kind, StepKind::PrimApply);
    }

    #[test]
    fn print_int_goes_through_string_of_int() {
        let r = run_src("print_int 42; print_newline ()", "");
        assert_eq!(r.trace.stdout(), "42\n");
    }

    #[test]
    fn shadowed_capture_is_avoided() {
        let src = "let x = 1 in let f = fun y -> x + y in let x = 10 in f 5";
        assert_eq!(run_src(src, "").outcome, Outcome::Value(Expr::Int(6)));
        let src = "let x = 1 in let g = fun u -> fun v -> x in let x = 2 in g 0 0";
        assert_eq!(run_src(src, "").outcome, Outcome::Value(Expr::Int(1)));
    }

    #[test]
    fn refs_hold_closed_values() {
        let src = "let a = 3 in let r = ref (fun z -> a) in let a = 4 in (!r) 0 + a";
        assert_eq!(run_src(src, "").outcome, Outcome::Value(Expr::Int(7)));
    }

    #[test]
    fn errors_carry_step_index() {
        let e = load("let x = 1 in x + true").unwrap();
        let err = Machine::standard().run(&e, &mut ScriptedInput::empty(), 100).unwrap_err();
        assert!(matches!(err.error, EvalError::Stuck(_)));
        assert_eq!(err.step, 2);
    }

    #[test]
    fn path_transport_round_trips() {
        let r = Path(vec![1]);
        for kind in [StepKind::LetElim, StepKind::LetPushIntoFun] {
            for p in [vec![1, 1, 0], vec![1, 0], vec![0], vec![1, 0, 1]] {
                let p = Path(p);
                if let Some(q) = map_forward(kind, &r, &p) {
                    assert_eq!(map_backward(kind, &r, &q), p, "{kind} {p}");
                }
            }
        }
    }

    #[test]
    fn deterministic() {
        let a = run_src(&format!("{FACT}factorial 5"), "");
        let b = run_src(&format!("{FACT}factorial 5"), "");
        assert_eq!(a, b);
    }
}
