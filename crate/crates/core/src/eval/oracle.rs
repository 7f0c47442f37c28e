//! An environment-based big-step evaluator with its own primitive
//! implementations. It shares no evaluation code with the stepping machine and
//! serves as a reference for differential testing.

use std::rc::Rc;

use crate::syntax::{BinOp, Expr};

use super::input::LineSource;
use super::machine::{is_value, EvalError, Outcome};
use super::stdlib::{Prelude, IN_CHANNEL, OUT_CHANNEL};

/// Observable shape of a final value. Functions compare equal regardless of
/// their code, since the two evaluators represent closures differently.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValueSummary {
    Int(i64),
    Bool(bool),
    Str(String),
    Unit,
    Function,
    Abstract(String),
    Loc(usize),
}

impl ValueSummary {
    /// Summary of a value term produced by the stepping machine.
    pub fn of_expr(e: &Expr) -> Option<ValueSummary> {
        if !is_value(e) {
            return None;
        }
        Some(match e {
            Expr::Int(n) => ValueSummary::Int(*n),
            Expr::Bool(b) => ValueSummary::Bool(*b),
            Expr::Str(s) => ValueSummary::Str(s.clone()),
            Expr::Unit => ValueSummary::Unit,
            Expr::Abstract(t) => ValueSummary::Abstract(t.clone()),
            Expr::Location(l) => ValueSummary::Loc(*l),
            _ => ValueSummary::Function,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleOutcome {
    Value(ValueSummary),
    Exception(String),
    OutOfFuel,
}

impl OracleOutcome {
    pub fn of_outcome(o: &Outcome) -> OracleOutcome {
        match o {
            Outcome::Value(e) => OracleOutcome::Value(
                ValueSummary::of_expr(e).expect("run outcomes are values"),
            ),
            Outcome::UncaughtException(x) => OracleOutcome::Exception(x.clone()),
            Outcome::StepLimitExceeded => OracleOutcome::OutOfFuel,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub outcome: OracleOutcome,
    pub stdout: String,
}

#[derive(Clone)]
enum Value {
    Int(i64),
    Bool(bool),
    Str(String),
    Unit,
    Closure(Rc<Closure>),
    Abstract(String),
    Loc(usize),
}

struct Closure {
    param: String,
    body: Expr,
    env: Env,
    self_name: Option<String>,
}

#[derive(Clone, Default)]
struct Env(Option<Rc<Node>>);

struct Node {
    name: String,
    value: Value,
    next: Env,
}

impl Env {
    fn bind(&self, name: &str, value: Value) -> Env {
        Env(Some(Rc::new(Node {
            name: name.to_string(),
            value,
            next: self.clone(),
        })))
    }

    fn lookup(&self, name: &str) -> Option<&Value> {
        let mut cur = &self.0;
        while let Some(node) = cur {
            if node.name == name {
                return Some(&node.value);
            }
            cur = &node.next.0;
        }
        None
    }
}

enum Halt {
    Raise(String),
    Fuel,
    Error(EvalError),
}

impl From<EvalError> for Halt {
    fn from(e: EvalError) -> Self {
        Halt::Error(e)
    }
}

struct Interp<'i> {
    fuel: u64,
    store: Vec<Value>,
    stdout: String,
    input: &'i mut dyn LineSource,
}

fn stuck(msg: &str) -> Halt {
    Halt::Error(EvalError::Stuck(msg.to_string()))
}

impl Interp<'_> {
    fn eval(&mut self, e: &Expr, env: &Env) -> Result<Value, Halt> {
        if self.fuel == 0 {
            return Err(Halt::Fuel);
        }
        self.fuel -= 1;
        match e {
            Expr::Int(n) => Ok(Value::Int(*n)),
            Expr::Bool(b) => Ok(Value::Bool(*b)),
            Expr::Str(s) => Ok(Value::Str(s.clone())),
            Expr::Unit => Ok(Value::Unit),
            Expr::Abstract(t) => Ok(Value::Abstract(t.clone())),
            Expr::Location(l) => Ok(Value::Loc(*l)),
            Expr::Var(x) => env
                .lookup(x)
                .cloned()
                .ok_or_else(|| Halt::Error(EvalError::FreeVariable(x.clone()))),
            Expr::Fun(p, b) => Ok(Value::Closure(Rc::new(Closure {
                param: p.clone(),
                body: (**b).clone(),
                env: env.clone(),
                self_name: None,
            }))),
            Expr::App(f, a) => {
                let fv = self.eval(f, env)?;
                let av = self.eval(a, env)?;
                self.apply(fv, av)
            }
            Expr::Let {
                recursive,
                name,
                bound,
                body,
            } => {
                let v = match (recursive, bound.as_ref()) {
                    (true, Expr::Fun(p, b)) => Value::Closure(Rc::new(Closure {
                        param: p.clone(),
                        body: (**b).clone(),
                        env: env.clone(),
                        self_name: Some(name.clone()),
                    })),
                    (true, _) => return Err(stuck("let rec of a non-function")),
                    (false, b) => self.eval(b, env)?,
                };
                self.eval(body, &env.bind(name, v))
            }
            Expr::If(c, t, f) => match self.eval(c, env)? {
                Value::Bool(true) => self.eval(t, env),
                Value::Bool(false) => self.eval(f, env),
                _ => Err(stuck("if on a non-boolean")),
            },
            Expr::BinOp(op, l, r) => self.binop(*op, l, r, env),
            Expr::Ref(inner) => {
                let v = self.eval(inner, env)?;
                self.store.push(v);
                Ok(Value::Loc(self.store.len() - 1))
            }
            Expr::Deref(inner) => match self.eval(inner, env)? {
                Value::Loc(l) => self
                    .store
                    .get(l)
                    .cloned()
                    .ok_or(Halt::Error(EvalError::DanglingLocation(l))),
                _ => Err(stuck("deref of a non-reference")),
            },
            Expr::Raise(x) => Err(Halt::Raise(x.clone())),
            Expr::TryWith(body, x, handler) => match self.eval(body, env) {
                Err(Halt::Raise(y)) if &y == x => self.eval(handler, env),
                other => other,
            },
            Expr::Primitive(p) => {
                let arg = |n: &str| {
                    env.lookup(n)
                        .cloned()
                        .ok_or_else(|| Halt::Error(EvalError::FreeVariable(n.to_string())))
                };
                match p.name.as_str() {
                    "input_line" => match arg("x")? {
                        Value::Abstract(t) if t == IN_CHANNEL => match self.input.read_line() {
                            Some(line) => Ok(Value::Str(line)),
                            None => Err(Halt::Raise("End_of_file".into())),
                        },
                        _ => Err(stuck("input_line on a non-channel")),
                    },
                    "output_string" => match (arg("x")?, arg("y")?) {
                        (Value::Abstract(t), Value::Str(s)) if t == OUT_CHANNEL => {
                            self.stdout.push_str(&s);
                            Ok(Value::Unit)
                        }
                        _ => Err(stuck("output_string on bad arguments")),
                    },
                    "string_of_int" => match arg("x")? {
                        Value::Int(n) => Ok(Value::Str(format!("{n}"))),
                        _ => Err(stuck("string_of_int on a non-integer")),
                    },
                    other => Err(Halt::Error(EvalError::UnknownPrimitive(other.to_string()))),
                }
            }
        }
    }

    fn apply(&mut self, f: Value, a: Value) -> Result<Value, Halt> {
        let Value::Closure(c) = f else {
            return Err(stuck("application of a non-function"));
        };
        let mut env = c.env.clone();
        if let Some(n) = &c.self_name {
            env = env.bind(n, Value::Closure(Rc::clone(&c)));
        }
        let env = env.bind(&c.param, a);
        self.eval(&c.body, &env)
    }

    fn binop(&mut self, op: BinOp, l: &Expr, r: &Expr, env: &Env) -> Result<Value, Halt> {
        let lv = self.eval(l, env)?;
        match op {
            BinOp::Seq => return self.eval(r, env),
            BinOp::And | BinOp::Or => {
                return match (op, lv) {
                    (BinOp::And, Value::Bool(false)) => Ok(Value::Bool(false)),
                    (BinOp::Or, Value::Bool(true)) => Ok(Value::Bool(true)),
                    (_, Value::Bool(_)) => self.eval(r, env),
                    _ => Err(stuck("boolean operator on a non-boolean")),
                }
            }
            _ => {}
        }
        let rv = self.eval(r, env)?;
        use std::cmp::Ordering;
        let ordering = |a: &Value, b: &Value| -> Result<Ordering, Halt> {
            match (a, b) {
                (Value::Int(x), Value::Int(y)) => Ok(x.cmp(y)),
                (Value::Bool(x), Value::Bool(y)) => Ok(x.cmp(y)),
                (Value::Str(x), Value::Str(y)) => Ok(x.cmp(y)),
                (Value::Unit, Value::Unit) => Ok(Ordering::Equal),
                _ => Err(stuck("comparison of incomparable values")),
            }
        };
        match (op, &lv, &rv) {
            (BinOp::Add, Value::Int(a), Value::Int(b)) => Ok(Value::Int(a.wrapping_add(*b))),
            (BinOp::Sub, Value::Int(a), Value::Int(b)) => Ok(Value::Int(a.wrapping_sub(*b))),
            (BinOp::Mul, Value::Int(a), Value::Int(b)) => Ok(Value::Int(a.wrapping_mul(*b))),
            (BinOp::Div, Value::Int(_), Value::Int(0)) => Err(Halt::Raise("Division_by_zero".into())),
            (BinOp::Div, Value::Int(a), Value::Int(b)) => Ok(Value::Int(a.wrapping_div(*b))),
            (BinOp::Eq, a, b) => Ok(Value::Bool(ordering(a, b)? == Ordering::Equal)),
            (BinOp::Ne, a, b) => Ok(Value::Bool(ordering(a, b)? != Ordering::Equal)),
            (BinOp::Lt, a, b) => Ok(Value::Bool(ordering(a, b)? == Ordering::Less)),
            (BinOp::Gt, a, b) => Ok(Value::Bool(ordering(a, b)? == Ordering::Greater)),
            (BinOp::Le, a, b) => Ok(Value::Bool(ordering(a, b)? != Ordering::Greater)),
            (BinOp::Ge, a, b) => Ok(Value::Bool(ordering(a, b)? != Ordering::Less)),
            (BinOp::Concat, Value::Str(a), Value::Str(b)) => Ok(Value::Str(a.clone() + b)),
            (BinOp::Assign, Value::Loc(l), v) => match self.store.get_mut(*l) {
                Some(cell) => {
                    *cell = v.clone();
                    Ok(Value::Unit)
                }
                None => Err(Halt::Error(EvalError::DanglingLocation(*l))),
            },
            _ => Err(stuck("operator applied to values of the wrong kind")),
        }
    }
}

fn summarize(v: &Value) -> ValueSummary {
    match v {
        Value::Int(n) => ValueSummary::Int(*n),
        Value::Bool(b) => ValueSummary::Bool(*b),
        Value::Str(s) => ValueSummary::Str(s.clone()),
        Value::Unit => ValueSummary::Unit,
        Value::Closure(_) => ValueSummary::Function,
        Value::Abstract(t) => ValueSummary::Abstract(t.clone()),
        Value::Loc(l) => ValueSummary::Loc(*l),
    }
}

/// Evaluates `program` (already channel-bound) under the standard prelude.
/// `fuel` bounds the number of evaluation calls.
pub fn evaluate(
    program: &Expr,
    input: &mut dyn LineSource,
    fuel: u64,
) -> Result<OracleResult, EvalError> {
    let mut interp = Interp {
        fuel,
        store: Vec::new(),
        stdout: String::new(),
        input,
    };
    let mut env = Env::default();
    for (name, def) in Prelude::standard().iter() {
        match interp.eval(def, &env) {
            Ok(v) => env = env.bind(name, v),
            Err(_) => unreachable!("prelude definitions are values"),
        }
    }
    let outcome = match interp.eval(program, &env) {
        Ok(v) => OracleOutcome::Value(summarize(&v)),
        Err(Halt::Raise(x)) => OracleOutcome::Exception(x),
        Err(Halt::Fuel) => OracleOutcome::OutOfFuel,
        Err(Halt::Error(e)) => return Err(e),
    };
    Ok(OracleResult {
        outcome,
        stdout: interp.stdout,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{load, ScriptedInput};

    fn eval(src: &str, stdin: &str) -> OracleResult {
        evaluate(&load(src).unwrap(), &mut ScriptedInput::from_text(stdin), 1_000_000).unwrap()
    }

    #[test]
    fn reference_results() {
        let fact = "let rec factorial n = if n = 1 then 1 else n * factorial (n - 1) in factorial 4";
        assert_eq!(eval(fact, "").outcome, OracleOutcome::Value(ValueSummary::Int(24)));
        assert_eq!(
            eval("try raise Not_found with Not_found -> 42", "").outcome,
            OracleOutcome::Value(ValueSummary::Int(42))
        );
        assert_eq!(
            eval("let r = ref 1 in r := 2; !r", "").outcome,
            OracleOutcome::Value(ValueSummary::Int(2))
        );
        assert_eq!(
            eval("1 + raise Not_found", "").outcome,
            OracleOutcome::Exception("Not_found".into())
        );
    }

    #[test]
    fn io() {
        let r = eval("print_string (input_line stdin)", "SLATE\n");
        assert_eq!(r.stdout, "SLATE");
        assert_eq!(r.outcome, OracleOutcome::Value(ValueSummary::Unit));
    }

    #[test]
    fn fuel_runs_out() {
        let r = evaluate(&load("let rec f x = f x in f 1").unwrap(), &mut ScriptedInput::empty(), 1000).unwrap();
        assert_eq!(r.outcome, OracleOutcome::OutOfFuel);
    }
}
