//! Random closed, well-typed programs for differential testing.

use proptest::prelude::*;
use proptest::test_runner::{RngAlgorithm, TestRng};

/// Fixed program input used with generated programs. A third read raises
/// `End_of_file`.
pub const STDIN: &str = "alpha\nbeta\n";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ty {
    Int,
    Bool,
    Str,
    Unit,
    /// `int -> int`
    Fn,
    /// `int ref`
    Ref,
    /// A recursive function under definition; never referenced directly.
    Hidden,
}

const RESULT_TYPES: [Ty; 5] = [Ty::Int, Ty::Bool, Ty::Str, Ty::Unit, Ty::Fn];
const EXCEPTIONS: [&str; 4] = ["Not_found", "Exit", "Division_by_zero", "End_of_file"];

pub struct Gen {
    rng: TestRng,
    scope: Vec<(String, Ty)>,
}

impl Gen {
    pub fn new(seed: [u8; 32]) -> Self {
        Gen {
            rng: TestRng::from_seed(RngAlgorithm::ChaCha, &seed),
            scope: Vec::new(),
        }
    }

    fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.rng.random_range(0..items.len())]
    }

    fn chance(&mut self, p: f64) -> bool {
        self.rng.random_bool(p)
    }

    /// Visible variables of type `ty` (innermost binding of each name only).
    fn vars(&self, ty: Ty) -> Vec<String> {
        let mut seen = Vec::new();
        let mut out = Vec::new();
        for (name, t) in self.scope.iter().rev() {
            if seen.contains(name) {
                continue;
            }
            seen.push(name.clone());
            if *t == ty {
                out.push(name.clone());
            }
        }
        out
    }

    fn with<T>(&mut self, name: &str, ty: Ty, f: impl FnOnce(&mut Self) -> T) -> T {
        self.scope.push((name.to_string(), ty));
        let r = f(self);
        self.scope.pop();
        r
    }

    pub fn program(&mut self, depth: u32) -> String {
        let ty = *self.pick(&RESULT_TYPES);
        self.expr(ty, depth)
    }

    fn int_literal(&mut self) -> String {
        let n: i64 = self.rng.random_range(-3..20);
        if n < 0 {
            format!("({n})")
        } else {
            n.to_string()
        }
    }

    fn leaf(&mut self, ty: Ty) -> String {
        let vars = self.vars(ty);
        if !vars.is_empty() && self.chance(0.5) {
            return self.pick(&vars).clone();
        }
        match ty {
            Ty::Int => {
                let refs = self.vars(Ty::Ref);
                if !refs.is_empty() && self.chance(0.3) {
                    return format!("(!{})", self.pick(&refs));
                }
                if self.chance(0.05) {
                    return format!("(raise {})", self.pick(&EXCEPTIONS[..2]));
                }
                self.int_literal()
            }
            Ty::Bool => self.pick(&["true", "false"]).to_string(),
            Ty::Str => self.pick(&["\"a\"", "\"bc\"", "\"\"", "\"x\\n\""]).to_string(),
            Ty::Unit => "()".to_string(),
            Ty::Fn => {
                let p = self.pick(&["x", "y", "n"]).to_string();
                let k = self.int_literal();
                let op = self.pick(&["+", "-", "*"]);
                format!("(fun {p} -> {p} {op} {k})")
            }
            Ty::Ref => format!("(ref {})", self.int_literal()),
            Ty::Hidden => unreachable!("hidden names are never generated"),
        }
    }

    pub fn expr(&mut self, ty: Ty, depth: u32) -> String {
        if depth == 0 || self.chance(0.2) {
            return self.leaf(ty);
        }
        let d = depth - 1;
        match self.rng.random_range(0..10) {
            0 => return self.let_expr(ty, d),
            1 => {
                let c = self.expr(Ty::Bool, d);
                let t = self.expr(ty, d);
                let e = self.expr(ty, d);
                return format!("(if {c} then {t} else {e})");
            }
            2 => {
                let body = self.expr(ty, d);
                let x = *self.pick(&EXCEPTIONS);
                let h = self.expr(ty, d);
                return format!("(try {body} with {x} -> {h})");
            }
            3 if ty != Ty::Ref => {
                let u = self.expr(Ty::Unit, d);
                let e = self.expr(ty, d);
                return format!("({u}; {e})");
            }
            _ => {}
        }
        match ty {
            Ty::Int => self.int_expr(d),
            Ty::Bool => self.bool_expr(d),
            Ty::Str => self.str_expr(d),
            Ty::Unit => self.unit_expr(d),
            Ty::Fn => self.fn_expr(d),
            Ty::Ref => format!("(ref {})", self.expr(Ty::Int, d)),
            Ty::Hidden => unreachable!("hidden names are never generated"),
        }
    }

    fn let_expr(&mut self, ty: Ty, d: u32) -> String {
        let bound_ty = *self.pick(&[Ty::Int, Ty::Int, Ty::Bool, Ty::Str, Ty::Unit, Ty::Fn, Ty::Ref]);
        let name = self.pick(&["x", "y", "z", "n", "f", "r"]).to_string();
        let bound = self.expr(bound_ty, d);
        let body = self.with(&name, bound_ty, |g| g.expr(ty, d));
        format!("(let {name} = {bound} in {body})")
    }

    fn int_expr(&mut self, d: u32) -> String {
        match self.rng.random_range(0..5) {
            0 | 1 => {
                let op = self.pick(&["+", "-", "*", "/"]);
                let l = self.expr(Ty::Int, d);
                let r = self.expr(Ty::Int, d);
                format!("({l} {op} {r})")
            }
            2 => {
                let f = self.expr(Ty::Fn, d);
                let a = self.expr(Ty::Int, d);
                format!("({f} {a})")
            }
            3 => {
                let f = self.pick(&["f", "g", "fact"]).to_string();
                let n = self.pick(&["n", "x"]).to_string();
                let base = self.with(&f, Ty::Hidden, |g| g.with(&n, Ty::Int, |g| g.expr(Ty::Int, d.min(2))));
                let step = self.with(&f, Ty::Hidden, |g| g.with(&n, Ty::Int, |g| g.expr(Ty::Int, d.min(2))));
                let op = self.pick(&["+", "-", "*"]);
                let k = self.rng.random_range(0..5);
                format!(
                    "(let rec {f} {n} = if {n} <= 0 then {base} else {step} {op} {f} ({n} - 1) in {f} {k})"
                )
            }
            _ => {
                let s = self.expr(Ty::Str, d);
                format!("(if {s} = \"\" then 0 else 1)")
            }
        }
    }

    fn bool_expr(&mut self, d: u32) -> String {
        match self.rng.random_range(0..4) {
            0 | 1 => {
                let op = self.pick(&["=", "<>", "<", ">", "<=", ">="]);
                let l = self.expr(Ty::Int, d);
                let r = self.expr(Ty::Int, d);
                format!("({l} {op} {r})")
            }
            2 => {
                let op = self.pick(&["&&", "||"]);
                let l = self.expr(Ty::Bool, d);
                let r = self.expr(Ty::Bool, d);
                format!("({l} {op} {r})")
            }
            _ => {
                let l = self.expr(Ty::Str, d);
                let r = self.expr(Ty::Str, d);
                format!("({l} = {r})")
            }
        }
    }

    fn str_expr(&mut self, d: u32) -> String {
        match self.rng.random_range(0..4) {
            0 | 1 => {
                let l = self.expr(Ty::Str, d);
                let r = self.expr(Ty::Str, d);
                format!("({l} ^ {r})")
            }
            2 => format!("(string_of_int {})", self.expr(Ty::Int, d)),
            _ => "(input_line stdin)".to_string(),
        }
    }

    fn unit_expr(&mut self, d: u32) -> String {
        let refs = self.vars(Ty::Ref);
        match self.rng.random_range(0..4) {
            0 => format!("(print_string {})", self.expr(Ty::Str, d)),
            1 => format!("(print_int {})", self.expr(Ty::Int, d)),
            2 if !refs.is_empty() => {
                let r = self.pick(&refs).clone();
                format!("({r} := {})", self.expr(Ty::Int, d))
            }
            _ => "(print_newline ())".to_string(),
        }
    }

    fn fn_expr(&mut self, d: u32) -> String {
        match self.rng.random_range(0..3) {
            0 => {
                let p = self.pick(&["x", "y", "n"]).to_string();
                let body = self.with(&p, Ty::Int, |g| g.expr(Ty::Int, d));
                format!("(fun {p} -> {body})")
            }
            1 => {
                let k = self.pick(&["k", "f", "x"]).to_string();
                let bound = self.expr(Ty::Fn, d);
                let p = if k == "x" { "y" } else { *self.pick(&["x", "y"]) }.to_string();
                format!("(let {k} = {bound} in fun {p} -> {k} ({k} {p}))")
            }
            _ => {
                let h = self.pick(&["h", "f"]).to_string();
                let p = self.pick(&["x", "y"]).to_string();
                let arg = self.expr(Ty::Fn, d);
                format!("((fun {h} -> fun {p} -> {h} {p} + 1) {arg})")
            }
        }
    }
}

/// Source text of a random closed program of depth at most `depth`.
pub fn programs(depth: u32) -> impl Strategy<Value = String> {
    any::<[u8; 32]>().prop_map(move |seed| Gen::new(seed).program(depth))
}
