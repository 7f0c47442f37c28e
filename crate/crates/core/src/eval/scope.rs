//! Lexical scopes along the evaluation path, and relocation of values whose
//! free variables would otherwise be captured when moved.

use crate::syntax::{Expr, Path};

use super::stdlib::Prelude;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum BinderId {
    Global(usize),
    Frame(Path),
    Param(Path),
}

#[derive(Debug, Clone)]
pub(crate) struct Entry<'a> {
    pub name: &'a str,
    pub id: BinderId,
    /// Bound value; `None` for function parameters.
    pub value: Option<&'a Expr>,
    pub recursive: bool,
}

/// A view of the binders visible at one point: frames on the evaluation path
/// (innermost last) and the first `global_limit` prelude definitions.
#[derive(Debug, Clone)]
pub(crate) struct Scope<'a> {
    pub frames: Vec<Entry<'a>>,
    pub global_limit: usize,
    pub prelude: &'a Prelude,
}

pub(crate) enum Resolved<'s, 'a> {
    Frame(usize, &'s Entry<'a>),
    Global(usize),
}

impl<'a> Scope<'a> {
    pub fn new(prelude: &'a Prelude) -> Self {
        Scope {
            frames: Vec::new(),
            global_limit: prelude.len(),
            prelude,
        }
    }

    pub fn resolve(&self, name: &str) -> Option<Resolved<'_, 'a>> {
        if let Some((i, e)) = self
            .frames
            .iter()
            .enumerate()
            .rev()
            .find(|(_, e)| e.name == name)
        {
            return Some(Resolved::Frame(i, e));
        }
        self.prelude
            .lookup(name, self.global_limit)
            .map(|(i, _)| Resolved::Global(i))
    }

    pub fn resolve_id(&self, name: &str) -> Option<BinderId> {
        self.resolve(name).map(|r| match r {
            Resolved::Frame(_, e) => e.id.clone(),
            Resolved::Global(i) => BinderId::Global(i),
        })
    }

    /// Bound value of `name` plus the scope in which that value was defined.
    pub fn definition(&self, name: &str) -> Option<(&'a Expr, Scope<'a>, bool)> {
        match self.resolve(name)? {
            Resolved::Frame(i, e) => {
                let value = e.value?;
                let upto = if e.recursive { i + 1 } else { i };
                Some((
                    value,
                    Scope {
                        frames: self.frames[..upto].to_vec(),
                        global_limit: self.global_limit,
                        prelude: self.prelude,
                    },
                    e.recursive,
                ))
            }
            Resolved::Global(g) => {
                let (_, body) = self.prelude.get(g);
                Some((
                    body,
                    Scope {
                        frames: Vec::new(),
                        global_limit: g,
                        prelude: self.prelude,
                    },
                    false,
                ))
            }
        }
    }

    pub fn globals_only(&self) -> Scope<'a> {
        Scope {
            frames: Vec::new(),
            global_limit: self.prelude.len(),
            prelude: self.prelude,
        }
    }

    pub fn push(&mut self, entry: Entry<'a>) {
        self.frames.push(entry);
    }

    /// True when every free variable of `value` denotes the same binder in
    /// `def` and `self`.
    pub fn agrees_with(&self, def: &Scope<'_>, value: &Expr) -> bool {
        value
            .free_vars()
            .iter()
            .all(|y| def.resolve_id(y) == self.resolve_id(y))
    }
}

/// Rewrites `value`, defined in scope `def`, so that it means the same thing
/// when placed in scope `target`. Captured free variables are re-bound by
/// wrapping `let` frames around the value.
pub(crate) fn relocate(value: &Expr, def: &Scope<'_>, target: &Scope<'_>) -> Expr {
    relocate_aliased(value, def, target, &[])
}

fn resolve_with_aliases(
    target: &Scope<'_>,
    aliases: &[(String, BinderId)],
    name: &str,
) -> Option<BinderId> {
    aliases
        .iter()
        .rev()
        .find(|(n, _)| n == name)
        .map(|(_, id)| id.clone())
        .or_else(|| target.resolve_id(name))
}

fn relocate_aliased(
    value: &Expr,
    def: &Scope<'_>,
    target: &Scope<'_>,
    aliases: &[(String, BinderId)],
) -> Expr {
    let mut wraps: Vec<(String, Expr, bool)> = Vec::new();
    let mut aliases = aliases.to_vec();
    for y in value.free_vars() {
        let Some(def_id) = def.resolve_id(&y) else {
            continue;
        };
        if resolve_with_aliases(target, &aliases, &y).as_ref() == Some(&def_id) {
            continue;
        }
        let Some((bound, bound_def, recursive)) = def.definition(&y) else {
            continue;
        };
        let mut inner = aliases.clone();
        if recursive {
            inner.push((y.clone(), def_id.clone()));
        }
        let wrapped = relocate_aliased(bound, &bound_def, target, &inner);
        wraps.push((y.clone(), wrapped, recursive));
        aliases.push((y, def_id));
    }
    wraps
        .into_iter()
        .rev()
        .fold(value.clone(), |body, (name, bound, recursive)| Expr::Let {
            recursive,
            name,
            bound: Box::new(bound),
            body: Box::new(body),
        })
}
