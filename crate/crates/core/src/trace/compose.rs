use std::collections::BTreeMap;

use crate::eval::{map_backward, map_forward, MicroStep, MicroTrace, StepKind};
use crate::syntax::{pretty_with, to_source, Expr, Path, PrettyOptions, Span};

use super::policy::ElisionPolicy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Arrow {
    Start,
    Single,
    Multi,
}

impl Arrow {
    pub fn symbol(self) -> &'static str {
        match self {
            Arrow::Start => "start",
            Arrow::Single => "=>",
            Arrow::Multi => "=>*",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Arrow> {
        match s {
            "start" => Some(Arrow::Start),
            "=>" => Some(Arrow::Single),
            "=>*" => Some(Arrow::Multi),
            _ => None,
        }
    }
}

/// One displayed line of a trace: the term reached after `micro.1`
/// micro-steps, plus margin bindings and highlighting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisplayStep {
    pub index: usize,
    pub text: String,
    /// Character spans of `text` to underline.
    pub underline: Vec<Span>,
    /// Character spans of `text` holding keywords.
    pub keywords: Vec<Span>,
    pub bindings: Vec<String>,
    pub arrow: Arrow,
    /// Half-open range of micro-step indices merged into this step.
    pub micro: (usize, usize),
    pub stdout: Option<String>,
    pub store: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DisplayTrace {
    pub steps: Vec<DisplayStep>,
}

impl DisplayTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Display step whose range contains micro-step `micro`; the start step
    /// for an empty trace.
    pub fn step_containing(&self, micro: usize) -> usize {
        self.steps
            .iter()
            .position(|s| s.micro.0 <= micro && micro < s.micro.1)
            .unwrap_or(self.steps.len().saturating_sub(1))
    }
}

fn is_dead_elim(s: &MicroStep) -> bool {
    s.kind == StepKind::LetElim
        && matches!(s.before.at(&s.redex), Some(Expr::Let { name, body, .. }) if !body.occurs_free(name))
}

fn is_trivial(s: &MicroStep) -> bool {
    matches!(
        s.kind,
        StepKind::VarSubst
            | StepKind::Arith
            | StepKind::Compare
            | StepKind::StrConcat
            | StepKind::BoolShortCircuit
    ) || is_dead_elim(s)
}

fn is_admin(s: &MicroStep) -> bool {
    s.kind == StepKind::VarSubst || is_dead_elim(s)
}

fn is_stdlib(s: &MicroStep) -> bool {
    s.stdlib_origin || s.enters_stdlib
}

/// Follows `p` from the term before step `from` to the term before step `to`.
fn forward(steps: &[MicroStep], p: &Path, from: usize, to: usize) -> Option<Path> {
    steps[from..to]
        .iter()
        .try_fold(p.clone(), |p, s| map_forward(s.kind, &s.redex, &p))
}

/// Follows `p` from the term before step `from` back to the term before step `to`.
fn backward(steps: &[MicroStep], p: &Path, from: usize, to: usize) -> Path {
    steps[to..from]
        .iter()
        .rev()
        .fold(p.clone(), |p, s| map_backward(s.kind, &s.redex, &p))
}

/// Literals combined by `+ - * /` only.
fn is_literal_arith(e: &Expr) -> bool {
    match e {
        Expr::Int(_) => true,
        Expr::BinOp(op, l, r) => op.is_arith() && is_literal_arith(l) && is_literal_arith(r),
        _ => false,
    }
}

struct Grouping {
    join: Vec<bool>,
    /// First micro-step of the collapsed arithmetic tail.
    tail: Option<usize>,
}

fn group(trace: &MicroTrace, policy: &ElisionPolicy) -> Grouping {
    let steps = &trace.steps;
    let n = steps.len();
    let mut join = vec![false; n.saturating_sub(1)];
    let join_range = |join: &mut Vec<bool>, lo: usize, hi: usize| {
        for j in join.iter_mut().take(hi).skip(lo) {
            *j = true;
        }
    };

    if policy.normalize_steps {
        for i in 0..n.saturating_sub(1) {
            let (a, b) = (&steps[i], &steps[i + 1]);
            if is_dead_elim(b) {
                join[i] = true;
            }
            if a.kind == StepKind::VarSubst && a.redex.parent().as_ref() == Some(&b.redex) {
                join[i] = true;
            }
        }
    }

    if policy.if_resolution() {
        for j in 0..n {
            if steps[j].kind != StepKind::IfResolve {
                continue;
            }
            let cond = steps[j].redex.child(0);
            let mut i = j;
            while i > 0 {
                let s = &steps[i - 1];
                let inside = forward(steps, &s.redex, i - 1, j).is_some_and(|p| p.starts_with(&cond));
                if !inside || !is_trivial(s) {
                    break;
                }
                i -= 1;
            }
            join_range(&mut join, i, j);
        }
    }

    if policy.trivial_arith() {
        for i in 0..n {
            if steps[i].kind != StepKind::VarSubst {
                continue;
            }
            let Some(m) = (i + 1..n).find(|&m| !is_dead_elim(&steps[m])) else {
                continue;
            };
            let fold = match steps[m].kind {
                StepKind::VarSubst => true,
                StepKind::Arith | StepKind::Compare | StepKind::StrConcat => steps[i]
                    .redex
                    .parent()
                    .and_then(|p| forward(steps, &p, i, m))
                    .is_some_and(|p| p == steps[m].redex),
                _ => false,
            };
            if fold {
                join_range(&mut join, i, m);
            }
        }
    }

    let mut tail = None;
    if policy.arithmetic_tail() {
        if let Some(j) = (0..n).find(|&j| is_literal_arith(trace.term_after(j))) {
            join_range(&mut join, j, n - 1);
            tail = Some(j);
        }
    }

    if policy.stdlib() {
        for i in 0..n.saturating_sub(1) {
            if is_stdlib(&steps[i]) && is_stdlib(&steps[i + 1]) {
                join[i] = true;
            }
        }
    }

    Grouping { join, tail }
}

fn ranges(join: &[bool], n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut lo = 0;
    for i in 0..n {
        if i + 1 == n || join.get(i) != Some(&true) {
            out.push((lo, i + 1));
            lo = i + 1;
        }
    }
    out
}

/// Path of the subterm the steps in `range` reduce, in the coordinates of
/// the term before `range.0`.
fn focus(steps: &[MicroStep], range: (usize, usize), multi: bool) -> Path {
    let (lo, hi) = range;
    if multi {
        let first = (lo..hi).find(|&i| !is_admin(&steps[i])).unwrap_or(lo);
        return backward(steps, &steps[first].redex, first, lo);
    }
    let chosen: Vec<usize> = {
        let main: Vec<usize> = (lo..hi).filter(|&i| !is_admin(&steps[i])).collect();
        if main.is_empty() {
            (lo..hi).collect()
        } else {
            main
        }
    };
    chosen
        .iter()
        .map(|&i| backward(steps, &steps[i].redex, i, lo))
        .reduce(|a, b| a.common_prefix(&b))
        .unwrap_or_default()
}

struct Rendered {
    text: String,
    keywords: Vec<Span>,
    bindings: Vec<String>,
    underline: Option<Span>,
}

fn collect_binders(e: &Expr, path: Path, erase: &std::collections::BTreeSet<Path>, counts: &mut BTreeMap<String, usize>) {
    match e {
        Expr::Fun(p, _) => *counts.entry(p.clone()).or_default() += 1,
        Expr::Let { recursive, name, .. } => {
            if *recursive && erase.contains(&path) {
                collect_binders(e.child(1).expect("let body"), path.child(1), erase, counts);
                return;
            }
            *counts.entry(name.clone()).or_default() += 1;
        }
        _ => {}
    }
    for (i, c) in e.children().into_iter().enumerate() {
        collect_binders(c, path.child(i as u8), erase, counts);
    }
}

fn render_term(term: &Expr, regions: &[Path], policy: &ElisionPolicy, focus: Option<&Path>) -> Rendered {
    let mut erase = std::collections::BTreeSet::new();
    let paths = term.paths();
    if policy.function_definitions() {
        erase.extend(
            paths
                .iter()
                .filter(|p| matches!(term.at(p), Some(Expr::Let { recursive: true, .. })))
                .cloned(),
        );
    }
    let mut bindings = Vec::new();
    if policy.global_lets() {
        let mut counts = BTreeMap::new();
        collect_binders(term, Path::root(), &erase, &mut counts);
        for p in &paths {
            let Some(Expr::Let {
                recursive: false,
                name,
                bound,
                ..
            }) = term.at(p)
            else {
                continue;
            };
            if bound.is_literal()
                && counts.get(name) == Some(&1)
                && !regions.iter().any(|r| p.starts_with(r))
                && !erase.iter().any(|e| p.starts_with(&e.child(0)))
            {
                bindings.push(format!("{name} = {}", to_source(bound)));
                erase.insert(p.clone());
            }
        }
    }
    let pretty = pretty_with(term, &PrettyOptions { erase });
    let underline = focus.and_then(|p| pretty.span_of(p));
    Rendered {
        text: pretty.text,
        keywords: pretty.keywords,
        bindings,
        underline,
    }
}

/// Groups the micro-steps of `trace` into display steps under `policy`.
pub fn compose_display(trace: &MicroTrace, policy: &ElisionPolicy) -> DisplayTrace {
    let steps = &trace.steps;
    let g = group(trace, policy);
    let groups = ranges(&g.join, steps.len());
    let is_multi = |r: (usize, usize)| g.tail.is_some_and(|t| r.0 <= t && t < r.1) && r.1 - r.0 > 1;

    let mut ends = vec![(0usize, 0usize)];
    ends.extend(groups.iter().copied());
    let mut out = Vec::with_capacity(ends.len());
    for (k, &range) in ends.iter().enumerate() {
        let at = range.1;
        let next = groups.get(k).copied();
        let focus_path = next
            .filter(|_| policy.underline_redex)
            .map(|r| focus(steps, r, is_multi(r)));
        let term = trace.term_after(at);
        let r = render_term(term, trace.regions_after(at), policy, focus_path.as_ref());
        let arrow = if k == 0 {
            Arrow::Start
        } else if is_multi(range) {
            Arrow::Multi
        } else {
            Arrow::Single
        };
        let stdout: String = steps[range.0..range.1]
            .iter()
            .filter_map(|s| s.stdout.as_deref())
            .collect();
        let store = (at > 0)
            .then(|| &steps[at - 1].store_after)
            .filter(|s| !s.is_empty())
            .map(|s| s.display());
        out.push(DisplayStep {
            index: k,
            text: r.text,
            underline: r.underline.into_iter().collect(),
            keywords: if policy.bold_keywords { r.keywords } else { Vec::new() },
            bindings: r.bindings,
            arrow,
            micro: range,
            stdout: (!stdout.is_empty()).then_some(stdout),
            store,
        });
    }
    DisplayTrace { steps: out }
}
