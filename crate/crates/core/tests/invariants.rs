mod common;

use proptest::prelude::*;
use stepml::eval::{find_redex, is_value, load, run, Outcome, RunResult, ScriptedInput, StepKind};
use stepml::syntax::Expr;

fn execute(src: &str) -> RunResult {
    let program = load(src).unwrap();
    run(&program, &mut ScriptedInput::from_text(common::gen::STDIN), 1_000_000).unwrap()
}

fn locations(e: &Expr, out: &mut Vec<usize>) {
    if let Expr::Location(id) = e {
        out.push(*id);
    }
    for c in e.children() {
        locations(c, out);
    }
}

fn check(r: &RunResult) -> Result<(), TestCaseError> {
    let mut previous = &r.trace.initial;
    for (i, m) in r.trace.steps.iter().enumerate() {
        prop_assert_eq!(m.index, i);
        prop_assert_eq!(&*m.before, &**previous);
        prop_assert_ne!(&m.before, &m.after, "step {} {:?}", i, m.kind);
        prop_assert!(m.before.at(&m.redex).is_some());
        if m.stdout.is_some() {
            prop_assert_eq!(m.kind, StepKind::PrimApply);
        }
        if m.stdin.is_some() {
            prop_assert_eq!(m.kind, StepKind::PrimApply);
        }
        if m.exception.is_some() {
            prop_assert!(matches!(m.kind, StepKind::RaisePropagate | StepKind::TryResolve | StepKind::PrimApply));
        }
        let mut ids = Vec::new();
        locations(&m.after, &mut ids);
        for (_, v) in m.store_after.iter() {
            locations(v, &mut ids);
        }
        for id in ids {
            prop_assert!(m.store_after.contains(id), "dangling <ref:{}> after step {}", id, i);
        }
        previous = &m.after;
    }
    let last: &Expr = r.trace.last_term();
    match &r.outcome {
        Outcome::Value(v) => {
            prop_assert!(is_value(v));
            prop_assert_eq!(v, last);
            prop_assert!(matches!(find_redex(last, &r.final_store), Ok(None)));
        }
        Outcome::UncaughtException(x) => prop_assert_eq!(last, &Expr::Raise(x.clone())),
        Outcome::StepLimitExceeded => {}
    }
    Ok(())
}

#[test]
fn checked_in_programs_satisfy_the_invariants() {
    for name in common::PROGRAMS {
        let s = common::session(name);
        check(&s.result).unwrap();
    }
}

#[test]
fn allocated_cells_show_in_the_store() {
    let s = common::session("refs");
    let stores: Vec<Vec<String>> = s.result.trace.steps.iter().map(|m| m.store_after.display()).collect();
    assert_eq!(stores.first().unwrap(), &["0 = 1"]);
    assert_eq!(stores.last().unwrap(), &["0 = 2"]);
    assert_eq!(s.result.final_store.get(0), Some(&Expr::Int(2)));
    assert_eq!(s.result.outcome, Outcome::Value(Expr::Int(2)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn generated_traces_are_well_formed(src in common::gen::programs(6)) {
        check(&execute(&src))?;
    }

    #[test]
    fn runs_are_deterministic(src in common::gen::programs(6)) {
        let a = execute(&src);
        let b = execute(&src);
        prop_assert_eq!(a.outcome, b.outcome);
        prop_assert_eq!(a.trace.len(), b.trace.len());
        for (x, y) in a.trace.steps.iter().zip(&b.trace.steps) {
            prop_assert_eq!(&x.after, &y.after);
            prop_assert_eq!(x.kind, y.kind);
            prop_assert_eq!(&x.stdout, &y.stdout);
        }
    }
}
