//! One PASS/FAIL line per acceptance criterion. Exits nonzero when
//! any criterion fails.

mod common;

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use common::listings::{naive_factorial, trimmed_factorial, SLATE_ELIDED, SLATE_FULL};
use stepml::eval::oracle::{evaluate, OracleOutcome};
use stepml::eval::{load, run, Outcome, ScriptedInput, StepKind};
use stepml::render::{render_trace, RenderConfig, Style};
use stepml::syntax::Expr;
use stepml::trace::{compose_display, expand, ElisionPolicy};

type Check = Result<(), String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn plain_lines(name: &str, policy: &ElisionPolicy) -> Vec<String> {
    let s = common::session(name);
    let text = render_trace(&s.compose(policy), &RenderConfig::with_style(Style::BarePlain));
    common::squash(&text).lines().map(String::from).collect()
}

fn trimmed() -> Check {
    let t = Instant::now();
    let lines = plain_lines("factorial", &ElisionPolicy::default());
    let elapsed = t.elapsed();
    ensure(lines == trimmed_factorial(), || format!("got {lines:#?}"))?;
    let s = common::session("factorial");
    let d = s.compose(&ElisionPolicy::default());
    let want = ["n - 1", "factorial 3", "factorial 2", "factorial 1", "2 * 1"];
    for w in want {
        let hit = d.steps.iter().any(|st| {
            st.underline
                .iter()
                .any(|&(a, b)| st.text.chars().skip(a).take(b - a).collect::<String>() == w)
        });
        ensure(hit, || format!("no underline covering `{w}`"))?;
    }
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))
}

fn naive() -> Check {
    let lines = plain_lines("factorial", &ElisionPolicy::naive());
    ensure(lines.len() == 25, || format!("{} lines", lines.len()))?;
    ensure(lines == naive_factorial(), || format!("got {lines:#?}"))
}

fn first_example() -> Check {
    let s = common::session("first_example");
    ensure(s.result.outcome == Outcome::Value(Expr::Bool(false)), || {
        format!("outcome {:?}", s.result.outcome)
    })?;
    let d = s.compose(&ElisionPolicy::default());
    ensure(d.steps.iter().any(|st| st.text.contains("6 = 7")), || "no `6 = 7` state".into())
}

fn slate() -> Check {
    let s = common::session("slate");
    let text = render_trace(&s.compose(&ElisionPolicy::default()), &RenderConfig::with_style(Style::BarePlain));
    ensure(text == SLATE_ELIDED, || format!("elided form {text:?}"))?;
    let p = ElisionPolicy {
        hide_stdlib: false,
        ..ElisionPolicy::default()
    };
    let lines = plain_lines("slate", &p);
    ensure(lines == SLATE_FULL, || format!("full form {lines:#?}"))
}

fn oracle() -> Check {
    let t = Instant::now();
    let count = 1000u32;
    for i in 0..count {
        let mut seed = [0u8; 32];
        seed[..4].copy_from_slice(&i.to_le_bytes());
        seed[4] = 0xa5;
        let src = common::gen::Gen::new(seed).program(6);
        let program = load(&src).map_err(|e| format!("{src}: {e}"))?;
        let stepped = run(&program, &mut ScriptedInput::from_text(common::gen::STDIN), 2_000_000)
            .map_err(|e| format!("{src}: {e}"))?;
        let reference = evaluate(&program, &mut ScriptedInput::from_text(common::gen::STDIN), 10_000_000)
            .map_err(|e| format!("{src}: {e}"))?;
        ensure(reference.outcome != OracleOutcome::OutOfFuel, || format!("{src}: no fuel"))?;
        ensure(OracleOutcome::of_outcome(&stepped.outcome) == reference.outcome, || {
            format!("{src}: {:?} vs {:?}", stepped.outcome, reference.outcome)
        })?;
        ensure(stepped.trace.stdout() == reference.stdout, || format!("{src}: stdout differs"))?;
    }
    let elapsed = t.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))
}

fn lossless() -> Check {
    for name in ["factorial", "slate", "exceptions", "refs"] {
        let s = common::session(name);
        for policy in ElisionPolicy::structural_combinations() {
            let d = compose_display(&s.result.trace, &policy);
            let mut afters = Vec::new();
            for k in 0..d.len() {
                let views = expand(&s.result.trace, &d, k).map_err(|e| e.to_string())?;
                afters.extend(views.into_iter().map(|v| (v.index, v.after)));
            }
            let direct: Vec<(usize, String)> = s
                .result
                .trace
                .steps
                .iter()
                .map(|m| (m.index, stepml::syntax::to_source(&m.after)))
                .collect();
            ensure(afters == direct, || format!("{name} under {policy:?}"))?;
            let again = common::session(name);
            ensure(again.result.outcome == s.result.outcome, || format!("{name} outcome differs"))?;
        }
    }
    Ok(())
}

fn exceptions_and_store() -> Check {
    for (name, want) in [("exceptions", 42), ("refs", 2)] {
        let s = common::session(name);
        ensure(s.result.outcome == Outcome::Value(Expr::Int(want)), || {
            format!("{name}: {:?}", s.result.outcome)
        })?;
        let reference = evaluate(&s.program, &mut ScriptedInput::empty(), 1_000_000).map_err(|e| e.to_string())?;
        ensure(reference.outcome == OracleOutcome::of_outcome(&s.result.outcome), || {
            format!("{name}: oracle says {:?}", reference.outcome)
        })?;
        for m in &s.result.trace.steps {
            if !matches!(m.kind, StepKind::Deref | StepKind::Assign) {
                continue;
            }
            let target = m.before.at(&m.redex.child(0)).cloned();
            let ok = match target {
                Some(Expr::Location(id)) => m.store_after.contains(id),
                _ => false,
            };
            ensure(ok, || format!("{name}: step {} does not name an allocated cell", m.index))?;
        }
    }
    Ok(())
}

fn determinism() -> Check {
    let bin = env!("CARGO_BIN_EXE_stepml");
    let dir = std::env::temp_dir().join(format!("stepml-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    for name in common::PROGRAMS {
        let mut docs = Vec::new();
        for k in 0..2 {
            let out = dir.join(format!("{name}.{k}.json"));
            let mut cmd = Command::new(bin);
            cmd.args(["run", "--json"]).arg(&out).arg(common::program_path(name));
            if let Some(stdin) = common::stdin_path(name) {
                cmd.arg("--stdin").arg(stdin);
            }
            let status = cmd.output().map_err(|e| e.to_string())?;
            ensure(status.status.code().is_some_and(|c| c != 1), || format!("{name}: {status:?}"))?;
            docs.push(std::fs::read(&out).map_err(|e| e.to_string())?);
        }
        ensure(docs[0] == docs[1], || format!("{name}: wire files differ"))?;
    }
    let _ = std::fs::remove_dir_all(dir);
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("trimmed factorial trace", trimmed),
        ("naive factorial trace", naive),
        ("doubling example", first_example),
        ("SLATE session, elided and full", slate),
        ("oracle equivalence on 1000 programs", oracle),
        ("lossless elision under 64 policies", lossless),
        ("exceptions and store", exceptions_and_store),
        ("deterministic run --json", determinism),
    ];
    let mut failed = 0;
    for (label, check) in criteria {
        match check() {
            Ok(()) => println!("PASS  {label}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {label}: {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
