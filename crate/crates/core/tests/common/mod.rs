#![allow(dead_code)]

pub mod gen;
pub mod listings;

use std::path::PathBuf;

use stepml::cli::Session;
use stepml::eval::ScriptedInput;

/// Programs with checked-in expected output.
pub const PROGRAMS: [&str; 6] = [
    "factorial",
    "slate",
    "first_example",
    "exceptions",
    "refs",
    "shadowing",
];

pub fn programs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("programs")
}

pub fn program_path(name: &str) -> PathBuf {
    programs_dir().join(format!("{name}.ml"))
}

pub fn stdin_path(name: &str) -> Option<PathBuf> {
    let p = programs_dir().join(format!("{name}.stdin"));
    p.exists().then_some(p)
}

pub fn source(name: &str) -> String {
    std::fs::read_to_string(program_path(name)).unwrap()
}

pub fn stdin_text(name: &str) -> String {
    stdin_path(name)
        .map(|p| std::fs::read_to_string(p).unwrap())
        .unwrap_or_default()
}

pub fn session(name: &str) -> Session {
    let mut input = ScriptedInput::from_text(&stdin_text(name));
    Session::new(&source(name), &mut input, 100_000).unwrap()
}

pub fn golden_path(file: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(file)
}

/// Compares against a checked-in file. With `STEPML_BLESS=1` the file is
/// rewritten instead.
pub fn check_golden(file: &str, actual: &str) {
    let path = golden_path(file);
    if std::env::var_os("STEPML_BLESS").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("missing golden {}: {e}", path.display()));
    assert_eq!(actual, expected, "golden mismatch for {file}");
}

/// Collapses runs of whitespace and trims each line.
pub fn squash(s: &str) -> String {
    s.lines()
        .map(|l| l.split_whitespace().collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join("\n")
}
