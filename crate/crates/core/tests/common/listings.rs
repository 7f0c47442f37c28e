//! Hand-transcribed expected traces, squashed with [`super::squash`].

use super::squash;

pub const FACT_DEF: &str = "let rec factorial n = if n = 1 then 1 else n * factorial (n - 1) in ";
pub const BODY: &str = "if n = 1 then 1 else n * factorial (n - 1)";

pub fn trimmed_factorial() -> Vec<String> {
    [
        "    factorial 4".to_string(),
        format!("n = 4 => {BODY}"),
        "n = 4 => n * factorial (n - 1)".into(),
        "=> 4 * factorial 3".into(),
        format!("n = 3 => 4 * ({BODY})"),
        "n = 3 => 4 * (n * factorial (n - 1))".into(),
        "=> 4 * (3 * factorial 2)".into(),
        format!("n = 2 => 4 * (3 * ({BODY}))"),
        "n = 2 => 4 * (3 * (n * factorial (n - 1)))".into(),
        "=> 4 * (3 * (2 * factorial 1))".into(),
        format!("n = 1 => 4 * (3 * (2 * ({BODY})))"),
        "=> 4 * (3 * (2 * 1))".into(),
        "=>* 24".into(),
    ]
    .iter()
    .map(|l| squash(l))
    .collect()
}

pub fn naive_factorial() -> Vec<String> {
    let d = FACT_DEF;
    let mut lines = vec![format!("{d}factorial 4")];
    for (k, inner) in [(4, ""), (3, "4 * ("), (2, "4 * (3 * ("), (1, "4 * (3 * (2 * (")] {
        let close = ")".repeat(inner.matches('(').count());
        let cond = if k == 1 { "true" } else { "false" };
        lines.push(format!("=> {d}{inner}let n = {k} in if n = 1 then 1 else n * factorial (n - 1){close}"));
        lines.push(format!("=> {d}{inner}let n = {k} in if {cond} then 1 else n * factorial (n - 1){close}"));
        if k == 1 {
            break;
        }
        lines.push(format!("=> {d}{inner}let n = {k} in n * factorial (n - 1){close}"));
        lines.push(format!("=> {d}{inner}let n = {k} in {k} * factorial (n - 1){close}"));
        lines.push(format!("=> {d}{inner}{k} * factorial ({k} - 1){close}"));
        lines.push(format!("=> {d}{inner}{k} * factorial {}{close}", k - 1));
    }
    lines.extend(["=> 4 * (3 * (2 * 1))", "=> 4 * (3 * 2)", "=> 4 * 6", "=> 24"].map(String::from));
    lines.iter().map(|l| squash(l)).collect()
}

pub const SLATE_ELIDED: &str = "    print_string (input_line <in_channel>)\nSLATE=>  ()\n";

pub const SLATE_FULL: [&str; 12] = [
    "print_string (input_line <in_channel>)",
    "=> print_string (let x = <in_channel> in <<input_line>>)",
    "=> print_string <<input_line>>",
    "=> print_string \"SLATE\"",
    "=> let x = \"SLATE\" in output_string <out_channel> x",
    "=> let x = \"SLATE\" in (let x = <out_channel> in fun y -> <<output_string>>) x",
    "=> let x = \"SLATE\" in (fun y -> let x = <out_channel> in <<output_string>>) x",
    "=> (fun y -> let x = <out_channel> in <<output_string>>) \"SLATE\"",
    "=> let y = \"SLATE\" in let x = <out_channel> in <<output_string>>",
    "=> let y = \"SLATE\" in <<output_string>>",
    "=> <<output_string>>",
    "SLATE=> ()",
];
