use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    let stdin = io::stdin();
    let code = stepml::cli::main_with(
        std::env::args_os(),
        stepml::cli::Io {
            stdin: &mut stdin.lock(),
            stdout: &mut io::stdout(),
            stderr: &mut io::stderr(),
        },
    );
    ExitCode::from(code as u8)
}
