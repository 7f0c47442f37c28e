//! The `stepml` command line: `run`, `step` and `serve`.

mod navigator;
mod serve;
mod session;

pub use navigator::{Navigator, Reply, HELP};
pub use serve::{Response, Server};
pub use session::{
    line_column, read_file, Session, SessionError, EXIT_ERROR, EXIT_EXCEPTION, EXIT_LIMIT, EXIT_VALUE,
};

use std::ffi::OsString;
use std::io::{BufRead, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::eval::{LineSource, ReaderInput, ScriptedInput, DEFAULT_MAX_STEPS};
use crate::render::{binding_width, render_step_in_column, RenderConfig, Style};
use crate::trace::{export_trace, search, ElisionPolicy, SearchQuery};

#[derive(Debug, Parser)]
#[command(name = "stepml", version, about = "Step-by-step tracing interpreter for a small ML language")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a program and print its trace.
    Run(RunArgs),
    /// Run a program, then move through its trace interactively.
    Step(CommonArgs),
    /// Run a program and serve its trace over HTTP.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StyleArg {
    Ansi,
    Markers,
    Plain,
}

impl From<StyleArg> for Style {
    fn from(s: StyleArg) -> Style {
        match s {
            StyleArg::Ansi => Style::Ansi,
            StyleArg::Markers => Style::PlainMarkers,
            StyleArg::Plain => Style::BarePlain,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Program source file.
    pub file: PathBuf,
    /// Show every step: turns off rules a to e and stdlib hiding.
    #[arg(long)]
    pub naive: bool,
    /// Turn elision rules on (a,b,c,d,e,f,g,stdlib,normalize).
    #[arg(long, value_delimiter = ',', value_name = "RULES")]
    pub elide: Vec<String>,
    /// Turn elision rules off.
    #[arg(long = "no-elide", value_delimiter = ',', value_name = "RULES")]
    pub no_elide: Vec<String>,
    /// Show the steps taken inside the standard library.
    #[arg(long)]
    pub show_stdlib: bool,
    /// Append the contents of the store to each step.
    #[arg(long)]
    pub show_store: bool,
    #[arg(long, value_enum, default_value = "ansi")]
    pub style: StyleArg,
    /// Read program input from this file instead of standard input.
    #[arg(long, value_name = "PATH")]
    pub stdin: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
    pub max_steps: usize,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Also write the trace in the JSON wire format.
    #[arg(long, value_name = "PATH")]
    pub json: Option<PathBuf>,
    /// Print only steps containing TEXT, with one step of context.
    #[arg(long, value_name = "TEXT")]
    pub search: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct ServeArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    /// Directory holding the browser front end.
    #[arg(long, value_name = "DIR")]
    pub ui_dir: Option<PathBuf>,
}

impl CommonArgs {
    pub fn policy(&self) -> Result<ElisionPolicy, SessionError> {
        let mut p = ElisionPolicy {
            naive: self.naive,
            ..ElisionPolicy::default()
        };
        let usage = |e: crate::trace::UnknownFlag| SessionError::Usage(e.to_string());
        for r in &self.elide {
            p.set(r.trim(), true).map_err(usage)?;
        }
        for r in &self.no_elide {
            p.set(r.trim(), false).map_err(usage)?;
        }
        if self.show_stdlib {
            p.hide_stdlib = false;
        }
        Ok(p)
    }

    pub fn render_config(&self) -> RenderConfig {
        RenderConfig {
            style: self.style.into(),
            binding_width: None,
            show_store: self.show_store,
        }
    }

    fn fixture(&self) -> Result<Option<ScriptedInput>, SessionError> {
        self.stdin
            .as_ref()
            .map(|p| read_file(p).map(|t| ScriptedInput::from_text(&t)))
            .transpose()
    }

    fn session(&self, input: &mut dyn LineSource) -> Result<Session, SessionError> {
        let source = read_file(&self.file)?;
        Session::new(&source, input, self.max_steps)
    }
}

/// Standard streams handed to a command, replaceable in tests.
pub struct Io<'a> {
    pub stdin: &'a mut dyn BufRead,
    pub stdout: &'a mut dyn Write,
    pub stderr: &'a mut dyn Write,
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit status.
pub fn main_with<I, T>(args: I, io: Io<'_>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_VALUE };
            let _ = if e.use_stderr() {
                write!(io.stderr, "{e}")
            } else {
                write!(io.stdout, "{e}")
            };
            return code;
        }
    };
    let stderr = &mut *io.stderr;
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a, io.stdin, io.stdout),
        Command::Step(a) => cmd_step(a, io.stdin, io.stdout),
        Command::Serve(a) => cmd_serve(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "stepml: {e}");
            EXIT_ERROR
        }
    }
}

fn io_error(e: std::io::Error) -> SessionError {
    SessionError::Io {
        path: "<output>".into(),
        source: e,
    }
}

pub fn cmd_run(args: &RunArgs, stdin: &mut dyn BufRead, out: &mut dyn Write) -> Result<i32, SessionError> {
    let c = &args.common;
    let policy = c.policy()?;
    let session = match c.fixture()? {
        Some(mut input) => c.session(&mut input)?,
        None => c.session(&mut ReaderInput::new(stdin))?,
    };
    let display = session.compose(&policy);
    let cfg = c.render_config();
    let width = binding_width(&display.steps, &cfg);
    let shown: Vec<usize> = match &args.search {
        None => (0..display.len()).collect(),
        Some(text) => {
            let hits = search(&session.result.trace, &display, &SearchQuery::substring(text));
            let mut shown: Vec<usize> = hits
                .iter()
                .flat_map(|&i| i.saturating_sub(1)..=(i + 1).min(display.len() - 1))
                .collect();
            shown.dedup();
            shown
        }
    };
    let mut previous = None;
    for i in shown {
        if previous.is_some_and(|p: usize| p + 1 != i) {
            writeln!(out, "...").map_err(io_error)?;
        }
        out.write_all(render_step_in_column(&display.steps[i], &cfg, width).as_bytes())
            .and_then(|_| out.flush())
            .map_err(io_error)?;
        previous = Some(i);
    }
    if let Some(path) = &args.json {
        let bytes = export_trace(&display, &session.source, &policy, &session.result.outcome);
        std::fs::write(path, bytes).map_err(|source| SessionError::Io {
            path: path.display().to_string(),
            source,
        })?;
    }
    Ok(session.exit_code())
}

pub fn cmd_step(args: &CommonArgs, commands: &mut dyn BufRead, out: &mut dyn Write) -> Result<i32, SessionError> {
    let policy = args.policy()?;
    let mut input = args.fixture()?.unwrap_or_default();
    let session = args.session(&mut input)?;
    let mut nav = Navigator::new(&session.result.trace, policy, args.render_config());
    write!(out, "{HELP}{}", nav.current()).map_err(io_error)?;
    let mut line = String::new();
    loop {
        line.clear();
        if commands.read_line(&mut line).map_err(io_error)? == 0 {
            break;
        }
        match nav.execute(&line) {
            Reply::Quit => break,
            Reply::Show(text) => write!(out, "{text}").map_err(io_error)?,
        }
    }
    Ok(session.exit_code())
}

/// Counts read attempts so that serve can refuse programs that expect
/// interactive input.
struct Recording {
    inner: ScriptedInput,
    reads: usize,
}

impl LineSource for Recording {
    fn read_line(&mut self) -> Option<String> {
        self.reads += 1;
        self.inner.read_line()
    }
}

pub fn cmd_serve(args: &ServeArgs) -> Result<i32, SessionError> {
    let c = &args.common;
    let fixture = c.fixture()?;
    let has_fixture = fixture.is_some();
    let mut input = Recording {
        inner: fixture.unwrap_or_default(),
        reads: 0,
    };
    let session = c.session(&mut input)?;
    if !has_fixture && input.reads > 0 {
        return Err(SessionError::Usage(
            "the program reads input; supply it with --stdin PATH".into(),
        ));
    }
    Server::new(session, args.ui_dir.clone())
        .listen(args.port)
        .map_err(|source| SessionError::Io {
            path: format!("port {}", args.port),
            source,
        })?;
    Ok(EXIT_VALUE)
}
