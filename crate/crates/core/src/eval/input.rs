use std::collections::VecDeque;
use std::io::BufRead;

/// Line-oriented program input.
pub trait LineSource {
    /// Next line without its terminator, or `None` at end of input.
    fn read_line(&mut self) -> Option<String>;
}

/// Input supplied up front, e.g. from a fixture file.
#[derive(Debug, Clone, Default)]
pub struct ScriptedInput {
    lines: VecDeque<String>,
}

impl ScriptedInput {
    pub fn new<I, S>(lines: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        ScriptedInput {
            lines: lines.into_iter().map(Into::into).collect(),
        }
    }

    pub fn from_text(text: &str) -> Self {
        ScriptedInput::new(text.lines())
    }

    pub fn empty() -> Self {
        Self::default()
    }
}

impl LineSource for ScriptedInput {
    fn read_line(&mut self) -> Option<String> {
        self.lines.pop_front()
    }
}

/// Reads lazily from any buffered reader, such as the process's stdin.
pub struct ReaderInput<R> {
    reader: R,
}

impl<R: BufRead> ReaderInput<R> {
    pub fn new(reader: R) -> Self {
        ReaderInput { reader }
    }
}

impl<R: BufRead> LineSource for ReaderInput<R> {
    fn read_line(&mut self) -> Option<String> {
        let mut buf = String::new();
        match self.reader.read_line(&mut buf) {
            Ok(0) | Err(_) => None,
            Ok(_) => {
                if buf.ends_with('\n') {
                    buf.pop();
                    if buf.ends_with('\r') {
                        buf.pop();
                    }
                }
                Some(buf)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scripted_lines_then_eof() {
        let mut input = ScriptedInput::from_text("SLATE\nsecond\n");
        assert_eq!(input.read_line().as_deref(), Some("SLATE"));
        assert_eq!(input.read_line().as_deref(), Some("second"));
        assert_eq!(input.read_line(), None);
    }

    #[test]
    fn reader_strips_terminators() {
        let mut input = ReaderInput::new(&b"a\r\nb"[..]);
        assert_eq!(input.read_line().as_deref(), Some("a"));
        assert_eq!(input.read_line().as_deref(), Some("b"));
        assert_eq!(input.read_line(), None);
    }
}
