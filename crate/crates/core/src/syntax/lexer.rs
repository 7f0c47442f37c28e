use thiserror::Error;

pub const KEYWORDS: [&str; 14] = [
    "let", "rec", "in", "fun", "if", "then", "else", "true", "false", "ref", "raise", "try",
    "with", "exception",
];

const OPERATORS: [&str; 20] = [
    ":=", "<=", ">=", "<>", "&&", "||", "->", "+", "-", "*", "/", "=", "<", ">", "^", ";", "!",
    "|", "&", ":",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Int,
    Str,
    Ident,
    Keyword,
    Operator,
    Punct,
    /// `<tag>`, prelude only.
    Abstract,
    /// `<<name>>`, prelude only.
    Primitive,
    Eof,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    /// Character index of the first character of `text`.
    pub offset: usize,
    /// Whitespace and comments between the previous token and this one.
    pub leading: String,
}

impl Token {
    pub fn is(&self, kind: TokenKind, text: &str) -> bool {
        self.kind == kind && self.text == text
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("lexical error at offset {offset}: {message}")]
pub struct LexError {
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LexMode {
    #[default]
    Source,
    /// Also accepts `<tag>` and `<<name>>` forms.
    Prelude,
}

pub fn tokenize(source: &str) -> Result<Vec<Token>, LexError> {
    tokenize_with(source, LexMode::Source)
}

pub fn tokenize_with(source: &str, mode: LexMode) -> Result<Vec<Token>, LexError> {
    Lexer {
        chars: source.chars().collect(),
        pos: 0,
        mode,
    }
    .run()
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    mode: LexMode,
}

impl Lexer {
    fn peek(&self, ahead: usize) -> Option<char> {
        self.chars.get(self.pos + ahead).copied()
    }

    fn slice(&self, from: usize) -> String {
        self.chars[from..self.pos].iter().collect()
    }

    fn err(&self, offset: usize, message: impl Into<String>) -> LexError {
        LexError {
            offset,
            message: message.into(),
        }
    }

    fn run(mut self) -> Result<Vec<Token>, LexError> {
        let mut tokens = Vec::new();
        loop {
            let trivia_start = self.pos;
            self.skip_trivia()?;
            let leading = self.slice(trivia_start);
            let start = self.pos;
            let Some(c) = self.peek(0) else {
                tokens.push(Token {
                    kind: TokenKind::Eof,
                    text: String::new(),
                    offset: start,
                    leading,
                });
                return Ok(tokens);
            };
            let kind = if c.is_ascii_digit() {
                while self.peek(0).is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
                TokenKind::Int
            } else if c == '"' {
                self.string(start)?;
                TokenKind::Str
            } else if c.is_ascii_alphabetic() || c == '_' {
                while self
                    .peek(0)
                    .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
                {
                    self.pos += 1;
                }
                if KEYWORDS.contains(&self.slice(start).as_str()) {
                    TokenKind::Keyword
                } else {
                    TokenKind::Ident
                }
            } else if c == '(' || c == ')' {
                self.pos += 1;
                TokenKind::Punct
            } else if c == '<' && self.mode == LexMode::Prelude && self.special(start) {
                if self.chars[start + 1] == '<' {
                    TokenKind::Primitive
                } else {
                    TokenKind::Abstract
                }
            } else if let Some(op) = OPERATORS.iter().find(|op| self.matches(op)) {
                if *op == "|" || *op == "&" || *op == ":" {
                    return Err(self.err(start, format!("illegal character '{c}'")));
                }
                self.pos += op.chars().count();
                TokenKind::Operator
            } else {
                return Err(self.err(start, format!("illegal character '{c}'")));
            };
            tokens.push(Token {
                kind,
                text: self.slice(start),
                offset: start,
                leading,
            });
        }
    }

    fn matches(&self, s: &str) -> bool {
        s.chars().enumerate().all(|(i, c)| self.peek(i) == Some(c))
    }

    /// Tries `<ident>` or `<<ident>>` at the cursor; advances on success.
    fn special(&mut self, start: usize) -> bool {
        let double = self.peek(1) == Some('<');
        let mut i = start + if double { 2 } else { 1 };
        let name_start = i;
        while self
            .chars
            .get(i)
            .is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_')
        {
            i += 1;
        }
        if i == name_start {
            return false;
        }
        let close = if double { ">>" } else { ">" };
        let ok = close
            .chars()
            .enumerate()
            .all(|(k, c)| self.chars.get(i + k) == Some(&c));
        if ok {
            self.pos = i + close.len();
        }
        ok
    }

    fn string(&mut self, start: usize) -> Result<(), LexError> {
        self.pos += 1;
        loop {
            match self.peek(0) {
                None => return Err(self.err(start, "unterminated string literal")),
                Some('"') => {
                    self.pos += 1;
                    return Ok(());
                }
                Some('\\') => {
                    match self.peek(1) {
                        Some('n' | 't' | '\\' | '"') => {}
                        Some(c) => {
                            return Err(self.err(self.pos, format!("unknown escape '\\{c}'")))
                        }
                        None => return Err(self.err(start, "unterminated string literal")),
                    }
                    self.pos += 2;
                }
                Some(_) => self.pos += 1,
            }
        }
    }

    fn skip_trivia(&mut self) -> Result<(), LexError> {
        loop {
            match self.peek(0) {
                Some(c) if c.is_whitespace() => self.pos += 1,
                Some('(') if self.peek(1) == Some('*') => self.comment()?,
                _ => return Ok(()),
            }
        }
    }

    fn comment(&mut self) -> Result<(), LexError> {
        let start = self.pos;
        let mut depth = 0usize;
        while self.pos < self.chars.len() {
            if self.matches("(*") {
                depth += 1;
                self.pos += 2;
            } else if self.matches("*)") {
                depth -= 1;
                self.pos += 2;
                if depth == 0 {
                    return Ok(());
                }
            } else {
                self.pos += 1;
            }
        }
        Err(self.err(start, "unterminated comment"))
    }
}

/// Decodes the body of a string literal token (quotes included).
pub fn unescape(literal: &str) -> String {
    let inner = &literal[1..literal.len() - 1];
    let mut out = String::with_capacity(inner.len());
    let mut chars = inner.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            match chars.next() {
                Some('n') => out.push('\n'),
                Some('t') => out.push('\t'),
                Some(other) => out.push(other),
                None => {}
            }
        } else {
            out.push(c);
        }
    }
    out
}

pub fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}
