use thiserror::Error;

use super::ast::{BinOp, Expr, Primitive};
use super::lexer::{unescape, Token, TokenKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at offset {offset}: expected {expected}, found {found}")]
pub struct ParseError {
    pub offset: usize,
    pub expected: String,
    pub found: String,
}

/// A parsed source file: the program expression plus any `exception`
/// declarations encountered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub expr: Expr,
    pub exceptions: Vec<String>,
}

pub fn parse(tokens: &[Token]) -> Result<Expr, ParseError> {
    parse_program(tokens).map(|p| p.expr)
}

pub fn parse_program(tokens: &[Token]) -> Result<Program, ParseError> {
    let mut p = Parser {
        tokens,
        pos: 0,
        exceptions: Vec::new(),
    };
    let expr = p.expr()?;
    if p.peek().kind != TokenKind::Eof {
        return Err(p.error("end of input"));
    }
    Ok(Program {
        expr,
        exceptions: p.exceptions,
    })
}

struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
    exceptions: Vec<String>,
}

fn describe(t: &Token) -> String {
    match t.kind {
        TokenKind::Eof => "end of input".to_string(),
        _ => format!("'{}'", t.text),
    }
}

impl<'t> Parser<'t> {
    fn peek(&self) -> &'t Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn peek_at(&self, n: usize) -> &'t Token {
        &self.tokens[(self.pos + n).min(self.tokens.len() - 1)]
    }

    fn bump(&mut self) -> &'t Token {
        let t = self.peek();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> ParseError {
        let t = self.peek();
        ParseError {
            offset: t.offset,
            expected: expected.to_string(),
            found: describe(t),
        }
    }

    fn at(&self, kind: TokenKind, text: &str) -> bool {
        self.peek().is(kind, text)
    }

    fn at_op(&self, text: &str) -> bool {
        self.at(TokenKind::Operator, text)
    }

    fn at_kw(&self, text: &str) -> bool {
        self.at(TokenKind::Keyword, text)
    }

    fn expect(&mut self, kind: TokenKind, text: &str) -> Result<(), ParseError> {
        if self.at(kind, text) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&format!("'{text}'")))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        if self.peek().kind == TokenKind::Ident {
            Ok(self.bump().text.clone())
        } else {
            Err(self.error("identifier"))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let lhs = self.binary(1)?;
        if self.at_op(";") {
            self.bump();
            let rhs = self.expr()?;
            return Ok(Expr::binop(BinOp::Seq, lhs, rhs));
        }
        Ok(lhs)
    }

    /// Precedence climbing over levels 1 (`:=`) to 6 (`*`, `/`).
    fn binary(&mut self, level: u8) -> Result<Expr, ParseError> {
        if level > 6 {
            return self.unary();
        }
        let mut lhs = self.binary(level + 1)?;
        loop {
            let t = self.peek();
            if t.kind != TokenKind::Operator {
                return Ok(lhs);
            }
            let Some(op) = BinOp::from_symbol(&t.text) else {
                return Ok(lhs);
            };
            if op.precedence() != level || op == BinOp::Seq {
                return Ok(lhs);
            }
            self.bump();
            if op.is_right_assoc() {
                let rhs = self.binary(level)?;
                return Ok(Expr::binop(op, lhs, rhs));
            }
            let rhs = self.binary(level + 1)?;
            lhs = Expr::binop(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.at_op("!") {
            self.bump();
            let inner = self.unary()?;
            return Ok(Expr::Deref(Box::new(inner)));
        }
        self.application()
    }

    fn application(&mut self) -> Result<Expr, ParseError> {
        if let Some(open) = self.open_form()? {
            return Ok(open);
        }
        let mut head = if self.at_kw("ref") {
            self.bump();
            Expr::Ref(Box::new(self.atom()?))
        } else if self.at_kw("raise") {
            self.bump();
            Expr::Raise(self.ident()?)
        } else if self.at_op("-") && self.peek_at(1).kind == TokenKind::Int {
            self.bump();
            let t = self.bump();
            let magnitude: u64 = t.text.parse().map_err(|_| ParseError {
                offset: t.offset,
                expected: "integer literal in range".into(),
                found: describe(t),
            })?;
            if magnitude > i64::MAX as u64 + 1 {
                return Err(ParseError {
                    offset: t.offset,
                    expected: "integer literal in range".into(),
                    found: describe(t),
                });
            }
            Expr::Int((magnitude as i64).wrapping_neg())
        } else {
            self.atom()?
        };
        while self.starts_atom() {
            let arg = self.atom()?;
            head = Expr::app(head, arg);
        }
        Ok(head)
    }

    fn starts_atom(&self) -> bool {
        let t = self.peek();
        match t.kind {
            TokenKind::Int
            | TokenKind::Str
            | TokenKind::Ident
            | TokenKind::Abstract
            | TokenKind::Primitive => true,
            TokenKind::Keyword => t.text == "true" || t.text == "false",
            TokenKind::Punct => t.text == "(",
            _ => false,
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let t = self.peek();
        match t.kind {
            TokenKind::Int => {
                let n: i64 = t.text.parse().map_err(|_| ParseError {
                    offset: t.offset,
                    expected: "integer literal in range".into(),
                    found: describe(t),
                })?;
                self.bump();
                Ok(Expr::Int(n))
            }
            TokenKind::Str => {
                self.bump();
                Ok(Expr::Str(unescape(&t.text)))
            }
            TokenKind::Ident => {
                self.bump();
                Ok(Expr::Var(t.text.clone()))
            }
            TokenKind::Abstract => {
                self.bump();
                Ok(Expr::Abstract(t.text[1..t.text.len() - 1].to_string()))
            }
            TokenKind::Primitive => {
                self.bump();
                Ok(Expr::Primitive(Primitive::known(&t.text[2..t.text.len() - 2])))
            }
            TokenKind::Keyword if t.text == "true" || t.text == "false" => {
                self.bump();
                Ok(Expr::Bool(t.text == "true"))
            }
            TokenKind::Punct if t.text == "(" => {
                self.bump();
                if self.at(TokenKind::Punct, ")") {
                    self.bump();
                    return Ok(Expr::Unit);
                }
                let e = self.expr()?;
                self.expect(TokenKind::Punct, ")")?;
                Ok(e)
            }
            _ => Err(self.error("expression")),
        }
    }

    /// `let`, `fun`, `if`, `try` and `exception` forms; their last
    /// sub-expression extends as far right as possible.
    fn open_form(&mut self) -> Result<Option<Expr>, ParseError> {
        if self.peek().kind != TokenKind::Keyword {
            return Ok(None);
        }
        let e = match self.peek().text.as_str() {
            "let" => {
                let let_tok = self.bump();
                let recursive = if self.at_kw("rec") {
                    self.bump();
                    true
                } else {
                    false
                };
                let name = self.ident()?;
                let mut params = Vec::new();
                while self.peek().kind == TokenKind::Ident {
                    params.push(self.bump().text.clone());
                }
                self.expect(TokenKind::Operator, "=")?;
                let mut bound = self.expr()?;
                for p in params.into_iter().rev() {
                    bound = Expr::Fun(p, Box::new(bound));
                }
                if recursive && !matches!(bound, Expr::Fun(..)) {
                    return Err(ParseError {
                        offset: let_tok.offset,
                        expected: "function on the right of 'let rec'".into(),
                        found: "non-function binding".into(),
                    });
                }
                self.expect(TokenKind::Keyword, "in")?;
                let body = self.expr()?;
                Expr::Let {
                    recursive,
                    name,
                    bound: Box::new(bound),
                    body: Box::new(body),
                }
            }
            "fun" => {
                self.bump();
                let mut params = vec![self.ident()?];
                while self.peek().kind == TokenKind::Ident {
                    params.push(self.bump().text.clone());
                }
                self.expect(TokenKind::Operator, "->")?;
                let mut body = self.expr()?;
                for p in params.into_iter().rev() {
                    body = Expr::Fun(p, Box::new(body));
                }
                body
            }
            "if" => {
                self.bump();
                let c = self.expr()?;
                self.expect(TokenKind::Keyword, "then")?;
                let t = self.expr()?;
                self.expect(TokenKind::Keyword, "else")?;
                let e = self.expr()?;
                Expr::if_(c, t, e)
            }
            "try" => {
                self.bump();
                let body = self.expr()?;
                self.expect(TokenKind::Keyword, "with")?;
                let name = self.ident()?;
                self.expect(TokenKind::Operator, "->")?;
                let handler = self.expr()?;
                Expr::TryWith(Box::new(body), name, Box::new(handler))
            }
            "exception" => {
                self.bump();
                let name = self.ident()?;
                if !name.starts_with(|c: char| c.is_ascii_uppercase()) {
                    return Err(ParseError {
                        offset: self.tokens[self.pos - 1].offset,
                        expected: "capitalized exception name".into(),
                        found: format!("'{name}'"),
                    });
                }
                self.exceptions.push(name);
                self.expect(TokenKind::Keyword, "in")?;
                self.expr()?
            }
            _ => return Ok(None),
        };
        Ok(Some(e))
    }
}
