//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr    := term (('+'|'-') term)*
//! term    := factor ('*' factor)*
//! factor  := base ('^' INT)?
//! base    := 'x' | 'e' | NUMBER | '-' NUMBER | elemlit
//!          | 'sup(' expr ',' expr ')' | 'inf(' expr ',' expr ')'
//!          | 'abs(' expr ')' | IDENT '(' expr ')' | '(' expr ')'
//! elemlit := '[' NUMBER (',' NUMBER)* ']'
//! ```
//!
//! Offsets in errors are byte offsets into the input.

use super::ast::{FuncExpr, ScalarFn};
use crate::algebra::{Element, ModelSpec, Scalar};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64, String),
    Ident(String),
    Sym(char),
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    offset: usize,
}

fn syntax(offset: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        offset,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || (c == b'.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            // An exponent only counts when digits follow; otherwise `2e`
            // would swallow the unit.
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let lexeme = &text[start..i];
            let value: f64 = lexeme
                .parse()
                .map_err(|_| syntax(start, format!("malformed number `{lexeme}`")))?;
            if !value.is_finite() {
                return Err(syntax(start, format!("number `{lexeme}` is not finite")));
            }
            out.push(Token {
                tok: Tok::Num(value, lexeme.to_string()),
                offset: start,
            });
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(text[start..i].to_string()),
                offset: start,
            });
        } else if b"+-*^(),[]".contains(&c) {
            out.push(Token {
                tok: Tok::Sym(c as char),
                offset: start,
            });
            i += 1;
        } else {
            let ch = text[start..].chars().next().unwrap_or('?');
            return Err(syntax(start, format!("unexpected character `{ch}`")));
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        offset: text.len(),
    });
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn at_sym(&self, c: char) -> bool {
        self.peek().tok == Tok::Sym(c)
    }

    fn expect_sym(&mut self, c: char) -> Result<()> {
        let t = self.next();
        if t.tok == Tok::Sym(c) {
            Ok(())
        } else {
            Err(syntax(t.offset, format!("expected `{c}`, found {}", describe(&t.tok))))
        }
    }

    fn expr(&mut self) -> Result<FuncExpr> {
        let mut lhs = self.term()?;
        loop {
            if self.at_sym('+') {
                self.next();
                lhs = FuncExpr::add(lhs, self.term()?);
            } else if self.at_sym('-') {
                self.next();
                lhs = FuncExpr::sub(lhs, self.term()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<FuncExpr> {
        let mut lhs = self.factor()?;
        while self.at_sym('*') {
            self.next();
            lhs = FuncExpr::mul(lhs, self.factor()?);
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<FuncExpr> {
        let base = self.base()?;
        if !self.at_sym('^') {
            return Ok(base);
        }
        self.next();
        let t = self.next();
        match t.tok {
            Tok::Num(v, ref lexeme) if lexeme.bytes().all(|b| b.is_ascii_digit()) && v >= 1.0 => {
                let k = u32::try_from(v as u64)
                    .map_err(|_| syntax(t.offset, "exponent too large"))?;
                Ok(FuncExpr::pow(base, k))
            }
            _ => Err(syntax(
                t.offset,
                format!("expected a positive integer exponent, found {}", describe(&t.tok)),
            )),
        }
    }

    fn number(&mut self) -> Result<f64> {
        let negative = if self.at_sym('-') {
            self.next();
            true
        } else {
            false
        };
        let t = self.next();
        match t.tok {
            Tok::Num(v, _) => Ok(if negative { -v } else { v }),
            _ => Err(syntax(t.offset, format!("expected a number, found {}", describe(&t.tok)))),
        }
    }

    fn base(&mut self) -> Result<FuncExpr> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Num(..) | Tok::Sym('-') => {
                let v = self.number()?;
                Ok(FuncExpr::Scalar(Scalar::new(v)?))
            }
            Tok::Sym('(') => {
                self.next();
                let inner = self.expr()?;
                self.expect_sym(')')?;
                Ok(inner)
            }
            Tok::Sym('[') => {
                self.next();
                let mut values = vec![self.number()?];
                while self.at_sym(',') {
                    self.next();
                    values.push(self.number()?);
                }
                self.expect_sym(']')?;
                Ok(FuncExpr::Const(Element::atomic(values)?))
            }
            Tok::Ident(ref name) => {
                self.next();
                match name.as_str() {
                    "x" => Ok(FuncExpr::Var),
                    "e" => Ok(FuncExpr::Unit),
                    "sup" | "inf" => {
                        self.expect_sym('(')?;
                        let a = self.expr()?;
                        self.expect_sym(',')?;
                        let b = self.expr()?;
                        self.expect_sym(')')?;
                        Ok(if name == "sup" {
                            FuncExpr::sup(a, b)
                        } else {
                            FuncExpr::inf(a, b)
                        })
                    }
                    "abs" => {
                        self.expect_sym('(')?;
                        let a = self.expr()?;
                        self.expect_sym(')')?;
                        Ok(FuncExpr::abs(a))
                    }
                    other => match ScalarFn::from_name(other) {
                        Some(f) => {
                            self.expect_sym('(')?;
                            let a = self.expr()?;
                            self.expect_sym(')')?;
                            Ok(FuncExpr::map(f, a))
                        }
                        None => Err(Error::UnknownIdentifier {
                            name: other.to_string(),
                            offset: t.offset,
                        }),
                    },
                }
            }
            _ => Err(syntax(
                t.offset,
                format!("expected an operand, found {}", describe(&t.tok)),
            )),
        }
    }
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Num(_, s) => format!("number `{s}`"),
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Sym(c) => format!("`{c}`"),
        Tok::Eof => "end of input".to_string(),
    }
}

/// Parses an expression. Element literals are atomic vectors; their length is
/// checked against a model by [`parse_for`].
pub fn parse(text: &str) -> Result<FuncExpr> {
    let mut p = Parser {
        tokens: lex(text)?,
        pos: 0,
    };
    let expr = p.expr()?;
    let t = p.peek();
    if t.tok != Tok::Eof {
        return Err(syntax(t.offset, format!("unexpected {}", describe(&t.tok))));
    }
    Ok(expr)
}

/// Parses and checks that every element literal belongs to `model`.
pub fn parse_for(text: &str, model: ModelSpec) -> Result<FuncExpr> {
    let expr = parse(text)?;
    check_constants(&expr, model)?;
    Ok(expr)
}

fn check_constants(expr: &FuncExpr, model: ModelSpec) -> Result<()> {
    if let FuncExpr::Const(c) = expr {
        if c.model() != model {
            return Err(Error::ModelMismatch {
                left: model,
                right: c.model(),
            });
        }
    }
    expr.children()
        .into_iter()
        .try_for_each(|c| check_constants(c, model))
}
