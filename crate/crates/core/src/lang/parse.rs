//! Surface syntax for programs, types and reference contexts.
//!
//! Terms: `\x y. M`, `M N`, `get r`, `set r V`, `M || N`, `r <= V`, `*`, parentheses.
//! A program file holds one thread per line; `#` starts a comment.
//! Types: `Unit`, `B`, `A -> B`, `A -{r,s}> B`, `Reg r A`; arrows associate to the right.

use super::syntax::{Effect, RegionCtx, TermA, TypeExpr};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {offset}: {reason}")]
pub struct ParseError {
    pub offset: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Star,
    Lambda,
    Dot,
    LParen,
    RParen,
    Par,
    StoreArrow,
    Arrow,
    /// `-{`
    EffOpen,
    /// `}>`
    EffClose,
    Comma,
    Colon,
    Eof,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn lex(src: &str, base: usize) -> Result<Vec<(Tok, usize)>, ParseError> {
    let mut out = Vec::new();
    let b = src.as_bytes();
    let mut i = 0;
    while i < b.len() {
        let c = b[i] as char;
        let at = base + i;
        if c == '#' {
            while i < b.len() && b[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let two = src.get(i..i + 2).unwrap_or("");
        let (tok, len) = match two {
            "||" => (Tok::Par, 2),
            "<=" => (Tok::StoreArrow, 2),
            "->" => (Tok::Arrow, 2),
            "-{" => (Tok::EffOpen, 2),
            "}>" => (Tok::EffClose, 2),
            _ => match c {
                '*' => (Tok::Star, 1),
                '\\' => (Tok::Lambda, 1),
                '.' => (Tok::Dot, 1),
                '(' => (Tok::LParen, 1),
                ')' => (Tok::RParen, 1),
                ',' => (Tok::Comma, 1),
                ':' => (Tok::Colon, 1),
                c if is_ident_start(c) => {
                    let mut j = i + 1;
                    while j < b.len() && is_ident_char(b[j] as char) {
                        j += 1;
                    }
                    (Tok::Ident(src[i..j].to_string()), j - i)
                }
                _ => {
                    let ch = src[i..].chars().next().unwrap();
                    return Err(ParseError { offset: at, reason: format!("unexpected character {ch:?}") });
                }
            },
        };
        out.push((tok, at));
        i += len;
    }
    out.push((Tok::Eof, base + src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, reason: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { offset: self.offset(), reason: reason.into() })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.fail(format!("expected {what}"))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if !is_keyword(&s) => {
                self.bump();
                Ok(s)
            }
            _ => self.fail(format!("expected {what}")),
        }
    }

    fn par(&mut self) -> Result<TermA, ParseError> {
        let mut t = self.body()?;
        while *self.peek() == Tok::Par {
            self.bump();
            let r = self.body()?;
            t = TermA::par(t, r);
        }
        Ok(t)
    }

    /// A lambda body stops at `||` only when the lambda was not parenthesized;
    /// `\x. M || N` reads as `\x. (M || N)`.
    fn lambda(&mut self) -> Result<TermA, ParseError> {
        self.expect(Tok::Lambda, "'\\'")?;
        let mut xs = vec![self.ident("a variable")?];
        while let Tok::Ident(s) = self.peek() {
            if is_keyword(s) {
                break;
            }
            xs.push(self.ident("a variable")?);
        }
        self.expect(Tok::Dot, "'.'")?;
        let body = self.par()?;
        Ok(xs.into_iter().rev().fold(body, |b, x| TermA::lam(&x, b)))
    }

    fn body(&mut self) -> Result<TermA, ParseError> {
        if *self.peek() == Tok::Lambda {
            return self.lambda();
        }
        if let (Tok::Ident(r), Tok::StoreArrow) = (self.peek().clone(), self.peek2().clone()) {
            if is_keyword(&r) {
                return self.fail("a keyword cannot name a reference");
            }
            self.bump();
            self.bump();
            let v = self.value()?;
            return Ok(TermA::store(&r, v));
        }
        self.app()
    }

    fn value(&mut self) -> Result<TermA, ParseError> {
        let at = self.offset();
        let v = if *self.peek() == Tok::Lambda { self.lambda()? } else { self.atom()? };
        if v.is_value() {
            Ok(v)
        } else {
            Err(ParseError { offset: at, reason: "expected a value".into() })
        }
    }

    fn starts_atom(&self) -> bool {
        match self.peek() {
            Tok::Ident(s) => s != "Unit",
            Tok::Star | Tok::LParen | Tok::Lambda => true,
            _ => false,
        }
    }

    fn app(&mut self) -> Result<TermA, ParseError> {
        let mut t = self.atom()?;
        while self.starts_atom() {
            if *self.peek() == Tok::Lambda {
                let l = self.lambda()?;
                return Ok(TermA::app(t, l));
            }
            if let (Tok::Ident(_), Tok::StoreArrow) = (self.peek(), self.peek2()) {
                break;
            }
            let a = self.atom()?;
            t = TermA::app(t, a);
        }
        Ok(t)
    }

    fn atom(&mut self) -> Result<TermA, ParseError> {
        match self.peek().clone() {
            Tok::Star => {
                self.bump();
                Ok(TermA::Star)
            }
            Tok::LParen => {
                self.bump();
                let t = self.par()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(t)
            }
            Tok::Ident(s) if s == "get" => {
                self.bump();
                let r = self.ident("a reference")?;
                Ok(TermA::get(&r))
            }
            Tok::Ident(s) if s == "set" => {
                self.bump();
                let r = self.ident("a reference")?;
                let v = self.value()?;
                Ok(TermA::set(&r, v))
            }
            Tok::Ident(_) => Ok(TermA::Var(self.ident("a variable")?)),
            _ => self.fail("expected a term"),
        }
    }

    fn ty(&mut self) -> Result<TypeExpr, ParseError> {
        let a = self.ty_atom()?;
        match self.peek() {
            Tok::Arrow => {
                self.bump();
                let b = self.ty()?;
                Ok(TypeExpr::Arrow(Box::new(a), Effect::new(), Box::new(b)))
            }
            Tok::EffOpen => {
                self.bump();
                let mut e = Effect::new();
                if *self.peek() != Tok::EffClose {
                    e.insert(self.ident("a reference")?);
                    while *self.peek() == Tok::Comma {
                        self.bump();
                        e.insert(self.ident("a reference")?);
                    }
                }
                self.expect(Tok::EffClose, "'}>'")?;
                let b = self.ty()?;
                Ok(TypeExpr::Arrow(Box::new(a), e, Box::new(b)))
            }
            _ => Ok(a),
        }
    }

    fn ty_atom(&mut self) -> Result<TypeExpr, ParseError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let t = self.ty()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(t)
            }
            Tok::Ident(s) if s == "Unit" => {
                self.bump();
                Ok(TypeExpr::Unit)
            }
            Tok::Ident(s) if s == "B" => {
                self.bump();
                Ok(TypeExpr::Behavior)
            }
            Tok::Ident(s) if s == "Reg" => {
                self.bump();
                let r = self.ident("a reference")?;
                let a = self.ty_atom()?;
                Ok(TypeExpr::Reg(r, Box::new(a)))
            }
            _ => self.fail("expected a type"),
        }
    }

    fn end(&self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.fail("unexpected trailing input")
        }
    }
}

fn is_keyword(s: &str) -> bool {
    matches!(s, "get" | "set" | "Unit" | "B" | "Reg")
}

fn parser(src: &str, base: usize) -> Result<Parser, ParseError> {
    Ok(Parser { toks: lex(src, base)?, pos: 0 })
}

/// One term.
pub fn parse_term(src: &str) -> Result<TermA, ParseError> {
    let mut p = parser(src, 0)?;
    let t = p.par()?;
    p.end()?;
    Ok(t)
}

/// A program file: non-blank lines are threads joined by `||`.
pub fn parse_program(src: &str) -> Result<TermA, ParseError> {
    let mut threads = Vec::new();
    let mut base = 0;
    for line in src.split_inclusive('\n') {
        let mut p = parser(line, base)?;
        if *p.peek() != Tok::Eof {
            threads.push(p.par()?);
            p.end()?;
        }
        base += line.len();
    }
    TermA::par_all(threads).ok_or(ParseError { offset: src.len(), reason: "empty program".into() })
}

pub fn parse_type(src: &str) -> Result<TypeExpr, ParseError> {
    let mut p = parser(src, 0)?;
    let t = p.ty()?;
    p.end()?;
    Ok(t)
}

/// A reference context: one `r : type` per line.
pub fn parse_region_ctx(src: &str) -> Result<RegionCtx, ParseError> {
    let mut out = RegionCtx::new();
    let mut base = 0;
    for line in src.split_inclusive('\n') {
        let mut p = parser(line, base)?;
        if *p.peek() != Tok::Eof {
            let at = p.offset();
            let r = p.ident("a reference")?;
            p.expect(Tok::Colon, "':'")?;
            let t = p.ty()?;
            p.end()?;
            if out.iter().any(|(s, _)| *s == r) {
                return Err(ParseError { offset: at, reason: format!("reference {r} declared twice") });
            }
            out.push((r, t));
        }
        base += line.len();
    }
    Ok(out)
}
