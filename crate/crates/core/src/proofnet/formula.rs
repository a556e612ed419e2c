//! MELL formulas over the single atom-free signature `1 | ⊥ | !A | ?A | A⊗B | A⅋B`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    One,
    Bottom,
    Bang(Arc<Formula>),
    Whynot(Arc<Formula>),
    Tensor(Arc<Formula>, Arc<Formula>),
    Par(Arc<Formula>, Arc<Formula>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("formula parse error at byte {offset}: {reason}")]
pub struct FormulaParseError {
    pub offset: usize,
    pub reason: String,
}

impl Formula {
    pub fn bang(a: Formula) -> Formula {
        Formula::Bang(Arc::new(a))
    }

    pub fn whynot(a: Formula) -> Formula {
        Formula::Whynot(Arc::new(a))
    }

    pub fn tensor(a: Formula, b: Formula) -> Formula {
        Formula::Tensor(Arc::new(a), Arc::new(b))
    }

    pub fn par(a: Formula, b: Formula) -> Formula {
        Formula::Par(Arc::new(a), Arc::new(b))
    }

    /// `A ⊸ B = A^⊥ ⅋ B`.
    pub fn lolli(a: Formula, b: Formula) -> Formula {
        Formula::par(a.dual(), b)
    }

    pub fn dual(&self) -> Formula {
        match self {
            Formula::One => Formula::Bottom,
            Formula::Bottom => Formula::One,
            Formula::Bang(a) => Formula::whynot(a.dual()),
            Formula::Whynot(a) => Formula::bang(a.dual()),
            Formula::Tensor(a, b) => Formula::par(a.dual(), b.dual()),
            Formula::Par(a, b) => Formula::tensor(a.dual(), b.dual()),
        }
    }

    /// Body of `!A`.
    pub fn unbang(&self) -> Option<&Formula> {
        match self {
            Formula::Bang(a) => Some(a),
            _ => None,
        }
    }

    /// Body of `?A`.
    pub fn unwhynot(&self) -> Option<&Formula> {
        match self {
            Formula::Whynot(a) => Some(a),
            _ => None,
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::One | Formula::Bottom => 0,
            Formula::Bang(a) | Formula::Whynot(a) => 1 + a.depth(),
            Formula::Tensor(a, b) | Formula::Par(a, b) => 1 + a.depth().max(b.depth()),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::One => write!(f, "1"),
            Formula::Bottom => write!(f, "bot"),
            Formula::Bang(a) => write!(f, "!{a}"),
            Formula::Whynot(a) => write!(f, "?{a}"),
            Formula::Tensor(a, b) => write!(f, "({a}*{b})"),
            Formula::Par(a, b) => write!(f, "({a}%{b})"),
        }
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Formula {
    type Err = FormulaParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Parser { s: s.as_bytes(), pos: 0 };
        let f = p.formula()?;
        p.skip_ws();
        if p.pos != p.s.len() {
            return Err(p.err("trailing input"));
        }
        Ok(f)
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, reason: &str) -> FormulaParseError {
        FormulaParseError {
            offset: self.pos,
            reason: reason.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn formula(&mut self) -> Result<Formula, FormulaParseError> {
        self.skip_ws();
        match self.s.get(self.pos) {
            Some(b'1') => {
                self.pos += 1;
                Ok(Formula::One)
            }
            Some(b'b') if self.s[self.pos..].starts_with(b"bot") => {
                self.pos += 3;
                Ok(Formula::Bottom)
            }
            Some(b'!') => {
                self.pos += 1;
                Ok(Formula::bang(self.formula()?))
            }
            Some(b'?') => {
                self.pos += 1;
                Ok(Formula::whynot(self.formula()?))
            }
            Some(b'(') => {
                self.pos += 1;
                let a = self.formula()?;
                self.skip_ws();
                let op = *self.s.get(self.pos).ok_or_else(|| self.err("unexpected end"))?;
                if op != b'*' && op != b'%' {
                    return Err(self.err("expected `*` or `%`"));
                }
                self.pos += 1;
                let b = self.formula()?;
                self.skip_ws();
                if self.s.get(self.pos) != Some(&b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(if op == b'*' {
                    Formula::tensor(a, b)
                } else {
                    Formula::par(a, b)
                })
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end")),
        }
    }
}
