//! Polynomial text syntax.
//!
//! Two forms are accepted: a coefficient list `[c0, c1, ..., 1]` (lowest
//! degree first) or an expression in the single variable `T` with integer
//! constants, `+ - * ^`, parentheses and implicit multiplication
//! (`2T^2`, `T(T-2)`, `(T-1)(T-2)`).

use num_bigint::BigInt;
use num_traits::One;

use super::poly::PolyError;
use super::zpoly::{self, ZPoly};

const MAX_EXPONENT: u32 = 100_000;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Var,
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
}

fn err(pos: usize, msg: impl Into<String>) -> PolyError {
    PolyError::Parse {
        pos,
        msg: msg.into(),
    }
}

fn lex(s: &str) -> Result<Vec<(usize, Tok)>, PolyError> {
    let bytes = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((start, Tok::Num(s[start..i].parse().unwrap())));
                continue;
            }
            b'T' => Tok::Var,
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'[' => Tok::LBracket,
            b']' => Tok::RBracket,
            b',' => Tok::Comma,
            _ => return Err(err(i, format!("unexpected character {:?}", c as char))),
        };
        out.push((i, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), PolyError> {
        let at = self.offset();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            _ => Err(err(at, format!("expected {what}"))),
        }
    }

    fn coeff_list(&mut self) -> Result<ZPoly, PolyError> {
        self.expect(Tok::LBracket, "'['")?;
        let mut out = Vec::new();
        loop {
            let neg = if self.peek() == Some(&Tok::Minus) {
                self.bump();
                true
            } else {
                if self.peek() == Some(&Tok::Plus) {
                    self.bump();
                }
                false
            };
            let at = self.offset();
            match self.bump() {
                Some(Tok::Num(n)) => out.push(if neg { -n } else { n }),
                _ => return Err(err(at, "expected integer coefficient")),
            }
            let at = self.offset();
            match self.bump() {
                Some(Tok::Comma) => {}
                Some(Tok::RBracket) => break,
                _ => return Err(err(at, "expected ',' or ']'")),
            }
        }
        Ok(zpoly::trim(out))
    }

    fn expr(&mut self) -> Result<ZPoly, PolyError> {
        let mut acc = match self.peek() {
            Some(Tok::Minus) => {
                self.bump();
                zpoly::neg(&self.term()?)
            }
            Some(Tok::Plus) => {
                self.bump();
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = zpoly::add(&acc, &self.term()?);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = zpoly::sub(&acc, &self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<ZPoly, PolyError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    acc = zpoly::mul(&acc, &self.factor()?);
                }
                Some(Tok::Num(_) | Tok::Var | Tok::LParen) => {
                    acc = zpoly::mul(&acc, &self.factor()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<ZPoly, PolyError> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.bump();
        let at = self.offset();
        let e = match self.bump() {
            Some(Tok::Num(n)) => u32::try_from(n)
                .ok()
                .filter(|&e| e <= MAX_EXPONENT)
                .ok_or_else(|| err(at, "exponent too large"))?,
            _ => return Err(err(at, "expected a nonnegative integer exponent")),
        };
        let mut acc: ZPoly = vec![BigInt::one()];
        let mut sq = base;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = zpoly::mul(&acc, &sq);
            }
            e >>= 1;
            if e > 0 {
                sq = zpoly::mul(&sq, &sq);
            }
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<ZPoly, PolyError> {
        let at = self.offset();
        match self.bump() {
            Some(Tok::Num(n)) => Ok(zpoly::trim(vec![n])),
            Some(Tok::Var) => Ok(vec![BigInt::from(0), BigInt::one()]),
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            _ => Err(err(at, "expected a number, 'T' or '('")),
        }
    }
}

/// Parses either syntax into a normalized coefficient vector.
pub fn parse_poly(s: &str) -> Result<ZPoly, PolyError> {
    let toks = lex(s)?;
    let mut parser = Parser {
        toks,
        pos: 0,
        end: s.len(),
    };
    let out = if parser.peek() == Some(&Tok::LBracket) {
        parser.coeff_list()?
    } else {
        parser.expr()?
    };
    if parser.pos < parser.toks.len() {
        return Err(err(parser.offset(), "trailing input"));
    }
    Ok(out)
}
