//! Recursive-descent parser for the polynomial grammar:
//!
//! ```text
//! expr    := ['-'] term (('+' | '-') term)*
//! term    := unary ('*' unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' integer)?
//! primary := integer ['/' integer] | identifier | '(' expr ')'
//! ```
//!
//! Multiplication must be explicit. `a/b` is accepted only between integer
//! literals so that printed rational coefficients parse back.

use std::sync::Arc;

use num_bigint::BigInt;

use super::{Poly, PolyRing};
use crate::error::{ParseError, ParseErrorKind, Result};
use crate::field::Field;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
    End,
}

fn syntax(position: usize, message: impl Into<String>) -> ParseError {
    ParseError { kind: ParseErrorKind::Syntax, position, message: message.into() }
}

fn lex(text: &str) -> std::result::Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '^' => Tok::Caret,
            '/' => Tok::Slash,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            d if d.is_ascii_digit() => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: BigInt = text[start..i].parse().expect("digits");
                out.push((start, Tok::Int(n)));
                continue;
            }
            a if a.is_ascii_alphabetic() || a == '_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
                continue;
            }
            other => return Err(syntax(start, format!("unexpected character {other:?}"))),
        };
        out.push((start, tok));
        i += 1;
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser<'a, F: Field> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    ring: &'a Arc<PolyRing<F>>,
}

impl<F: Field> Parser<'_, F> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> std::result::Result<Poly<F>, ParseError> {
        let mut acc = if *self.peek() == Tok::Minus {
            self.bump();
            self.term()?.neg()
        } else {
            self.term()?
        };
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = acc.plus(&self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    acc = acc.minus(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> std::result::Result<Poly<F>, ParseError> {
        let mut acc = self.unary()?;
        while *self.peek() == Tok::Star {
            self.bump();
            acc = acc.times(&self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> std::result::Result<Poly<F>, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(self.unary()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> std::result::Result<Poly<F>, ParseError> {
        let base = self.primary()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let at = self.offset();
        match self.bump() {
            Tok::Int(n) => {
                let e: u16 = n.try_into().map_err(|_| syntax(at, "exponent too large"))?;
                Ok(base.pow(e as u32))
            }
            _ => Err(syntax(at, "expected a nonnegative integer exponent")),
        }
    }

    fn primary(&mut self) -> std::result::Result<Poly<F>, ParseError> {
        let at = self.offset();
        match self.bump() {
            Tok::Int(n) => {
                let field = self.ring.field();
                if *self.peek() == Tok::Slash {
                    self.bump();
                    let den_at = self.offset();
                    let den = match self.bump() {
                        Tok::Int(d) => d,
                        _ => return Err(syntax(den_at, "expected an integer denominator")),
                    };
                    let c = field.from_ratio(&n, &den).ok_or_else(|| ParseError {
                        kind: ParseErrorKind::Coefficient,
                        position: at,
                        message: format!("coefficient {n}/{den} is not representable in the field"),
                    })?;
                    Ok(Poly::constant(self.ring, c))
                } else {
                    Ok(Poly::constant(self.ring, field.from_bigint(&n)))
                }
            }
            Tok::Ident(name) => match self.ring.var_index(&name) {
                Some(i) => Ok(Poly::var(self.ring, i)),
                None => Err(ParseError {
                    kind: ParseErrorKind::UnknownVariable,
                    position: at,
                    message: format!("unknown variable {name}"),
                }),
            },
            Tok::LParen => {
                let inner = self.expr()?;
                let close = self.offset();
                if self.bump() != Tok::RParen {
                    return Err(syntax(close, "expected ')'"));
                }
                Ok(inner)
            }
            Tok::End => Err(syntax(at, "unexpected end of input")),
            t => Err(syntax(at, format!("unexpected token {t:?}"))),
        }
    }
}

/// Parses `text` as a polynomial in `ring`.
pub fn parse_poly<F: Field>(text: &str, ring: &Arc<PolyRing<F>>) -> Result<Poly<F>> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, ring };
    let out = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(syntax(p.offset(), format!("unexpected token {:?}", p.peek())).into());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::field::{PrimeField, Rationals};

    #[test]
    fn two_terms() {
        let r = PolyRing::standard(Rationals, &["x", "y"]).unwrap();
        let p = parse_poly("x^2 + 2*x*y", &r).unwrap();
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn zero_polynomial() {
        let r = PolyRing::standard(Rationals, &["x"]).unwrap();
        assert!(parse_poly("0", &r).unwrap().is_zero());
    }

    #[test]
    fn characteristic_reduction() {
        let r = PolyRing::standard(PrimeField::new(3).unwrap(), &["x"]).unwrap();
        let p = parse_poly("x^3", &r).unwrap();
        assert_eq!(p.terms().next().unwrap().1, &1);
        assert!(parse_poly("3*x^3", &r).unwrap().is_zero());
    }

    #[test]
    fn errors_carry_positions() {
        let r = PolyRing::standard(Rationals, &["x", "y"]).unwrap();
        match parse_poly("x + z", &r) {
            Err(Error::Parse(e)) => {
                assert_eq!(e.kind, ParseErrorKind::UnknownVariable);
                assert_eq!(e.position, 4);
            }
            other => panic!("unexpected {other:?}"),
        }
        match parse_poly("2x", &r) {
            Err(Error::Parse(e)) => {
                assert_eq!(e.kind, ParseErrorKind::Syntax);
                assert_eq!(e.position, 1);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_poly("(x + y", &r).is_err());
        assert!(parse_poly("x^y", &r).is_err());
        assert!(parse_poly("x $ y", &r).is_err());
    }

    #[test]
    fn unrepresentable_coefficient() {
        let r = PolyRing::standard(PrimeField::new(5).unwrap(), &["x"]).unwrap();
        match parse_poly("1/5*x", &r) {
            Err(Error::Parse(e)) => assert_eq!(e.kind, ParseErrorKind::Coefficient),
            other => panic!("unexpected {other:?}"),
        }
        let p = parse_poly("1/2*x", &r).unwrap();
        assert_eq!(p.terms().next().unwrap().1, &3);
    }

    #[test]
    fn whitespace_and_unary_minus() {
        let r = PolyRing::standard(Rationals, &["x", "y"]).unwrap();
        let a = parse_poly(" - x ^ 2*  -y ", &r).unwrap();
        assert_eq!(a, parse_poly("x^2*y", &r).unwrap());
    }
}
