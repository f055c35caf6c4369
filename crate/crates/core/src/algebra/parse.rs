//! Recursive-descent parser for the polynomial text format.
//!
//! Accepts the rendered form (`u^2 + 3*u*t + 4*u`) plus parentheses, so fixtures
//! can be written in factored form such as `u*(u + 4*t + 3)`.

use num_bigint::BigInt;
use num_traits::Zero;

use super::{BivarPoly, Rational};
use crate::error::{Error, Result};

pub(super) fn parse_poly(src: &str) -> Result<BivarPoly> {
    let mut parser = Parser {
        chars: src.chars().filter(|c| !c.is_whitespace()).collect(),
        pos: 0,
    };
    if parser.chars.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let p = parser.expr()?;
    if parser.pos != parser.chars.len() {
        return Err(parser.error("trailing input"));
    }
    Ok(p)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn error(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at offset {}", self.pos))
    }

    fn expr(&mut self) -> Result<BivarPoly> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                '+' => {
                    self.pos += 1;
                    acc += self.term()?;
                }
                '-' => {
                    self.pos += 1;
                    acc -= self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<BivarPoly> {
        let mut acc = self.unary()?;
        while self.peek() == Some('*') {
            self.pos += 1;
            acc = &acc * &self.unary()?;
        }
        Ok(acc)
    }

    /// Signs bind looser than `^`: `-u^2` is `-(u^2)`.
    fn unary(&mut self) -> Result<BivarPoly> {
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<BivarPoly> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let e = self.integer()?;
            let e: u32 = e
                .try_into()
                .map_err(|_| self.error("exponent out of range"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<BivarPoly> {
        match self.peek() {
            Some('u') => {
                self.pos += 1;
                Ok(BivarPoly::u())
            }
            Some('t') => {
                self.pos += 1;
                Ok(BivarPoly::t())
            }
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.integer()?;
                let value = if self.peek() == Some('/') {
                    self.pos += 1;
                    let den = self.integer()?;
                    if den.is_zero() {
                        return Err(self.error("zero denominator"));
                    }
                    Rational::new(num, den)
                } else {
                    Rational::from_integer(num)
                };
                Ok(BivarPoly::constant(value))
            }
            _ => Err(self.error("unexpected character")),
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected integer"));
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        digits
            .parse()
            .map_err(|_| Error::Parse(format!("bad integer {digits}")))
    }
}

#[cfg(test)]
mod tests {
    use super::super::rat;
    use super::*;

    #[test]
    fn parses_rendered_and_factored_forms() {
        let a = parse_poly("u^2 + 3*u*t + 4*u").unwrap();
        let b = parse_poly("u*(u+3*t+4)").unwrap();
        assert_eq!(a, b);
        assert_eq!(parse_poly("3/4").unwrap(), BivarPoly::constant(rat(3, 4)));
        assert_eq!(
            parse_poly("-(t - 1)").unwrap(),
            parse_poly("1 - t").unwrap()
        );
    }

    #[test]
    fn sign_binds_looser_than_power() {
        assert_eq!(parse_poly("-u^2").unwrap(), -parse_poly("u^2").unwrap());
        assert_eq!(
            parse_poly("2*-t^3").unwrap(),
            BivarPoly::monomial(rat(-2, 1), 0, 3)
        );
    }

    #[test]
    fn coefficients_beyond_machine_words() {
        let big = "123456789012345678901234567890";
        let p = parse_poly(&format!("{big}*u")).unwrap();
        assert_eq!(p.to_string(), format!("{big}*u"));
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_poly("").is_err());
        assert!(parse_poly("u +").is_err());
        assert!(parse_poly("x").is_err());
        assert!(parse_poly("(u").is_err());
        assert!(parse_poly("1/0").is_err());
    }
}
