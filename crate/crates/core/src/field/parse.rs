//! Text form of field elements: sums of products of rationals, `i`, and
//! `sqrtN` (N ∈ {2, 3, 6} or any N whose root lies in the field), with
//! parentheses and implicit multiplication, e.g. `3i/5`, `1/2 - 3/4 i`,
//! `(1+sqrt3)/sqrt2`.

use alloc::format;
use core::str::FromStr;

use num_bigint::BigInt;

use super::{ExScalar, Rational};
use crate::{Error, Field, Result, Ring};

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&mut self) -> Option<u8> {
        while self.src.as_bytes().get(self.pos).is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
        self.src.as_bytes().get(self.pos).copied()
    }

    fn error(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at offset {} in {:?}", self.pos, self.src))
    }

    fn expr(&mut self) -> Result<ExScalar> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                self.term()?.negated()
            }
            Some(b'+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.plus(&self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.minus(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<ExScalar> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc.times(&self.factor()?);
                }
                Some(b'/') => {
                    self.pos += 1;
                    acc = acc.div(&self.factor()?)?;
                }
                Some(c) if c.is_ascii_digit() || c == b'i' || c == b's' || c == b'(' => {
                    acc = acc.times(&self.factor()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn digits(&mut self) -> Result<BigInt> {
        self.peek();
        let start = self.pos;
        while self.src.as_bytes().get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected digits"));
        }
        self.src[start..self.pos].parse().map_err(|_| self.error("bad integer"))
    }

    fn factor(&mut self) -> Result<ExScalar> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => Ok(ExScalar::from_rational(Rational::from_integer(self.digits()?))),
            Some(b'i') => {
                self.pos += 1;
                Ok(ExScalar::i())
            }
            Some(b's') if self.src[self.pos..].starts_with("sqrt") => {
                self.pos += 4;
                let n = if self.peek() == Some(b'(') {
                    self.pos += 1;
                    let n = self.digits()?;
                    if self.peek() != Some(b')') {
                        return Err(self.error("expected ')'"));
                    }
                    self.pos += 1;
                    n
                } else {
                    self.digits()?
                };
                ExScalar::sqrt_of_rational(&Rational::from_integer(n.clone()))
                    .ok_or_else(|| self.error(&format!("sqrt{n} is outside the field")))
            }
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(v)
            }
            _ => Err(self.error("expected a number, i, sqrtN or '('")),
        }
    }
}

impl FromStr for ExScalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser { src: s, pos: 0 };
        let v = p.expr()?;
        if p.peek().is_some() {
            return Err(p.error("trailing input"));
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rat;

    #[test]
    fn forms() {
        let p = |s: &str| s.parse::<ExScalar>().unwrap();
        assert_eq!(p("-1/3"), ExScalar::from_rational(rat(-1, 3)));
        assert_eq!(p("3i/5"), ExScalar::from_gaussian(rat(0, 1), rat(3, 5)));
        assert_eq!(p("3/5 i"), p("3i/5"));
        assert_eq!(p("1/sqrt2"), p("sqrt2/2"));
        assert_eq!(p("sqrt(6)"), p("sqrt2*sqrt3"));
        assert_eq!(p("(1+sqrt3)(1-sqrt3)"), ExScalar::from_int(-2));
        assert_eq!(p("sqrt12"), p("2 sqrt3"));
    }

    #[test]
    fn rejects() {
        for s in ["", "1/", "sqrt5", "1 2 )", "x", "1/0"] {
            assert!(s.parse::<ExScalar>().is_err(), "{s}");
        }
    }
}
