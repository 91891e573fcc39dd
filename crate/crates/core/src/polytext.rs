//! Text syntax for polynomials: `3/2*x1^2*x2 - x2 + 1`.
//!
//! Terms are products of rational numbers, variable names (optionally raised
//! to a non-negative integer power) and parenthesized sub-expressions.
//! Whitespace is ignored and `−` is accepted as a minus sign.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::poly::{Poly, Rational};

/// Parses `text` on a chart whose variables are named `names`.
pub fn parse_poly(text: &str, names: &[String]) -> Result<Poly> {
    let mut p = Parser {
        chars: text.chars().collect(),
        pos: 0,
        names,
    };
    p.skip_ws();
    if p.at_end() {
        return Err(p.err("empty polynomial"));
    }
    let out = p.expr()?;
    p.skip_ws();
    if !p.at_end() {
        return Err(p.err(&format!("unexpected character '{}'", p.chars[p.pos])));
    }
    Ok(out)
}

/// Default variable names `x1..xn`.
pub fn default_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    names: &'a [String],
}

impl Parser<'_> {
    fn nvars(&self) -> usize {
        self.names.len()
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse {
            line: 1,
            column: self.pos + 1,
            message: msg.to_string(),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn sign(&mut self) -> Option<bool> {
        self.skip_ws();
        match self.peek() {
            Some('+') => {
                self.pos += 1;
                Some(false)
            }
            Some('-') | Some('−') => {
                self.pos += 1;
                Some(true)
            }
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<Poly> {
        let neg = self.sign().unwrap_or(false);
        let mut acc = self.term()?;
        if neg {
            acc = -acc;
        }
        while let Some(neg) = self.sign() {
            let t = self.term()?;
            if neg {
                acc -= &t;
            } else {
                acc += &t;
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.factor()?;
        loop {
            self.skip_ws();
            if self.peek() == Some('*') {
                self.pos += 1;
                acc = &acc * &self.factor()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<Poly> {
        self.skip_ws();
        let base = match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let num = self.integer()?;
                self.skip_ws();
                if self.peek() == Some('/') {
                    self.pos += 1;
                    self.skip_ws();
                    let den = self.integer()?;
                    if den.is_zero() {
                        return Err(self.err("division by zero"));
                    }
                    Poly::constant(self.nvars(), Rational::new(num, den))
                } else {
                    Poly::constant(self.nvars(), Rational::from_integer(num))
                }
            }
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.skip_ws();
                if self.peek() != Some(')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                inner
            }
            Some(c) if c.is_alphabetic() || c == '_' => {
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_alphanumeric() || c == '_') {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                match self.names.iter().position(|n| *n == name) {
                    Some(i) => Poly::var(self.nvars(), i),
                    None => {
                        self.pos = start;
                        return Err(self.err(&format!("unknown variable '{name}'")));
                    }
                }
            }
            Some(c) => return Err(self.err(&format!("unexpected character '{c}'"))),
            None => return Err(self.err("unexpected end of polynomial")),
        };
        self.skip_ws();
        if self.peek() == Some('^') {
            self.pos += 1;
            self.skip_ws();
            let e = self.integer()?;
            let e: u32 = e.try_into().map_err(|_| self.err("exponent too large"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        Ok(s.parse().expect("digits parse as an integer"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rat, ratio};
    use proptest::prelude::*;

    fn names(n: usize) -> Vec<String> {
        default_names(n)
    }

    #[test]
    fn parses_the_documented_form() {
        let p = parse_poly("3/2*x1^2*x2", &names(2)).unwrap();
        assert_eq!(p, Poly::monomial(vec![2, 1], ratio(3, 2)));
        let q = parse_poly(" - x1 + 2 −x2*x2 ", &names(2)).unwrap();
        assert_eq!(q, &(&Poly::from_int(2, 2) - &Poly::var(2, 0)) - &Poly::var(2, 1).pow(2));
        assert_eq!(parse_poly("(x1+1)^2", &names(1)).unwrap(), (&Poly::var(1, 0) + &Poly::one(1)).pow(2));
        assert_eq!(parse_poly("0", &names(0)).unwrap(), Poly::zero(0));
        assert_eq!(parse_poly("7", &names(0)).unwrap(), Poly::constant(0, rat(7)));
    }

    #[test]
    fn reports_columns() {
        match parse_poly("x1 + y", &names(2)) {
            Err(Error::Parse { column, message, .. }) => {
                assert_eq!(column, 6);
                assert!(message.contains("unknown variable"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_poly("x1 +", &names(1)).is_err());
        assert!(parse_poly("1/0", &names(1)).is_err());
        assert!(parse_poly("", &names(1)).is_err());
    }

    fn small_poly() -> impl Strategy<Value = Poly> {
        proptest::collection::vec(((0u32..3, 0u32..3), -5i64..6, 1i64..4), 0..5)
            .prop_map(|terms| Poly::from_terms(2, terms.into_iter().map(|((a, b), n, d)| (vec![a, b], ratio(n, d)))).unwrap())
    }

    proptest! {
        #[test]
        fn display_parses_back(p in small_poly()) {
            let text = p.to_string();
            prop_assert_eq!(parse_poly(&text, &names(2)).unwrap(), p);
        }
    }
}
