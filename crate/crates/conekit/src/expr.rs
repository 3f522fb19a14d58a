//! Parser for polynomial expressions in the two variables `z` and `w`.
//!
//! The accepted grammar (spelled out in `docs/grammar.md`):
//!
//! ```text
//! expr     := [ '-' ] term { ( '+' | '-' ) term }
//! term     := factor { '*' factor }
//! factor   := atom [ '^' uint ]
//! atom     := 'z' | 'w' | rational | '(' expr ')'
//! rational := uint [ '/' uint ]
//! uint     := digit { digit }
//! ```
//!
//! Whitespace may appear between any two tokens.  Multiplication must be
//! written explicitly (`2*z`, not `2z`), exponents are non-negative
//! integers, and `/` occurs only inside numeric literals, so every valid
//! input denotes a polynomial with rational coefficients.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::curvesing::BiPoly;
use crate::{Error, Result};

/// Largest exponent accepted in a `^` power, guarding against inputs
/// whose expansion would be astronomically large.
const MAX_EXPONENT: u32 = 10_000;

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
    VarZ,
    VarW,
    Uint(BigInt),
}

impl std::fmt::Display for Token {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Token::Plus => write!(f, "'+'"),
            Token::Minus => write!(f, "'-'"),
            Token::Star => write!(f, "'*'"),
            Token::Caret => write!(f, "'^'"),
            Token::Slash => write!(f, "'/'"),
            Token::LParen => write!(f, "'('"),
            Token::RParen => write!(f, "')'"),
            Token::VarZ => write!(f, "'z'"),
            Token::VarW => write!(f, "'w'"),
            Token::Uint(n) => write!(f, "integer {n}"),
        }
    }
}

fn tokenize(input: &str) -> Result<Vec<(usize, Token)>> {
    let mut tokens = Vec::new();
    let mut chars = input.char_indices().peekable();
    while let Some(&(offset, c)) = chars.peek() {
        let tok = match c {
            c if c.is_whitespace() => {
                chars.next();
                continue;
            }
            '+' => Token::Plus,
            '-' => Token::Minus,
            '*' => Token::Star,
            '^' => Token::Caret,
            '/' => Token::Slash,
            '(' => Token::LParen,
            ')' => Token::RParen,
            'z' => Token::VarZ,
            'w' => Token::VarW,
            '0'..='9' => {
                let mut end = offset;
                while let Some(&(i, d)) = chars.peek() {
                    if d.is_ascii_digit() {
                        end = i + 1;
                        chars.next();
                    } else {
                        break;
                    }
                }
                let digits = &input[offset..end];
                tokens.push((offset, Token::Uint(digits.parse::<BigInt>().expect("digits"))));
                continue;
            }
            _ => {
                return Err(Error::Parse(format!(
                    "unexpected character '{c}' at byte {offset}"
                )))
            }
        };
        tokens.push((offset, tok));
        chars.next();
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn advance(&mut self) -> Option<(usize, Token)> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn eat(&mut self, tok: &Token) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn unexpected(&self, wanted: &str) -> Error {
        match self.tokens.get(self.pos) {
            Some((offset, tok)) => Error::Parse(format!(
                "expected {wanted}, found {tok} at byte {offset}"
            )),
            None => Error::Parse(format!("expected {wanted}, found end of input")),
        }
    }

    fn expr(&mut self) -> Result<BiPoly> {
        let negate = self.eat(&Token::Minus);
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            if self.eat(&Token::Plus) {
                acc = acc.add(&self.term()?);
            } else if self.eat(&Token::Minus) {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<BiPoly> {
        let mut acc = self.factor()?;
        while self.eat(&Token::Star) {
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<BiPoly> {
        let base = self.atom()?;
        if self.eat(&Token::Caret) {
            let e = self.exponent()?;
            Ok(base.pow(e))
        } else {
            Ok(base)
        }
    }

    fn exponent(&mut self) -> Result<u32> {
        match self.advance() {
            Some((offset, Token::Uint(n))) => {
                let e: u32 = n
                    .try_into()
                    .map_err(|_| Error::Parse(format!("exponent at byte {offset} is too large")))?;
                if e > MAX_EXPONENT {
                    return Err(Error::Parse(format!(
                        "exponent {e} exceeds the supported maximum {MAX_EXPONENT}"
                    )));
                }
                Ok(e)
            }
            _ => {
                self.pos -= 1;
                Err(self.unexpected("a non-negative integer exponent"))
            }
        }
    }

    fn atom(&mut self) -> Result<BiPoly> {
        match self.advance() {
            Some((_, Token::VarZ)) => Ok(BiPoly::monomial(BigRational::one(), 1, 0)),
            Some((_, Token::VarW)) => Ok(BiPoly::monomial(BigRational::one(), 0, 1)),
            Some((_, Token::Uint(n))) => {
                if self.eat(&Token::Slash) {
                    match self.advance() {
                        Some((offset, Token::Uint(d))) => {
                            if d.is_zero() {
                                return Err(Error::Parse(format!(
                                    "division by zero in literal at byte {offset}"
                                )));
                            }
                            Ok(BiPoly::monomial(BigRational::new(n, d), 0, 0))
                        }
                        _ => {
                            self.pos -= 1;
                            Err(self.unexpected("a denominator after '/'"))
                        }
                    }
                } else {
                    Ok(BiPoly::monomial(BigRational::from_integer(n), 0, 0))
                }
            }
            Some((_, Token::LParen)) => {
                let inner = self.expr()?;
                if self.eat(&Token::RParen) {
                    Ok(inner)
                } else {
                    Err(self.unexpected("')'"))
                }
            }
            _ => {
                self.pos -= 1;
                Err(self.unexpected("'z', 'w', a number, or '('"))
            }
        }
    }
}

/// Parses a polynomial expression in `z` and `w` into a [`BiPoly`].
pub fn parse_poly(input: &str) -> Result<BiPoly> {
    let mut parser = Parser {
        tokens: tokenize(input)?,
        pos: 0,
    };
    if parser.tokens.is_empty() {
        return Err(Error::Parse("empty input".into()));
    }
    let poly = parser.expr()?;
    if parser.pos < parser.tokens.len() {
        return Err(parser.unexpected("'+', '-', '*', '^', or end of input"));
    }
    Ok(poly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn monomials_and_signs() {
        let p = parse_poly("w^2 - z^3").unwrap();
        assert_eq!(p.coeff(0, 2), rat(1, 1));
        assert_eq!(p.coeff(3, 0), rat(-1, 1));
        assert_eq!(p.order(), Some(2));

        let q = parse_poly("-z^2 + w").unwrap();
        assert_eq!(q.coeff(2, 0), rat(-1, 1));
        assert_eq!(q.coeff(0, 1), rat(1, 1));
    }

    #[test]
    fn precedence_and_parentheses() {
        // '^' binds tighter than '*', which binds tighter than '+'.
        let p = parse_poly("z + 2*w^3").unwrap();
        assert_eq!(p.coeff(1, 0), rat(1, 1));
        assert_eq!(p.coeff(0, 3), rat(2, 1));

        let q = parse_poly("(z + w)^2").unwrap();
        assert_eq!(q.coeff(2, 0), rat(1, 1));
        assert_eq!(q.coeff(1, 1), rat(2, 1));
        assert_eq!(q.coeff(0, 2), rat(1, 1));

        let r = parse_poly("-(z - w)").unwrap();
        assert_eq!(r.coeff(1, 0), rat(-1, 1));
        assert_eq!(r.coeff(0, 1), rat(1, 1));
    }

    #[test]
    fn rational_literals() {
        let p = parse_poly("1/2*z - 3/6").unwrap();
        assert_eq!(p.coeff(1, 0), rat(1, 2));
        assert_eq!(p.coeff(0, 0), rat(-1, 2));
        // Standalone integers and zero.
        assert_eq!(parse_poly("7").unwrap().coeff(0, 0), rat(7, 1));
        assert!(parse_poly("0").unwrap().is_zero());
    }

    #[test]
    fn whitespace_is_insignificant() {
        let a = parse_poly("w^2-z^3").unwrap();
        let b = parse_poly("  w ^ 2\t-\n z ^ 3 ").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn nested_products() {
        let p = parse_poly("z*w*(z - w)*(z + w)").unwrap();
        // z·w·(z² − w²) = z³w − zw³.
        assert_eq!(p.coeff(3, 1), rat(1, 1));
        assert_eq!(p.coeff(1, 3), rat(-1, 1));
        assert_eq!(p.terms().count(), 2);
    }

    #[test]
    fn rejects_malformed_input() {
        for bad in [
            "", "2z", "z^-1", "z/w", "(z", "z +", "1/0", "z^^2", "q", "z**w", "^2", "()",
            "z^(2)", "3/", "z w",
        ] {
            assert!(parse_poly(bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn exponent_limit() {
        assert!(parse_poly("z^10000").is_ok());
        assert!(parse_poly("z^10001").is_err());
        assert!(parse_poly("z^99999999999999999999").is_err());
    }
}
