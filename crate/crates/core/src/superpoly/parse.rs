//! Recursive-descent parser for the polynomial expression grammar:
//!
//! ```text
//! expr   := ['-'] term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := scalar | var | '(' expr ')'
//! var    := 'T'idx | 'th'idx | 'q'idx | 'p'idx | 'X'idx
//! scalar := digits ['/' digits] ['r2'|'r3'|'r6'] | 'r2' | 'r3' | 'r6'
//! ```
//!
//! Odd factors are multiplied in the order written, so `T2*T1` parses to
//! `-T1*T2`.

use num_traits::One;

use super::{Family, SuperPolynomial, VariableId, MAX_ODD_INDEX};
use crate::error::{Error, Result};
use crate::scalars::{take_radical, take_rational, Rational, Scalar};

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Scalar(Scalar),
    Var(VariableId),
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
    End,
}

#[derive(Debug, Clone)]
struct Spanned {
    token: Token,
    line: usize,
    column: usize,
}

/// Parse `src` into canonical form. When `max_index` is given, variable
/// indices above it are rejected.
pub fn parse_expression(src: &str, max_index: Option<usize>) -> Result<SuperPolynomial> {
    let tokens = lex(src, max_index)?;
    let mut parser = Parser { tokens, pos: 0 };
    let poly = parser.expr()?;
    let tail = parser.peek();
    if tail.token != Token::End {
        return Err(parser.error_at(tail, "unexpected trailing input"));
    }
    Ok(poly)
}

fn lex(src: &str, max_index: Option<usize>) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut line_start = 0;
    let mut i = 0;
    let bytes = src.as_bytes();
    while i < bytes.len() {
        let column = i - line_start + 1;
        let err = |message: String| Error::Syntax {
            line,
            column,
            message,
        };
        let b = bytes[i];
        let simple = match b {
            b'\n' => {
                line += 1;
                line_start = i + 1;
                i += 1;
                continue;
            }
            b' ' | b'\t' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Some(Token::Plus),
            b'-' => Some(Token::Minus),
            b'*' => Some(Token::Star),
            b'(' => Some(Token::LParen),
            b')' => Some(Token::RParen),
            _ => None,
        };
        if let Some(token) = simple {
            out.push(Spanned {
                token,
                line,
                column,
            });
            i += 1;
            continue;
        }

        let rest = &src[i..];
        if b.is_ascii_digit() {
            let (coef, after) = take_rational(rest);
            let coef = coef
                .expect("starts with a digit")
                .map_err(|e| err(e.to_string()))?;
            // an optional radical may follow after spaces: `1/2 r2`
            let trimmed = after.trim_start_matches([' ', '\t']);
            let (value, after) = match take_radical(trimmed) {
                Some((slot, a)) => (radical_scalar(slot, coef), a),
                None => (Scalar::from_rational(coef), after),
            };
            out.push(Spanned {
                token: Token::Scalar(value),
                line,
                column,
            });
            i = src.len() - after.len();
            continue;
        }
        if let Some((slot, after)) = take_radical(rest) {
            out.push(Spanned {
                token: Token::Scalar(radical_scalar(slot, Rational::one())),
                line,
                column,
            });
            i = src.len() - after.len();
            continue;
        }

        let (family, prefix_len) = if rest.starts_with("th") {
            (Family::ThetaSmall, 2)
        } else {
            match b {
                b'T' => (Family::ThetaBig, 1),
                b'q' => (Family::Q, 1),
                b'p' => (Family::P, 1),
                b'X' => (Family::X, 1),
                _ => {
                    let word: String = rest
                        .chars()
                        .take_while(|c| c.is_ascii_alphanumeric())
                        .collect();
                    let shown = if word.is_empty() {
                        rest.chars().next().map(String::from).unwrap_or_default()
                    } else {
                        word
                    };
                    return Err(err(format!("unknown symbol {shown:?}")));
                }
            }
        };
        let digits = rest[prefix_len..]
            .bytes()
            .take_while(u8::is_ascii_digit)
            .count();
        if digits == 0 {
            return Err(err(format!(
                "variable {:?} needs a numeric index",
                family.prefix()
            )));
        }
        let end = prefix_len + digits;
        if rest[end..]
            .bytes()
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic())
        {
            return Err(err(format!(
                "unknown symbol {:?}",
                rest.split(|c: char| !c.is_ascii_alphanumeric())
                    .next()
                    .unwrap_or(rest)
            )));
        }
        let index: usize = rest[prefix_len..end]
            .parse()
            .map_err(|_| err("index too large".into()))?;
        let cap = match (family.is_odd(), max_index) {
            (true, Some(n)) => n.min(MAX_ODD_INDEX),
            (true, None) => MAX_ODD_INDEX,
            (false, Some(n)) => n,
            (false, None) => usize::MAX,
        };
        if index == 0 || index > cap {
            return Err(err(format!(
                "variable index {index} out of range 1..={cap}"
            )));
        }
        out.push(Spanned {
            token: Token::Var(VariableId::new(family, index)),
            line,
            column,
        });
        i += end;
    }
    let column = src.len() - line_start + 1;
    out.push(Spanned {
        token: Token::End,
        line,
        column,
    });
    Ok(out)
}

fn radical_scalar(slot: usize, coef: Rational) -> Scalar {
    let radical = match slot {
        1 => Scalar::sqrt2(),
        2 => Scalar::sqrt3(),
        _ => Scalar::sqrt6(),
    };
    radical.scale(&coef)
}

struct Parser {
    tokens: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Spanned {
        self.tokens[self.pos].clone()
    }

    fn bump(&mut self) -> Spanned {
        let t = self.peek();
        if t.token != Token::End {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, at: Spanned, message: &str) -> Error {
        Error::Syntax {
            line: at.line,
            column: at.column,
            message: message.to_string(),
        }
    }

    fn expr(&mut self) -> Result<SuperPolynomial> {
        let negate = if self.peek().token == Token::Minus {
            self.bump();
            true
        } else {
            false
        };
        let first = self.term()?;
        let mut acc = if negate { -first } else { first };
        loop {
            match self.peek().token {
                Token::Plus => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Token::Minus => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<SuperPolynomial> {
        let mut acc = self.factor()?;
        while self.peek().token == Token::Star {
            self.bump();
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<SuperPolynomial> {
        let t = self.bump();
        match t.token {
            Token::Scalar(s) => Ok(SuperPolynomial::constant(s)),
            Token::Var(v) => Ok(SuperPolynomial::var(v)),
            Token::LParen => {
                let inner = self.expr()?;
                let close = self.bump();
                if close.token != Token::RParen {
                    return Err(self.error_at(close, "expected ')'"));
                }
                Ok(inner)
            }
            Token::End => Err(self.error_at(t, "unexpected end of input")),
            _ => Err(self.error_at(t, "expected a scalar, variable or '('")),
        }
    }
}
