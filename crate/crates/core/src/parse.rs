//! Text form of Hamiltonians: sums of real-coefficient terms `c*tr(W)` and
//! `c*tr(W1)*tr(W2)` with words over {X, Y}, e.g.
//! `2.0*tr(XXY) + 1.0*tr(X)*tr(X) - 0.5*tr(YY)`.

use crate::matrix::C64;
use crate::poly::{Term, TracePolynomial, Word};

/// Parse failure with the byte offset where it happened.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "parse error at byte {}: {}", self.position, self.message)
    }
}

impl std::error::Error for ParseError {}

struct Scanner<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Scanner<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.peek()?;
        self.pos += 1;
        Some(b)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            position: self.pos,
            message: message.into(),
        })
    }

    fn expect(&mut self, byte: u8) -> Result<(), ParseError> {
        match self.peek() {
            Some(b) if b == byte => {
                self.pos += 1;
                Ok(())
            }
            Some(b) => self.err(format!("expected '{}', found '{}'", byte as char, b as char)),
            None => self.err(format!("expected '{}', found end of input", byte as char)),
        }
    }

    fn number(&mut self) -> Result<f64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() {
            let b = self.src[self.pos];
            if b.is_ascii_digit() || b == b'.' {
                self.pos += 1;
            } else if (b == b'e' || b == b'E')
                && self.pos > start
                && self
                    .src
                    .get(self.pos + 1)
                    .is_some_and(|&n| n.is_ascii_digit() || n == b'+' || n == b'-')
            {
                self.pos += 2;
            } else {
                break;
            }
        }
        if self.pos == start {
            return self.err("expected a number");
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse::<f64>().map_err(|_| ParseError {
            position: start,
            message: format!("invalid number '{text}'"),
        })
    }

    fn trace_factor(&mut self) -> Result<Word, ParseError> {
        self.skip_ws();
        if !self.src[self.pos..].starts_with(b"tr") {
            return self.err("expected 'tr('");
        }
        self.pos += 2;
        self.expect(b'(')?;
        let mut word = Word::new();
        loop {
            match self.bump() {
                Some(b'X') => word.push(crate::poly::Letter::X),
                Some(b'Y') => word.push(crate::poly::Letter::Y),
                Some(b')') => break,
                Some(b) => {
                    self.pos -= 1;
                    return self.err(format!("expected 'X', 'Y' or ')', found '{}'", b as char));
                }
                None => return self.err("unterminated trace word"),
            }
        }
        if word.is_empty() {
            return self.err("empty trace word");
        }
        Ok(word)
    }
}

/// Parses the Hamiltonian grammar into a canonical polynomial.
///
/// Coefficients are real; a missing coefficient means 1. Products of more
/// than two traces are rejected.
pub fn parse_trace_polynomial(src: &str) -> Result<TracePolynomial, ParseError> {
    let mut sc = Scanner::new(src);
    let mut terms: Vec<Term> = Vec::new();
    let mut first = true;
    loop {
        let sign = match sc.peek() {
            None if first => return sc.err("empty expression"),
            None => break,
            Some(b'+') => {
                sc.bump();
                1.0
            }
            Some(b'-') => {
                sc.bump();
                -1.0
            }
            Some(_) if first => 1.0,
            Some(b) => return sc.err(format!("expected '+' or '-', found '{}'", b as char)),
        };
        first = false;

        let coeff = match sc.peek() {
            Some(b't') => 1.0,
            _ => {
                let value = sc.number()?;
                sc.expect(b'*')?;
                value
            }
        };

        let mut factors = vec![sc.trace_factor()?];
        while sc.peek() == Some(b'*') {
            sc.bump();
            if factors.len() == 2 {
                return sc.err("at most two trace factors per term");
            }
            factors.push(sc.trace_factor()?);
        }
        terms.push(Term {
            coeff: C64::new(sign * coeff, 0.0),
            factors,
        });
    }
    Ok(TracePolynomial::from_terms(terms))
}
