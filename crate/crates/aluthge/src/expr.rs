//! Text form of charges: `2 d(8) - 3/5 d(16) + d(4)`.
//!
//! ```text
//! expr     := '0' | ['+'|'-'] term (('+'|'-') term)*
//! term     := [rational ['*']] 'd' '(' rational ')'
//! rational := integer ['/' positive-integer]
//! ```
//!
//! Whitespace is ignored between tokens. Atoms must be `0` or at least `1`;
//! repeated atoms are summed.

use aluthge_core::measure::{AtomicCharge, MeasureError};
use aluthge_core::rational::{to_fraction_string, Rational};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError::Syntax {
            offset: self.pos,
            message: message.into(),
        })
    }

    fn expect(&mut self, c: u8) -> Result<(), ExprError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.error(format!("expected '{}'", c as char))
        }
    }

    fn integer(&mut self) -> Result<BigInt, ExprError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.error("expected digits");
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(text.parse().expect("digits parse"))
    }

    fn rational(&mut self) -> Result<Rational, ExprError> {
        let num = self.integer()?;
        if self.peek() == Some(b'/') {
            self.pos += 1;
            self.skip_ws();
            let at = self.pos;
            let den = self.integer()?;
            if den.is_zero() {
                self.pos = at;
                return self.error("denominator must be positive");
            }
            Ok(Rational::new(num, den))
        } else {
            Ok(Rational::from_integer(num))
        }
    }

    fn term(&mut self) -> Result<(Rational, Rational), ExprError> {
        let coeff = match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let c = self.rational()?;
                if self.peek() == Some(b'*') {
                    self.pos += 1;
                }
                c
            }
            _ => Rational::one(),
        };
        self.expect(b'd')?;
        self.expect(b'(')?;
        self.skip_ws();
        let at = self.pos;
        let atom = self.rational()?;
        if !atom.is_zero() && atom < Rational::one() {
            self.pos = at;
            return self.error("atoms must be 0 or at least 1");
        }
        self.expect(b')')?;
        Ok((atom, coeff))
    }

    fn expr(&mut self) -> Result<Vec<(Rational, Rational)>, ExprError> {
        let mut terms = Vec::new();
        let mut negate = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            Some(b'+') => {
                self.pos += 1;
                false
            }
            Some(b'0') => {
                let save = self.pos;
                self.pos += 1;
                if self.peek().is_none() {
                    return Ok(terms);
                }
                self.pos = save;
                false
            }
            _ => false,
        };
        loop {
            let (atom, c) = self.term()?;
            terms.push((atom, if negate { -c } else { c }));
            match self.peek() {
                None => return Ok(terms),
                Some(b'+') => negate = false,
                Some(b'-') => negate = true,
                Some(_) => return self.error("expected '+', '-' or end of input"),
            }
            self.pos += 1;
        }
    }
}

/// Parses the atom list without building a charge; repeated atoms are
/// merged and zero totals dropped.
pub fn parse_atoms(text: &str) -> Result<Vec<(Rational, Rational)>, ExprError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    if p.peek().is_none() {
        return p.error("empty expression");
    }
    let raw = p.expr()?;
    let mut merged: std::collections::BTreeMap<Rational, Rational> = Default::default();
    for (atom, c) in raw {
        *merged.entry(atom).or_insert_with(Rational::zero) += c;
    }
    Ok(merged.into_iter().filter(|(_, c)| !c.is_zero()).collect())
}

pub fn parse_measure(text: &str) -> Result<AtomicCharge, ExprError> {
    Ok(AtomicCharge::from_atoms(&parse_atoms(text)?)?)
}

fn fraction(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        to_fraction_string(q)
    }
}

/// Canonical text: atoms increasing, unit coefficients omitted.
pub fn print_atoms(atoms: &[(Rational, Rational)]) -> String {
    let mut out = String::new();
    for (i, (atom, c)) in atoms.iter().enumerate() {
        let sign = if c.is_negative() { "-" } else { "+" };
        match (i, sign) {
            (0, "+") => {}
            (0, _) => out.push('-'),
            _ => {
                out.push(' ');
                out.push_str(sign);
                out.push(' ');
            }
        }
        let mag = c.abs();
        if !mag.is_one() {
            out.push_str(&fraction(&mag));
            out.push(' ');
        }
        out.push_str("d(");
        out.push_str(&fraction(atom));
        out.push(')');
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

pub fn print_measure(mu: &AtomicCharge) -> Result<String, MeasureError> {
    Ok(print_atoms(&mu.atoms()?))
}
