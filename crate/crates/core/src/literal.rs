//! Ideal and lattice literals.
//!
//! Grammar shared with the CLI:
//!
//! ```text
//! ideal   := term ("*" term)*
//! term    := <p><tag> ["^" <int>]          prime-power, tag in {r,i,s,t}
//!          | "(" rational ")"              principal ideal of a rational
//!          | "(" element ")"               principal ideal of an element
//! element := part (("+"|"-") part)*        e.g. 1+2*w, -1/2+3*w, w
//! part    := rational ["*" "w"] | "w"
//! lattice := "lat(" ideal ";" "alpha=" rational ";" "J=" ideal ")"
//! ```
//!
//! Tags mean ramified, inert, split-first, split-conjugate; the split
//! labelling follows the canonical smallest root of the minimal polynomial
//! of w mod p. Negative exponents give fractional ideals. Printing produces
//! the canonical sorted form of the same grammar, with `(1)` for the unit
//! ideal.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::field::{FieldElement, ImQuadField};
use crate::ideal::{factor_element, factor_rational, primes_above, FactoredIdeal, PrimeIdeal, PrimeTag};

impl fmt::Display for FactoredIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "(1)");
        }
        let mut first = true;
        for (p, e) in self.iter() {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            write!(f, "{}{}", p.p, p.tag.letter())?;
            if *e != 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

struct Lexer<'a> {
    input: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(input: &'a str) -> Self {
        Lexer { input, pos: 0 }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn peek(&self) -> Option<char> {
        self.input[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!(
                "expected '{c}', found {}",
                self.peek().map_or("end of input".into(), |x| format!("'{x}'"))
            ))
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<()> {
        self.skip_ws();
        if self.input[self.pos..].starts_with(kw) {
            self.pos += kw.len();
            Ok(())
        } else {
            self.err(format!("expected '{kw}'"))
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        if matches!(self.peek(), Some('+') | Some('-')) {
            self.bump();
        }
        let digits_start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.bump();
        }
        if self.pos == digits_start {
            return self.err("expected an integer");
        }
        self.input[start..self.pos]
            .parse::<BigInt>()
            .map_err(|e| Error::Parse {
                pos: start,
                msg: e.to_string(),
            })
    }

    fn rational(&mut self) -> Result<BigRational> {
        let n = self.integer()?;
        if self.eat('/') {
            let d = self.integer()?;
            if d == BigInt::from(0) {
                return self.err("zero denominator");
            }
            Ok(BigRational::new(n, d))
        } else {
            Ok(BigRational::from_integer(n))
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.input.len()
    }
}

/// Parses an ideal literal for the given field.
pub fn parse_ideal(field: &ImQuadField, input: &str) -> Result<FactoredIdeal> {
    let mut lx = Lexer::new(input);
    let ideal = ideal_body(field, &mut lx)?;
    if !lx.at_end() {
        return lx.err("trailing input after ideal literal");
    }
    Ok(ideal)
}

fn ideal_body(field: &ImQuadField, lx: &mut Lexer) -> Result<FactoredIdeal> {
    let mut acc = term(field, lx)?;
    while lx.eat('*') {
        acc = acc.mul(&term(field, lx)?);
    }
    Ok(acc)
}

fn term(field: &ImQuadField, lx: &mut Lexer) -> Result<FactoredIdeal> {
    lx.skip_ws();
    if lx.peek() == Some('(') {
        return paren_term(field, lx);
    }
    let p_start = lx.pos;
    let p = lx.integer()?;
    let p: u64 = p.try_into().map_err(|_| Error::Parse {
        pos: p_start,
        msg: "prime out of range".into(),
    })?;
    lx.skip_ws();
    let tag = match lx.bump() {
        Some('r') => PrimeTag::Ramified,
        Some('i') => PrimeTag::Inert,
        Some('s') => PrimeTag::SplitFirst,
        Some('t') => PrimeTag::SplitConj,
        other => {
            return Err(Error::Parse {
                pos: lx.pos.saturating_sub(1),
                msg: format!(
                    "expected a tag r/i/s/t, found {}",
                    other.map_or("end of input".into(), |c| format!("'{c}'"))
                ),
            })
        }
    };
    // the tag must match how p actually behaves in this field
    let allowed = primes_above(field, p)?;
    let prime = PrimeIdeal { p, tag };
    if !allowed.contains(&prime) {
        return Err(Error::Parse {
            pos: p_start,
            msg: format!(
                "{p} is {} in this field, so tag '{}' is invalid",
                field.splitting_type(p)?,
                tag.letter()
            ),
        });
    }
    let e = if lx.eat('^') { lx.integer()? } else { BigInt::one() };
    let e: i64 = e.try_into().map_err(|_| Error::Parse {
        pos: p_start,
        msg: "exponent out of range".into(),
    })?;
    Ok(FactoredIdeal::from_prime(prime, e))
}

fn paren_term(field: &ImQuadField, lx: &mut Lexer) -> Result<FactoredIdeal> {
    lx.expect('(')?;
    let start = lx.pos;
    let e = element_body(lx)?;
    lx.expect(')')?;
    let ideal = if e.is_rational() {
        factor_rational(field, &e.x)
    } else {
        factor_element(field, &e)
    };
    ideal.map_err(|err| Error::Parse {
        pos: start,
        msg: err.to_string(),
    })
}

fn element_body(lx: &mut Lexer) -> Result<FieldElement> {
    let mut x = BigRational::from_integer(BigInt::from(0));
    let mut y = x.clone();
    let mut first = true;
    loop {
        lx.skip_ws();
        let sign = if lx.eat('+') {
            BigRational::from_integer(BigInt::from(1))
        } else if lx.eat('-') {
            BigRational::from_integer(BigInt::from(-1))
        } else if first {
            BigRational::from_integer(BigInt::from(1))
        } else {
            break;
        };
        first = false;
        lx.skip_ws();
        if lx.peek() == Some('w') {
            lx.bump();
            y += sign;
            continue;
        }
        let q = lx.rational()?;
        lx.skip_ws();
        if lx.peek() == Some('*') {
            // lookahead: "*w" belongs to this part, a bare "*" does not occur
            // inside parentheses
            let save = lx.pos;
            lx.bump();
            lx.skip_ws();
            if lx.peek() == Some('w') {
                lx.bump();
                y += sign * q;
                continue;
            }
            lx.pos = save;
        }
        x += sign * q;
    }
    Ok(FieldElement::new(x, y))
}

/// Parses an element literal such as `1+2*w` or `-1/2`.
pub fn parse_element(input: &str) -> Result<FieldElement> {
    let mut lx = Lexer::new(input);
    let e = element_body(&mut lx)?;
    if !lx.at_end() {
        return lx.err("trailing input after element literal");
    }
    Ok(e)
}

/// Parses a rational literal such as `3` or `-5/2`.
pub fn parse_rational(input: &str) -> Result<BigRational> {
    let mut lx = Lexer::new(input);
    let q = lx.rational()?;
    if !lx.at_end() {
        return lx.err("trailing input after rational literal");
    }
    Ok(q)
}

/// An ideal lattice with level structure, as read from a lattice literal.
pub struct LatticeLiteral {
    pub ideal: FactoredIdeal,
    pub alpha: BigRational,
    pub level: FactoredIdeal,
}

/// Parses `lat(<ideal>; alpha=<rational>; J=<ideal>)`.
pub fn parse_lattice(field: &ImQuadField, input: &str) -> Result<LatticeLiteral> {
    let mut lx = Lexer::new(input);
    lx.expect_keyword("lat")?;
    lx.expect('(')?;
    let ideal = ideal_body(field, &mut lx)?;
    lx.expect(';')?;
    lx.expect_keyword("alpha")?;
    lx.expect('=')?;
    let alpha = lx.rational()?;
    lx.expect(';')?;
    lx.expect_keyword("J")?;
    lx.expect('=')?;
    let level = ideal_body(field, &mut lx)?;
    lx.expect(')')?;
    if !lx.at_end() {
        return lx.err("trailing input after lattice literal");
    }
    Ok(LatticeLiteral {
        ideal,
        alpha,
        level,
    })
}

/// Canonical form of a lattice literal.
pub fn format_lattice(ideal: &FactoredIdeal, alpha: &BigRational, level: &FactoredIdeal) -> String {
    format!("lat({ideal}; alpha={alpha}; J={level})")
}
