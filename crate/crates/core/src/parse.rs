//! Polynomial-expression syntax for field elements.
//!
//! Grammar (whitespace is insignificant):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | '+' unary | power
//! power  := atom ('^' integer)?
//! atom   := integer | symbol | '(' expr ')'
//! ```
//!
//! Division is field division, so `(x+1)/(x-1)` is accepted. Powers of the
//! generator at or above 8 are folded back with `x^8 = a`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::field::{FieldElement, NumberField, DEGREE};
use crate::{Error, Result};

/// Parses `text` as an element of `field`, using the field's generator symbol.
pub fn parse_element(text: &str, field: &NumberField) -> Result<FieldElement> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        field,
    };
    let value = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(value)
}

/// Parses a rational written as `n` or `n/d`.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let err = |msg: &str| Error::Parse {
        pos: 0,
        msg: format!("{msg}: {text:?}"),
    };
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| err("bad numerator"))?;
    let den: BigInt = den.parse().map_err(|_| err("bad denominator"))?;
    if den.is_zero() {
        return Err(err("zero denominator"));
    }
    Ok(BigRational::new(num, den))
}

pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    field: &'a NumberField,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.into(),
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

    fn expr(&mut self) -> Result<FieldElement> {
        let mut acc = self.term()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if op == b'+' { acc.add(&rhs)? } else { acc.sub(&rhs)? };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<FieldElement> {
        let mut acc = self.unary()?;
        while let Some(op @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let at = self.pos;
            let rhs = self.unary()?;
            acc = if op == b'*' {
                acc.mul(&rhs)?
            } else {
                if rhs.is_zero() {
                    self.pos = at;
                    return Err(self.error("division by zero"));
                }
                acc.div(&rhs)?
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<FieldElement> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<FieldElement> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let digits = self.digits();
            if digits.is_empty() {
                return Err(self.error("expected a nonnegative integer exponent"));
            }
            let exp: u64 = digits
                .parse()
                .map_err(|_| self.error("exponent out of range"))?;
            return Ok(base.pow(exp));
        }
        Ok(base)
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn atom(&mut self) -> Result<FieldElement> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let digits = self.digits();
                let n: BigInt = digits.parse().map_err(|_| self.error("bad integer"))?;
                Ok(FieldElement::from_integer(self.field, n))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = core::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                if name != self.field.symbol() {
                    self.pos = start;
                    return Err(self.error(&format!(
                        "unknown symbol {name:?}; the generator is {:?}",
                        self.field.symbol()
                    )));
                }
                Ok(self.field.generator())
            }
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

/// Canonical printed form: an integer polynomial in descending degree over
/// the least common denominator, e.g. `(x^6 + 2*x^4 - 4*x^2 - 56)/16`.
pub fn format_element(x: &FieldElement) -> String {
    let den = x.denominator();
    let sym = x.field().symbol();
    let mut out = String::new();
    for deg in (0..DEGREE).rev() {
        let c = &x.coeffs()[deg];
        if c.is_zero() {
            continue;
        }
        let n: BigInt = (c * BigRational::from_integer(den.clone())).to_integer();
        let mag = n.abs();
        if out.is_empty() {
            if n.is_negative() {
                out.push('-');
            }
        } else {
            out.push_str(if n.is_negative() { " - " } else { " + " });
        }
        let mono = match deg {
            0 => String::new(),
            1 => sym.to_string(),
            d => format!("{sym}^{d}"),
        };
        if deg == 0 {
            out.push_str(&mag.to_string());
        } else if mag.is_one() {
            out.push_str(&mono);
        } else {
            out.push_str(&format!("{mag}*{mono}"));
        }
    }
    if out.is_empty() {
        return "0".into();
    }
    if den.is_one() {
        out
    } else {
        let terms = x.coeffs().iter().filter(|c| !c.is_zero()).count();
        if terms == 1 {
            format!("{out}/{den}")
        } else {
            format!("({out})/{den}")
        }
    }
}

/// Coefficients as `num/den` strings, constant term first.
pub fn coefficient_strings(x: &FieldElement) -> Vec<String> {
    x.coeffs().iter().map(format_rational).collect()
}
