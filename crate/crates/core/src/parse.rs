//! Recursive-descent parser for analytic expressions.
//!
//! Grammar (usual precedence, `^` binds tightest and right-associates):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := factor (('*' | '/') factor)*
//! factor  := '-' factor | primary ('^' factor)?   -- exponent must be constant
//! primary := number | 'i' | 'pi' | 'z' | 'x'
//!          | 'exp' '(' expr ')' | 'log' '(' expr ')' | 'sqrt' '(' expr ')'
//!          | 'int' '(' expr (',' expr)? ')'   -- optional constant base point
//!          | '(' expr ')'
//! ```
//!
//! `z` and `x` both name the variable; numbers accept `1.5e-3` notation.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::expr::AnalyticFn;

pub fn parse(text: &str) -> Result<AnalyticFn> {
    let mut p = Parser {
        bytes: text.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<AnalyticFn> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                let rhs = self.term()?;
                acc = acc.add(&rhs);
            } else if self.eat(b'-') {
                let rhs = self.term()?;
                acc = acc.sub(&rhs);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<AnalyticFn> {
        let mut acc = self.factor()?;
        loop {
            if self.eat(b'*') {
                let rhs = self.factor()?;
                acc = acc.mul(&rhs);
            } else if self.eat(b'/') {
                let rhs = self.factor()?;
                acc = acc.div(&rhs);
            } else {
                return Ok(acc);
            }
        }
    }

    // Unary minus binds looser than '^', so -z^2 means -(z^2) while the
    // exponent itself may be signed: z^-2.
    fn factor(&mut self) -> Result<AnalyticFn> {
        if self.eat(b'-') {
            return Ok(self.factor()?.neg());
        }
        let base = self.primary()?;
        if self.eat(b'^') {
            let pos = self.pos;
            let exponent = self.factor()?;
            let alpha = constant_value(&exponent).ok_or(Error::Parse {
                pos,
                msg: "exponent must be a constant expression".to_string(),
            })?;
            return Ok(base.pow(alpha));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<AnalyticFn> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            _ => Err(self.err("expected a number, name, or '('")),
        }
    }

    fn number(&mut self) -> Result<AnalyticFn> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len()
            && (self.bytes[self.pos].is_ascii_digit() || self.bytes[self.pos] == b'.')
        {
            self.pos += 1;
        }
        // Exponent part: e or E, optional sign, digits.
        if self.pos < self.bytes.len() && (self.bytes[self.pos] | 32) == b'e' {
            let mut look = self.pos + 1;
            if look < self.bytes.len() && (self.bytes[look] == b'+' || self.bytes[look] == b'-') {
                look += 1;
            }
            if look < self.bytes.len() && self.bytes[look].is_ascii_digit() {
                self.pos = look;
                while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            }
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii digits");
        let v: f64 = text.parse().map_err(|_| Error::Parse {
            pos: start,
            msg: format!("bad number `{}`", text),
        })?;
        Ok(AnalyticFn::real(v))
    }

    fn ident(&mut self) -> Result<AnalyticFn> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii name");
        match name {
            "z" | "x" => Ok(AnalyticFn::var()),
            "i" => Ok(AnalyticFn::i()),
            "pi" => Ok(AnalyticFn::real(std::f64::consts::PI)),
            "exp" | "log" | "sqrt" => {
                self.expect(b'(')?;
                let arg = self.expr()?;
                self.expect(b')')?;
                Ok(match name {
                    "exp" => arg.exp(),
                    "log" => arg.log(),
                    _ => arg.powf(0.5),
                })
            }
            "int" => {
                self.expect(b'(')?;
                let integrand = self.expr()?;
                let base = if self.eat(b',') {
                    let pos = self.pos;
                    let b = self.expr()?;
                    constant_value(&b).ok_or(Error::Parse {
                        pos,
                        msg: "integral base point must be constant".to_string(),
                    })?
                } else {
                    Complex64::new(0.0, 0.0)
                };
                self.expect(b')')?;
                Ok(integrand.integral(base))
            }
            _ => Err(Error::Parse {
                pos: start,
                msg: format!("unknown name `{}`", name),
            }),
        }
    }
}

/// Fold an expression with no variable dependence to its value.
fn constant_value(f: &AnalyticFn) -> Option<Complex64> {
    let z1 = Complex64::new(0.17, 0.03);
    let z2 = Complex64::new(-0.41, 0.23);
    let (a, b) = (f.value(z1).ok()?, f.value(z2).ok()?);
    if (a - b).norm() <= 1e-12 * (1.0 + a.norm()) {
        Some(a)
    } else {
        None
    }
}
