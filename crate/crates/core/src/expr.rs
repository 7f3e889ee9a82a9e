//! Small real-valued expression language for amplitudes and precisions.
//!
//! Inputs such as `cos(pi/9)/sqrt(2)`, `-0.25`, `1.5e-3` or `3^-9.53` are
//! parsed once and can then be evaluated at any precision, which is what the
//! precision escalation in the geometry code relies on.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExprError {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("domain error: {0}")]
    Domain(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RealExpr {
    Const(BigRational),
    Pi,
    Neg(Box<RealExpr>),
    Add(Box<RealExpr>, Box<RealExpr>),
    Sub(Box<RealExpr>, Box<RealExpr>),
    Mul(Box<RealExpr>, Box<RealExpr>),
    Div(Box<RealExpr>, Box<RealExpr>),
    Pow(Box<RealExpr>, Box<RealExpr>),
    Call(Func, Box<RealExpr>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Sin,
    Cos,
    Exp,
    Ln,
}

impl RealExpr {
    pub fn int(v: i64) -> Self {
        RealExpr::Const(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn rational(r: BigRational) -> Self {
        RealExpr::Const(r)
    }

    pub fn parse(src: &str) -> Result<Self, ExprError> {
        let mut p = Parser { src: src.as_bytes(), pos: 0 };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(e)
    }

    /// Exact value when the expression contains no irrational operations.
    pub fn as_rational(&self) -> Option<BigRational> {
        Some(match self {
            RealExpr::Const(r) => r.clone(),
            RealExpr::Neg(a) => -a.as_rational()?,
            RealExpr::Add(a, b) => a.as_rational()? + b.as_rational()?,
            RealExpr::Sub(a, b) => a.as_rational()? - b.as_rational()?,
            RealExpr::Mul(a, b) => a.as_rational()? * b.as_rational()?,
            RealExpr::Div(a, b) => {
                let d = b.as_rational()?;
                if d.is_zero() {
                    return None;
                }
                a.as_rational()? / d
            }
            RealExpr::Pow(a, b) => {
                let base = a.as_rational()?;
                let e = integer_exponent(b)?;
                if e < 0 && base.is_zero() {
                    return None;
                }
                num_traits::pow::Pow::pow(base, e as i32)
            }
            _ => return None,
        })
    }

    pub fn eval<R: Real>(&self, prec: u32) -> Result<R, ExprError> {
        Ok(match self {
            RealExpr::Const(r) => R::from_rational_prec(r, prec),
            RealExpr::Pi => R::pi(prec),
            RealExpr::Neg(a) => -a.eval::<R>(prec)?,
            RealExpr::Add(a, b) => a.eval::<R>(prec)? + b.eval::<R>(prec)?,
            RealExpr::Sub(a, b) => a.eval::<R>(prec)? - b.eval::<R>(prec)?,
            RealExpr::Mul(a, b) => a.eval::<R>(prec)? * b.eval::<R>(prec)?,
            RealExpr::Div(a, b) => {
                let d = b.eval::<R>(prec)?;
                if !strictly_nonzero(&d, prec) {
                    return Err(ExprError::Domain("division by zero".into()));
                }
                a.eval::<R>(prec)? / d
            }
            RealExpr::Pow(a, b) => {
                let base = a.eval::<R>(prec)?;
                if let Some(e) = integer_exponent(b) {
                    if e < 0 && !strictly_nonzero(&base, prec) {
                        return Err(ExprError::Domain("zero to a negative power".into()));
                    }
                    powi(base, e, prec)
                } else {
                    let zero = R::from_i64_prec(0, prec);
                    if !(base > zero) {
                        return Err(ExprError::Domain("non-integer power of a non-positive base".into()));
                    }
                    (b.eval::<R>(prec)? * base.ln()).exp()
                }
            }
            RealExpr::Call(f, a) => {
                let x = a.eval::<R>(prec)?;
                match f {
                    Func::Sqrt => {
                        let zero = R::from_i64_prec(0, prec);
                        if x < zero {
                            return Err(ExprError::Domain("square root of a negative number".into()));
                        }
                        x.sqrt()
                    }
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Ln => {
                        let zero = R::from_i64_prec(0, prec);
                        if !(x > zero) {
                            return Err(ExprError::Domain("logarithm of a non-positive number".into()));
                        }
                        x.ln()
                    }
                }
            }
        })
    }
}

fn strictly_nonzero<R: Real>(x: &R, prec: u32) -> bool {
    let zero = R::from_i64_prec(0, prec);
    x != &zero
}

fn integer_exponent(e: &RealExpr) -> Option<i64> {
    let r = e.as_rational()?;
    if r.is_integer() {
        i64::try_from(r.to_integer()).ok()
    } else {
        None
    }
}

fn powi<R: Real>(base: R, e: i64, prec: u32) -> R {
    let mut acc = R::from_i64_prec(1, prec);
    let mut b = base;
    let mut n = e.unsigned_abs();
    while n > 0 {
        if n & 1 == 1 {
            acc = acc * b.clone();
        }
        b = b.clone() * b;
        n >>= 1;
    }
    if e < 0 {
        R::from_i64_prec(1, prec) / acc
    } else {
        acc
    }
}

/// Parses `[-]digits[.digits][e[+-]digits]` exactly.
pub fn parse_decimal(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (mant, exp) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], body[i + 1..].parse::<i64>().ok()?),
        None => (body, 0),
    };
    let (int, frac) = match mant.find('.') {
        Some(i) => (&mant[..i], &mant[i + 1..]),
        None => (mant, ""),
    };
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.bytes().chain(frac.bytes()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let n: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let scale = exp - frac.len() as i64;
    let ten = BigInt::from(10);
    let mut r = if scale >= 0 {
        BigRational::from_integer(n * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(n, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        r = -r;
    }
    Some(r)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> ExprError {
        ExprError::Parse { pos: self.pos, msg: msg.to_string() }
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

    fn expr(&mut self) -> Result<RealExpr, ExprError> {
        let mut lhs = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                b'+' => {
                    self.pos += 1;
                    lhs = RealExpr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                b'-' => {
                    self.pos += 1;
                    lhs = RealExpr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => break,
            }
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<RealExpr, ExprError> {
        let mut lhs = self.unary()?;
        while let Some(c) = self.peek() {
            match c {
                b'*' => {
                    self.pos += 1;
                    lhs = RealExpr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                b'/' => {
                    self.pos += 1;
                    lhs = RealExpr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => break,
            }
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<RealExpr, ExprError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(RealExpr::Neg(Box::new(self.unary()?)))
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RealExpr, ExprError> {
        let base = self.primary()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(RealExpr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<RealExpr, ExprError> {
        match self.peek() {
            None => Err(self.err("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.pos;
                while self.pos < self.src.len() && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.') {
                    self.pos += 1;
                }
                // exponent marker only when followed by a digit or sign+digit
                if self.pos < self.src.len() && matches!(self.src[self.pos], b'e' | b'E') {
                    let mut q = self.pos + 1;
                    if q < self.src.len() && matches!(self.src[q], b'+' | b'-') {
                        q += 1;
                    }
                    if q < self.src.len() && self.src[q].is_ascii_digit() {
                        while q < self.src.len() && self.src[q].is_ascii_digit() {
                            q += 1;
                        }
                        self.pos = q;
                    }
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                parse_decimal(text).map(RealExpr::Const).ok_or_else(|| ExprError::Parse {
                    pos: start,
                    msg: format!("bad number '{text}'"),
                })
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii").to_ascii_lowercase();
                let func = match name.as_str() {
                    "pi" => return Ok(RealExpr::Pi),
                    "sqrt" => Func::Sqrt,
                    "sin" => Func::Sin,
                    "cos" => Func::Cos,
                    "exp" => Func::Exp,
                    "ln" | "log" => Func::Ln,
                    _ => {
                        return Err(ExprError::Parse { pos: start, msg: format!("unknown identifier '{name}'") })
                    }
                };
                if self.peek() != Some(b'(') {
                    return Err(self.err("expected '(' after function name"));
                }
                self.pos += 1;
                let arg = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(RealExpr::Call(func, Box::new(arg)))
            }
            Some(_) => Err(self.err("unexpected character")),
        }
    }
}

impl fmt::Display for RealExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RealExpr::Const(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "({}/{})", r.numer(), r.denom())
                }
            }
            RealExpr::Pi => write!(f, "pi"),
            RealExpr::Neg(a) => write!(f, "-({a})"),
            RealExpr::Add(a, b) => write!(f, "({a} + {b})"),
            RealExpr::Sub(a, b) => write!(f, "({a} - {b})"),
            RealExpr::Mul(a, b) => write!(f, "{a}*{b}"),
            RealExpr::Div(a, b) => write!(f, "{a}/{b}"),
            RealExpr::Pow(a, b) => write!(f, "{a}^({b})"),
            RealExpr::Call(func, a) => {
                let name = match func {
                    Func::Sqrt => "sqrt",
                    Func::Sin => "sin",
                    Func::Cos => "cos",
                    Func::Exp => "exp",
                    Func::Ln => "ln",
                };
                write!(f, "{name}({a})")
            }
        }
    }
}

impl Serialize for RealExpr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for RealExpr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        RealExpr::parse(&s).map_err(serde::de::Error::custom)
    }
}

impl From<i64> for RealExpr {
    fn from(v: i64) -> Self {
        RealExpr::int(v)
    }
}

/// `1 / sqrt(2)`, used often enough to deserve a name.
pub fn inv_sqrt2() -> RealExpr {
    RealExpr::Div(
        Box::new(RealExpr::Const(BigRational::one())),
        Box::new(RealExpr::Call(Func::Sqrt, Box::new(RealExpr::int(2)))),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::Ball;

    #[test]
    fn decimals_are_exact() {
        let r = parse_decimal("-0.125").unwrap();
        assert_eq!(r, BigRational::new(BigInt::from(-1), BigInt::from(8)));
        assert_eq!(parse_decimal("1.5e-3").unwrap(), BigRational::new(BigInt::from(3), BigInt::from(2000)));
        assert_eq!(parse_decimal("12").unwrap(), BigRational::from_integer(BigInt::from(12)));
        assert!(parse_decimal("1.2.3").is_none());
        assert!(parse_decimal("abc").is_none());
    }

    #[test]
    fn trig_expression() {
        let e = RealExpr::parse("cos(pi/9)/sqrt(2)").unwrap();
        let v: f64 = e.eval(0).unwrap();
        assert!((v - (std::f64::consts::PI / 9.0).cos() / 2f64.sqrt()).abs() < 1e-15);
        let b: Ball = e.eval(256).unwrap();
        assert!((b.to_f64() - v).abs() < 1e-15);
    }

    #[test]
    fn power_notation() {
        let e = RealExpr::parse("3^-9.53").unwrap();
        let v: f64 = e.eval(0).unwrap();
        assert!((v - 3f64.powf(-9.53)).abs() < 1e-18);
        let b: Ball = e.eval(200).unwrap();
        assert!((b.to_f64() / v - 1.0).abs() < 1e-12);
        let e = RealExpr::parse("2^-3").unwrap();
        assert_eq!(e.as_rational().unwrap(), BigRational::new(BigInt::from(1), BigInt::from(8)));
        let e = RealExpr::parse("-2^2").unwrap();
        assert_eq!(e.as_rational().unwrap(), BigRational::from_integer(BigInt::from(-4)));
    }

    #[test]
    fn errors() {
        assert!(matches!(RealExpr::parse("cos(1"), Err(ExprError::Parse { .. })));
        assert!(matches!(RealExpr::parse("foo(1)"), Err(ExprError::Parse { .. })));
        assert!(matches!(RealExpr::parse("1 2"), Err(ExprError::Parse { .. })));
        let e = RealExpr::parse("sqrt(-1)").unwrap();
        assert!(e.eval::<Ball>(64).is_err());
        let e = RealExpr::parse("1/(2-2)").unwrap();
        assert!(e.eval::<Ball>(64).is_err());
    }

    #[test]
    fn display_round_trips() {
        for src in ["-cos(pi/9)/sqrt(2)", "3^-9.53", "1e-3 + 2*sin(pi/7)", "(1/3)^2"] {
            let e = RealExpr::parse(src).unwrap();
            let again = RealExpr::parse(&e.to_string()).unwrap();
            let a: f64 = e.eval(0).unwrap();
            let b: f64 = again.eval(0).unwrap();
            assert_eq!(a, b, "{src}");
        }
    }
}
