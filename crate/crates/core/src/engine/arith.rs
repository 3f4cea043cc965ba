use std::cmp::Ordering;
use std::fmt;

use crate::terms::{Bindings, Term};

use super::error::EngineError;

/// Result of evaluating an arithmetic expression.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Number {
    Int(i64),
    Float(f64),
}

impl Number {
    pub fn to_term(self) -> Term {
        match self {
            Number::Int(i) => Term::Int(i),
            Number::Float(f) => Term::Float(f),
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Number::Int(i) => i as f64,
            Number::Float(f) => f,
        }
    }

    /// Numeric comparison; mixed operands compare as floats.
    pub fn compare(self, other: Number) -> Option<Ordering> {
        match (self, other) {
            (Number::Int(a), Number::Int(b)) => Some(a.cmp(&b)),
            (a, b) => a.as_f64().partial_cmp(&b.as_f64()),
        }
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_term().fmt(f)
    }
}

/// Evaluates `t` under `bindings`.
pub fn eval(bindings: &Bindings, t: &Term) -> Result<Number, EngineError> {
    let t = bindings.deref(t)?;
    match t {
        Term::Int(i) => Ok(Number::Int(*i)),
        Term::Float(f) => Ok(Number::Float(*f)),
        Term::Var(_) => Err(EngineError::Instantiation {
            context: "arithmetic",
        }),
        Term::Atom(_) | Term::Handle(_) => Err(EngineError::type_error("evaluable", t)),
        Term::Compound(c) => {
            let name = c.functor().name();
            let args = c.args();
            stacker::maybe_grow(64 * 1024, 4 * 1024 * 1024, || match args {
                [x] => unary(name, eval(bindings, x)?).unwrap_or_else(|| Err(not_evaluable(name, 1))),
                [x, y] => {
                    let (x, y) = (eval(bindings, x)?, eval(bindings, y)?);
                    binary(name, x, y).unwrap_or_else(|| Err(not_evaluable(name, 2)))
                }
                _ => Err(not_evaluable(name, args.len())),
            })
        }
    }
}

fn not_evaluable(name: &str, arity: usize) -> EngineError {
    EngineError::Type {
        expected: "evaluable",
        culprit: format!("{}/{arity}", crate::reader::quote_atom(name)),
    }
}

fn unary(name: &str, x: Number) -> Option<Result<Number, EngineError>> {
    use Number::*;
    let r = match (name, x) {
        ("-", Int(i)) => i.checked_neg().map(Int).ok_or(EngineError::IntOverflow("-")),
        ("-", Float(f)) => Ok(Float(-f)),
        ("+", n) => Ok(n),
        ("abs", Int(i)) => i.checked_abs().map(Int).ok_or(EngineError::IntOverflow("abs")),
        ("abs", Float(f)) => Ok(Float(f.abs())),
        ("sign", Int(i)) => Ok(Int(i.signum())),
        ("sign", Float(f)) => Ok(Float(if f == 0.0 { 0.0 } else { f.signum() })),
        ("float", n) => Ok(Float(n.as_f64())),
        ("integer", Int(i)) => Ok(Int(i)),
        ("integer", Float(f)) => float_to_int(f.round()),
        ("truncate", Float(f)) => float_to_int(f.trunc()),
        ("truncate", Int(i)) => Ok(Int(i)),
        _ => return None,
    };
    Some(r)
}

fn float_to_int(f: f64) -> Result<Number, EngineError> {
    if f.is_finite() && f >= i64::MIN as f64 && f < i64::MAX as f64 {
        Ok(Number::Int(f as i64))
    } else {
        Err(EngineError::IntOverflow("integer conversion"))
    }
}

fn binary(name: &str, x: Number, y: Number) -> Option<Result<Number, EngineError>> {
    use Number::*;
    let r = match (x, y) {
        (Int(a), Int(b)) => int_binary(name, a, b)?,
        (a, b) => {
            let (a, b) = (a.as_f64(), b.as_f64());
            match name {
                "+" => Ok(Float(a + b)),
                "-" => Ok(Float(a - b)),
                "*" => Ok(Float(a * b)),
                "/" if b == 0.0 => Err(EngineError::ZeroDivisor),
                "/" => Ok(Float(a / b)),
                "**" => Ok(Float(a.powf(b))),
                "min" => Ok(if y.compare(x) == Some(Ordering::Less) { y } else { x }),
                "max" => Ok(if y.compare(x) == Some(Ordering::Greater) { y } else { x }),
                "//" | "mod" | "rem" | ">>" | "<<" | "/\\" | "\\/" => {
                    let culprit = if matches!(x, Float(_)) { x } else { y };
                    Err(EngineError::type_error("integer", &culprit.to_term()))
                }
                _ => return None,
            }
        }
    };
    Some(r)
}

fn int_binary(name: &str, a: i64, b: i64) -> Option<Result<Number, EngineError>> {
    use Number::*;
    let overflow = || EngineError::IntOverflow(op_name(name));
    let r = match name {
        "+" => a.checked_add(b).map(Int).ok_or_else(overflow),
        "-" => a.checked_sub(b).map(Int).ok_or_else(overflow),
        "*" => a.checked_mul(b).map(Int).ok_or_else(overflow),
        "//" | "mod" | "rem" | "/" if b == 0 => Err(EngineError::ZeroDivisor),
        "//" => a.checked_div(b).map(Int).ok_or_else(overflow),
        "rem" => a.checked_rem(b).map(Int).ok_or_else(overflow),
        "mod" => a
            .checked_rem(b)
            .map(|r| if r != 0 && (r < 0) != (b < 0) { r + b } else { r })
            .map(Int)
            .ok_or_else(overflow),
        "/" => match a.checked_rem(b) {
            Some(0) => a.checked_div(b).map(Int).ok_or_else(overflow),
            Some(_) => Ok(Float(a as f64 / b as f64)),
            None => Err(overflow()),
        },
        "min" => Ok(Int(a.min(b))),
        "max" => Ok(Int(a.max(b))),
        "**" => Ok(Float((a as f64).powf(b as f64))),
        "^" if b < 0 => Err(EngineError::type_error("non-negative exponent", &Term::Int(b))),
        "^" => u32::try_from(b)
            .ok()
            .and_then(|e| a.checked_pow(e))
            .map(Int)
            .ok_or_else(overflow),
        ">>" => Ok(Int(a >> b.clamp(0, 63))),
        "<<" => u32::try_from(b)
            .ok()
            .and_then(|s| a.checked_shl(s))
            .filter(|r| r >> b == a)
            .map(Int)
            .ok_or_else(overflow),
        "/\\" => Ok(Int(a & b)),
        "\\/" => Ok(Int(a | b)),
        _ => return None,
    };
    Some(r)
}

fn op_name(name: &str) -> &'static str {
    match name {
        "+" => "+",
        "-" => "-",
        "*" => "*",
        "//" => "//",
        "/" => "/",
        "mod" => "mod",
        "rem" => "rem",
        "^" => "^",
        "<<" => "<<",
        _ => "arithmetic",
    }
}
