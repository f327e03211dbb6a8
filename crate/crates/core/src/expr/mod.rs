//! Single-variable expression trees: parsing, evaluation, and exact
//! symbolic differentiation.
//!
//! The grammar is deliberately tiny: decimal literals, one free variable,
//! `+ - * / ^` (with `^` right-associative and binding tighter than unary
//! minus), the functions `exp, ln, sin, cos, sqrt, abs`, and the constants
//! `pi` and `e`. Everything is IEEE double precision.

mod parser;

use std::fmt;

use crate::error::{Error, Result};

/// Built-in unary functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Function {
    Exp,
    Ln,
    Sin,
    Cos,
    Sqrt,
    Abs,
}

impl Function {
    fn name(self) -> &'static str {
        match self {
            Function::Exp => "exp",
            Function::Ln => "ln",
            Function::Sin => "sin",
            Function::Cos => "cos",
            Function::Sqrt => "sqrt",
            Function::Abs => "abs",
        }
    }

    fn from_name(name: &str) -> Option<Function> {
        Some(match name {
            "exp" => Function::Exp,
            "ln" => Function::Ln,
            "sin" => Function::Sin,
            "cos" => Function::Cos,
            "sqrt" => Function::Sqrt,
            "abs" => Function::Abs,
            _ => return None,
        })
    }
}

/// Named mathematical constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedConstant {
    Pi,
    E,
}

impl NamedConstant {
    fn value(self) -> f64 {
        match self {
            NamedConstant::Pi => std::f64::consts::PI,
            NamedConstant::E => std::f64::consts::E,
        }
    }

    fn name(self) -> &'static str {
        match self {
            NamedConstant::Pi => "pi",
            NamedConstant::E => "e",
        }
    }
}

/// Binary operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinaryOp {
    fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Pow => "^",
        }
    }
}

/// Parsed expression in one free variable.
///
/// Immutable after construction; evaluation is pure, so sharing an `Expr`
/// across threads is safe.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(f64),
    Variable(String),
    Constant(NamedConstant),
    Neg(Box<Expr>),
    Binary {
        op: BinaryOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Call {
        func: Function,
        arg: Box<Expr>,
    },
}

impl Expr {
    /// Parses an expression string.
    ///
    /// The first bare identifier that is neither a function nor a constant
    /// becomes the free variable; any later, different identifier is an
    /// error. Syntax errors carry the byte offset of the offending token.
    pub fn parse(text: &str) -> Result<Expr> {
        parser::parse(text)
    }

    /// Evaluates the expression with the free variable bound to `x`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        match self {
            Expr::Number(v) => Ok(*v),
            Expr::Variable(_) => Ok(x),
            Expr::Constant(c) => Ok(c.value()),
            Expr::Neg(inner) => Ok(-inner.eval(x)?),
            Expr::Binary { op, lhs, rhs } => {
                let a = lhs.eval(x)?;
                let b = rhs.eval(x)?;
                match op {
                    BinaryOp::Add => Ok(a + b),
                    BinaryOp::Sub => Ok(a - b),
                    BinaryOp::Mul => Ok(a * b),
                    BinaryOp::Div => {
                        if b == 0.0 {
                            Err(self.domain_error(x, "division by zero"))
                        } else {
                            Ok(a / b)
                        }
                    }
                    BinaryOp::Pow => self.eval_pow(a, b, x),
                }
            }
            Expr::Call { func, arg } => {
                let v = arg.eval(x)?;
                match func {
                    Function::Exp => Ok(v.exp()),
                    Function::Ln => {
                        if v <= 0.0 {
                            Err(self.domain_error(x, "ln of a non-positive value"))
                        } else {
                            Ok(v.ln())
                        }
                    }
                    Function::Sin => Ok(v.sin()),
                    Function::Cos => Ok(v.cos()),
                    Function::Sqrt => {
                        if v < 0.0 {
                            Err(self.domain_error(x, "sqrt of a negative value"))
                        } else {
                            Ok(v.sqrt())
                        }
                    }
                    Function::Abs => Ok(v.abs()),
                }
            }
        }
    }

    fn eval_pow(&self, base: f64, exponent: f64, x: f64) -> Result<f64> {
        if base == 0.0 && exponent < 0.0 {
            return Err(self.domain_error(x, "zero base with negative exponent"));
        }
        if base < 0.0 && exponent.fract() != 0.0 {
            return Err(self.domain_error(x, "negative base with non-integer exponent"));
        }
        Ok(base.powf(exponent))
    }

    fn domain_error(&self, x: f64, reason: &str) -> Error {
        Error::Domain {
            expr: self.to_string(),
            x,
            reason: reason.to_string(),
        }
    }

    /// Exact symbolic derivative with respect to the free variable.
    ///
    /// No simplification is guaranteed beyond evaluability. The derivative
    /// of `abs(u)` is written as `(abs(u)/u)*u'`, so evaluating it at a
    /// zero of `u` raises the usual division-by-zero domain error.
    pub fn differentiate(&self) -> Expr {
        match self {
            Expr::Number(_) | Expr::Constant(_) => Expr::Number(0.0),
            Expr::Variable(_) => Expr::Number(1.0),
            Expr::Neg(inner) => neg(inner.differentiate()),
            Expr::Binary { op, lhs, rhs } => {
                let da = lhs.differentiate();
                let db = rhs.differentiate();
                match op {
                    BinaryOp::Add => add(da, db),
                    BinaryOp::Sub => sub(da, db),
                    BinaryOp::Mul => add(
                        mul(da, rhs.as_ref().clone()),
                        mul(lhs.as_ref().clone(), db),
                    ),
                    BinaryOp::Div => div(
                        sub(
                            mul(da, rhs.as_ref().clone()),
                            mul(lhs.as_ref().clone(), db),
                        ),
                        pow(rhs.as_ref().clone(), Expr::Number(2.0)),
                    ),
                    BinaryOp::Pow => self.differentiate_pow(lhs, rhs),
                }
            }
            Expr::Call { func, arg } => {
                let du = arg.differentiate();
                let u = arg.as_ref().clone();
                let outer = match func {
                    Function::Exp => call(Function::Exp, u),
                    Function::Ln => div(Expr::Number(1.0), u),
                    Function::Sin => call(Function::Cos, u),
                    Function::Cos => neg(call(Function::Sin, u)),
                    // d sqrt(u) = u' / (2 sqrt(u))
                    Function::Sqrt => div(
                        Expr::Number(1.0),
                        mul(Expr::Number(2.0), call(Function::Sqrt, u)),
                    ),
                    // sign(u) written as abs(u)/u; undefined at u = 0
                    Function::Abs => div(call(Function::Abs, u.clone()), u),
                };
                mul(outer, du)
            }
        }
    }

    fn differentiate_pow(&self, base: &Expr, exponent: &Expr) -> Expr {
        let du = base.differentiate();
        if let Expr::Number(c) = exponent {
            // d(u^c) = c * u^(c-1) * u' -- valid for negative bases too.
            return mul(
                mul(
                    Expr::Number(*c),
                    pow(base.clone(), Expr::Number(c - 1.0)),
                ),
                du,
            );
        }
        // General case u^v = exp(v ln u): d = u^v * (v' ln u + v u'/u).
        let dv = exponent.differentiate();
        mul(
            self.clone(),
            add(
                mul(dv, call(Function::Ln, base.clone())),
                div(mul(exponent.clone(), du), base.clone()),
            ),
        )
    }
}

fn add(a: Expr, b: Expr) -> Expr {
    Expr::Binary {
        op: BinaryOp::Add,
        lhs: Box::new(a),
        rhs: Box::new(b),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    Expr::Binary {
        op: BinaryOp::Sub,
        lhs: Box::new(a),
        rhs: Box::new(b),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    Expr::Binary {
        op: BinaryOp::Mul,
        lhs: Box::new(a),
        rhs: Box::new(b),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    Expr::Binary {
        op: BinaryOp::Div,
        lhs: Box::new(a),
        rhs: Box::new(b),
    }
}

fn pow(a: Expr, b: Expr) -> Expr {
    Expr::Binary {
        op: BinaryOp::Pow,
        lhs: Box::new(a),
        rhs: Box::new(b),
    }
}

fn neg(a: Expr) -> Expr {
    Expr::Neg(Box::new(a))
}

fn call(func: Function, arg: Expr) -> Expr {
    Expr::Call {
        func,
        arg: Box::new(arg),
    }
}

/// Fully parenthesized rendering; `Expr::parse` of the output evaluates
/// identically to the original tree at every point.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Number(v) => {
                if *v < 0.0 || (*v == 0.0 && v.is_sign_negative()) {
                    // Render as a negation so the literal itself stays
                    // non-negative on reparse.
                    write!(f, "(-{})", -*v)
                } else {
                    write!(f, "{v}")
                }
            }
            Expr::Variable(name) => write!(f, "{name}"),
            Expr::Constant(c) => write!(f, "{}", c.name()),
            Expr::Neg(inner) => write!(f, "(-{inner})"),
            Expr::Binary { op, lhs, rhs } => write!(f, "({lhs}{}{rhs})", op.symbol()),
            Expr::Call { func, arg } => write!(f, "{}({arg})", func.name()),
        }
    }
}
