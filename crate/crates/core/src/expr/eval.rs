use std::collections::HashMap;

use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use super::{Expr, Func, Node, Symbol};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unbound symbol `{0}`")]
    Unbound(Symbol),
    #[error("domain error in `{expr}`: {reason}")]
    Domain { expr: String, reason: &'static str },
}

fn domain(e: &Expr, reason: &'static str) -> EvalError {
    EvalError::Domain {
        expr: e.to_string(),
        reason,
    }
}

impl Expr {
    pub fn eval(&self, point: &HashMap<Symbol, f64>) -> Result<f64, EvalError> {
        self.eval_with(&|s| point.get(s).copied())
    }

    /// Double-precision evaluation with symbol values supplied by `lookup`.
    pub fn eval_with(&self, lookup: &dyn Fn(&Symbol) -> Option<f64>) -> Result<f64, EvalError> {
        match self.node() {
            Node::Num(c) => Ok(c.to_f64().unwrap_or(f64::NAN)),
            Node::Sym(s) => lookup(s).ok_or_else(|| EvalError::Unbound(s.clone())),
            Node::Add(terms) => terms
                .iter()
                .try_fold(0.0, |acc, t| Ok(acc + t.eval_with(lookup)?)),
            Node::Mul(factors) => factors
                .iter()
                .try_fold(1.0, |acc, f| Ok(acc * f.eval_with(lookup)?)),
            Node::Pow(base, q) => {
                let b = base.eval_with(lookup)?;
                let value = if q.is_integer() {
                    if b == 0.0 && !q.is_positive() {
                        return Err(domain(
                            self,
                            if q.is_zero() {
                                "0^0 is undefined"
                            } else {
                                "division by zero"
                            },
                        ));
                    }
                    match q.to_integer().to_i32() {
                        Some(n) => b.powi(n),
                        None => b.powf(q.to_f64().unwrap_or(f64::NAN)),
                    }
                } else {
                    if b < 0.0 {
                        return Err(domain(self, "fractional power of a negative number"));
                    }
                    if b == 0.0 && q.is_negative() {
                        return Err(domain(self, "division by zero"));
                    }
                    b.powf(q.to_f64().unwrap_or(f64::NAN))
                };
                finite(self, value)
            }
            Node::Func(func, arg) => {
                let a = arg.eval_with(lookup)?;
                let value = match func {
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Tan => a.tan(),
                    Func::Exp => a.exp(),
                    Func::Ln => {
                        if a <= 0.0 {
                            return Err(domain(self, "logarithm of a non-positive number"));
                        }
                        a.ln()
                    }
                    Func::Sqrt => {
                        if a < 0.0 {
                            return Err(domain(self, "square root of a negative number"));
                        }
                        a.sqrt()
                    }
                };
                finite(self, value)
            }
        }
    }
}

fn finite(e: &Expr, value: f64) -> Result<f64, EvalError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(domain(e, "non-finite result"))
    }
}
