//! Expressions lowered to slot-indexed trees for fast repeated evaluation.

use std::collections::HashMap;

use num_traits::ToPrimitive;

use crate::expr::{Expr, Func, Node, Symbol};

#[derive(Clone, Debug)]
pub(crate) enum Program {
    Const(f64),
    Slot(usize),
    Add(Vec<Program>),
    Mul(Vec<Program>),
    Powi(Box<Program>, i32),
    Powf(Box<Program>, f64),
    Func(Func, Box<Program>),
}

impl Program {
    /// Fails with the first symbol that has no slot.
    pub(crate) fn compile(e: &Expr, slots: &HashMap<Symbol, usize>) -> Result<Program, Symbol> {
        Ok(match e.node() {
            Node::Num(c) => Program::Const(c.to_f64().unwrap_or(f64::NAN)),
            Node::Sym(s) => Program::Slot(*slots.get(s).ok_or_else(|| s.clone())?),
            Node::Add(items) => Program::Add(
                items
                    .iter()
                    .map(|i| Program::compile(i, slots))
                    .collect::<Result<_, _>>()?,
            ),
            Node::Mul(items) => Program::Mul(
                items
                    .iter()
                    .map(|i| Program::compile(i, slots))
                    .collect::<Result<_, _>>()?,
            ),
            Node::Pow(base, q) => {
                let base = Box::new(Program::compile(base, slots)?);
                match q.is_integer().then(|| q.to_integer().to_i32()).flatten() {
                    Some(n) => Program::Powi(base, n),
                    None => Program::Powf(base, q.to_f64().unwrap_or(f64::NAN)),
                }
            }
            Node::Func(f, arg) => Program::Func(*f, Box::new(Program::compile(arg, slots)?)),
        })
    }

    /// Domain violations surface as NaN or infinities.
    pub(crate) fn eval(&self, slots: &[f64]) -> f64 {
        match self {
            Program::Const(c) => *c,
            Program::Slot(k) => slots[*k],
            Program::Add(items) => items.iter().map(|p| p.eval(slots)).sum(),
            Program::Mul(items) => items.iter().map(|p| p.eval(slots)).product(),
            Program::Powi(b, n) => b.eval(slots).powi(*n),
            Program::Powf(b, q) => b.eval(slots).powf(*q),
            Program::Func(f, arg) => {
                let a = arg.eval(slots);
                match f {
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Tan => a.tan(),
                    Func::Exp => a.exp(),
                    Func::Ln => a.ln(),
                    Func::Sqrt => a.sqrt(),
                }
            }
        }
    }
}
