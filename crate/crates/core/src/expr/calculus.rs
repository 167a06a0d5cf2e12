use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::One;

use super::{Expr, Func, Node, Symbol};

impl Expr {
    /// Partial derivative with respect to `s`, all other symbols held fixed.
    pub fn diff(&self, s: &Symbol) -> Expr {
        self.diff_raw(s).normalize()
    }

    fn diff_raw(&self, s: &Symbol) -> Expr {
        if !self.contains_symbol(s) {
            return Expr::zero();
        }
        match self.node() {
            Node::Num(_) => Expr::zero(),
            Node::Sym(x) => {
                if x == s {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Node::Add(terms) => Expr::sum(terms.iter().map(|t| t.diff_raw(s)).collect()),
            Node::Mul(factors) => {
                let mut terms = Vec::new();
                for (k, f) in factors.iter().enumerate() {
                    if !f.contains_symbol(s) {
                        continue;
                    }
                    let mut product = factors.clone();
                    product[k] = f.diff_raw(s);
                    terms.push(Expr::product(product));
                }
                Expr::sum(terms)
            }
            Node::Pow(base, q) => {
                let lowered = base.pow(q - BigRational::one());
                Expr::product(vec![Expr::num(q.clone()), lowered, base.diff_raw(s)])
            }
            Node::Func(func, arg) => {
                let inner = arg.diff_raw(s);
                let outer = match func {
                    Func::Sin => Expr::apply(Func::Cos, arg.clone()),
                    Func::Cos => -Expr::apply(Func::Sin, arg.clone()),
                    Func::Tan => Expr::one() + Expr::apply(Func::Tan, arg.clone()).powi(2),
                    Func::Exp => self.clone(),
                    Func::Ln => arg.powi(-1),
                    Func::Sqrt => Expr::rational(1, 2) * self.powi(-1),
                };
                outer * inner
            }
        }
    }

    /// Simultaneous substitution; symbols without a binding are kept.
    pub fn substitute(&self, bindings: &BTreeMap<Symbol, Expr>) -> Expr {
        if bindings.is_empty() {
            return self.normalize();
        }
        self.substitute_raw(bindings).normalize()
    }

    /// Replaces every occurrence of the subexpression `target` (compared
    /// structurally after normalization) by `with`, then normalizes.
    pub fn replace(&self, target: &Expr, with: &Expr) -> Expr {
        self.normalize()
            .replace_raw(&target.normalize(), with)
            .normalize()
    }

    fn replace_raw(&self, target: &Expr, with: &Expr) -> Expr {
        if self == target {
            return with.clone();
        }
        match self.node() {
            Node::Num(_) | Node::Sym(_) => self.clone(),
            Node::Add(items) => Expr::from_node(Node::Add(
                items.iter().map(|e| e.replace_raw(target, with)).collect(),
            )),
            Node::Mul(items) => Expr::from_node(Node::Mul(
                items.iter().map(|e| e.replace_raw(target, with)).collect(),
            )),
            Node::Pow(base, q) => base.replace_raw(target, with).pow(q.clone()),
            Node::Func(func, arg) => Expr::apply(*func, arg.replace_raw(target, with)),
        }
    }

    fn substitute_raw(&self, bindings: &BTreeMap<Symbol, Expr>) -> Expr {
        match self.node() {
            Node::Num(_) => self.clone(),
            Node::Sym(x) => bindings.get(x).cloned().unwrap_or_else(|| self.clone()),
            Node::Add(items) => Expr::from_node(Node::Add(
                items.iter().map(|e| e.substitute_raw(bindings)).collect(),
            )),
            Node::Mul(items) => Expr::from_node(Node::Mul(
                items.iter().map(|e| e.substitute_raw(bindings)).collect(),
            )),
            Node::Pow(base, q) => base.substitute_raw(bindings).pow(q.clone()),
            Node::Func(func, arg) => Expr::apply(*func, arg.substitute_raw(bindings)),
        }
    }
}
