//! Immutable symbolic expressions.
//!
//! An [`Expr`] is a cheaply clonable handle to a shared [`Node`]. Arithmetic
//! operators build raw trees; [`Expr::normalize`] brings them to the
//! canonical expanded form (sums of monomials with function applications
//! and non-expandable powers as atoms). Every calculus operation returns
//! normalized output.

mod calculus;
mod equiv;
mod eval;
mod normal;

use std::collections::BTreeSet;
use std::fmt;
use std::ops;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub use equiv::{Equivalence, EquivalenceConfig};
pub use eval::EvalError;

/// What a symbol stands for inside a bundle coordinate chart.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolKind {
    Base,
    Fibre,
    Jet,
    Vertical,
    Momentum,
    VerticalMomentum,
    Parameter,
}

impl SymbolKind {
    pub fn is_vertical(self) -> bool {
        matches!(self, SymbolKind::Vertical | SymbolKind::VerticalMomentum)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SymbolKind::Base => "base-coordinate",
            SymbolKind::Fibre => "fibre-coordinate",
            SymbolKind::Jet => "jet-coordinate",
            SymbolKind::Vertical => "vertical-coordinate",
            SymbolKind::Momentum => "momentum",
            SymbolKind::VerticalMomentum => "vertical-momentum",
            SymbolKind::Parameter => "parameter",
        }
    }
}

/// A named coordinate or parameter. Ordering and equality go by name first.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol {
    name: Arc<str>,
    kind: SymbolKind,
}

impl Symbol {
    pub fn new(name: impl Into<Arc<str>>, kind: SymbolKind) -> Self {
        Symbol {
            name: name.into(),
            kind,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> SymbolKind {
        self.kind
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 6] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Exp,
        Func::Ln,
        Func::Sqrt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Num(BigRational),
    Sym(Symbol),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Expr, BigRational),
    Func(Func, Expr),
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Expr(Arc<Node>);

impl Expr {
    pub fn from_node(node: Node) -> Self {
        Expr(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn zero() -> Self {
        Expr::num(BigRational::zero())
    }

    pub fn one() -> Self {
        Expr::num(BigRational::one())
    }

    pub fn int(n: i64) -> Self {
        Expr::num(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn rational(numer: i64, denom: i64) -> Self {
        Expr::num(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn num(value: BigRational) -> Self {
        Expr::from_node(Node::Num(value))
    }

    pub fn sym(symbol: Symbol) -> Self {
        Expr::from_node(Node::Sym(symbol))
    }

    pub fn sum(terms: Vec<Expr>) -> Self {
        match terms.len() {
            0 => Expr::zero(),
            1 => terms.into_iter().next().unwrap(),
            _ => Expr::from_node(Node::Add(terms)),
        }
    }

    pub fn product(factors: Vec<Expr>) -> Self {
        match factors.len() {
            0 => Expr::one(),
            1 => factors.into_iter().next().unwrap(),
            _ => Expr::from_node(Node::Mul(factors)),
        }
    }

    pub fn pow(&self, exponent: BigRational) -> Self {
        Expr::from_node(Node::Pow(self.clone(), exponent))
    }

    pub fn powi(&self, exponent: i64) -> Self {
        self.pow(BigRational::from_integer(BigInt::from(exponent)))
    }

    pub fn apply(func: Func, arg: Expr) -> Self {
        Expr::from_node(Node::Func(func, arg))
    }

    pub fn as_num(&self) -> Option<&BigRational> {
        match self.node() {
            Node::Num(c) => Some(c),
            _ => None,
        }
    }

    pub fn as_symbol(&self) -> Option<&Symbol> {
        match self.node() {
            Node::Sym(s) => Some(s),
            _ => None,
        }
    }

    /// True only for the literal zero constant (use after normalizing).
    pub fn is_zero(&self) -> bool {
        self.as_num().is_some_and(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.as_num().is_some_and(One::is_one)
    }

    pub fn free_symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<Symbol>) {
        match self.node() {
            Node::Num(_) => {}
            Node::Sym(s) => {
                out.insert(s.clone());
            }
            Node::Add(items) | Node::Mul(items) => {
                for item in items {
                    item.collect_symbols(out);
                }
            }
            Node::Pow(base, _) => base.collect_symbols(out),
            Node::Func(_, arg) => arg.collect_symbols(out),
        }
    }

    pub fn contains_symbol(&self, symbol: &Symbol) -> bool {
        match self.node() {
            Node::Num(_) => false,
            Node::Sym(s) => s == symbol,
            Node::Add(items) | Node::Mul(items) => items.iter().any(|e| e.contains_symbol(symbol)),
            Node::Pow(base, _) => base.contains_symbol(symbol),
            Node::Func(_, arg) => arg.contains_symbol(symbol),
        }
    }

    /// Rewrites every symbol through `f`, keeping the tree shape.
    pub fn map_symbols(&self, f: &mut impl FnMut(&Symbol) -> Symbol) -> Expr {
        match self.node() {
            Node::Num(_) => self.clone(),
            Node::Sym(s) => Expr::sym(f(s)),
            Node::Add(items) => {
                Expr::from_node(Node::Add(items.iter().map(|e| e.map_symbols(f)).collect()))
            }
            Node::Mul(items) => {
                Expr::from_node(Node::Mul(items.iter().map(|e| e.map_symbols(f)).collect()))
            }
            Node::Pow(base, q) => Expr::from_node(Node::Pow(base.map_symbols(f), q.clone())),
            Node::Func(func, arg) => Expr::from_node(Node::Func(*func, arg.map_symbols(f))),
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self.node() {
            Node::Num(_) | Node::Sym(_) => 1,
            Node::Add(items) | Node::Mul(items) => 1 + items.iter().map(Expr::size).sum::<usize>(),
            Node::Pow(base, _) => 1 + base.size(),
            Node::Func(_, arg) => 1 + arg.size(),
        }
    }
}

impl From<Symbol> for Expr {
    fn from(s: Symbol) -> Self {
        Expr::sym(s)
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

macro_rules! binary_op {
    ($trait:ident, $method:ident, $build:expr) => {
        impl ops::$trait<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                $build(self, rhs)
            }
        }
        impl ops::$trait<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                $build(self.clone(), rhs.clone())
            }
        }
        impl ops::$trait<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                $build(self, rhs.clone())
            }
        }
        impl ops::$trait<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                $build(self.clone(), rhs)
            }
        }
    };
}

binary_op!(Add, add, |a, b| Expr::sum(vec![a, b]));
binary_op!(Sub, sub, |a: Expr, b: Expr| Expr::sum(vec![a, -b]));
binary_op!(Mul, mul, |a, b| Expr::product(vec![a, b]));
binary_op!(Div, div, |a, b: Expr| Expr::product(vec![a, b.powi(-1)]));

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::product(vec![Expr::int(-1), self])
    }
}

impl ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -self.clone()
    }
}

pub(crate) fn fmt_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

// Text rendering in the model-file syntax. The output parses back to an
// equivalent expression.
impl Expr {
    fn fmt_sum(&self, f: &mut fmt::Formatter<'_>, terms: &[Expr]) -> fmt::Result {
        for (k, term) in terms.iter().enumerate() {
            let (negative, magnitude) = split_sign(term);
            match (k, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            magnitude.fmt_in(f, Prec::Term)?;
        }
        Ok(())
    }

    fn fmt_in(&self, f: &mut fmt::Formatter<'_>, ctx: Prec) -> fmt::Result {
        let own = self.precedence();
        let paren = own < ctx;
        if paren {
            f.write_str("(")?;
        }
        match self.node() {
            Node::Num(q) => f.write_str(&fmt_rational(q))?,
            Node::Sym(s) => f.write_str(s.name())?,
            Node::Add(terms) => self.fmt_sum(f, terms)?,
            Node::Mul(factors) => {
                let (negative, magnitude) = split_sign(self);
                if negative {
                    f.write_str("-")?;
                    magnitude.fmt_in(f, Prec::Term)?;
                    if paren {
                        f.write_str(")")?;
                    }
                    return Ok(());
                }
                for (k, factor) in factors.iter().enumerate() {
                    if k > 0 {
                        f.write_str("*")?;
                    }
                    // a rational coefficient reads as a quotient, fine as the
                    // leftmost factor but not further right
                    let ctx = if k == 0 { Prec::Term } else { Prec::Unary };
                    factor.fmt_in(f, ctx)?;
                }
            }
            Node::Pow(base, q) => {
                base.fmt_in(f, Prec::Atom)?;
                f.write_str("^")?;
                if q.is_integer() && !q.is_negative() {
                    f.write_str(&fmt_rational(q))?;
                } else {
                    write!(f, "({})", fmt_rational(q))?;
                }
            }
            Node::Func(func, arg) => {
                write!(f, "{}(", func.name())?;
                arg.fmt_in(f, Prec::Sum)?;
                f.write_str(")")?;
            }
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }

    fn precedence(&self) -> Prec {
        match self.node() {
            Node::Num(q) if q.is_negative() => Prec::Sum,
            Node::Num(q) if !q.is_integer() => Prec::Term,
            Node::Num(_) | Node::Sym(_) | Node::Func(..) => Prec::Atom,
            Node::Add(_) => Prec::Sum,
            Node::Mul(factors) => match factors.first().map(split_sign) {
                Some((true, _)) => Prec::Sum,
                _ => Prec::Term,
            },
            Node::Pow(..) => Prec::Power,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Sum,
    Term,
    Unary,
    Power,
    Atom,
}

/// Splits a leading negative coefficient off a term for display.
pub(crate) fn split_sign(term: &Expr) -> (bool, Expr) {
    match term.node() {
        Node::Num(q) if q.is_negative() => (true, Expr::num(-q)),
        Node::Mul(factors) => match factors.first().and_then(Expr::as_num) {
            Some(c) if c.is_negative() => {
                let c = -c;
                let mut rest: Vec<Expr> = Vec::with_capacity(factors.len());
                if !c.is_one() {
                    rest.push(Expr::num(c));
                }
                rest.extend(factors[1..].iter().cloned());
                (true, Expr::product(rest))
            }
            _ => (false, term.clone()),
        },
        _ => (false, term.clone()),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_in(f, Prec::Sum)
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}
