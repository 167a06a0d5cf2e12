//! Canonical form: a sum of monomials with exact rational coefficients.
//!
//! Atoms are symbols, function applications with normalized arguments, and
//! "compound" atoms (normalized sums, products, constants or powers) that
//! carry an exponent which is not a positive integer, e.g. `(y + 1)^(-1)`.
//! A compound atom whose exponent becomes a positive integer is expanded.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{Expr, Func, Node};

type Monomial = BTreeMap<Expr, BigRational>;

#[derive(Clone, Debug, Default)]
struct Poly {
    terms: BTreeMap<Monomial, BigRational>,
}

impl Poly {
    fn constant(c: BigRational) -> Poly {
        let mut p = Poly::default();
        if !c.is_zero() {
            p.terms.insert(Monomial::new(), c);
        }
        p
    }

    fn atom(atom: Expr, exponent: BigRational) -> Poly {
        let mut m = Monomial::new();
        m.insert(atom, exponent);
        let mut p = Poly::default();
        p.terms.insert(m, BigRational::one());
        p
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn single_term(&self) -> Option<(&Monomial, &BigRational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    fn add_assign(&mut self, other: Poly) {
        for (m, c) in other.terms {
            self.add_term(m, c);
        }
    }

    fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::default();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let c = ca * cb;
                let mut m = ma.clone();
                for (atom, e) in mb {
                    merge_factor(&mut m, atom.clone(), e.clone());
                }
                out.add_assign(expand_compounds(m, c));
            }
        }
        out
    }

    fn pow(&self, n: u64) -> Poly {
        if n == 0 {
            return Poly::constant(BigRational::one());
        }
        if let Some((m, c)) = self.single_term() {
            let q = BigRational::from_integer(BigInt::from(n));
            return scale_single(m, c, &q);
        }
        let mut result = self.clone();
        for _ in 1..n {
            result = result.mul(self);
        }
        result
    }

    fn into_expr(self) -> Expr {
        let terms: Vec<Expr> = self
            .terms
            .into_iter()
            .rev()
            .map(|(m, c)| term_expr(m, c))
            .collect();
        Expr::sum(terms)
    }
}

fn merge_factor(m: &mut Monomial, atom: Expr, e: BigRational) {
    let total = match m.remove(&atom) {
        Some(prev) => prev + e,
        None => e,
    };
    if !total.is_zero() {
        m.insert(atom, total);
    }
}

fn is_compound(atom: &Expr) -> bool {
    !matches!(atom.node(), Node::Sym(_) | Node::Func(..))
}

fn positive_integer(q: &BigRational) -> Option<u64> {
    if q.is_integer() && q.is_positive() {
        q.to_integer().to_u64()
    } else {
        None
    }
}

/// Pulls compound atoms with positive integer exponents out of `m` and
/// multiplies their expansions back in.
fn expand_compounds(mut m: Monomial, c: BigRational) -> Poly {
    let expandable: Vec<Expr> = m
        .iter()
        .filter(|(a, e)| is_compound(a) && positive_integer(e).is_some())
        .map(|(a, _)| a.clone())
        .collect();
    if expandable.is_empty() {
        let mut p = Poly::default();
        p.add_term(m, c);
        return p;
    }
    let mut factor = Poly::constant(BigRational::one());
    for atom in expandable {
        let n = positive_integer(&m.remove(&atom).unwrap()).unwrap();
        factor = factor.mul(&to_poly(&atom).pow(n));
    }
    let mut rest = Poly::default();
    rest.add_term(m, c);
    rest.mul(&factor)
}

/// `(c * m)^q` for a single term and an integer exponent.
fn scale_single(m: &Monomial, c: &BigRational, q: &BigRational) -> Poly {
    let n = q.to_integer().to_i32().expect("exponent out of range");
    let coeff = c.pow(n);
    let mut out = Monomial::new();
    for (atom, e) in m {
        merge_factor(&mut out, atom.clone(), e * q);
    }
    expand_compounds(out, coeff)
}

fn term_expr(m: Monomial, c: BigRational) -> Expr {
    let mut factors = Vec::with_capacity(m.len() + 1);
    if m.is_empty() || !c.is_one() {
        factors.push(Expr::num(c));
    }
    for (atom, e) in m {
        if e.is_one() {
            factors.push(atom);
        } else {
            factors.push(Expr::from_node(Node::Pow(atom, e)));
        }
    }
    Expr::product(factors)
}

/// Exact `c^q` for rational `c > 0` when the root is exact.
fn exact_rational_power(c: &BigRational, q: &BigRational) -> Option<BigRational> {
    if !c.is_positive() {
        return None;
    }
    let root = q.denom().to_u32()?;
    let n = q.numer().to_i32()?;
    let num = c.numer().nth_root(root);
    let den = c.denom().nth_root(root);
    if num.pow(root) != *c.numer() || den.pow(root) != *c.denom() {
        return None;
    }
    Some(BigRational::new(num, den).pow(n))
}

fn power(base: &Expr, q: &BigRational) -> Poly {
    let pb = to_poly(base);
    if q.is_zero() {
        if pb.is_zero() {
            return Poly::atom(Expr::zero(), q.clone());
        }
        return Poly::constant(BigRational::one());
    }
    if let Some(n) = positive_integer(q) {
        return pb.pow(n);
    }
    if pb.is_zero() {
        if q.is_positive() {
            return Poly::default();
        }
        return Poly::atom(Expr::zero(), q.clone());
    }
    if let Some((m, c)) = pb.single_term() {
        if q.is_integer() {
            return scale_single(m, c, q);
        }
        if m.is_empty() {
            if let Some(exact) = exact_rational_power(c, q) {
                return Poly::constant(exact);
            }
            return Poly::atom(Expr::num(c.clone()), q.clone());
        }
        if c.is_one() && m.len() == 1 {
            let (atom, e) = m.iter().next().unwrap();
            let even = e.is_integer() && (e.to_integer() % BigInt::from(2)).is_zero();
            if !even {
                let mut out = Monomial::new();
                out.insert(atom.clone(), e * q);
                return expand_compounds(out, BigRational::one());
            }
        }
    }
    Poly::atom(pb.into_expr(), q.clone())
}

fn fold_function(func: Func, arg: &Expr) -> Option<Expr> {
    let c = arg.as_num()?;
    match func {
        Func::Sin | Func::Tan if c.is_zero() => Some(Expr::zero()),
        Func::Cos | Func::Exp if c.is_zero() => Some(Expr::one()),
        Func::Ln if c.is_one() => Some(Expr::zero()),
        Func::Sqrt => exact_rational_power(c, &BigRational::new(1.into(), 2.into()))
            .or_else(|| c.is_zero().then(BigRational::zero))
            .map(Expr::num),
        _ => None,
    }
}

fn to_poly(e: &Expr) -> Poly {
    match e.node() {
        Node::Num(c) => Poly::constant(c.clone()),
        Node::Sym(_) => Poly::atom(e.clone(), BigRational::one()),
        Node::Add(terms) => {
            let mut p = Poly::default();
            for t in terms {
                p.add_assign(to_poly(t));
            }
            p
        }
        Node::Mul(factors) => {
            let mut p = Poly::constant(BigRational::one());
            for f in factors {
                if p.is_zero() {
                    break;
                }
                p = p.mul(&to_poly(f));
            }
            p
        }
        Node::Pow(base, q) => power(base, q),
        Node::Func(func, arg) => {
            let arg = arg.normalize();
            match fold_function(*func, &arg) {
                Some(folded) => to_poly(&folded),
                None => Poly::atom(Expr::apply(*func, arg), BigRational::one()),
            }
        }
    }
}

impl Expr {
    /// Fully expanded canonical form. Idempotent.
    pub fn normalize(&self) -> Expr {
        to_poly(self).into_expr()
    }
}

#[cfg(test)]
mod tests {
    use super::super::testing::s;
    use super::*;

    fn n(e: Expr) -> String {
        e.normalize().to_string()
    }

    #[test]
    fn like_terms_merge() {
        assert_eq!(n(s("y") + s("y")), "2*y");
    }

    #[test]
    fn identities_absorb() {
        assert_eq!(n(s("y") * Expr::one() + Expr::zero()), "y");
        assert_eq!(n(s("y") * Expr::zero()), "0");
        assert_eq!(n(s("y").powi(1)), "y");
        assert_eq!(n(s("y").powi(0)), "1");
        assert_eq!(n(Expr::zero().powi(0)), "0^0");
    }

    #[test]
    fn products_expand() {
        let e = (s("y") + Expr::one()) * (s("y") - Expr::one());
        assert_eq!(n(e.clone()), "y^2 - 1");
        assert_eq!(e.normalize(), e.normalize().normalize());
    }

    #[test]
    fn sums_under_negative_powers_stay_atomic() {
        let e = (s("y") + Expr::one()).powi(-1) * (s("y") + Expr::one()).powi(-1);
        assert_eq!(n(e), "(y + 1)^(-2)");
        let half = BigRational::new(1.into(), 2.into());
        let r = (s("y") + Expr::one()).pow(half.clone());
        assert_eq!(n(r.clone() * r), "y + 1");
    }

    #[test]
    fn constants_fold() {
        assert_eq!(n(Expr::apply(Func::Sin, Expr::zero())), "0");
        assert_eq!(n(Expr::apply(Func::Cos, Expr::zero()) * Expr::int(3)), "3");
        assert_eq!(n(Expr::apply(Func::Sqrt, Expr::rational(9, 4))), "3/2");
        assert_eq!(
            n(Expr::int(4).pow(BigRational::new((-1).into(), 2.into()))),
            "1/2"
        );
        assert_eq!(
            n(Expr::int(2).pow(BigRational::new(1.into(), 2.into()))),
            "2^(1/2)"
        );
    }

    #[test]
    fn even_powers_do_not_collapse_under_roots() {
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(n(s("y").powi(2).pow(half.clone())), "(y^2)^(1/2)");
        assert_eq!(n(s("y").powi(3).pow(half)), "y^(3/2)");
    }

    #[test]
    fn function_arguments_normalize() {
        let e =
            Expr::apply(Func::Sin, s("y") + s("y")) - Expr::apply(Func::Sin, s("y") * Expr::int(2));
        assert_eq!(n(e), "0");
    }
}
