//! Jet coordinates, total derivatives and the vertical derivative.

mod multi_index;
mod spec;

use thiserror::Error;

use crate::expr::Expr;

pub use multi_index::MultiIndex;
pub use spec::{is_identifier, BundleSpec, Coordinate, Field, JetCoordinate, Parameter};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JetError {
    #[error("missing base declaration")]
    MissingBase,
    #[error("missing fibre declaration")]
    MissingFibre,
    #[error("`{0}` is not a valid identifier")]
    InvalidName(String),
    #[error("`{0}` collides with generated coordinate names")]
    Collision(String),
    #[error("`{0}` is declared twice")]
    Duplicate(String),
    #[error("base names `{0}` and `{1}` make jet suffixes ambiguous")]
    AmbiguousBase(String, String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("total derivative of `{from}` needs `{to}`, beyond jet order {order}")]
    OrderOverflow {
        from: String,
        to: String,
        order: usize,
    },
    #[error("vertical derivative applied twice")]
    VerticalTwice,
}

/// `d_λ e`: differentiates along base direction `direction`, treating jet
/// coordinates (plain and vertical) as functions of the base.
pub fn total_derivative(e: &Expr, direction: usize, spec: &BundleSpec) -> Result<Expr, JetError> {
    let mut terms = Vec::new();
    for s in e.free_symbols() {
        match spec.coordinate(&s) {
            Some(Coordinate::Base(d)) if d == direction => terms.push(e.diff(&s)),
            Some(Coordinate::Jet(c)) => {
                let next = c.prolonged(direction);
                if next.order() > spec.order() {
                    return Err(JetError::OrderOverflow {
                        from: s.name().to_string(),
                        to: spec.jet_name(&next),
                        order: spec.order(),
                    });
                }
                terms.push(spec.jet(&next) * e.diff(&s));
            }
            Some(_) => {}
            None => return Err(JetError::UnknownSymbol(s.name().to_string())),
        }
    }
    Ok(Expr::sum(terms).normalize())
}

/// `d_Λ e`, the composition of total derivatives over the entries of `index`.
pub fn iterated_total_derivative(
    e: &Expr,
    index: &MultiIndex,
    spec: &BundleSpec,
) -> Result<Expr, JetError> {
    index
        .entries()
        .iter()
        .try_fold(e.normalize(), |acc, &d| total_derivative(&acc, d, spec))
}

/// `d_V e = Σ v^i_Λ ∂e/∂y^i_Λ`, summed over every jet coordinate of every
/// field present, momenta included.
pub fn vertical_derivative(e: &Expr, spec: &BundleSpec) -> Result<Expr, JetError> {
    let mut terms = Vec::new();
    for s in e.free_symbols() {
        match spec.coordinate(&s) {
            Some(Coordinate::Jet(c)) if c.vertical => return Err(JetError::VerticalTwice),
            Some(Coordinate::Jet(c)) => terms.push(spec.jet(&c.vertical_partner()) * e.diff(&s)),
            Some(_) => {}
            None => return Err(JetError::UnknownSymbol(s.name().to_string())),
        }
    }
    Ok(Expr::sum(terms).normalize())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec_t() -> BundleSpec {
        BundleSpec::new(&["t"], &["y"]).unwrap().with_order(2)
    }

    fn var(spec: &BundleSpec, name: &str) -> Expr {
        Expr::sym(spec.symbol(name).unwrap())
    }

    #[test]
    fn total_derivative_chains_through_jets() {
        let spec = spec_t();
        let y = var(&spec, "y");
        assert_eq!(
            total_derivative(&y.powi(2), 0, &spec).unwrap().to_string(),
            "2*y*y_t"
        );
        assert_eq!(
            total_derivative(&var(&spec, "y_t"), 0, &spec)
                .unwrap()
                .to_string(),
            "y_tt"
        );
    }

    #[test]
    fn total_derivative_includes_explicit_base_dependence() {
        let spec = BundleSpec::new(&["x", "t"], &["y"]).unwrap().with_order(1);
        let e = var(&spec, "x") * var(&spec, "y");
        let expected = var(&spec, "y") + var(&spec, "x") * var(&spec, "y_x");
        assert_eq!(
            total_derivative(&e, 0, &spec).unwrap(),
            expected.normalize()
        );
    }

    #[test]
    fn order_overflow_names_the_coordinate() {
        let spec = spec_t();
        let err = total_derivative(&var(&spec, "y_tt"), 0, &spec).unwrap_err();
        assert_eq!(
            err,
            JetError::OrderOverflow {
                from: "y_tt".into(),
                to: "y_ttt".into(),
                order: 2
            }
        );
    }

    #[test]
    fn iterated_derivative_is_symmetric() {
        let spec = BundleSpec::new(&["x", "t"], &["y"]).unwrap().with_order(2);
        let y = var(&spec, "y");
        assert_eq!(
            iterated_total_derivative(&y, &MultiIndex::empty(), &spec).unwrap(),
            y
        );
        let xt = iterated_total_derivative(&y, &MultiIndex::new(vec![0, 1]), &spec).unwrap();
        let tx = total_derivative(&total_derivative(&y, 1, &spec).unwrap(), 0, &spec).unwrap();
        assert_eq!(xt, tx);
        assert_eq!(xt.to_string(), "y_xt");
    }

    #[test]
    fn vertical_derivative_examples() {
        let spec = BundleSpec::new(&["x"], &["y"]).unwrap().with_order(1);
        assert_eq!(
            vertical_derivative(&var(&spec, "y"), &spec)
                .unwrap()
                .to_string(),
            "v_y"
        );
        let e = var(&spec, "y_x").powi(2);
        assert_eq!(
            vertical_derivative(&e, &spec).unwrap().to_string(),
            "2*v_y_x*y_x"
        );
        let e = var(&spec, "y_x") - var(&spec, "y").powi(2);
        let expected = var(&spec, "v_y_x") - Expr::int(2) * var(&spec, "y") * var(&spec, "v_y");
        assert_eq!(
            vertical_derivative(&e, &spec).unwrap(),
            expected.normalize()
        );
    }

    #[test]
    fn vertical_derivative_rejects_second_application() {
        let spec = spec_t();
        let once = vertical_derivative(&var(&spec, "y_t").powi(2), &spec).unwrap();
        assert_eq!(
            vertical_derivative(&once, &spec),
            Err(JetError::VerticalTwice)
        );
    }

    #[test]
    fn vertical_derivative_of_fibre_constant_vanishes() {
        let spec = spec_t();
        let e = Expr::apply(crate::expr::Func::Sin, var(&spec, "t"));
        assert!(vertical_derivative(&e, &spec).unwrap().is_zero());
    }

    #[test]
    fn vertical_derivative_reaches_momenta() {
        let spec = spec_t().with_momenta();
        let p = var(&spec, "pt_y");
        assert_eq!(
            vertical_derivative(&(p.powi(2) * Expr::rational(1, 2)), &spec)
                .unwrap()
                .to_string(),
            "pt_y*vpt_y"
        );
    }
}
