//! Model files, renderers and the command-line driver.

pub mod cli;
pub mod parse;
pub mod render;

use std::fmt;

use crate::expr::{EquivalenceConfig, Expr};
use crate::hamiltonian::{self, HamiltonianSystem};
use crate::jet::BundleSpec;
use crate::variational::{
    self, CommutationReport, DifferentialOperator, EquationSystem, Lagrangian, VariationalError,
};

pub use parse::{parse_expr, parse_model_file, Declared, ModelFile, ParseError};
pub use render::{render_expr, render_model, render_system, Format};

#[derive(Clone, Debug, PartialEq)]
pub enum ModelKind {
    Lagrangian(Lagrangian),
    Equations(DifferentialOperator),
    Hamiltonian(HamiltonianSystem),
}

/// A parsed model with its chart order settled.
#[derive(Clone, Debug, PartialEq)]
pub struct Model {
    kind: ModelKind,
}

#[derive(Debug)]
pub enum ModelError {
    Parse(ParseError),
    Variational(VariationalError),
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::Parse(e) => e.fmt(f),
            ModelError::Variational(e) => e.fmt(f),
        }
    }
}

impl std::error::Error for ModelError {}

impl From<ParseError> for ModelError {
    fn from(e: ParseError) -> Self {
        ModelError::Parse(e)
    }
}

impl From<VariationalError> for ModelError {
    fn from(e: VariationalError) -> Self {
        ModelError::Variational(e)
    }
}

impl Model {
    /// Parses a model and infers the chart order: `2k` for a `k`-th order
    /// Lagrangian, the highest jet order for equations, one for a
    /// Hamiltonian.
    pub fn parse(text: &str) -> Result<Model, ModelError> {
        Model::parse_with_order(text, None)
    }

    /// Like [`Model::parse`] with the chart order fixed to `order`.
    pub fn parse_with_order(text: &str, order: Option<usize>) -> Result<Model, ModelError> {
        let file = parse_model_file(text)?;
        Model::from_file(file, order)
    }

    pub fn from_file(file: ModelFile, order: Option<usize>) -> Result<Model, ModelError> {
        let ModelFile {
            spec,
            kind,
            payload,
        } = file;
        let exprs: Vec<Expr> = payload.into_iter().map(|(_, e)| e).collect();
        let kind = match kind {
            Declared::Lagrangian => {
                let density = exprs.into_iter().next().expect("one lagrangian line");
                match order {
                    Some(r) => ModelKind::Lagrangian(Lagrangian::new(density, spec.with_order(r))?),
                    None => ModelKind::Lagrangian(Lagrangian::inferred(density, spec)?),
                }
            }
            Declared::Equations => {
                let r = order.unwrap_or_else(|| {
                    exprs
                        .iter()
                        .map(|e| spec.max_jet_order(e))
                        .max()
                        .unwrap_or(0)
                });
                ModelKind::Equations(DifferentialOperator::new(exprs, spec.with_order(r))?)
            }
            Declared::Hamiltonian => {
                let density = exprs.into_iter().next().expect("one hamiltonian line");
                let spec = match order {
                    Some(r) => spec.with_order(r),
                    None => spec,
                };
                ModelKind::Hamiltonian(HamiltonianSystem::new(density, spec)?)
            }
        };
        Ok(Model { kind })
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn spec(&self) -> &BundleSpec {
        match &self.kind {
            ModelKind::Lagrangian(l) => l.spec(),
            ModelKind::Equations(op) => op.spec(),
            ModelKind::Hamiltonian(h) => h.spec(),
        }
    }

    /// Euler-Lagrange equations, Hamilton equations, or the declared
    /// equations themselves.
    pub fn equations(&self) -> Result<EquationSystem, VariationalError> {
        match &self.kind {
            ModelKind::Lagrangian(l) => {
                let op = variational::euler_lagrange(l)?;
                Ok(EquationSystem::new(
                    op.components().to_vec(),
                    op.spec().clone(),
                    variational::Structure::Plain,
                ))
            }
            ModelKind::Equations(op) => Ok(EquationSystem::new(
                op.components().to_vec(),
                op.spec().clone(),
                variational::Structure::Plain,
            )),
            ModelKind::Hamiltonian(h) => hamiltonian::hamilton_equations(h),
        }
    }

    /// The equations together with their vertical derivatives.
    pub fn deviation(&self) -> Result<EquationSystem, VariationalError> {
        let op = match &self.kind {
            ModelKind::Lagrangian(l) => variational::euler_lagrange(l)?,
            ModelKind::Equations(op) => op.clone(),
            ModelKind::Hamiltonian(h) => hamiltonian::hamilton_equations(h)?.to_operator()?,
        };
        variational::deviation_system(&op)
    }

    /// The commutation theorem that applies to this kind of model.
    pub fn check(&self, config: &EquivalenceConfig) -> Result<CommutationReport, VariationalError> {
        match &self.kind {
            ModelKind::Lagrangian(l) => variational::check_el_vertical_commute(l, config),
            ModelKind::Equations(op) => variational::check_vertical_total_commute(op, config),
            ModelKind::Hamiltonian(h) => hamiltonian::check_hamilton_deviation_commute(h, config),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const OSCILLATOR: &str =
        "base t\nfibre y\nparam omega = 1\nlagrangian 0.5*(y_t^2 - omega^2*y^2)";

    fn strings(sys: &EquationSystem) -> Vec<String> {
        sys.equations().iter().map(|e| e.to_string()).collect()
    }

    #[test]
    fn oscillator_model() {
        let m = Model::parse(OSCILLATOR).unwrap();
        assert_eq!(m.spec().order(), 2);
        assert_eq!(strings(&m.equations().unwrap()), ["-y_tt - omega^2*y"]);
        assert_eq!(
            strings(&m.deviation().unwrap()),
            ["-y_tt - omega^2*y", "-v_y_tt - omega^2*v_y"]
        );
        let report = m.check(&EquivalenceConfig::default()).unwrap();
        assert_eq!(report.summary(), "δ(VL) = V(δL): PASS (2 pairs)");
    }

    #[test]
    fn equation_model_checks_commutation() {
        let m = Model::parse("base t\nfibre y\nequation y_t - y^2").unwrap();
        assert_eq!(m.spec().order(), 1);
        assert_eq!(
            strings(&m.deviation().unwrap()),
            ["y_t - y^2", "v_y_t - 2*v_y*y"]
        );
        assert!(m.check(&EquivalenceConfig::default()).unwrap().passed());
    }

    #[test]
    fn hamiltonian_model() {
        let m = Model::parse("base t\nfibre y\nhamiltonian 0.5*pt_y^2 - cos(y)").unwrap();
        assert_eq!(
            strings(&m.equations().unwrap()),
            ["y_t - pt_y", "sin(y) + pt_y_t"]
        );
        assert_eq!(m.deviation().unwrap().equations().len(), 4);
        assert!(m.check(&EquivalenceConfig::default()).unwrap().passed());
    }

    #[test]
    fn order_override() {
        let m = Model::parse_with_order(OSCILLATOR, Some(3)).unwrap();
        assert_eq!(m.spec().order(), 3);
        assert!(matches!(
            Model::parse_with_order("base t\nfibre y\nequation y_tt", Some(1)),
            Err(ModelError::Variational(
                VariationalError::OrderExceeded { .. }
            ))
        ));
    }

    #[test]
    fn vertical_symbols_are_rejected_in_models() {
        assert!(matches!(
            Model::parse("base t\nfibre y\nequation v_y_t"),
            Err(ModelError::Variational(
                VariationalError::UnexpectedVertical(_)
            ))
        ));
    }
}
