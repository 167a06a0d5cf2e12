//! Reduction of a one-dimensional-base system to explicit first-order form.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::expr::{Expr, Symbol};
use crate::jet::{BundleSpec, JetCoordinate, MultiIndex};
use crate::variational::EquationSystem;

use super::program::Program;
use super::NumericError;

pub const MAX_ORDER: usize = 4;

/// A field variable (`y`, `v_y`, `pt_y`, ...) with the order at which it
/// enters the system.
#[derive(Clone, Debug, PartialEq)]
pub struct Variable {
    pub coordinate: JetCoordinate,
    pub order: usize,
}

/// `dZ/dt = F(t, Z)`.
#[derive(Clone, Debug)]
pub struct FirstOrderSystem {
    base: Symbol,
    state: Vec<Symbol>,
    rhs: Vec<Expr>,
    vertical: Vec<bool>,
    programs: Vec<Program>,
}

impl FirstOrderSystem {
    /// `rhs[k]` is the derivative of `state[k]`; right-hand sides may only
    /// use the state symbols and `base`.
    pub fn new(base: Symbol, state: Vec<Symbol>, rhs: Vec<Expr>) -> Result<Self, NumericError> {
        let vertical = state.iter().map(|s| s.kind().is_vertical()).collect();
        FirstOrderSystem::with_flags(base, state, rhs, vertical)
    }

    fn with_flags(
        base: Symbol,
        state: Vec<Symbol>,
        rhs: Vec<Expr>,
        vertical: Vec<bool>,
    ) -> Result<Self, NumericError> {
        if state.len() != rhs.len() {
            return Err(NumericError::Dimension {
                expected: state.len(),
                found: rhs.len(),
            });
        }
        let mut slots = HashMap::with_capacity(state.len() + 1);
        slots.insert(base.clone(), 0);
        for (k, s) in state.iter().enumerate() {
            slots.insert(s.clone(), k + 1);
        }
        let programs = rhs
            .iter()
            .map(|e| Program::compile(e, &slots))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|s| NumericError::UnknownSymbol(s.name().to_string()))?;
        Ok(FirstOrderSystem {
            base,
            state,
            rhs,
            vertical,
            programs,
        })
    }

    pub fn dimension(&self) -> usize {
        self.state.len()
    }

    pub fn base(&self) -> &Symbol {
        &self.base
    }

    pub fn state(&self) -> &[Symbol] {
        &self.state
    }

    pub fn state_names(&self) -> Vec<String> {
        self.state.iter().map(|s| s.name().to_string()).collect()
    }

    pub fn rhs(&self) -> &[Expr] {
        &self.rhs
    }

    /// Whether each state component is a vertical (Jacobi) variable.
    pub fn vertical_mask(&self) -> &[bool] {
        &self.vertical
    }

    /// Evaluates `F(t, z)` into `out`; `scratch` must hold `dimension + 1`.
    pub(crate) fn eval_into(&self, t: f64, z: &[f64], scratch: &mut Vec<f64>, out: &mut [f64]) {
        scratch.clear();
        scratch.push(t);
        scratch.extend_from_slice(z);
        for (o, p) in out.iter_mut().zip(&self.programs) {
            *o = p.eval(scratch);
        }
    }

    pub fn eval(&self, t: f64, z: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; z.len()];
        let mut scratch = Vec::with_capacity(z.len() + 1);
        self.eval_into(t, z, &mut scratch, &mut out);
        out
    }
}

/// A compiled system together with the variable layout of its state.
#[derive(Clone, Debug)]
pub struct NormalForm {
    pub system: FirstOrderSystem,
    pub variables: Vec<Variable>,
    /// Highest-derivative symbol of each variable, solved for.
    pub solved: BTreeMap<Symbol, Expr>,
}

fn variable_order(spec: &BundleSpec, symbols: &BTreeSet<Symbol>) -> BTreeMap<JetCoordinate, usize> {
    let mut orders = BTreeMap::new();
    for s in symbols {
        if let Some(c) = spec.jet_coordinate(s) {
            let key = c.with_index(MultiIndex::empty());
            let entry = orders.entry(key).or_insert(0);
            *entry = (*entry).max(c.order());
        }
    }
    orders
}

/// Solves each equation for one highest derivative, substituting
/// highest derivatives already solved; the state stacks
/// `(y, y_t, ...)` per variable, plain variables before vertical ones.
pub fn compile(sys: &EquationSystem) -> Result<NormalForm, NumericError> {
    let spec = sys.spec();
    if spec.dim_base() != 1 {
        return Err(NumericError::NotOneDimensional(spec.dim_base()));
    }
    let base = spec.base_symbol(0);
    let params = spec.param_bindings();

    let mut raw_symbols = BTreeSet::new();
    for e in sys.equations() {
        raw_symbols.extend(e.free_symbols());
    }
    let equations: Vec<Expr> = sys
        .equations()
        .iter()
        .map(|e| e.substitute(&params))
        .collect();
    for e in &equations {
        for s in e.free_symbols() {
            if s.kind() == crate::expr::SymbolKind::Parameter {
                return Err(NumericError::UnboundParameter(s.name().to_string()));
            }
        }
    }

    let orders = variable_order(spec, &raw_symbols);
    let mut variables: Vec<Variable> = Vec::new();
    for vertical in [false, true] {
        for field in spec.fields() {
            let key = JetCoordinate::new(field, MultiIndex::empty(), vertical);
            if let Some(&order) = orders.get(&key) {
                if order == 0 {
                    return Err(NumericError::NotNormalForm {
                        equation: None,
                        reason: format!("`{}` appears without derivatives", spec.jet_name(&key)),
                    });
                }
                if order > MAX_ORDER {
                    return Err(NumericError::OrderTooHigh {
                        variable: spec.jet_name(&key),
                        order,
                    });
                }
                variables.push(Variable {
                    coordinate: key,
                    order,
                });
            }
        }
    }
    if variables.len() != equations.len() {
        return Err(NumericError::NotNormalForm {
            equation: None,
            reason: format!(
                "{} equations for {} unknown functions",
                equations.len(),
                variables.len()
            ),
        });
    }

    let top_of =
        |v: &Variable| spec.jet_symbol(&v.coordinate.with_index(MultiIndex::new(vec![0; v.order])));
    let tops: BTreeSet<Symbol> = variables.iter().map(top_of).collect();
    let mut solved: BTreeMap<Symbol, Expr> = BTreeMap::new();
    let mut pending: Vec<usize> = (0..equations.len()).collect();
    while !pending.is_empty() {
        let mut progress = false;
        let mut still = Vec::new();
        for &k in &pending {
            let e = equations[k].substitute(&solved);
            let present: Vec<Symbol> = e.free_symbols().intersection(&tops).cloned().collect();
            match present.as_slice() {
                [] => return Err(NumericError::Singular { equation: k }),
                [top] => {
                    let coefficient = e.diff(top);
                    if coefficient.is_zero() {
                        return Err(NumericError::Singular { equation: k });
                    }
                    if coefficient.free_symbols().iter().any(|s| tops.contains(s)) {
                        return Err(NumericError::NotNormalForm {
                            equation: Some(k),
                            reason: format!("not affine in `{top}`"),
                        });
                    }
                    let rest = e.substitute(&BTreeMap::from([(top.clone(), Expr::zero())]));
                    let rhs = (-rest / coefficient).normalize();
                    solved.insert(top.clone(), rhs);
                    progress = true;
                }
                _ => still.push(k),
            }
        }
        if !progress {
            return Err(NumericError::NotNormalForm {
                equation: still.first().copied(),
                reason: "coupled highest derivatives".to_string(),
            });
        }
        pending = still;
    }

    let mut state = Vec::new();
    let mut rhs = Vec::new();
    let mut vertical = Vec::new();
    for v in &variables {
        for j in 0..v.order {
            let coord = v.coordinate.with_index(MultiIndex::new(vec![0; j]));
            let next = v.coordinate.with_index(MultiIndex::new(vec![0; j + 1]));
            state.push(spec.jet_symbol(&coord));
            vertical.push(v.coordinate.vertical);
            if j + 1 == v.order {
                rhs.push(solved[&top_of(v)].clone());
            } else {
                rhs.push(spec.jet(&next));
            }
        }
    }
    let system = FirstOrderSystem::with_flags(base, state, rhs, vertical)?;
    Ok(NormalForm {
        system,
        variables,
        solved,
    })
}
