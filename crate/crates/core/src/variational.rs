//! Differential operators, deviation systems and Euler-Lagrange operators.
//!
//! The commutation checks compare two symbolic routes to the same system
//! and report each component pair with its [`Equivalence`] outcome; a failed
//! pair is data, not an error.

use std::fmt;

use thiserror::Error;

use crate::expr::{Equivalence, EquivalenceConfig, Expr};
use crate::jet::{self, BundleSpec, JetError, MultiIndex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VariationalError {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("`{symbol}` has jet order {found}, above the declared order {order}")]
    OrderExceeded {
        symbol: String,
        found: usize,
        order: usize,
    },
    #[error("`{0}` is a vertical coordinate; expected an expression on the original bundle")]
    UnexpectedVertical(String),
    #[error("an operator needs at least one component")]
    Empty,
}

fn check_expr(
    e: &Expr,
    spec: &BundleSpec,
    order: usize,
    allow_vertical: bool,
) -> Result<(), VariationalError> {
    spec.check_symbols(e)?;
    for s in e.free_symbols() {
        if let Some(c) = spec.jet_coordinate(&s) {
            if c.vertical && !allow_vertical {
                return Err(VariationalError::UnexpectedVertical(s.name().to_string()));
            }
            if c.order() > order {
                return Err(VariationalError::OrderExceeded {
                    symbol: s.name().to_string(),
                    found: c.order(),
                    order,
                });
            }
        }
    }
    Ok(())
}

/// An `r`-order operator with components `E^A`; its kernel is the
/// equation `E^A = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct DifferentialOperator {
    components: Vec<Expr>,
    order: usize,
    spec: BundleSpec,
}

impl DifferentialOperator {
    /// Components are normalized. Jet orders must not exceed `spec.order()`,
    /// and vertical symbols are only allowed on a vertical extension.
    pub fn new(components: Vec<Expr>, spec: BundleSpec) -> Result<Self, VariationalError> {
        if components.is_empty() {
            return Err(VariationalError::Empty);
        }
        let order = spec.order();
        let components: Vec<Expr> = components.iter().map(Expr::normalize).collect();
        for c in &components {
            check_expr(c, &spec, order, spec.is_vertical())?;
        }
        Ok(DifferentialOperator {
            components,
            order,
            spec,
        })
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn spec(&self) -> &BundleSpec {
        &self.spec
    }

    pub fn is_vertical(&self) -> bool {
        self.spec.is_vertical()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Structure {
    Plain,
    /// `2m` equations: the original block, then its vertical derivatives.
    DeviationPair,
}

/// Equations read as `equations[k] = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct EquationSystem {
    equations: Vec<Expr>,
    spec: BundleSpec,
    structure: Structure,
}

impl EquationSystem {
    pub fn new(equations: Vec<Expr>, spec: BundleSpec, structure: Structure) -> Self {
        EquationSystem {
            equations,
            spec,
            structure,
        }
    }

    pub fn equations(&self) -> &[Expr] {
        &self.equations
    }

    pub fn spec(&self) -> &BundleSpec {
        &self.spec
    }

    pub fn structure(&self) -> Structure {
        self.structure
    }

    /// The original block of a deviation pair, or every equation of a plain
    /// system.
    pub fn original_block(&self) -> &[Expr] {
        match self.structure {
            Structure::Plain => &self.equations,
            Structure::DeviationPair => &self.equations[..self.equations.len() / 2],
        }
    }

    pub fn vertical_block(&self) -> &[Expr] {
        match self.structure {
            Structure::Plain => &[],
            Structure::DeviationPair => &self.equations[self.equations.len() / 2..],
        }
    }

    /// Reads the system back as an operator on its own spec.
    pub fn to_operator(&self) -> Result<DifferentialOperator, VariationalError> {
        DifferentialOperator::new(self.equations.clone(), self.spec.clone())
    }
}

/// A `k`-order density `𝓛` on `J^k Y`.
#[derive(Clone, Debug, PartialEq)]
pub struct Lagrangian {
    density: Expr,
    order: usize,
    spec: BundleSpec,
}

impl Lagrangian {
    /// The order `k` is read off the density. `spec.order()` must leave room
    /// for the `2k`-order Euler-Lagrange operator; see [`Lagrangian::inferred`].
    pub fn new(density: Expr, spec: BundleSpec) -> Result<Self, VariationalError> {
        let density = density.normalize();
        let order = spec.max_jet_order(&density);
        check_expr(&density, &spec, spec.order(), spec.is_vertical())?;
        Ok(Lagrangian {
            density,
            order,
            spec,
        })
    }

    /// Like [`Lagrangian::new`], raising the chart order to `2k` if needed.
    pub fn inferred(density: Expr, spec: BundleSpec) -> Result<Self, VariationalError> {
        let k = spec.max_jet_order(&density);
        let order = spec.order().max(2 * k);
        Lagrangian::new(density, spec.with_order(order))
    }

    pub fn density(&self) -> &Expr {
        &self.density
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn spec(&self) -> &BundleSpec {
        &self.spec
    }
}

/// `V𝓛 = d_V 𝓛` on the vertical extension of the chart.
pub fn vertical_extension_density(lagrangian: &Lagrangian) -> Result<Lagrangian, VariationalError> {
    let spec = lagrangian.spec.vertical_extension()?;
    let density = jet::vertical_derivative(&lagrangian.density, &lagrangian.spec)?;
    Ok(Lagrangian {
        density,
        order: lagrangian.order,
        spec,
    })
}

/// `{E^A = 0} ∪ {d_V E^A = 0}` on the vertical tangent bundle.
pub fn deviation_system(op: &DifferentialOperator) -> Result<EquationSystem, VariationalError> {
    let spec = op.spec.vertical_extension()?;
    let mut equations = op.components.clone();
    for c in &op.components {
        equations.push(jet::vertical_derivative(c, &op.spec)?);
    }
    Ok(EquationSystem::new(
        equations,
        spec,
        Structure::DeviationPair,
    ))
}

/// `δ𝓛_i = ∂_i 𝓛 + Σ_{0<|Λ|≤k} (-1)^{|Λ|} d_Λ ∂^Λ_i 𝓛`, one component per
/// configuration coordinate (including `v^i` on a vertical extension).
pub fn euler_lagrange(lagrangian: &Lagrangian) -> Result<DifferentialOperator, VariationalError> {
    let spec = &lagrangian.spec;
    let k = lagrangian.order;
    let indices = MultiIndex::enumerate(spec.dim_base(), k);
    let mut components = Vec::new();
    for q in spec.configuration() {
        let mut terms = vec![lagrangian.density.diff(&spec.jet_symbol(&q))];
        for index in &indices {
            let partial = lagrangian
                .density
                .diff(&spec.jet_symbol(&q.with_index(index.clone())));
            if partial.is_zero() {
                continue;
            }
            let derived = jet::iterated_total_derivative(&partial, index, spec)?;
            if index.len() % 2 == 1 {
                terms.push(-derived);
            } else {
                terms.push(derived);
            }
        }
        components.push(Expr::sum(terms).normalize());
    }
    Ok(DifferentialOperator {
        components,
        order: 2 * k,
        spec: spec.clone(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairCheck {
    pub label: String,
    pub lhs: Expr,
    pub rhs: Expr,
    pub outcome: Equivalence,
}

/// Outcome of comparing two routes to the same system, pair by pair.
#[derive(Clone, Debug, PartialEq)]
pub struct CommutationReport {
    pub theorem: String,
    pub pairs: Vec<PairCheck>,
}

impl CommutationReport {
    pub fn passed(&self) -> bool {
        self.pairs.iter().all(|p| p.outcome.holds())
    }

    pub fn summary(&self) -> String {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        let n = self.pairs.len();
        let noun = if n == 1 { "pair" } else { "pairs" };
        format!("{}: {verdict} ({n} {noun})", self.theorem)
    }
}

impl fmt::Display for CommutationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.pairs {
            let mark = if p.outcome.holds() { "ok  " } else { "FAIL" };
            writeln!(f, "[{mark}] {}: {}", p.label, p.outcome)?;
            writeln!(f, "       lhs: {}", p.lhs)?;
            writeln!(f, "       rhs: {}", p.rhs)?;
        }
        write!(f, "{}", self.summary())
    }
}

pub(crate) fn pair(label: String, lhs: &Expr, rhs: &Expr, config: &EquivalenceConfig) -> PairCheck {
    PairCheck {
        label,
        outcome: lhs.equivalent(rhs, config),
        lhs: lhs.clone(),
        rhs: rhs.clone(),
    }
}

/// Checks that the Euler-Lagrange operator of `VL` is the vertical
/// extension of the Euler-Lagrange operator of `L`: the `v^i`-component of
/// `δ(VL)` matches `δL_i` and the `y^i`-component matches `d_V δL_i`.
pub fn check_el_vertical_commute(
    lagrangian: &Lagrangian,
    config: &EquivalenceConfig,
) -> Result<CommutationReport, VariationalError> {
    let vl = vertical_extension_density(lagrangian)?;
    let lhs = euler_lagrange(&vl)?;
    let rhs = deviation_system(&euler_lagrange(lagrangian)?)?;
    let m = lagrangian.spec.fibre().len();
    let config_coords = vl.spec.configuration();
    let name = |k: usize| vl.spec.jet_name(&config_coords[k]);
    let mut pairs = Vec::with_capacity(2 * m);
    for i in 0..m {
        pairs.push(pair(
            format!("δ(VL)[{}] = δL[{}]", name(m + i), name(i)),
            &lhs.components[m + i],
            &rhs.equations()[i],
            config,
        ));
        pairs.push(pair(
            format!("δ(VL)[{}] = d_V δL[{}]", name(i), name(i)),
            &lhs.components[i],
            &rhs.equations()[m + i],
            config,
        ));
    }
    Ok(CommutationReport {
        theorem: "δ(VL) = V(δL)".to_string(),
        pairs,
    })
}

/// Checks `d_V d_λ E = d_λ d_V E` for every component and base direction.
pub fn check_vertical_total_commute(
    op: &DifferentialOperator,
    config: &EquivalenceConfig,
) -> Result<CommutationReport, VariationalError> {
    if op.is_vertical() {
        return Err(JetError::VerticalTwice.into());
    }
    let spec = op.spec.clone().with_order(op.spec.order() + 1);
    let mut pairs = Vec::new();
    for (a, e) in op.components.iter().enumerate() {
        for (d, base) in spec.base().iter().enumerate() {
            let lhs = jet::vertical_derivative(&jet::total_derivative(e, d, &spec)?, &spec)?;
            let rhs = jet::total_derivative(&jet::vertical_derivative(e, &spec)?, d, &spec)?;
            pairs.push(pair(
                format!("d_V d_{base} E[{a}] = d_{base} d_V E[{a}]"),
                &lhs,
                &rhs,
                config,
            ));
        }
    }
    Ok(CommutationReport {
        theorem: "d_V d_λ = d_λ d_V".to_string(),
        pairs,
    })
}

/// Multiplies every vertical symbol of `e` by `factor`; used to test
/// degree-one homogeneity.
pub fn scale_vertical(e: &Expr, spec: &BundleSpec, factor: &Expr) -> Expr {
    let bindings = e
        .free_symbols()
        .into_iter()
        .filter(|s| spec.jet_coordinate(s).is_some_and(|c| c.vertical))
        .map(|s| {
            let scaled = Expr::sym(s.clone()) * factor.clone();
            (s, scaled)
        })
        .collect();
    e.substitute(&bindings)
}

/// True when `e` is homogeneous of degree one in the vertical symbols.
pub fn is_vertically_linear(e: &Expr, spec: &BundleSpec) -> bool {
    let k = Expr::int(3);
    scale_vertical(e, spec, &k).is_equivalent(&(e.clone() * k))
}
