//! Coordinate charts on jet manifolds of a fibre bundle and of its vertical
//! tangent bundle.
//!
//! Generated names follow a fixed scheme:
//!
//! | coordinate            | name        |
//! |-----------------------|-------------|
//! | jet `y^i_Λ`           | `y_tt`      |
//! | vertical `ẏ^i_Λ`      | `v_y_tt`    |
//! | momentum `p^t_y`      | `pt_y`      |
//! | momentum jet          | `pt_y_t`    |
//! | vertical momentum     | `vpt_y`     |
//!
//! Multi-index suffixes concatenate base names in declaration order. The
//! vertical partner of `y_t` and the jet of `v_y` are the same symbol,
//! `v_y_t`.

use std::collections::{BTreeMap, HashSet};

use num_rational::BigRational;

use super::{JetError, MultiIndex};
use crate::expr::{Expr, Symbol, SymbolKind};

/// A fibre coordinate of the total space: either `y^i` or a polymomentum
/// `p^λ_i` on the Legendre bundle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Field {
    Fibre(usize),
    Momentum { base: usize, fibre: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JetCoordinate {
    pub field: Field,
    pub index: MultiIndex,
    pub vertical: bool,
}

impl JetCoordinate {
    pub fn new(field: Field, index: MultiIndex, vertical: bool) -> Self {
        JetCoordinate {
            field,
            index,
            vertical,
        }
    }

    pub fn order(&self) -> usize {
        self.index.len()
    }

    pub fn prolonged(&self, direction: usize) -> JetCoordinate {
        JetCoordinate {
            index: self.index.with(direction),
            ..self.clone()
        }
    }

    pub fn vertical_partner(&self) -> JetCoordinate {
        JetCoordinate {
            vertical: !self.vertical,
            ..self.clone()
        }
    }

    pub fn with_index(&self, index: MultiIndex) -> JetCoordinate {
        JetCoordinate {
            index,
            ..self.clone()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Coordinate {
    Base(usize),
    Jet(JetCoordinate),
    Parameter(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Parameter {
    pub name: String,
    pub value: Option<BigRational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BundleSpec {
    base: Vec<String>,
    fibre: Vec<String>,
    params: Vec<Parameter>,
    order: usize,
    momenta: bool,
    vertical: bool,
}

pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric())
}

impl BundleSpec {
    pub fn new(base: &[&str], fibre: &[&str]) -> Result<Self, JetError> {
        BundleSpec::build(
            base.iter().map(|s| s.to_string()).collect(),
            fibre.iter().map(|s| s.to_string()).collect(),
            Vec::new(),
        )
    }

    /// Validates names: identifier syntax, uniqueness, and no clash with
    /// the generated-name scheme.
    pub fn build(
        base: Vec<String>,
        fibre: Vec<String>,
        params: Vec<Parameter>,
    ) -> Result<Self, JetError> {
        if base.is_empty() {
            return Err(JetError::MissingBase);
        }
        if fibre.is_empty() {
            return Err(JetError::MissingFibre);
        }
        let mut seen = HashSet::new();
        let user_names = base
            .iter()
            .chain(&fibre)
            .chain(params.iter().map(|p| &p.name));
        for name in user_names.clone() {
            if name.contains('_') && name.chars().all(|c| c == '_' || c.is_ascii_alphanumeric()) {
                return Err(JetError::Collision(name.clone()));
            }
            if !is_identifier(name) {
                return Err(JetError::InvalidName(name.clone()));
            }
            if !seen.insert(name.as_str()) {
                return Err(JetError::Duplicate(name.clone()));
            }
        }
        for name in user_names {
            let reserved = name == "v"
                || base
                    .iter()
                    .any(|b| *name == format!("p{b}") || *name == format!("vp{b}"));
            if reserved {
                return Err(JetError::Collision(name.clone()));
            }
        }
        for a in &base {
            for b in &base {
                if a != b && b.starts_with(a.as_str()) {
                    return Err(JetError::AmbiguousBase(a.clone(), b.clone()));
                }
            }
        }
        Ok(BundleSpec {
            base,
            fibre,
            params,
            order: 0,
            momenta: false,
            vertical: false,
        })
    }

    pub fn with_order(mut self, order: usize) -> Self {
        self.order = order;
        self
    }

    /// Adds polymomenta `p^λ_i` (coordinates of the Legendre bundle).
    pub fn with_momenta(mut self) -> Self {
        self.momenta = true;
        self
    }

    pub fn with_param(mut self, name: &str, value: Option<BigRational>) -> Result<Self, JetError> {
        let mut params = self.params.clone();
        params.push(Parameter {
            name: name.to_string(),
            value,
        });
        let rebuilt = BundleSpec::build(self.base.clone(), self.fibre.clone(), params)?;
        self.params = rebuilt.params;
        Ok(self)
    }

    /// The doubled space: vertical partners join the fibre coordinates.
    pub fn vertical_extension(&self) -> Result<Self, JetError> {
        if self.vertical {
            return Err(JetError::VerticalTwice);
        }
        Ok(BundleSpec {
            vertical: true,
            ..self.clone()
        })
    }

    pub fn base(&self) -> &[String] {
        &self.base
    }

    pub fn fibre(&self) -> &[String] {
        &self.fibre
    }

    pub fn params(&self) -> &[Parameter] {
        &self.params
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn has_momenta(&self) -> bool {
        self.momenta
    }

    pub fn is_vertical(&self) -> bool {
        self.vertical
    }

    pub fn dim_base(&self) -> usize {
        self.base.len()
    }

    /// Fibre coordinates, then momenta (fibre-major), of the underlying space.
    pub fn fields(&self) -> Vec<Field> {
        let mut out: Vec<Field> = (0..self.fibre.len()).map(Field::Fibre).collect();
        if self.momenta {
            for fibre in 0..self.fibre.len() {
                for base in 0..self.base.len() {
                    out.push(Field::Momentum { base, fibre });
                }
            }
        }
        out
    }

    /// The configuration coordinates varied by the Euler-Lagrange operator:
    /// `y^i`, followed by `v^i` on a vertical extension.
    pub fn configuration(&self) -> Vec<JetCoordinate> {
        let mut out: Vec<JetCoordinate> = (0..self.fibre.len())
            .map(|i| JetCoordinate::new(Field::Fibre(i), MultiIndex::empty(), false))
            .collect();
        if self.vertical {
            let partners: Vec<JetCoordinate> =
                out.iter().map(JetCoordinate::vertical_partner).collect();
            out.extend(partners);
        }
        out
    }

    fn field_name(&self, field: Field) -> String {
        match field {
            Field::Fibre(i) => self.fibre[i].clone(),
            Field::Momentum { base, fibre } => {
                format!("p{}_{}", self.base[base], self.fibre[fibre])
            }
        }
    }

    pub fn jet_name(&self, coord: &JetCoordinate) -> String {
        let mut name = self.field_name(coord.field);
        if coord.vertical {
            name = match coord.field {
                Field::Fibre(_) => format!("v_{name}"),
                Field::Momentum { .. } => format!("v{name}"),
            };
        }
        if !coord.index.is_empty() {
            name.push('_');
            for &d in coord.index.entries() {
                name.push_str(&self.base[d]);
            }
        }
        name
    }

    pub fn jet_symbol(&self, coord: &JetCoordinate) -> Symbol {
        let kind = match (coord.field, coord.vertical) {
            (Field::Fibre(_), true) => SymbolKind::Vertical,
            (Field::Momentum { .. }, true) => SymbolKind::VerticalMomentum,
            (Field::Momentum { .. }, false) => SymbolKind::Momentum,
            (Field::Fibre(_), false) if coord.index.is_empty() => SymbolKind::Fibre,
            (Field::Fibre(_), false) => SymbolKind::Jet,
        };
        Symbol::new(self.jet_name(coord), kind)
    }

    pub fn jet(&self, coord: &JetCoordinate) -> Expr {
        Expr::sym(self.jet_symbol(coord))
    }

    pub fn base_symbol(&self, direction: usize) -> Symbol {
        Symbol::new(self.base[direction].as_str(), SymbolKind::Base)
    }

    pub fn param_symbol(&self, index: usize) -> Symbol {
        Symbol::new(self.params[index].name.as_str(), SymbolKind::Parameter)
    }

    fn parse_suffix(&self, suffix: &str) -> Option<MultiIndex> {
        let mut rest = suffix;
        let mut entries = Vec::new();
        while !rest.is_empty() {
            let (d, name) = self
                .base
                .iter()
                .enumerate()
                .find(|(_, b)| rest.starts_with(b.as_str()))?;
            entries.push(d);
            rest = &rest[name.len()..];
        }
        Some(MultiIndex::new(entries))
    }

    fn fibre_index(&self, name: &str) -> Option<usize> {
        self.fibre.iter().position(|f| f == name)
    }

    fn momentum_base(&self, head: &str) -> Option<usize> {
        let rest = head.strip_prefix('p')?;
        self.base.iter().position(|b| b == rest)
    }

    /// Structural lookup of a name; jet orders are not bounded here.
    pub fn resolve(&self, name: &str) -> Option<Coordinate> {
        if let Some(d) = self.base.iter().position(|b| b == name) {
            return Some(Coordinate::Base(d));
        }
        if let Some(p) = self.params.iter().position(|p| p.name == name) {
            return Some(Coordinate::Parameter(p));
        }
        let parts: Vec<&str> = name.split('_').collect();
        if parts.iter().any(|p| p.is_empty()) {
            return None;
        }
        let jet = |field: Field, vertical: bool, suffix: Option<&&str>| -> Option<Coordinate> {
            let index = match suffix {
                Some(s) => self.parse_suffix(s)?,
                None => MultiIndex::empty(),
            };
            Some(Coordinate::Jet(JetCoordinate::new(field, index, vertical)))
        };
        let momentum = |head: &str, f: &str, suffix: Option<&&str>| -> Option<Coordinate> {
            if !self.momenta {
                return None;
            }
            let fibre = self.fibre_index(f)?;
            if let Some(base) = self.momentum_base(head) {
                return jet(Field::Momentum { base, fibre }, false, suffix);
            }
            let base = self.momentum_base(head.strip_prefix('v')?)?;
            jet(Field::Momentum { base, fibre }, true, suffix)
        };
        match parts.as_slice() {
            [f] => jet(Field::Fibre(self.fibre_index(f)?), false, None),
            ["v", f, rest @ ..] if rest.len() <= 1 => {
                jet(Field::Fibre(self.fibre_index(f)?), true, rest.first())
            }
            [head, f] => momentum(head, f, None)
                .or_else(|| jet(Field::Fibre(self.fibre_index(head)?), false, Some(f))),
            [head, f, suffix] => momentum(head, f, Some(suffix)),
            _ => None,
        }
    }

    pub fn coordinate(&self, symbol: &Symbol) -> Option<Coordinate> {
        self.resolve(symbol.name())
    }

    pub fn jet_coordinate(&self, symbol: &Symbol) -> Option<JetCoordinate> {
        match self.resolve(symbol.name())? {
            Coordinate::Jet(c) => Some(c),
            _ => None,
        }
    }

    /// The canonical symbol for `name` (mixed jets are reordered, so
    /// `y_tx` and `y_xt` give the same symbol).
    pub fn symbol(&self, name: &str) -> Result<Symbol, JetError> {
        match self.resolve(name) {
            Some(Coordinate::Base(d)) => Ok(self.base_symbol(d)),
            Some(Coordinate::Parameter(p)) => Ok(self.param_symbol(p)),
            Some(Coordinate::Jet(c)) => Ok(self.jet_symbol(&c)),
            None => Err(JetError::UnknownSymbol(name.to_string())),
        }
    }

    /// Partial derivative with respect to a named coordinate of this chart.
    pub fn diff(&self, e: &Expr, name: &str) -> Result<Expr, JetError> {
        Ok(e.diff(&self.symbol(name)?))
    }

    /// Values of numerically bound parameters.
    pub fn param_bindings(&self) -> BTreeMap<Symbol, Expr> {
        self.params
            .iter()
            .enumerate()
            .filter_map(|(k, p)| {
                p.value
                    .clone()
                    .map(|v| (self.param_symbol(k), Expr::num(v)))
            })
            .collect()
    }

    /// Highest jet order among the jet symbols of `e`.
    pub fn max_jet_order(&self, e: &Expr) -> usize {
        e.free_symbols()
            .iter()
            .filter_map(|s| self.jet_coordinate(s))
            .map(|c| c.order())
            .max()
            .unwrap_or(0)
    }

    pub fn has_vertical_symbols(&self, e: &Expr) -> bool {
        e.free_symbols()
            .iter()
            .any(|s| self.jet_coordinate(s).is_some_and(|c| c.vertical))
    }

    /// Errors on a symbol that does not belong to this chart.
    pub fn check_symbols(&self, e: &Expr) -> Result<(), JetError> {
        for s in e.free_symbols() {
            if self.resolve(s.name()).is_none() {
                return Err(JetError::UnknownSymbol(s.name().to_string()));
            }
        }
        Ok(())
    }
}
