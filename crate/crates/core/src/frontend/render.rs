//! Text, LaTeX and JSON renderings of expressions, systems and models.
//!
//! LaTeX conventions: vertical coordinates carry an overdot (`v_y` is
//! `\dot{y}`), jet multi-indices are subscripts (`v_y_tt` is
//! `\dot{y}_{tt}`), and momenta `pt_y` are `p^{t}_{y}`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde_json::{json, Value};

use crate::expr::{split_sign, Expr, Func, Node};
use crate::jet::{BundleSpec, Coordinate, Field};
use crate::variational::{EquationSystem, Structure};

use super::{Model, ModelKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Latex,
    Json,
}

const GREEK: [&str; 24] = [
    "alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta", "iota", "kappa",
    "lambda", "mu", "nu", "xi", "pi", "rho", "sigma", "tau", "upsilon", "phi", "chi", "psi",
    "omega", "varphi",
];

const GREEK_UPPER: [&str; 11] = [
    "Gamma", "Delta", "Theta", "Lambda", "Xi", "Pi", "Sigma", "Upsilon", "Phi", "Psi", "Omega",
];

fn latex_name(name: &str) -> String {
    if GREEK.contains(&name) || GREEK_UPPER.contains(&name) {
        format!("\\{name}")
    } else if name.chars().count() == 1 {
        name.to_string()
    } else {
        format!("\\mathrm{{{name}}}")
    }
}

fn latex_symbol(name: &str, spec: &BundleSpec) -> String {
    let Some(Coordinate::Jet(c)) = spec.resolve(name) else {
        return latex_name(name);
    };
    let directions: Vec<String> = c
        .index
        .entries()
        .iter()
        .map(|&d| latex_name(&spec.base()[d]))
        .collect();
    let joiner = if spec.base().iter().all(|b| b.chars().count() == 1) {
        ""
    } else {
        ","
    };
    let suffix = directions.join(joiner);
    let (head, lower) = match c.field {
        Field::Fibre(i) => (latex_name(&spec.fibre()[i]), None),
        Field::Momentum { base, fibre } => (
            format!("p^{{{}}}", latex_name(&spec.base()[base])),
            Some(latex_name(&spec.fibre()[fibre])),
        ),
    };
    let head = match (c.vertical, lower.is_some()) {
        (false, _) => head,
        (true, false) => format!("\\dot{{{head}}}"),
        (true, true) => format!("\\dot{{p}}{}", &head[1..]),
    };
    match (lower, suffix.is_empty()) {
        (None, true) => head,
        (None, false) => format!("{head}_{{{suffix}}}"),
        (Some(f), true) => format!("{head}_{{{f}}}"),
        (Some(f), false) => format!("{head}_{{{f};{suffix}}}"),
    }
}

fn latex_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else if q.is_negative() {
        format!("-\\frac{{{}}}{{{}}}", -q.numer(), q.denom())
    } else {
        format!("\\frac{{{}}}{{{}}}", q.numer(), q.denom())
    }
}

fn func_latex(f: Func, arg: &str) -> String {
    match f {
        Func::Sqrt => format!("\\sqrt{{{arg}}}"),
        _ => format!("\\{}\\left({arg}\\right)", f.name()),
    }
}

fn needs_parens_as_base(e: &Expr) -> bool {
    match e.node() {
        Node::Sym(_) => false,
        Node::Num(q) => !(q.is_integer() && !q.is_negative()),
        _ => true,
    }
}

fn latex_power(base: &Expr, q: &BigRational, spec: &BundleSpec) -> String {
    let half = BigRational::new(1.into(), 2.into());
    if *q == half {
        return format!("\\sqrt{{{}}}", latex_expr(base, spec));
    }
    let b = latex_expr(base, spec);
    let b = if needs_parens_as_base(base) {
        format!("\\left({b}\\right)")
    } else {
        b
    };
    let exponent = if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    };
    format!("{b}^{{{exponent}}}")
}

fn latex_product(factors: &[Expr], spec: &BundleSpec) -> String {
    let mut coefficient = BigRational::one();
    let mut num: Vec<String> = Vec::new();
    let mut den: Vec<String> = Vec::new();
    for f in factors {
        match f.node() {
            Node::Num(q) => coefficient *= q,
            Node::Pow(b, q) if q.is_negative() => {
                let flipped = -q;
                if flipped.is_one() {
                    den.push(latex_expr(b, spec));
                } else {
                    den.push(latex_power(b, &flipped, spec));
                }
            }
            _ => num.push(latex_factor(f, spec)),
        }
    }
    let sign = if coefficient.is_negative() { "-" } else { "" };
    let c = coefficient.abs();
    let top_c = c.numer().clone();
    let bottom_c = c.denom().clone();
    let one = BigInt::one();
    if top_c != one || num.is_empty() {
        num.insert(0, top_c.to_string());
    }
    if bottom_c != one {
        den.insert(0, bottom_c.to_string());
    }
    let top = num.join(" ");
    if den.is_empty() {
        format!("{sign}{top}")
    } else {
        format!("{sign}\\frac{{{top}}}{{{}}}", den.join(" "))
    }
}

fn latex_factor(e: &Expr, spec: &BundleSpec) -> String {
    match e.node() {
        Node::Add(_) => format!("\\left({}\\right)", latex_expr(e, spec)),
        _ => latex_expr(e, spec),
    }
}

/// LaTeX for `e`, resolving jet names against `spec`.
pub fn latex_expr(e: &Expr, spec: &BundleSpec) -> String {
    match e.node() {
        Node::Num(q) => latex_rational(q),
        Node::Sym(s) => latex_symbol(s.name(), spec),
        Node::Add(terms) => {
            let mut out = String::new();
            for (k, t) in terms.iter().enumerate() {
                let (negative, magnitude) = split_sign(t);
                match (k, negative) {
                    (0, true) => out.push('-'),
                    (0, false) => {}
                    (_, true) => out.push_str(" - "),
                    (_, false) => out.push_str(" + "),
                }
                out.push_str(&latex_factor(&magnitude, spec));
            }
            out
        }
        Node::Mul(factors) => latex_product(factors, spec),
        Node::Pow(_, q) if q.is_negative() => latex_product(std::slice::from_ref(e), spec),
        Node::Pow(b, q) => latex_power(b, q, spec),
        Node::Func(f, arg) => func_latex(*f, &latex_expr(arg, spec)),
    }
}

fn json_integer(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(v) => json!(v),
        None => json!(n.to_string()),
    }
}

fn json_rational(q: &BigRational) -> Value {
    if q.is_integer() {
        json_integer(q.numer())
    } else {
        json!(["/", json_integer(q.numer()), json_integer(q.denom())])
    }
}

/// Prefix-form nested arrays: `2*y` is `["*", 2, "y"]`.
pub fn json_expr(e: &Expr) -> Value {
    match e.node() {
        Node::Num(q) => json_rational(q),
        Node::Sym(s) => json!(s.name()),
        Node::Add(terms) => {
            let mut items = vec![json!("+")];
            items.extend(terms.iter().map(json_expr));
            Value::Array(items)
        }
        Node::Mul(factors) => {
            let mut items = vec![json!("*")];
            items.extend(factors.iter().map(json_expr));
            Value::Array(items)
        }
        Node::Pow(b, q) => json!(["^", json_expr(b), json_rational(q)]),
        Node::Func(f, arg) => json!([f.name(), json_expr(arg)]),
    }
}

pub fn json_spec(spec: &BundleSpec) -> Value {
    let params: serde_json::Map<String, Value> = spec
        .params()
        .iter()
        .map(|p| {
            (
                p.name.clone(),
                p.value.as_ref().map_or(Value::Null, json_rational),
            )
        })
        .collect();
    json!({
        "base": spec.base(),
        "fibre": spec.fibre(),
        "params": params,
        "order": spec.order(),
        "momenta": spec.has_momenta(),
        "vertical": spec.is_vertical(),
    })
}

pub fn render_expr(e: &Expr, spec: &BundleSpec, format: Format) -> String {
    match format {
        Format::Text => e.to_string(),
        Format::Latex => latex_expr(e, spec),
        Format::Json => json_expr(e).to_string(),
    }
}

/// One equation `E = 0` per line (text), one display per equation (LaTeX),
/// or `{"equations": [...], "spec": {...}}`.
pub fn render_system(sys: &EquationSystem, format: Format) -> String {
    let spec = sys.spec();
    match format {
        Format::Text => sys
            .equations()
            .iter()
            .map(|e| format!("{e} = 0\n"))
            .collect(),
        Format::Latex => sys
            .equations()
            .iter()
            .map(|e| format!("\\[ {} = 0 \\]\n", latex_expr(e, spec)))
            .collect(),
        Format::Json => {
            let mut doc = json!({
                "equations": sys.equations().iter().map(json_expr).collect::<Vec<_>>(),
                "spec": json_spec(spec),
            });
            if sys.structure() == Structure::DeviationPair {
                doc["blocks"] = json!({
                    "original": sys.original_block().len(),
                    "vertical": sys.vertical_block().len(),
                });
            }
            format!("{doc}\n")
        }
    }
}

fn text_declarations(spec: &BundleSpec) -> String {
    let mut out = format!(
        "base {}\nfibre {}\n",
        spec.base().join(" "),
        spec.fibre().join(" ")
    );
    for p in spec.params() {
        match &p.value {
            Some(v) => out.push_str(&format!("param {} = {}\n", p.name, v)),
            None => out.push_str(&format!("param {}\n", p.name)),
        }
    }
    out
}

/// The model as a file (text), its density or equations (LaTeX), or a
/// JSON object tagged with its kind.
pub fn render_model(model: &Model, format: Format) -> String {
    let spec = model.spec();
    let (kind, exprs): (&str, Vec<&Expr>) = match model.kind() {
        ModelKind::Lagrangian(l) => ("lagrangian", vec![l.density()]),
        ModelKind::Equations(op) => ("equation", op.components().iter().collect()),
        ModelKind::Hamiltonian(h) => ("hamiltonian", vec![h.density()]),
    };
    match format {
        Format::Text => {
            let mut out = text_declarations(spec);
            for e in exprs {
                out.push_str(&format!("{kind} {e}\n"));
            }
            out
        }
        Format::Latex => {
            let lhs = match kind {
                "lagrangian" => Some("\\mathcal{L}"),
                "hamiltonian" => Some("\\mathcal{H}"),
                _ => None,
            };
            exprs
                .iter()
                .map(|e| match lhs {
                    Some(l) => format!("\\[ {l} = {} \\]\n", latex_expr(e, spec)),
                    None => format!("\\[ {} = 0 \\]\n", latex_expr(e, spec)),
                })
                .collect()
        }
        Format::Json => {
            let key = if kind == "equation" {
                "equations"
            } else {
                "density"
            };
            let payload = if kind == "equation" {
                Value::Array(exprs.iter().map(|e| json_expr(e)).collect())
            } else {
                json_expr(exprs[0])
            };
            let mut doc = json!({ "kind": kind, "spec": json_spec(spec) });
            doc[key] = payload;
            format!("{doc}\n")
        }
    }
}
