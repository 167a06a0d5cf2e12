//! The model file format.
//!
//! ```text
//! # comments run to the end of the line
//! base t
//! fibre y
//! param omega = 1
//! lagrangian 0.5*(y_t^2 - omega^2*y^2)
//! ```
//!
//! A file declares one model: a `lagrangian`, a `hamiltonian`, or one or
//! more `equation` lines read as `E = 0`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Pow, Zero};

use crate::expr::{Expr, Func};
use crate::jet::{BundleSpec, JetError, Parameter};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {}, column {}: {}",
            self.line, self.column, self.message
        )
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Declared {
    Lagrangian,
    Equations,
    Hamiltonian,
}

impl Declared {
    fn keyword(self) -> &'static str {
        match self {
            Declared::Lagrangian => "lagrangian",
            Declared::Equations => "equation",
            Declared::Hamiltonian => "hamiltonian",
        }
    }
}

/// A parsed file before order inference: the chart and the payload
/// expressions with the lines they came from.
#[derive(Clone, Debug)]
pub struct ModelFile {
    pub spec: BundleSpec,
    pub kind: Declared,
    pub payload: Vec<(usize, Expr)>,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Op(char),
    End,
}

/// One line of source, each character tagged with its 1-based column.
struct Lexer {
    chars: Vec<(usize, char)>,
    pos: usize,
    line: usize,
}

impl Lexer {
    fn new(src: &str, line: usize, first_column: usize) -> Self {
        Lexer {
            chars: src
                .chars()
                .enumerate()
                .map(|(k, c)| (first_column + k, c))
                .collect(),
            pos: 0,
            line,
        }
    }

    fn column(&self) -> usize {
        self.chars
            .get(self.pos)
            .map(|c| c.0)
            .unwrap_or_else(|| self.chars.last().map_or(1, |c| c.0 + 1))
    }

    fn tokens(mut self) -> Result<Vec<(usize, Tok)>, ParseError> {
        let mut out = Vec::new();
        while self.pos < self.chars.len() {
            let (col, c) = self.chars[self.pos];
            if c.is_whitespace() {
                self.pos += 1;
            } else if c.is_ascii_digit() || (c == '.' && self.peek_digit(1)) {
                out.push((col, Tok::Num(self.number()?)));
            } else if c.is_ascii_alphabetic() {
                let start = self.pos;
                while self.pos < self.chars.len()
                    && (self.chars[self.pos].1.is_ascii_alphanumeric()
                        || self.chars[self.pos].1 == '_')
                {
                    self.pos += 1;
                }
                out.push((
                    col,
                    Tok::Ident(self.chars[start..self.pos].iter().map(|c| c.1).collect()),
                ));
            } else if "+-*/^(),=".contains(c) {
                out.push((col, Tok::Op(c)));
                self.pos += 1;
            } else {
                return Err(ParseError::new(
                    self.line,
                    col,
                    format!("unexpected character `{c}`"),
                ));
            }
        }
        out.push((self.column(), Tok::End));
        Ok(out)
    }

    fn peek_digit(&self, ahead: usize) -> bool {
        self.chars
            .get(self.pos + ahead)
            .is_some_and(|c| c.1.is_ascii_digit())
    }

    fn digits(&mut self) -> String {
        let mut s = String::new();
        while let Some(&(_, c)) = self.chars.get(self.pos) {
            if !c.is_ascii_digit() {
                break;
            }
            s.push(c);
            self.pos += 1;
        }
        s
    }

    /// Decimal literals are read exactly: `0.1` is `1/10`.
    fn number(&mut self) -> Result<BigRational, ParseError> {
        let col = self.column();
        let whole = self.digits();
        let mut frac = String::new();
        if self.chars.get(self.pos).is_some_and(|c| c.1 == '.') {
            self.pos += 1;
            frac = self.digits();
        }
        let mut exponent: i64 = 0;
        if self
            .chars
            .get(self.pos)
            .is_some_and(|c| c.1 == 'e' || c.1 == 'E')
        {
            let save = self.pos;
            self.pos += 1;
            let negative = match self.chars.get(self.pos).map(|c| c.1) {
                Some('-') => {
                    self.pos += 1;
                    true
                }
                Some('+') => {
                    self.pos += 1;
                    false
                }
                _ => false,
            };
            let e = self.digits();
            if e.is_empty() {
                self.pos = save;
            } else {
                exponent = e
                    .parse::<i64>()
                    .ok()
                    .filter(|v| *v <= 4096)
                    .ok_or_else(|| {
                        ParseError::new(self.line, col, "exponent of numeric literal is too large")
                    })?;
                if negative {
                    exponent = -exponent;
                }
            }
        }
        let mantissa: BigInt = format!("{whole}{frac}")
            .parse()
            .unwrap_or_else(|_| BigInt::zero());
        let scale = exponent - frac.len() as i64;
        let ten = BigInt::from(10);
        let value = if scale >= 0 {
            BigRational::from_integer(mantissa * Pow::pow(&ten, scale as u64))
        } else {
            BigRational::new(mantissa, Pow::pow(&ten, (-scale) as u64))
        };
        Ok(value)
    }
}

struct Parser<'s> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    line: usize,
    spec: &'s BundleSpec,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn col(&self) -> usize {
        self.toks[self.pos].0
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError::new(self.line, self.col(), message)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, op: char) -> bool {
        if *self.peek() == Tok::Op(op) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::End => Ok(()),
            Tok::Op(')') => Err(self.error("unmatched `)`")),
            t => Err(self.error(format!("unexpected {}", describe(t)))),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc + self.term()?;
            } else if self.eat('-') {
                acc = acc - self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc * self.unary()?;
            } else if *self.peek() == Tok::Op('/') {
                let col = self.col();
                self.pos += 1;
                let d = self.unary()?;
                if d.normalize().is_zero() {
                    return Err(ParseError::new(self.line, col, "division by zero"));
                }
                acc = acc / d;
            } else {
                return Ok(acc);
            }
        }
    }

    /// Unary minus binds looser than `^`: `-y^2` is `-(y^2)`.
    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    /// Right-associative; exponents must reduce to rational constants.
    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Op('^') {
            return Ok(base);
        }
        self.pos += 1;
        let col = self.col();
        let exponent = self.unary()?.normalize();
        let Some(q) = exponent.as_num() else {
            return Err(ParseError::new(
                self.line,
                col,
                "exponent must be a rational constant",
            ));
        };
        if base.normalize().is_zero() && *q < BigRational::zero() {
            return Err(ParseError::new(self.line, col, "division by zero"));
        }
        Ok(base.pow(q.clone()))
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let col = self.col();
        match self.bump() {
            Tok::Num(q) => Ok(Expr::num(q)),
            Tok::Op('(') => {
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(e)
            }
            Tok::Ident(name) => {
                if *self.peek() == Tok::Op('(') {
                    let Some(f) = Func::from_name(&name) else {
                        return Err(ParseError::new(
                            self.line,
                            col,
                            format!("unknown function `{name}`"),
                        ));
                    };
                    self.pos += 1;
                    let arg = self.expr()?;
                    if !self.eat(')') {
                        return Err(self.error("expected `)`"));
                    }
                    return Ok(Expr::apply(f, arg));
                }
                self.spec.symbol(&name).map(Expr::sym).map_err(|_| {
                    ParseError::new(self.line, col, format!("unknown identifier `{name}`"))
                })
            }
            Tok::End => Err(ParseError::new(
                self.line,
                col,
                "unexpected end of expression",
            )),
            t => Err(ParseError::new(
                self.line,
                col,
                format!("unexpected {}", describe(&t)),
            )),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(_) => "number".to_string(),
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Op(c) => format!("`{c}`"),
        Tok::End => "end of line".to_string(),
    }
}

/// Parses `src` (line `line`, starting at column `column`) as an expression
/// over `spec`.
pub fn parse_expr_at(
    src: &str,
    spec: &BundleSpec,
    line: usize,
    column: usize,
) -> Result<Expr, ParseError> {
    let toks = Lexer::new(src, line, column).tokens()?;
    let mut p = Parser {
        toks,
        pos: 0,
        line,
        spec,
    };
    let e = p.expr()?;
    p.expect_end()?;
    Ok(e)
}

/// Parses a standalone expression.
pub fn parse_expr(src: &str, spec: &BundleSpec) -> Result<Expr, ParseError> {
    parse_expr_at(src, spec, 1, 1)
}

struct Line<'a> {
    number: usize,
    keyword: &'a str,
    keyword_col: usize,
    rest: &'a str,
    rest_col: usize,
}

fn split_lines(text: &str) -> Vec<Line<'_>> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let code = raw.split('#').next().unwrap_or("");
        let trimmed = code.trim_start();
        if trimmed.trim().is_empty() {
            continue;
        }
        let keyword_col = code[..code.len() - trimmed.len()].chars().count() + 1;
        let kw_len = trimmed.find(char::is_whitespace).unwrap_or(trimmed.len());
        let keyword = &trimmed[..kw_len];
        let rest = trimmed[kw_len..].trim_end();
        let rest_col = keyword_col + keyword.chars().count();
        out.push(Line {
            number: k + 1,
            keyword,
            keyword_col,
            rest,
            rest_col,
        });
    }
    out
}

/// Whitespace-separated names with their columns.
fn names(line: &Line<'_>) -> Vec<(usize, String)> {
    let mut out = Vec::new();
    let mut current = String::new();
    let mut start = line.rest_col;
    for (col, c) in (line.rest_col..).zip(line.rest.chars()) {
        if c.is_whitespace() {
            if !current.is_empty() {
                out.push((start, std::mem::take(&mut current)));
            }
        } else {
            if current.is_empty() {
                start = col;
            }
            current.push(c);
        }
    }
    if !current.is_empty() {
        out.push((start, current));
    }
    out
}

fn jet_error(line: usize, column: usize, e: JetError) -> ParseError {
    ParseError::new(line, column, e.to_string())
}

/// Parses a model file. Declarations (`base`, `fibre`, `param`) may come in
/// any order but must precede the model lines.
pub fn parse_model_file(text: &str) -> Result<ModelFile, ParseError> {
    let lines = split_lines(text);
    let mut base: Option<(usize, Vec<(usize, String)>)> = None;
    let mut fibre: Option<(usize, Vec<(usize, String)>)> = None;
    let mut params: Vec<(usize, usize, String, Option<BigRational>)> = Vec::new();
    let mut kind: Option<Declared> = None;
    let mut payload_lines: Vec<&Line<'_>> = Vec::new();

    for line in &lines {
        let n = line.number;
        match line.keyword {
            "base" | "fibre" => {
                if kind.is_some() {
                    return Err(ParseError::new(
                        n,
                        line.keyword_col,
                        format!("`{}` must precede the model", line.keyword),
                    ));
                }
                let slot = if line.keyword == "base" {
                    &mut base
                } else {
                    &mut fibre
                };
                if slot.is_some() {
                    return Err(ParseError::new(
                        n,
                        line.keyword_col,
                        format!("duplicate {} declaration", line.keyword),
                    ));
                }
                let list = names(line);
                if list.is_empty() {
                    return Err(ParseError::new(
                        n,
                        line.rest_col,
                        format!("`{}` needs at least one name", line.keyword),
                    ));
                }
                *slot = Some((n, list));
            }
            "param" => {
                if kind.is_some() {
                    return Err(ParseError::new(
                        n,
                        line.keyword_col,
                        "`param` must precede the model",
                    ));
                }
                let (name_part, value_part) = match line.rest.split_once('=') {
                    Some((a, b)) => (a, Some(b)),
                    None => (line.rest, None),
                };
                let name_line = Line {
                    rest: name_part,
                    ..*line
                };
                let list = names(&name_line);
                let [(col, name)] = list.as_slice() else {
                    return Err(ParseError::new(
                        n,
                        line.rest_col,
                        "expected `param <name> [= <number>]`",
                    ));
                };
                let value = match value_part {
                    None => None,
                    Some(v) => {
                        let value_col = line.rest_col + name_part.chars().count() + 1;
                        let constant =
                            BundleSpec::build(vec!["t".into()], vec!["y".into()], Vec::new())
                                .expect("fixed chart");
                        let e = parse_expr_at(v, &constant, n, value_col)?.normalize();
                        if !e.free_symbols().is_empty() {
                            return Err(ParseError::new(
                                n,
                                value_col,
                                "parameter value must be a number",
                            ));
                        }
                        match e.as_num() {
                            Some(q) => Some(q.clone()),
                            None => {
                                return Err(ParseError::new(
                                    n,
                                    value_col,
                                    "parameter value must be rational",
                                ))
                            }
                        }
                    }
                };
                params.push((n, *col, name.clone(), value));
            }
            "lagrangian" | "equation" | "hamiltonian" => {
                let this = match line.keyword {
                    "lagrangian" => Declared::Lagrangian,
                    "equation" => Declared::Equations,
                    _ => Declared::Hamiltonian,
                };
                match kind {
                    Some(k) if k != this => {
                        return Err(ParseError::new(
                            n,
                            line.keyword_col,
                            format!(
                                "multiple model kinds: `{}` after `{}`",
                                this.keyword(),
                                k.keyword()
                            ),
                        ))
                    }
                    Some(k) if k != Declared::Equations => {
                        return Err(ParseError::new(
                            n,
                            line.keyword_col,
                            format!("duplicate `{}`", k.keyword()),
                        ))
                    }
                    _ => kind = Some(this),
                }
                if line.rest.trim().is_empty() {
                    return Err(ParseError::new(n, line.rest_col, "missing expression"));
                }
                payload_lines.push(line);
            }
            other => {
                return Err(ParseError::new(
                    n,
                    line.keyword_col,
                    format!("unknown declaration `{other}`"),
                ));
            }
        }
    }

    let Some((base_line, base)) = base else {
        return Err(ParseError::new(1, 1, JetError::MissingBase.to_string()));
    };
    let Some((fibre_line, fibre)) = fibre else {
        return Err(ParseError::new(
            base_line,
            1,
            JetError::MissingFibre.to_string(),
        ));
    };
    let Some(kind) = kind else {
        return Err(ParseError::new(
            lines.last().map_or(1, |l| l.number),
            1,
            "missing model: expected `lagrangian`, `equation` or `hamiltonian`",
        ));
    };

    // Rebuild the chart one name at a time so a bad name is reported where
    // it was written.
    let mut declared: Vec<(usize, usize, String)> = Vec::new();
    declared.extend(base.iter().map(|(c, s)| (base_line, *c, s.clone())));
    declared.extend(fibre.iter().map(|(c, s)| (fibre_line, *c, s.clone())));
    declared.extend(params.iter().map(|(l, c, s, _)| (*l, *c, s.clone())));
    let base_names: Vec<String> = base.iter().map(|b| b.1.clone()).collect();
    let fibre_names: Vec<String> = fibre.iter().map(|f| f.1.clone()).collect();
    let param_list: Vec<Parameter> = params
        .iter()
        .map(|(_, _, name, value)| Parameter {
            name: name.clone(),
            value: value.clone(),
        })
        .collect();
    let spec = match BundleSpec::build(base_names.clone(), fibre_names.clone(), param_list) {
        Ok(spec) => spec,
        Err(e) => {
            let culprit = match &e {
                JetError::InvalidName(n) | JetError::Collision(n) | JetError::Duplicate(n) => {
                    Some(n.clone())
                }
                JetError::AmbiguousBase(_, b) => Some(b.clone()),
                _ => None,
            };
            let at = culprit.and_then(|name| {
                let hits: Vec<_> = declared.iter().filter(|d| d.2 == name).collect();
                hits.last().map(|d| (d.0, d.1))
            });
            let (l, c) = at.unwrap_or((base_line, 1));
            return Err(jet_error(l, c, e));
        }
    };
    let spec = if kind == Declared::Hamiltonian {
        spec.with_momenta()
    } else {
        spec
    };

    let mut payload = Vec::with_capacity(payload_lines.len());
    for line in payload_lines {
        let e = parse_expr_at(line.rest, &spec, line.number, line.rest_col)?;
        payload.push((line.number, e));
    }
    Ok(ModelFile {
        spec,
        kind,
        payload,
    })
}
