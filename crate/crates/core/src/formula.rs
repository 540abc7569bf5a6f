//! Formula language.
//!
//! ```text
//! formula := or
//! or      := and ( '|' and )*
//! and     := unary ( '&' unary )*
//! unary   := '!' unary | primary
//! primary := IDENT | GATE '(' or ')' | '(' or ')'
//! ```
//!
//! `GATE` is one of the single-qubit gate names (`h`, `sqrtnot`, `not`, `id`)
//! and only counts as a gate when directly followed by `(`.
//!
//! A formula file starts with an optional `atoms` ... `end` preamble that
//! binds each atom to a state:
//!
//! ```text
//! atoms
//!   a = (0.7071067811865476, 0, 0.7071067811865476, 0)   # c0_re, c0_im, c1_re, c1_im
//!   b = circuit prep.qc                                   # output state of a circuit file
//!   c = |+>                                               # |0>, |1>, |+> or |->
//! end
//! a & (b | !c)
//! ```

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};

use crate::channels::GateKind;
use crate::error::{Error, ParseErrorKind, Result};
use crate::linalg::c;
use crate::state::{DensityOperator, QuRegister};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FormulaAst {
    Atom(String),
    Not(Box<FormulaAst>),
    And(Box<FormulaAst>, Box<FormulaAst>),
    Or(Box<FormulaAst>, Box<FormulaAst>),
    /// A single-qubit gate applied to the truth qubit of its argument.
    /// No truth-functional law is attached to it.
    Gate(GateKind, Box<FormulaAst>),
}

impl FormulaAst {
    pub fn atom(name: &str) -> Self {
        FormulaAst::Atom(name.to_string())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(inner: Self) -> Self {
        FormulaAst::Not(Box::new(inner))
    }

    pub fn and(l: Self, r: Self) -> Self {
        FormulaAst::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Self, r: Self) -> Self {
        FormulaAst::Or(Box::new(l), Box::new(r))
    }

    /// Distinct atom names in order of first appearance.
    pub fn atoms(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            FormulaAst::Atom(name) => {
                if !out.contains(&name.as_str()) {
                    out.push(name);
                }
            }
            FormulaAst::Not(x) | FormulaAst::Gate(_, x) => x.collect_atoms(out),
            FormulaAst::And(l, r) | FormulaAst::Or(l, r) => {
                l.collect_atoms(out);
                r.collect_atoms(out);
            }
        }
    }

    /// Qubit count of the denoted state when every atom is bound to a single qubit.
    pub fn width(&self) -> usize {
        match self {
            FormulaAst::Atom(_) => 1,
            FormulaAst::Not(x) | FormulaAst::Gate(_, x) => x.width(),
            FormulaAst::And(l, r) | FormulaAst::Or(l, r) => l.width() + r.width() + 1,
        }
    }
}

impl fmt::Display for FormulaAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormulaAst::Atom(name) => f.write_str(name),
            FormulaAst::Not(x) => write!(f, "!{x}"),
            FormulaAst::Gate(kind, x) => write!(f, "{}({x})", kind.dsl_name()),
            FormulaAst::And(l, r) => write!(f, "({l} & {r})"),
            FormulaAst::Or(l, r) => write!(f, "({l} | {r})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Bang,
    Amp,
    Pipe,
    LParen,
    RParen,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(lines: &[(usize, &str)]) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    for &(line, text) in lines {
        let text = strip_comment(text);
        let chars: Vec<(usize, char)> = text.char_indices().collect();
        let mut i = 0;
        while i < chars.len() {
            let (_, ch) = chars[i];
            let column = i + 1;
            let simple = match ch {
                '!' => Some(Tok::Bang),
                '&' => Some(Tok::Amp),
                '|' => Some(Tok::Pipe),
                '(' => Some(Tok::LParen),
                ')' => Some(Tok::RParen),
                _ => None,
            };
            if let Some(tok) = simple {
                out.push(Spanned { tok, line, column });
                i += 1;
            } else if ch.is_whitespace() {
                i += 1;
            } else if ch.is_alphabetic() || ch == '_' {
                let start = i;
                while i < chars.len() && (chars[i].1.is_alphanumeric() || chars[i].1 == '_') {
                    i += 1;
                }
                let name: String = chars[start..i].iter().map(|&(_, c)| c).collect();
                out.push(Spanned {
                    tok: Tok::Ident(name),
                    line,
                    column,
                });
            } else {
                return Err(Error::parse(line, column, format!("unexpected character `{ch}`")));
            }
        }
    }
    Ok(out)
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("")
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map(|s| (s.line, s.column))
            .unwrap_or(self.end)
    }

    fn error(&self, message: impl Into<String>) -> Error {
        let (line, column) = self.here();
        Error::parse(line, column, message)
    }

    fn or(&mut self) -> Result<FormulaAst> {
        let mut lhs = self.and()?;
        while self.peek() == Some(&Tok::Pipe) {
            self.pos += 1;
            lhs = FormulaAst::or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<FormulaAst> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Tok::Amp) {
            self.pos += 1;
            lhs = FormulaAst::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<FormulaAst> {
        if self.peek() == Some(&Tok::Bang) {
            self.pos += 1;
            return Ok(FormulaAst::not(self.unary()?));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<FormulaAst> {
        match self.peek().cloned() {
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if self.peek() == Some(&Tok::LParen) {
                    let kind = match GateKind::from_dsl_name(&name) {
                        Some(kind) if kind.arity() == 1 => kind,
                        _ => {
                            self.pos -= 1;
                            return Err(self.error(format!("`{name}` is not a single-qubit gate")));
                        }
                    };
                    self.pos += 1;
                    let inner = self.or()?;
                    self.expect_rparen()?;
                    return Ok(FormulaAst::Gate(kind, Box::new(inner)));
                }
                Ok(FormulaAst::Atom(name))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.or()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Some(tok) => Err(self.error(format!("unexpected {}", describe(&tok)))),
            None => Err(self.error("unexpected end of formula")),
        }
    }

    fn expect_rparen(&mut self) -> Result<()> {
        if self.peek() == Some(&Tok::RParen) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error("expected `)`"))
        }
    }
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Bang => "`!`".into(),
        Tok::Amp => "`&`".into(),
        Tok::Pipe => "`|`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
    }
}

fn parse_lines(lines: &[(usize, &str)]) -> Result<FormulaAst> {
    let toks = lex(lines)?;
    let end = lines
        .last()
        .map(|&(l, t)| (l, strip_comment(t).chars().count() + 1))
        .unwrap_or((1, 1));
    let mut p = Parser { toks, pos: 0, end };
    let ast = p.or()?;
    if p.pos != p.toks.len() {
        let tok = p.toks[p.pos].tok.clone();
        return Err(p.error(format!("unexpected {} after formula", describe(&tok))));
    }
    Ok(ast)
}

/// Parses formula text (precedence `!` > `&` > `|`, binary operators left-associative).
pub fn parse_formula(text: &str) -> Result<FormulaAst> {
    let lines: Vec<(usize, &str)> = text.lines().enumerate().map(|(i, l)| (i + 1, l)).collect();
    parse_lines(&lines)
}

/// Where an atom's state comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum AtomSource {
    /// `c0|0> + c1|1>`
    Qubit { c0: (f64, f64), c1: (f64, f64) },
    /// Output state of a circuit file, path relative to the formula file.
    Circuit(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AtomBinding {
    pub name: String,
    pub source: AtomSource,
    pub line: usize,
}

/// A formula together with its atom bindings.
#[derive(Debug, Clone, PartialEq)]
pub struct FormulaFile {
    pub bindings: Vec<AtomBinding>,
    pub formula: FormulaAst,
}

impl FormulaFile {
    pub fn parse(text: &str) -> Result<Self> {
        let lines: Vec<(usize, &str)> = text.lines().enumerate().map(|(i, l)| (i + 1, l)).collect();
        let mut idx = 0;
        while idx < lines.len() && strip_comment(lines[idx].1).trim().is_empty() {
            idx += 1;
        }
        let mut bindings: Vec<AtomBinding> = Vec::new();
        if idx < lines.len() && strip_comment(lines[idx].1).trim() == "atoms" {
            idx += 1;
            let mut closed = false;
            while idx < lines.len() {
                let (line, raw) = lines[idx];
                idx += 1;
                let body = strip_comment(raw).trim();
                if body.is_empty() {
                    continue;
                }
                if body == "end" {
                    closed = true;
                    break;
                }
                let binding = parse_binding(line, raw)?;
                if bindings.iter().any(|b| b.name == binding.name) {
                    return Err(Error::parse(line, column_of(raw, &binding.name), format!("atom `{}` bound twice", binding.name)));
                }
                bindings.push(binding);
            }
            if !closed {
                let last = lines.last().map(|l| l.0).unwrap_or(1);
                return Err(Error::parse(last, 1, "`atoms` block is missing `end`"));
            }
        }
        let formula = parse_lines(&lines[idx..])?;
        Ok(Self { bindings, formula })
    }

    /// Resolves every binding to a density operator. `load_circuit` receives
    /// the path exactly as written in the file.
    pub fn bind<F>(&self, mut load_circuit: F) -> Result<HashMap<String, DensityOperator>>
    where
        F: FnMut(&Path) -> Result<DensityOperator>,
    {
        let mut out = HashMap::new();
        for b in &self.bindings {
            let rho = match &b.source {
                AtomSource::Qubit { c0, c1 } => {
                    QuRegister::qubit(c(c0.0, c0.1), c(c1.0, c1.1))?.to_density()
                }
                AtomSource::Circuit(path) => load_circuit(path)?,
            };
            out.insert(b.name.clone(), rho);
        }
        Ok(out)
    }
}

fn column_of(raw: &str, needle: &str) -> usize {
    raw.find(needle).map(|b| raw[..b].chars().count() + 1).unwrap_or(1)
}

fn parse_binding(line: usize, raw: &str) -> Result<AtomBinding> {
    let body = strip_comment(raw);
    let (lhs, rhs) = body
        .split_once('=')
        .ok_or_else(|| Error::parse(line, 1, "expected `<atom> = <state>`"))?;
    let name = lhs.trim();
    let valid = name
        .chars()
        .next()
        .is_some_and(|ch| ch.is_alphabetic() || ch == '_')
        && name.chars().all(|ch| ch.is_alphanumeric() || ch == '_');
    if !valid {
        return Err(Error::parse(line, column_of(raw, lhs.trim_start()).max(1), format!("invalid atom name `{name}`")));
    }
    let rhs_col = lhs.chars().count() + 2 + (rhs.len() - rhs.trim_start().len());
    let rhs = rhs.trim();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let source = match rhs {
        "|0>" => AtomSource::Qubit { c0: (1.0, 0.0), c1: (0.0, 0.0) },
        "|1>" => AtomSource::Qubit { c0: (0.0, 0.0), c1: (1.0, 0.0) },
        "|+>" => AtomSource::Qubit { c0: (s, 0.0), c1: (s, 0.0) },
        "|->" => AtomSource::Qubit { c0: (s, 0.0), c1: (-s, 0.0) },
        _ if rhs.starts_with("circuit") => {
            let path = rhs["circuit".len()..].trim();
            if path.is_empty() {
                return Err(Error::parse(line, rhs_col, "missing circuit path"));
            }
            AtomSource::Circuit(PathBuf::from(path))
        }
        _ if rhs.starts_with('(') && rhs.ends_with(')') => {
            let nums: Vec<&str> = rhs[1..rhs.len() - 1].split(',').map(str::trim).collect();
            if nums.len() != 4 {
                return Err(Error::parse(line, rhs_col, "expected (c0_re, c0_im, c1_re, c1_im)"));
            }
            let mut v = [0.0; 4];
            for (slot, n) in v.iter_mut().zip(&nums) {
                *slot = n
                    .parse()
                    .map_err(|_| {
                        Error::parse_kind(ParseErrorKind::BadValue, line, rhs_col, format!("invalid number `{n}`"))
                    })?;
            }
            AtomSource::Qubit {
                c0: (v[0], v[1]),
                c1: (v[2], v[3]),
            }
        }
        _ => return Err(Error::parse(line, rhs_col, format!("unrecognized state `{rhs}`"))),
    };
    Ok(AtomBinding {
        name: name.to_string(),
        source,
        line,
    })
}
