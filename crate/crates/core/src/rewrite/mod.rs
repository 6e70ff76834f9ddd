//! Free Lie term rewriting: left-nested normal forms, elimination of brackets
//! whose base commutes with a later entry, and the affine normal form.

mod affine;
mod eliminate;

pub use affine::{affine_compose, affine_normal_form, AffineMapNF, AffineOp};
pub use eliminate::{
    eliminate_bad, CommutationOracle, Elimination, Measure, ModelOracle, TableOracle,
};

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::field::{PrimeField, Scalar};
use crate::lie::{BracketRule, LieError};
use crate::shift::Config;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("term contains the affine variable")]
    HasXi,
    #[error("term needs exactly one affine variable, found {0}")]
    XiCount(usize),
    #[error("generator g{0} is not assigned")]
    Unassigned(usize),
    #[error("oracle claims [g{0}, g{1}] = 0 but the model disagrees")]
    OracleInconsistent(usize, usize),
    #[error("oracle has no expansion for [g{0}, g{1}]")]
    NoExpansion(usize, usize),
    #[error("elimination exceeded {0} steps")]
    StepLimit(usize),
    #[error(transparent)]
    Lie(#[from] LieError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LieTerm {
    Gen(usize),
    Bracket(Box<LieTerm>, Box<LieTerm>),
    Scale(Scalar, Box<LieTerm>),
    Sum(Vec<LieTerm>),
    Xi,
}

impl LieTerm {
    pub fn br(a: LieTerm, b: LieTerm) -> LieTerm {
        LieTerm::Bracket(Box::new(a), Box::new(b))
    }

    pub fn xi_count(&self) -> usize {
        match self {
            LieTerm::Gen(_) => 0,
            LieTerm::Xi => 1,
            LieTerm::Bracket(a, b) => a.xi_count() + b.xi_count(),
            LieTerm::Scale(_, t) => t.xi_count(),
            LieTerm::Sum(ts) => ts.iter().map(LieTerm::xi_count).sum(),
        }
    }

    /// Nesting depth of brackets.
    pub fn depth(&self) -> usize {
        match self {
            LieTerm::Gen(_) | LieTerm::Xi => 0,
            LieTerm::Bracket(a, b) => 1 + a.depth().max(b.depth()),
            LieTerm::Scale(_, t) => t.depth(),
            LieTerm::Sum(ts) => ts.iter().map(LieTerm::depth).max().unwrap_or(0),
        }
    }

    /// Parses `(br t1 t2)`, `(sc a t)`, `(sum t1 ... tn)`, `g<i>`, `xi`.
    /// `0` is the empty sum.
    pub fn parse(field: PrimeField, s: &str) -> Result<LieTerm, RewriteError> {
        let mut p = Parser { s, pos: 0, field };
        let t = p.term()?;
        p.skip_ws();
        if p.pos != s.len() {
            return Err(p.err("trailing input"));
        }
        Ok(t)
    }
}

struct Parser<'a> {
    s: &'a str,
    pos: usize,
    field: PrimeField,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> RewriteError {
        RewriteError::Parse {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.s[self.pos..].starts_with(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn atom(&mut self) -> &str {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len()
            && !self.s[self.pos..].starts_with(|c: char| c.is_whitespace() || c == '(' || c == ')')
        {
            self.pos += 1;
        }
        &self.s[start..self.pos]
    }

    fn term(&mut self) -> Result<LieTerm, RewriteError> {
        self.skip_ws();
        if self.s[self.pos..].starts_with('(') {
            self.pos += 1;
            let head = self.atom().to_string();
            let t = match head.as_str() {
                "br" => {
                    let a = self.term()?;
                    let b = self.term()?;
                    LieTerm::br(a, b)
                }
                "sc" => {
                    let a = self.atom().to_string();
                    let a: i64 = a.parse().map_err(|_| self.err("bad scalar"))?;
                    let t = self.term()?;
                    LieTerm::Scale(self.field.scalar(a), Box::new(t))
                }
                "sum" => {
                    let mut ts = Vec::new();
                    loop {
                        self.skip_ws();
                        if self.s[self.pos..].starts_with(')') || self.pos >= self.s.len() {
                            break;
                        }
                        ts.push(self.term()?);
                    }
                    LieTerm::Sum(ts)
                }
                _ => return Err(self.err("expected br, sc or sum")),
            };
            self.skip_ws();
            if !self.s[self.pos..].starts_with(')') {
                return Err(self.err("expected `)`"));
            }
            self.pos += 1;
            Ok(t)
        } else {
            let a = self.atom();
            match a {
                "xi" => Ok(LieTerm::Xi),
                "0" => Ok(LieTerm::Sum(Vec::new())),
                _ => a
                    .strip_prefix('g')
                    .and_then(|i| i.parse().ok())
                    .map(LieTerm::Gen)
                    .ok_or_else(|| self.err("expected a term")),
            }
        }
    }
}

impl fmt::Display for LieTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LieTerm::Gen(i) => write!(f, "g{i}"),
            LieTerm::Xi => f.write_str("xi"),
            LieTerm::Bracket(a, b) => write!(f, "(br {a} {b})"),
            LieTerm::Scale(c, t) => write!(f, "(sc {} {t})", c.value()),
            LieTerm::Sum(ts) if ts.is_empty() => f.write_str("0"),
            LieTerm::Sum(ts) => {
                f.write_str("(sum")?;
                for t in ts {
                    write!(f, " {t}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// `coeff * [e_base, e_tail1, ..., e_tailk]`, nested to the left.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FlatBracket {
    pub coeff: Scalar,
    pub base: usize,
    pub tail: Vec<usize>,
}

impl FlatBracket {
    pub fn depth(&self) -> usize {
        self.tail.len()
    }

    pub fn to_term(&self) -> LieTerm {
        let t = self.tail.iter().fold(LieTerm::Gen(self.base), |acc, &g| {
            LieTerm::br(acc, LieTerm::Gen(g))
        });
        if self.coeff.value() == 1 {
            t
        } else {
            LieTerm::Scale(self.coeff, Box::new(t))
        }
    }
}

/// The combination as a single term (`0` when empty).
pub fn combination_term(terms: &[FlatBracket]) -> LieTerm {
    match terms {
        [one] => one.to_term(),
        _ => LieTerm::Sum(terms.iter().map(FlatBracket::to_term).collect()),
    }
}

/// A linear combination keyed by `(base, tail)` that keeps first-insertion
/// order.
#[derive(Debug, Clone)]
pub(crate) struct Combination {
    field: PrimeField,
    order: Vec<(usize, Vec<usize>)>,
    coeffs: HashMap<(usize, Vec<usize>), u32>,
}

impl Combination {
    pub(crate) fn new(field: PrimeField) -> Self {
        Self {
            field,
            order: Vec::new(),
            coeffs: HashMap::new(),
        }
    }

    pub(crate) fn add(&mut self, base: usize, tail: Vec<usize>, c: u32) {
        if c == 0 {
            return;
        }
        // [e, e, ...] = 0
        if tail.first() == Some(&base) {
            return;
        }
        let key = (base, tail);
        match self.coeffs.get_mut(&key) {
            Some(v) => *v = self.field.add(*v, c),
            None => {
                self.order.push(key.clone());
                self.coeffs.insert(key, c);
            }
        }
    }

    pub(crate) fn terms(&self) -> Vec<FlatBracket> {
        self.order
            .iter()
            .filter_map(|k| {
                let c = self.coeffs[k];
                (c != 0).then(|| FlatBracket {
                    coeff: Scalar::new(c as i64, self.field.modulus()).expect("modulus is valid"),
                    base: k.0,
                    tail: k.1.clone(),
                })
            })
            .collect()
    }

    fn scaled(&self, a: u32) -> Self {
        let mut out = Self::new(self.field);
        for k in &self.order {
            out.add(k.0, k.1.clone(), self.field.mul(self.coeffs[k], a));
        }
        out
    }

    fn extend(&mut self, other: &Self) {
        for k in &other.order {
            self.add(k.0, k.1.clone(), other.coeffs[k]);
        }
    }
}

/// `[l, r]` for left-nested `l` and `r`, by
/// `[x, [y, z]] = [[x, y], z] - [[x, z], y]`.
fn bracket_nested(
    field: PrimeField,
    l: &(usize, Vec<usize>),
    r: &[usize],
    out: &mut Combination,
    c: u32,
) {
    match r {
        [] => unreachable!("a left-nested bracket has a base"),
        [m] => {
            let mut tail = l.1.clone();
            tail.push(*m);
            out.add(l.0, tail, c);
        }
        [rest @ .., m] => {
            let mut tmp = Combination::new(field);
            bracket_nested(field, l, rest, &mut tmp, 1);
            for k in &tmp.order {
                let mut tail = k.1.clone();
                tail.push(*m);
                out.add(k.0, tail, field.mul(c, tmp.coeffs[k]));
            }
            let mut lm = l.1.clone();
            lm.push(*m);
            bracket_nested(field, &(l.0, lm), rest, out, field.neg(c));
        }
    }
}

fn nest(field: PrimeField, t: &LieTerm) -> Result<Combination, RewriteError> {
    Ok(match t {
        LieTerm::Xi => return Err(RewriteError::HasXi),
        LieTerm::Gen(i) => {
            let mut c = Combination::new(field);
            c.add(*i, Vec::new(), 1);
            c
        }
        LieTerm::Scale(a, t) => nest(field, t)?.scaled(field.reduce(a.value() as i64)),
        LieTerm::Sum(ts) => {
            let mut c = Combination::new(field);
            for t in ts {
                c.extend(&nest(field, t)?);
            }
            c
        }
        LieTerm::Bracket(a, b) => {
            let left = nest(field, a)?;
            let right = nest(field, b)?;
            let mut out = Combination::new(field);
            for l in &left.order {
                for r in &right.order {
                    let c = field.mul(left.coeffs[l], right.coeffs[r]);
                    if c == 0 {
                        continue;
                    }
                    let mut rv = vec![r.0];
                    rv.extend(&r.1);
                    bracket_nested(field, l, &rv, &mut out, c);
                }
            }
            out
        }
    })
}

/// Rewrites a term as a combination of left-nested brackets of generators,
/// using only bilinearity, antisymmetry and the Jacobi identity.
pub fn left_nest(field: PrimeField, t: &LieTerm) -> Result<Vec<FlatBracket>, RewriteError> {
    Ok(nest(field, t)?.terms())
}

/// Generators assigned to configurations, bracketed by a rule.
#[derive(Debug, Clone)]
pub struct Model {
    pub rule: BracketRule,
    pub gens: Vec<Config>,
}

impl Model {
    pub fn new(rule: BracketRule, gens: Vec<Config>) -> Self {
        Self { rule, gens }
    }

    pub fn gen(&self, i: usize) -> Result<&Config, RewriteError> {
        self.gens.get(i).ok_or(RewriteError::Unassigned(i))
    }

    pub fn zero(&self) -> Config {
        Config::zero(self.rule.field(), self.rule.tracks())
    }
}

/// Evaluates a term; `xi` takes the value `xi` when given.
pub fn eval_term(t: &LieTerm, model: &Model, xi: Option<&Config>) -> Result<Config, RewriteError> {
    Ok(match t {
        LieTerm::Gen(i) => model.gen(*i)?.clone(),
        LieTerm::Xi => xi.ok_or(RewriteError::HasXi)?.clone(),
        LieTerm::Bracket(a, b) => model
            .rule
            .eval(&eval_term(a, model, xi)?, &eval_term(b, model, xi)?)?,
        LieTerm::Scale(a, t) => eval_term(t, model, xi)?.scale(a.value()),
        LieTerm::Sum(ts) => {
            let mut acc = model.zero();
            for t in ts {
                acc = acc.add(&eval_term(t, model, xi)?).map_err(LieError::from)?;
            }
            acc
        }
    })
}

pub fn eval_flat(terms: &[FlatBracket], model: &Model) -> Result<Config, RewriteError> {
    eval_term(&combination_term(terms), model, None)
}
