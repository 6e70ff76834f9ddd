use super::{eval_term, LieTerm, Model, RewriteError};
use crate::field::Scalar;
use crate::lie::{BracketRule, LieError};
use crate::shift::Config;

/// `xi -> a [xi, y_1, ..., y_(k-1)] + y_k`. With `a = 0` the chain is empty
/// and the map is the constant `y_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineMapNF {
    pub a: Scalar,
    pub chain: Vec<Config>,
    pub offset: Config,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AffineOp {
    /// `T -> [T, y]`
    BracketRight(Config),
    /// `T -> [y, T]`
    BracketLeft(Config),
    Add(Config),
    Scale(Scalar),
}

impl AffineMapNF {
    pub fn identity(rule: &BracketRule) -> Self {
        let field = rule.field();
        Self {
            a: Scalar::one(field),
            chain: Vec::new(),
            offset: Config::zero(field, rule.tracks()),
        }
    }

    pub fn constant(y: Config) -> Self {
        Self {
            a: Scalar::zero(y.field()),
            chain: Vec::new(),
            offset: y,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.a.is_zero()
    }

    pub fn eval(&self, rule: &BracketRule, xi: &Config) -> Result<Config, LieError> {
        if self.a.is_zero() {
            return Ok(self.offset.clone());
        }
        let mut v = xi.clone();
        for y in &self.chain {
            v = rule.eval(&v, y)?;
        }
        Ok(v.scale(self.a.value()).add(&self.offset)?)
    }
}

/// Normal form of `op` applied after `m`.
pub fn affine_compose(
    rule: &BracketRule,
    m: &AffineMapNF,
    op: &AffineOp,
) -> Result<AffineMapNF, LieError> {
    let field = rule.field();
    let mut out = m.clone();
    match op {
        AffineOp::Add(y) => out.offset = out.offset.add(y)?,
        AffineOp::Scale(c) => {
            let c = field.reduce(c.value() as i64);
            out.a = Scalar::new(field.mul(m.a.value(), c) as i64, field.modulus())?;
            out.offset = m.offset.scale(c);
            if out.a.is_zero() {
                out.chain.clear();
            }
        }
        AffineOp::BracketRight(y) => {
            // [a [xi, ...] + y_k, y] = a [xi, ..., y] + [y_k, y]
            if !m.a.is_zero() {
                out.chain.push(y.clone());
            }
            out.offset = rule.eval(&m.offset, y)?;
        }
        AffineOp::BracketLeft(y) => {
            // [y, T] = -[T, y]
            if !m.a.is_zero() {
                out.chain.push(y.clone());
                out.a = m.a.neg();
            }
            out.offset = rule.eval(y, &m.offset)?;
        }
    }
    Ok(out)
}

/// Normal form of a term with exactly one `xi`, built bottom-up with
/// [`affine_compose`].
pub fn affine_normal_form(t: &LieTerm, model: &Model) -> Result<AffineMapNF, RewriteError> {
    let n = t.xi_count();
    if n != 1 {
        return Err(RewriteError::XiCount(n));
    }
    nf(t, model)
}

fn nf(t: &LieTerm, model: &Model) -> Result<AffineMapNF, RewriteError> {
    let rule = &model.rule;
    if t.xi_count() == 0 {
        return Ok(AffineMapNF::constant(eval_term(t, model, None)?));
    }
    Ok(match t {
        LieTerm::Xi => AffineMapNF::identity(rule),
        LieTerm::Gen(_) => unreachable!("generators contain no xi"),
        LieTerm::Bracket(a, b) if a.xi_count() == 1 => affine_compose(
            rule,
            &nf(a, model)?,
            &AffineOp::BracketRight(eval_term(b, model, None)?),
        )?,
        LieTerm::Bracket(a, b) => affine_compose(
            rule,
            &nf(b, model)?,
            &AffineOp::BracketLeft(eval_term(a, model, None)?),
        )?,
        LieTerm::Scale(c, s) => affine_compose(rule, &nf(s, model)?, &AffineOp::Scale(*c))?,
        LieTerm::Sum(ts) => {
            let mut acc = None;
            let mut constant = model.zero();
            for s in ts {
                if s.xi_count() == 1 {
                    acc = Some(nf(s, model)?);
                } else {
                    constant = constant
                        .add(&eval_term(s, model, None)?)
                        .map_err(LieError::from)?;
                }
            }
            let m = acc.expect("one summand holds xi");
            affine_compose(rule, &m, &AffineOp::Add(constant))?
        }
    })
}
