//! Shift-invariant Lie brackets on vector shifts over the integers.

mod axioms;
mod count;
mod ideal;
mod phi;
mod search;

pub use axioms::{verify_axioms, AxiomReport};
pub use count::{
    closed_form_count, listed_count, periodic_zero_pairs, PeriodicCountOptions,
    DEFAULT_PERIODIC_CAP,
};
pub use ideal::{ideal_closure, ideal_closure_brute, WindowAlgebra};
pub use phi::phi_radius;
pub use search::{search_brackets, SearchOptions, SearchResult};

use std::fmt;

use thiserror::Error;

use crate::field::{FieldError, PrimeField};
use crate::shift::{Config, LaurentPoly, LinearCA, PeriodicConfig, ShiftError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LieError {
    #[error(transparent)]
    Shift(#[from] ShiftError),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("enumeration size {size} exceeds cap {cap}")]
    CapExceeded { size: u128, cap: u128 },
    #[error("bracket leaves the window of radius {window}")]
    WindowTooSmall { window: i64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("rule file line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl From<FieldError> for LieError {
    fn from(e: FieldError) -> Self {
        LieError::Shift(e.into())
    }
}

/// `[e^(s)_0, e^(t)_delta] = target`, tracks 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrbitRule {
    pub s: usize,
    pub t: usize,
    pub delta: i64,
    pub target: Config,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BracketRule {
    /// `[(x, a), (y, b)] = (b f(x) - a f(y), 0)`. Configurations carry the
    /// constant factor as an extra last track that only has a tail.
    ConstructionA { f: LinearCA },
    /// Generated from finitely many basis brackets by shift invariance,
    /// bilinearity and antisymmetry; every other basis pair brackets to 0.
    OrbitRules {
        field: PrimeField,
        d: usize,
        rules: Vec<OrbitRule>,
    },
    /// `u^-1([u x, u y])`.
    Conjugated {
        inner: Box<BracketRule>,
        u: LinearCA,
        u_inv: LinearCA,
    },
}

impl BracketRule {
    pub fn construction_a(f: LinearCA) -> Result<Self, LieError> {
        if !f.is_square() {
            return Err(LieError::Shape(
                "construction A needs a square matrix".into(),
            ));
        }
        Ok(BracketRule::ConstructionA { f })
    }

    pub fn orbit(field: PrimeField, d: usize, rules: Vec<OrbitRule>) -> Result<Self, LieError> {
        for r in &rules {
            if r.s >= d || r.t >= d {
                return Err(LieError::Shape(format!(
                    "rule track out of range for d = {d}"
                )));
            }
            if r.target.field() != field || r.target.tracks() != d {
                return Err(LieError::Shape(
                    "rule target has the wrong field or track count".into(),
                ));
            }
            if !r.target.is_finite_support() {
                return Err(LieError::Shape(
                    "rule targets must have finite support".into(),
                ));
            }
        }
        Ok(BracketRule::OrbitRules { field, d, rules })
    }

    pub fn zero(field: PrimeField, d: usize) -> Self {
        BracketRule::OrbitRules {
            field,
            d,
            rules: Vec::new(),
        }
    }

    /// `[]_k` on `(GF(2)^3)^Z`: `[e1, e2] = z^k` on the third track with
    /// `z^k` the indicator of the set `{0, k}`.
    pub fn bracket_k(k: i64) -> Self {
        let field = PrimeField::binary();
        let mut cells = vec![(0, vec![0, 0, 1])];
        if k != 0 {
            cells.push((k, vec![0, 0, 1]));
        }
        let target = Config::from_parts(field, &[0, 0, 0], cells).expect("three tracks");
        BracketRule::OrbitRules {
            field,
            d: 3,
            rules: vec![OrbitRule {
                s: 0,
                t: 1,
                delta: 0,
                target,
            }],
        }
    }

    /// The cellwise bracket `[e1, e2] = e1` on `d >= 2` tracks.
    pub fn cellwise_e1(field: PrimeField, d: usize) -> Result<Self, LieError> {
        let target = Config::basis(field, d, 0, 0)?;
        Self::orbit(
            field,
            d,
            vec![OrbitRule {
                s: 0,
                t: 1,
                delta: 0,
                target,
            }],
        )
    }

    /// Conjugates by an invertible linear CA on the vector tracks.
    pub fn conjugate(self, u: LinearCA) -> Result<Self, LieError> {
        if u.field() != self.field() || !u.is_square() || u.in_tracks() != self.vector_tracks() {
            return Err(LieError::Shape(
                "conjugating map does not match the vector tracks".into(),
            ));
        }
        let u_inv = u.inverse()?;
        let (u, u_inv) = if self.has_constant_factor() {
            (extend_identity(&u), extend_identity(&u_inv))
        } else {
            (u, u_inv)
        };
        Ok(BracketRule::Conjugated {
            inner: Box::new(self),
            u,
            u_inv,
        })
    }

    pub fn field(&self) -> PrimeField {
        match self {
            BracketRule::ConstructionA { f } => f.field(),
            BracketRule::OrbitRules { field, .. } => *field,
            BracketRule::Conjugated { inner, .. } => inner.field(),
        }
    }

    pub fn has_constant_factor(&self) -> bool {
        match self {
            BracketRule::ConstructionA { .. } => true,
            BracketRule::OrbitRules { .. } => false,
            BracketRule::Conjugated { inner, .. } => inner.has_constant_factor(),
        }
    }

    /// Number of full shift tracks.
    pub fn vector_tracks(&self) -> usize {
        match self {
            BracketRule::ConstructionA { f } => f.in_tracks(),
            BracketRule::OrbitRules { d, .. } => *d,
            BracketRule::Conjugated { inner, .. } => inner.vector_tracks(),
        }
    }

    /// Track count of the configurations the bracket acts on.
    pub fn tracks(&self) -> usize {
        self.vector_tracks() + usize::from(self.has_constant_factor())
    }

    /// Largest distance between an output cell and an input cell it reads.
    pub fn radius(&self) -> u64 {
        match self {
            BracketRule::ConstructionA { f } => f.radius(),
            BracketRule::OrbitRules { rules, .. } => rules
                .iter()
                .flat_map(|r| {
                    r.target
                        .deviation()
                        .keys()
                        .map(move |&p| p.unsigned_abs().max((p - r.delta).unsigned_abs()))
                })
                .max()
                .unwrap_or(0),
            BracketRule::Conjugated { inner, u, u_inv } => {
                inner.radius() + u.radius() + u_inv.radius()
            }
        }
    }

    fn check_config(&self, x: &Config) -> Result<(), LieError> {
        if x.field() != self.field() || x.tracks() != self.tracks() {
            return Err(LieError::Shape(format!(
                "expected {} tracks over GF({}), got {} over GF({})",
                self.tracks(),
                self.field().modulus(),
                x.tracks(),
                x.field().modulus()
            )));
        }
        if self.has_constant_factor() {
            let last = self.tracks() - 1;
            if x.deviation().values().any(|v| v[last] != 0) {
                return Err(LieError::Shape(
                    "the constant factor must be constant".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn eval(&self, x: &Config, y: &Config) -> Result<Config, LieError> {
        self.check_config(x)?;
        self.check_config(y)?;
        Ok(self.eval_unchecked(x, y))
    }

    fn eval_unchecked(&self, x: &Config, y: &Config) -> Config {
        let field = self.field();
        match self {
            BracketRule::ConstructionA { f } => {
                let d = f.in_tracks();
                let a = x.tail()[d];
                let b = y.tail()[d];
                let fx = f.apply(&drop_last(x)).expect("shapes checked");
                let fy = f.apply(&drop_last(y)).expect("shapes checked");
                let v = fx.scale(b).sub(&fy.scale(a)).expect("shapes checked");
                push_zero_track(&v)
            }
            BracketRule::OrbitRules { d, rules, .. } => {
                let mut out = Config::zero(field, *d);
                for r in rules {
                    orbit_rule_into(field, r, x, y, &mut out);
                }
                out
            }
            BracketRule::Conjugated { inner, u, u_inv } => {
                let ux = u.apply(x).expect("shapes checked");
                let uy = u.apply(y).expect("shapes checked");
                u_inv
                    .apply(&inner.eval_unchecked(&ux, &uy))
                    .expect("shapes checked")
            }
        }
    }

    fn check_periodic(&self, x: &PeriodicConfig) -> Result<(), LieError> {
        if x.field() != self.field() || x.tracks() != self.tracks() {
            return Err(LieError::Shape(
                "periodic configuration has the wrong shape".into(),
            ));
        }
        if self.has_constant_factor() {
            let last = self.tracks() - 1;
            let a = x.get(0, last);
            if (0..x.period() as i64).any(|i| x.get(i, last) != a) {
                return Err(LieError::Shape(
                    "the constant factor must be constant".into(),
                ));
            }
        }
        Ok(())
    }

    /// The same bilinear formula with positions and targets wrapped mod `n`.
    pub fn eval_periodic(
        &self,
        x: &PeriodicConfig,
        y: &PeriodicConfig,
    ) -> Result<PeriodicConfig, LieError> {
        self.check_periodic(x)?;
        self.check_periodic(y)?;
        if x.period() != y.period() {
            return Err(ShiftError::PeriodMismatch(x.period(), y.period()).into());
        }
        Ok(self.eval_periodic_unchecked(x, y))
    }

    fn eval_periodic_unchecked(&self, x: &PeriodicConfig, y: &PeriodicConfig) -> PeriodicConfig {
        let field = self.field();
        let n = x.period();
        match self {
            BracketRule::ConstructionA { f } => {
                let d = f.in_tracks();
                let a = x.get(0, d);
                let b = y.get(0, d);
                let fx = f
                    .apply_periodic(&drop_last_periodic(x))
                    .expect("shapes checked");
                let fy = f
                    .apply_periodic(&drop_last_periodic(y))
                    .expect("shapes checked");
                let mut out = PeriodicConfig::zero(field, n, d + 1);
                for i in 0..n as i64 {
                    for t in 0..d {
                        out.set(
                            i,
                            t,
                            field.sub(field.mul(b, fx.get(i, t)), field.mul(a, fy.get(i, t))),
                        );
                    }
                }
                out
            }
            BracketRule::OrbitRules { d, rules, .. } => {
                let mut out = PeriodicConfig::zero(field, n, *d);
                for r in rules {
                    for g in 0..n as i64 {
                        let c = field.sub(
                            field.mul(x.get(g, r.s), y.get(g + r.delta, r.t)),
                            field.mul(y.get(g, r.s), x.get(g + r.delta, r.t)),
                        );
                        if c == 0 {
                            continue;
                        }
                        for (&p, v) in r.target.deviation() {
                            for (t, &w) in v.iter().enumerate() {
                                out.add_at(g + p, t, field.mul(c, w));
                            }
                        }
                    }
                }
                out
            }
            BracketRule::Conjugated { inner, u, u_inv } => {
                let ux = u.apply_periodic(x).expect("shapes checked");
                let uy = u.apply_periodic(y).expect("shapes checked");
                u_inv
                    .apply_periodic(&inner.eval_periodic_unchecked(&ux, &uy))
                    .expect("shapes checked")
            }
        }
    }

    /// Basis configuration on a vector track.
    pub fn basis(&self, track: usize, pos: i64) -> Result<Config, LieError> {
        if track >= self.vector_tracks() {
            return Err(ShiftError::TrackOutOfRange {
                track,
                d: self.vector_tracks(),
            }
            .into());
        }
        Ok(Config::basis(self.field(), self.tracks(), track, pos)?)
    }

    /// The constant `(0, a)` of construction A.
    pub fn constant(&self, a: u32) -> Option<Config> {
        if !self.has_constant_factor() {
            return None;
        }
        let mut tail = vec![0i64; self.tracks()];
        tail[self.tracks() - 1] = a as i64;
        Some(Config::constant(self.field(), &tail))
    }

    /// Parses the rule file format; see [`BracketRule::to_text`].
    pub fn parse(text: &str) -> Result<Self, LieError> {
        let mut rule: Option<BracketRule> = None;
        let mut pending: Vec<OrbitRule> = Vec::new();
        let mut header: Option<(PrimeField, usize, bool)> = None;
        let mut conjugations: Vec<LinearCA> = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line_no = ln + 1;
            let err = |msg: String| LieError::Parse { line: line_no, msg };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (word, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            match word {
                "constructionA" | "orbit" => {
                    if header.is_some() {
                        return Err(err("second header".into()));
                    }
                    let kv = key_values(rest);
                    let q: u32 = kv_get(&kv, "q").ok_or_else(|| err("missing q".into()))?;
                    let field = PrimeField::new(q).map_err(|e| err(e.to_string()))?;
                    let d: usize = kv_get(&kv, "d").ok_or_else(|| err("missing d".into()))?;
                    if word == "constructionA" {
                        let f = rest
                            .split_once("f=")
                            .map(|(_, m)| m.trim())
                            .ok_or_else(|| err("missing f".into()))?;
                        let f = LinearCA::parse(field, f).map_err(|e| err(e.to_string()))?;
                        if f.in_tracks() != d {
                            return Err(err("f does not have d tracks".into()));
                        }
                        rule =
                            Some(BracketRule::construction_a(f).map_err(|e| err(e.to_string()))?);
                    }
                    header = Some((field, d, word == "orbit"));
                }
                "rule" => {
                    let Some((field, d, true)) = header else {
                        return Err(err("rule outside an orbit header".into()));
                    };
                    let (nums, target) = rest
                        .split_once("target=")
                        .ok_or_else(|| err("missing target".into()))?;
                    let nums: Vec<i64> = nums
                        .split_whitespace()
                        .map(|n| {
                            n.parse::<i64>()
                                .map_err(|_| err(format!("bad number `{n}`")))
                        })
                        .collect::<Result<_, _>>()?;
                    let [s, t, delta] = nums[..] else {
                        return Err(err("expected `rule s t delta target=...`".into()));
                    };
                    if s < 1 || t < 1 || s as usize > d || t as usize > d {
                        return Err(err("track out of range".into()));
                    }
                    let target =
                        Config::parse(field, target.trim()).map_err(|e| err(e.to_string()))?;
                    pending.push(OrbitRule {
                        s: s as usize - 1,
                        t: t as usize - 1,
                        delta,
                        target,
                    });
                }
                "conjugate" => {
                    let Some((field, ..)) = header else {
                        return Err(err("conjugate before header".into()));
                    };
                    let m = rest
                        .strip_prefix("u=")
                        .ok_or_else(|| err("expected u=<matrix>".into()))?;
                    conjugations.push(LinearCA::parse(field, m).map_err(|e| err(e.to_string()))?);
                }
                other => return Err(err(format!("unknown directive `{other}`"))),
            }
        }
        let (field, d, is_orbit) = header.ok_or(LieError::Parse {
            line: 0,
            msg: "missing header".into(),
        })?;
        let mut rule = if is_orbit {
            BracketRule::orbit(field, d, pending)?
        } else {
            rule.expect("construction A header sets the rule")
        };
        for u in conjugations {
            rule = rule.conjugate(u)?;
        }
        Ok(rule)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut conj = Vec::new();
        let mut cur = self;
        while let BracketRule::Conjugated { inner, u, .. } = cur {
            conj.push(u);
            cur = inner;
        }
        match cur {
            BracketRule::ConstructionA { f } => {
                out.push_str(&format!(
                    "constructionA q={} d={} f={}\n",
                    f.field().modulus(),
                    f.in_tracks(),
                    f
                ));
            }
            BracketRule::OrbitRules { field, d, rules } => {
                out.push_str(&format!("orbit q={} d={}\n", field.modulus(), d));
                for r in rules {
                    out.push_str(&format!(
                        "rule {} {} {} target={}\n",
                        r.s + 1,
                        r.t + 1,
                        r.delta,
                        r.target
                    ));
                }
            }
            BracketRule::Conjugated { .. } => unreachable!(),
        }
        let vt = cur.vector_tracks();
        for u in conj.iter().rev() {
            out.push_str(&format!("conjugate u={}\n", restrict_square(u, vt)));
        }
        out
    }
}

impl fmt::Display for BracketRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.to_text().trim_end())
    }
}

fn key_values(s: &str) -> Vec<(&str, &str)> {
    s.split_whitespace()
        .filter_map(|w| w.split_once('='))
        .collect()
}

fn kv_get<T: std::str::FromStr>(kv: &[(&str, &str)], key: &str) -> Option<T> {
    kv.iter()
        .find(|(k, _)| *k == key)
        .and_then(|(_, v)| v.parse().ok())
}

/// Adds `sum_g c_g s^g(target)` for one rule, where
/// `c_g = x^s_g y^t_{g+delta} - y^s_g x^t_{g+delta}`. The coefficient is
/// constant outside the deviation supports, which becomes a tail.
fn orbit_rule_into(field: PrimeField, r: &OrbitRule, x: &Config, y: &Config, out: &mut Config) {
    let coeff = |g: i64| {
        field.sub(
            field.mul(x.get(g, r.s), y.get(g + r.delta, r.t)),
            field.mul(y.get(g, r.s), x.get(g + r.delta, r.t)),
        )
    };
    let c_inf = field.sub(
        field.mul(x.tail()[r.s], y.tail()[r.t]),
        field.mul(y.tail()[r.s], x.tail()[r.t]),
    );
    if c_inf != 0 {
        let mut sum = vec![0u32; out.tracks()];
        for v in r.target.deviation().values() {
            for (a, &b) in sum.iter_mut().zip(v) {
                *a = field.add(*a, b);
            }
        }
        let tail: Vec<u32> = sum.iter().map(|&s| field.mul(s, c_inf)).collect();
        out.add_tail(&tail);
    }
    let mut gs: Vec<i64> = x
        .deviation()
        .keys()
        .chain(y.deviation().keys())
        .flat_map(|&p| [p, p - r.delta])
        .collect();
    gs.sort_unstable();
    gs.dedup();
    for g in gs {
        let c = field.sub(coeff(g), c_inf);
        if c == 0 {
            continue;
        }
        for (&p, v) in r.target.deviation() {
            let w: Vec<u32> = v.iter().map(|&a| field.mul(a, c)).collect();
            out.add_at(g + p, &w);
        }
    }
}

fn drop_last(x: &Config) -> Config {
    let d = x.tracks() - 1;
    let tail: Vec<i64> = x.tail()[..d].iter().map(|&v| v as i64).collect();
    let entries = x
        .deviation()
        .iter()
        .map(|(&p, v)| (p, v[..d].iter().map(|&a| a as i64).collect()));
    Config::from_parts(x.field(), &tail, entries).expect("track counts agree")
}

fn push_zero_track(x: &Config) -> Config {
    let mut tail: Vec<i64> = x.tail().iter().map(|&v| v as i64).collect();
    tail.push(0);
    let entries = x.deviation().iter().map(|(&p, v)| {
        let mut w: Vec<i64> = v.iter().map(|&a| a as i64).collect();
        w.push(0);
        (p, w)
    });
    Config::from_parts(x.field(), &tail, entries).expect("track counts agree")
}

fn drop_last_periodic(x: &PeriodicConfig) -> PeriodicConfig {
    let d = x.tracks() - 1;
    let rows: Vec<Vec<i64>> = (0..x.period() as i64)
        .map(|i| (0..d).map(|t| x.get(i, t) as i64).collect())
        .collect();
    PeriodicConfig::from_rows(x.field(), &rows).expect("rows have equal length")
}

fn extend_identity(u: &LinearCA) -> LinearCA {
    let f = u.field();
    let d = u.in_tracks();
    let entries = (0..=d)
        .map(|r| {
            (0..=d)
                .map(|c| match (r < d, c < d) {
                    (true, true) => u.entry(r, c).clone(),
                    _ if r == c => LaurentPoly::monomial(f, 1, 0),
                    _ => LaurentPoly::zero(),
                })
                .collect()
        })
        .collect();
    LinearCA::from_entries(f, entries).expect("square")
}

fn restrict_square(u: &LinearCA, d: usize) -> LinearCA {
    let entries = (0..d)
        .map(|r| (0..d).map(|c| u.entry(r, c).clone()).collect())
        .collect();
    LinearCA::from_entries(u.field(), entries).expect("square")
}

#[cfg(test)]
mod tests;
