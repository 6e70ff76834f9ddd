use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use super::{FlatBracket, Model, RewriteError};
use crate::field::PrimeField;
use crate::lie::LieError;
use crate::shift::Config;

/// Decides which generator pairs commute and expands `[e_i, e_j]` over
/// generators.
pub trait CommutationOracle {
    fn commutes(&mut self, i: usize, j: usize) -> Result<bool, RewriteError>;

    /// `[e_i, e_j] = sum_m c_m e_m`.
    fn expand(&mut self, i: usize, j: usize) -> Result<Vec<(usize, u32)>, RewriteError>;
}

/// Answers from a concrete model. Brackets outside the span of the current
/// generators are registered as new generators.
#[derive(Debug, Clone)]
pub struct ModelOracle {
    pub model: Model,
    commuting: HashMap<(usize, usize), bool>,
}

impl ModelOracle {
    pub fn new(model: Model) -> Self {
        Self {
            model,
            commuting: HashMap::new(),
        }
    }

    pub fn into_model(self) -> Model {
        self.model
    }
}

impl CommutationOracle for ModelOracle {
    fn commutes(&mut self, i: usize, j: usize) -> Result<bool, RewriteError> {
        let key = (i.min(j), i.max(j));
        if let Some(&c) = self.commuting.get(&key) {
            return Ok(c);
        }
        let (a, b) = (self.model.gen(i)?, self.model.gen(j)?);
        let c = self.model.rule.eval(a, b)?.is_zero();
        self.commuting.insert(key, c);
        Ok(c)
    }

    fn expand(&mut self, i: usize, j: usize) -> Result<Vec<(usize, u32)>, RewriteError> {
        let v = self
            .model
            .rule
            .eval(self.model.gen(i)?, self.model.gen(j)?)?;
        if v.is_zero() {
            return Ok(Vec::new());
        }
        if let Some(c) = solve_in_span(&v, &self.model.gens) {
            return Ok(c.into_iter().enumerate().filter(|&(_, a)| a != 0).collect());
        }
        self.model.gens.push(v);
        Ok(vec![(self.model.gens.len() - 1, 1)])
    }
}

/// Explicit tables; pairs missing from `expansions` cannot be expanded.
/// With a model attached, every claimed commutation is checked against it.
#[derive(Debug, Clone)]
pub struct TableOracle {
    pub field: PrimeField,
    pub commuting: HashSet<(usize, usize)>,
    pub expansions: HashMap<(usize, usize), Vec<(usize, u32)>>,
    pub model: Option<Model>,
}

impl TableOracle {
    pub fn new(field: PrimeField) -> Self {
        Self {
            field,
            commuting: HashSet::new(),
            expansions: HashMap::new(),
            model: None,
        }
    }
}

impl CommutationOracle for TableOracle {
    fn commutes(&mut self, i: usize, j: usize) -> Result<bool, RewriteError> {
        let claim = i == j || self.commuting.contains(&(i, j)) || self.commuting.contains(&(j, i));
        if let (true, Some(m)) = (claim, &self.model) {
            if !m.rule.eval(m.gen(i)?, m.gen(j)?)?.is_zero() {
                return Err(RewriteError::OracleInconsistent(i, j));
            }
        }
        Ok(claim)
    }

    fn expand(&mut self, i: usize, j: usize) -> Result<Vec<(usize, u32)>, RewriteError> {
        if let Some(e) = self.expansions.get(&(i, j)) {
            return Ok(e.clone());
        }
        if let Some(e) = self.expansions.get(&(j, i)) {
            return Ok(e.iter().map(|&(m, c)| (m, self.field.neg(c))).collect());
        }
        Err(RewriteError::NoExpansion(i, j))
    }
}

/// `(d, l, p)`: largest depth among bad brackets, how many bad brackets
/// have it, and the smallest bad index among those.
pub type Measure = (usize, usize, usize);

#[derive(Debug, Clone)]
pub struct Elimination {
    pub terms: Vec<FlatBracket>,
    /// The measure before each rewrite step.
    pub trace: Vec<Measure>,
}

fn bad_index(
    oracle: &mut dyn CommutationOracle,
    t: &FlatBracket,
) -> Result<Option<usize>, RewriteError> {
    for (j, &g) in t.tail.iter().enumerate() {
        if oracle.commutes(t.base, g)? {
            return Ok(Some(j + 1));
        }
    }
    Ok(None)
}

const STEP_LIMIT: usize = 1_000_000;

/// Live terms of an elimination, with bad brackets ordered by
/// (largest depth, smallest bad index, leftmost).
struct Workspace {
    field: PrimeField,
    next_seq: u64,
    /// key -> (coefficient, position, bad index)
    entries: HashMap<(usize, Vec<usize>), (u32, u64, Option<usize>)>,
    queue: BTreeSet<(Reverse<usize>, usize, u64)>,
    by_seq: HashMap<u64, (usize, Vec<usize>)>,
    depth_counts: BTreeMap<usize, usize>,
}

impl Workspace {
    fn add(
        &mut self,
        oracle: &mut dyn CommutationOracle,
        base: usize,
        tail: Vec<usize>,
        c: u32,
    ) -> Result<(), RewriteError> {
        if c == 0 || tail.first() == Some(&base) {
            return Ok(());
        }
        let key = (base, tail);
        if let Some(e) = self.entries.get_mut(&key) {
            e.0 = self.field.add(e.0, c);
            if e.0 == 0 {
                let (_, seq, bad) = *e;
                self.entries.remove(&key);
                self.by_seq.remove(&seq);
                if let Some(p) = bad {
                    self.queue.remove(&(Reverse(key.1.len()), p, seq));
                    self.uncount(key.1.len());
                }
            }
            return Ok(());
        }
        let t = FlatBracket {
            coeff: crate::field::Scalar::new(c as i64, self.field.modulus())
                .map_err(LieError::from)?,
            base: key.0,
            tail: key.1.clone(),
        };
        let bad = bad_index(oracle, &t)?;
        let seq = self.next_seq;
        self.next_seq += 1;
        if let Some(p) = bad {
            self.queue.insert((Reverse(t.depth()), p, seq));
            *self.depth_counts.entry(t.depth()).or_insert(0) += 1;
        }
        self.by_seq.insert(seq, key.clone());
        self.entries.insert(key, (c, seq, bad));
        Ok(())
    }

    fn uncount(&mut self, depth: usize) {
        let n = self.depth_counts.get_mut(&depth).expect("counted");
        *n -= 1;
        if *n == 0 {
            self.depth_counts.remove(&depth);
        }
    }

    fn terms(&self) -> Vec<FlatBracket> {
        let mut seqs: Vec<&u64> = self.by_seq.keys().collect();
        seqs.sort_unstable();
        seqs.into_iter()
            .map(|seq| {
                let key = &self.by_seq[seq];
                let c = self.entries[key].0;
                FlatBracket {
                    coeff: crate::field::Scalar::new(c as i64, self.field.modulus())
                        .expect("valid modulus"),
                    base: key.0,
                    tail: key.1.clone(),
                }
            })
            .collect()
    }
}

/// Rewrites until every bracket `[b, e_i1, ..., e_ik]` has `[b, e_ij] != 0`
/// for all `j`. A bracket with bad index 1 is dropped; otherwise entries
/// `p - 1` and `p` are exchanged by
/// `[[x, y], z] = [x, [y, z]] + [[x, z], y]` and `[y, z]` is expanded over
/// generators. Ties go to the leftmost bracket.
pub fn eliminate_bad(
    field: PrimeField,
    terms: &[FlatBracket],
    oracle: &mut dyn CommutationOracle,
) -> Result<Elimination, RewriteError> {
    let mut ws = Workspace {
        field,
        next_seq: 0,
        entries: HashMap::new(),
        queue: BTreeSet::new(),
        by_seq: HashMap::new(),
        depth_counts: BTreeMap::new(),
    };
    for t in terms {
        ws.add(
            oracle,
            t.base,
            t.tail.clone(),
            field.reduce(t.coeff.value() as i64),
        )?;
    }
    let mut trace = Vec::new();
    while let Some(&(Reverse(d), p, seq)) = ws.queue.iter().next() {
        trace.push((d, ws.depth_counts[&d], p));
        if trace.len() > STEP_LIMIT {
            return Err(RewriteError::StepLimit(STEP_LIMIT));
        }
        let key = ws.by_seq.remove(&seq).expect("queued terms are live");
        let (c, _, _) = ws.entries.remove(&key).expect("queued terms are live");
        ws.queue.remove(&(Reverse(d), p, seq));
        ws.uncount(d);
        let (base, tail) = key;
        if p >= 2 {
            let (y, z) = (tail[p - 2], tail[p - 1]);
            let mut swapped = tail.clone();
            swapped.swap(p - 2, p - 1);
            ws.add(oracle, base, swapped, c)?;
            for (m, a) in oracle.expand(y, z)? {
                let mut t: Vec<usize> = tail[..p - 2].to_vec();
                t.push(m);
                t.extend_from_slice(&tail[p..]);
                ws.add(oracle, base, t, field.mul(c, field.reduce(a as i64)))?;
            }
        }
    }
    Ok(Elimination {
        terms: ws.terms(),
        trace,
    })
}

/// Coefficients `c` with `sum c_i gens[i] = target`, over the tails and
/// deviations as coordinates.
pub(crate) fn solve_in_span(target: &Config, gens: &[Config]) -> Option<Vec<u32>> {
    let field = target.field();
    let mut coords: Vec<(Option<i64>, usize)> = Vec::new();
    for c in gens.iter().chain(std::iter::once(target)) {
        for t in 0..c.tracks() {
            coords.push((None, t));
        }
        for &p in c.deviation().keys() {
            for t in 0..c.tracks() {
                coords.push((Some(p), t));
            }
        }
    }
    coords.sort_unstable();
    coords.dedup();
    let value = |c: &Config, &(p, t): &(Option<i64>, usize)| match p {
        None => c.tail()[t],
        Some(p) => c.deviation().get(&p).map_or(0, |v| v[t]),
    };
    // augmented columns: one row per coordinate
    let n = gens.len();
    let mut rows: Vec<Vec<u32>> = coords
        .iter()
        .map(|k| {
            let mut r: Vec<u32> = gens.iter().map(|g| value(g, k)).collect();
            r.push(value(target, k));
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(pr) = (r..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = field.inv(rows[r][col]).ok()?;
        for v in rows[r].iter_mut() {
            *v = field.mul(*v, inv);
        }
        for i in 0..rows.len() {
            if i != r && rows[i][col] != 0 {
                let f = rows[i][col];
                for k in 0..=n {
                    let sub = field.mul(f, rows[r][k]);
                    rows[i][k] = field.sub(rows[i][k], sub);
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    if rows[r..].iter().any(|row| row[n] != 0) {
        return None;
    }
    let mut sol = vec![0; n];
    for (i, &col) in pivots.iter().enumerate() {
        sol[col] = rows[i][n];
    }
    Some(sol)
}
