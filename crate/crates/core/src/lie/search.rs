use std::collections::HashMap;

use rayon::prelude::*;

use super::{verify_axioms, BracketRule, LieError, OrbitRule};
use crate::field::PrimeField;
use crate::shift::Config;

#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    /// Largest number of candidate rule sets.
    pub cap: u128,
    /// At most this many basis brackets may be nonzero; `None` for no bound.
    pub max_active_keys: Option<usize>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            cap: 2_000_000,
            max_active_keys: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub rules: Vec<BracketRule>,
    pub keys: usize,
    pub candidates: u128,
    /// Candidates passing the sparse Jacobi check but failing the re-check.
    pub recheck_failures: usize,
}

type Key = (usize, usize, i64);
/// Sparse vector: `(position, track) -> coefficient`.
type Sparse = HashMap<(i64, usize), u32>;

/// Enumerates orbit-rule brackets on `(GF(q)^d)^Z`. Each canonical basis
/// pair `[e^(s)_0, e^(t)_delta]` (`s < t`, or `s = t` and `delta > 0`) with
/// `|delta| <= 2r` gets a target supported in `[-w, w]`. Candidates passing
/// a sparse Jacobi check are re-verified by [`verify_axioms`].
pub fn search_brackets(
    q: u32,
    d: usize,
    r: u64,
    w: u64,
    opts: SearchOptions,
) -> Result<SearchResult, LieError> {
    let field = PrimeField::new(q)?;
    let r = r as i64;
    let w = w as i64;
    let mut keys: Vec<Key> = Vec::new();
    for s in 0..d {
        for t in s..d {
            for delta in -2 * r..=2 * r {
                if s < t || delta > 0 {
                    keys.push((s, t, delta));
                }
            }
        }
    }
    let cells = (2 * w as usize + 1) * d;
    let targets =
        (q as u128)
            .checked_pow(cells as u32)
            .map(|t| t - 1)
            .ok_or(LieError::CapExceeded {
                size: u128::MAX,
                cap: opts.cap,
            })?;
    let max_active = opts.max_active_keys.unwrap_or(keys.len()).min(keys.len());
    let mut total: u128 = 0;
    for a in 0..=max_active {
        let n = binomial(keys.len(), a)
            .saturating_mul(targets.checked_pow(a as u32).unwrap_or(u128::MAX));
        total = total.saturating_add(n);
    }
    if total > opts.cap {
        return Err(LieError::CapExceeded {
            size: total,
            cap: opts.cap,
        });
    }

    let decode = |idx: u128| -> Config {
        let mut v = idx + 1;
        let mut entries = Vec::new();
        for c in 0..cells {
            let digit = (v % q as u128) as i64;
            v /= q as u128;
            if digit != 0 {
                let mut vec = vec![0i64; d];
                vec[c % d] = digit;
                entries.push(((c / d) as i64 - w, vec));
            }
        }
        Config::from_parts(field, &vec![0; d], entries).expect("d tracks")
    };

    let mut found: Vec<(Vec<usize>, u128, BracketRule)> = Vec::new();
    let mut recheck_failures = 0;
    for a in 0..=max_active {
        for subset in combinations(keys.len(), a) {
            let count = targets.pow(a as u32);
            let hits: Vec<(u128, BracketRule, bool)> = (0..count)
                .into_par_iter()
                .filter_map(|idx| {
                    let mut rest = idx;
                    let mut table: HashMap<Key, Config> = HashMap::new();
                    for &k in &subset {
                        table.insert(keys[k], decode(rest % targets));
                        rest /= targets;
                    }
                    if !sparse_jacobi_holds(field, d, &table) {
                        return None;
                    }
                    let rules = subset
                        .iter()
                        .map(|&k| {
                            let (s, t, delta) = keys[k];
                            OrbitRule {
                                s,
                                t,
                                delta,
                                target: table[&keys[k]].clone(),
                            }
                        })
                        .collect();
                    let rule = BracketRule::orbit(field, d, rules).expect("well-formed candidate");
                    let ok = verify_axioms(&rule, w.max(1) as u64)
                        .map(|rep| rep.all_ok())
                        .unwrap_or(false);
                    Some((idx, rule, ok))
                })
                .collect();
            for (idx, rule, ok) in hits {
                if ok {
                    found.push((subset.clone(), idx, rule));
                } else {
                    recheck_failures += 1;
                }
            }
        }
    }
    found.sort_by(|x, y| (x.0.len(), &x.0, x.1).cmp(&(y.0.len(), &y.0, y.1)));
    Ok(SearchResult {
        rules: found.into_iter().map(|(_, _, r)| r).collect(),
        keys: keys.len(),
        candidates: total,
        recheck_failures,
    })
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

fn add_into(field: PrimeField, acc: &mut Sparse, key: (i64, usize), c: u32) {
    if c == 0 {
        return;
    }
    let e = acc.entry(key).or_insert(0);
    *e = field.add(*e, c);
    if *e == 0 {
        acc.remove(&key);
    }
}

/// `[e^(s)_g, e^(t)_h]` scaled by `c`, added into `acc`.
fn basis_bracket(
    field: PrimeField,
    table: &HashMap<Key, Config>,
    (g, s): (i64, usize),
    (h, t): (i64, usize),
    c: u32,
    acc: &mut Sparse,
) {
    let delta = h - g;
    let (target, origin, sign) = if s < t || (s == t && delta > 0) {
        (table.get(&(s, t, delta)), g, c)
    } else if s == t && delta == 0 {
        return;
    } else {
        (table.get(&(t, s, -delta)), h, field.neg(c))
    };
    if let Some(target) = target {
        for (&p, v) in target.deviation() {
            for (tr, &a) in v.iter().enumerate() {
                add_into(field, acc, (origin + p, tr), field.mul(a, sign));
            }
        }
    }
}

fn sparse_bracket(
    field: PrimeField,
    table: &HashMap<Key, Config>,
    x: &Sparse,
    y: &Sparse,
) -> Sparse {
    let mut acc = Sparse::new();
    for (&a, &ca) in x {
        for (&b, &cb) in y {
            basis_bracket(field, table, a, b, field.mul(ca, cb), &mut acc);
        }
    }
    acc
}

/// Jacobi on all triples of basis elements whose first member sits at 0 and
/// whose others lie within `5R` of it.
fn sparse_jacobi_holds(field: PrimeField, d: usize, table: &HashMap<Key, Config>) -> bool {
    let radius = table
        .iter()
        .flat_map(|(&(_, _, delta), t)| {
            t.deviation()
                .keys()
                .map(move |&p| p.abs().max((p - delta).abs()))
        })
        .max()
        .unwrap_or(0);
    if radius == 0 && table.values().all(|t| t.deviation().is_empty()) {
        return true;
    }
    let reach = 5 * radius.max(1);
    let unit = |pos: i64, tr: usize| Sparse::from([((pos, tr), 1)]);
    let others: Vec<(i64, usize)> = (-reach..=reach)
        .flat_map(|p| (0..d).map(move |t| (p, t)))
        .collect();
    for tx in 0..d {
        let x = unit(0, tx);
        for &(py, ty) in &others {
            let y = unit(py, ty);
            let xy = sparse_bracket(field, table, &x, &y);
            for &(pz, tz) in &others {
                let z = unit(pz, tz);
                let mut sum = sparse_bracket(field, table, &xy, &z);
                let yz = sparse_bracket(field, table, &y, &z);
                for (k, v) in sparse_bracket(field, table, &yz, &x) {
                    add_into(field, &mut sum, k, v);
                }
                let zx = sparse_bracket(field, table, &z, &x);
                for (k, v) in sparse_bracket(field, table, &zx, &y) {
                    add_into(field, &mut sum, k, v);
                }
                if !sum.is_empty() {
                    return false;
                }
            }
        }
    }
    true
}
