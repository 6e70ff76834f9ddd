use super::{BracketRule, LieError};
use crate::field::{BinarySubspace, BitRow};
use crate::shift::Config;

/// Basis bracket table of a binary bracket restricted to the cells
/// `[-window, window]`. Coordinate `(pos + window) * d + track`.
#[derive(Debug, Clone)]
pub struct WindowAlgebra {
    window: i64,
    d: usize,
    /// `None` where the bracket leaves the window.
    table: Vec<Vec<Option<BitRow>>>,
}

impl WindowAlgebra {
    pub fn new(rule: &BracketRule, window: u64) -> Result<Self, LieError> {
        if rule.field().modulus() != 2 {
            return Err(LieError::Unsupported(
                "ideal closures are computed over GF(2)".into(),
            ));
        }
        if rule.has_constant_factor() {
            return Err(LieError::Unsupported(
                "ideal closures need a plain vector shift".into(),
            ));
        }
        let window = window as i64;
        let d = rule.vector_tracks();
        let width = (2 * window as usize + 1) * d;
        let basis: Vec<Config> = (0..width)
            .map(|i| rule.basis(i % d, (i / d) as i64 - window))
            .collect::<Result<_, _>>()?;
        let mut table = Vec::with_capacity(width);
        for bi in &basis {
            let mut row = Vec::with_capacity(width);
            for bj in &basis {
                let v = rule.eval(bi, bj)?;
                row.push(to_row(&v, window, d, width));
            }
            table.push(row);
        }
        Ok(Self { window, d, table })
    }

    pub fn width(&self) -> usize {
        self.table.len()
    }

    pub fn window(&self) -> i64 {
        self.window
    }

    /// Coordinates of a configuration, or an error if it leaves the window.
    pub fn row_of(&self, x: &Config) -> Result<BitRow, LieError> {
        to_row(x, self.window, self.d, self.width()).ok_or(LieError::WindowTooSmall {
            window: self.window,
        })
    }

    /// `[v, e_j]`.
    pub fn bracket_with(&self, v: &BitRow, j: usize) -> Result<BitRow, LieError> {
        let mut out = BitRow::zeros(self.width());
        for i in v.ones() {
            let t = self.table[i][j].as_ref().ok_or(LieError::WindowTooSmall {
                window: self.window,
            })?;
            out.xor_assign(t);
        }
        Ok(out)
    }

    fn saturate(&self, gens: &[BitRow], lemma: bool) -> Result<BinarySubspace, LieError> {
        let mut space = BinarySubspace::new(self.width());
        for b in gens {
            let partners: Vec<usize> = if lemma {
                // only basis elements that do not commute with b
                (0..self.width())
                    .filter_map(|j| match self.bracket_with(b, j) {
                        Ok(v) if v.is_zero() => None,
                        other => Some(other.map(|_| j)),
                    })
                    .collect::<Result<_, _>>()?
            } else {
                (0..self.width()).collect()
            };
            let mut queue = Vec::new();
            if space.insert(b)? {
                queue.push(b.clone());
            }
            while let Some(v) = queue.pop() {
                for &j in &partners {
                    let w = self.bracket_with(&v, j)?;
                    if space.insert(&w)? {
                        queue.push(w);
                    }
                }
            }
        }
        Ok(space)
    }

    /// Span of `[b, e_j1, ..., e_jk]` with every `[b, e_jl] != 0`.
    pub fn closure_lemma(&self, gens: &[BitRow]) -> Result<BinarySubspace, LieError> {
        self.saturate(gens, true)
    }

    /// Saturation under brackets with every basis element of the window.
    pub fn closure_brute(&self, gens: &[BitRow]) -> Result<BinarySubspace, LieError> {
        self.saturate(gens, false)
    }
}

fn to_row(x: &Config, window: i64, d: usize, width: usize) -> Option<BitRow> {
    if !x.is_finite_support() {
        return None;
    }
    let mut row = BitRow::zeros(width);
    for (&p, v) in x.deviation() {
        if p.abs() > window {
            return None;
        }
        for (t, &a) in v.iter().enumerate() {
            if a != 0 {
                row.set((p + window) as usize * d + t, true);
            }
        }
    }
    Some(row)
}

/// The ideal generated by `gens` inside the window, through the
/// non-commuting partners of each generator only.
pub fn ideal_closure(
    gens: &[Config],
    rule: &BracketRule,
    window: u64,
) -> Result<BinarySubspace, LieError> {
    let alg = WindowAlgebra::new(rule, window)?;
    let rows: Vec<BitRow> = gens
        .iter()
        .map(|g| alg.row_of(g))
        .collect::<Result<_, _>>()?;
    alg.closure_lemma(&rows)
}

/// The same ideal, saturating against every basis element of the window.
pub fn ideal_closure_brute(
    gens: &[Config],
    rule: &BracketRule,
    window: u64,
) -> Result<BinarySubspace, LieError> {
    let alg = WindowAlgebra::new(rule, window)?;
    let rows: Vec<BitRow> = gens
        .iter()
        .map(|g| alg.row_of(g))
        .collect::<Result<_, _>>()?;
    alg.closure_brute(&rows)
}
