//! A vector shift on H = ⊕ℕ Z2 whose homoclinic group is not finitely
//! orbit-generated, checked on finite windows.
//!
//! Elements of H are identified with natural numbers through their binary
//! expansions, so configurations are binary words indexed by ℕ and an element
//! `h` acts by `x ↦ (i ↦ x[i XOR h])`. The generator `2^k` swaps adjacent
//! blocks of length `2^k`.

use thiserror::Error;

use crate::field::{BinarySubspace, BitRow, FieldError};

pub const DEFAULT_LEVEL_CAP: usize = 4;
pub const MAX_LEVEL_CAP: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomoclinicError {
    #[error("level {level} exceeds the cap {cap}")]
    LevelCap { level: usize, cap: usize },
    #[error("window {window} exceeds the cap {cap}")]
    WindowCap { window: usize, cap: usize },
    #[error("level cap {0} is above the hard maximum {MAX_LEVEL_CAP}")]
    BadCap(usize),
    #[error(transparent)]
    Field(#[from] FieldError),
}

pub type Result<T> = std::result::Result<T, HomoclinicError>;

/// Size limits. Level `n` may be used when `n <= level_cap`; windows may be as
/// long as `m_{level_cap + 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    level_cap: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            level_cap: DEFAULT_LEVEL_CAP,
        }
    }
}

impl Limits {
    pub fn new(level_cap: usize) -> Result<Self> {
        if level_cap > MAX_LEVEL_CAP {
            return Err(HomoclinicError::BadCap(level_cap));
        }
        Ok(Self { level_cap })
    }

    pub fn level_cap(self) -> usize {
        self.level_cap
    }

    pub fn window_cap(self) -> usize {
        block_size(self.level_cap + 1)
    }

    fn check_level(self, level: usize) -> Result<()> {
        if level > self.level_cap {
            return Err(HomoclinicError::LevelCap {
                level,
                cap: self.level_cap,
            });
        }
        Ok(())
    }

    fn check_window(self, window: usize) -> Result<()> {
        if window > self.window_cap() {
            return Err(HomoclinicError::WindowCap {
                window,
                cap: self.window_cap(),
            });
        }
        Ok(())
    }
}

/// `m_i = 4^i`.
pub fn block_size(i: usize) -> usize {
    1usize << (2 * i)
}

/// The words `u_0 .. u_n` with `|u_i| = m_i`.
#[derive(Debug, Clone)]
pub struct WordLadder {
    u: Vec<BitRow>,
}

impl WordLadder {
    pub fn new(n: usize, limits: Limits) -> Result<Self> {
        limits.check_window(block_size(n))?;
        let mut u = vec![BitRow::parse("1").expect("literal")];
        for i in 1..=n {
            let prev = &u[i - 1];
            let half = block_size(i - 1);
            let mut next = BitRow::zeros(block_size(i));
            for p in prev.ones() {
                next.set(2 * half + p, true);
                next.set(3 * half + p, true);
            }
            u.push(next);
        }
        Ok(Self { u })
    }

    pub fn levels(&self) -> usize {
        self.u.len() - 1
    }

    pub fn u(&self, i: usize) -> &BitRow {
        &self.u[i]
    }

    /// `v_i = u_i^4`.
    pub fn v(&self, i: usize) -> BitRow {
        let u = &self.u[i];
        let m = u.width();
        let mut out = BitRow::zeros(4 * m);
        for p in u.ones() {
            for b in 0..4 {
                out.set(b * m + p, true);
            }
        }
        out
    }
}

pub fn gen_u(n: usize, limits: Limits) -> Result<BitRow> {
    Ok(WordLadder::new(n, limits)?.u(n).clone())
}

pub fn gen_v(n: usize, limits: Limits) -> Result<BitRow> {
    limits.check_window(block_size(n + 1))?;
    Ok(WordLadder::new(n, limits)?.v(n))
}

/// Action of the generator `2^k`: swaps `[2^{k+1}j, 2^{k+1}j + 2^k)` with the
/// following block of the same length. The word is read as zero past its end
/// and the result is cut back to the original width.
pub fn h_act(k: u32, w: &BitRow) -> BitRow {
    h_act_element(1u64 << k, w)
}

/// Action of an arbitrary element of H, given as a bitset of generators.
pub fn h_act_element(h: u64, w: &BitRow) -> BitRow {
    let mut out = BitRow::zeros(w.width());
    for p in w.ones() {
        let t = (p as u64 ^ h) as usize;
        if t < w.width() {
            out.set(t, true);
        }
    }
    out
}

/// `s^j` applied to `w` and restricted to `[0, window)`.
pub fn shift_into(w: &BitRow, j: usize, window: usize) -> BitRow {
    let mut out = BitRow::zeros(window);
    for p in w.ones() {
        if j + p < window {
            out.set(j + p, true);
        }
    }
    out
}

/// `X_n` restricted to `[0, window)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowSpace {
    pub level: usize,
    pub window: usize,
    pub space: BinarySubspace,
}

impl WindowSpace {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn contains(&self, w: &BitRow) -> Result<bool> {
        Ok(self.space.contains(w)?)
    }
}

/// The restrictions `s^{k m_{i+1}}(v_i)|[0, window)` for `i <= n`, skipping
/// those that miss the window.
pub fn window_generators(n: usize, window: usize, limits: Limits) -> Result<Vec<BitRow>> {
    limits.check_level(n)?;
    limits.check_window(window)?;
    let ladder = WordLadder::new(n, limits)?;
    let mut out = Vec::new();
    for i in 0..=n {
        let v = ladder.v(i);
        let step = block_size(i + 1);
        let mut j = 0;
        while j < window {
            out.push(shift_into(&v, j, window));
            j += step;
        }
    }
    Ok(out)
}

pub fn build_window_space(n: usize, window: usize, limits: Limits) -> Result<WindowSpace> {
    let gens = window_generators(n, window, limits)?;
    let space = BinarySubspace::spanned_by(window, &gens)?;
    Ok(WindowSpace {
        level: n,
        window,
        space,
    })
}

/// Dimensions behind the quadrupling and increment laws at level `n >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DimensionLaws {
    pub n: usize,
    /// dim of `X_{n-1}` on `[0, m_n)`.
    pub prev_small: usize,
    /// dim of `X_{n-1}` on `[0, m_{n+1})`.
    pub prev_large: usize,
    /// dim of `X_n` on `[0, m_{n+1})`.
    pub current: usize,
}

impl DimensionLaws {
    pub fn quadrupling(&self) -> bool {
        self.prev_large == 4 * self.prev_small
    }

    pub fn increment(&self) -> bool {
        self.current == self.prev_large + 1
    }
}

pub fn dimension_laws(n: usize, limits: Limits) -> Result<DimensionLaws> {
    assert!(n >= 1, "the laws start at level 1");
    let small = block_size(n);
    let large = block_size(n + 1);
    Ok(DimensionLaws {
        n,
        prev_small: build_window_space(n - 1, small, limits)?.dim(),
        prev_large: build_window_space(n - 1, large, limits)?.dim(),
        current: build_window_space(n, large, limits)?.dim(),
    })
}

/// A row of the `n, window, dim` table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DimRow {
    pub n: usize,
    pub window: usize,
    pub dim: usize,
}

/// For each `n <= level`, the dimension of `X_n` on windows `m_n` and `m_{n+1}`.
pub fn dimension_table(level: usize, limits: Limits) -> Result<Vec<DimRow>> {
    let mut rows = Vec::new();
    for n in 0..=level {
        for window in [block_size(n), block_size(n + 1)] {
            rows.push(DimRow {
                n,
                window,
                dim: build_window_space(n, window, limits)?.dim(),
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvarianceReport {
    pub level: usize,
    pub window: usize,
    pub translates: usize,
    /// Elements of `H_{2n+2}` whose image of `v_n` left the window space.
    pub violations: Vec<u64>,
}

impl InvarianceReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every `H_{2n+2}`-translate of `v_n` against `X_n` on `[0, m_{n+1})`.
pub fn check_invariance(n: usize, limits: Limits) -> Result<InvarianceReport> {
    let window = block_size(n + 1);
    let space = build_window_space(n, window, limits)?;
    let v = gen_v(n, limits)?;
    let mut violations = Vec::new();
    let count = 1u64 << (2 * n + 2);
    for h in 0..count {
        if !space.contains(&h_act_element(h, &v))? {
            violations.push(h);
        }
    }
    Ok(InvarianceReport {
        level: n,
        window,
        translates: count as usize,
        violations,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomoclinicReport {
    pub level: usize,
    /// Spanning-set elements of `X_{i+1}` on `[0, m_{i+2})` that were checked.
    pub generators: usize,
    /// Of those, how many have a head outside `X_i`.
    pub outside: usize,
    /// Generators with a head outside `X_i` and a zero tail.
    pub generator_violations: Vec<BitRow>,
    /// Dimension of the part of the window space with zero tail.
    pub zero_tail_dim: usize,
    /// Basis vectors of that part whose head lies outside `X_i`.
    pub subspace_violations: Vec<BitRow>,
}

impl HomoclinicReport {
    pub fn ok(&self) -> bool {
        self.generator_violations.is_empty() && self.subspace_violations.is_empty()
    }
}

/// Checks on `[0, m_{i+2})` that nothing in `X_{i+1}` with a zero tail
/// `[m_{i+1}, m_{i+2})` has a head outside `X_i`.
///
/// Two passes: the generator sweep looks at each spanning vector, and the
/// subspace pass covers every element by eliminating with the tail columns
/// ordered first, so that the rows pivoting in the head span exactly the
/// zero-tail part.
pub fn check_no_new_homoclinics(i: usize, limits: Limits) -> Result<HomoclinicReport> {
    limits.check_level(i + 1)?;
    let head = block_size(i + 1);
    let window = block_size(i + 2);
    let tail = window - head;
    let base = build_window_space(i, head, limits)?;
    let gens = window_generators(i + 1, window, limits)?;

    let mut outside = 0;
    let mut generator_violations = Vec::new();
    for g in &gens {
        if !base.contains(&g.slice(0, head))? {
            outside += 1;
            if g.slice(head, window).is_zero() {
                generator_violations.push(g.clone());
            }
        }
    }

    let tail_first = |g: &BitRow| {
        let mut r = BitRow::zeros(window);
        for p in g.ones() {
            r.set(if p >= head { p - head } else { tail + p }, true);
        }
        r
    };
    let reordered: Vec<BitRow> = gens.iter().map(tail_first).collect();
    let space = BinarySubspace::spanned_by(window, &reordered)?;
    let mut zero_tail_dim = 0;
    let mut subspace_violations = Vec::new();
    for (row, &p) in space.basis().iter().zip(space.pivots()) {
        if p < tail {
            continue;
        }
        zero_tail_dim += 1;
        let h = row.slice(tail, window);
        if !base.contains(&h)? {
            subspace_violations.push(h);
        }
    }

    Ok(HomoclinicReport {
        level: i,
        generators: gens.len(),
        outside,
        generator_violations,
        zero_tail_dim,
        subspace_violations,
    })
}
