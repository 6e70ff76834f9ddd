//! The first Grigorchuk group acting on the binary tree.
//!
//! Wreath recursion: `a` swaps the two subtrees and has trivial sections;
//! `b = (a, c)`, `c = (a, d)`, `d = (1, b)` are inactive at the root.
//! Elements are stored as portraits contracted onto the nucleus
//! `{1, a, b, c, d}`: any node whose activity and sections coincide with
//! those of a nucleus element is replaced by that leaf. Contracted portraits
//! are unique, so structural equality is group equality.

use std::fmt;
use std::hash::{DefaultHasher, Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

use super::GroupElement;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    A,
    B,
    C,
    D,
}

impl Generator {
    pub const ALL: [Generator; 4] = [Generator::A, Generator::B, Generator::C, Generator::D];

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'a' => Some(Generator::A),
            'b' => Some(Generator::B),
            'c' => Some(Generator::C),
            'd' => Some(Generator::D),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Generator::A => 'a',
            Generator::B => 'b',
            Generator::C => 'c',
            Generator::D => 'd',
        }
    }

    /// Parses a word such as `"ada"`. The empty string is the empty word.
    pub fn parse_word(s: &str) -> Result<Vec<Generator>, ParseGrigError> {
        s.chars()
            .map(|c| Generator::from_char(c).ok_or(ParseGrigError::BadLetter(c)))
            .collect()
    }

    pub fn nucleus(self) -> Nucleus {
        match self {
            Generator::A => Nucleus::A,
            Generator::B => Nucleus::B,
            Generator::C => Nucleus::C,
            Generator::D => Nucleus::D,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseGrigError {
    #[error("unexpected letter {0:?}")]
    BadLetter(char),
    #[error("malformed portrait at byte {0}")]
    Malformed(usize),
    #[error("portrait is not contracted")]
    NotContracted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Nucleus {
    One,
    A,
    B,
    C,
    D,
}

impl Nucleus {
    fn active(self) -> bool {
        self == Nucleus::A
    }

    fn sections(self) -> [Nucleus; 2] {
        use Nucleus::*;
        match self {
            One | A => [One, One],
            B => [A, C],
            C => [A, D],
            D => [One, B],
        }
    }

    fn as_char(self) -> char {
        match self {
            Nucleus::One => '1',
            Nucleus::A => 'a',
            Nucleus::B => 'b',
            Nucleus::C => 'c',
            Nucleus::D => 'd',
        }
    }

    /// Products that the recursion cannot resolve by descending: `aa` and
    /// the Klein four-group `{1, b, c, d}`.
    fn short_product(self, other: Nucleus) -> Option<Nucleus> {
        use Nucleus::*;
        match (self, other) {
            (One, x) | (x, One) => Some(x),
            (x, y) if x == y => Some(One),
            (A, _) | (_, A) => None,
            (B, C) | (C, B) => Some(D),
            (B, D) | (D, B) => Some(C),
            (C, D) | (D, C) => Some(B),
            _ => unreachable!(),
        }
    }
}

/// A contracted portrait of an element of the Grigorchuk group.
#[derive(Clone)]
pub enum GrigElement {
    Leaf(Nucleus),
    Node(Arc<Node>),
}

pub struct Node {
    active: bool,
    children: [GrigElement; 2],
    hash: u64,
    size: usize,
}

impl PartialEq for GrigElement {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (GrigElement::Leaf(x), GrigElement::Leaf(y)) => x == y,
            (GrigElement::Node(x), GrigElement::Node(y)) => {
                Arc::ptr_eq(x, y)
                    || (x.hash == y.hash
                        && x.active == y.active
                        && x.size == y.size
                        && x.children == y.children)
            }
            _ => false,
        }
    }
}

impl Eq for GrigElement {}

impl Hash for GrigElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            GrigElement::Leaf(x) => {
                state.write_u8(0);
                x.hash(state);
            }
            GrigElement::Node(n) => {
                state.write_u8(1);
                state.write_u64(n.hash);
            }
        }
    }
}

impl GrigElement {
    pub const ONE: GrigElement = GrigElement::Leaf(Nucleus::One);

    pub fn generator(g: Generator) -> Self {
        GrigElement::Leaf(g.nucleus())
    }

    /// Product of the generators of `word`, read left to right.
    pub fn from_word(word: &[Generator]) -> Self {
        word.iter().fold(GrigElement::ONE, |acc, &g| {
            acc.mul(&GrigElement::generator(g))
        })
    }

    pub fn parse_word(s: &str) -> Result<Self, ParseGrigError> {
        Ok(Self::from_word(&Generator::parse_word(s)?))
    }

    /// Builds a node and contracts it onto the nucleus when possible.
    pub fn node(active: bool, left: GrigElement, right: GrigElement) -> Self {
        use GrigElement::Leaf;
        use Nucleus::*;
        if let (Leaf(l), Leaf(r)) = (&left, &right) {
            let hit = match (active, *l, *r) {
                (false, One, One) => Some(One),
                (true, One, One) => Some(A),
                (false, A, C) => Some(B),
                (false, A, D) => Some(C),
                (false, One, B) => Some(D),
                _ => None,
            };
            if let Some(x) = hit {
                return Leaf(x);
            }
        }
        let mut h = DefaultHasher::new();
        active.hash(&mut h);
        left.hash(&mut h);
        right.hash(&mut h);
        let size = 1 + left.size() + right.size();
        GrigElement::Node(Arc::new(Node {
            active,
            children: [left, right],
            hash: h.finish(),
            size,
        }))
    }

    /// Whether the root is swapped.
    pub fn is_active(&self) -> bool {
        match self {
            GrigElement::Leaf(x) => x.active(),
            GrigElement::Node(n) => n.active,
        }
    }

    /// Section at the root letter `x` (0 or 1).
    pub fn section(&self, x: usize) -> GrigElement {
        match self {
            GrigElement::Leaf(n) => GrigElement::Leaf(n.sections()[x]),
            GrigElement::Node(n) => n.children[x].clone(),
        }
    }

    /// Number of portrait nodes, leaves included.
    pub fn size(&self) -> usize {
        match self {
            GrigElement::Leaf(_) => 1,
            GrigElement::Node(n) => n.size,
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            GrigElement::Leaf(_) => 0,
            GrigElement::Node(n) => 1 + n.children[0].depth().max(n.children[1].depth()),
        }
    }

    pub fn as_leaf(&self) -> Option<Nucleus> {
        match self {
            GrigElement::Leaf(x) => Some(*x),
            GrigElement::Node(_) => None,
        }
    }

    /// Identity test by the section recursion: trivial iff the root is
    /// inactive and both sections are trivial.
    pub fn is_trivial(&self) -> bool {
        match self {
            GrigElement::Leaf(x) => *x == Nucleus::One,
            GrigElement::Node(n) => !n.active && n.children.iter().all(GrigElement::is_trivial),
        }
    }

    /// Image of a finite binary word (`false` = 0, `true` = 1).
    pub fn act(&self, word: &[bool]) -> Vec<bool> {
        let mut out = Vec::with_capacity(word.len());
        let mut g = self.clone();
        for &x in word {
            if g == GrigElement::ONE {
                out.push(x);
                continue;
            }
            out.push(x ^ g.is_active());
            g = g.section(x as usize);
        }
        out
    }

    /// Image of the ray `prefix · 1^∞`, returned as a prefix followed by
    /// `1^∞` (not yet stripped of trailing ones).
    pub fn act_ray(&self, prefix: &[bool]) -> Vec<bool> {
        let mut out = self.act(prefix);
        let mut g = self.clone();
        for &x in prefix {
            g = g.section(x as usize);
        }
        // Past the prefix the input is all ones.
        loop {
            match g {
                GrigElement::Leaf(Nucleus::A) => {
                    out.push(false);
                    return out;
                }
                GrigElement::Leaf(_) => return out,
                GrigElement::Node(ref n) => {
                    out.push(!n.active);
                    let next = n.children[1].clone();
                    g = next;
                }
            }
        }
    }

    /// Parses the canonical serialization produced by [`GroupElement::canonical`].
    pub fn parse_canonical(s: &str) -> Result<Self, ParseGrigError> {
        let bytes = s.as_bytes();
        let (g, end) = parse_at(bytes, 0)?;
        if end != bytes.len() {
            return Err(ParseGrigError::Malformed(end));
        }
        Ok(g)
    }

    fn write_canonical(&self, out: &mut String) {
        match self {
            GrigElement::Leaf(x) => out.push(x.as_char()),
            GrigElement::Node(n) => {
                out.push('(');
                out.push(if n.active { 's' } else { 'e' });
                out.push(' ');
                n.children[0].write_canonical(out);
                out.push(' ');
                n.children[1].write_canonical(out);
                out.push(')');
            }
        }
    }
}

fn parse_at(b: &[u8], i: usize) -> Result<(GrigElement, usize), ParseGrigError> {
    let leaf = |x| Ok((GrigElement::Leaf(x), i + 1));
    match b.get(i) {
        Some(b'1') => leaf(Nucleus::One),
        Some(b'a') => leaf(Nucleus::A),
        Some(b'b') => leaf(Nucleus::B),
        Some(b'c') => leaf(Nucleus::C),
        Some(b'd') => leaf(Nucleus::D),
        Some(b'(') => {
            let active = match b.get(i + 1) {
                Some(b's') => true,
                Some(b'e') => false,
                _ => return Err(ParseGrigError::Malformed(i + 1)),
            };
            if b.get(i + 2) != Some(&b' ') {
                return Err(ParseGrigError::Malformed(i + 2));
            }
            let (l, j) = parse_at(b, i + 3)?;
            if b.get(j) != Some(&b' ') {
                return Err(ParseGrigError::Malformed(j));
            }
            let (r, k) = parse_at(b, j + 1)?;
            if b.get(k) != Some(&b')') {
                return Err(ParseGrigError::Malformed(k));
            }
            let g = GrigElement::node(active, l, r);
            if g.as_leaf().is_some() {
                return Err(ParseGrigError::NotContracted);
            }
            Ok((g, k + 1))
        }
        _ => Err(ParseGrigError::Malformed(i)),
    }
}

impl GroupElement for GrigElement {
    fn identity() -> Self {
        GrigElement::ONE
    }

    fn mul(&self, other: &Self) -> Self {
        use GrigElement::Leaf;
        match (self, other) {
            (Leaf(Nucleus::One), _) => return other.clone(),
            (_, Leaf(Nucleus::One)) => return self.clone(),
            (Leaf(x), Leaf(y)) => {
                if let Some(z) = x.short_product(*y) {
                    return Leaf(z);
                }
            }
            _ => {}
        }
        // (gh)|_x = g|_x · h|_{x^g}
        let flip = self.is_active() as usize;
        let left = self.section(0).mul(&other.section(flip));
        let right = self.section(1).mul(&other.section(1 - flip));
        GrigElement::node(self.is_active() ^ other.is_active(), left, right)
    }

    fn inv(&self) -> Self {
        match self {
            GrigElement::Leaf(_) => self.clone(),
            GrigElement::Node(n) => {
                let [l, r] = &n.children;
                if n.active {
                    GrigElement::node(true, r.inv(), l.inv())
                } else {
                    GrigElement::node(false, l.inv(), r.inv())
                }
            }
        }
    }

    fn canonical(&self) -> String {
        let mut s = String::with_capacity(self.size() * 4);
        self.write_canonical(&mut s);
        s
    }

    fn is_identity(&self) -> bool {
        self.is_trivial()
    }
}

impl fmt::Debug for GrigElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

impl fmt::Display for GrigElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}
