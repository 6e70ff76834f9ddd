//! The three concrete groups used by the group-ring and shift code: the
//! integers, the XOR group `⊕ℕ ℤ₂`, and the first Grigorchuk group.

mod grigorchuk;

use std::fmt;
use std::hash::Hash;

pub use grigorchuk::{Generator, GrigElement, Nucleus, ParseGrigError};

/// A group element with a canonical textual form.
///
/// `mul` is written left to right: `g.mul(h)` is "g, then h" for the right
/// actions used throughout the crate.
pub trait GroupElement: Clone + Eq + Hash + fmt::Debug + Send + Sync {
    fn identity() -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn inv(&self) -> Self;
    /// Canonical serialization. Equal elements serialize identically.
    fn canonical(&self) -> String;

    fn is_identity(&self) -> bool {
        *self == Self::identity()
    }
}

/// An element of the infinite cyclic group, written additively.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntElement(pub i64);

impl GroupElement for IntElement {
    fn identity() -> Self {
        IntElement(0)
    }

    fn mul(&self, other: &Self) -> Self {
        IntElement(self.0 + other.0)
    }

    fn inv(&self) -> Self {
        IntElement(-self.0)
    }

    fn canonical(&self) -> String {
        self.0.to_string()
    }
}

/// A finite subset of ℕ under symmetric difference; equivalently a natural
/// number under bitwise XOR.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct XorElement {
    // no trailing zero words
    words: Vec<u64>,
}

impl XorElement {
    pub fn from_bits<I: IntoIterator<Item = usize>>(bits: I) -> Self {
        let mut x = Self::default();
        for b in bits {
            let w = b / 64;
            if x.words.len() <= w {
                x.words.resize(w + 1, 0);
            }
            x.words[w] ^= 1 << (b % 64);
        }
        x.trim();
        x
    }

    pub fn from_u64(n: u64) -> Self {
        let mut x = Self { words: vec![n] };
        x.trim();
        x
    }

    /// The value as a natural number, if it fits.
    pub fn as_u64(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    pub fn bits(&self) -> Vec<usize> {
        self.words
            .iter()
            .enumerate()
            .flat_map(|(i, &w)| {
                (0..64)
                    .filter(move |b| (w >> b) & 1 == 1)
                    .map(move |b| i * 64 + b)
            })
            .collect()
    }

    pub fn contains(&self, bit: usize) -> bool {
        self.words
            .get(bit / 64)
            .is_some_and(|w| (w >> (bit % 64)) & 1 == 1)
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }
}

impl fmt::Debug for XorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.bits()).finish()
    }
}

impl GroupElement for XorElement {
    fn identity() -> Self {
        Self::default()
    }

    fn mul(&self, other: &Self) -> Self {
        let (long, short) = if self.words.len() >= other.words.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut words = long.words.clone();
        for (a, b) in words.iter_mut().zip(&short.words) {
            *a ^= b;
        }
        let mut x = Self { words };
        x.trim();
        x
    }

    fn inv(&self) -> Self {
        self.clone()
    }

    fn canonical(&self) -> String {
        let bits: Vec<String> = self.bits().iter().map(|b| b.to_string()).collect();
        format!("{{{}}}", bits.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn xor_examples() {
        let x = XorElement::from_bits([0, 2]);
        let y = XorElement::from_bits([2, 3]);
        assert_eq!(x.mul(&y), XorElement::from_bits([0, 3]));
        assert_eq!(
            XorElement::from_bits([0]).mul(&XorElement::identity()),
            XorElement::from_bits([0])
        );
        assert_eq!(x.canonical(), "{0,2}");
        assert_eq!(XorElement::from_u64(5), x);
        assert_eq!(XorElement::from_bits([0, 0]), XorElement::identity());
    }

    #[test]
    fn int_group() {
        assert_eq!(IntElement(3).mul(&IntElement(-5)), IntElement(-2));
        assert!(IntElement(4).mul(&IntElement(4).inv()).is_identity());
    }

    proptest! {
        #[test]
        fn xor_is_involution(bits in prop::collection::vec(0usize..300, 0..20)) {
            let x = XorElement::from_bits(bits);
            prop_assert!(x.mul(&x).is_identity());
            prop_assert_eq!(x.mul(&x), XorElement::identity());
        }

        #[test]
        fn xor_matches_u64(a in any::<u64>(), b in any::<u64>()) {
            let x = XorElement::from_u64(a).mul(&XorElement::from_u64(b));
            prop_assert_eq!(x.as_u64(), Some(a ^ b));
        }
    }
}
