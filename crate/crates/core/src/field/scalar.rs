use std::fmt;

use super::FieldError;

/// Largest modulus accepted. Products of two residues stay below 2^30.
const MAX_MODULUS: u32 = 1 << 15;

/// A prime field GF(q). Values are plain residues `0..q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    q: u32,
}

impl PrimeField {
    pub fn new(q: u32) -> Result<Self, FieldError> {
        if !(2..MAX_MODULUS).contains(&q) || !is_prime(q) {
            return Err(FieldError::BadModulus(q));
        }
        Ok(Self { q })
    }

    /// GF(2).
    pub const fn binary() -> Self {
        Self { q: 2 }
    }

    #[inline]
    pub fn modulus(self) -> u32 {
        self.q
    }

    #[inline]
    pub fn reduce(self, v: i64) -> u32 {
        v.rem_euclid(self.q as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.q - b
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        (a * b) % self.q
    }

    pub fn pow(self, mut a: u32, mut e: u64) -> u32 {
        let mut acc = 1 % self.q;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    pub fn inv(self, a: u32) -> Result<u32, FieldError> {
        if a.is_multiple_of(self.q) {
            return Err(FieldError::ZeroInverse);
        }
        Ok(self.pow(a, (self.q - 2) as u64))
    }

    pub fn scalar(self, v: i64) -> Scalar {
        Scalar {
            value: self.reduce(v),
            modulus: self.q,
        }
    }

    /// Iterates over all field elements.
    pub fn elements(self) -> impl Iterator<Item = u32> {
        0..self.q
    }
}

fn is_prime(q: u32) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= q {
        if q.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// An element of GF(q) carrying its modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Scalar {
    value: u32,
    modulus: u32,
}

impl Scalar {
    pub fn new(value: i64, modulus: u32) -> Result<Self, FieldError> {
        Ok(PrimeField::new(modulus)?.scalar(value))
    }

    pub fn zero(field: PrimeField) -> Self {
        field.scalar(0)
    }

    pub fn one(field: PrimeField) -> Self {
        field.scalar(1)
    }

    #[inline]
    pub fn value(self) -> u32 {
        self.value
    }

    #[inline]
    pub fn modulus(self) -> u32 {
        self.modulus
    }

    pub fn field(self) -> PrimeField {
        PrimeField { q: self.modulus }
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    fn check(self, other: Scalar) -> Result<PrimeField, FieldError> {
        if self.modulus != other.modulus {
            return Err(FieldError::ModulusMismatch(self.modulus, other.modulus));
        }
        Ok(self.field())
    }

    pub fn add(self, other: Scalar) -> Result<Scalar, FieldError> {
        let f = self.check(other)?;
        Ok(Scalar {
            value: f.add(self.value, other.value),
            modulus: self.modulus,
        })
    }

    pub fn sub(self, other: Scalar) -> Result<Scalar, FieldError> {
        let f = self.check(other)?;
        Ok(Scalar {
            value: f.sub(self.value, other.value),
            modulus: self.modulus,
        })
    }

    pub fn mul(self, other: Scalar) -> Result<Scalar, FieldError> {
        let f = self.check(other)?;
        Ok(Scalar {
            value: f.mul(self.value, other.value),
            modulus: self.modulus,
        })
    }

    pub fn neg(self) -> Scalar {
        Scalar {
            value: self.field().neg(self.value),
            modulus: self.modulus,
        }
    }

    pub fn inv(self) -> Result<Scalar, FieldError> {
        Ok(Scalar {
            value: self.field().inv(self.value)?,
            modulus: self.modulus,
        })
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn characteristic_two() {
        let a = Scalar::new(1, 2).unwrap();
        assert_eq!(a.add(a).unwrap().value(), 0);
    }

    #[test]
    fn inverse_mod_three() {
        let two = Scalar::new(2, 3).unwrap();
        assert_eq!(two.inv().unwrap().value(), 2);
    }

    #[test]
    fn errors() {
        let a = Scalar::new(1, 2).unwrap();
        let b = Scalar::new(1, 3).unwrap();
        assert_eq!(a.add(b), Err(FieldError::ModulusMismatch(2, 3)));
        assert_eq!(
            Scalar::new(0, 5).unwrap().inv(),
            Err(FieldError::ZeroInverse)
        );
        assert_eq!(PrimeField::new(4), Err(FieldError::BadModulus(4)));
        assert_eq!(
            PrimeField::new(1 << 15),
            Err(FieldError::BadModulus(1 << 15))
        );
    }

    #[test]
    fn axioms_exhaustive_small_fields() {
        for q in [2u32, 3, 5] {
            let f = PrimeField::new(q).unwrap();
            for a in f.elements() {
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                }
                for b in f.elements() {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.sub(f.add(a, b), b), a);
                    for c in f.elements() {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn largest_modulus_has_no_overflow() {
        let f = PrimeField::new(32749).unwrap();
        let a = 32748;
        assert_eq!(f.mul(a, a), 1);
        assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
    }

    proptest::proptest! {
        #[test]
        fn additive_inverse(a in 0i64..100_000, qi in 0usize..6) {
            let q = [2u32, 3, 5, 7, 101, 32749][qi];
            let x = Scalar::new(a, q).unwrap();
            proptest::prop_assert!(x.add(x.neg()).unwrap().is_zero());
        }
    }
}
