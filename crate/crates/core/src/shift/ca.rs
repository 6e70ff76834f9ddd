use std::collections::BTreeMap;
use std::fmt;

use super::{Config, PeriodicConfig, ShiftError};
use crate::field::{FieldError, PrimeField};

/// A Laurent polynomial over `GF(q)`; only nonzero coefficients are stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, u32>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(field: PrimeField, coeff: i64, exp: i64) -> Self {
        let mut p = Self::zero();
        p.add_term(field, exp, field.reduce(coeff));
        p
    }

    pub fn terms(&self) -> &BTreeMap<i64, u32> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, field: PrimeField, exp: i64, c: u32) {
        if c == 0 {
            return;
        }
        let e = self.terms.entry(exp).or_insert(0);
        *e = field.add(*e, c);
        if *e == 0 {
            self.terms.remove(&exp);
        }
    }

    pub fn add(&self, field: PrimeField, other: &Self) -> Self {
        let mut out = self.clone();
        for (&e, &c) in &other.terms {
            out.add_term(field, e, c);
        }
        out
    }

    pub fn neg(&self, field: PrimeField) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(&e, &c)| (e, field.neg(c)))
                .collect(),
        }
    }

    pub fn mul(&self, field: PrimeField, other: &Self) -> Self {
        let mut out = Self::zero();
        for (&e1, &c1) in &self.terms {
            for (&e2, &c2) in &other.terms {
                out.add_term(field, e1 + e2, field.mul(c1, c2));
            }
        }
        out
    }

    /// Value at `t = 1`.
    pub fn sum(&self, field: PrimeField) -> u32 {
        self.terms.values().fold(0, |a, &c| field.add(a, c))
    }

    pub fn max_abs_exp(&self) -> u64 {
        self.terms
            .keys()
            .map(|e| e.unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    /// `Some((c, k))` when the polynomial is `c t^k`.
    pub fn as_monomial(&self) -> Option<(u32, i64)> {
        match self.terms.iter().collect::<Vec<_>>().as_slice() {
            [(&e, &c)] => Some((c, e)),
            _ => None,
        }
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (&e, &c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            match (c, e) {
                (c, 0) => write!(f, "{c}")?,
                (1, 1) => f.write_str("x")?,
                (1, e) => write!(f, "x^{e}")?,
                (c, 1) => write!(f, "{c}*x")?,
                (c, e) => write!(f, "{c}*x^{e}")?,
            }
        }
        Ok(())
    }
}

/// A linear cellular automaton `(GF(q)^d)^Z -> (GF(q)^d')^Z`, applied as
/// `result(i) = sum_e M(e) x(i + e)`. The right shift is the monomial `x^-1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinearCA {
    field: PrimeField,
    entries: Vec<Vec<LaurentPoly>>,
    in_tracks: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderEvidence {
    FiniteOrder(u64),
    NoCollisionUpTo(u64),
}

impl LinearCA {
    pub fn from_entries(
        field: PrimeField,
        entries: Vec<Vec<LaurentPoly>>,
    ) -> Result<Self, ShiftError> {
        let in_tracks = entries.first().map_or(0, Vec::len);
        if let Some(r) = entries.iter().find(|r| r.len() != in_tracks) {
            return Err(ShiftError::TrackMismatch {
                expected: in_tracks,
                got: r.len(),
            });
        }
        Ok(Self {
            field,
            entries,
            in_tracks,
        })
    }

    pub fn diagonal(field: PrimeField, diag: Vec<LaurentPoly>) -> Self {
        let d = diag.len();
        let entries = diag
            .into_iter()
            .enumerate()
            .map(|(i, p)| {
                let mut row = vec![LaurentPoly::zero(); d];
                row[i] = p;
                row
            })
            .collect();
        Self {
            field,
            entries,
            in_tracks: d,
        }
    }

    pub fn identity(field: PrimeField, d: usize) -> Self {
        Self::diagonal(field, vec![LaurentPoly::monomial(field, 1, 0); d])
    }

    pub fn scalar(field: PrimeField, d: usize, c: i64) -> Self {
        Self::diagonal(field, vec![LaurentPoly::monomial(field, c, 0); d])
    }

    /// `s^k` on every track: `s^k(x)_i = x_{i-k}`.
    pub fn shift(field: PrimeField, d: usize, k: i64) -> Self {
        Self::diagonal(field, vec![LaurentPoly::monomial(field, 1, -k); d])
    }

    /// Shifts one track (0-based) right by one cell.
    pub fn partial_shift(field: PrimeField, d: usize, track: usize) -> Result<Self, ShiftError> {
        Self::partial_shift_by(field, d, track, 1)
    }

    /// Shifts one track right by `step` cells.
    pub fn partial_shift_by(
        field: PrimeField,
        d: usize,
        track: usize,
        step: i64,
    ) -> Result<Self, ShiftError> {
        if track >= d {
            return Err(ShiftError::TrackOutOfRange { track, d });
        }
        let mut diag = vec![LaurentPoly::monomial(field, 1, 0); d];
        diag[track] = LaurentPoly::monomial(field, 1, -step);
        Ok(Self::diagonal(field, diag))
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn out_tracks(&self) -> usize {
        self.entries.len()
    }

    pub fn in_tracks(&self) -> usize {
        self.in_tracks
    }

    pub fn entry(&self, row: usize, col: usize) -> &LaurentPoly {
        &self.entries[row][col]
    }

    pub fn radius(&self) -> u64 {
        self.entries
            .iter()
            .flatten()
            .map(LaurentPoly::max_abs_exp)
            .max()
            .unwrap_or(0)
    }

    pub fn is_square(&self) -> bool {
        self.out_tracks() == self.in_tracks
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Self::identity(self.field, self.in_tracks)
    }

    fn check_field(&self, other: PrimeField) -> Result<(), ShiftError> {
        if self.field != other {
            return Err(FieldError::ModulusMismatch(self.field.modulus(), other.modulus()).into());
        }
        Ok(())
    }

    pub fn apply(&self, x: &Config) -> Result<Config, ShiftError> {
        self.check_field(x.field())?;
        if x.tracks() != self.in_tracks {
            return Err(ShiftError::TrackMismatch {
                expected: self.in_tracks,
                got: x.tracks(),
            });
        }
        let f = self.field;
        let d_out = self.out_tracks();
        let mut out = Config::zero(f, d_out);
        let tail: Vec<u32> = self
            .entries
            .iter()
            .map(|row| {
                row.iter()
                    .zip(x.tail())
                    .fold(0, |acc, (p, &t)| f.add(acc, f.mul(p.sum(f), t)))
            })
            .collect();
        out.add_tail(&tail);
        for (&pos, v) in x.deviation() {
            for (r, row) in self.entries.iter().enumerate() {
                for (c, p) in row.iter().enumerate() {
                    if v[c] == 0 {
                        continue;
                    }
                    for (&e, &coef) in p.terms() {
                        let mut w = vec![0; d_out];
                        w[r] = f.mul(coef, v[c]);
                        out.add_at(pos - e, &w);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Wrapped convolution on an `n`-periodic configuration.
    pub fn apply_periodic(&self, x: &PeriodicConfig) -> Result<PeriodicConfig, ShiftError> {
        self.check_field(x.field())?;
        if x.tracks() != self.in_tracks {
            return Err(ShiftError::TrackMismatch {
                expected: self.in_tracks,
                got: x.tracks(),
            });
        }
        let f = self.field;
        let n = x.period();
        let mut out = PeriodicConfig::zero(f, n, self.out_tracks());
        for i in 0..n {
            for (r, row) in self.entries.iter().enumerate() {
                let mut acc = 0;
                for (c, p) in row.iter().enumerate() {
                    for (&e, &coef) in p.terms() {
                        acc = f.add(acc, f.mul(coef, x.get(i as i64 + e, c)));
                    }
                }
                out.set(i as i64, r, acc);
            }
        }
        Ok(out)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &LinearCA) -> Result<LinearCA, ShiftError> {
        self.check_field(other.field)?;
        if self.in_tracks != other.out_tracks() {
            return Err(ShiftError::TrackMismatch {
                expected: self.in_tracks,
                got: other.out_tracks(),
            });
        }
        let f = self.field;
        let entries = self
            .entries
            .iter()
            .map(|row| {
                (0..other.in_tracks)
                    .map(|j| {
                        row.iter()
                            .enumerate()
                            .fold(LaurentPoly::zero(), |acc, (k, p)| {
                                acc.add(f, &p.mul(f, &other.entries[k][j]))
                            })
                    })
                    .collect()
            })
            .collect();
        Ok(LinearCA {
            field: f,
            entries,
            in_tracks: other.in_tracks,
        })
    }

    pub fn power(&self, i: u64) -> Result<LinearCA, ShiftError> {
        self.require_square()?;
        let mut out = Self::identity(self.field, self.in_tracks);
        for _ in 0..i {
            out = out.compose(self)?;
        }
        Ok(out)
    }

    fn require_square(&self) -> Result<(), ShiftError> {
        if !self.is_square() {
            return Err(ShiftError::NotSquare {
                rows: self.out_tracks(),
                cols: self.in_tracks,
            });
        }
        Ok(())
    }

    /// Least `n <= bound` with `f^n = id`.
    pub fn order_evidence(&self, bound: u64) -> Result<OrderEvidence, ShiftError> {
        self.require_square()?;
        let mut p = self.clone();
        for n in 1..=bound {
            if p.is_identity() {
                return Ok(OrderEvidence::FiniteOrder(n));
            }
            p = p.compose(self)?;
        }
        Ok(OrderEvidence::NoCollisionUpTo(bound))
    }

    fn minor(m: &[Vec<LaurentPoly>], skip_row: usize, skip_col: usize) -> Vec<Vec<LaurentPoly>> {
        m.iter()
            .enumerate()
            .filter(|&(r, _)| r != skip_row)
            .map(|(_, row)| {
                row.iter()
                    .enumerate()
                    .filter(|&(c, _)| c != skip_col)
                    .map(|(_, p)| p.clone())
                    .collect()
            })
            .collect()
    }

    fn det(f: PrimeField, m: &[Vec<LaurentPoly>]) -> LaurentPoly {
        match m.len() {
            0 => LaurentPoly::monomial(f, 1, 0),
            1 => m[0][0].clone(),
            _ => {
                let mut acc = LaurentPoly::zero();
                for (c, p) in m[0].iter().enumerate() {
                    if p.is_zero() {
                        continue;
                    }
                    let term = p.mul(f, &Self::det(f, &Self::minor(m, 0, c)));
                    acc = if c % 2 == 0 {
                        acc.add(f, &term)
                    } else {
                        acc.add(f, &term.neg(f))
                    };
                }
                acc
            }
        }
    }

    /// Determinant over the Laurent ring.
    pub fn determinant(&self) -> Result<LaurentPoly, ShiftError> {
        self.require_square()?;
        Ok(Self::det(self.field, &self.entries))
    }

    /// Inverse via the adjugate. A linear CA is invertible exactly when its
    /// determinant is a unit `c t^k` of the Laurent ring.
    pub fn inverse(&self) -> Result<LinearCA, ShiftError> {
        let f = self.field;
        let (c, k) = self
            .determinant()?
            .as_monomial()
            .ok_or(ShiftError::NotInvertible)?;
        let inv_det = LaurentPoly::monomial(f, f.inv(c)? as i64, -k);
        let d = self.in_tracks;
        let entries = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        let cof = Self::det(f, &Self::minor(&self.entries, j, i));
                        let cof = if (i + j) % 2 == 0 { cof } else { cof.neg(f) };
                        cof.mul(f, &inv_det)
                    })
                    .collect()
            })
            .collect();
        Ok(LinearCA {
            field: f,
            entries,
            in_tracks: d,
        })
    }

    /// Parses `[p11,p12;p21,p22]` with entries such as `1`, `x^-1`,
    /// `2*x^3+x`.
    pub fn parse(field: PrimeField, s: &str) -> Result<LinearCA, ShiftError> {
        let bad = |m: &str| ShiftError::Parse(format!("{m} in matrix `{s}`"));
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| bad("missing brackets"))?;
        let mut rows = Vec::new();
        for row in inner.split(';') {
            let mut out = Vec::new();
            for cell in row.split(',') {
                out.push(parse_poly(field, cell).ok_or_else(|| bad("bad entry"))?);
            }
            rows.push(out);
        }
        Self::from_entries(field, rows)
    }
}

fn parse_poly(field: PrimeField, s: &str) -> Option<LaurentPoly> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return None;
    }
    let mut out = LaurentPoly::zero();
    let mut terms = Vec::new();
    let mut start = 0;
    let bytes = s.as_bytes();
    for i in 1..bytes.len() {
        // a sign starts a new term unless it belongs to an exponent
        if (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'^' {
            terms.push(&s[start..i]);
            start = i;
        }
    }
    terms.push(&s[start..]);
    for t in terms {
        let (sign, t) = match t.strip_prefix('-') {
            Some(r) => (-1, r),
            None => (1, t.strip_prefix('+').unwrap_or(t)),
        };
        let (coef, exp) = match t.split_once('x') {
            None => (t.parse::<i64>().ok()?, 0),
            Some((c, e)) => {
                let coef = match c {
                    "" => 1,
                    c => c.strip_suffix('*')?.parse::<i64>().ok()?,
                };
                let exp = match e {
                    "" => 1,
                    e => e.strip_prefix('^')?.parse::<i64>().ok()?,
                };
                (coef, exp)
            }
        };
        out = out.add(field, &LaurentPoly::monomial(field, sign * coef, exp));
    }
    Some(out)
}

impl fmt::Display for LinearCA {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (r, row) in self.entries.iter().enumerate() {
            if r > 0 {
                f.write_str(";")?;
            }
            for (c, p) in row.iter().enumerate() {
                if c > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{p}")?;
            }
        }
        f.write_str("]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gf(q: u32) -> PrimeField {
        PrimeField::new(q).unwrap()
    }

    #[test]
    fn right_shift_moves_right() {
        let f = gf(2);
        let s = LinearCA::shift(f, 1, 1);
        let x = Config::basis(f, 1, 0, 0).unwrap();
        assert_eq!(s.apply(&x).unwrap(), Config::basis(f, 1, 0, 1).unwrap());
        let one = Config::constant(f, &[1]);
        assert_eq!(s.apply(&one).unwrap(), one);
        assert_eq!(LinearCA::identity(f, 1).apply(&x).unwrap(), x);
    }

    #[test]
    fn powers_and_radius() {
        let f = gf(2);
        let s = LinearCA::shift(f, 1, 1);
        assert_eq!(s.power(3).unwrap(), LinearCA::shift(f, 1, 3));
        assert_eq!(s.power(3).unwrap().radius(), 3);
        assert!(s.power(0).unwrap().is_identity());
        for i in 0..=20 {
            assert_eq!(s.power(i).unwrap().radius(), i);
        }
    }

    #[test]
    fn order_evidence() {
        let f = gf(2);
        assert_eq!(
            LinearCA::identity(f, 2).order_evidence(5).unwrap(),
            OrderEvidence::FiniteOrder(1)
        );
        assert_eq!(
            LinearCA::shift(f, 1, 1).order_evidence(50).unwrap(),
            OrderEvidence::NoCollisionUpTo(50)
        );
        assert_eq!(
            LinearCA::scalar(gf(3), 1, 2).order_evidence(10).unwrap(),
            OrderEvidence::FiniteOrder(2)
        );
        let rect = LinearCA::from_entries(f, vec![vec![LaurentPoly::zero(); 2]]).unwrap();
        assert!(rect.order_evidence(3).is_err());
    }

    #[test]
    fn partial_shifts() {
        let f = gf(2);
        let p = LinearCA::partial_shift(f, 2, 0).unwrap();
        let x = Config::from_parts(f, &[0, 0], [(0, vec![1, 1])]).unwrap();
        let y = Config::from_parts(f, &[0, 0], [(1, vec![1, 0]), (0, vec![0, 1])]).unwrap();
        assert_eq!(p.apply(&x).unwrap(), y);
        assert!(p.compose(&p.inverse().unwrap()).unwrap().is_identity());
        let q = LinearCA::partial_shift(f, 2, 1).unwrap();
        assert_eq!(p.compose(&q).unwrap(), q.compose(&p).unwrap());
        assert!(LinearCA::partial_shift(f, 2, 2).is_err());
    }

    #[test]
    fn inverse_of_shear() {
        // [[1, x], [0, 1]] over GF(3) has inverse [[1, -x], [0, 1]]
        let f = gf(3);
        let m = LinearCA::parse(f, "[1,x;0,1]").unwrap();
        let inv = m.inverse().unwrap();
        assert_eq!(inv, LinearCA::parse(f, "[1,-x;0,1]").unwrap());
        assert!(m.compose(&inv).unwrap().is_identity());
        assert!(LinearCA::parse(f, "[1+x]").unwrap().inverse().is_err());
    }

    #[test]
    fn matrix_text() {
        let f = gf(5);
        let m = LinearCA::parse(f, "[x^-1, 0; 2*x^3+x-1, 1]").unwrap();
        assert_eq!(m.to_string(), "[x^-1,0;4+x+2*x^3,1]");
        assert_eq!(LinearCA::parse(f, &m.to_string()).unwrap(), m);
        assert!(LinearCA::parse(f, "[1,2;3]").is_err());
        assert!(LinearCA::parse(f, "1").is_err());
        assert!(LinearCA::parse(f, "[y]").is_err());
    }

    #[test]
    fn linearity_exhaustive_small() {
        let f = gf(2);
        let m = LinearCA::parse(f, "[1+x+x^-2]").unwrap();
        let configs: Vec<Config> = (0u32..32)
            .map(|bits| {
                Config::from_parts(
                    f,
                    &[0],
                    (0..5)
                        .filter(|j| bits >> j & 1 == 1)
                        .map(|j| (j as i64 - 2, vec![1])),
                )
                .unwrap()
            })
            .collect();
        for x in &configs {
            for y in &configs {
                let lhs = m.apply(&x.add(y).unwrap()).unwrap();
                let rhs = m.apply(x).unwrap().add(&m.apply(y).unwrap()).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    fn arb_poly(q: u32) -> impl Strategy<Value = LaurentPoly> {
        prop::collection::vec((-3i64..=3, 0..q as i64), 0..4).prop_map(move |ts| {
            let f = PrimeField::new(q).unwrap();
            ts.into_iter().fold(LaurentPoly::zero(), |acc, (e, c)| {
                acc.add(f, &LaurentPoly::monomial(f, c, e))
            })
        })
    }

    fn arb_ca(q: u32, d: usize) -> impl Strategy<Value = LinearCA> {
        prop::collection::vec(prop::collection::vec(arb_poly(q), d), d).prop_map(move |rows| {
            LinearCA::from_entries(PrimeField::new(q).unwrap(), rows).unwrap()
        })
    }

    fn arb_config(q: u32, d: usize) -> impl Strategy<Value = Config> {
        (
            prop::collection::vec(0..q as i64, d),
            prop::collection::vec((-6i64..6, prop::collection::vec(0..q as i64, d)), 0..6),
        )
            .prop_map(move |(tail, es)| {
                Config::from_parts(PrimeField::new(q).unwrap(), &tail, es).unwrap()
            })
    }

    proptest! {
        #[test]
        fn shift_equivariance(m in arb_ca(3, 2), x in arb_config(3, 2), k in -5i64..5) {
            let lhs = m.apply(&x.translate(k)).unwrap();
            let rhs = m.apply(&x).unwrap().translate(k);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn compose_is_sequential_application(a in arb_ca(3, 2), b in arb_ca(3, 2), x in arb_config(3, 2)) {
            let lhs = a.compose(&b).unwrap().apply(&x).unwrap();
            let rhs = a.apply(&b.apply(&x).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn support_grows_by_at_most_radius(m in arb_ca(2, 1), x in arb_config(2, 1)) {
            let y = m.apply(&x).unwrap();
            if let (Some((lo, hi)), Some((ylo, yhi))) = (x.support(), y.support()) {
                let r = m.radius() as i64;
                prop_assert!(ylo >= lo - r && yhi <= hi + r);
            }
        }

        #[test]
        fn invertible_products(k1 in -3i64..3, k2 in -3i64..3, x in arb_config(5, 2)) {
            let f = PrimeField::new(5).unwrap();
            let m = LinearCA::partial_shift_by(f, 2, 0, k1).unwrap()
                .compose(&LinearCA::parse(f, "[1,2*x;0,3]").unwrap()).unwrap()
                .compose(&LinearCA::partial_shift_by(f, 2, 1, k2).unwrap()).unwrap();
            let inv = m.inverse().unwrap();
            prop_assert_eq!(inv.apply(&m.apply(&x).unwrap()).unwrap(), x);
        }

        #[test]
        fn periodic_matches_unrolled(m in arb_ca(2, 2), n in 1usize..5, seed in 0u64..1 << 20) {
            let f = PrimeField::new(2).unwrap();
            let x = PeriodicConfig::from_index(f, n, 2, seed % (1 << (2 * n))).unwrap();
            let y = m.apply_periodic(&x).unwrap();
            let lo = -(4 * n as i64) - 8;
            let hi = 4 * n as i64 + 8;
            let unrolled = x.unroll(lo, hi);
            let z = m.apply(&unrolled).unwrap();
            let r = m.radius() as i64;
            for i in (lo + r)..=(hi - r) {
                for t in 0..2 {
                    prop_assert_eq!(z.get(i, t), y.get(i, t));
                }
            }
        }
    }
}
