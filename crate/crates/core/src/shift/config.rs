use std::collections::BTreeMap;
use std::fmt;

use super::ShiftError;
use crate::field::PrimeField;

/// A configuration in `(GF(q)^d)^Z` that differs from a constant on finitely
/// many cells. The value at `i` is `finite[i] + tail`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Config {
    field: PrimeField,
    tail: Vec<u32>,
    finite: BTreeMap<i64, Vec<u32>>,
}

impl Config {
    pub fn zero(field: PrimeField, d: usize) -> Self {
        Self {
            field,
            tail: vec![0; d],
            finite: BTreeMap::new(),
        }
    }

    pub fn constant(field: PrimeField, tail: &[i64]) -> Self {
        Self {
            field,
            tail: tail.iter().map(|&v| field.reduce(v)).collect(),
            finite: BTreeMap::new(),
        }
    }

    /// The configuration with a single 1 at `pos` on `track` (0-based).
    pub fn basis(field: PrimeField, d: usize, track: usize, pos: i64) -> Result<Self, ShiftError> {
        if track >= d {
            return Err(ShiftError::TrackOutOfRange { track, d });
        }
        let mut c = Self::zero(field, d);
        let mut v = vec![0; d];
        v[track] = 1;
        c.finite.insert(pos, v);
        Ok(c)
    }

    /// Builds from a tail and `(position, vector)` deviations; repeated
    /// positions are summed.
    pub fn from_parts<I>(field: PrimeField, tail: &[i64], entries: I) -> Result<Self, ShiftError>
    where
        I: IntoIterator<Item = (i64, Vec<i64>)>,
    {
        let mut c = Self::constant(field, tail);
        let d = tail.len();
        for (pos, v) in entries {
            if v.len() != d {
                return Err(ShiftError::TrackMismatch {
                    expected: d,
                    got: v.len(),
                });
            }
            let v: Vec<u32> = v.iter().map(|&x| field.reduce(x)).collect();
            c.add_at(pos, &v);
        }
        Ok(c)
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn tracks(&self) -> usize {
        self.tail.len()
    }

    pub fn tail(&self) -> &[u32] {
        &self.tail
    }

    /// Nonzero deviations from the tail, by position.
    pub fn deviation(&self) -> &BTreeMap<i64, Vec<u32>> {
        &self.finite
    }

    pub fn value_at(&self, pos: i64) -> Vec<u32> {
        match self.finite.get(&pos) {
            Some(v) => v
                .iter()
                .zip(&self.tail)
                .map(|(&a, &b)| self.field.add(a, b))
                .collect(),
            None => self.tail.clone(),
        }
    }

    pub fn get(&self, pos: i64, track: usize) -> u32 {
        let dev = self.finite.get(&pos).map_or(0, |v| v[track]);
        self.field.add(dev, self.tail[track])
    }

    /// Smallest interval containing all deviations.
    pub fn support(&self) -> Option<(i64, i64)> {
        let lo = *self.finite.keys().next()?;
        let hi = *self.finite.keys().next_back()?;
        Some((lo, hi))
    }

    pub fn is_zero(&self) -> bool {
        self.finite.is_empty() && self.tail.iter().all(|&v| v == 0)
    }

    pub fn is_finite_support(&self) -> bool {
        self.tail.iter().all(|&v| v == 0)
    }

    /// Adds `v` to the deviation at `pos`, dropping the entry if it cancels.
    pub(crate) fn add_at(&mut self, pos: i64, v: &[u32]) {
        if v.iter().all(|&x| x == 0) {
            return;
        }
        let field = self.field;
        let entry = self.finite.entry(pos).or_insert_with(|| vec![0; v.len()]);
        for (a, &b) in entry.iter_mut().zip(v) {
            *a = field.add(*a, b);
        }
        if entry.iter().all(|&x| x == 0) {
            self.finite.remove(&pos);
        }
    }

    pub(crate) fn add_tail(&mut self, v: &[u32]) {
        for (a, &b) in self.tail.iter_mut().zip(v) {
            *a = self.field.add(*a, b);
        }
    }

    fn check(&self, other: &Config) -> Result<(), ShiftError> {
        if self.field != other.field {
            return Err(crate::field::FieldError::ModulusMismatch(
                self.field.modulus(),
                other.field.modulus(),
            )
            .into());
        }
        if self.tracks() != other.tracks() {
            return Err(ShiftError::TrackMismatch {
                expected: self.tracks(),
                got: other.tracks(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Config) -> Result<Config, ShiftError> {
        self.check(other)?;
        let mut out = self.clone();
        out.add_tail(&other.tail);
        for (&p, v) in &other.finite {
            out.add_at(p, v);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Config) -> Result<Config, ShiftError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Config {
        self.scale(self.field.modulus() - 1)
    }

    pub fn scale(&self, a: u32) -> Config {
        let f = self.field;
        let a = a % f.modulus();
        if a == 0 {
            return Config::zero(f, self.tracks());
        }
        Config {
            field: f,
            tail: self.tail.iter().map(|&v| f.mul(v, a)).collect(),
            finite: self
                .finite
                .iter()
                .map(|(&p, v)| (p, v.iter().map(|&x| f.mul(x, a)).collect()))
                .collect(),
        }
    }

    /// `s^k`: the value at `i` moves to `i + k`.
    pub fn translate(&self, k: i64) -> Config {
        Config {
            field: self.field,
            tail: self.tail.clone(),
            finite: self
                .finite
                .iter()
                .map(|(&p, v)| (p + k, v.clone()))
                .collect(),
        }
    }

    /// Copy with only `track` kept.
    pub fn track_only(&self, track: usize) -> Config {
        let mut out = Config::zero(self.field, self.tracks());
        out.tail[track] = self.tail[track];
        for (&p, v) in &self.finite {
            let mut w = vec![0; v.len()];
            w[track] = v[track];
            out.add_at(p, &w);
        }
        out
    }

    /// Parses `tail=v1,...,vd; i:v1,...,vd; ...`.
    pub fn parse(field: PrimeField, s: &str) -> Result<Config, ShiftError> {
        let bad = |m: &str| ShiftError::Parse(format!("{m} in config `{s}`"));
        let parse_vec = |t: &str| -> Result<Vec<i64>, ShiftError> {
            t.split(',')
                .map(|x| x.trim().parse::<i64>().map_err(|_| bad("bad number")))
                .collect()
        };
        let mut parts = s.split(';').map(str::trim).filter(|p| !p.is_empty());
        let head = parts.next().ok_or_else(|| bad("empty"))?;
        let tail = parse_vec(
            head.strip_prefix("tail=")
                .ok_or_else(|| bad("missing tail"))?,
        )?;
        let mut entries = Vec::new();
        for p in parts {
            let (pos, v) = p.split_once(':').ok_or_else(|| bad("missing `:`"))?;
            let pos = pos.trim().parse::<i64>().map_err(|_| bad("bad position"))?;
            entries.push((pos, parse_vec(v)?));
        }
        Config::from_parts(field, &tail, entries)
    }
}

fn join(v: &[u32]) -> String {
    v.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tail={}", join(&self.tail))?;
        for (p, v) in &self.finite {
            write!(f, "; {p}:{}", join(v))?;
        }
        Ok(())
    }
}
