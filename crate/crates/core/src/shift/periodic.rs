use super::{Config, ShiftError};
use crate::field::PrimeField;

/// A configuration with `s^n x = x`, stored as one period of `n` cells.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PeriodicConfig {
    field: PrimeField,
    d: usize,
    values: Vec<u32>,
}

impl PeriodicConfig {
    pub fn zero(field: PrimeField, n: usize, d: usize) -> Self {
        assert!(n >= 1, "period must be positive");
        Self {
            field,
            d,
            values: vec![0; n * d],
        }
    }

    /// Decodes `index` in base `q`, cell-major, track-minor.
    pub fn from_index(
        field: PrimeField,
        n: usize,
        d: usize,
        mut index: u64,
    ) -> Result<Self, ShiftError> {
        let mut c = Self::zero(field, n, d);
        let q = field.modulus() as u64;
        for v in c.values.iter_mut() {
            *v = (index % q) as u32;
            index /= q;
        }
        if index != 0 {
            return Err(ShiftError::Parse("index exceeds q^(nd)".into()));
        }
        Ok(c)
    }

    pub fn from_rows(field: PrimeField, rows: &[Vec<i64>]) -> Result<Self, ShiftError> {
        let d = rows.first().map_or(0, Vec::len);
        let mut c = Self::zero(field, rows.len(), d);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != d {
                return Err(ShiftError::TrackMismatch {
                    expected: d,
                    got: r.len(),
                });
            }
            for (t, &v) in r.iter().enumerate() {
                c.values[i * d + t] = field.reduce(v);
            }
        }
        Ok(c)
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn period(&self) -> usize {
        self.values.len() / self.d.max(1)
    }

    pub fn tracks(&self) -> usize {
        self.d
    }

    fn cell(&self, i: i64) -> usize {
        i.rem_euclid(self.period() as i64) as usize
    }

    pub fn get(&self, i: i64, track: usize) -> u32 {
        self.values[self.cell(i) * self.d + track]
    }

    pub fn set(&mut self, i: i64, track: usize, v: u32) {
        let c = self.cell(i);
        self.values[c * self.d + track] = v % self.field.modulus();
    }

    pub fn add_at(&mut self, i: i64, track: usize, v: u32) {
        let c = self.cell(i) * self.d + track;
        self.values[c] = self.field.add(self.values[c], v);
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    /// The periodic configuration restricted to `[lo, hi]`, zero elsewhere.
    pub fn unroll(&self, lo: i64, hi: i64) -> Config {
        let entries = (lo..=hi).map(|i| (i, (0..self.d).map(|t| self.get(i, t) as i64).collect()));
        Config::from_parts(self.field, &vec![0; self.d], entries).expect("track counts agree")
    }

    /// Wraps a finite-support configuration onto the period, summing cells
    /// that coincide mod `n`.
    pub fn wrap(config: &Config, n: usize) -> Result<Self, ShiftError> {
        let d = config.tracks();
        let mut out = Self::zero(config.field(), n, d);
        if !config.is_finite_support() {
            return Err(ShiftError::Parse(
                "cannot wrap a configuration with a nonzero tail".into(),
            ));
        }
        for (&p, v) in config.deviation() {
            for (t, &x) in v.iter().enumerate() {
                out.add_at(p, t, x);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_decoding() {
        let f = PrimeField::new(2).unwrap();
        let c = PeriodicConfig::from_index(f, 2, 3, 0b100101).unwrap();
        assert_eq!(c.values(), &[1, 0, 1, 0, 0, 1]);
        assert_eq!(c.get(-1, 2), 1);
        assert!(PeriodicConfig::from_index(f, 1, 1, 2).is_err());
    }

    #[test]
    fn wrapping_sums() {
        let f = PrimeField::new(2).unwrap();
        let z = Config::from_parts(f, &[0], [(0, vec![1]), (1, vec![1])]).unwrap();
        assert!(PeriodicConfig::wrap(&z, 1).unwrap().is_zero());
        assert!(!PeriodicConfig::wrap(&z, 2).unwrap().is_zero());
    }
}
