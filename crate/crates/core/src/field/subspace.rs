use super::{BitRow, FieldError};

/// A subspace of GF(2)^width kept in reduced row-echelon form.
///
/// Rows are sorted by pivot (the lowest set bit) and every pivot column is
/// zero in all other rows, so two subspaces are equal exactly when their
/// bases are equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinarySubspace {
    width: usize,
    rows: Vec<BitRow>,
    pivots: Vec<usize>,
}

impl BinarySubspace {
    pub fn new(width: usize) -> Self {
        Self {
            width,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn spanned_by<'a, I>(width: usize, vectors: I) -> Result<Self, FieldError>
    where
        I: IntoIterator<Item = &'a BitRow>,
    {
        let mut s = Self::new(width);
        for v in vectors {
            s.insert(v)?;
        }
        Ok(s)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[BitRow] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    fn check_width(&self, v: &BitRow) -> Result<(), FieldError> {
        if v.width() != self.width {
            return Err(FieldError::WidthMismatch {
                expected: self.width,
                got: v.width(),
            });
        }
        Ok(())
    }

    /// Reduces `v` against the basis; the result is zero iff `v` is in the span.
    pub fn reduce(&self, v: &BitRow) -> Result<BitRow, FieldError> {
        self.check_width(v)?;
        let mut r = v.clone();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if r.get(p) {
                r.xor_assign(row);
            }
        }
        Ok(r)
    }

    pub fn contains(&self, v: &BitRow) -> Result<bool, FieldError> {
        Ok(self.reduce(v)?.is_zero())
    }

    /// Adds `v` to the spanning set. Returns whether the dimension grew.
    pub fn insert(&mut self, v: &BitRow) -> Result<bool, FieldError> {
        let r = self.reduce(v)?;
        let Some(p) = r.first_one() else {
            return Ok(false);
        };
        for row in &mut self.rows {
            if row.get(p) {
                row.xor_assign(&r);
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.rows.insert(at, r);
        self.pivots.insert(at, p);
        Ok(true)
    }

    /// Functional form of [`insert`](Self::insert).
    pub fn with(mut self, v: &BitRow) -> Result<Self, FieldError> {
        self.insert(v)?;
        Ok(self)
    }
}
