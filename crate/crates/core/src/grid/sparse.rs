use std::collections::BTreeMap;

use num_complex::Complex64;

/// Square complex matrix stored as a map from (row, column) to value.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    entries: BTreeMap<(usize, usize), Complex64>,
}

impl SparseMatrix {
    pub fn new(dim: usize) -> Self {
        SparseMatrix { dim, entries: BTreeMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// Adds `value` to the entry at (row, col).
    pub fn add(&mut self, row: usize, col: usize, value: Complex64) {
        assert!(row < self.dim && col < self.dim, "index out of bounds");
        if value != Complex64::new(0.0, 0.0) {
            *self.entries.entry((row, col)).or_default() += value;
        }
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries.get(&(row, col)).copied().unwrap_or_default()
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        for (&(r, c), &a) in &self.entries {
            out[r] += a * v[c];
        }
        out
    }

    pub fn conjugate_transpose(&self) -> Self {
        SparseMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|(&(r, c), &a)| ((c, r), a.conj())).collect(),
        }
    }

    /// Computes W^{-1} A^H W for a positive diagonal weight W.
    pub fn weighted_adjoint(&self, weights: &[f64]) -> Self {
        SparseMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .map(|(&(r, c), &a)| ((c, r), a.conj() * weights[r] / weights[c]))
                .collect(),
        }
    }

    /// Left and right multiplication by a diagonal of signs.
    pub fn conjugate_by_signs(&self, signs: &[f64]) -> Self {
        SparseMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|(&(r, c), &a)| ((r, c), a * signs[r] * signs[c])).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.values().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn frobenius_distance(&self, other: &Self) -> f64 {
        let mut sum = 0.0;
        for (k, &a) in &self.entries {
            sum += (a - other.entries.get(k).copied().unwrap_or_default()).norm_sqr();
        }
        for (k, &b) in &other.entries {
            if !self.entries.contains_key(k) {
                sum += b.norm_sqr();
            }
        }
        sum.sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjoint_of_hermitian_is_itself() {
        let mut m = SparseMatrix::new(3);
        m.add(0, 1, Complex64::new(1.0, 2.0));
        m.add(1, 0, Complex64::new(1.0, -2.0));
        m.add(2, 2, Complex64::new(3.0, 0.0));
        assert_eq!(m.frobenius_distance(&m.conjugate_transpose()), 0.0);
        assert_eq!(m.frobenius_distance(&m.weighted_adjoint(&[2.0, 2.0, 2.0])), 0.0);
        let v = vec![Complex64::new(1.0, 0.0); 3];
        assert_eq!(m.apply(&v)[2], Complex64::new(3.0, 0.0));
    }
}
