use super::matrix::FieldVector;
use super::scalar::Modulus;
use crate::error::{Error, Result};

/// Incrementally maintained reduced row echelon basis over `Z_q`.
///
/// Pivots are the lowest nonzero index of each reduced row, and rows are
/// kept sorted by pivot, so the basis of a given span is unique.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankBasis {
    modulus: Modulus,
    dim: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl RankBasis {
    pub fn new(dim: usize, modulus: Modulus) -> Self {
        RankBasis {
            modulus,
            dim,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.dim
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn rows(&self) -> impl Iterator<Item = FieldVector> + '_ {
        self.rows
            .iter()
            .map(move |r| FieldVector::from_entries(r.clone(), self.modulus))
    }

    pub fn insert(&mut self, v: &FieldVector) -> Result<bool> {
        if v.modulus() != self.modulus {
            return Err(Error::ModulusMismatch(
                self.modulus.get(),
                v.modulus().get(),
            ));
        }
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch(v.len(), self.dim));
        }
        Ok(self.insert_raw(v.entries()))
    }

    /// Inserts raw residues (`entries.len() == dim`, all `< q`). Returns
    /// whether the rank increased.
    pub fn insert_raw(&mut self, entries: &[u32]) -> bool {
        debug_assert_eq!(entries.len(), self.dim);
        if self.is_full() {
            return false;
        }
        let m = self.modulus;
        let mut v = entries.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let c = v[p];
            if c != 0 {
                let f = m.neg(c);
                for (x, &r) in v.iter_mut().zip(row).skip(p) {
                    *x = m.axpy(*x, f, r);
                }
            }
        }
        let Some(p) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = m.inv(v[p]).expect("pivot is nonzero");
        for x in &mut v[p..] {
            *x = m.mul(*x, inv);
        }
        for row in &mut self.rows {
            let c = row[p];
            if c != 0 {
                let f = m.neg(c);
                for (x, &r) in row.iter_mut().zip(&v).skip(p) {
                    *x = m.axpy(*x, f, r);
                }
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.rows.insert(at, v);
        true
    }
}
