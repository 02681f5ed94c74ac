//! Bit-packed elements of `G_n(2)` for `n <= 64`: row `i` is one `u64` whose
//! bit `j` holds entry `(i, j)`.

use super::matrix::{Matrix, UnitriMatrix, Unitriangular};
use super::scalar::Modulus;
use crate::error::{Error, Result};

pub const MAX_BIT_DIM: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitUnitri {
    rows: Vec<u64>,
}

impl BitUnitri {
    pub fn identity(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_BIT_DIM {
            return Err(Error::invalid("n", format!("bit-packed dimension must be in 1..=64, got {n}")));
        }
        Ok(BitUnitri {
            rows: (0..n).map(|i| 1u64 << i).collect(),
        })
    }

    pub fn from_unitri(x: &UnitriMatrix) -> Result<Self> {
        if x.modulus().get() != 2 {
            return Err(Error::ModulusMismatch(2, x.modulus().get()));
        }
        let n = x.dim();
        let mut out = Self::identity(n)?;
        for (i, row) in out.rows.iter_mut().enumerate() {
            for j in i + 1..n {
                if x.get(i, j) == 1 {
                    *row |= 1 << j;
                }
            }
        }
        Ok(out)
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    /// Product `self * other`: row `r` is the XOR of the rows of `other`
    /// selected by the bits of row `r` of `self`.
    pub fn mul(&self, other: &BitUnitri) -> Result<BitUnitri> {
        if self.rows.len() != other.rows.len() {
            return Err(Error::DimensionMismatch(self.rows.len(), other.rows.len()));
        }
        let rows = self
            .rows
            .iter()
            .map(|&r| {
                let mut acc = 0u64;
                let mut bits = r;
                while bits != 0 {
                    let k = bits.trailing_zeros() as usize;
                    acc ^= other.rows[k];
                    bits &= bits - 1;
                }
                acc
            })
            .collect();
        Ok(BitUnitri { rows })
    }

    /// Packed column `j`: bit `i` holds entry `(i, j)`.
    pub fn column_bits(&self, j: usize) -> u64 {
        self.rows
            .iter()
            .enumerate()
            .take(j + 1)
            .fold(0u64, |acc, (i, &r)| acc | (((r >> j) & 1) << i))
    }
}

impl Unitriangular for BitUnitri {
    fn identity_of(n: usize, modulus: Modulus) -> Self {
        assert_eq!(modulus.get(), 2, "bit-packed matrices live over Z_2");
        BitUnitri::identity(n).expect("dimension within bit-packed range")
    }

    fn dim(&self) -> usize {
        self.rows.len()
    }

    fn modulus(&self) -> Modulus {
        Modulus::new(2).unwrap()
    }

    #[inline]
    fn add_row_multiple(&mut self, i: usize, a: u32) {
        if a & 1 == 1 {
            self.rows[i] ^= self.rows[i + 1];
        }
    }

    #[inline]
    fn add_col_multiple(&mut self, i: usize, a: u32) {
        if a & 1 == 0 {
            return;
        }
        for r in &mut self.rows[..=i] {
            *r ^= ((*r >> i) & 1) << (i + 1);
        }
    }

    #[inline]
    fn entry(&self, i: usize, j: usize) -> u32 {
        ((self.rows[i] >> j) & 1) as u32
    }

    fn to_unitri(&self) -> UnitriMatrix {
        let n = self.rows.len();
        let rows: Vec<Vec<u32>> = (0..n)
            .map(|i| (0..n).map(|j| self.entry(i, j)).collect())
            .collect();
        let m = Matrix::from_rows(&rows, Modulus::new(2).unwrap()).unwrap();
        UnitriMatrix::try_from_matrix(m).unwrap()
    }
}

/// Column-major bit-packed element of `G_n(2)`: `cols[j]` holds column `j`
/// with bit `i` for entry `(i, j)`. Column operations are a single XOR,
/// which suits the backward process.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitColumns {
    cols: Vec<u64>,
}

impl BitColumns {
    pub fn identity(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_BIT_DIM {
            return Err(Error::invalid("n", format!("bit-packed dimension must be in 1..=64, got {n}")));
        }
        Ok(BitColumns {
            cols: (0..n).map(|j| 1u64 << j).collect(),
        })
    }

    /// Packed column `j`.
    #[inline]
    pub fn column_bits(&self, j: usize) -> u64 {
        self.cols[j]
    }
}

impl Unitriangular for BitColumns {
    fn identity_of(n: usize, modulus: Modulus) -> Self {
        assert_eq!(modulus.get(), 2, "bit-packed matrices live over Z_2");
        BitColumns::identity(n).expect("dimension within bit-packed range")
    }

    fn dim(&self) -> usize {
        self.cols.len()
    }

    fn modulus(&self) -> Modulus {
        Modulus::new(2).unwrap()
    }

    #[inline]
    fn add_row_multiple(&mut self, i: usize, a: u32) {
        if a & 1 == 0 {
            return;
        }
        for c in &mut self.cols[i + 1..] {
            *c ^= ((*c >> (i + 1)) & 1) << i;
        }
    }

    #[inline]
    fn add_col_multiple(&mut self, i: usize, a: u32) {
        if a & 1 == 1 {
            self.cols[i + 1] ^= self.cols[i];
        }
    }

    #[inline]
    fn entry(&self, i: usize, j: usize) -> u32 {
        ((self.cols[j] >> i) & 1) as u32
    }

    fn to_unitri(&self) -> UnitriMatrix {
        let n = self.cols.len();
        let rows: Vec<Vec<u32>> = (0..n)
            .map(|i| (0..n).map(|j| self.entry(i, j)).collect())
            .collect();
        let m = Matrix::from_rows(&rows, Modulus::new(2).unwrap()).unwrap();
        UnitriMatrix::try_from_matrix(m).unwrap()
    }
}

/// Linear span of packed vectors over `Z_2`, reduced by highest set bit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitBasis {
    by_pivot: [u64; MAX_BIT_DIM],
    rank: usize,
}

impl Default for BitBasis {
    fn default() -> Self {
        Self::new()
    }
}

impl BitBasis {
    pub fn new() -> Self {
        BitBasis {
            by_pivot: [0; MAX_BIT_DIM],
            rank: 0,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Returns whether the rank increased.
    pub fn insert(&mut self, mut v: u64) -> bool {
        while v != 0 {
            let top = 63 - v.leading_zeros() as usize;
            let row = self.by_pivot[top];
            if row == 0 {
                self.by_pivot[top] = v;
                self.rank += 1;
                return true;
            }
            v ^= row;
        }
        false
    }
}
