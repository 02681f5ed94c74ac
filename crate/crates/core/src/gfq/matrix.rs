use std::fmt;

use super::scalar::{FieldScalar, Modulus};
use crate::error::{Error, Result};

/// A vector over `Z_q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldVector {
    modulus: Modulus,
    entries: Vec<u32>,
}

impl FieldVector {
    pub fn zeros(len: usize, modulus: Modulus) -> Self {
        FieldVector {
            modulus,
            entries: vec![0; len],
        }
    }

    /// Standard basis vector `e_j` (0-based).
    pub fn basis(len: usize, j: usize, modulus: Modulus) -> Self {
        let mut v = Self::zeros(len, modulus);
        v.entries[j] = 1;
        v
    }

    pub fn from_entries(entries: Vec<u32>, modulus: Modulus) -> Self {
        let q = modulus.get();
        let entries = entries.into_iter().map(|x| x % q).collect();
        FieldVector { modulus, entries }
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> FieldScalar {
        FieldScalar::new(self.entries[i] as u64, self.modulus)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0)
    }

    /// Index of the first nonzero entry.
    pub fn leading_index(&self) -> Option<usize> {
        self.entries.iter().position(|&x| x != 0)
    }

    pub fn dot(&self, other: &FieldVector) -> Result<FieldScalar> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch(
                self.modulus.get(),
                other.modulus.get(),
            ));
        }
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch(self.len(), other.len()));
        }
        let m = self.modulus;
        let acc = self
            .entries
            .iter()
            .zip(&other.entries)
            .fold(0u32, |acc, (&x, &y)| m.axpy(acc, x, y));
        Ok(FieldScalar::new(acc as u64, m))
    }

    /// Scales so that the leading entry is 1. Zero vectors are returned as is.
    pub fn normalized(&self) -> FieldVector {
        let Some(l) = self.leading_index() else {
            return self.clone();
        };
        let m = self.modulus;
        let inv = m.inv(self.entries[l]).expect("leading entry is nonzero");
        FieldVector {
            modulus: m,
            entries: self.entries.iter().map(|&x| m.mul(x, inv)).collect(),
        }
    }
}

/// A square matrix over `Z_q` with no structural constraint. Used for the
/// elementary matrices `E_{i,j}` and for sums appearing in the expansion of
/// the walk.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    n: usize,
    modulus: Modulus,
    data: Vec<u32>,
}

impl Matrix {
    pub fn zeros(n: usize, modulus: Modulus) -> Self {
        Matrix {
            n,
            modulus,
            data: vec![0; n * n],
        }
    }

    pub fn identity(n: usize, modulus: Modulus) -> Self {
        let mut m = Self::zeros(n, modulus);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// `E_{i,j}`: a single 1 at `(i, j)` (0-based).
    pub fn elementary(n: usize, i: usize, j: usize, modulus: Modulus) -> Result<Self> {
        if i >= n || j >= n {
            return Err(Error::IndexOutOfRange {
                index: i.max(j),
                limit: n,
            });
        }
        let mut m = Self::zeros(n, modulus);
        m.data[i * n + j] = 1;
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<u32>], modulus: Modulus) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch(row.len(), n));
            }
            data.extend(row.iter().map(|&x| x % modulus.get()));
        }
        Ok(Matrix { n, modulus, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.n + j]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    fn check(&self, other: &Matrix) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch(
                self.modulus.get(),
                other.modulus.get(),
            ));
        }
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        self.check(other)?;
        let n = self.n;
        let m = self.modulus;
        let mut out = vec![0u32; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] = m.axpy(out[i * n + j], a, other.data[k * n + j]);
                }
            }
        }
        Ok(Matrix {
            n,
            modulus: m,
            data: out,
        })
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.check(other)?;
        let m = self.modulus;
        Ok(Matrix {
            n: self.n,
            modulus: m,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&x, &y)| m.add(x, y))
                .collect(),
        })
    }

    pub fn scale(&self, a: u32) -> Matrix {
        let m = self.modulus;
        Matrix {
            n: self.n,
            modulus: m,
            data: self.data.iter().map(|&x| m.mul(x, a)).collect(),
        }
    }

    pub fn is_unitriangular(&self) -> bool {
        let n = self.n;
        (0..n).all(|i| {
            (0..n).all(|j| match i.cmp(&j) {
                std::cmp::Ordering::Equal => self.get(i, j) == 1,
                std::cmp::Ordering::Greater => self.get(i, j) == 0,
                std::cmp::Ordering::Less => true,
            })
        })
    }
}

impl fmt::Display for Matrix {
    /// Row-major decimal digits, rows separated by `/`. Entries are
    /// comma-separated when `q > 10` so the string stays unambiguous.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.modulus.get() > 10 { "," } else { "" };
        for i in 0..self.n {
            if i > 0 {
                f.write_str("/")?;
            }
            for j in 0..self.n {
                if j > 0 {
                    f.write_str(sep)?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        Ok(())
    }
}

/// An element of `G_n(q)`: upper triangular with unit diagonal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UnitriMatrix(Matrix);

impl UnitriMatrix {
    pub fn identity(n: usize, modulus: Modulus) -> Self {
        UnitriMatrix(Matrix::identity(n, modulus))
    }

    pub fn try_from_matrix(m: Matrix) -> Result<Self> {
        if m.is_unitriangular() {
            Ok(UnitriMatrix(m))
        } else {
            Err(Error::invalid("matrix", "not unitriangular"))
        }
    }

    pub fn from_rows(rows: &[Vec<u32>], modulus: Modulus) -> Result<Self> {
        Self::try_from_matrix(Matrix::from_rows(rows, modulus)?)
    }

    /// Builds from the strictly upper entries read row-major.
    pub fn from_upper_entries(n: usize, upper: &[u32], modulus: Modulus) -> Result<Self> {
        if upper.len() != n * (n - 1) / 2 {
            return Err(Error::DimensionMismatch(upper.len(), n * (n - 1) / 2));
        }
        let mut m = Matrix::identity(n, modulus);
        let mut it = upper.iter();
        for i in 0..n {
            for j in i + 1..n {
                m.data[i * n + j] = it.next().unwrap() % modulus.get();
            }
        }
        Ok(UnitriMatrix(m))
    }

    pub fn upper_entries(&self) -> Vec<u32> {
        let n = self.dim();
        let mut out = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                out.push(self.get(i, j));
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.0.n
    }

    pub fn modulus(&self) -> Modulus {
        self.0.modulus
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.0.get(i, j)
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn is_identity(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (i + 1..n).all(|j| self.get(i, j) == 0))
    }

    fn check_op_index(&self, i: usize) -> Result<()> {
        if i + 1 >= self.dim() {
            return Err(Error::IndexOutOfRange {
                index: i,
                limit: self.dim().saturating_sub(1),
            });
        }
        Ok(())
    }

    fn check_scalar(&self, a: FieldScalar) -> Result<()> {
        if a.modulus() != self.modulus() {
            return Err(Error::ModulusMismatch(
                self.modulus().get(),
                a.modulus().get(),
            ));
        }
        Ok(())
    }

    /// `(I + a E_{i,i+1}) X`: adds `a` times row `i+1` to row `i`.
    pub fn row_update(&self, i: usize, a: FieldScalar) -> Result<UnitriMatrix> {
        self.check_op_index(i)?;
        self.check_scalar(a)?;
        let mut out = self.clone();
        out.add_row_multiple(i, a.value());
        Ok(out)
    }

    /// `X (I + a E_{i,i+1})`: adds `a` times column `i` to column `i+1`.
    pub fn col_update(&self, i: usize, a: FieldScalar) -> Result<UnitriMatrix> {
        self.check_op_index(i)?;
        self.check_scalar(a)?;
        let mut out = self.clone();
        out.add_col_multiple(i, a.value());
        Ok(out)
    }

    pub fn mul(&self, other: &UnitriMatrix) -> Result<UnitriMatrix> {
        Ok(UnitriMatrix(self.0.mul(&other.0)?))
    }

    /// Inverse by back substitution.
    pub fn inverse(&self) -> UnitriMatrix {
        let n = self.dim();
        let m = self.modulus();
        let mut inv = Matrix::identity(n, m);
        // Solve X * inv = I column by column from the bottom row up.
        for j in 0..n {
            for i in (0..j).rev() {
                let mut acc = 0u32;
                for k in i + 1..=j {
                    acc = m.axpy(acc, self.get(i, k), inv.data[k * n + j]);
                }
                inv.data[i * n + j] = m.neg(acc);
            }
        }
        UnitriMatrix(inv)
    }

    pub fn column(&self, j: usize) -> FieldVector {
        let n = self.dim();
        FieldVector {
            modulus: self.modulus(),
            entries: (0..n).map(|i| self.get(i, j)).collect(),
        }
    }

    pub fn row(&self, i: usize) -> FieldVector {
        let n = self.dim();
        FieldVector {
            modulus: self.modulus(),
            entries: self.0.data[i * n..(i + 1) * n].to_vec(),
        }
    }

    /// Row vector times matrix.
    pub fn left_apply(&self, b: &FieldVector) -> Result<FieldVector> {
        let n = self.dim();
        if b.len() != n {
            return Err(Error::DimensionMismatch(b.len(), n));
        }
        let m = self.modulus();
        let mut out = vec![0u32; n];
        for (i, &bi) in b.entries().iter().enumerate() {
            if bi == 0 {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate().skip(i) {
                *o = m.axpy(*o, bi, self.get(i, j));
            }
        }
        Ok(FieldVector {
            modulus: m,
            entries: out,
        })
    }

    /// Top-left `k x k` block.
    pub fn leading_block(&self, k: usize) -> UnitriMatrix {
        let n = self.dim();
        let mut out = Matrix::identity(k, self.modulus());
        for i in 0..k {
            for j in i + 1..k {
                out.data[i * k + j] = self.0.data[i * n + j];
            }
        }
        UnitriMatrix(out)
    }
}

impl fmt::Display for UnitriMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Elements of `G_n(q)` that support the in-place elementary operations
/// used by the simulators. Scalars are raw residues already reduced mod q.
pub trait Unitriangular: Clone + Send + Sync {
    fn identity_of(n: usize, modulus: Modulus) -> Self;
    fn dim(&self) -> usize;
    fn modulus(&self) -> Modulus;
    /// Row `i` += `a` * row `i+1`.
    fn add_row_multiple(&mut self, i: usize, a: u32);
    /// Column `i+1` += `a` * column `i`.
    fn add_col_multiple(&mut self, i: usize, a: u32);
    fn entry(&self, i: usize, j: usize) -> u32;
    /// Writes column `j` restricted to rows `0..out.len()` into `out`.
    fn column_into(&self, j: usize, out: &mut [u32]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.entry(i, j);
        }
    }
    fn to_unitri(&self) -> UnitriMatrix;
}

impl Unitriangular for UnitriMatrix {
    fn identity_of(n: usize, modulus: Modulus) -> Self {
        UnitriMatrix::identity(n, modulus)
    }

    fn dim(&self) -> usize {
        self.0.n
    }

    fn modulus(&self) -> Modulus {
        self.0.modulus
    }

    #[inline]
    fn add_row_multiple(&mut self, i: usize, a: u32) {
        if a == 0 {
            return;
        }
        let n = self.0.n;
        let m = self.0.modulus;
        let (head, tail) = self.0.data.split_at_mut((i + 1) * n);
        let dst = &mut head[i * n..];
        let src = &tail[..n];
        // Row i+1 vanishes left of the diagonal.
        for j in i + 1..n {
            dst[j] = m.axpy(dst[j], a, src[j]);
        }
    }

    #[inline]
    fn add_col_multiple(&mut self, i: usize, a: u32) {
        if a == 0 {
            return;
        }
        let n = self.0.n;
        let m = self.0.modulus;
        // Column i vanishes below the diagonal.
        for r in 0..=i {
            let src = self.0.data[r * n + i];
            if src != 0 {
                let d = &mut self.0.data[r * n + i + 1];
                *d = m.axpy(*d, a, src);
            }
        }
    }

    #[inline]
    fn entry(&self, i: usize, j: usize) -> u32 {
        self.get(i, j)
    }

    fn to_unitri(&self) -> UnitriMatrix {
        self.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: u32) -> Modulus {
        Modulus::new(p).unwrap()
    }

    fn e(n: usize, i: usize, j: usize, m: Modulus) -> Matrix {
        Matrix::elementary(n, i, j, m).unwrap()
    }

    #[test]
    fn row_update_examples() {
        let m2 = q(2);
        let id = UnitriMatrix::identity(3, m2);
        let one = FieldScalar::one(m2);
        let x = id.row_update(0, one).unwrap();
        assert_eq!(x.to_string(), "110/010/001");
        assert_eq!(x.row_update(0, FieldScalar::zero(m2)).unwrap(), x);

        let x = UnitriMatrix::from_rows(&[vec![1, 0, 0], vec![0, 1, 1], vec![0, 0, 1]], m2).unwrap();
        let y = x.row_update(0, one).unwrap();
        assert_eq!(y.to_string(), "111/011/001");
        // oracle: (I + E_12)(I + E_23)
        let oracle = Matrix::identity(3, m2)
            .add(&e(3, 0, 1, m2))
            .unwrap()
            .mul(&Matrix::identity(3, m2).add(&e(3, 1, 2, m2)).unwrap())
            .unwrap();
        assert_eq!(y.as_matrix(), &oracle);
    }

    #[test]
    fn col_update_examples() {
        let m3 = q(3);
        let id = UnitriMatrix::identity(3, m3);
        let x = id.col_update(1, FieldScalar::one(m3)).unwrap();
        assert_eq!(x.to_string(), "100/011/001");
        assert_eq!(x.col_update(0, FieldScalar::zero(m3)).unwrap(), x);

        let x = UnitriMatrix::from_rows(&[vec![1, 1, 0], vec![0, 1, 0], vec![0, 0, 1]], m3).unwrap();
        let y = x.col_update(1, FieldScalar::new(2, m3)).unwrap();
        assert_eq!(y.to_string(), "112/012/001");
        let oracle = x
            .as_matrix()
            .mul(&Matrix::identity(3, m3).add(&e(3, 1, 2, m3).scale(2)).unwrap())
            .unwrap();
        assert_eq!(y.as_matrix(), &oracle);
    }

    #[test]
    fn update_errors() {
        let m2 = q(2);
        let id = UnitriMatrix::identity(3, m2);
        assert!(matches!(
            id.row_update(2, FieldScalar::one(m2)),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(id.col_update(5, FieldScalar::one(m2)).is_err());
        assert!(matches!(
            id.row_update(0, FieldScalar::one(q(3))),
            Err(Error::ModulusMismatch(2, 3))
        ));
        assert!(UnitriMatrix::from_rows(&[vec![1, 0], vec![1, 1]], m2).is_err());
        assert!(UnitriMatrix::from_rows(&[vec![2, 0], vec![0, 1]], q(3)).is_err());
    }

    #[test]
    fn last_elementary_absorbs_unitriangular_factors() {
        let m2 = q(2);
        let en = e(3, 1, 2, m2);
        assert!(en.mul(&en).unwrap().is_zero());
        let y = UnitriMatrix::from_rows(&[vec![1, 1, 1], vec![0, 1, 1], vec![0, 0, 1]], m2).unwrap();
        assert_eq!(en.mul(y.as_matrix()).unwrap(), en);
        let id = UnitriMatrix::identity(3, m2);
        assert_eq!(id.mul(&y).unwrap(), y);
    }

    #[test]
    fn mat_mul_errors() {
        let a = Matrix::identity(3, q(2));
        assert!(matches!(
            a.mul(&Matrix::identity(4, q(2))),
            Err(Error::DimensionMismatch(3, 4))
        ));
        assert!(matches!(
            a.mul(&Matrix::identity(3, q(5))),
            Err(Error::ModulusMismatch(2, 5))
        ));
    }

    #[test]
    fn inverse_and_vectors() {
        let m5 = q(5);
        let x = UnitriMatrix::from_upper_entries(3, &[2, 3, 4], m5).unwrap();
        let prod = x.mul(&x.inverse()).unwrap();
        assert!(prod.is_identity());
        assert_eq!(x.upper_entries(), vec![2, 3, 4]);
        let b = FieldVector::from_entries(vec![0, 3, 1], m5);
        assert_eq!(b.leading_index(), Some(1));
        assert_eq!(b.normalized().entries(), &[0, 1, 2]);
        assert_eq!(x.left_apply(&b).unwrap().entries(), &[0, 3, 3]);
        assert_eq!(x.column(2).entries(), &[3, 4, 1]);
        assert_eq!(x.leading_block(2).to_string(), "12/01");
    }

    #[test]
    fn display_large_modulus() {
        let x = UnitriMatrix::from_upper_entries(2, &[12], q(13)).unwrap();
        assert_eq!(x.to_string(), "1,12/0,1");
    }
}
