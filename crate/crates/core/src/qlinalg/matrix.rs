//! Dense rational matrices. A `Matrix` of shape `rows x cols` acts on column
//! vectors, so it is a linear map from a `cols`-dimensional space to a
//! `rows`-dimensional one.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::{LinalgError, Rat};

pub type Vector = Vec<Rat>;

/// A linear map between rational spaces.
pub type LinMap = Matrix;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix { rows, cols, data: vec![Rat::int(0); rows * cols] }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rat::int(1));
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<Matrix, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(LinalgError::Shape("ragged rows".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Convenience constructor for tests and generators; panics on ragged input.
    pub fn from_ints(rows: &[&[i64]]) -> Matrix {
        let c = rows.first().map_or(0, |r| r.len());
        let mut m = Matrix::zeros(rows.len(), c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, Rat::int(v));
            }
        }
        m
    }

    /// Builds the matrix whose columns are the given vectors.
    pub fn from_columns(dim: usize, cols: &[Vector]) -> Matrix {
        let mut m = Matrix::zeros(dim, cols.len());
        for (j, v) in cols.iter().enumerate() {
            assert_eq!(v.len(), dim);
            for (i, x) in v.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vector> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn row_vectors(&self) -> Vec<Vector> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Rat::is_zero)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn apply(&self, v: &[Rat]) -> Vector {
        assert_eq!(v.len(), self.cols, "vector length does not match domain");
        (0..self.rows)
            .map(|i| {
                let mut acc = Rat::int(0);
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += &(a * b);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn compose(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in composition");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        let idx = i * out.cols + j;
                        out.data[idx] += &(a * b);
                    }
                }
            }
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * c).collect() }
    }

    pub fn pow(&self, k: u32) -> Matrix {
        assert!(self.is_square());
        let mut out = Matrix::identity(self.rows);
        for _ in 0..k {
            out = out.compose(self);
        }
        out
    }

    pub fn commutes_with(&self, other: &Matrix) -> bool {
        self.compose(other) == other.compose(self)
    }

    /// Smallest `k` with `self^k = 0`, or `None` if the map is not nilpotent.
    pub fn nilpotency_index(&self) -> Option<u32> {
        assert!(self.is_square());
        let mut p = Matrix::identity(self.rows);
        for k in 0..=self.rows as u32 {
            if p.is_zero() {
                return Some(k);
            }
            p = p.compose(self);
        }
        None
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else { continue };
            m.swap_rows(r, p);
            let inv = m.get(r, c).recip();
            for j in c..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in c..m.cols {
                    let sub = &f * m.get(r, j);
                    if !sub.is_zero() {
                        let v = m.get(i, j) - &sub;
                        m.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, Rat::int(1));
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j).clone());
            }
        }
        Some(inv)
    }

    /// Basis of the null space, one vector per free column.
    pub fn null_space(&self) -> Vec<Vector> {
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![Rat::int(0); self.cols];
            v[free] = Rat::int(1);
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -r.get(row, free);
            }
            basis.push(v);
        }
        basis
    }

    /// Block-diagonal sum.
    pub fn direct_sum(blocks: &[Matrix]) -> Matrix {
        let rows = blocks.iter().map(Matrix::rows).sum();
        let cols = blocks.iter().map(Matrix::cols).sum();
        let mut out = Matrix::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out.set(r0 + i, c0 + j, b.get(i, j).clone());
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.rows * rhs.rows, self.cols * rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..rhs.rows {
                    for l in 0..rhs.cols {
                        out.set(i * rhs.rows + k, j * rhs.cols + l, a * rhs.get(k, l));
                    }
                }
            }
        }
        out
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| -x).collect() }
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.compose(rhs)
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}

/// Jordan block of size `n`: `e_k -> e_{k-1}`, `e_0 -> 0`.
pub fn jordan_block(n: usize) -> Matrix {
    let mut m = Matrix::zeros(n, n);
    for k in 1..n {
        m.set(k - 1, k, Rat::int(1));
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_roundtrip() {
        let a = Matrix::from_ints(&[&[2, 1, 0], &[1, 1, 0], &[0, 3, 1]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.compose(&inv), Matrix::identity(3));
        assert!(Matrix::from_ints(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn nilpotency_of_jordan_blocks() {
        assert_eq!(jordan_block(3).nilpotency_index(), Some(3));
        assert_eq!(Matrix::zeros(2, 2).nilpotency_index(), Some(1));
        assert_eq!(Matrix::identity(2).nilpotency_index(), None);
    }

    #[test]
    fn null_space_dimension() {
        let j3 = jordan_block(3);
        assert_eq!(j3.compose(&j3).null_space().len(), 2);
        for v in j3.null_space() {
            assert!(j3.apply(&v).iter().all(Rat::is_zero));
        }
    }
}
