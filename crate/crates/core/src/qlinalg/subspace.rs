use std::fmt;

use super::{LinMap, LinalgError, Matrix, Rat, Vector};

/// A subspace of `Q^n` stored as the rows of its reduced row echelon basis.
/// The echelon form is unique, so derived equality is subspace equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<Vector>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(n: usize) -> Subspace {
        Subspace { ambient_dim: n, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(n: usize) -> Subspace {
        let basis = (0..n)
            .map(|i| {
                let mut v = vec![Rat::int(0); n];
                v[i] = Rat::int(1);
                v
            })
            .collect();
        Subspace { ambient_dim: n, basis, pivots: (0..n).collect() }
    }

    /// Span of `vectors` in canonical form.
    pub fn canonicalize(vectors: &[Vector], ambient_dim: usize) -> Result<Subspace, LinalgError> {
        if let Some(v) = vectors.iter().find(|v| v.len() != ambient_dim) {
            return Err(LinalgError::Dimension { expected: ambient_dim, found: v.len() });
        }
        Ok(Subspace::span(vectors, ambient_dim))
    }

    /// Like [`Subspace::canonicalize`] but panics on a length mismatch.
    pub fn span(vectors: &[Vector], ambient_dim: usize) -> Subspace {
        if vectors.is_empty() {
            return Subspace::zero(ambient_dim);
        }
        let m = Matrix::from_rows(vectors.to_vec()).expect("vectors of equal length");
        assert_eq!(m.cols(), ambient_dim, "vector length does not match ambient dimension");
        let (r, pivots) = m.rref();
        let basis = (0..pivots.len()).map(|i| r.row(i).to_vec()).collect();
        Subspace { ambient_dim, basis, pivots }
    }

    pub fn span_of_units(n: usize, indices: impl IntoIterator<Item = usize>) -> Subspace {
        let vecs: Vec<Vector> = indices
            .into_iter()
            .map(|i| {
                let mut v = vec![Rat::int(0); n];
                v[i] = Rat::int(1);
                v
            })
            .collect();
        Subspace::span(&vecs, n)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.ambient_dim
    }

    fn check_ambient(&self, other: &Subspace) -> Result<(), LinalgError> {
        if self.ambient_dim != other.ambient_dim {
            return Err(LinalgError::Dimension { expected: self.ambient_dim, found: other.ambient_dim });
        }
        Ok(())
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        assert_eq!(v.len(), self.ambient_dim);
        // reduce v against the echelon basis
        let mut w = v.to_vec();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if w[p].is_zero() {
                continue;
            }
            let f = w[p].clone();
            for (x, b) in w.iter_mut().zip(row) {
                if !b.is_zero() {
                    *x -= &(&f * b);
                }
            }
        }
        w.iter().all(Rat::is_zero)
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.ambient_dim == other.ambient_dim
            && self.dim() <= other.dim()
            && self.basis.iter().all(|v| other.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check_ambient(other)?;
        Ok(self.plus(other))
    }

    /// Panicking variant of [`Subspace::sum`] for internal use.
    pub fn plus(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient_dim, other.ambient_dim, "ambient mismatch");
        if other.is_zero() || self.is_full() {
            return self.clone();
        }
        if self.is_zero() || other.is_full() {
            return other.clone();
        }
        let vecs: Vec<Vector> = self.basis.iter().chain(&other.basis).cloned().collect();
        Subspace::span(&vecs, self.ambient_dim)
    }

    /// Annihilator in the dual space, identified with `Q^n` via the standard pairing.
    pub fn annihilator(&self) -> Subspace {
        if self.is_zero() {
            return Subspace::full(self.ambient_dim);
        }
        let m = Matrix::from_rows(self.basis.clone()).expect("basis rows");
        Subspace::span(&m.null_space(), self.ambient_dim)
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check_ambient(other)?;
        Ok(self.meet(other))
    }

    /// Panicking variant of [`Subspace::intersect`].
    pub fn meet(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient_dim, other.ambient_dim, "ambient mismatch");
        if self.is_full() || other.is_zero() {
            return other.clone();
        }
        if other.is_full() || self.is_zero() {
            return self.clone();
        }
        if self.is_subspace_of(other) {
            return self.clone();
        }
        if other.is_subspace_of(self) {
            return other.clone();
        }
        self.annihilator().plus(&other.annihilator()).annihilator()
    }

    /// `f(self)`.
    pub fn image_under(&self, f: &LinMap) -> Subspace {
        assert_eq!(f.cols(), self.ambient_dim, "map domain does not match ambient dimension");
        let imgs: Vec<Vector> = self.basis.iter().map(|v| f.apply(v)).collect();
        Subspace::span(&imgs, f.rows())
    }

    /// Coordinates of `v` in the echelon basis; `None` if `v` is not in the subspace.
    pub fn coordinates(&self, v: &[Rat]) -> Option<Vector> {
        let coords: Vector = self.pivots.iter().map(|&p| v[p].clone()).collect();
        let mut recon = vec![Rat::int(0); self.ambient_dim];
        for (c, row) in coords.iter().zip(&self.basis) {
            if c.is_zero() {
                continue;
            }
            for (x, b) in recon.iter_mut().zip(row) {
                if !b.is_zero() {
                    *x += &(c * b);
                }
            }
        }
        (recon.as_slice() == v).then_some(coords)
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} in {}", self.dim(), self.ambient_dim)?;
        for v in &self.basis {
            write!(f, ", {v:?}")?;
        }
        write!(f, ")")
    }
}

pub fn kernel(f: &LinMap) -> Subspace {
    Subspace::span(&f.null_space(), f.cols())
}

pub fn image(f: &LinMap) -> Subspace {
    Subspace::span(&f.columns(), f.rows())
}

/// `{x : f(x) ∈ s}`.
pub fn preimage(f: &LinMap, s: &Subspace) -> Result<Subspace, LinalgError> {
    if f.rows() != s.ambient_dim() {
        return Err(LinalgError::Dimension { expected: f.rows(), found: s.ambient_dim() });
    }
    if s.is_full() {
        return Ok(Subspace::full(f.cols()));
    }
    let ann = s.annihilator();
    let a = Matrix::from_rows(ann.basis().to_vec()).expect("rows");
    Ok(kernel(&a.compose(f)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::jordan_block;

    fn v(xs: &[i64]) -> Vector {
        xs.iter().map(|&x| Rat::int(x)).collect()
    }

    #[test]
    fn canonicalize_examples() {
        let s = Subspace::canonicalize(&[v(&[1, 0]), v(&[1, 1])], 2).unwrap();
        assert_eq!(s, Subspace::full(2));
        let z = Subspace::canonicalize(&[], 3).unwrap();
        assert_eq!(z.dim(), 0);
        let l = Subspace::canonicalize(&[v(&[2, 4]), v(&[1, 2])], 2).unwrap();
        assert_eq!(l.dim(), 1);
        assert_eq!(l.basis()[0], v(&[1, 2]));
        assert!(Subspace::canonicalize(&[v(&[1, 2, 3])], 2).is_err());
    }

    #[test]
    fn kernel_image_examples() {
        let zero = Matrix::zeros(2, 2);
        assert!(kernel(&zero).is_full());
        assert!(image(&zero).is_zero());
        let j2 = jordan_block(2);
        let e0 = Subspace::span_of_units(2, [0]);
        assert_eq!(kernel(&j2), e0);
        assert_eq!(image(&j2), e0);
        let j3 = jordan_block(3);
        let sq = j3.compose(&j3);
        assert_eq!(kernel(&sq), Subspace::span_of_units(3, [0, 1]));
        assert_eq!(image(&sq), Subspace::span_of_units(3, [0]));
    }

    #[test]
    fn sum_intersect_preimage_examples() {
        let a = Subspace::span_of_units(2, [0]);
        let b = Subspace::span_of_units(2, [1]);
        assert!(a.sum(&b).unwrap().is_full());
        assert!(a.intersect(&b).unwrap().is_zero());
        assert_eq!(a.sum(&a).unwrap(), a);
        assert_eq!(a.intersect(&a).unwrap(), a);
        let pre = preimage(&jordan_block(2), &a).unwrap();
        assert!(pre.is_full());
        assert!(a.sum(&Subspace::zero(3)).is_err());
    }

    #[test]
    fn coordinates_roundtrip() {
        let s = Subspace::span(&[v(&[1, 2, 0]), v(&[0, 1, 1])], 3);
        let x = v(&[2, 5, 1]);
        let c = s.coordinates(&x).unwrap();
        assert_eq!(c.len(), 2);
        assert!(s.coordinates(&v(&[0, 0, 1])).is_none());
    }
}
