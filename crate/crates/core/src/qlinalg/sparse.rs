//! Sparse rational matrices, used for the big differentials where only ranks
//! are needed.

use std::collections::BTreeMap;

use super::{Matrix, Rat};

/// A sparse row: `(column, value)` pairs sorted by column, no zeros.
pub type SparseRow = Vec<(usize, Rat)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), Rat>,
}

impl SparseMatrix {
    pub fn new(rows: usize, cols: usize) -> SparseMatrix {
        SparseMatrix { rows, cols, entries: BTreeMap::new() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> Rat {
        self.entries.get(&(i, j)).cloned().unwrap_or_else(|| Rat::int(0))
    }

    /// Adds `v` to entry `(i, j)`.
    pub fn add_to(&mut self, i: usize, j: usize, v: &Rat) {
        assert!(i < self.rows && j < self.cols, "entry out of range");
        if v.is_zero() {
            return;
        }
        let e = self.entries.entry((i, j)).or_insert_with(|| Rat::int(0));
        *e += v;
        if e.is_zero() {
            self.entries.remove(&(i, j));
        }
    }

    /// Adds the dense block `m` with its top-left corner at `(r0, c0)`.
    pub fn add_block(&mut self, r0: usize, c0: usize, m: &Matrix) {
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let v = m.get(i, j);
                if !v.is_zero() {
                    self.add_to(r0 + i, c0 + j, v);
                }
            }
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Rat)> {
        self.entries.iter().map(|(&(i, j), v)| (i, j, v))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_dense(&self) -> Matrix {
        let mut m = Matrix::zeros(self.rows, self.cols);
        for (i, j, v) in self.entries() {
            m.set(i, j, v.clone());
        }
        m
    }

    pub fn from_dense(m: &Matrix) -> SparseMatrix {
        let mut s = SparseMatrix::new(m.rows(), m.cols());
        s.add_block(0, 0, m);
        s
    }

    pub fn compose(&self, rhs: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in product");
        let mut by_row: Vec<Vec<(usize, &Rat)>> = vec![Vec::new(); rhs.rows];
        for (i, j, v) in rhs.entries() {
            by_row[i].push((j, v));
        }
        let mut out = SparseMatrix::new(self.rows, rhs.cols);
        for (i, k, a) in self.entries() {
            for &(j, b) in &by_row[k] {
                out.add_to(i, j, &(a * b));
            }
        }
        out
    }

    pub fn row_lists(&self) -> Vec<SparseRow> {
        let mut rows = vec![Vec::new(); self.rows];
        for (i, j, v) in self.entries() {
            rows[i].push((j, v.clone()));
        }
        rows
    }

    /// Stacks `blocks` vertically; all must have the same column count.
    pub fn vstack(blocks: &[&SparseMatrix]) -> SparseMatrix {
        let cols = blocks.first().map_or(0, |b| b.cols);
        let mut out = SparseMatrix::new(blocks.iter().map(|b| b.rows).sum(), cols);
        let mut r0 = 0;
        for b in blocks {
            assert_eq!(b.cols, cols, "column mismatch in vstack");
            for (i, j, v) in b.entries() {
                out.entries.insert((r0 + i, j), v.clone());
            }
            r0 += b.rows;
        }
        out
    }

    pub fn rank(&self) -> usize {
        let mut ech = Echelon::new();
        for row in self.row_lists() {
            ech.insert(row);
        }
        ech.rank()
    }
}

/// Incremental row echelon form keyed by pivot column.
#[derive(Default)]
pub struct Echelon {
    pivots: BTreeMap<usize, SparseRow>,
}

impl Echelon {
    pub fn new() -> Echelon {
        Echelon::default()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Reduces `row` against the stored pivots; returns true if it was independent.
    pub fn insert(&mut self, mut row: SparseRow) -> bool {
        while let Some((lead, c)) = row.first().cloned() {
            match self.pivots.get(&lead) {
                Some(p) => row = axpy(&row, &-c, p),
                None => {
                    let inv = c.recip();
                    for (_, v) in row.iter_mut() {
                        *v *= &inv;
                    }
                    self.pivots.insert(lead, row);
                    return true;
                }
            }
        }
        false
    }
}

/// `x + a * y` for sparse rows.
fn axpy(x: &SparseRow, a: &Rat, y: &SparseRow) -> SparseRow {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let take_x = j >= y.len() || (i < x.len() && x[i].0 < y[j].0);
        let take_y = i >= x.len() || (j < y.len() && y[j].0 < x[i].0);
        if take_x {
            out.push(x[i].clone());
            i += 1;
        } else if take_y {
            out.push((y[j].0, a * &y[j].1));
            j += 1;
        } else {
            let v = &x[i].1 + &(a * &y[j].1);
            if !v.is_zero() {
                out.push((x[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}
