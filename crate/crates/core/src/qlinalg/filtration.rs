use std::collections::BTreeMap;

use super::{LinMap, LinalgError, Matrix, Rat, Subspace, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Increasing,
    Decreasing,
}

/// A finite filtration stored sparsely by its jumps.
///
/// Increasing: `W_k` is the step at the largest recorded index `<= k`, and
/// zero below the first recorded index. Decreasing: `F^p` is the step at the
/// smallest recorded index `>= p`, and zero above the last one.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IncFiltration {
    ambient_dim: usize,
    direction: Direction,
    steps: BTreeMap<i64, Subspace>,
}

impl IncFiltration {
    pub fn new(ambient_dim: usize, direction: Direction) -> IncFiltration {
        IncFiltration { ambient_dim, direction, steps: BTreeMap::new() }
    }

    /// The trivial increasing filtration `0 = W_{k-1} ⊂ W_k = L`.
    pub fn trivial(ambient_dim: usize, k: i64) -> IncFiltration {
        let mut w = IncFiltration::new(ambient_dim, Direction::Increasing);
        w.insert(k, Subspace::full(ambient_dim));
        w
    }

    /// Builds an increasing filtration from its values on `lo..=hi`; below `lo`
    /// it is zero and above `hi` it keeps the value at `hi`.
    pub fn from_levels(ambient_dim: usize, lo: i64, hi: i64, mut level: impl FnMut(i64) -> Subspace) -> IncFiltration {
        let mut w = IncFiltration::new(ambient_dim, Direction::Increasing);
        for k in lo..=hi {
            w.insert(k, level(k));
        }
        w
    }

    /// Builds a decreasing filtration from its values on `lo..=hi`.
    pub fn decreasing_from_levels(
        ambient_dim: usize,
        lo: i64,
        hi: i64,
        mut level: impl FnMut(i64) -> Subspace,
    ) -> IncFiltration {
        let mut w = IncFiltration::new(ambient_dim, Direction::Decreasing);
        for p in (lo..=hi).rev() {
            w.insert(p, level(p));
        }
        w
    }

    /// Records `s` at index `k`, dropping redundant entries so the jump table
    /// stays canonical.
    pub fn insert(&mut self, k: i64, s: Subspace) {
        assert_eq!(s.ambient_dim(), self.ambient_dim, "ambient mismatch");
        self.steps.insert(k, s);
        self.normalize();
    }

    fn normalize(&mut self) {
        let mut out = BTreeMap::new();
        match self.direction {
            Direction::Increasing => {
                let mut prev = Subspace::zero(self.ambient_dim);
                for (k, s) in &self.steps {
                    if *s != prev {
                        out.insert(*k, s.clone());
                        prev = s.clone();
                    }
                }
            }
            Direction::Decreasing => {
                let mut prev = Subspace::zero(self.ambient_dim);
                for (k, s) in self.steps.iter().rev() {
                    if *s != prev {
                        out.insert(*k, s.clone());
                        prev = s.clone();
                    }
                }
            }
        }
        self.steps = out;
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// Recorded jumps, ordered by index.
    pub fn jumps(&self) -> &BTreeMap<i64, Subspace> {
        &self.steps
    }

    pub fn level(&self, k: i64) -> Subspace {
        let found = match self.direction {
            Direction::Increasing => self.steps.range(..=k).next_back(),
            Direction::Decreasing => self.steps.range(k..).next(),
        };
        found.map_or_else(|| Subspace::zero(self.ambient_dim), |(_, s)| s.clone())
    }

    /// Indices between the first and last jump, widened by one on each side.
    pub fn index_range(&self) -> (i64, i64) {
        match (self.steps.keys().next(), self.steps.keys().next_back()) {
            (Some(&lo), Some(&hi)) => (lo - 1, hi + 1),
            _ => (0, 0),
        }
    }

    pub fn is_exhaustive(&self) -> bool {
        match self.direction {
            Direction::Increasing => self.steps.values().next_back().is_some_and(Subspace::is_full) || self.ambient_dim == 0,
            Direction::Decreasing => self.steps.values().next().is_some_and(Subspace::is_full) || self.ambient_dim == 0,
        }
    }

    /// `(W[m])_r = W_{r-m}` for increasing filtrations and `(F[m])^p = F^{p+m}`
    /// for decreasing ones.
    pub fn shift(&self, m: i64) -> IncFiltration {
        let delta = match self.direction {
            Direction::Increasing => m,
            Direction::Decreasing => -m,
        };
        IncFiltration {
            ambient_dim: self.ambient_dim,
            direction: self.direction,
            steps: self.steps.iter().map(|(k, s)| (k + delta, s.clone())).collect(),
        }
    }

    /// `Gr_k = W_k / W_{k-1}` (increasing) or `F^k / F^{k+1}` (decreasing).
    pub fn graded(&self, k: i64) -> Subquotient {
        match self.direction {
            Direction::Increasing => Subquotient::new_unchecked(self.level(k), self.level(k - 1)),
            Direction::Decreasing => Subquotient::new_unchecked(self.level(k), self.level(k + 1)),
        }
    }

    /// Nonzero graded dimensions.
    pub fn graded_dims(&self) -> BTreeMap<i64, usize> {
        let (lo, hi) = self.index_range();
        (lo..=hi)
            .map(|k| (k, self.graded(k).dim()))
            .filter(|(_, d)| *d > 0)
            .collect()
    }

    /// Image filtration `g(W)` under an invertible change of basis.
    pub fn transform(&self, g: &LinMap) -> IncFiltration {
        IncFiltration {
            ambient_dim: g.rows(),
            direction: self.direction,
            steps: self.steps.iter().map(|(k, s)| (*k, s.image_under(g))).collect(),
        }
    }

    /// Checks `f(W_k) ⊆ W_{k+shift}` for every `k`; returns the first failing index.
    pub fn first_incompatibility(&self, f: &LinMap, shift: i64) -> Option<i64> {
        let (lo, hi) = self.index_range();
        (lo..=hi).find(|&k| !self.level(k).image_under(f).is_subspace_of(&self.level(k + shift)))
    }
}

impl std::fmt::Debug for IncFiltration {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("IncFiltration")
            .field("direction", &self.direction)
            .field("dims", &self.steps.iter().map(|(k, s)| (*k, s.dim())).collect::<Vec<_>>())
            .finish()
    }
}

/// `numerator / denominator` with `denominator ⊆ numerator`, both in the same ambient space.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Subquotient {
    pub numerator: Subspace,
    pub denominator: Subspace,
}

impl Subquotient {
    pub fn new(numerator: Subspace, denominator: Subspace) -> Result<Subquotient, LinalgError> {
        if !denominator.is_subspace_of(&numerator) {
            return Err(LinalgError::Contract("denominator is not contained in numerator".into()));
        }
        Ok(Subquotient { numerator, denominator })
    }

    /// For callers that already know `denominator ⊆ numerator`.
    pub fn new_unchecked(numerator: Subspace, denominator: Subspace) -> Subquotient {
        debug_assert!(denominator.is_subspace_of(&numerator));
        Subquotient { numerator, denominator }
    }

    pub fn whole(n: usize) -> Subquotient {
        Subquotient { numerator: Subspace::full(n), denominator: Subspace::zero(n) }
    }

    pub fn sub(s: Subspace) -> Subquotient {
        let n = s.ambient_dim();
        Subquotient { numerator: s, denominator: Subspace::zero(n) }
    }

    pub fn ambient_dim(&self) -> usize {
        self.numerator.ambient_dim()
    }

    pub fn dim(&self) -> usize {
        self.numerator.dim() - self.denominator.dim()
    }

    /// Graded piece of the filtration `w` induced on this subquotient, as a
    /// subquotient of the same ambient space.
    pub fn graded_by(&self, w: &IncFiltration, k: i64) -> Subquotient {
        let (hi, lo) = match w.direction() {
            Direction::Increasing => (w.level(k), w.level(k - 1)),
            Direction::Decreasing => (w.level(k), w.level(k + 1)),
        };
        let num = hi.meet(&self.numerator).plus(&self.denominator);
        let den = lo.meet(&self.numerator).plus(&self.denominator);
        Subquotient { numerator: num, denominator: den }
    }

    /// Image in this subquotient of a subspace `s` of the ambient space.
    pub fn image_of(&self, s: &Subspace) -> Subquotient {
        Subquotient { numerator: s.meet(&self.numerator).plus(&self.denominator), denominator: self.denominator.clone() }
    }

    /// Explicit coordinates: a complement basis and a projector onto it.
    pub fn coords(&self) -> QuotientBasis {
        QuotientBasis::new(self)
    }
}

/// Coordinates on a subquotient `A/D`: representatives `C` (columns) of a
/// basis of `A/D`, and a projector `P` with `P C = I`, `P D = 0`, so that
/// `P v` gives the class of any `v ∈ A`.
#[derive(Clone, Debug)]
pub struct QuotientBasis {
    pub representatives: Matrix,
    pub projector: Matrix,
}

impl QuotientBasis {
    pub fn new(sq: &Subquotient) -> QuotientBasis {
        let n = sq.ambient_dim();
        let d = sq.dim();
        if d == 0 {
            return QuotientBasis { representatives: Matrix::zeros(n, 0), projector: Matrix::zeros(0, n) };
        }
        // greedy extension: denominator basis, then numerator vectors, then units
        let mut chosen: Vec<Vector> = sq.denominator.basis().to_vec();
        let mut current = sq.denominator.clone();
        let mut reps = Vec::new();
        for v in sq.numerator.basis() {
            if !current.contains(v) {
                chosen.push(v.clone());
                reps.push(v.clone());
                current = Subspace::span(&chosen, n);
            }
        }
        debug_assert_eq!(reps.len(), d);
        for i in 0..n {
            if chosen.len() == n {
                break;
            }
            let mut e = vec![Rat::int(0); n];
            e[i] = Rat::int(1);
            if !current.contains(&e) {
                chosen.push(e);
                current = Subspace::span(&chosen, n);
            }
        }
        // columns ordered: reps first, then the rest
        let den_len = sq.denominator.dim();
        let mut order: Vec<Vector> = reps.clone();
        order.extend(chosen[..den_len].iter().cloned());
        order.extend(chosen[den_len + d..].iter().cloned());
        let full = Matrix::from_columns(n, &order);
        let inv = full.inverse().expect("extended basis is invertible");
        let mut projector = Matrix::zeros(d, n);
        for i in 0..d {
            for j in 0..n {
                projector.set(i, j, inv.get(i, j).clone());
            }
        }
        QuotientBasis { representatives: Matrix::from_columns(n, &reps), projector }
    }

    pub fn dim(&self) -> usize {
        self.representatives.cols()
    }
}

/// Map induced by `f` from `src` to `dst`, in the coordinates of [`QuotientBasis`].
pub fn induced_map(f: &LinMap, src: &Subquotient, dst: &Subquotient) -> Result<LinMap, LinalgError> {
    if f.cols() != src.ambient_dim() || f.rows() != dst.ambient_dim() {
        return Err(LinalgError::Dimension { expected: src.ambient_dim(), found: f.cols() });
    }
    if !src.numerator.image_under(f).is_subspace_of(&dst.numerator) {
        return Err(LinalgError::Contract("map does not send source numerator into target numerator".into()));
    }
    if !src.denominator.image_under(f).is_subspace_of(&dst.denominator) {
        return Err(LinalgError::Contract("map does not send source denominator into target denominator".into()));
    }
    let s = src.coords();
    let t = dst.coords();
    Ok(t.projector.compose(&f.compose(&s.representatives)))
}

/// Graded piece `Gr_k` of `w`.
pub fn graded(w: &IncFiltration, k: i64) -> Subquotient {
    w.graded(k)
}

/// `W[m]`.
pub fn shift(w: &IncFiltration, m: i64) -> IncFiltration {
    w.shift(m)
}

/// `Gr^{W_n}_{m_n} ... Gr^{W_1}_{m_1} L` collapsed to one subquotient of `L`,
/// applying the filtrations in list order.
pub fn iterated_graded(filtrations: &[&IncFiltration], indices: &[i64]) -> Subquotient {
    assert_eq!(filtrations.len(), indices.len(), "one index per filtration");
    let n = filtrations.first().map_or(0, |w| w.ambient_dim());
    iterated_graded_of(&Subquotient::whole(n), filtrations, indices)
}

/// Same as [`iterated_graded`] starting from a subquotient instead of `L`.
pub fn iterated_graded_of(base: &Subquotient, filtrations: &[&IncFiltration], indices: &[i64]) -> Subquotient {
    filtrations.iter().zip(indices).fold(base.clone(), |acc, (w, &k)| acc.graded_by(w, k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::jordan_block;

    fn j2_weight() -> IncFiltration {
        let mut w = IncFiltration::new(2, Direction::Increasing);
        w.insert(-1, Subspace::span_of_units(2, [0]));
        w.insert(1, Subspace::full(2));
        w
    }

    #[test]
    fn levels_and_shift() {
        let w = j2_weight();
        assert!(w.level(-2).is_zero());
        assert_eq!(w.level(0).dim(), 1);
        assert!(w.level(7).is_full());
        let s = w.shift(2);
        assert_eq!(s.jumps().keys().copied().collect::<Vec<_>>(), vec![1, 3]);
        assert_eq!(s.level(1), w.level(-1));
    }

    #[test]
    fn graded_of_zero_map_weight() {
        let w = IncFiltration::trivial(3, 0);
        let dims = w.graded_dims();
        assert_eq!(dims.into_iter().collect::<Vec<_>>(), vec![(0, 3)]);
    }

    #[test]
    fn induced_map_examples() {
        let w = j2_weight();
        let n = jordan_block(2);
        let top = w.graded(1);
        let bottom = w.graded(-1);
        let m = induced_map(&n, &top, &bottom).unwrap();
        assert_eq!((m.rows(), m.cols()), (1, 1));
        assert!(!m.get(0, 0).is_zero());
        let id = induced_map(&Matrix::identity(2), &top, &top).unwrap();
        assert_eq!(id, Matrix::identity(1));
        let z = induced_map(&n, &bottom, &bottom).unwrap();
        assert!(z.is_zero());
        assert!(induced_map(&n, &top, &top).unwrap().is_zero());
        let swap = Matrix::from_ints(&[&[0, 1], &[1, 0]]);
        assert!(induced_map(&swap, &bottom, &bottom).is_err());
    }

    #[test]
    fn decreasing_shift_goes_left() {
        let f = IncFiltration::decreasing_from_levels(2, 0, 1, |p| if p == 0 { Subspace::full(2) } else { Subspace::span_of_units(2, [1]) });
        assert_eq!(f.level(1).dim(), 1);
        assert_eq!(f.shift(1).level(0).dim(), 1);
        assert_eq!(f.graded(0).dim(), 1);
    }
}
