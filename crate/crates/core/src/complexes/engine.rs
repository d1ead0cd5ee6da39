//! A cochain complex whose terms are subquotients of one ambient space `L`
//! and whose differential components are scalar multiples of fixed linear
//! maps of `L`. Every complex in the crate is an instance.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::qlinalg::{Matrix, QuotientBasis, Rat, SparseMatrix, Subquotient, Subspace};
use crate::scat::{fmt_subset, Chain, Subset};

/// Which linear map of `L` a component uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MapRef {
    Identity,
    Op(usize),
}

/// Bookkeeping label of a term: Koszul slot `J`, chain, column and a free multi-index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct TermLabel {
    pub j: Subset,
    pub chain: Option<Chain>,
    pub column: i64,
    pub multi: Vec<i64>,
}

impl fmt::Display for TermLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "J={}", fmt_subset(self.j))?;
        if let Some(c) = &self.chain {
            write!(f, " s={c}")?;
        }
        if self.column != 0 {
            write!(f, " col={}", self.column)?;
        }
        if !self.multi.is_empty() {
            write!(f, " m={:?}", self.multi)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Term {
    pub degree: i64,
    pub label: TermLabel,
    pub space: Subquotient,
}

/// Component `coef · f` from term `src` to term `dst`.
#[derive(Clone, Debug)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub coef: Rat,
    pub map: MapRef,
}

#[derive(Clone, Debug)]
pub struct TermComplex {
    ambient: usize,
    ops: Arc<Vec<Matrix>>,
    pub terms: Vec<Term>,
    pub edges: Vec<Edge>,
}

impl TermComplex {
    pub fn new(ambient: usize, ops: Arc<Vec<Matrix>>) -> TermComplex {
        TermComplex { ambient, ops, terms: Vec::new(), edges: Vec::new() }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn ops(&self) -> &Arc<Vec<Matrix>> {
        &self.ops
    }

    pub fn push_term(&mut self, degree: i64, label: TermLabel, space: Subquotient) -> usize {
        assert_eq!(space.ambient_dim(), self.ambient, "term lives in the wrong ambient space");
        self.terms.push(Term { degree, label, space });
        self.terms.len() - 1
    }

    pub fn push_edge(&mut self, src: usize, dst: usize, coef: Rat, map: MapRef) {
        if !coef.is_zero() {
            self.edges.push(Edge { src, dst, coef, map });
        }
    }

    /// Term dimensions summed per degree.
    pub fn term_dims(&self) -> BTreeMap<i64, usize> {
        let mut out = BTreeMap::new();
        for t in &self.terms {
            let d = t.space.dim();
            if d > 0 {
                *out.entry(t.degree).or_insert(0) += d;
            }
        }
        out
    }

    /// Same complex with every degree moved by `shift`.
    pub fn shifted(mut self, shift: i64) -> TermComplex {
        for t in &mut self.terms {
            t.degree += shift;
        }
        self
    }

    pub fn assemble(&self) -> Result<Assembled> {
        Assembled::build(self)
    }

    pub fn profile(&self) -> Result<CohomologyProfile> {
        Ok(self.assemble()?.profile())
    }
}

/// Coordinates on the terms and the differentials as sparse matrices.
pub struct Assembled {
    coords: Vec<Option<Arc<QuotientBasis>>>,
    offsets: Vec<usize>,
    dims: BTreeMap<i64, usize>,
    diffs: BTreeMap<i64, SparseMatrix>,
}

fn apply_map(ops: &[Matrix], map: MapRef, m: &Matrix) -> Matrix {
    match map {
        MapRef::Identity => m.clone(),
        MapRef::Op(i) => ops[i].compose(m),
    }
}

fn map_subspace(ops: &[Matrix], map: MapRef, s: &Subspace) -> Subspace {
    match map {
        MapRef::Identity => s.clone(),
        MapRef::Op(i) => s.image_under(&ops[i]),
    }
}

/// Memoized quotient coordinates for repeated subquotients.
#[derive(Default)]
struct CoordCache {
    memo: HashMap<Subquotient, Arc<QuotientBasis>>,
}

impl CoordCache {
    fn get(&mut self, sq: &Subquotient) -> Arc<QuotientBasis> {
        if let Some(c) = self.memo.get(sq) {
            return Arc::clone(c);
        }
        let c = Arc::new(sq.coords());
        self.memo.insert(sq.clone(), Arc::clone(&c));
        c
    }
}

/// Block `coef · P_dst · f · C_src` after checking `f` respects numerators and denominators.
fn block(ops: &[Matrix], src: &Term, dst: &Term, cs: &QuotientBasis, cd: &QuotientBasis, e: &Edge) -> Result<Matrix> {
    let num = map_subspace(ops, e.map, &src.space.numerator);
    if !num.is_subspace_of(&dst.space.numerator) {
        return Err(Error::Contract(format!("component {} -> {} leaves the target numerator", src.label, dst.label)));
    }
    let den = map_subspace(ops, e.map, &src.space.denominator);
    if !den.is_subspace_of(&dst.space.denominator) {
        return Err(Error::Contract(format!("component {} -> {} leaves the target denominator", src.label, dst.label)));
    }
    Ok(cd.projector.compose(&apply_map(ops, e.map, &cs.representatives)).scale(&e.coef))
}

impl Assembled {
    fn build(c: &TermComplex) -> Result<Assembled> {
        let mut cache = CoordCache::default();
        let mut coords = Vec::with_capacity(c.terms.len());
        let mut offsets = vec![0; c.terms.len()];
        let mut dims: BTreeMap<i64, usize> = BTreeMap::new();
        for (idx, t) in c.terms.iter().enumerate() {
            if t.space.dim() == 0 {
                coords.push(None);
                continue;
            }
            let q = cache.get(&t.space);
            let slot = dims.entry(t.degree).or_insert(0);
            offsets[idx] = *slot;
            *slot += q.dim();
            coords.push(Some(q));
        }
        let mut diffs: BTreeMap<i64, SparseMatrix> = BTreeMap::new();
        for e in &c.edges {
            let (src, dst) = (&c.terms[e.src], &c.terms[e.dst]);
            if dst.degree != src.degree + 1 {
                return Err(Error::Contract(format!("component {} -> {} does not raise degree by one", src.label, dst.label)));
            }
            let (Some(cs), Some(cd)) = (&coords[e.src], &coords[e.dst]) else { continue };
            let b = block(&c.ops, src, dst, cs, cd, e)?;
            let k = src.degree;
            let d = diffs.entry(k).or_insert_with(|| SparseMatrix::new(dims[&(k + 1)], dims[&k]));
            d.add_block(offsets[e.dst], offsets[e.src], &b);
        }
        let a = Assembled { coords, offsets, dims, diffs };
        for (k, d) in &a.diffs {
            if let Some(next) = a.diffs.get(&(k + 1)) {
                if !next.compose(d).is_zero() {
                    return Err(Error::Contract(format!("d∘d ≠ 0 from degree {k}")));
                }
            }
        }
        Ok(a)
    }

    pub fn dims(&self) -> &BTreeMap<i64, usize> {
        &self.dims
    }

    pub fn dim(&self, k: i64) -> usize {
        self.dims.get(&k).copied().unwrap_or(0)
    }

    /// `d^k : C^k → C^{k+1}`, possibly all zeros.
    pub fn diff(&self, k: i64) -> SparseMatrix {
        self.diffs.get(&k).cloned().unwrap_or_else(|| SparseMatrix::new(self.dim(k + 1), self.dim(k)))
    }

    pub fn ranks(&self) -> BTreeMap<i64, usize> {
        self.diffs.iter().map(|(k, d)| (*k, d.rank())).collect()
    }

    pub fn profile(&self) -> CohomologyProfile {
        let ranks = self.ranks();
        let r = |k: i64| ranks.get(&k).copied().unwrap_or(0);
        let dims = self
            .dims
            .iter()
            .map(|(&k, &n)| (k, n - r(k) - r(k - 1)))
            .filter(|(_, h)| *h > 0)
            .collect();
        CohomologyProfile { dims }
    }

    /// `H^k` as a subquotient of `C^k` (cycles over boundaries).
    pub fn cohomology_space(&self, k: i64) -> Subquotient {
        let n = self.dim(k);
        let z = crate::qlinalg::kernel(&self.diff(k).to_dense());
        let b = crate::qlinalg::image(&self.diff(k - 1).to_dense());
        debug_assert_eq!(z.ambient_dim(), n);
        Subquotient::new_unchecked(z, b)
    }

    fn coords_of(&self, t: usize) -> Option<&Arc<QuotientBasis>> {
        self.coords[t].as_ref()
    }
}

/// Per-degree cohomology dimensions; degrees with zero cohomology are omitted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CohomologyProfile {
    pub dims: BTreeMap<i64, usize>,
}

impl CohomologyProfile {
    pub fn get(&self, k: i64) -> usize {
        self.dims.get(&k).copied().unwrap_or(0)
    }

    pub fn is_acyclic(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn total(&self) -> usize {
        self.dims.values().sum()
    }

    pub fn euler(&self) -> i64 {
        self.dims.iter().map(|(k, d)| if k % 2 == 0 { *d as i64 } else { -(*d as i64) }).sum()
    }

    /// The single degree carrying cohomology, if there is exactly one.
    pub fn concentrated(&self) -> Option<(i64, usize)> {
        if self.dims.len() == 1 {
            self.dims.iter().next().map(|(k, d)| (*k, *d))
        } else {
            None
        }
    }

    pub fn add(&mut self, other: &CohomologyProfile) {
        for (k, d) in &other.dims {
            *self.dims.entry(*k).or_insert(0) += d;
        }
    }

    pub fn shifted(&self, s: i64) -> CohomologyProfile {
        CohomologyProfile { dims: self.dims.iter().map(|(k, d)| (k + s, *d)).collect() }
    }
}

impl fmt::Display for CohomologyProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dims.is_empty() {
            return write!(f, "acyclic");
        }
        let parts: Vec<String> = self.dims.iter().map(|(k, d)| format!("H^{k}={d}")).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// A chain map between two term complexes over the same ambient space, given
/// by components from terms of `source` to terms of `target`.
pub struct ChainMap<'a> {
    pub source: &'a TermComplex,
    pub target: &'a TermComplex,
    pub edges: Vec<Edge>,
}

/// Result of comparing two complexes through a chain map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapCheck {
    pub source: CohomologyProfile,
    pub target: CohomologyProfile,
    pub cone: CohomologyProfile,
    /// Rank of the induced map on `H^k`.
    pub induced_ranks: BTreeMap<i64, usize>,
}

impl MapCheck {
    /// The map is a quasi-isomorphism.
    pub fn is_quasi_iso(&self) -> bool {
        self.cone.is_acyclic()
    }
}

impl<'a> ChainMap<'a> {
    pub fn new(source: &'a TermComplex, target: &'a TermComplex) -> ChainMap<'a> {
        ChainMap { source, target, edges: Vec::new() }
    }

    pub fn push(&mut self, src: usize, dst: usize, coef: Rat, map: MapRef) {
        if !coef.is_zero() {
            self.edges.push(Edge { src, dst, coef, map });
        }
    }

    fn components(&self, a: &Assembled, b: &Assembled) -> Result<BTreeMap<i64, SparseMatrix>> {
        let ops = self.source.ops();
        let mut out: BTreeMap<i64, SparseMatrix> = BTreeMap::new();
        for e in &self.edges {
            let (src, dst) = (&self.source.terms[e.src], &self.target.terms[e.dst]);
            if src.degree != dst.degree {
                return Err(Error::Contract(format!("chain map component {} -> {} changes degree", src.label, dst.label)));
            }
            let (Some(cs), Some(cd)) = (a.coords_of(e.src), b.coords_of(e.dst)) else { continue };
            let blk = block(ops, src, dst, cs, cd, e)?;
            let k = src.degree;
            let m = out.entry(k).or_insert_with(|| SparseMatrix::new(b.dim(k), a.dim(k)));
            m.add_block(b.offsets[e.dst], a.offsets[e.src], &blk);
        }
        Ok(out)
    }

    /// Components per degree as dense matrices in the assembled coordinates.
    pub fn dense_components(&self) -> Result<BTreeMap<i64, Matrix>> {
        let a = self.source.assemble()?;
        let b = self.target.assemble()?;
        Ok(self.components(&a, &b)?.into_iter().map(|(k, m)| (k, m.to_dense())).collect())
    }

    /// Assembles both sides, verifies `d φ = φ d`, and computes the cone.
    pub fn check(&self) -> Result<MapCheck> {
        let a = self.source.assemble()?;
        let b = self.target.assemble()?;
        let phi = self.components(&a, &b)?;
        let get_phi = |k: i64| phi.get(&k).cloned().unwrap_or_else(|| SparseMatrix::new(b.dim(k), a.dim(k)));
        let mut degrees: Vec<i64> = a.dims.keys().chain(b.dims.keys()).copied().collect();
        degrees.sort_unstable();
        degrees.dedup();
        for &k in &degrees {
            let lhs = b.diff(k).compose(&get_phi(k));
            let rhs = get_phi(k + 1).compose(&a.diff(k));
            if lhs != rhs {
                return Err(Error::Contract(format!("map does not commute with d in degree {k}")));
            }
        }
        let (lo, hi) = match (degrees.first(), degrees.last()) {
            (Some(&lo), Some(&hi)) => (lo - 1, hi),
            _ => (0, 0),
        };
        // cone^k = A^{k+1} ⊕ B^k, d = [[-d_A, 0], [φ, d_B]]
        let mut cone = CohomologyProfile::default();
        let mut cone_ranks: BTreeMap<i64, usize> = BTreeMap::new();
        for k in lo..=hi {
            let (a1, bk, a2, b1) = (a.dim(k + 1), b.dim(k), a.dim(k + 2), b.dim(k + 1));
            let mut d = SparseMatrix::new(a2 + b1, a1 + bk);
            for (i, j, v) in a.diff(k + 1).entries() {
                d.add_to(i, j, &-v.clone());
            }
            for (i, j, v) in get_phi(k + 1).entries() {
                d.add_to(a2 + i, j, v);
            }
            for (i, j, v) in b.diff(k).entries() {
                d.add_to(a2 + i, a1 + j, v);
            }
            cone_ranks.insert(k, d.rank());
        }
        for k in lo..=hi {
            let n = a.dim(k + 1) + b.dim(k);
            let h = n - cone_ranks[&k] - cone_ranks.get(&(k - 1)).copied().unwrap_or(0);
            if h > 0 {
                cone.dims.insert(k, h);
            }
        }
        let (pa, pb) = (a.profile(), b.profile());
        let mut induced_ranks = BTreeMap::new();
        let mut above = 0usize;
        for k in (lo..=hi + 1).rev() {
            let rho = (pb.get(k) + pa.get(k + 1)) as i64 - above as i64 - cone.get(k) as i64;
            let rho = rho.max(0) as usize;
            if rho > 0 {
                induced_ranks.insert(k, rho);
            }
            above = rho;
        }
        Ok(MapCheck { source: pa, target: pb, cone, induced_ranks })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::jordan_block;

    fn two_term(n: &Matrix) -> TermComplex {
        let dim = n.rows();
        let mut c = TermComplex::new(dim, Arc::new(vec![n.clone()]));
        let a = c.push_term(0, TermLabel::default(), Subquotient::whole(dim));
        let b = c.push_term(1, TermLabel { j: 1, ..Default::default() }, Subquotient::whole(dim));
        c.push_edge(a, b, Rat::int(1), MapRef::Op(0));
        c
    }

    #[test]
    fn jordan_two_term_profile() {
        let p = two_term(&jordan_block(2)).profile().unwrap();
        assert_eq!(p.get(0), 1);
        assert_eq!(p.get(1), 1);
        let z = two_term(&Matrix::zeros(2, 2)).profile().unwrap();
        assert_eq!((z.get(0), z.get(1)), (2, 2));
    }

    #[test]
    fn identity_map_is_quasi_iso() {
        let c = two_term(&jordan_block(3));
        let mut f = ChainMap::new(&c, &c);
        f.push(0, 0, Rat::int(1), MapRef::Identity);
        f.push(1, 1, Rat::int(1), MapRef::Identity);
        let r = f.check().unwrap();
        assert!(r.is_quasi_iso());
        assert_eq!(r.induced_ranks.get(&0), Some(&1));
        let mut zero = ChainMap::new(&c, &c);
        zero.push(0, 0, Rat::int(0), MapRef::Identity);
        assert!(!zero.check().unwrap().is_quasi_iso());
    }

    #[test]
    fn nonzero_square_is_rejected() {
        let mut c = TermComplex::new(1, Arc::new(vec![]));
        let a = c.push_term(0, TermLabel::default(), Subquotient::whole(1));
        let b = c.push_term(1, TermLabel::default(), Subquotient::whole(1));
        let d = c.push_term(2, TermLabel::default(), Subquotient::whole(1));
        c.push_edge(a, b, Rat::int(1), MapRef::Identity);
        c.push_edge(b, d, Rat::int(1), MapRef::Identity);
        assert!(c.assemble().is_err());
    }
}
