//! The nilpotent orbit data `(L, N_i, F, P, m)`, its validation, the
//! monodromy logarithm and the test-corpus generators.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::qlinalg::{
    jordan_block, kernel, Direction, IncFiltration, LinMap, Matrix, Rat, Subquotient, Subspace,
};
use crate::scat::{elements, fmt_subset, full_set, Subset};
use crate::weightcore::weight_filtration;

/// Commuting nilpotents on `L = ℚ^dim` with optional Hodge filtration and pairing.
pub struct NilpotentOrbit {
    dim: usize,
    nilpotents: Vec<LinMap>,
    weight: i64,
    hodge: Option<IncFiltration>,
    pairing: Option<Matrix>,
    labels: Vec<String>,
    cache: RwLock<HashMap<Subset, Arc<IncFiltration>>>,
}

impl Clone for NilpotentOrbit {
    fn clone(&self) -> Self {
        NilpotentOrbit {
            dim: self.dim,
            nilpotents: self.nilpotents.clone(),
            weight: self.weight,
            hodge: self.hodge.clone(),
            pairing: self.pairing.clone(),
            labels: self.labels.clone(),
            cache: RwLock::new(self.cache.read().unwrap().clone()),
        }
    }
}

impl std::fmt::Debug for NilpotentOrbit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NilpotentOrbit")
            .field("dim", &self.dim)
            .field("nilpotents", &self.nilpotents)
            .field("weight", &self.weight)
            .field("hodge", &self.hodge)
            .field("pairing", &self.pairing)
            .finish()
    }
}

impl PartialEq for NilpotentOrbit {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.nilpotents == other.nilpotents
            && self.weight == other.weight
            && self.hodge == other.hodge
            && self.pairing == other.pairing
    }
}

impl NilpotentOrbit {
    /// Builds an orbit without validating it; see [`validate`].
    pub fn new(dim: usize, nilpotents: Vec<LinMap>, weight: i64) -> Result<NilpotentOrbit> {
        if nilpotents.is_empty() {
            return Err(Error::Input("an orbit needs at least one nilpotent".into()));
        }
        if nilpotents.len() > crate::scat::MAX_INDICES {
            return Err(Error::Resource(format!("{} nilpotents exceed the limit", nilpotents.len())));
        }
        for (i, n) in nilpotents.iter().enumerate() {
            if n.rows() != dim || n.cols() != dim {
                return Err(Error::Input(format!("N{} is {}x{}, expected {dim}x{dim}", i + 1, n.rows(), n.cols())));
            }
        }
        let labels = (1..=nilpotents.len()).map(|i| format!("N{i}")).collect();
        Ok(NilpotentOrbit {
            dim,
            nilpotents,
            weight,
            hodge: None,
            pairing: None,
            labels,
            cache: RwLock::new(HashMap::new()),
        })
    }

    pub fn with_hodge(mut self, f: IncFiltration) -> Result<NilpotentOrbit> {
        if f.ambient_dim() != self.dim || f.direction() != Direction::Decreasing {
            return Err(Error::Input("Hodge filtration must be decreasing on L".into()));
        }
        self.hodge = Some(f);
        Ok(self)
    }

    pub fn with_pairing(mut self, p: Matrix) -> Result<NilpotentOrbit> {
        if p.rows() != self.dim || p.cols() != self.dim {
            return Err(Error::Input("pairing must be dim x dim".into()));
        }
        self.pairing = Some(p);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_indices(&self) -> usize {
        self.nilpotents.len()
    }

    /// The index set `M` as a mask.
    pub fn index_set(&self) -> Subset {
        full_set(self.nilpotents.len())
    }

    pub fn nilpotents(&self) -> &[LinMap] {
        &self.nilpotents
    }

    pub fn nilpotent(&self, i: usize) -> &LinMap {
        &self.nilpotents[i]
    }

    pub fn weight(&self) -> i64 {
        self.weight
    }

    pub fn hodge(&self) -> Option<&IncFiltration> {
        self.hodge.as_ref()
    }

    pub fn pairing(&self) -> Option<&Matrix> {
        self.pairing.as_ref()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// `N_J = Σ_{j∈J} N_j`.
    pub fn n_sum(&self, j: Subset) -> LinMap {
        elements(j).into_iter().fold(Matrix::zeros(self.dim, self.dim), |acc, i| &acc + &self.nilpotents[i])
    }

    /// `N_J = Π_{j∈J} N_j`.
    pub fn n_product(&self, j: Subset) -> LinMap {
        elements(j).into_iter().fold(Matrix::identity(self.dim), |acc, i| acc.compose(&self.nilpotents[i]))
    }

    /// `W^J = W(N_J)`, cached. `W^∅` is the weight filtration of the zero map.
    pub fn w(&self, j: Subset) -> Arc<IncFiltration> {
        if let Some(w) = self.cache.read().unwrap().get(&j) {
            return Arc::clone(w);
        }
        let w = Arc::new(weight_filtration(&self.n_sum(j)).expect("orbit nilpotents commute, so N_J is nilpotent"));
        self.cache.write().unwrap().entry(j).or_insert(w).clone()
    }

    /// `W^J` for a nonempty `J`.
    pub fn w_multi(&self, j: Subset) -> Result<Arc<IncFiltration>> {
        if j == 0 {
            return Err(Error::Input("W^J needs a nonempty J".into()));
        }
        if j & !self.index_set() != 0 {
            return Err(Error::Input(format!("{} is not inside the index set", fmt_subset(j))));
        }
        Ok(self.w(j))
    }

    /// The orbit `(L, N_i, i ∈ K)` with indices renumbered in increasing order.
    pub fn restrict_indices(&self, k: Subset) -> Result<NilpotentOrbit> {
        let ns = elements(k).into_iter().map(|i| self.nilpotents[i].clone()).collect();
        let mut o = NilpotentOrbit::new(self.dim, ns, self.weight)?;
        o.hodge = self.hodge.clone();
        o.pairing = self.pairing.clone();
        o.labels = elements(k).into_iter().map(|i| self.labels[i].clone()).collect();
        Ok(o)
    }

    /// Induced orbit on a subquotient stable under every `N_i`, in its quotient coordinates.
    pub fn on_subquotient(&self, sq: &Subquotient) -> Result<NilpotentOrbit> {
        let ns = self
            .nilpotents
            .iter()
            .map(|n| crate::qlinalg::induced_map(n, sq, sq))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        NilpotentOrbit::new(sq.dim(), ns, self.weight)
    }

    /// Basis change `N' = gNg⁻¹`, `F' = gF`, `P' = g⁻ᵀPg⁻¹`.
    pub fn conjugated(&self, g: &Matrix) -> Result<NilpotentOrbit> {
        let gi = g.inverse().ok_or_else(|| Error::Input("conjugating matrix is singular".into()))?;
        let ns = self.nilpotents.iter().map(|n| g.compose(&n.compose(&gi))).collect();
        let mut o = NilpotentOrbit::new(self.dim, ns, self.weight)?;
        o.labels = self.labels.clone();
        o.hodge = self.hodge.as_ref().map(|f| f.transform(g));
        o.pairing = self.pairing.as_ref().map(|p| gi.transpose().compose(&p.compose(&gi)));
        Ok(o)
    }
}

/// One line of a [`ValidationReport`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationItem {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub items: Vec<ValidationItem>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.items.iter().all(|i| i.passed)
    }

    pub fn failures(&self) -> Vec<String> {
        self.items.iter().filter(|i| !i.passed).map(|i| format!("{}: {}", i.name, i.detail)).collect()
    }
}

/// Checks commutativity, nilpotency, transversality `N_i F^p ⊆ F^{p−1}` and
/// `P(N_i x, y) + P(x, N_i y) = 0`. Positivity of the polarization is not checked.
pub fn validate(orbit: &NilpotentOrbit) -> ValidationReport {
    let ns = orbit.nilpotents();
    let mut items = Vec::new();

    let mut bad = Vec::new();
    for i in 0..ns.len() {
        for j in i + 1..ns.len() {
            if !ns[i].commutes_with(&ns[j]) {
                bad.push(format!("(N{}, N{})", i + 1, j + 1));
            }
        }
    }
    items.push(ValidationItem { name: "commutativity", passed: bad.is_empty(), detail: bad.join(" ") });

    let bad: Vec<String> =
        ns.iter().enumerate().filter(|(_, n)| n.nilpotency_index().is_none()).map(|(i, _)| format!("N{}", i + 1)).collect();
    items.push(ValidationItem { name: "nilpotency", passed: bad.is_empty(), detail: bad.join(" ") });

    if let Some(f) = orbit.hodge() {
        let mut bad = Vec::new();
        for (i, n) in ns.iter().enumerate() {
            if let Some(p) = f.first_incompatibility(n, -1) {
                bad.push(format!("N{} at p={p}", i + 1));
            }
        }
        let exhaustive = f.is_exhaustive();
        if !exhaustive {
            bad.push("F is not exhaustive".into());
        }
        items.push(ValidationItem { name: "transversality", passed: bad.is_empty(), detail: bad.join(" ") });
    }

    if let Some(p) = orbit.pairing() {
        let bad: Vec<String> = ns
            .iter()
            .enumerate()
            .filter(|(_, n)| !(&n.transpose().compose(p) + &p.compose(n)).is_zero())
            .map(|(i, _)| format!("N{}", i + 1))
            .collect();
        items.push(ValidationItem { name: "pairing", passed: bad.is_empty(), detail: bad.join(" ") });
    }
    ValidationReport { items }
}

/// `exp(N)` for nilpotent `N`; the series terminates.
pub fn unipotent_exp(n: &LinMap) -> Result<LinMap> {
    let nu = n.nilpotency_index().ok_or_else(|| Error::Contract("exp needs a nilpotent map".into()))?;
    let mut acc = Matrix::identity(n.rows());
    let mut term = Matrix::identity(n.rows());
    for k in 1..nu as i64 {
        term = term.compose(n).scale(&Rat::new(1, k));
        acc = &acc + &term;
    }
    Ok(acc)
}

/// `N = log T = −Σ_{k≥1} (I − T)^k / k` for unipotent `T`.
pub fn monodromy_log(t: &LinMap) -> Result<LinMap> {
    if !t.is_square() {
        return Err(Error::Input("monodromy must be square".into()));
    }
    let u = &Matrix::identity(t.rows()) - t;
    let nu = u.nilpotency_index().ok_or_else(|| Error::Contract("monodromy is not unipotent".into()))?;
    let mut acc = Matrix::zeros(t.rows(), t.rows());
    let mut power = Matrix::identity(t.rows());
    for k in 1..nu as i64 {
        power = power.compose(&u);
        acc = &acc - &power.scale(&Rat::new(1, k));
    }
    if unipotent_exp(&acc)? != *t {
        return Err(Error::Contract("exp(log T) differs from T".into()));
    }
    Ok(acc)
}

/// One nilpotent in Jordan form with blocks of the given sizes, `N e_k = e_{k−1}`.
/// Per block of size `s`: `F^p = span{e_k : k ≥ p}` and `P(e_j, e_k) = (−1)^j δ_{j+k, s−1}`.
pub fn gen_jordan(sizes: &[usize]) -> Result<NilpotentOrbit> {
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(Error::Input("Jordan sizes must be positive".into()));
    }
    let dim: usize = sizes.iter().sum();
    let n = Matrix::direct_sum(&sizes.iter().map(|&s| jordan_block(s)).collect::<Vec<_>>());
    let mut pairing = Matrix::zeros(dim, dim);
    let mut offset = 0;
    let top = *sizes.iter().max().unwrap() as i64 - 1;
    let mut hodge = IncFiltration::new(dim, Direction::Decreasing);
    for p in 0..=top {
        let mut units = Vec::new();
        let mut o = 0;
        for &s in sizes {
            units.extend((p as usize..s).map(|k| o + k));
            o += s;
        }
        hodge.insert(p, Subspace::span_of_units(dim, units));
    }
    for &s in sizes {
        for j in 0..s {
            let sign = if j % 2 == 0 { 1 } else { -1 };
            pairing.set(offset + j, offset + s - 1 - j, Rat::int(sign));
        }
        offset += s;
    }
    NilpotentOrbit::new(dim, vec![n], top)?.with_hodge(hodge)?.with_pairing(pairing)
}

/// Tensor product of sl₂ factors `V_{s_1 − 1} ⊗ ⋯`, with `N_i` acting on factor `i`.
/// The basis is lexicographic in multi-indices `(k_1, …, k_n)`, `0 ≤ k_i < s_i`;
/// `F^p` is spanned by the basis vectors with `Σ k_i ≥ p`, and the pairing is the
/// product of the per-factor forms of [`gen_jordan`].
pub fn gen_sl2_tensor(sizes: &[usize]) -> Result<NilpotentOrbit> {
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(Error::Input("factor sizes must be positive".into()));
    }
    let n = sizes.len();
    let dim: usize = sizes.iter().product();
    let ns: Vec<Matrix> = (0..n)
        .map(|i| {
            sizes.iter().enumerate().fold(Matrix::identity(1), |acc, (j, &s)| {
                acc.kron(&if i == j { jordan_block(s) } else { Matrix::identity(s) })
            })
        })
        .collect();
    let pairing = sizes.iter().fold(Matrix::identity(1), |acc, &s| acc.kron(&gen_jordan(&[s]).unwrap().pairing.unwrap()));
    let multi = tensor_indices(sizes);
    let top: i64 = sizes.iter().map(|&s| s as i64 - 1).sum();
    let hodge = IncFiltration::decreasing_from_levels(dim, 0, top, |p| {
        Subspace::span_of_units(dim, (0..dim).filter(|&b| multi[b].iter().sum::<usize>() as i64 >= p))
    });
    NilpotentOrbit::new(dim, ns, top)?.with_hodge(hodge)?.with_pairing(pairing)
}

/// Multi-indices of the lexicographic tensor basis.
pub fn tensor_indices(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &s in sizes {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..s).map(move |k| {
                    let mut q = p.clone();
                    q.push(k);
                    q
                })
            })
            .collect();
    }
    out
}

/// A random invertible integer matrix: a product of elementary row operations.
pub fn random_invertible(dim: usize, rng: &mut impl Rng) -> Matrix {
    let mut g = Matrix::identity(dim);
    if dim < 2 {
        return g;
    }
    for _ in 0..3 * dim {
        let a = rng.gen_range(0..dim);
        let mut b = rng.gen_range(0..dim - 1);
        if b >= a {
            b += 1;
        }
        let c = Rat::int(rng.gen_range(-2..=2));
        let mut e = Matrix::identity(dim);
        e.set(a, b, c);
        g = e.compose(&g);
    }
    g
}

/// Copy of `orbit` in coordinates scrambled by a seeded random basis change.
pub fn gen_conjugated(orbit: &NilpotentOrbit, seed: u64) -> Result<NilpotentOrbit> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    orbit.conjugated(&random_invertible(orbit.dim(), &mut rng))
}

/// Random nilpotent of dimension `dim`: a random Jordan type in random coordinates.
/// Returns the map, its Jordan block sizes and the basis change `g`, so that the
/// map is `g J g⁻¹` for the block sum `J` in the order of `sizes`.
pub fn random_nilpotent(dim: usize, rng: &mut impl Rng) -> (Matrix, Vec<usize>, Matrix) {
    let mut sizes = Vec::new();
    let mut left = dim;
    while left > 0 {
        let s = rng.gen_range(1..=left.min(5));
        sizes.push(s);
        left -= s;
    }
    let n = Matrix::direct_sum(&sizes.iter().map(|&s| jordan_block(s)).collect::<Vec<_>>());
    let g = random_invertible(dim, rng);
    let gi = g.inverse().expect("elementary products are invertible");
    (g.compose(&n.compose(&gi)), sizes, g)
}

/// `∩_{i∈K} ker N_i`.
pub fn joint_kernel(orbit: &NilpotentOrbit, k: Subset) -> Subspace {
    elements(k).into_iter().fold(Subspace::full(orbit.dim()), |acc, i| acc.meet(&kernel(orbit.nilpotent(i))))
}

/// `Σ_{i∈K} N_i L`.
pub fn joint_image(orbit: &NilpotentOrbit, k: Subset) -> Subspace {
    elements(k)
        .into_iter()
        .fold(Subspace::zero(orbit.dim()), |acc, i| acc.plus(&crate::qlinalg::image(orbit.nilpotent(i))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_examples() {
        let zero = NilpotentOrbit::new(1, vec![Matrix::zeros(1, 1)], 0).unwrap();
        assert!(validate(&zero).passed());
        let a = Matrix::from_ints(&[&[0, 1], &[0, 0]]);
        let b = Matrix::from_ints(&[&[0, 0], &[1, 0]]);
        let bad = NilpotentOrbit::new(2, vec![a, b], 0).unwrap();
        let r = validate(&bad);
        assert!(!r.passed());
        assert!(r.failures()[0].contains("(N1, N2)"));
        let t = gen_sl2_tensor(&[2, 2]).unwrap();
        assert!(validate(&t).passed());
        assert_eq!(t.dim(), 4);
    }

    #[test]
    fn logarithm_examples() {
        assert!(monodromy_log(&Matrix::identity(3)).unwrap().is_zero());
        let t = Matrix::from_ints(&[&[1, 1], &[0, 1]]);
        assert_eq!(monodromy_log(&t).unwrap(), Matrix::from_ints(&[&[0, 1], &[0, 0]]));
        let t3 = Matrix::from_ints(&[&[1, 1, 0], &[0, 1, 1], &[0, 0, 1]]);
        assert_eq!(*monodromy_log(&t3).unwrap().get(0, 2), Rat::new(-1, 2));
        assert!(monodromy_log(&Matrix::from_ints(&[&[2]])).is_err());
    }

    #[test]
    fn multi_weight_dims() {
        let t = gen_sl2_tensor(&[2, 2]).unwrap();
        let dims: Vec<_> = t.w(0b11).graded_dims().into_iter().collect();
        assert_eq!(dims, vec![(-2, 1), (0, 2), (2, 1)]);
        let t23 = gen_sl2_tensor(&[2, 3]).unwrap();
        let dims: Vec<_> = t23.w(0b11).graded_dims().into_iter().collect();
        assert_eq!(dims, vec![(-3, 1), (-1, 2), (1, 2), (3, 1)]);
        assert!(t.w_multi(0).is_err());
    }

    #[test]
    fn conjugation_is_equivariant() {
        let o = gen_jordan(&[3, 1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let g = random_invertible(4, &mut rng);
        let c = o.conjugated(&g).unwrap();
        assert!(validate(&c).passed());
        assert_eq!(*c.w(1), o.w(1).transform(&g));
    }
}
