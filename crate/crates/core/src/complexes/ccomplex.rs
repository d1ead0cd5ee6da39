//! The purity complexes `C^{KM}_r L`, `C^K_r L`, elementary complexes, the
//! embeddings of `C(T(r))` and `C(T'(r))`, and the checks built on them.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use super::engine::{Assembled, ChainMap, CohomologyProfile, MapCheck, MapRef, TermComplex, TermLabel};
use super::omega::{a_index, graded_weight, omega_weight, OmegaContext};
use crate::error::{Error, Result};
use crate::orbit::{joint_image, joint_kernel, NilpotentOrbit};
use crate::qlinalg::{induced_map, iterated_graded, iterated_graded_of, IncFiltration, Matrix, Rat, Subquotient, Subspace};
use crate::scat::{
    card, chains_through, elements, enumerate_chains, fmt_subset, koszul_sign, permutation_sign, subsets_of, Chain,
    Subset,
};

fn check_pair(orbit: &NilpotentOrbit, k: Subset, m: Subset) -> Result<()> {
    if k == 0 || k & !m != 0 || m & !orbit.index_set() != 0 {
        return Err(Error::Input(format!(
            "need ∅ ≠ K ⊆ M inside the index set, got K={}, M={}",
            fmt_subset(k),
            fmt_subset(m)
        )));
    }
    Ok(())
}

/// Term of `C^{KM}_r` at `(J, s.)`, cut down to the subquotient `base` of `L`.
fn c_term(ctx: &OmegaContext, k: Subset, j: Subset, ch: &Chain, r: i64, base: &Subquotient) -> Subquotient {
    let others: Vec<Subset> = ch.sets().iter().copied().filter(|&s| s != k).collect();
    let a = ctx.constrained(j, &others, r - 1);
    let wk = ctx.orbit.w(k);
    let ak = a_index(k, j, r);
    let cut = a.meet(&base.numerator);
    let num = cut.meet(&wk.level(ak)).plus(&base.denominator);
    let den = cut.meet(&wk.level(ak - 1)).plus(&base.denominator);
    Subquotient::new_unchecked(num, den)
}

/// `C^{KM}_r L` over `M₊ × S_K(M)`; with `K = M` this is `C^K_r L`.
pub fn c_complex(ctx: &OmegaContext, k: Subset, m: Subset, r: i64) -> Result<TermComplex> {
    c_complex_on(ctx, k, m, r, &Subquotient::whole(ctx.dim()))
}

/// `C^{KM}_r` of the subquotient `base` with its induced filtrations.
pub fn c_complex_on(ctx: &OmegaContext, k: Subset, m: Subset, r: i64, base: &Subquotient) -> Result<TermComplex> {
    check_pair(ctx.orbit, k, m)?;
    let chains = chains_through(m, k)?;
    let mut c = TermComplex::new(ctx.dim(), ctx.ops());
    ctx.append_block(&mut c, m, &chains, 0, 0, |j, ch| c_term(ctx, k, j, ch, r, base));
    Ok(c)
}

/// Filtrations `W^i`, `i ∈ K`, in increasing order of `i`.
fn singles(orbit: &NilpotentOrbit, k: Subset) -> Vec<Arc<IncFiltration>> {
    elements(k).into_iter().map(|i| orbit.w(1 << i)).collect()
}

fn tower(ws: &[Arc<IncFiltration>], base: &Subquotient, m: &[i64]) -> Subquotient {
    let refs: Vec<&IncFiltration> = ws.iter().map(|w| w.as_ref()).collect();
    iterated_graded_of(base, &refs, m)
}

/// Indices `m_i − 2[i ∈ J]`, with `m` listed in increasing order of `K`.
fn shifted_indices(k: Subset, j: Subset, m: &[i64]) -> Vec<i64> {
    elements(k).iter().zip(m).map(|(&i, &x)| if j >> i & 1 == 1 { x - 2 } else { x }).collect()
}

/// The elementary complex `K(m.)L`: iterated graded at `m_i − 2[i∈J]` in slot `J ⊆ K`.
pub fn elementary(ctx: &OmegaContext, k: Subset, m: &[i64]) -> Result<TermComplex> {
    if m.len() != card(k) || k & !ctx.orbit.index_set() != 0 || k == 0 {
        return Err(Error::Input("m-vector must have one entry per element of K".into()));
    }
    let ws = singles(ctx.orbit, k);
    let whole = Subquotient::whole(ctx.dim());
    let mut c = TermComplex::new(ctx.dim(), ctx.ops());
    let mut index = HashMap::new();
    for j in subsets_of(k) {
        let label = TermLabel { j, multi: m.to_vec(), ..Default::default() };
        index.insert(j, c.push_term(card(j) as i64, label, tower(&ws, &whole, &shifted_indices(k, j, m))));
    }
    for j in subsets_of(k) {
        for i in elements(k & !j) {
            c.push_edge(index[&j], index[&(j | 1 << i)], Rat::int(koszul_sign(j, i)), MapRef::Op(i));
        }
    }
    Ok(c)
}

/// Predicted cohomology of [`elementary`]: degree `|J(m.)|` with `J(m.) = {i : m_i > 1}`,
/// and the iterated graded of `(∩_{m_i<1} ker N_i) / Σ_{m_j>1} N_j(∩_{m_i<1} ker N_i)`;
/// zero if some `m_i = 1`.
pub fn elementary_cohomology_expected(ctx: &OmegaContext, k: Subset, m: &[i64]) -> (i64, usize) {
    let idx = elements(k);
    let jm: Subset = idx.iter().zip(m).filter(|(_, &x)| x > 1).fold(0, |acc, (&i, _)| acc | 1 << i);
    let degree = card(jm) as i64;
    if m.contains(&1) {
        return (degree, 0);
    }
    let km: Subset = idx.iter().zip(m).filter(|(_, &x)| x < 1).fold(0, |acc, (&i, _)| acc | 1 << i);
    let s = joint_kernel(ctx.orbit, km);
    let d = elements(jm).into_iter().fold(Subspace::zero(ctx.dim()), |acc, j| acc.plus(&s.image_under(ctx.orbit.nilpotent(j))));
    let base = Subquotient::new_unchecked(s, d);
    (degree, tower(&singles(ctx.orbit, k), &base, &shifted_indices(k, jm, m)).dim())
}

/// Range of indices where `W^i` can have nonzero graded pieces, widened by `pad`.
fn support(orbit: &NilpotentOrbit, s: Subset, pad: i64) -> (i64, i64) {
    let (lo, hi) = orbit.w(s).index_range();
    (lo + 1 - pad, hi - 1 + pad)
}

fn vectors(ranges: &[(i64, i64)], total: Option<i64>) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for &(lo, hi) in ranges {
        out = out
            .into_iter()
            .flat_map(|p| {
                (lo..=hi).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    if let Some(t) = total {
        out.retain(|v| v.iter().sum::<i64>() == t);
    }
    out
}

/// The support box of m-vectors for `K`: each `m_i` within the support of `W^i`
/// widened by two, so every nonzero elementary complex is included.
pub fn support_box(orbit: &NilpotentOrbit, k: Subset) -> Vec<Vec<i64>> {
    let ranges: Vec<(i64, i64)> = elements(k).into_iter().map(|i| support(orbit, 1 << i, 2)).collect();
    vectors(&ranges, None)
}

/// `T(r)` for `r > 0` or `T'(r)` for `r < 0`, restricted to vectors with a
/// possibly nonzero elementary complex.
pub fn t_set(orbit: &NilpotentOrbit, k: Subset, r: i64) -> Result<Vec<Vec<i64>>> {
    if r == 0 {
        return Err(Error::Input("T(0) is empty by definition".into()));
    }
    let total = card(k) as i64 + r;
    let ranges: Vec<(i64, i64)> = elements(k)
        .into_iter()
        .map(|i| {
            let (lo, hi) = support(orbit, 1 << i, 2);
            if r > 0 {
                (2.max(lo), hi.max(2))
            } else {
                (lo.min(0), 0.min(hi))
            }
        })
        .collect();
    Ok(vectors(&ranges, Some(total)))
}

/// The source complex `C(T(r))` (or `C(T'(r))` placed in degrees `|J| + |K| − 1`),
/// with terms in the split form `A(m, J) / Σ_i A(m − e_i, J)` where
/// `A(m, J) = ∩_i W^i_{m_i − 2[i∈J]}`.
fn t_source(ctx: &OmegaContext, k: Subset, r: i64) -> Result<(TermComplex, Vec<(Vec<i64>, Subset)>)> {
    let ts = t_set(ctx.orbit, k, r)?;
    let ws = singles(ctx.orbit, k);
    let whole = Subquotient::whole(ctx.dim());
    let shift = if r > 0 { 0 } else { card(k) as i64 - 1 };
    let cut = |b: &[i64]| ws.iter().zip(b).fold(Subspace::full(ctx.dim()), |acc, (w, &x)| acc.meet(&w.level(x)));
    let mut c = TermComplex::new(ctx.dim(), ctx.ops());
    let mut keys = Vec::new();
    let mut index = HashMap::new();
    for m in &ts {
        for j in subsets_of(k) {
            let b = shifted_indices(k, j, m);
            let num = cut(&b);
            let mut den = Subspace::zero(ctx.dim());
            for p in 0..b.len() {
                let mut lower = b.clone();
                lower[p] -= 1;
                den = den.plus(&cut(&lower));
            }
            let sq = Subquotient::new_unchecked(num, den);
            let expected = tower(&ws, &whole, &b).dim();
            if sq.dim() != expected {
                return Err(Error::Contract(format!(
                    "split form at m={m:?}, J={} has dim {} but the iterated graded has dim {expected}",
                    fmt_subset(j),
                    sq.dim()
                )));
            }
            let label = TermLabel { j, multi: m.clone(), ..Default::default() };
            index.insert((m.clone(), j), c.push_term(card(j) as i64 + shift, label, sq));
            keys.push((m.clone(), j));
        }
    }
    for m in &ts {
        for j in subsets_of(k) {
            for i in elements(k & !j) {
                c.push_edge(index[&(m.clone(), j)], index[&(m.clone(), j | 1 << i)], Rat::int(koszul_sign(j, i)), MapRef::Op(i));
            }
        }
    }
    Ok((c, keys))
}

/// Chain map `C(T(r)) → C^K_r` (diagonal into maximal chains, signed by the
/// removal permutation) or `C(T'(r))[1−|K|] → C^K_r` (into the chain `(K)`),
/// checked for bijectivity on cohomology through its cone.
pub fn embed_t_complex(ctx: &OmegaContext, k: Subset, r: i64) -> Result<MapCheck> {
    let (source, keys) = t_source(ctx, k, r)?;
    let target = c_complex(ctx, k, k, r)?;
    let mut locate: HashMap<(Subset, Chain), usize> = HashMap::new();
    for (t, term) in target.terms.iter().enumerate() {
        locate.insert((term.label.j, term.label.chain.clone().expect("chain label")), t);
    }
    let chains = enumerate_chains(k)?;
    let mut map = ChainMap::new(&source, &target);
    for (s, (_, j)) in keys.iter().enumerate() {
        if r > 0 {
            for ch in chains.iter().filter(|c| c.len() == card(k)) {
                let order = ch.removal_order().expect("maximal chain");
                map.push(s, locate[&(*j, ch.clone())], Rat::int(permutation_sign(&order)), MapRef::Identity);
            }
        } else {
            let top = Chain::new(vec![k])?;
            map.push(s, locate[&(*j, top)], Rat::int(1), MapRef::Identity);
        }
    }
    map.check()
}

/// Outcome of [`purity_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PurityReport {
    pub k: Subset,
    pub r: i64,
    pub profile: CohomologyProfile,
    pub expected_degree: i64,
    pub expected_dim: usize,
    pub passed: bool,
}

/// `H*(C^K_r L)` is `Gr^{W^K}_{r−|K|}(L/Σ N_i L)` in degree `|K|` for `r > 0`,
/// `Gr^{W^K}_{r+|K|}(∩ ker N_i)` in degree `|K| − 1` for `r < 0`, and zero for `r = 0`.
pub fn purity_check(ctx: &OmegaContext, k: Subset, r: i64) -> Result<PurityReport> {
    let orbit = ctx.orbit;
    let n = card(k) as i64;
    let profile = c_complex(ctx, k, k, r)?.profile()?;
    let wk = orbit.w(k);
    let (expected_degree, expected_dim) = if r > 0 {
        let q = Subquotient::new_unchecked(Subspace::full(orbit.dim()), joint_image(orbit, k));
        (n, q.graded_by(&wk, r - n).dim())
    } else if r < 0 {
        (n - 1, Subquotient::sub(joint_kernel(orbit, k)).graded_by(&wk, r + n).dim())
    } else {
        (0, 0)
    };
    let empty_t = (1..n).contains(&r) || (-n + 1..=0).contains(&r);
    let passed = if expected_dim == 0 || empty_t {
        profile.is_acyclic() && (!empty_t || expected_dim == 0)
    } else {
        profile.concentrated() == Some((expected_degree, expected_dim))
    };
    Ok(PurityReport { k, r, profile, expected_degree, expected_dim, passed })
}

/// Per-degree comparison of `Gr_r^𝒲 Ω*L` with `⊕_K C^{KM}_r L`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionReport {
    pub r: i64,
    pub graded: CohomologyProfile,
    pub parts: BTreeMap<Subset, CohomologyProfile>,
    pub euler_terms: (i64, i64),
}

impl DecompositionReport {
    pub fn sum(&self) -> CohomologyProfile {
        let mut s = CohomologyProfile::default();
        for p in self.parts.values() {
            s.add(p);
        }
        s
    }

    pub fn passed(&self) -> bool {
        self.graded == self.sum() && self.euler_terms.0 == self.euler_terms.1 && (self.r != 0 || self.graded.is_acyclic())
    }
}

fn chain_euler(c: &TermComplex) -> i64 {
    c.term_dims().iter().map(|(k, d)| if k % 2 == 0 { *d as i64 } else { -(*d as i64) }).sum()
}

pub fn decomposition_check(ctx: &OmegaContext, r: i64) -> Result<DecompositionReport> {
    let m = ctx.orbit.index_set();
    let gr = graded_weight(ctx, r)?;
    let graded = gr.profile()?;
    let mut parts = BTreeMap::new();
    let mut euler = 0;
    for k in subsets_of(m).into_iter().filter(|&k| k != 0) {
        let c = c_complex(ctx, k, m, r)?;
        euler += chain_euler(&c);
        parts.insert(k, c.profile()?);
    }
    Ok(DecompositionReport { r, graded, parts, euler_terms: (chain_euler(&gr), euler) })
}

/// Endomorphism of the degree-`k` space of an assembled complex induced termwise by `op`.
fn termwise_matrix(c: &TermComplex, a: &Assembled, op: usize, k: i64) -> Result<Matrix> {
    let mut endo = ChainMap::new(c, c);
    for t in 0..c.terms.len() {
        endo.push(t, t, Rat::int(1), MapRef::Op(op));
    }
    let n = a.dim(k);
    Ok(endo.dense_components()?.remove(&k).unwrap_or_else(|| Matrix::zeros(n, n)))
}

/// Outcome of [`w_minus1_fiber_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberReport {
    pub k: Subset,
    pub r: i64,
    pub fiber_dim: usize,
    pub lhs: CohomologyProfile,
    pub rhs: CohomologyProfile,
    pub passed: bool,
}

/// `H*(C^{KM}_r L) ≅ H*(𝒲_{−1}Ω*(H))[−d_K]` where `H = H^{d_K}(C^K_r L)` carries the
/// nilpotents `N_i`, `i ∈ M − K`, and `d_K` is `|K|` for `r > 0`, `|K| − 1` for `r < 0`.
pub fn w_minus1_fiber_check(ctx: &OmegaContext, k: Subset, r: i64) -> Result<FiberReport> {
    let orbit = ctx.orbit;
    let m = orbit.index_set();
    if k == m || r == 0 {
        return Err(Error::Input("need K ⊊ M and r ≠ 0".into()));
    }
    check_pair(orbit, k, m)?;
    let dk = if r > 0 { card(k) as i64 } else { card(k) as i64 - 1 };
    let ck = c_complex(ctx, k, k, r)?;
    let assembled = ck.assemble()?;
    let lhs = c_complex(ctx, k, m, r)?.profile()?;
    let pk = assembled.profile();
    if pk.dims.keys().any(|&d| d != dk) {
        return Ok(FiberReport { k, r, fiber_dim: pk.total(), lhs, rhs: CohomologyProfile::default(), passed: false });
    }
    let h = assembled.cohomology_space(dk);
    let fiber_dim = h.dim();
    if fiber_dim == 0 {
        return Ok(FiberReport { k, r, fiber_dim, passed: lhs.is_acyclic(), lhs, rhs: CohomologyProfile::default() });
    }
    let rest = elements(m & !k);
    let mut ns = Vec::new();
    for &i in &rest {
        let full = termwise_matrix(&ck, &assembled, i, dk)?;
        ns.push(induced_map(&full, &h, &h)?);
    }
    let fiber = NilpotentOrbit::new(fiber_dim, ns, orbit.weight())?;
    let fctx = OmegaContext::new(&fiber);
    let rhs = omega_weight(&fctx, -1)?.profile()?.shifted(dk);
    Ok(FiberReport { k, r, fiber_dim, passed: lhs == rhs, lhs, rhs })
}

/// Acyclicity of `C^K_r(W^i_1 L)` for `r ≥ 0` and of `C^K_r(L / W^i_0 L)` for `r ≤ 0`.
pub fn basic_lemma_check(ctx: &OmegaContext, k: Subset, i: usize, r: i64) -> Result<bool> {
    let wi = ctx.orbit.w(1 << i);
    let n = ctx.dim();
    let mut ok = true;
    if r >= 0 {
        let base = Subquotient::sub(wi.level(1));
        ok &= c_complex_on(ctx, k, k, r, &base)?.profile()?.is_acyclic();
    }
    if r <= 0 {
        let base = Subquotient::new_unchecked(Subspace::full(n), wi.level(0));
        ok &= c_complex_on(ctx, k, k, r, &base)?.profile()?.is_acyclic();
    }
    Ok(ok)
}

/// Termwise decomposition `C^K_r(J, s.) ≅ ⊕_{m ∈ X(J, s., r)} Gr_m L`.
pub fn elementary_decomposition_check(ctx: &OmegaContext, k: Subset, r: i64) -> Result<bool> {
    let c = c_complex(ctx, k, k, r)?;
    let ws = singles(ctx.orbit, k);
    let whole = Subquotient::whole(ctx.dim());
    let cells = support_box(ctx.orbit, k);
    let dims: Vec<usize> = cells.iter().map(|m| tower(&ws, &whole, m).dim()).collect();
    let idx = elements(k);
    for term in &c.terms {
        let j = term.label.j;
        let ch = term.label.chain.as_ref().expect("chain label");
        let want: usize = cells
            .iter()
            .zip(&dims)
            .filter(|(m, _)| {
                m.iter().sum::<i64>() == a_index(k, j, r)
                    && ch.sets().iter().filter(|&&s| s != k).all(|&s| {
                        let part: i64 = idx.iter().zip(m.iter()).filter(|(&i, _)| s >> i & 1 == 1).map(|(_, x)| x).sum();
                        part <= a_index(s, j, r - 1)
                    })
            })
            .map(|(_, d)| d)
            .sum();
        if want != term.space.dim() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `Gr^{W^K}_{r−|K|}(L/Σ N_i L)` as a subquotient of `L`.
pub fn coker_graded(orbit: &NilpotentOrbit, k: Subset, w: i64) -> Subquotient {
    Subquotient::new_unchecked(Subspace::full(orbit.dim()), joint_image(orbit, k)).graded_by(&orbit.w(k), w)
}

/// Iterated graded piece `Gr^{W^{i_n}}_{m_n} ⋯ Gr^{W^{i_1}}_{m_1} L` over `K`.
pub fn iterated(orbit: &NilpotentOrbit, k: Subset, m: &[i64]) -> Subquotient {
    let ws = singles(orbit, k);
    let refs: Vec<&IncFiltration> = ws.iter().map(|w| w.as_ref()).collect();
    iterated_graded(&refs, m)
}
