//! The combinatorial complex `Ω*L` over `M₊ × S(M)` with its weight
//! filtration `𝒲` and Hodge filtration `F`, the Koszul complex and `IC(L)`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use super::engine::{ChainMap, CohomologyProfile, MapRef, TermComplex, TermLabel};
use crate::error::{Error, Result};
use crate::orbit::NilpotentOrbit;
use crate::qlinalg::{Matrix, Rat, Subquotient, Subspace};
use crate::scat::{card, elements, enumerate_chains, koszul_sign, subsets_of, Chain, Subset};

/// `a_s(J, r) = |s| − 2|s ∩ J| + r`.
pub fn a_index(s: Subset, j: Subset, r: i64) -> i64 {
    card(s) as i64 - 2 * card(s & j) as i64 + r
}

/// Shared context for building complexes of one orbit: the maps `N_i` as
/// ops and a memo of the weight spaces `𝒲_r(J, s.)`.
pub struct OmegaContext<'a> {
    pub orbit: &'a NilpotentOrbit,
    ops: Arc<Vec<Matrix>>,
    memo: Mutex<HashMap<(Subset, Vec<Subset>, i64), Subspace>>,
}

impl<'a> OmegaContext<'a> {
    pub fn new(orbit: &'a NilpotentOrbit) -> OmegaContext<'a> {
        OmegaContext { orbit, ops: Arc::new(orbit.nilpotents().to_vec()), memo: Mutex::new(HashMap::new()) }
    }

    pub fn ops(&self) -> Arc<Vec<Matrix>> {
        Arc::clone(&self.ops)
    }

    pub fn dim(&self) -> usize {
        self.orbit.dim()
    }

    /// `𝒲_r(J, s.) = ∩_{s_λ ∈ s.} W^{s_λ}_{a_{s_λ}(J, r)}`.
    pub fn weight_space(&self, j: Subset, chain: &Chain, r: i64) -> Subspace {
        self.constrained(j, chain.sets(), r)
    }

    /// `∩_{s ∈ sets} W^s_{a_s(J, r)}`; the full space for an empty list.
    pub fn constrained(&self, j: Subset, sets: &[Subset], r: i64) -> Subspace {
        let key = (j, sets.to_vec(), r);
        if let Some(s) = self.memo.lock().unwrap().get(&key) {
            return s.clone();
        }
        let s = sets
            .iter()
            .fold(Subspace::full(self.dim()), |acc, &s| acc.meet(&self.orbit.w(s).level(a_index(s, j, r))));
        self.memo.lock().unwrap().insert(key, s.clone());
        s
    }

    /// Appends the terms `(J, s.)` for `J ⊆ m` and `s.` in `chains`, with
    /// Koszul components `N_i` and deletion components between listed chains.
    /// Degrees are `|J| + |top| − |s.| + degree_shift`.
    pub fn append_block(
        &self,
        c: &mut TermComplex,
        m: Subset,
        chains: &[Chain],
        column: i64,
        degree_shift: i64,
        mut space: impl FnMut(Subset, &Chain) -> Subquotient,
    ) -> HashMap<(Subset, Chain), usize> {
        let mut index = HashMap::new();
        for j in subsets_of(m) {
            for ch in chains {
                let degree = (card(j) + card(ch.top())) as i64 - ch.len() as i64 + degree_shift;
                let label = TermLabel { j, chain: Some(ch.clone()), column, multi: Vec::new() };
                let t = c.push_term(degree, label, space(j, ch));
                index.insert((j, ch.clone()), t);
            }
        }
        for j in subsets_of(m) {
            let twist = if card(j).is_multiple_of(2) { 1 } else { -1 };
            for ch in chains {
                let src = index[&(j, ch.clone())];
                for i in elements(m & !j) {
                    let dst = index[&(j | 1 << i, ch.clone())];
                    c.push_edge(src, dst, Rat::int(koszul_sign(j, i)), MapRef::Op(i));
                }
                for (smaller, sign, _) in ch.deletions() {
                    if let Some(&dst) = index.get(&(j, smaller)) {
                        c.push_edge(src, dst, Rat::int(sign * twist), MapRef::Identity);
                    }
                }
            }
        }
        index
    }

    /// A complex over `M₊ × S(M)` with the given term spaces.
    pub fn over_chains(&self, m: Subset, space: impl FnMut(Subset, &Chain) -> Subquotient) -> Result<TermComplex> {
        let chains = enumerate_chains(m)?;
        let mut c = TermComplex::new(self.dim(), self.ops());
        self.append_block(&mut c, m, &chains, 0, 0, space);
        Ok(c)
    }

    /// The graded support radius `i₀`: the largest `|r|` with `Gr_r^𝒲` nonzero on some term.
    pub fn support_radius(&self) -> Result<i64> {
        let m = self.orbit.index_set();
        let chains = enumerate_chains(m)?;
        let bound = weight_bound(self.orbit);
        let mut i0 = 0;
        for j in subsets_of(m) {
            for ch in &chains {
                for r in -bound..=bound {
                    if self.weight_space(j, ch, r).dim() != self.weight_space(j, ch, r - 1).dim() {
                        i0 = i0.max(r.abs());
                    }
                }
            }
        }
        Ok(i0)
    }
}

/// A radius beyond which every `𝒲_r` is zero or full.
pub fn weight_bound(orbit: &NilpotentOrbit) -> i64 {
    let n = orbit.n_indices() as i64;
    let nu = orbit.nilpotents().iter().map(|x| x.nilpotency_index().unwrap_or(1) as i64).sum::<i64>();
    nu + 3 * n + 2
}

/// Koszul complex `Ω(L, N_i, i ∈ universe)`: `L` in slot `J` at degree `|J|`.
pub fn koszul(orbit: &NilpotentOrbit, universe: Subset) -> TermComplex {
    koszul_with(orbit, universe, |_| Subspace::full(orbit.dim()))
}

fn koszul_with(orbit: &NilpotentOrbit, universe: Subset, space: impl Fn(Subset) -> Subspace) -> TermComplex {
    let mut c = TermComplex::new(orbit.dim(), Arc::new(orbit.nilpotents().to_vec()));
    let mut index = BTreeMap::new();
    for j in subsets_of(universe) {
        let t = c.push_term(card(j) as i64, TermLabel { j, ..Default::default() }, Subquotient::sub(space(j)));
        index.insert(j, t);
    }
    for j in subsets_of(universe) {
        for i in elements(universe & !j) {
            c.push_edge(index[&j], index[&(j | 1 << i)], Rat::int(koszul_sign(j, i)), MapRef::Op(i));
        }
    }
    c
}

/// `IC(L) = s(N_J L, N.)` with `N_J = Π_{j∈J} N_j`.
pub fn ic_complex(orbit: &NilpotentOrbit) -> TermComplex {
    koszul_with(orbit, orbit.index_set(), |j| crate::qlinalg::image(&orbit.n_product(j)))
}

/// `Ω*L`, all terms equal to `L`.
pub fn omega_star(orbit: &NilpotentOrbit) -> Result<TermComplex> {
    let ctx = OmegaContext::new(orbit);
    ctx.over_chains(orbit.index_set(), |_, _| Subquotient::whole(orbit.dim()))
}

/// The subcomplex `𝒲_r Ω*L`.
pub fn omega_weight(ctx: &OmegaContext, r: i64) -> Result<TermComplex> {
    ctx.over_chains(ctx.orbit.index_set(), |j, ch| Subquotient::sub(ctx.weight_space(j, ch, r)))
}

/// The subcomplex `F^p Ω*L`, with term `F^{p−|J|}L` in slot `J`.
pub fn omega_hodge(orbit: &NilpotentOrbit, p: i64) -> Result<TermComplex> {
    let f = orbit.hodge().ok_or_else(|| Error::Input("orbit has no Hodge filtration".into()))?;
    let ctx = OmegaContext::new(orbit);
    ctx.over_chains(orbit.index_set(), |j, _| Subquotient::sub(f.level(p - card(j) as i64)))
}

/// `Gr_r^𝒲 Ω*L = 𝒲_r / 𝒲_{r−1}`.
pub fn graded_weight(ctx: &OmegaContext, r: i64) -> Result<TermComplex> {
    ctx.over_chains(ctx.orbit.index_set(), |j, ch| {
        Subquotient::new_unchecked(ctx.weight_space(j, ch, r), ctx.weight_space(j, ch, r - 1))
    })
}

/// Compares `H*(𝒲_{−1}Ω*L)` with `H*(IC(L))` and with `H*(𝒲_0Ω*L)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KkReport {
    pub w_minus1: CohomologyProfile,
    pub ic: CohomologyProfile,
    pub w_zero: CohomologyProfile,
}

impl KkReport {
    pub fn passed(&self) -> bool {
        self.w_minus1 == self.ic && self.w_minus1 == self.w_zero
    }
}

pub fn kk_check(orbit: &NilpotentOrbit) -> Result<KkReport> {
    let ctx = OmegaContext::new(orbit);
    Ok(KkReport {
        w_minus1: omega_weight(&ctx, -1)?.profile()?,
        ic: ic_complex(orbit).profile()?,
        w_zero: omega_weight(&ctx, 0)?.profile()?,
    })
}

/// Hodge numbers `h^{p}` of `H^d(Gr_k^𝒲 Ω*L)`, keyed by `(k, d, p)`, nonzero only.
/// `dim F^p H` is the rank of `H(F^p Gr_k) → H(Gr_k)`.
pub fn hodge_numbers(ctx: &OmegaContext, ks: impl IntoIterator<Item = i64>) -> Result<BTreeMap<(i64, i64, i64), usize>> {
    let orbit = ctx.orbit;
    let f = orbit.hodge().ok_or_else(|| Error::Input("orbit has no Hodge filtration".into()))?;
    let (plo, phi) = f.index_range();
    let n = orbit.n_indices() as i64;
    let mut out = BTreeMap::new();
    for k in ks {
        let gr = graded_weight(ctx, k)?;
        let mut f_dims: BTreeMap<i64, BTreeMap<i64, usize>> = BTreeMap::new();
        for p in plo..=phi + n + 1 {
            let sub = ctx.over_chains(orbit.index_set(), |j, ch| {
                let low = ctx.weight_space(j, ch, k - 1);
                let num = ctx.weight_space(j, ch, k).meet(&f.level(p - card(j) as i64)).plus(&low);
                Subquotient::new_unchecked(num, low)
            })?;
            let mut map = ChainMap::new(&sub, &gr);
            for t in 0..sub.terms.len() {
                map.push(t, t, Rat::int(1), MapRef::Identity);
            }
            f_dims.insert(p, map.check()?.induced_ranks);
        }
        let total = gr.profile()?;
        for &d in total.dims.keys() {
            for p in plo..=phi + n {
                let here = f_dims[&p].get(&d).copied().unwrap_or(0);
                let next = f_dims[&(p + 1)].get(&d).copied().unwrap_or(0);
                if here > next {
                    out.insert((k, d, p), here - next);
                }
            }
        }
    }
    Ok(out)
}

/// Graded dims of `Gr^{W'}_r Gr_{F'}^p` on `K[m]` with `W' = 𝒲[m − 2h]`, `F' = F[h]`,
/// compared against the unshifted complex at `(r − m + 2h, p + h)` and degree `d + m`.
pub fn mhc_shift_check(ctx: &OmegaContext, m: i64, h: i64, rs: &[i64]) -> Result<bool> {
    let orbit = ctx.orbit;
    let f = orbit.hodge().ok_or_else(|| Error::Input("orbit has no Hodge filtration".into()))?;
    let (plo, phi) = f.index_range();
    let n = orbit.n_indices() as i64;
    let bigraded = |r: i64, p: i64| -> Result<CohomologyProfile> {
        ctx.over_chains(orbit.index_set(), |j, ch| {
            let fj = |q: i64| f.level(q - card(j) as i64);
            let lo = ctx.weight_space(j, ch, r - 1);
            let hi = ctx.weight_space(j, ch, r);
            let num = hi.meet(&fj(p)).plus(&lo.meet(&fj(p)));
            let den = hi.meet(&fj(p + 1)).plus(&lo.meet(&fj(p)));
            Subquotient::new_unchecked(num, den)
        })?
        .profile()
    };
    for &r in rs {
        for p in plo - h - 1..=phi + n - h + 1 {
            // shifted: W'_r = 𝒲_{r−(m−2h)}, F'^p = F^{p+h}, degree d of K[m] is degree d+m of K
            let shifted = bigraded(r - (m - 2 * h), p + h)?.shifted(-m);
            let original = bigraded(r - m + 2 * h, p + h)?;
            if shifted.shifted(m) != original {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
