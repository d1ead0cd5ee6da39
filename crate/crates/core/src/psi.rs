//! A finite model of the nearby-cycles complex `Ψ` with its monodromy `ν`,
//! weight filtration, graded decomposition and primitive parts.
//!
//! `Ψ` is the Koszul complex of `N_i + n_i u` on `Ω*L[u]`, written as columns
//! `Ω*L · u^c`. The component `η` sends column `c` slot `J` to the adjacent
//! column, slot `J ∪ {i}`, with coefficient `±n_i`, and `ν` is the column shift.
//! Degrees are the `Ω*L` degrees; columns do not shift them.
//!
//! Two weight conventions are provided. In cokernel mode (columns `c ≥ 0`,
//! `η, ν : c → c+1`) column `c` of `𝒲_r Ψ` is `𝒲_{r+2c+1} Ω*L` and the finite model
//! is `Ψ / 𝒲_{−R} Ψ`. In kernel mode (`η, ν : c → c−1`) column `c` of `𝒲_r Ψ` is
//! `𝒲_{r−2c−1} Ω*L` and the finite model is `𝒲_R Ψ`. With `R = 2q + 2 − i₀` both
//! models have the `q + 1` columns `0..=q`.

use std::collections::{BTreeMap, HashMap};

use crate::complexes::{
    c_complex, graded_weight, ChainMap, CohomologyProfile, MapCheck, MapRef, OmegaContext, TermComplex,
};
use crate::error::{Error, Result};
use crate::orbit::{joint_image, joint_kernel, NilpotentOrbit};
use crate::qlinalg::{induced_map, iterated_graded_of, IncFiltration, Rat, Subquotient, Subspace};
use crate::scat::{card, chains_through, elements, enumerate_chains, koszul_sign, subsets_of, Chain, Subset};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PsiMode {
    Cokernel,
    Kernel,
}

impl PsiMode {
    /// Column step of `η` and `ν`.
    fn step(self) -> i64 {
        match self {
            PsiMode::Cokernel => 1,
            PsiMode::Kernel => -1,
        }
    }

    /// Weight index of `Ω*L` carried by column `c` of `𝒲_r Ψ`.
    pub fn carried(self, r: i64, c: i64) -> i64 {
        match self {
            PsiMode::Cokernel => r + 2 * c + 1,
            PsiMode::Kernel => r - 2 * c - 1,
        }
    }
}

impl std::str::FromStr for PsiMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<PsiMode> {
        match s {
            "cokernel" => Ok(PsiMode::Cokernel),
            "kernel" => Ok(PsiMode::Kernel),
            _ => Err(Error::Input(format!("unknown mode {s:?}, expected kernel or cokernel"))),
        }
    }
}

/// Columns of `Ψ` over the chains `chains` of `S(m)` with the given spaces,
/// joined by `η`.
#[allow(clippy::too_many_arguments)]
fn column_complex(
    ctx: &OmegaContext,
    m: Subset,
    chains: &[Chain],
    columns: &[i64],
    step: i64,
    mults: &[i64],
    mut space: impl FnMut(i64, Subset, &Chain) -> Subquotient,
) -> TermComplex {
    let mut c = TermComplex::new(ctx.dim(), ctx.ops());
    let mut index: HashMap<i64, HashMap<(Subset, Chain), usize>> = HashMap::new();
    for &col in columns {
        let block = ctx.append_block(&mut c, m, chains, col, 0, |j, ch| space(col, j, ch));
        index.insert(col, block);
    }
    for &col in columns {
        let Some(next) = index.get(&(col + step)) else { continue };
        let here = &index[&col];
        for ((j, ch), &src) in here {
            for i in elements(m & !*j) {
                let dst = next[&(*j | 1 << i, ch.clone())];
                c.push_edge(src, dst, Rat::int(koszul_sign(*j, i) * mults[i]), MapRef::Identity);
            }
        }
    }
    c
}

/// The finite model of `Ψ` attached to an orbit and multiplicities `n_i`.
pub struct PsiComplex<'a> {
    ctx: &'a OmegaContext<'a>,
    mults: Vec<i64>,
    mode: PsiMode,
    p_max: i64,
    i0: i64,
    chains: Vec<Chain>,
}

impl<'a> PsiComplex<'a> {
    /// Builds the model, choosing `p_max` by stabilization when not given.
    pub fn build(ctx: &'a OmegaContext<'a>, mults: &[i64], mode: PsiMode, p_max: Option<i64>) -> Result<PsiComplex<'a>> {
        let orbit = ctx.orbit;
        if mults.len() != orbit.n_indices() || mults.iter().any(|&n| n < 1) {
            return Err(Error::Input(format!("need {} positive multiplicities", orbit.n_indices())));
        }
        let i0 = ctx.support_radius()?.max(1);
        let chains = enumerate_chains(orbit.index_set())?;
        let mut psi = PsiComplex { ctx, mults: mults.to_vec(), mode, p_max: i0, i0, chains };
        match p_max {
            Some(q) if q < i0 => return Err(Error::Input(format!("p_max {q} is below the support radius {i0}"))),
            Some(q) => psi.p_max = q,
            None => {
                let cap = (orbit.dim() * orbit.n_indices()) as i64 + i0;
                let mut q = i0;
                let mut prev = psi.total_profile_at(q)?;
                loop {
                    let next = psi.total_profile_at(q + 1)?;
                    if next == prev {
                        break;
                    }
                    if q >= cap {
                        return Err(Error::Resource(format!("no stabilization up to {cap}: {prev} vs {next}")));
                    }
                    prev = next;
                    q += 1;
                }
                psi.p_max = q;
            }
        }
        Ok(psi)
    }

    pub fn p_max(&self) -> i64 {
        self.p_max
    }

    pub fn i0(&self) -> i64 {
        self.i0
    }

    pub fn mode(&self) -> PsiMode {
        self.mode
    }

    pub fn multiplicities(&self) -> &[i64] {
        &self.mults
    }

    fn big_r(&self, q: i64) -> i64 {
        2 * q + 2 - self.i0
    }

    fn columns(&self, q: i64) -> Vec<i64> {
        (0..=q).collect()
    }

    /// `𝒲_r` of the finite model at truncation `q`; `None` means the whole model.
    fn level_at(&self, q: i64, r: Option<i64>) -> Result<TermComplex> {
        let ctx = self.ctx;
        let big = self.big_r(q);
        let mode = self.mode;
        Ok(column_complex(ctx, ctx.orbit.index_set(), &self.chains, &self.columns(q), mode.step(), &self.mults, |c, j, ch| {
            match mode {
                PsiMode::Cokernel => {
                    let den = ctx.weight_space(j, ch, mode.carried(-big, c));
                    let lvl = r.map_or(i64::MAX / 4, |r| r.max(-big));
                    let num = if r.is_none() { Subspace::full(ctx.dim()) } else { ctx.weight_space(j, ch, mode.carried(lvl, c)) };
                    Subquotient::new_unchecked(num, den)
                }
                PsiMode::Kernel => {
                    let lvl = r.map_or(big, |r| r.min(big));
                    Subquotient::sub(ctx.weight_space(j, ch, mode.carried(lvl, c)))
                }
            }
        }))
    }

    fn total_profile_at(&self, q: i64) -> Result<CohomologyProfile> {
        self.level_at(q, None)?.profile()
    }

    /// The finite model itself.
    pub fn total(&self) -> Result<TermComplex> {
        self.level_at(self.p_max, None)
    }

    pub fn total_profile(&self) -> Result<CohomologyProfile> {
        self.total_profile_at(self.p_max)
    }

    /// Profiles at `p_max` and `p_max + 1`.
    pub fn stabilization(&self) -> Result<(CohomologyProfile, CohomologyProfile)> {
        Ok((self.total_profile_at(self.p_max)?, self.total_profile_at(self.p_max + 1)?))
    }

    /// The subcomplex `𝒲_r` of the finite model.
    pub fn weight(&self, r: i64) -> Result<TermComplex> {
        self.level_at(self.p_max, Some(r))
    }

    /// Columns whose carried weight lies in `[−i₀, i₀]`.
    fn graded_columns(&self, r: i64) -> Vec<i64> {
        (0..=self.p_max.max(self.i0 + r.abs() + 1))
            .filter(|&c| self.mode.carried(r, c).abs() <= self.i0)
            .collect()
    }

    /// `Gr_r^𝒲 Ψ`: column `c` is `Gr_{carried(r, c)} Ω*L`.
    pub fn graded(&self, r: i64) -> Result<TermComplex> {
        let cols = self.graded_columns(r);
        self.graded_on(r, &cols)
    }

    fn graded_on(&self, r: i64, cols: &[i64]) -> Result<TermComplex> {
        let ctx = self.ctx;
        let mode = self.mode;
        Ok(column_complex(ctx, ctx.orbit.index_set(), &self.chains, cols, mode.step(), &self.mults, |c, j, ch| {
            let w = mode.carried(r, c);
            Subquotient::new_unchecked(ctx.weight_space(j, ch, w), ctx.weight_space(j, ch, w - 1))
        }))
    }

    /// Checks that columns outside the window `I(r)` carry nothing in cohomology:
    /// columns whose carried weight exceeds `i₀` vanish termwise, and for `r` on
    /// the side where the window is cut (`r < 0` in cokernel mode, `r > 0` in kernel
    /// mode) the first `|r|` columns form an acyclic piece.
    pub fn window_check(&self, r: i64) -> Result<bool> {
        let beyond: Vec<i64> = (0..=self.p_max + self.i0 + r.abs() + 2)
            .filter(|&c| self.mode.carried(r, c).abs() > self.i0)
            .collect();
        let outside = self.graded_on(r, &beyond)?;
        if outside.terms.iter().any(|t| t.space.dim() > 0) {
            return Ok(false);
        }
        let cut = match self.mode {
            PsiMode::Cokernel if r < 0 => -r,
            PsiMode::Kernel if r > 0 => r,
            _ => 0,
        };
        let low: Vec<i64> = (0..cut).collect();
        Ok(self.graded_on(r, &low)?.profile()?.is_acyclic())
    }

    /// `ν^k` on the finite model, with its induced ranks on cohomology.
    pub fn nu_power(&self, k: i64) -> Result<MapCheck> {
        let total = self.total()?;
        self.shift_map(&total, &total, k)
    }

    /// `ν^k` from `Gr_r` to `Gr_{r−2k}` as a chain map check.
    pub fn nu_power_on_graded(&self, r: i64, k: i64) -> Result<MapCheck> {
        let src = self.graded(r)?;
        let dst = self.graded(r - 2 * k)?;
        self.shift_map(&src, &dst, k)
    }

    /// Chain map that moves column `c` to `c + k·step` by the identity.
    fn shift_map(&self, src: &TermComplex, dst: &TermComplex, k: i64) -> Result<MapCheck> {
        let mut locate: HashMap<(i64, Subset, Chain), usize> = HashMap::new();
        for (t, term) in dst.terms.iter().enumerate() {
            locate.insert((term.label.column, term.label.j, term.label.chain.clone().unwrap()), t);
        }
        let mut map = ChainMap::new(src, dst);
        for (t, term) in src.terms.iter().enumerate() {
            let key = (term.label.column + k * self.mode.step(), term.label.j, term.label.chain.clone().unwrap());
            if let Some(&d) = locate.get(&key) {
                map.push(t, d, Rat::int(1), MapRef::Identity);
            }
        }
        map.check()
    }

    /// `ν` on the finite model and `ν(𝒲_r) ⊆ 𝒲_{r−2}` for `r` in the window.
    pub fn nu_checks(&self) -> Result<(MapCheck, bool)> {
        let total = self.total()?;
        let nu = self.shift_map(&total, &total, 1)?;
        let mut ok = true;
        let big = self.big_r(self.p_max);
        for r in -self.i0 - 2..=self.i0 + 2 {
            if r - 2 < -big && self.mode == PsiMode::Cokernel {
                continue;
            }
            let a = self.weight(r)?;
            let b = self.weight(r - 2)?;
            ok &= self.shift_map(&a, &b, 1).is_ok();
        }
        Ok((nu, ok))
    }

    /// `Ψ^{KM}_r`: column `c` is `C^{KM}_{carried(r, c)}`.
    pub fn psi_km(&self, k: Subset, r: i64) -> Result<TermComplex> {
        let ctx = self.ctx;
        let m = ctx.orbit.index_set();
        let chains = chains_through(m, k)?;
        let cols = self.graded_columns(r);
        let mode = self.mode;
        let mut spaces: BTreeMap<i64, TermComplex> = BTreeMap::new();
        for &c in &cols {
            spaces.insert(c, c_complex(ctx, k, m, mode.carried(r, c))?);
        }
        let lookup: BTreeMap<i64, HashMap<(Subset, Chain), Subquotient>> = spaces
            .iter()
            .map(|(c, cx)| {
                (*c, cx.terms.iter().map(|t| ((t.label.j, t.label.chain.clone().unwrap()), t.space.clone())).collect())
            })
            .collect();
        Ok(column_complex(ctx, m, &chains, &cols, mode.step(), &self.mults, |c, j, ch| lookup[&c][&(j, ch.clone())].clone()))
    }
}

/// Per-`r` comparison of `Gr_r^𝒲 Ψ` with `⊕_K Ψ^{KM}_r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsiDecomposition {
    pub r: i64,
    pub graded: CohomologyProfile,
    pub parts: BTreeMap<Subset, CohomologyProfile>,
}

impl PsiDecomposition {
    pub fn passed(&self) -> bool {
        let mut s = CohomologyProfile::default();
        for p in self.parts.values() {
            s.add(p);
        }
        s == self.graded
    }
}

pub fn psi_decomposition_check(psi: &PsiComplex, r: i64) -> Result<PsiDecomposition> {
    let graded = psi.graded(r)?.profile()?;
    let mut parts = BTreeMap::new();
    for k in subsets_of(psi.ctx.orbit.index_set()).into_iter().filter(|&k| k != 0) {
        parts.insert(k, psi.psi_km(k, r)?.profile()?);
    }
    Ok(PsiDecomposition { r, graded, parts })
}

/// Result of [`monodromy_weight_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonodromyReport {
    pub nu_is_chain_map: bool,
    pub lowers_weight: bool,
    /// For each `r ≥ 1`: (dim of `H(Gr_r)`, rank of `ν^r` on it, bijective).
    pub bijections: BTreeMap<i64, (usize, usize, bool)>,
    pub symmetric: bool,
}

impl MonodromyReport {
    pub fn passed(&self) -> bool {
        self.nu_is_chain_map && self.lowers_weight && self.symmetric && self.bijections.values().all(|b| b.2)
    }
}

/// `ν(𝒲_r) ⊆ 𝒲_{r−2}` and `ν^r : Gr_r → Gr_{−r}` bijective on cohomology for `r ≥ 1`.
pub fn monodromy_weight_check(psi: &PsiComplex) -> Result<MonodromyReport> {
    let (nu, lowers_weight) = psi.nu_checks()?;
    let mut bijections = BTreeMap::new();
    let mut symmetric = true;
    for r in 1..=psi.i0 + 1 {
        let m = psi.nu_power_on_graded(r, r)?;
        let rank: usize = m.induced_ranks.values().sum();
        bijections.insert(r, (m.source.total(), rank, m.is_quasi_iso()));
        symmetric &= m.source == m.target;
    }
    Ok(MonodromyReport { nu_is_chain_map: nu.source == nu.target, lowers_weight, bijections, symmetric })
}

/// `A^K_i`: columns `c = 0..i` carrying `C^K_{i−2c−1}`, joined by `η`.
pub fn a_complex(ctx: &OmegaContext, k: Subset, i: i64, mults: &[i64]) -> Result<TermComplex> {
    if i < 1 {
        return Err(Error::Input("A^K_i needs i ≥ 1".into()));
    }
    let chains = enumerate_chains(k)?;
    let cols: Vec<i64> = (0..i).collect();
    let mut lookup: BTreeMap<i64, HashMap<(Subset, Chain), Subquotient>> = BTreeMap::new();
    for &c in &cols {
        let cx = c_complex(ctx, k, k, i - 2 * c - 1)?;
        lookup.insert(c, cx.terms.iter().map(|t| ((t.label.j, t.label.chain.clone().unwrap()), t.space.clone())).collect());
    }
    Ok(column_complex(ctx, k, &chains, &cols, -1, mults, |c, j, ch| lookup[&c][&(j, ch.clone())].clone()))
}

/// Graded comparison of `coker ν` (cokernel mode) or `ker ν` (kernel mode) with
/// `Gr_{r±1}^𝒲 Ω*L`, keyed by `r`: (computed, expected).
pub fn ker_coker_bridge_check(psi: &PsiComplex) -> Result<BTreeMap<i64, (CohomologyProfile, CohomologyProfile)>> {
    let ctx = psi.ctx;
    let q = psi.p_max;
    let big = psi.big_r(q);
    let mode = psi.mode;
    let mut out = BTreeMap::new();
    for r in -psi.i0 - 1..=psi.i0 + 1 {
        let computed = match mode {
            PsiMode::Cokernel => {
                // (𝒲_r + νΨ) / (𝒲_{r−1} + νΨ), termwise; νΨ in column c is the image of column c − 1
                column_complex(ctx, ctx.orbit.index_set(), &psi.chains, &psi.columns(q), 1, &psi.mults, |c, j, ch| {
                    let trunc = ctx.weight_space(j, ch, mode.carried(-big, c));
                    let image = if c > 0 { Subspace::full(ctx.dim()) } else { trunc.clone() };
                    let num = ctx.weight_space(j, ch, mode.carried(r, c)).plus(&trunc).plus(&image);
                    let den = ctx.weight_space(j, ch, mode.carried(r - 1, c)).plus(&trunc).plus(&image);
                    Subquotient::new_unchecked(num, den)
                })
            }
            PsiMode::Kernel => {
                // ν is injective off column 0 (identity between nested subspaces), so
                // ker ν is column 0 with the induced filtration
                column_complex(ctx, ctx.orbit.index_set(), &psi.chains, &[0], -1, &psi.mults, |c, j, ch| {
                    let top = ctx.weight_space(j, ch, mode.carried(big, c));
                    let num = ctx.weight_space(j, ch, mode.carried(r, c)).meet(&top);
                    let den = ctx.weight_space(j, ch, mode.carried(r - 1, c)).meet(&top);
                    Subquotient::new_unchecked(num, den)
                })
            }
        };
        let target = match mode {
            PsiMode::Cokernel => r + 1,
            PsiMode::Kernel => r - 1,
        };
        let expected = graded_weight(ctx, target)?.profile()?;
        out.insert(r, (computed.profile()?, expected));
    }
    Ok(out)
}

/// `P(m.)L = ∩_i ker N_i^{m_i−1}` inside `Gr^{W^n}_{m_n−2} ⋯ Gr^{W^1}_{m_1−2} L`.
pub fn primitive_part(orbit: &NilpotentOrbit, k: Subset, m: &[i64]) -> Result<Subquotient> {
    if m.len() != card(k) || m.iter().any(|&x| x < 2) {
        return Err(Error::Input("primitive parts need one m_i ≥ 2 per element of K".into()));
    }
    let ws: Vec<_> = elements(k).into_iter().map(|i| orbit.w(1 << i)).collect();
    let refs: Vec<&IncFiltration> = ws.iter().map(|w| w.as_ref()).collect();
    let lowered: Vec<i64> = m.iter().map(|x| x - 2).collect();
    let src = iterated_graded_of(&Subquotient::whole(orbit.dim()), &refs, &lowered);
    let mut num = src.numerator.clone();
    for (p, i) in elements(k).into_iter().enumerate() {
        let e = (m[p] - 1) as u32;
        let mut target = lowered.clone();
        target[p] = -m[p];
        let dst = iterated_graded_of(&Subquotient::whole(orbit.dim()), &refs, &target);
        let f = induced_map(&orbit.nilpotent(i).pow(e), &src, &dst)?;
        let coords = src.coords();
        let kernel_vectors: Vec<_> = f.null_space().iter().map(|v| coords.representatives.apply(v)).collect();
        let ker = Subspace::span(&kernel_vectors, orbit.dim()).plus(&src.denominator);
        num = num.meet(&ker);
    }
    let p = Subquotient::new_unchecked(num, src.denominator.clone());
    let expected = iterated_graded_of(
        &Subquotient::new_unchecked(Subspace::full(orbit.dim()), joint_image(orbit, k)),
        &refs,
        &lowered,
    );
    if p.dim() != expected.dim() {
        return Err(Error::Contract(format!("dim P(m.) = {} but the coinvariant graded piece has dim {}", p.dim(), expected.dim())));
    }
    Ok(p)
}

/// `N_1^{m_1−2} ⋯ N_n^{m_n−2}` maps `P(m.)` bijectively onto the iterated graded
/// at `2 − m.` of `∩_i ker N_i`.
pub fn gamma_check(orbit: &NilpotentOrbit, k: Subset, m: &[i64]) -> Result<bool> {
    let p = primitive_part(orbit, k, m)?;
    let ws: Vec<_> = elements(k).into_iter().map(|i| orbit.w(1 << i)).collect();
    let refs: Vec<&IncFiltration> = ws.iter().map(|w| w.as_ref()).collect();
    let target_idx: Vec<i64> = m.iter().map(|x| 2 - x).collect();
    let in_l = iterated_graded_of(&Subquotient::whole(orbit.dim()), &refs, &target_idx);
    let in_ker = iterated_graded_of(&Subquotient::sub(joint_kernel(orbit, k)), &refs, &target_idx);
    let gamma = elements(k)
        .into_iter()
        .zip(m)
        .fold(crate::qlinalg::Matrix::identity(orbit.dim()), |acc, (i, &x)| acc.compose(&orbit.nilpotent(i).pow((x - 2) as u32)));
    let f = match induced_map(&gamma, &p, &in_l) {
        Ok(f) => f,
        Err(_) => return Ok(false),
    };
    let image = p.numerator.image_under(&gamma).plus(&in_l.denominator);
    let ker_part = in_ker.numerator.meet(&in_l.numerator).plus(&in_l.denominator);
    Ok(f.rank() == p.dim() && image == ker_part && p.dim() == in_ker.dim())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbit::{gen_jordan, gen_sl2_tensor};
    use crate::qlinalg::Matrix;

    fn trivial(n: usize) -> NilpotentOrbit {
        NilpotentOrbit::new(1, vec![Matrix::zeros(1, 1); n], 0).unwrap()
    }

    fn shape(p: &CohomologyProfile) -> Vec<usize> {
        match (p.dims.keys().next(), p.dims.keys().next_back()) {
            (Some(&lo), Some(&hi)) => (lo..=hi).map(|k| p.get(k)).collect(),
            _ => Vec::new(),
        }
    }

    #[test]
    fn milnor_fiber_of_coordinate() {
        let o = trivial(1);
        let ctx = OmegaContext::new(&o);
        let psi = PsiComplex::build(&ctx, &[1], PsiMode::Cokernel, None).unwrap();
        assert_eq!(psi.total_profile().unwrap().total(), 1);
    }

    #[test]
    fn milnor_fiber_of_product() {
        let o = trivial(2);
        let ctx = OmegaContext::new(&o);
        let psi = PsiComplex::build(&ctx, &[1, 1], PsiMode::Cokernel, None).unwrap();
        assert_eq!(shape(&psi.total_profile().unwrap()), vec![1, 1]);
    }

    #[test]
    fn jordan_two() {
        let o = gen_jordan(&[2]).unwrap();
        let ctx = OmegaContext::new(&o);
        let psi = PsiComplex::build(&ctx, &[1], PsiMode::Cokernel, None).unwrap();
        let p = psi.total_profile().unwrap();
        assert_eq!(p.concentrated().map(|x| x.1), Some(2));
        let m = monodromy_weight_check(&psi).unwrap();
        assert!(m.passed(), "{m:?}");
    }

    #[test]
    fn primitive_examples() {
        let t = gen_sl2_tensor(&[2, 2]).unwrap();
        assert_eq!(primitive_part(&t, 0b11, &[3, 3]).unwrap().dim(), 1);
        assert!(gamma_check(&t, 0b11, &[3, 3]).unwrap());
        let j3 = gen_jordan(&[3]).unwrap();
        assert_eq!(primitive_part(&j3, 1, &[4]).unwrap().dim(), 1);
        assert!(gamma_check(&j3, 1, &[4]).unwrap());
        assert_eq!(primitive_part(&j3, 1, &[3]).unwrap().dim(), 0);
        assert!(primitive_part(&j3, 1, &[1]).is_err());
    }
}
