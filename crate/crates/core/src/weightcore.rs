//! Weight filtrations of nilpotent endomorphisms, relative weight
//! filtrations, and the decomposition checks of the Key Lemma.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::orbit::NilpotentOrbit;
use crate::qlinalg::{
    induced_map, iterated_graded, kernel, Direction, IncFiltration, LinMap, Matrix, Subquotient, Subspace,
};
use crate::scat::{card, elements, fmt_subset, subsets_of, Subset};

/// `W(N)` centered at 0, by `W_k = Σ_{j≥0} N^j(ker N^{k+2j+1})`.
pub fn weight_filtration(n: &LinMap) -> Result<IncFiltration> {
    let dim = n.rows();
    if !n.is_square() {
        return Err(Error::Input("nilpotent must be square".into()));
    }
    let nu = n
        .nilpotency_index()
        .ok_or_else(|| Error::Contract("endomorphism is not nilpotent".into()))? as i64;
    if nu <= 1 {
        return Ok(IncFiltration::trivial(dim, 0));
    }
    let powers: Vec<Matrix> = (0..=nu).map(|e| n.pow(e as u32)).collect();
    let kernels: Vec<Subspace> = powers.iter().map(kernel).collect();
    let ker_pow = |e: i64| -> Subspace {
        if e <= 0 {
            Subspace::zero(dim)
        } else {
            kernels[e.min(nu) as usize].clone()
        }
    };
    let top = nu - 1;
    let w = IncFiltration::from_levels(dim, -top, top, |k| {
        let mut acc = Subspace::zero(dim);
        for j in 0..nu {
            if k + 2 * j < 0 {
                continue;
            }
            acc = acc.plus(&ker_pow(k + 2 * j + 1).image_under(&powers[j as usize]));
        }
        acc
    });
    debug_assert!(verify_weight_axioms(n, &w).holds);
    Ok(w)
}

/// `W(N)` read off a Jordan basis: for `N = g J g⁻¹` with `J` the block sum of
/// `sizes`, the `t`-th vector of a block of size `s` has weight `2t − s + 1`.
pub fn weight_from_jordan_basis(sizes: &[usize], g: &Matrix) -> IncFiltration {
    let dim = g.rows();
    let mut weights = Vec::with_capacity(dim);
    for &s in sizes {
        weights.extend((0..s as i64).map(|t| 2 * t - s as i64 + 1));
    }
    let top = weights.iter().copied().max().unwrap_or(0);
    IncFiltration::from_levels(dim, -top - 1, top, |k| {
        let cols: Vec<_> = (0..dim).filter(|&c| weights[c] <= k).map(|c| g.column(c)).collect();
        Subspace::span(&cols, dim)
    })
}

/// Summary of a centered weight filtration.
#[derive(Clone, Debug)]
pub struct WeightReport {
    pub filtration: IncFiltration,
    pub graded_dims: BTreeMap<i64, usize>,
    pub axiom_witnesses: Vec<(i64, usize)>,
}

pub fn weight_report(n: &LinMap) -> Result<WeightReport> {
    let filtration = weight_filtration(n)?;
    let graded_dims = filtration.graded_dims();
    let check = verify_weight_axioms(n, &filtration);
    if !check.holds {
        return Err(Error::Contract(format!("weight axioms fail: {:?}", check.failure)));
    }
    Ok(WeightReport { filtration, graded_dims, axiom_witnesses: check.witnesses })
}

/// Outcome of [`verify_weight_axioms`]; `witnesses` lists `(j, rank of N^j on Gr_j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomCheck {
    pub holds: bool,
    pub failure: Option<AxiomFailure>,
    pub witnesses: Vec<(i64, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AxiomFailure {
    NotExhaustive,
    Inclusion { j: i64 },
    NotBijective { j: i64, source_dim: usize, target_dim: usize, rank: usize },
}

/// Checks `N W_j ⊆ W_{j−2}` and that `N^j : Gr_j → Gr_{−j}` is bijective for `j > 0`.
pub fn verify_weight_axioms(n: &LinMap, w: &IncFiltration) -> AxiomCheck {
    let fail = |f| AxiomCheck { holds: false, failure: Some(f), witnesses: Vec::new() };
    if !w.is_exhaustive() || w.direction() != Direction::Increasing {
        return fail(AxiomFailure::NotExhaustive);
    }
    if let Some(j) = w.first_incompatibility(n, -2) {
        return fail(AxiomFailure::Inclusion { j });
    }
    let (lo, hi) = w.index_range();
    let top = lo.abs().max(hi.abs());
    let mut witnesses = Vec::new();
    for j in 0..=top {
        let src = w.graded(j);
        let dst = w.graded(-j);
        let m = induced_map(&n.pow(j as u32), &src, &dst).expect("inclusions already checked");
        let rank = m.rank();
        if rank != src.dim() || rank != dst.dim() {
            return fail(AxiomFailure::NotBijective { j, source_dim: src.dim(), target_dim: dst.dim(), rank });
        }
        if j > 0 && rank > 0 {
            witnesses.push((j, rank));
        }
    }
    AxiomCheck { holds: true, failure: None, witnesses }
}

/// Checks that `M` is the weight filtration of `N` relative to `W`:
/// `N M_j ⊆ M_{j−2}` and `N^j : Gr^M_{k+j} Gr^W_k ≅ Gr^M_{k−j} Gr^W_k`.
pub fn verify_relative(n: &LinMap, w: &IncFiltration, m: &IncFiltration) -> Result<bool> {
    if let Some(k) = w.first_incompatibility(n, 0) {
        return Err(Error::Contract(format!("N does not preserve W_{k}")));
    }
    if m.first_incompatibility(n, -2).is_some() {
        return Ok(false);
    }
    let (wlo, whi) = w.index_range();
    let (mlo, mhi) = m.index_range();
    let span = (mhi - mlo).abs() + (whi - wlo).abs() + 2;
    for k in wlo..=whi {
        for j in 0..=span {
            let src = iterated_graded(&[w, m], &[k, k + j]);
            let dst = iterated_graded(&[w, m], &[k, k - j]);
            let f = match induced_map(&n.pow(j as u32), &src, &dst) {
                Ok(f) => f,
                Err(_) => return Ok(false),
            };
            let r = f.rank();
            if r != src.dim() || r != dst.dim() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `dim Gr^M_l L = Σ_k dim Gr^M_l Gr^W_k L` for every `l`.
pub fn kashiwara_split_check(w: &IncFiltration, m: &IncFiltration) -> bool {
    let (wlo, whi) = w.index_range();
    let (mlo, mhi) = m.index_range();
    (mlo..=mhi).all(|l| {
        let total = m.graded(l).dim();
        let split: usize = (wlo..=whi).map(|k| iterated_graded(&[w, m], &[k, l]).dim()).sum();
        total == split
    })
}

/// One named sub-check of [`key_lemma_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct KeyLemmaReport {
    pub checks: Vec<SubCheck>,
}

impl KeyLemmaReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(SubCheck { name: name.into(), passed, detail: detail.into() });
    }
}

/// Weight indices that can carry a nonzero graded piece of `W^{i}`.
fn support(orbit: &NilpotentOrbit, s: Subset) -> (i64, i64) {
    let (lo, hi) = orbit.w(s).index_range();
    (lo + 1, hi - 1)
}

fn boxes(ranges: &[(i64, i64)]) -> Vec<Vec<i64>> {
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
    out
}

/// Iterated graded dimension `Gr^{W^{order_n}}_{m_n} ⋯ Gr^{W^{order_1}}_{m_1} L`, with
/// `m` indexed like `order`.
fn tower_dim(orbit: &NilpotentOrbit, order: &[usize], m: &[i64]) -> usize {
    let ws: Vec<_> = order.iter().map(|&i| orbit.w(1 << i)).collect();
    let refs: Vec<&IncFiltration> = ws.iter().map(|w| w.as_ref()).collect();
    iterated_graded(&refs, m).dim()
}

/// Runs sub-checks (i)–(iv) of the Key Lemma for the subset `a`, including the
/// refined bounds of the natural decomposition.
pub fn key_lemma_check(orbit: &NilpotentOrbit, a: Subset, seed: u64) -> Result<KeyLemmaReport> {
    if a == 0 || a & !orbit.index_set() != 0 {
        return Err(Error::Input(format!("{} is not a nonempty subset of the index set", fmt_subset(a))));
    }
    let mut report = KeyLemmaReport::default();
    let idx = elements(a);
    let wa = orbit.w(a);

    // (i) Gr^{W^A}_l Gr^{W^i}_k Gr^{W^{A-i}}_{k'} vanishes unless l = k + k'.
    if idx.len() > 1 {
        for &i in &idx {
            let rest = a & !(1 << i);
            let wi = orbit.w(1 << i);
            let wr = orbit.w(rest);
            let (ilo, ihi) = support(orbit, 1 << i);
            let (rlo, rhi) = support(orbit, rest);
            let mut ok = true;
            let mut witness = String::new();
            for k in ilo..=ihi {
                for kp in rlo..=rhi {
                    let base = iterated_graded(&[wr.as_ref(), wi.as_ref()], &[kp, k]);
                    let on_diag = base.graded_by(&wa, k + kp).dim();
                    if on_diag != base.dim() {
                        ok = false;
                        witness = format!("i={}, k={k}, k'={kp}: {} of {}", i + 1, on_diag, base.dim());
                    }
                }
            }
            report.push(format!("(i) i={}", i + 1), ok, witness);
        }
    }

    // (ii) dim Gr^{W^A}_r L = Σ_{Σm=r} dim of the iterated one-variable pieces.
    let ranges: Vec<(i64, i64)> = idx.iter().map(|&i| support(orbit, 1 << i)).collect();
    let cells = boxes(&ranges);
    let dims: Vec<usize> = cells.iter().map(|m| tower_dim(orbit, &idx, m)).collect();
    let (alo, ahi) = support(orbit, a);
    let mut ok = true;
    let mut detail = Vec::new();
    for r in alo.min(-1)..=ahi.max(1) {
        let lhs = wa.graded(r).dim();
        let rhs: usize = cells.iter().zip(&dims).filter(|(m, _)| m.iter().sum::<i64>() == r).map(|(_, d)| d).sum();
        if lhs != rhs {
            ok = false;
        }
        if lhs > 0 || rhs > 0 {
            detail.push(format!("r={r}: {lhs}={rhs}"));
        }
    }
    report.push("(ii) graded dims", ok, detail.join(", "));

    // Refined form: Gr^{W^A}_r (∩_i W^i_{a_i}) is counted by the cells with m ≤ a.
    let mut ok = true;
    let mut witness = String::new();
    let bound_ranges: Vec<(i64, i64)> = ranges.iter().map(|&(lo, hi)| (lo - 1, hi)).collect();
    let singles: Vec<_> = idx.iter().map(|&i| orbit.w(1 << i)).collect();
    for bound in boxes(&bound_ranges) {
        let cut = singles.iter().zip(&bound).fold(Subspace::full(orbit.dim()), |acc, (w, &b)| acc.meet(&w.level(b)));
        for r in alo..=ahi {
            let lhs = wa.level(r).meet(&cut).dim() - wa.level(r - 1).meet(&cut).dim();
            let rhs: usize = cells
                .iter()
                .zip(&dims)
                .filter(|(m, _)| m.iter().sum::<i64>() == r && m.iter().zip(&bound).all(|(x, b)| x <= b))
                .map(|(_, d)| d)
                .sum();
            if lhs != rhs {
                ok = false;
                witness = format!("bounds {bound:?}, r={r}: {lhs} vs {rhs}");
            }
        }
    }
    report.push("(ii) bounded decomposition", ok, witness);

    // (iii) for A = B ⊔ C: Gr^{W^A}_{b+c} Gr^{W^B}_b Gr^{W^C}_c has the dimension of
    // Gr^{W^B}_b Gr^{W^C}_c, and summing over b + c = l recovers Gr^{W^A}_l.
    let mut ok = true;
    let mut witness = String::new();
    for b_set in subsets_of(a).into_iter().filter(|&b| b != 0 && b != a) {
        let c_set = a & !b_set;
        let wb = orbit.w(b_set);
        let wc = orbit.w(c_set);
        let (blo, bhi) = support(orbit, b_set);
        let (clo, chi) = support(orbit, c_set);
        let mut by_l: BTreeMap<i64, usize> = BTreeMap::new();
        for b in blo..=bhi {
            for c in clo..=chi {
                let base = iterated_graded(&[wc.as_ref(), wb.as_ref()], &[c, b]);
                let lifted = base.graded_by(&wa, b + c).dim();
                if lifted != base.dim() {
                    ok = false;
                    witness = format!("B={}, b={b}, c={c}", fmt_subset(b_set));
                }
                *by_l.entry(b + c).or_default() += base.dim();
            }
        }
        for (l, d) in by_l {
            if wa.graded(l).dim() != d {
                ok = false;
                witness = format!("B={}, l={l}", fmt_subset(b_set));
            }
        }
    }
    if idx.len() > 1 {
        report.push("(iii) B∪C compatibility", ok, witness);
    }

    // (iv) order independence of the iterated graded dims.
    let orders: Vec<Vec<usize>> = if idx.len() <= 4 {
        permutations(&idx)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..10)
            .map(|_| {
                let mut p = idx.clone();
                p.shuffle(&mut rng);
                p
            })
            .collect()
    };
    let mut ok = true;
    let mut witness = String::new();
    for order in &orders {
        for (m, d) in cells.iter().zip(&dims) {
            let permuted: Vec<i64> = order.iter().map(|i| m[idx.iter().position(|x| x == i).unwrap()]).collect();
            let d2 = tower_dim(orbit, order, &permuted);
            if d2 != *d {
                ok = false;
                witness = format!("order {:?}, m={m:?}: {d} vs {d2}", order.iter().map(|i| i + 1).collect::<Vec<_>>());
            }
        }
    }
    report.push(format!("(iv) {} orders", orders.len()), ok, witness);
    Ok(report)
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for (p, &x) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(p);
        for mut tail in permutations(&rest) {
            tail.insert(0, x);
            out.push(tail);
        }
    }
    out
}

/// `dim Gr^{W^B}_b Gr^{W^C}_c L = dim Gr^{W^C}_c Gr^{W^B}_b L`.
pub fn zassenhaus_check(orbit: &NilpotentOrbit, b_set: Subset, c_set: Subset, b: i64, c: i64) -> bool {
    let wb = orbit.w(b_set);
    let wc = orbit.w(c_set);
    let bc: Subquotient = iterated_graded(&[wc.as_ref(), wb.as_ref()], &[c, b]);
    let cb = iterated_graded(&[wb.as_ref(), wc.as_ref()], &[b, c]);
    bc.dim() == cb.dim()
}

/// Number of indices in a subset, re-exported for report formatting.
pub fn subset_size(s: Subset) -> usize {
    card(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::jordan_block;

    fn dims(w: &IncFiltration) -> Vec<(i64, usize)> {
        w.graded_dims().into_iter().collect()
    }

    #[test]
    fn zero_map_is_pure_of_weight_zero() {
        let w = weight_filtration(&Matrix::zeros(3, 3)).unwrap();
        assert!(w.level(-1).is_zero());
        assert!(w.level(0).is_full());
    }

    #[test]
    fn jordan_examples() {
        let w2 = weight_filtration(&jordan_block(2)).unwrap();
        assert_eq!(w2.level(-1), Subspace::span_of_units(2, [0]));
        assert!(w2.level(1).is_full());
        assert!(w2.level(-2).is_zero());

        let w3 = weight_filtration(&jordan_block(3)).unwrap();
        assert_eq!(dims(&w3), vec![(-2, 1), (0, 1), (2, 1)]);
        assert_eq!(w3.level(-2), Subspace::span_of_units(3, [0]));
        assert_eq!(w3.level(0), Subspace::span_of_units(3, [0, 1]));

        let n21 = Matrix::direct_sum(&[jordan_block(2), Matrix::zeros(1, 1)]);
        let w21 = weight_filtration(&n21).unwrap();
        assert_eq!(w21.level(-1), crate::qlinalg::image(&n21));
        assert_eq!(w21.level(0), kernel(&n21));
        assert!(w21.level(1).is_full());
    }

    #[test]
    fn axiom_negatives() {
        let n = jordan_block(2);
        let w = weight_filtration(&n).unwrap();
        assert!(verify_weight_axioms(&n, &w).holds);
        assert!(!verify_weight_axioms(&n, &w.shift(1)).holds);
        let n3 = jordan_block(3);
        let mut bad = IncFiltration::new(3, Direction::Increasing);
        bad.insert(0, Subspace::span_of_units(3, [0]));
        bad.insert(2, Subspace::full(3));
        assert!(matches!(verify_weight_axioms(&n3, &bad).failure, Some(AxiomFailure::Inclusion { .. })));
        assert!(weight_filtration(&Matrix::identity(2)).is_err());
    }

    #[test]
    fn relative_with_trivial_w() {
        let n = jordan_block(3);
        let w = IncFiltration::trivial(3, 0);
        let m = weight_filtration(&n).unwrap();
        assert!(verify_relative(&n, &w, &m).unwrap());
        assert!(kashiwara_split_check(&w, &m));
        assert!(!verify_relative(&n, &w, &m.shift(1)).unwrap());
    }
}
