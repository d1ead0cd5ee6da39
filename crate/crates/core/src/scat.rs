//! The index category `S(M)` of decreasing chains of subsets, the exterior
//! index set `M₊`, and the product decomposition `S(K) × S(M−K) ≅ S_K(M)`.
//!
//! Subsets of the index set are bitmasks: bit `i` stands for index `i + 1`
//! in user-facing output.

use std::fmt;

use crate::error::{Error, Result};

pub type Subset = u32;

/// Largest index set for which chains are enumerated.
pub const MAX_INDICES: usize = 6;

pub fn card(s: Subset) -> usize {
    s.count_ones() as usize
}

pub fn full_set(n: usize) -> Subset {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

pub fn contains(s: Subset, i: usize) -> bool {
    s >> i & 1 == 1
}

/// Elements of `s` in increasing order.
pub fn elements(s: Subset) -> Vec<usize> {
    (0..32).filter(|&i| contains(s, i)).collect()
}

/// Every subset of `s`, including the empty set and `s`, in increasing mask order.
pub fn subsets_of(s: Subset) -> Vec<Subset> {
    let mut out = Vec::with_capacity(1 << card(s));
    let mut t: Subset = 0;
    loop {
        out.push(t);
        if t == s {
            break;
        }
        t = (t.wrapping_sub(s)) & s;
    }
    out
}

/// Koszul sign for inserting `i` into `j`: `(-1)^{#{k ∈ j : k < i}}`.
pub fn koszul_sign(j: Subset, i: usize) -> i64 {
    let below = card(j & ((1u32 << i) - 1));
    if below.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Writes a subset as `{1,3}` with 1-based indices.
pub fn fmt_subset(s: Subset) -> String {
    let parts: Vec<String> = elements(s).iter().map(|i| (i + 1).to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

/// Parses `"1,3"` (1-based) into a subset of an index set of size `n`.
pub fn parse_subset(text: &str, n: usize) -> Result<Subset> {
    let mut s = 0;
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let i: usize = part.parse().map_err(|_| Error::Input(format!("bad index {part:?}")))?;
        if i == 0 || i > n {
            return Err(Error::Input(format!("index {i} outside 1..={n}")));
        }
        s |= 1 << (i - 1);
    }
    Ok(s)
}

/// A strictly decreasing chain `M = s₁ ⊋ s₂ ⊋ … ⊋ s_p ≠ ∅`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Chain {
    sets: Vec<Subset>,
}

impl Chain {
    pub fn new(sets: Vec<Subset>) -> Result<Chain> {
        if sets.is_empty() {
            return Err(Error::Input("empty chain".into()));
        }
        for w in sets.windows(2) {
            if w[1] & !w[0] != 0 || w[1] == w[0] {
                return Err(Error::Input("chain is not strictly decreasing".into()));
            }
        }
        if *sets.last().unwrap() == 0 {
            return Err(Error::Input("chain contains the empty set".into()));
        }
        Ok(Chain { sets })
    }

    pub fn sets(&self) -> &[Subset] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn top(&self) -> Subset {
        self.sets[0]
    }

    pub fn contains_set(&self, k: Subset) -> bool {
        self.sets.contains(&k)
    }

    /// Chains obtained by deleting the element at 1-based position `pos ≥ 2`,
    /// each with sign `(-1)^pos`.
    pub fn deletions(&self) -> Vec<(Chain, i64, usize)> {
        (1..self.sets.len())
            .map(|idx| {
                let mut sets = self.sets.clone();
                sets.remove(idx);
                let pos = idx + 1;
                (Chain { sets }, if pos % 2 == 0 { 1 } else { -1 }, pos)
            })
            .collect()
    }

    /// For a maximal chain, the elements removed at each step followed by the
    /// last remaining element; a permutation of the top set.
    pub fn removal_order(&self) -> Option<Vec<usize>> {
        let n = card(self.top());
        if self.sets.len() != n {
            return None;
        }
        let mut order = Vec::with_capacity(n);
        for w in self.sets.windows(2) {
            order.push((w[0] & !w[1]).trailing_zeros() as usize);
        }
        order.push(self.sets.last()?.trailing_zeros() as usize);
        Some(order)
    }
}

impl fmt::Debug for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.sets.iter().map(|s| fmt_subset(*s)).collect();
        write!(f, "({})", parts.join("⊃"))
    }
}

impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

fn guard(m: Subset) -> Result<()> {
    if card(m) > MAX_INDICES {
        return Err(Error::Resource(format!("index set of size {} exceeds {}", card(m), MAX_INDICES)));
    }
    if m == 0 {
        return Err(Error::Input("empty index set".into()));
    }
    Ok(())
}

/// All chains of `S(M)`, ordered by length then lexicographically.
pub fn enumerate_chains(m: Subset) -> Result<Vec<Chain>> {
    guard(m)?;
    let mut out = Vec::new();
    let mut stack = vec![vec![m]];
    while let Some(prefix) = stack.pop() {
        let last = *prefix.last().unwrap();
        for s in subsets_of(last) {
            if s != 0 && s != last {
                let mut next = prefix.clone();
                next.push(s);
                stack.push(next);
            }
        }
        out.push(Chain { sets: prefix });
    }
    out.sort_by(|a, b| a.sets.len().cmp(&b.sets.len()).then_with(|| a.sets.cmp(&b.sets)));
    Ok(out)
}

/// `S_K(M)`: chains of `S(M)` passing through `K`.
pub fn chains_through(m: Subset, k: Subset) -> Result<Vec<Chain>> {
    if k == 0 || k & !m != 0 {
        return Err(Error::Input(format!("{} is not a nonempty subset of {}", fmt_subset(k), fmt_subset(m))));
    }
    Ok(enumerate_chains(m)?.into_iter().filter(|c| c.contains_set(k)).collect())
}

/// The bijection `S(K) × S(M−K) → S_K(M)`, `(s., s.') ↦ (K ∪ s'₁, …, K ∪ s'_{p'}, s₁, …)`.
/// With `K = M` the second factor is the one-point category and the map is the identity.
pub fn product_iso(k: Subset, m: Subset) -> Result<Vec<((Chain, Option<Chain>), Chain)>> {
    let inner = enumerate_chains(k)?;
    let rest = m & !k;
    let outer: Vec<Option<Chain>> =
        if rest == 0 { vec![None] } else { enumerate_chains(rest)?.into_iter().map(Some).collect() };
    let mut out = Vec::with_capacity(inner.len() * outer.len());
    for o in &outer {
        for s in &inner {
            let mut sets: Vec<Subset> = o.iter().flat_map(|c| c.sets.iter().map(|x| x | k)).collect();
            sets.extend(&s.sets);
            out.push(((s.clone(), o.clone()), Chain { sets }));
        }
    }
    let target = chains_through(m, k)?;
    let mut images: Vec<&Chain> = out.iter().map(|(_, c)| c).collect();
    images.sort();
    images.dedup();
    if images.len() != out.len() || images.len() != target.len() || target.iter().any(|c| images.binary_search(&c).is_err()) {
        return Err(Error::Contract("product decomposition is not a bijection".into()));
    }
    Ok(out)
}

/// An object `(J, s.)` of `M₊ × S(M)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BiIndex {
    pub j: Subset,
    pub chain: Chain,
}

impl BiIndex {
    /// `|J| + |M| − |s.|`: Koszul degree plus chain codegree.
    pub fn degree(&self) -> i64 {
        (card(self.j) + card(self.chain.top())) as i64 - self.chain.len() as i64
    }
}

pub fn enumerate_biindices(m: Subset) -> Result<Vec<BiIndex>> {
    let chains = enumerate_chains(m)?;
    Ok(subsets_of(m)
        .into_iter()
        .flat_map(|j| chains.iter().map(move |c| BiIndex { j, chain: c.clone() }))
        .collect())
}

/// Sign of a permutation given as a list of distinct integers.
pub fn permutation_sign(order: &[usize]) -> i64 {
    let mut inversions = 0;
    for a in 0..order.len() {
        for b in a + 1..order.len() {
            if order[a] > order[b] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_count(top: Subset) -> usize {
        1 + subsets_of(top).into_iter().filter(|&s| s != 0 && s != top).map(brute_count).sum::<usize>()
    }

    #[test]
    fn chain_counts() {
        let counts: Vec<usize> = (1..=6).map(|n| enumerate_chains(full_set(n)).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 3, 13, 75, 541, 4683]);
        for n in 1..=5 {
            assert_eq!(counts[n - 1], brute_count(full_set(n)));
        }
        assert!(matches!(enumerate_chains(full_set(7)), Err(Error::Resource(_))));
    }

    #[test]
    fn two_element_chains() {
        let chains = enumerate_chains(0b11).unwrap();
        let shown: Vec<String> = chains.iter().map(|c| c.to_string()).collect();
        assert_eq!(shown, vec!["({1,2})", "({1,2}⊃{1})", "({1,2}⊃{2})"]);
        assert!(chains[0].deletions().is_empty());
        let d = chains[1].deletions();
        assert_eq!(d.len(), 1);
        assert_eq!((d[0].0.clone(), d[0].1), (chains[0].clone(), 1));
    }

    #[test]
    fn length_three_deletions_alternate() {
        let c = Chain::new(vec![0b111, 0b011, 0b001]).unwrap();
        let d = c.deletions();
        assert_eq!(d.len(), 2);
        assert_eq!(d[0].1, -d[1].1);
    }

    #[test]
    fn product_decomposition_counts() {
        assert_eq!(chains_through(0b11, 0b01).unwrap().len(), 1);
        assert_eq!(chains_through(0b111, 0b011).unwrap().len(), 3);
        for m in [0b1u32, 0b11, 0b111, 0b1111] {
            for k in subsets_of(m).into_iter().filter(|&k| k != 0) {
                let iso = product_iso(k, m).unwrap();
                for ((s, o), image) in &iso {
                    assert_eq!(image.len(), s.len() + o.as_ref().map_or(0, Chain::len));
                }
            }
        }
        assert!(chains_through(0b01, 0b10).is_err());
    }

    #[test]
    fn biindex_degrees() {
        assert_eq!(enumerate_biindices(0b1).unwrap().len(), 2);
        assert_eq!(enumerate_biindices(0b11).unwrap().len(), 12);
        let b = BiIndex { j: 0b01, chain: Chain::new(vec![0b11]).unwrap() };
        assert_eq!(b.degree(), 2);
    }

    #[test]
    fn simplicial_differential_squares_to_zero() {
        use std::collections::HashMap;
        for n in 1..=4 {
            let chains = enumerate_chains(full_set(n)).unwrap();
            for c in &chains {
                let mut acc: HashMap<Chain, i64> = HashMap::new();
                for (d1, s1, _) in c.deletions() {
                    for (d2, s2, _) in d1.deletions() {
                        *acc.entry(d2).or_default() += s1 * s2;
                    }
                }
                assert!(acc.values().all(|v| *v == 0));
            }
        }
    }

    #[test]
    fn removal_order_of_maximal_chain() {
        let c = Chain::new(vec![0b111, 0b101, 0b100]).unwrap();
        assert_eq!(c.removal_order().unwrap(), vec![1, 0, 2]);
        assert_eq!(permutation_sign(&[1, 0, 2]), -1);
    }
}
