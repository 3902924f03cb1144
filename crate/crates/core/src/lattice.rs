//! A materialized set of fixed functions viewed as a distributive lattice, with
//! zeta transforms and monotone-map counts computed on it.
//!
//! Members of `Φ_n(π)` are the unions of point orbits that are up-sets of the
//! orbit poset. Meet and join are pointwise `&` and `|`.

use num_bigint::BigUint;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hypercube::VarPerm;
use crate::mbf::{dominated, words_for, MbfSet};
use crate::poset::OrbitPoset;

const EMPTY: u32 = u32::MAX;

/// Open-addressing map from member truth tables to their positions in an [`MbfSet`].
#[derive(Clone, Debug)]
pub struct TableIndex {
    mask: usize,
    slots: Vec<u32>,
}

#[inline]
fn hash_words(words: &[u64]) -> u64 {
    let mut h = 0x243f_6a88_85a3_08d3u64;
    for &w in words {
        h = (h ^ w).wrapping_mul(0x9e37_79b9_7f4a_7c15);
        h ^= h >> 29;
    }
    h ^ (h >> 32)
}

impl TableIndex {
    pub fn new(set: &MbfSet) -> Self {
        assert!(set.len() < EMPTY as usize, "set too large to index");
        let cap = (set.len() * 2).next_power_of_two().max(16);
        let mask = cap - 1;
        let mut slots = vec![EMPTY; cap];
        for i in 0..set.len() {
            let mut s = hash_words(set.table(i)) as usize & mask;
            while slots[s] != EMPTY {
                s = (s + 1) & mask;
            }
            slots[s] = i as u32;
        }
        TableIndex { mask, slots }
    }

    #[inline]
    pub fn get(&self, set: &MbfSet, key: &[u64]) -> Option<usize> {
        let mut s = hash_words(key) as usize & self.mask;
        loop {
            let slot = self.slots[s];
            if slot == EMPTY {
                return None;
            }
            if set.table(slot as usize) == key {
                return Some(slot as usize);
            }
            s = (s + 1) & self.mask;
        }
    }
}

/// `Φ_n(π)` with its orbit structure and an index from tables to positions.
#[derive(Clone, Debug)]
pub struct FunctionLattice {
    perm: VarPerm,
    set: MbfSet,
    index: TableIndex,
    // per orbit: truth-table masks of the orbit and of everything strictly below/above it
    orbit: Vec<u64>,
    below: Vec<u64>,
    above: Vec<u64>,
    weight: Vec<u32>,
}

impl FunctionLattice {
    /// Materializes `Φ_n(π)`, refusing with a capacity error above `budget` members.
    pub fn build(perm: &VarPerm, budget: u64) -> Result<Self> {
        let op = OrbitPoset::new(perm)?;
        let count = op.poset().dual().count_ideals();
        if count > BigUint::from(budget) {
            return Err(Error::Capacity {
                what: format!("fixed-point set of {} on {} variables", perm, perm.n()),
                count: count.to_string(),
                budget,
            });
        }
        let width = words_for(perm.n());
        let mut words = Vec::with_capacity(usize::try_from(count).expect("within budget") * width);
        op.for_each_fixed_function(|t| words.extend_from_slice(t));
        let set = MbfSet::from_words(perm.n(), words);
        Ok(Self::with_orbits(&op, set))
    }

    /// Wraps a set already known to equal `Φ_n(π)`, such as the whole of `D_n` for the
    /// identity.
    pub fn from_set(perm: &VarPerm, set: MbfSet) -> Result<Self> {
        if set.n() != perm.n() {
            return Err(Error::DimensionMismatch {
                expected: perm.n(),
                found: set.n(),
            });
        }
        let op = OrbitPoset::new(perm)?;
        Ok(Self::with_orbits(&op, set))
    }

    fn with_orbits(op: &OrbitPoset, set: MbfSet) -> Self {
        let width = set.stride();
        let poset = op.poset();
        let m = poset.len();
        let masks = op.masks();
        let row = |k: usize| &masks[k * width..(k + 1) * width];
        let mut below = vec![0u64; m * width];
        let mut above = vec![0u64; m * width];
        for q in 0..m {
            for r in 0..m {
                if r == q {
                    continue;
                }
                let target = if poset.leq(r, q) {
                    &mut below[q * width..(q + 1) * width]
                } else if poset.leq(q, r) {
                    &mut above[q * width..(q + 1) * width]
                } else {
                    continue;
                };
                for (t, w) in target.iter_mut().zip(row(r)) {
                    *t |= w;
                }
            }
        }
        let weight = op
            .partition()
            .iter()
            .map(|orbit| orbit[0].count_ones())
            .collect();
        let index = TableIndex::new(&set);
        FunctionLattice {
            perm: *op.perm(),
            set,
            index,
            orbit: masks.to_vec(),
            below,
            above,
            weight,
        }
    }

    pub fn perm(&self) -> &VarPerm {
        &self.perm
    }

    pub fn set(&self) -> &MbfSet {
        &self.set
    }

    pub fn into_set(self) -> MbfSet {
        self.set
    }

    pub fn len(&self) -> usize {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }

    pub fn width(&self) -> usize {
        self.set.stride()
    }

    /// Position of a member table.
    #[inline]
    pub fn position(&self, table: &[u64]) -> Option<usize> {
        self.index.get(&self.set, table)
    }

    #[inline]
    fn expect_position(&self, table: &[u64]) -> usize {
        self.position(table)
            .expect("lattice is closed under the operations used")
    }

    fn orbit_order(&self, descending: bool) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.weight.len()).collect();
        order.sort_by_key(|&q| self.weight[q]);
        if descending {
            order.reverse();
        }
        order
    }

    /// Replaces `v[x]` by the sum of `v[y]` over members `y ≤ x`.
    pub fn zeta_down(&self, v: &mut [u128]) -> Result<()> {
        assert_eq!(v.len(), self.len());
        let w = self.width();
        let mut key = vec![0u64; w];
        for q in self.orbit_order(true) {
            let mask = &self.orbit[q * w..(q + 1) * w];
            let below = &self.below[q * w..(q + 1) * w];
            for i in 0..self.len() {
                let t = self.set.table(i);
                // q must be a minimal orbit of x for x minus q to stay an up-set
                if !dominated(mask, t) || t.iter().zip(below).any(|(a, b)| a & b != 0) {
                    continue;
                }
                for ((k, a), m) in key.iter_mut().zip(t).zip(mask) {
                    *k = a & !m;
                }
                let j = self.expect_position(&key);
                v[i] = v[i]
                    .checked_add(v[j])
                    .ok_or(Error::Overflow("lattice zeta"))?;
            }
        }
        Ok(())
    }

    /// Replaces `v[x]` by the sum of `v[y]` over members `y ≥ x`.
    pub fn zeta_up(&self, v: &mut [u128]) -> Result<()> {
        assert_eq!(v.len(), self.len());
        let w = self.width();
        let mut key = vec![0u64; w];
        for q in self.orbit_order(false) {
            let mask = &self.orbit[q * w..(q + 1) * w];
            let above = &self.above[q * w..(q + 1) * w];
            for i in 0..self.len() {
                let t = self.set.table(i);
                if t.iter().zip(mask).any(|(a, m)| a & m != 0) || !dominated(above, t) {
                    continue;
                }
                for ((k, a), m) in key.iter_mut().zip(t).zip(mask) {
                    *k = a | m;
                }
                let j = self.expect_position(&key);
                v[i] = v[i]
                    .checked_add(v[j])
                    .ok_or(Error::Overflow("lattice zeta"))?;
            }
        }
        Ok(())
    }

    /// `|{y ∈ Φ : y ≤ x}|` for every member `x`.
    pub fn down_counts(&self) -> Result<Vec<u128>> {
        let mut v = vec![1u128; self.len()];
        self.zeta_down(&mut v)?;
        Ok(v)
    }

    /// `|{y ∈ Φ : y ≥ x}|` for every member `x`.
    pub fn up_counts(&self) -> Result<Vec<u128>> {
        let mut v = vec![1u128; self.len()];
        self.zeta_up(&mut v)?;
        Ok(v)
    }

    /// Number of monotone maps from the `k`-element chain into the lattice.
    pub fn count_chain_maps(&self, k: usize) -> Result<BigUint> {
        assert!(k >= 1, "chain length must be positive");
        let mut v = vec![1u128; self.len()];
        for _ in 1..k {
            self.zeta_down(&mut v)?;
        }
        Ok(v.iter().map(|&x| BigUint::from(x)).sum())
    }

    /// Number of monotone maps from `B^2`: the sum over ordered pairs `(b, c)` of
    /// `down(b ∧ c) · up(b ∨ c)`.
    pub fn count_square_maps(&self, down: &[u128], up: &[u128]) -> Result<BigUint> {
        let w = self.width();
        let total = (0..self.len())
            .into_par_iter()
            .map(|b| -> Result<BigUint> {
                let tb = self.set.table(b);
                let mut meet = vec![0u64; w];
                let mut join = vec![0u64; w];
                let mut acc = down[b]
                    .checked_mul(up[b])
                    .ok_or(Error::Overflow("square maps"))?;
                for c in 0..b {
                    let tc = self.set.table(c);
                    for i in 0..w {
                        meet[i] = tb[i] & tc[i];
                        join[i] = tb[i] | tc[i];
                    }
                    let term = down[self.expect_position(&meet)]
                        .checked_mul(up[self.expect_position(&join)])
                        .and_then(|t| t.checked_mul(2))
                        .ok_or(Error::Overflow("square maps"))?;
                    acc = acc
                        .checked_add(term)
                        .ok_or(Error::Overflow("square maps"))?;
                }
                Ok(BigUint::from(acc))
            })
            .try_reduce(BigUint::default, |a, b| Ok(a + b))?;
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mbf::generate_all;

    fn brute_down(l: &FunctionLattice) -> Vec<u128> {
        (0..l.len())
            .map(|x| {
                (0..l.len())
                    .filter(|&y| dominated(l.set().table(y), l.set().table(x)))
                    .count() as u128
            })
            .collect()
    }

    #[test]
    fn zeta_matches_direct_counts() {
        for (s, n) in [
            ("", 4),
            ("(12)", 5),
            ("(123)(45)", 6),
            ("(12)(34)(56)", 6),
            ("(123)(4567)", 7),
        ] {
            let p = VarPerm::parse(s, n).unwrap();
            let l = FunctionLattice::build(&p, 1 << 20).unwrap();
            assert_eq!(l.down_counts().unwrap(), brute_down(&l), "{s} on {n}");
            let up: Vec<u128> = (0..l.len())
                .map(|x| {
                    (0..l.len())
                        .filter(|&y| dominated(l.set().table(x), l.set().table(y)))
                        .count() as u128
                })
                .collect();
            assert_eq!(l.up_counts().unwrap(), up, "{s} on {n}");
        }
    }

    #[test]
    fn built_sets_match_generation() {
        let l = FunctionLattice::build(&VarPerm::identity(5), 1 << 20).unwrap();
        assert_eq!(l.set(), &generate_all(5).unwrap());
        assert_eq!(l.position(l.set().table(100)), Some(100));
    }

    #[test]
    fn budget_is_enforced() {
        let err = FunctionLattice::build(&VarPerm::identity(5), 7580).unwrap_err();
        assert!(matches!(err, Error::Capacity { ref count, .. } if count == "7581"));
    }

    #[test]
    fn map_counts_give_larger_dedekind_numbers() {
        let l = FunctionLattice::from_set(&VarPerm::identity(4), generate_all(4).unwrap()).unwrap();
        assert_eq!(l.count_chain_maps(2).unwrap(), BigUint::from(7581u32));
        let down = l.down_counts().unwrap();
        let up = l.up_counts().unwrap();
        assert_eq!(
            l.count_square_maps(&down, &up).unwrap(),
            BigUint::from(7_828_354u32)
        );
    }
}
