//! Finite posets stored as reflexive down-set and up-set bitsets, with exact
//! counting of order ideals and of monotone maps from small posets.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;
use rustc_hash::FxBuildHasher;
use thiserror::Error;

use crate::error::{Error, Result};
use crate::hypercube::{orbits, OrbitPartition, VarPerm};
use crate::mbf::{dominated, words_for, MbfSet};
use crate::BigCount;

/// Witness that a relation fails to be a partial order.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderViolation {
    #[error("{0} is not related to itself")]
    NotReflexive(usize),
    #[error("{a} ≤ {b} and {b} ≤ {a} for distinct elements")]
    NotAntisymmetric { a: usize, b: usize },
    #[error("{a} ≤ {b} and {b} ≤ {c} but not {a} ≤ {c}")]
    NotTransitive { a: usize, b: usize, c: usize },
}

#[inline]
fn test_bit(bits: &[u64], i: usize) -> bool {
    bits[i / 64] >> (i % 64) & 1 == 1
}

#[inline]
fn set_bit(bits: &mut [u64], i: usize) {
    bits[i / 64] |= 1 << (i % 64);
}

#[inline]
fn clear_bit(bits: &mut [u64], i: usize) {
    bits[i / 64] &= !(1 << (i % 64));
}

fn ones(bits: &[u64]) -> impl Iterator<Item = usize> + '_ {
    bits.iter().enumerate().flat_map(|(w, &word)| {
        let mut rest = word;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let b = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(w * 64 + b)
        })
    })
}

fn popcount(bits: &[u64]) -> u64 {
    bits.iter().map(|w| w.count_ones() as u64).sum()
}

fn popcount_and(a: &[u64], b: &[u64]) -> u64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x & y).count_ones() as u64)
        .sum()
}

/// A finite partial order on `0..size`.
#[derive(Clone, PartialEq, Eq)]
pub struct Poset {
    size: usize,
    stride: usize,
    down: Vec<u64>,
    up: Vec<u64>,
}

impl std::fmt::Debug for Poset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Poset[size={}]", self.size)
    }
}

impl Poset {
    /// Builds a poset from an order predicate and verifies the partial-order axioms.
    pub fn build(size: usize, leq: impl Fn(usize, usize) -> bool) -> Result<Poset> {
        let stride = size.div_ceil(64).max(1);
        let mut down = vec![0u64; size * stride];
        for a in 0..size {
            let row = &mut down[a * stride..(a + 1) * stride];
            for b in 0..size {
                if leq(b, a) {
                    set_bit(row, b);
                }
            }
        }
        Poset::from_down_sets(size, down)
    }

    /// Builds a poset from reflexive down-sets (`down[a]` holds every `b ≤ a`).
    pub fn from_down_sets(size: usize, down: Vec<u64>) -> Result<Poset> {
        let stride = size.div_ceil(64).max(1);
        assert_eq!(
            down.len(),
            size * stride,
            "down-set buffer has wrong length"
        );
        let mut up = vec![0u64; size * stride];
        for a in 0..size {
            for b in ones(&down[a * stride..(a + 1) * stride]) {
                set_bit(&mut up[b * stride..(b + 1) * stride], a);
            }
        }
        let poset = Poset {
            size,
            stride,
            down,
            up,
        };
        poset.verify()?;
        Ok(poset)
    }

    fn verify(&self) -> Result<(), OrderViolation> {
        for a in 0..self.size {
            if !test_bit(self.down(a), a) {
                return Err(OrderViolation::NotReflexive(a));
            }
        }
        for a in 0..self.size {
            let da = self.down(a);
            for b in ones(da) {
                if b == a {
                    continue;
                }
                if test_bit(self.down(b), a) {
                    return Err(OrderViolation::NotAntisymmetric { a: b, b: a });
                }
                let db = self.down(b);
                if !dominated(db, da) {
                    let c = ones(db).find(|&c| !test_bit(da, c)).expect("witness");
                    return Err(OrderViolation::NotTransitive { a: c, b, c: a });
                }
            }
        }
        Ok(())
    }

    pub fn chain(k: usize) -> Poset {
        Poset::build(k, |a, b| a <= b).expect("chain")
    }

    pub fn antichain(k: usize) -> Poset {
        Poset::build(k, |a, b| a == b).expect("antichain")
    }

    /// `B^n` under the componentwise order.
    pub fn boolean(n: usize) -> Poset {
        Poset::build(1 << n, |a, b| a & !b == 0).expect("boolean lattice")
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    /// Words per element bitset.
    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn down(&self, a: usize) -> &[u64] {
        &self.down[a * self.stride..(a + 1) * self.stride]
    }

    pub fn up(&self, a: usize) -> &[u64] {
        &self.up[a * self.stride..(a + 1) * self.stride]
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        test_bit(self.down(b), a)
    }

    /// Number of ordered pairs `a ≤ b`.
    pub fn comparable_pairs(&self) -> u64 {
        popcount(&self.down)
    }

    /// The same elements with the order reversed.
    pub fn dual(&self) -> Poset {
        Poset {
            size: self.size,
            stride: self.stride,
            down: self.up.clone(),
            up: self.down.clone(),
        }
    }

    /// Componentwise order on pairs; element `(i, j)` is `i * q.len() + j`.
    pub fn product(&self, q: &Poset) -> Result<Poset> {
        let m = q.len();
        Poset::build(self.size * m, |a, b| {
            self.leq(a / m, b / m) && q.leq(a % m, b % m)
        })
    }

    /// Disjoint union; elements of `q` follow those of `self`.
    pub fn disjoint_sum(&self, q: &Poset) -> Result<Poset> {
        let k = self.size;
        Poset::build(k + q.len(), |a, b| match (a < k, b < k) {
            (true, true) => self.leq(a, b),
            (false, false) => q.leq(a - k, b - k),
            _ => false,
        })
    }

    /// Pointwise order on a set of truth tables.
    pub fn from_function_set(set: &MbfSet) -> Poset {
        let size = set.len();
        let stride = size.div_ceil(64).max(1);
        let mut down = vec![0u64; size * stride];
        down.par_chunks_mut(stride)
            .enumerate()
            .for_each(|(a, row)| {
                let ta = set.table(a);
                // members are sorted numerically, so everything below `a` precedes it
                for b in 0..=a {
                    if dominated(set.table(b), ta) {
                        set_bit(row, b);
                    }
                }
            });
        Poset::from_down_sets(size, down).expect("pointwise order is a partial order")
    }

    /// Elements listed so that every element follows everything below it.
    pub fn linear_extension(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.size).collect();
        order.sort_by_key(|&a| (popcount(self.down(a)), a));
        order
    }

    /// Number of order ideals (down-closed subsets), exactly.
    pub fn count_ideals(&self) -> BigCount {
        self.count_ideals_bounded(u64::MAX)
            .expect("unbounded count cannot hit a step limit")
    }

    /// As [`Poset::count_ideals`], giving up with [`Error::Infeasible`] after `max_steps`
    /// recursion steps.
    pub fn count_ideals_bounded(&self, max_steps: u64) -> Result<BigCount> {
        Ok(self.count_ideals_traced(max_steps)?.0)
    }

    /// [`Poset::count_ideals_bounded`], also returning the number of recursion steps taken.
    pub fn count_ideals_traced(&self, max_steps: u64) -> Result<(BigCount, u64)> {
        let all = self.all_mask();
        let mut narrow = IdealCounter::<u128>::new(self, max_steps);
        match narrow.count(&all) {
            Ok(v) => Ok((BigUint::from(v), narrow.steps)),
            Err(Stop::Overflow) => {
                let mut wide = IdealCounter::<BigUint>::new(self, max_steps);
                let v = wide.count(&all).map_err(|e| e.into_error(max_steps))?;
                Ok((v, wide.steps))
            }
            Err(stop) => Err(stop.into_error(max_steps)),
        }
    }

    fn all_mask(&self) -> Vec<u64> {
        let mut mask = vec![0u64; self.stride];
        for a in 0..self.size {
            set_bit(&mut mask, a);
        }
        mask
    }

    /// Every order ideal, once each, as element bitsets in a fixed order.
    pub fn ideals(&self) -> Ideals<'_> {
        Ideals {
            walker: IdealWalker::new(self, None),
            started: false,
        }
    }

    /// [`Poset::ideals`], refused with a capacity error when there are more than
    /// `budget` ideals.
    pub fn enumerate_ideals(&self, budget: u64) -> Result<Ideals<'_>> {
        let count = self.count_ideals();
        if count > BigUint::from(budget) {
            return Err(Error::Capacity {
                what: "ideal enumeration".into(),
                count: count.to_string(),
                budget,
            });
        }
        Ok(self.ideals())
    }

    /// Calls `visit` with the union of `masks[e]` over the elements `e` of each ideal.
    /// `masks` holds `self.len()` rows of `width` words.
    pub fn for_each_ideal_union(&self, masks: &[u64], width: usize, visit: impl FnMut(&[u64])) {
        let mut walker = IdealWalker::new(self, Some((masks, width)));
        walker.run(visit);
    }

    /// Number of monotone maps from the `k`-element chain: the sum of the entries of the
    /// `(k-1)`-th power of the incidence matrix, computed by repeated matrix-vector
    /// products.
    pub fn count_maps_from_chain(&self, k: usize) -> BigCount {
        assert!(k >= 1, "chain length must be positive");
        match self.chain_maps::<u128>(k) {
            Some(v) => BigUint::from(v),
            None => self.chain_maps::<BigUint>(k).expect("unbounded"),
        }
    }

    fn chain_maps<T: Tally>(&self, k: usize) -> Option<T> {
        let mut v: Vec<T> = vec![T::one(); self.size];
        for _ in 1..k {
            let mut next = Vec::with_capacity(self.size);
            for a in 0..self.size {
                let mut acc = T::zero();
                for b in ones(self.down(a)) {
                    acc = acc.add(&v[b])?;
                }
                next.push(acc);
            }
            v = next;
        }
        v.iter().try_fold(T::zero(), |acc, x| acc.add(x))
    }

    /// Number of monotone maps from `B^2`: the sum over ordered pairs `(b, c)` of
    /// `|down(b) ∩ down(c)| · |up(b) ∩ up(c)|`.
    pub fn count_maps_from_square(&self) -> BigCount {
        let total: Option<u128> = (0..self.size)
            .into_par_iter()
            .map(|b| {
                let mut acc = 0u128;
                for c in 0..self.size {
                    let lower = popcount_and(self.down(b), self.down(c)) as u128;
                    if lower == 0 {
                        continue;
                    }
                    let upper = popcount_and(self.up(b), self.up(c)) as u128;
                    acc = acc.checked_add(lower * upper)?;
                }
                Some(acc)
            })
            .try_reduce(|| 0u128, |a, b| a.checked_add(b));
        match total {
            Some(v) => BigUint::from(v),
            None => (0..self.size)
                .map(|b| {
                    (0..self.size)
                        .map(|c| {
                            BigUint::from(popcount_and(self.down(b), self.down(c)))
                                * popcount_and(self.up(b), self.up(c))
                        })
                        .sum::<BigUint>()
                })
                .sum(),
        }
    }

    /// Covering pairs `(b, a)` with `b ⋖ a`.
    pub fn hasse_edges(&self) -> Vec<(usize, usize)> {
        let mut edges = Vec::new();
        for a in 0..self.size {
            let mut strict = self.down(a).to_vec();
            clear_bit(&mut strict, a);
            let mut covers = strict.clone();
            for c in ones(&strict) {
                for (w, d) in covers.iter_mut().zip(self.down(c)) {
                    *w &= !d;
                }
                set_bit(&mut covers, c);
            }
            // re-remove anything strictly below another strict element
            for c in ones(&strict) {
                for d in ones(self.down(c)) {
                    if d != c {
                        clear_bit(&mut covers, d);
                    }
                }
            }
            edges.extend(ones(&covers).map(|b| (b, a)));
        }
        edges
    }

    /// Graphviz rendering of the Hasse diagram, for posets of at most 64 elements.
    pub fn to_dot(&self, labels: Option<&[String]>) -> Option<String> {
        if self.size > 64 {
            return None;
        }
        let mut out = String::from("digraph poset {\n  rankdir=BT;\n");
        for a in 0..self.size {
            let label = labels.map_or_else(|| a.to_string(), |l| l[a].clone());
            let _ = writeln!(out, "  n{a} [label=\"{label}\"];");
        }
        for (b, a) in self.hasse_edges() {
            let _ = writeln!(out, "  n{b} -> n{a};");
        }
        out.push_str("}\n");
        Some(out)
    }
}

/// The poset of orbits of `B^n` under a permutation, with the truth-table mask of
/// each orbit.
#[derive(Clone, Debug)]
pub struct OrbitPoset {
    perm: VarPerm,
    partition: OrbitPartition,
    poset: Poset,
    masks: Vec<u64>,
}

impl OrbitPoset {
    /// Orbit `C1 ≤ C2` iff some point of `C1` lies below some point of `C2`.
    ///
    /// The relation is assembled from all comparable point pairs and then checked to
    /// be a partial order, so a failure of transitivity surfaces as an error.
    pub fn new(perm: &VarPerm) -> Result<OrbitPoset> {
        let n = perm.n();
        let partition = orbits(perm);
        let m = partition.orbit_count();
        let width = words_for(n);
        let mut masks = vec![0u64; m * width];
        for (k, orbit) in partition.iter().enumerate() {
            for &x in orbit {
                set_bit(&mut masks[k * width..(k + 1) * width], x as usize);
            }
        }
        let stride = m.div_ceil(64).max(1);
        let mut down = vec![0u64; m * stride];
        for (k, orbit) in partition.iter().enumerate() {
            let row = &mut down[k * stride..(k + 1) * stride];
            for &x in orbit {
                // every subset of x, one orbit id at a time
                let x = x as usize;
                let mut y = x;
                loop {
                    set_bit(row, partition.orbit_of(y));
                    if y == 0 {
                        break;
                    }
                    y = (y - 1) & x;
                }
            }
        }
        let poset = Poset::from_down_sets(m, down)?;
        Ok(OrbitPoset {
            perm: *perm,
            partition,
            poset,
            masks,
        })
    }

    pub fn perm(&self) -> &VarPerm {
        &self.perm
    }

    pub fn partition(&self) -> &OrbitPartition {
        &self.partition
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn into_poset(self) -> Poset {
        self.poset
    }

    /// Truth-table masks of the orbits, `words_for(n)` words each.
    pub fn masks(&self) -> &[u64] {
        &self.masks
    }

    /// Calls `visit` with the truth table of every function fixed by the permutation,
    /// that is, every union of orbits that is an up-set.
    pub fn for_each_fixed_function(&self, visit: impl FnMut(&[u64])) {
        let width = words_for(self.perm.n());
        self.poset
            .dual()
            .for_each_ideal_union(&self.masks, width, visit);
    }
}

/// The orbit poset `B^n(p)`.
pub fn orbit_poset(p: &VarPerm) -> Result<Poset> {
    Ok(OrbitPoset::new(p)?.into_poset())
}

// Exact-count arithmetic: u128 with overflow detection, or unbounded.
trait Tally: Clone {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, other: &Self) -> Option<Self>;
    fn mul(&self, other: &Self) -> Option<Self>;
}

impl Tally for u128 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn add(&self, other: &Self) -> Option<Self> {
        self.checked_add(*other)
    }
    fn mul(&self, other: &Self) -> Option<Self> {
        self.checked_mul(*other)
    }
}

impl Tally for BigUint {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn add(&self, other: &Self) -> Option<Self> {
        Some(self + other)
    }
    fn mul(&self, other: &Self) -> Option<Self> {
        Some(self * other)
    }
}

#[derive(Debug)]
enum Stop {
    Overflow,
    Steps,
}

impl Stop {
    fn into_error(self, max_steps: u64) -> Error {
        match self {
            Stop::Overflow => Error::Overflow("ideal counting"),
            Stop::Steps => Error::Infeasible(format!(
                "ideal counting exceeded {max_steps} recursion steps"
            )),
        }
    }
}

/// Memo entries kept per generation; the older generation is dropped when the
/// current one fills up.
const MEMO_GENERATION: usize = 1 << 22;

struct IdealCounter<'a, T> {
    poset: &'a Poset,
    current: HashMap<Box<[u64]>, T, FxBuildHasher>,
    previous: HashMap<Box<[u64]>, T, FxBuildHasher>,
    steps: u64,
    max_steps: u64,
}

impl<'a, T: Tally> IdealCounter<'a, T> {
    fn new(poset: &'a Poset, max_steps: u64) -> Self {
        IdealCounter {
            poset,
            current: HashMap::default(),
            previous: HashMap::default(),
            steps: 0,
            max_steps,
        }
    }

    fn lookup(&mut self, key: &[u64]) -> Option<T> {
        if let Some(v) = self.current.get(key) {
            return Some(v.clone());
        }
        let v = self.previous.get(key)?.clone();
        self.remember(key, v.clone());
        Some(v)
    }

    fn remember(&mut self, key: &[u64], value: T) {
        if self.current.len() >= MEMO_GENERATION {
            self.previous = std::mem::take(&mut self.current);
        }
        self.current.insert(key.into(), value);
    }

    // Ideals of the subposet induced on `rest`.
    fn count(&mut self, rest: &[u64]) -> Result<T, Stop> {
        let size = popcount(rest);
        if size == 0 {
            return Ok(T::one());
        }
        if size == 1 {
            return T::one().add(&T::one()).ok_or(Stop::Overflow);
        }
        self.steps += 1;
        if self.steps > self.max_steps {
            return Err(Stop::Steps);
        }
        let memoize = size > 6;
        if memoize {
            if let Some(v) = self.lookup(rest) {
                return Ok(v);
            }
        }
        let p = self.poset;
        let component = self.component_of(rest);
        let value = if component.as_slice() != rest {
            let remainder: Vec<u64> = rest.iter().zip(&component).map(|(r, c)| r & !c).collect();
            let a = self.count(&component)?;
            let b = self.count(&remainder)?;
            a.mul(&b).ok_or(Stop::Overflow)?
        } else {
            // Pivot on the element splitting the remaining poset most evenly:
            // ideals containing x contain down(x); ideals avoiding x avoid up(x).
            let mut best = (0u64, 0usize);
            for x in ones(rest) {
                let below = popcount_and(p.down(x), rest);
                let above = popcount_and(p.up(x), rest);
                let score = below * above;
                if score > best.0 {
                    best = (score, x);
                }
            }
            let x = best.1;
            let without_down: Vec<u64> = rest.iter().zip(p.down(x)).map(|(r, d)| r & !d).collect();
            let without_up: Vec<u64> = rest.iter().zip(p.up(x)).map(|(r, u)| r & !u).collect();
            let a = self.count(&without_down)?;
            let b = self.count(&without_up)?;
            a.add(&b).ok_or(Stop::Overflow)?
        };
        if memoize {
            self.remember(rest, value.clone());
        }
        Ok(value)
    }

    // Connected component (in the comparability graph) of the lowest element of `rest`.
    fn component_of(&self, rest: &[u64]) -> Vec<u64> {
        let p = self.poset;
        let mut comp = vec![0u64; rest.len()];
        let first = ones(rest).next().expect("nonempty");
        set_bit(&mut comp, first);
        let mut frontier = comp.clone();
        loop {
            let mut grown = comp.clone();
            for x in ones(&frontier) {
                for ((g, d), u) in grown.iter_mut().zip(p.down(x)).zip(p.up(x)) {
                    *g |= d | u;
                }
            }
            for (g, r) in grown.iter_mut().zip(rest) {
                *g &= r;
            }
            let fresh: Vec<u64> = grown.iter().zip(&comp).map(|(g, c)| g & !c).collect();
            if fresh.iter().all(|&w| w == 0) {
                return comp;
            }
            comp = grown;
            frontier = fresh;
        }
    }
}

/// Depth-first walk over ideals: elements are decided in a linear extension, each
/// excluded first and then included when everything below it is present.
struct IdealWalker<'a> {
    poset: &'a Poset,
    order: Vec<usize>,
    // strict down-sets in walk order
    below: Vec<u64>,
    chosen: Vec<bool>,
    current: Vec<u64>,
    masks: Option<(&'a [u64], usize)>,
    union: Vec<u64>,
}

impl<'a> IdealWalker<'a> {
    fn new(poset: &'a Poset, masks: Option<(&'a [u64], usize)>) -> Self {
        let order = poset.linear_extension();
        let stride = poset.stride;
        let mut below = Vec::with_capacity(order.len() * stride);
        for &e in &order {
            let mut row = poset.down(e).to_vec();
            clear_bit(&mut row, e);
            below.extend(row);
        }
        let width = masks.map_or(0, |(_, w)| w);
        IdealWalker {
            poset,
            chosen: vec![false; order.len()],
            order,
            below,
            current: vec![0u64; stride],
            masks,
            union: vec![0u64; width],
        }
    }

    fn toggle(&mut self, pos: usize) {
        let e = self.order[pos];
        self.current[e / 64] ^= 1 << (e % 64);
        if let Some((masks, width)) = self.masks {
            for (u, m) in self
                .union
                .iter_mut()
                .zip(&masks[e * width..(e + 1) * width])
            {
                *u ^= m;
            }
        }
    }

    fn allowed(&self, pos: usize) -> bool {
        let stride = self.poset.stride;
        dominated(&self.below[pos * stride..(pos + 1) * stride], &self.current)
    }

    /// Moves to the next ideal; false when the walk is exhausted.
    fn advance(&mut self) -> bool {
        for pos in (0..self.order.len()).rev() {
            if self.chosen[pos] {
                self.chosen[pos] = false;
                self.toggle(pos);
            } else if self.allowed(pos) {
                self.chosen[pos] = true;
                self.toggle(pos);
                return true;
            }
        }
        false
    }

    fn run(&mut self, mut visit: impl FnMut(&[u64])) {
        visit(&self.union);
        while self.advance() {
            visit(&self.union);
        }
    }
}

/// Iterator over the ideals of a poset; see [`Poset::ideals`].
pub struct Ideals<'a> {
    walker: IdealWalker<'a>,
    started: bool,
}

impl Iterator for Ideals<'_> {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        if !self.started {
            self.started = true;
            return Some(self.walker.current.clone());
        }
        if self.walker.advance() {
            Some(self.walker.current.clone())
        } else {
            None
        }
    }
}
