//! Monotone Boolean functions stored as truth tables.
//!
//! Bit `p` of the table is `f(p)`, packed little-endian into 64-bit words, so
//! every function of at most six variables is a single word and pointwise
//! order is `(a & !b) == 0`.

use std::cmp::Ordering;
use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::hypercube::{VarPerm, MAX_VARS};

/// Words in the largest truth table (`2^9` bits).
pub const MAX_WORDS: usize = 8;

/// Largest `n` for which whole Dedekind sets are materialized.
pub const MAX_GENERATE: usize = 6;

/// Number of 64-bit words holding a truth table of `n` variables.
pub const fn words_for(n: usize) -> usize {
    (1usize << n).div_ceil(64)
}

/// Mask of the meaningful bits of the last word of an `n`-variable table.
pub const fn tail_mask(n: usize) -> u64 {
    if n >= 6 {
        u64::MAX
    } else {
        (1u64 << (1 << n)) - 1
    }
}

// Positions x in 0..64 with bit i of x clear.
const fn low_half_mask(i: usize) -> u64 {
    let mut m = 0u64;
    let mut x = 0;
    while x < 64 {
        if x >> i & 1 == 0 {
            m |= 1 << x;
        }
        x += 1;
    }
    m
}

const LOW_HALF: [u64; 6] = [
    low_half_mask(0),
    low_half_mask(1),
    low_half_mask(2),
    low_half_mask(3),
    low_half_mask(4),
    low_half_mask(5),
];

// Positions x with bit i set and bit j clear, i < j < 6.
const fn swap_mask(i: usize, j: usize) -> u64 {
    let mut m = 0u64;
    let mut x = 0;
    while x < 64 {
        if x >> i & 1 == 1 && x >> j & 1 == 0 {
            m |= 1 << x;
        }
        x += 1;
    }
    m
}

/// Exchanges variables `i` and `j` of a one-word truth table.
#[inline]
pub fn swap_vars_word(f: u64, i: usize, j: usize) -> u64 {
    if i == j {
        return f;
    }
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    let shift = (1 << j) - (1 << i);
    let t = ((f >> shift) ^ f) & swap_mask(i, j);
    f ^ t ^ (t << shift)
}

/// Exchanges variables `i` and `j` of a truth table of any width.
pub fn swap_vars(words: &mut [u64], i: usize, j: usize) {
    if i == j {
        return;
    }
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    if j < 6 {
        for w in words.iter_mut() {
            *w = swap_vars_word(*w, i, j);
        }
    } else if i < 6 {
        let s = 1 << i;
        let step = 1 << (j - 6);
        for w in 0..words.len() {
            if w & step != 0 {
                continue;
            }
            let (a, b) = (words[w], words[w + step]);
            let t = ((a >> s) ^ b) & LOW_HALF[i];
            words[w + step] = b ^ t;
            words[w] = a ^ (t << s);
        }
    } else {
        let lo = 1 << (i - 6);
        let hi = 1 << (j - 6);
        for w in 0..words.len() {
            if w & lo != 0 && w & hi == 0 {
                words.swap(w, w - lo + hi);
            }
        }
    }
}

/// True iff the truth table is upward closed, checked on covering pairs only.
pub fn is_monotone(bits: &[u64], n: usize) -> bool {
    if n > MAX_VARS || bits.len() != words_for(n) {
        return false;
    }
    if bits[bits.len() - 1] & !tail_mask(n) != 0 {
        return false;
    }
    for (i, low) in LOW_HALF.iter().enumerate().take(n) {
        if bits.iter().any(|&w| ((w & low) << (1 << i)) & !w != 0) {
            return false;
        }
    }
    for i in 6..n {
        let step = 1 << (i - 6);
        for w in 0..bits.len() {
            if w & step == 0 && bits[w] & !bits[w + step] != 0 {
                return false;
            }
        }
    }
    true
}

/// Pointwise `a ≤ b` on truth tables of equal width.
#[inline]
pub fn dominated(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

/// Applies a variable permutation to a truth table in place.
pub fn permute_words(words: &mut [u64], p: &VarPerm) {
    for (a, b) in p.transpositions() {
        swap_vars(words, a, b);
    }
}

/// A monotone Boolean function of `n ≤ 9` variables.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Mbf {
    n: u8,
    words: [u64; MAX_WORDS],
}

impl Mbf {
    pub fn new(n: usize, bits: &[u64]) -> Result<Self> {
        if n > MAX_VARS {
            return Err(Error::DimensionMismatch {
                expected: MAX_VARS,
                found: n,
            });
        }
        if bits.len() != words_for(n) {
            return Err(Error::DimensionMismatch {
                expected: words_for(n),
                found: bits.len(),
            });
        }
        if !is_monotone(bits, n) {
            return Err(Error::NotMonotone);
        }
        Ok(Self::from_words_unchecked(n, bits))
    }

    pub(crate) fn from_words_unchecked(n: usize, bits: &[u64]) -> Self {
        let mut words = [0u64; MAX_WORDS];
        words[..bits.len()].copy_from_slice(bits);
        Mbf { n: n as u8, words }
    }

    pub fn zero(n: usize) -> Self {
        Self::from_words_unchecked(n, &vec![0; words_for(n)])
    }

    pub fn one(n: usize) -> Self {
        let mut words = vec![u64::MAX; words_for(n)];
        *words.last_mut().unwrap() = tail_mask(n);
        Self::from_words_unchecked(n, &words)
    }

    /// The projection onto variable `i` (0-based).
    pub fn var(n: usize, i: usize) -> Self {
        assert!(i < n);
        let mut words = vec![0u64; words_for(n)];
        for x in (0..1usize << n).filter(|x| x >> i & 1 == 1) {
            words[x / 64] |= 1 << (x % 64);
        }
        Self::from_words_unchecked(n, &words)
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn words(&self) -> &[u64] {
        &self.words[..words_for(self.n as usize)]
    }

    /// The value at point `p`.
    pub fn eval(&self, p: usize) -> bool {
        self.words[p / 64] >> (p % 64) & 1 == 1
    }

    pub fn count_ones(&self) -> u32 {
        self.words().iter().map(|w| w.count_ones()).sum()
    }

    pub fn le(&self, other: &Mbf) -> bool {
        self.n == other.n && dominated(self.words(), other.words())
    }

    pub fn meet(&self, other: &Mbf) -> Mbf {
        let mut out = *self;
        for (a, b) in out.words.iter_mut().zip(other.words) {
            *a &= b;
        }
        out
    }

    pub fn join(&self, other: &Mbf) -> Mbf {
        let mut out = *self;
        for (a, b) in out.words.iter_mut().zip(other.words) {
            *a |= b;
        }
        out
    }

    /// `x ↦ ¬f(¬x)`, an order-reversing involution of `D_n`.
    pub fn dual(&self) -> Mbf {
        let n = self.n();
        let size = 1usize << n;
        let mut words = vec![0u64; words_for(n)];
        for x in 0..size {
            if !self.eval(size - 1 - x) {
                words[x / 64] |= 1 << (x % 64);
            }
        }
        Self::from_words_unchecked(n, &words)
    }
}

impl Ord for Mbf {
    /// Order by truth-table value: the highest word is most significant.
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| cmp_tables(self.words(), other.words()))
    }
}

impl PartialOrd for Mbf {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Compares two truth tables as unsigned integers.
pub fn cmp_tables(a: &[u64], b: &[u64]) -> Ordering {
    a.iter().rev().cmp(b.iter().rev())
}

impl fmt::Debug for Mbf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mbf[{}]({})", self.n, self)
    }
}

impl fmt::Display for Mbf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.n();
        if n < 6 {
            let digits = (1usize << n).div_ceil(4);
            return write!(f, "0x{:0digits$x}", self.words[0]);
        }
        f.write_str("0x")?;
        for w in self.words().iter().rev() {
            write!(f, "{w:016x}")?;
        }
        Ok(())
    }
}

/// `x ↦ f(p⁻¹ x)`: the function obtained by renaming the variables of `f` through `p`.
pub fn apply_perm_fn(p: &VarPerm, f: &Mbf) -> Result<Mbf> {
    if p.n() != f.n() {
        return Err(Error::DimensionMismatch {
            expected: p.n(),
            found: f.n(),
        });
    }
    let mut out = *f;
    let width = words_for(f.n());
    permute_words(&mut out.words[..width], p);
    Ok(out)
}

pub fn is_fixed(p: &VarPerm, f: &Mbf) -> Result<bool> {
    Ok(apply_perm_fn(p, f)? == *f)
}

/// A sorted, duplicate-free set of functions of one arity, stored as packed words.
#[derive(Clone, PartialEq, Eq)]
pub struct MbfSet {
    n: u8,
    stride: usize,
    words: Vec<u64>,
}

impl MbfSet {
    pub fn empty(n: usize) -> Self {
        MbfSet {
            n: n as u8,
            stride: words_for(n),
            words: Vec::new(),
        }
    }

    /// Wraps packed tables that are already sorted and distinct.
    pub(crate) fn from_sorted_words(n: usize, words: Vec<u64>) -> Self {
        let stride = words_for(n);
        debug_assert_eq!(words.len() % stride, 0);
        MbfSet {
            n: n as u8,
            stride,
            words,
        }
    }

    /// Sorts and deduplicates packed tables.
    pub fn from_words(n: usize, mut words: Vec<u64>) -> Self {
        let stride = words_for(n);
        assert_eq!(words.len() % stride, 0, "ragged truth-table buffer");
        match stride {
            1 => {
                words.sort_unstable();
                words.dedup();
            }
            2 => words = sort_chunks::<2>(words),
            4 => words = sort_chunks::<4>(words),
            8 => words = sort_chunks::<8>(words),
            _ => unreachable!("stride is a power of two up to 8"),
        }
        MbfSet {
            n: n as u8,
            stride,
            words,
        }
    }

    pub fn from_functions(n: usize, functions: impl IntoIterator<Item = Mbf>) -> Self {
        let mut words = Vec::new();
        for f in functions {
            assert_eq!(f.n(), n);
            words.extend_from_slice(f.words());
        }
        Self::from_words(n, words)
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn len(&self) -> usize {
        self.words.len() / self.stride
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn as_words(&self) -> &[u64] {
        &self.words
    }

    pub fn into_words(self) -> Vec<u64> {
        self.words
    }

    /// Truth table of member `i`.
    #[inline]
    pub fn table(&self, i: usize) -> &[u64] {
        &self.words[i * self.stride..(i + 1) * self.stride]
    }

    pub fn get(&self, i: usize) -> Mbf {
        Mbf::from_words_unchecked(self.n(), self.table(i))
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = Mbf> + '_ {
        self.words
            .chunks_exact(self.stride)
            .map(|w| Mbf::from_words_unchecked(self.n(), w))
    }

    pub fn position(&self, f: &Mbf) -> Option<usize> {
        if f.n() != self.n() {
            return None;
        }
        let (mut lo, mut hi) = (0, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match cmp_tables(self.table(mid), f.words()) {
                Ordering::Less => lo = mid + 1,
                Ordering::Greater => hi = mid,
                Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    pub fn contains(&self, f: &Mbf) -> bool {
        self.position(f).is_some()
    }
}

impl fmt::Debug for MbfSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MbfSet[n={}, len={}]", self.n, self.len())
    }
}

fn sort_chunks<const K: usize>(words: Vec<u64>) -> Vec<u64> {
    let mut chunks: Vec<[u64; K]> = words
        .chunks_exact(K)
        .map(|c| c.try_into().expect("exact chunk"))
        .collect();
    drop(words);
    chunks.sort_unstable_by(|a, b| cmp_tables(a, b));
    chunks.dedup();
    chunks.into_iter().flatten().collect()
}

// Upper covers of each point of B^6, as point masks.
fn upper_covers(n: usize) -> [u64; 64] {
    let mut out = [0u64; 64];
    for (x, slot) in out.iter_mut().enumerate().take(1 << n) {
        for i in 0..n {
            if x >> i & 1 == 0 {
                *slot |= 1 << (x | 1 << i);
            }
        }
    }
    out
}

/// Calls `emit` with every monotone `g ≤ f`, in increasing order, for a one-word `f`.
///
/// Walks the points of `f`'s 1-set from the top down, keeping a point only when all
/// of its upper covers are kept.
pub fn for_each_below(f: u64, n: usize, mut emit: impl FnMut(u64)) {
    debug_assert!(n <= 6);
    let covers = upper_covers(n);
    let mut points: Vec<u8> = (0..64u8).filter(|&x| f >> x & 1 == 1).collect();
    points.reverse();
    fn walk(points: &[u8], covers: &[u64; 64], acc: u64, emit: &mut impl FnMut(u64)) {
        match points.split_first() {
            None => emit(acc),
            Some((&x, rest)) => {
                walk(rest, covers, acc, emit);
                let need = covers[x as usize];
                if acc & need == need {
                    walk(rest, covers, acc | 1 << x, emit);
                }
            }
        }
    }
    walk(&points, &covers, 0, &mut emit);
}

/// All of `D_n` for `n ≤ 6`, built as `D_{k+1} = {(f0, f1) : f0 ≤ f1}` with the new
/// variable as the most significant one.
pub fn generate_all(n: usize) -> Result<MbfSet> {
    if n > MAX_GENERATE {
        return Err(Error::Capacity {
            what: format!("D_{n}"),
            count: "more than 2^40".into(),
            budget: 7_828_354,
        });
    }
    let mut level: Vec<u64> = vec![0, 1];
    for k in 0..n {
        let shift = 1 << k;
        let mut next = Vec::new();
        for &high in &level {
            for_each_below(high, k, |low| next.push(low | high << shift));
        }
        level = next;
    }
    Ok(MbfSet::from_sorted_words(n, level))
}

/// Swap sequence visiting all `n!` arrangements (Heap's algorithm).
fn heap_swaps(n: usize) -> &'static [(u8, u8)] {
    static TABLES: OnceLock<Vec<Vec<(u8, u8)>>> = OnceLock::new();
    let tables = TABLES.get_or_init(|| {
        (0..=MAX_VARS)
            .map(|n| {
                let mut swaps = Vec::new();
                let mut c = vec![0usize; n];
                let mut i = 1;
                while i < n {
                    if c[i] < i {
                        let j = if i % 2 == 0 { 0 } else { c[i] };
                        swaps.push((j as u8, i as u8));
                        c[i] += 1;
                        i = 1;
                    } else {
                        c[i] = 0;
                        i += 1;
                    }
                }
                swaps
            })
            .collect()
    });
    &tables[n]
}

/// Calls `visit` with `σ·f` for every `σ ∈ S_n` (with repetitions when `f` has symmetries).
pub fn for_each_image(f: &Mbf, mut visit: impl FnMut(&[u64])) {
    let n = f.n();
    if n <= 6 {
        let mut g = f.words()[0];
        visit(std::slice::from_ref(&g));
        for &(a, b) in heap_swaps(n) {
            g = swap_vars_word(g, a as usize, b as usize);
            visit(std::slice::from_ref(&g));
        }
    } else {
        let mut g = f.words().to_vec();
        visit(&g);
        for &(a, b) in heap_swaps(n) {
            swap_vars(&mut g, a as usize, b as usize);
            visit(&g);
        }
    }
}

/// The least truth table over all `n!` renamings of the variables.
pub fn canonical_form(f: &Mbf) -> Mbf {
    let mut best = *f;
    let width = words_for(f.n());
    for_each_image(f, |g| {
        // compare from the most significant word, stopping at the first difference
        if cmp_tables(g, &best.words[..width]) == Ordering::Less {
            best.words[..width].copy_from_slice(g);
        }
    });
    best
}

/// The full orbit of `rep` under renaming of variables.
pub fn unpack(rep: &Mbf) -> MbfSet {
    let mut words = Vec::new();
    for_each_image(rep, |g| words.extend_from_slice(g));
    MbfSet::from_words(rep.n(), words)
}

/// One equivalence class of `D_n` under variable renaming.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EquivClassRep {
    /// Least member of the class.
    pub rep: Mbf,
    pub orbit_size: u64,
}

/// All equivalence classes of `D_n`, `n ≤ 6`, in increasing order of representative.
pub fn representatives(n: usize) -> Result<Vec<EquivClassRep>> {
    let all = generate_all(n)?;
    let mut seen = vec![false; all.len()];
    let mut out = Vec::new();
    for i in 0..all.len() {
        if seen[i] {
            continue;
        }
        // members are visited in increasing order, so the first unseen one is the
        // least element of its orbit
        let rep = all.get(i);
        let orbit = unpack(&rep);
        for g in orbit.iter() {
            let j = all.position(&g).expect("orbit stays inside D_n");
            seen[j] = true;
        }
        out.push(EquivClassRep {
            rep,
            orbit_size: orbit.len() as u64,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(n: usize, i: usize) -> Mbf {
        Mbf::var(n, i)
    }

    #[test]
    fn monotonicity_checks() {
        assert!(is_monotone(&[0], 3));
        assert!(is_monotone(x(2, 0).words(), 2));
        assert!(!is_monotone(&[0b01], 1));
        assert!(is_monotone(&[0b10], 1));
        assert!(!is_monotone(&[1 << 5], 2), "stray bits above 2^n");
        let mut wide = Mbf::var(8, 7).words().to_vec();
        assert!(is_monotone(&wide, 8));
        wide.swap(0, 3);
        assert!(!is_monotone(&wide, 8));
    }

    #[test]
    fn generate_counts() {
        let expected = [2, 3, 6, 20, 168, 7581];
        for (n, &d) in expected.iter().enumerate() {
            let set = generate_all(n).unwrap();
            assert_eq!(set.len(), d, "d_{n}");
            assert!(set.iter().all(|f| is_monotone(f.words(), n)));
            assert!(set.as_words().windows(2).all(|w| w[0] < w[1]));
        }
        assert!(generate_all(7).is_err());
    }

    #[test]
    fn below_agrees_with_filter() {
        let d4 = generate_all(4).unwrap();
        for f in d4.iter() {
            let mut got = Vec::new();
            for_each_below(f.words()[0], 4, |g| got.push(g));
            let want: Vec<u64> = d4
                .as_words()
                .iter()
                .copied()
                .filter(|&g| g & !f.words()[0] == 0)
                .collect();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn permuting_projections() {
        let p = VarPerm::parse("(12)", 2).unwrap();
        assert_eq!(apply_perm_fn(&p, &x(2, 0)).unwrap(), x(2, 1));
        let both = x(2, 0).meet(&x(2, 1));
        assert_eq!(apply_perm_fn(&p, &both).unwrap(), both);
        assert!(is_fixed(&p, &both).unwrap());
        assert!(apply_perm_fn(&VarPerm::identity(3), &both).is_err());
    }

    #[test]
    fn orbit_of_a_projection() {
        let orbit = unpack(&x(3, 0));
        assert_eq!(orbit.len(), 3);
        for i in 0..3 {
            assert!(orbit.contains(&x(3, i)));
        }
        let sym = x(3, 0).join(&x(3, 1)).join(&x(3, 2));
        assert_eq!(unpack(&sym).len(), 1);
    }

    #[test]
    fn swaps_match_pointwise_definition() {
        for n in [2usize, 5, 7, 9] {
            let p = match n {
                2 => VarPerm::parse("(12)", 2).unwrap(),
                5 => VarPerm::parse("(135)(24)", 5).unwrap(),
                7 => VarPerm::parse("(1726)(354)", 7).unwrap(),
                _ => VarPerm::parse("(19)(2738)(456)", 9).unwrap(),
            };
            // a non-symmetric monotone function: threshold with weights by index
            let mut words = vec![0u64; words_for(n)];
            for pt in 0..1usize << n {
                let w: usize = (0..n).filter(|i| pt >> i & 1 == 1).map(|i| i + 1).sum();
                if w >= n {
                    words[pt / 64] |= 1 << (pt % 64);
                }
            }
            let f = Mbf::new(n, &words).unwrap();
            let g = apply_perm_fn(&p, &f).unwrap();
            let inv = p.inverse();
            for pt in 0..1usize << n {
                assert_eq!(g.eval(pt), f.eval(inv.apply_index(pt)));
            }
        }
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(canonical_form(&x(2, 1)), x(2, 0));
        let sym = x(3, 0).meet(&x(3, 1)).meet(&x(3, 2));
        assert_eq!(canonical_form(&sym), sym);
        let d4 = generate_all(4).unwrap();
        let mut forms: Vec<Mbf> = d4.iter().map(|f| canonical_form(&f)).collect();
        forms.sort();
        forms.dedup();
        assert_eq!(forms.len(), 30);
    }

    #[test]
    fn dual_is_order_reversing_involution() {
        let d3 = generate_all(3).unwrap();
        for f in d3.iter() {
            let g = f.dual();
            assert!(d3.contains(&g));
            assert_eq!(g.dual(), f);
            for h in d3.iter() {
                assert_eq!(f.le(&h), h.dual().le(&g));
            }
        }
    }

    #[test]
    fn representatives_of_small_n() {
        let reps = representatives(2).unwrap();
        let mut sizes: Vec<u64> = reps.iter().map(|r| r.orbit_size).collect();
        sizes.sort();
        assert_eq!(sizes, [1, 1, 1, 1, 2]);
        for (n, r) in [(3, 10), (4, 30), (5, 210)] {
            let reps = representatives(n).unwrap();
            assert_eq!(reps.len(), r);
            let total: u64 = reps.iter().map(|r| r.orbit_size).sum();
            assert_eq!(total as usize, generate_all(n).unwrap().len());
            assert!(reps.iter().all(|r| canonical_form(&r.rep) == r.rep));
        }
    }

    #[test]
    fn set_ordering_is_numeric_for_wide_tables() {
        let a = Mbf::var(7, 6);
        let b = Mbf::var(7, 0);
        let set = MbfSet::from_functions(7, [a, b, a]);
        assert_eq!(set.len(), 2);
        assert_eq!(set.get(0), b.min(a));
        assert_eq!(set.position(&a), Some(if a < b { 0 } else { 1 }));
    }
}
