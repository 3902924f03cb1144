//! Points of the Boolean cube `B^n`, permutations of the `n` input variables,
//! and the action those permutations induce on points.
//!
//! Variable `i + 1` (1-based, as written in cycle notation) is bit `i` of a
//! point index, so under `(12)` the point `001` moves to `010`. A permutation
//! acts on points by moving bit `i` to bit `map[i]`.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest supported number of variables.
pub const MAX_VARS: usize = 9;

/// A point of `B^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    index: u16,
    n: u8,
}

impl Point {
    pub fn new(index: usize, n: usize) -> Result<Self> {
        check_vars(n)?;
        if index >= 1 << n {
            return Err(Error::InvalidPermutation(format!(
                "point index {index} outside B^{n}"
            )));
        }
        Ok(Point {
            index: index as u16,
            n: n as u8,
        })
    }

    pub fn index(self) -> usize {
        self.index as usize
    }

    pub fn n(self) -> usize {
        self.n as usize
    }

    /// Value of variable `i` (0-based).
    pub fn bit(self, i: usize) -> bool {
        self.index >> i & 1 == 1
    }

    pub fn weight(self) -> u32 {
        self.index.count_ones()
    }

    /// Componentwise order of `B^n`.
    pub fn le(self, other: Point) -> bool {
        self.n == other.n && self.index & !other.index == 0
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n == 0 {
            return f.write_str("ε");
        }
        write!(f, "{:0width$b}", self.index, width = self.n as usize)
    }
}

fn check_vars(n: usize) -> Result<()> {
    if n > MAX_VARS {
        return Err(Error::InvalidPermutation(format!(
            "{n} variables requested, at most {MAX_VARS} are supported"
        )));
    }
    Ok(())
}

/// A permutation of the `n` input variables; `map[i]` is the image of variable `i`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarPerm {
    n: u8,
    map: [u8; MAX_VARS],
}

impl VarPerm {
    pub fn identity(n: usize) -> Self {
        assert!(n <= MAX_VARS, "{n} variables exceeds MAX_VARS");
        let mut map = [0u8; MAX_VARS];
        for (i, slot) in map.iter_mut().enumerate() {
            *slot = i as u8;
        }
        VarPerm { n: n as u8, map }
    }

    /// Builds a permutation from 0-based images, rejecting anything that is not a bijection.
    pub fn from_map(images: &[usize]) -> Result<Self> {
        let n = images.len();
        check_vars(n)?;
        let mut map = [0u8; MAX_VARS];
        let mut seen = [false; MAX_VARS];
        for (i, &image) in images.iter().enumerate() {
            if image >= n {
                return Err(Error::InvalidPermutation(format!(
                    "image {image} of variable {i} is out of range for {n} variables"
                )));
            }
            if std::mem::replace(&mut seen[image], true) {
                return Err(Error::InvalidPermutation(format!(
                    "variable {image} is hit twice"
                )));
            }
            map[i] = image as u8;
        }
        for (i, slot) in map.iter_mut().enumerate().skip(n) {
            *slot = i as u8;
        }
        Ok(VarPerm { n: n as u8, map })
    }

    /// Builds a permutation from disjoint cycles written with 1-based variables.
    /// Unlisted variables are fixed.
    pub fn from_cycles(cycles: &[Vec<usize>], n: usize) -> Result<Self> {
        check_vars(n)?;
        let mut images: Vec<usize> = (0..n).collect();
        let mut used = [false; MAX_VARS];
        for cycle in cycles {
            for &var in cycle {
                if var == 0 || var > n {
                    return Err(Error::InvalidPermutation(format!(
                        "variable {var} is out of range 1..={n}"
                    )));
                }
                if std::mem::replace(&mut used[var - 1], true) {
                    return Err(Error::InvalidPermutation(format!(
                        "variable {var} is repeated"
                    )));
                }
            }
            for (k, &var) in cycle.iter().enumerate() {
                images[var - 1] = cycle[(k + 1) % cycle.len()] - 1;
            }
        }
        VarPerm::from_map(&images)
    }

    /// Parses cycle notation such as `(12)(345)`; variables are the digits `1..=9`.
    /// The empty string, `()` and `id` denote the identity.
    pub fn parse(notation: &str, n: usize) -> Result<Self> {
        let parse_err = |reason: String| Error::Parse {
            input: notation.to_string(),
            reason,
        };
        let trimmed = notation.trim();
        if trimmed.is_empty() || trimmed == "()" || trimmed.eq_ignore_ascii_case("id") {
            check_vars(n)?;
            return Ok(VarPerm::identity(n));
        }
        let mut cycles = Vec::new();
        let mut current: Option<Vec<usize>> = None;
        for ch in trimmed.chars() {
            match ch {
                '(' => {
                    if current.is_some() {
                        return Err(parse_err("nested '('".into()));
                    }
                    current = Some(Vec::new());
                }
                ')' => match current.take() {
                    Some(cycle) if !cycle.is_empty() => cycles.push(cycle),
                    Some(_) => return Err(parse_err("empty cycle".into())),
                    None => return Err(parse_err("unbalanced ')'".into())),
                },
                '1'..='9' => match current.as_mut() {
                    Some(cycle) => cycle.push(ch as usize - '0' as usize),
                    None => return Err(parse_err(format!("digit {ch} outside a cycle"))),
                },
                c if c.is_whitespace() => {}
                other => return Err(parse_err(format!("unexpected character {other:?}"))),
            }
        }
        if current.is_some() {
            return Err(parse_err("unterminated cycle".into()));
        }
        VarPerm::from_cycles(&cycles, n).map_err(|e| parse_err(e.to_string()))
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn map(&self) -> &[u8] {
        &self.map[..self.n as usize]
    }

    pub fn image(&self, var: usize) -> usize {
        self.map[var] as usize
    }

    pub fn is_identity(&self) -> bool {
        self.map().iter().enumerate().all(|(i, &m)| i == m as usize)
    }

    pub fn apply_point(&self, x: Point) -> Result<Point> {
        if x.n() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: x.n(),
            });
        }
        Ok(Point {
            index: self.apply_index(x.index()) as u16,
            n: self.n,
        })
    }

    /// Image of a point index: bit `i` of `x` becomes bit `map[i]` of the result.
    #[inline]
    pub fn apply_index(&self, x: usize) -> usize {
        let mut out = 0;
        for i in 0..self.n as usize {
            out |= (x >> i & 1) << self.map[i];
        }
        out
    }

    /// Image of every point of `B^n`, indexed by point.
    pub fn point_table(&self) -> Vec<u16> {
        (0..1usize << self.n)
            .map(|x| self.apply_index(x) as u16)
            .collect()
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &VarPerm) -> Result<VarPerm> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: other.n(),
            });
        }
        let mut out = VarPerm::identity(self.n());
        for i in 0..self.n() {
            out.map[i] = self.map[other.map[i] as usize];
        }
        Ok(out)
    }

    pub fn inverse(&self) -> VarPerm {
        let mut out = VarPerm::identity(self.n());
        for i in 0..self.n() {
            out.map[self.map[i] as usize] = i as u8;
        }
        out
    }

    pub fn power(&self, k: usize) -> VarPerm {
        let mut out = VarPerm::identity(self.n());
        for _ in 0..k % self.order().max(1) {
            out = self.compose(&out).expect("same dimension");
        }
        out
    }

    /// Disjoint cycles (0-based), each starting at its smallest variable, ordered by
    /// that variable. Fixed variables appear as 1-cycles.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = [false; MAX_VARS];
        let mut cycles = Vec::new();
        for start in 0..self.n() {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut v = self.image(start);
            while v != start {
                seen[v] = true;
                cycle.push(v);
                v = self.image(v);
            }
            cycles.push(cycle);
        }
        cycles
    }

    pub fn cycle_type(&self) -> CycleType {
        let mut lengths: Vec<u8> = self.cycles().iter().map(|c| c.len() as u8).collect();
        lengths.sort_unstable();
        CycleType { lengths }
    }

    pub fn order(&self) -> usize {
        self.cycle_type().order()
    }

    /// `s ∘ self ∘ s⁻¹`, the same permutation with variables relabelled by `s`.
    pub fn conjugate(&self, s: &VarPerm) -> Result<VarPerm> {
        s.compose(self)?.compose(&s.inverse())
    }

    /// Transpositions `(a, b)` whose successive application to points (first element
    /// first) reproduces this permutation.
    pub fn transpositions(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for cycle in self.cycles() {
            // (c0 c1 .. ck) = (c0 ck) ∘ .. ∘ (c0 c1)
            for &v in &cycle[1..] {
                out.push((cycle[0], v));
            }
        }
        out
    }
}

impl fmt::Display for VarPerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return f.write_str(if self.n == 0 { "()" } else { "(1)" });
        }
        for cycle in self.cycles().iter().filter(|c| c.len() > 1) {
            f.write_str("(")?;
            for &v in cycle {
                write!(f, "{}", v + 1)?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for VarPerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VarPerm[{}]{}", self.n, self)
    }
}

/// Multiset of cycle lengths of a permutation, nondecreasing, 1-cycles included.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycleType {
    lengths: Vec<u8>,
}

impl CycleType {
    pub fn new(mut lengths: Vec<usize>) -> Result<Self> {
        if lengths.contains(&0) {
            return Err(Error::InvalidCycleType("cycle of length 0".into()));
        }
        let n: usize = lengths.iter().sum();
        if n > MAX_VARS {
            return Err(Error::InvalidCycleType(format!(
                "lengths sum to {n}, more than {MAX_VARS}"
            )));
        }
        lengths.sort_unstable();
        Ok(CycleType {
            lengths: lengths.into_iter().map(|l| l as u8).collect(),
        })
    }

    pub fn identity(n: usize) -> Self {
        assert!(n <= MAX_VARS);
        CycleType {
            lengths: vec![1; n],
        }
    }

    /// Parses the cycle type of a permutation written in cycle notation on `n` variables.
    pub fn parse(notation: &str, n: usize) -> Result<Self> {
        Ok(VarPerm::parse(notation, n)?.cycle_type())
    }

    pub fn lengths(&self) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.lengths.iter().map(|&l| l as usize)
    }

    pub fn n(&self) -> usize {
        self.lengths().sum()
    }

    /// Number of cycles of length `len`.
    pub fn count(&self, len: usize) -> usize {
        self.lengths().filter(|&l| l == len).count()
    }

    pub fn fixed_count(&self) -> usize {
        self.count(1)
    }

    pub fn is_identity(&self) -> bool {
        self.lengths.iter().all(|&l| l == 1)
    }

    pub fn order(&self) -> usize {
        self.lengths().fold(1, num_integer::lcm)
    }

    /// The type left after removing one cycle of length `len`.
    pub fn without(&self, len: usize) -> Option<CycleType> {
        let at = self.lengths.iter().position(|&l| l as usize == len)?;
        let mut lengths = self.lengths.clone();
        lengths.remove(at);
        Some(CycleType { lengths })
    }

    /// Standard representative: the nontrivial cycles in increasing length on the lowest
    /// variables, fixed variables last, e.g. `(12)(345)` for `(1,1,2,3)`.
    pub fn representative(&self) -> VarPerm {
        let mut map = Vec::with_capacity(self.n());
        let mut next = 0;
        for len in self.lengths().filter(|&l| l > 1) {
            for k in 0..len {
                map.push(next + (k + 1) % len);
            }
            next += len;
        }
        while map.len() < self.n() {
            map.push(map.len());
        }
        VarPerm::from_map(&map).expect("valid by construction")
    }

    /// Cycle notation of the representative.
    pub fn notation(&self) -> String {
        self.representative().to_string()
    }
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.notation())
    }
}

impl fmt::Debug for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycleType{:?}", self.lengths)
    }
}

impl Serialize for CycleType {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.lengths())
    }
}

/// Orbits of the points of `B^n` under the cyclic group generated by a permutation.
#[derive(Clone, Debug)]
pub struct OrbitPartition {
    n: usize,
    orbit_id: Vec<u16>,
    members: Vec<Vec<u16>>,
}

impl OrbitPartition {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn orbit_count(&self) -> usize {
        self.members.len()
    }

    pub fn orbit_of(&self, point: usize) -> usize {
        self.orbit_id[point] as usize
    }

    pub fn orbit_ids(&self) -> &[u16] {
        &self.orbit_id
    }

    /// Points of orbit `k`, ascending. Orbits are numbered by their smallest point.
    pub fn members(&self, k: usize) -> &[u16] {
        &self.members[k]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u16]> {
        self.members.iter().map(Vec::as_slice)
    }
}

/// Partitions `B^n` into orbits of `p`.
pub fn orbits(p: &VarPerm) -> OrbitPartition {
    let table = p.point_table();
    let size = table.len();
    let mut orbit_id = vec![u16::MAX; size];
    let mut members = Vec::new();
    for start in 0..size {
        if orbit_id[start] != u16::MAX {
            continue;
        }
        let id = members.len() as u16;
        let mut orbit = Vec::new();
        let mut x = start;
        while orbit_id[x] == u16::MAX {
            orbit_id[x] = id;
            orbit.push(x as u16);
            x = table[x] as usize;
        }
        orbit.sort_unstable();
        members.push(orbit);
    }
    OrbitPartition {
        n: p.n(),
        orbit_id,
        members,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perms_of(n: usize) -> Vec<VarPerm> {
        fn rec(prefix: &mut Vec<usize>, n: usize, out: &mut Vec<VarPerm>) {
            if prefix.len() == n {
                out.push(VarPerm::from_map(prefix).unwrap());
                return;
            }
            for v in 0..n {
                if !prefix.contains(&v) {
                    prefix.push(v);
                    rec(prefix, n, out);
                    prefix.pop();
                }
            }
        }
        let mut out = Vec::new();
        rec(&mut Vec::new(), n, &mut out);
        out
    }

    #[test]
    fn transposition_moves_first_variable_to_second() {
        let p = VarPerm::parse("(12)", 3).unwrap();
        let x = Point::new(0b001, 3).unwrap();
        assert_eq!(p.apply_point(x).unwrap().to_string(), "010");
        let y = Point::new(0b011, 3).unwrap();
        assert_eq!(p.apply_point(y).unwrap().to_string(), "011");
    }

    #[test]
    fn full_b3_table_under_12() {
        // Row "(1 2)" of the B^3 table: images of 0..7.
        let p = VarPerm::parse("(12)", 3).unwrap();
        let images: Vec<String> = (0..8)
            .map(|i| {
                p.apply_point(Point::new(i, 3).unwrap())
                    .unwrap()
                    .to_string()
            })
            .collect();
        assert_eq!(
            images,
            ["000", "010", "001", "011", "100", "110", "101", "111"]
        );
    }

    #[test]
    fn identity_fixes_points() {
        let id = VarPerm::identity(5);
        for i in 0..32 {
            assert_eq!(id.apply_index(i), i);
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let p = VarPerm::identity(3);
        let x = Point::new(1, 4).unwrap();
        assert!(matches!(
            p.apply_point(x),
            Err(Error::DimensionMismatch {
                expected: 3,
                found: 4
            })
        ));
    }

    #[test]
    fn cycle_types() {
        let p = VarPerm::parse("(12)(3456)", 6).unwrap();
        assert_eq!(p.cycle_type().lengths().collect::<Vec<_>>(), [2, 4]);
        let id = VarPerm::identity(9);
        assert_eq!(id.cycle_type().lengths().collect::<Vec<_>>(), [1; 9]);
        let q = VarPerm::parse("(12)(345)(6789)", 9).unwrap();
        assert_eq!(q.cycle_type().lengths().collect::<Vec<_>>(), [2, 3, 4]);
    }

    #[test]
    fn parse_and_display() {
        let p = VarPerm::parse("(12)(34)", 4).unwrap();
        assert_eq!(p.map(), [1, 0, 3, 2]);
        assert!(VarPerm::parse("", 3).unwrap().is_identity());
        let long = VarPerm::parse("(123456789)", 9).unwrap();
        assert_eq!(long.cycle_type().lengths().collect::<Vec<_>>(), [9]);
        assert_eq!(long.to_string(), "(123456789)");
        assert_eq!(VarPerm::identity(4).to_string(), "(1)");
    }

    #[test]
    fn parse_errors() {
        assert!(VarPerm::parse("(121)", 3).is_err());
        assert!(VarPerm::parse("(14)", 3).is_err());
        assert!(VarPerm::parse("(12", 3).is_err());
        assert!(VarPerm::parse("(1a)", 3).is_err());
        assert!(VarPerm::parse("(12)(23)", 3).is_err());
    }

    #[test]
    fn orbits_of_b3_under_12() {
        let p = VarPerm::parse("(12)", 3).unwrap();
        let parts = orbits(&p);
        assert_eq!(parts.orbit_count(), 6);
        let groups: Vec<Vec<u16>> = parts.iter().map(<[u16]>::to_vec).collect();
        assert_eq!(
            groups,
            vec![vec![0], vec![1, 2], vec![3], vec![4], vec![5, 6], vec![7]]
        );
        assert_eq!(orbits(&VarPerm::identity(2)).orbit_count(), 4);
    }

    #[test]
    fn orbit_count_matches_burnside_on_points() {
        // Burnside on points: #orbits = (1/|<p>|) Σ_k |Fix(p^k)|, checked against the
        // orbit construction for a selection of permutations of nine variables.
        for notation in ["(123456789)", "(12)(345)(6789)", "(123)(456)(789)", "(12)"] {
            let p = VarPerm::parse(notation, 9).unwrap();
            let order = p.order();
            let mut fixed_total = 0usize;
            let mut q = VarPerm::identity(9);
            for _ in 0..order {
                fixed_total += (0..512).filter(|&x| q.apply_index(x) == x).count();
                q = p.compose(&q).unwrap();
            }
            assert_eq!(fixed_total % order, 0);
            assert_eq!(orbits(&p).orbit_count(), fixed_total / order, "{notation}");
        }
    }

    #[test]
    fn conjugation() {
        let p = VarPerm::parse("(12)", 3).unwrap();
        let s = VarPerm::parse("(23)", 3).unwrap();
        assert_eq!(p.conjugate(&s).unwrap(), VarPerm::parse("(13)", 3).unwrap());
        let id = VarPerm::identity(3);
        assert!(id.conjugate(&s).unwrap().is_identity());
        let all = perms_of(4);
        for p in &all {
            for s in &all {
                assert_eq!(p.conjugate(s).unwrap().cycle_type(), p.cycle_type());
            }
        }
    }

    #[test]
    fn action_is_order_automorphism() {
        for n in 0..=5 {
            for p in perms_of(n) {
                let t = p.point_table();
                for x in 0..1usize << n {
                    for y in 0..1usize << n {
                        let before = x & !y == 0;
                        let after = t[x] as usize & !(t[y] as usize) == 0;
                        assert_eq!(before, after);
                    }
                }
            }
        }
    }

    #[test]
    fn action_respects_composition() {
        let all = perms_of(4);
        for p in &all {
            for q in &all {
                let pq = p.compose(q).unwrap();
                for x in 0..16 {
                    assert_eq!(p.apply_index(q.apply_index(x)), pq.apply_index(x));
                }
            }
        }
    }

    #[test]
    fn orbit_sizes_divide_order() {
        for p in perms_of(5) {
            let order = p.order();
            for orbit in orbits(&p).iter() {
                assert_eq!(order % orbit.len(), 0);
            }
        }
    }

    #[test]
    fn transpositions_reproduce_permutation() {
        for p in perms_of(5) {
            let mut q = VarPerm::identity(5);
            for (a, b) in p.transpositions() {
                let mut cycles = vec![vec![a + 1, b + 1]];
                if a == b {
                    cycles.clear();
                }
                let t = VarPerm::from_cycles(&cycles, 5).unwrap();
                q = t.compose(&q).unwrap();
            }
            assert_eq!(q, p);
        }
    }

    #[test]
    fn representative_has_requested_type() {
        let t = CycleType::new(vec![3, 1, 2, 1]).unwrap();
        assert_eq!(t.notation(), "(12)(345)");
        assert_eq!(t.representative().cycle_type(), t);
        assert_eq!(
            t.without(3).unwrap().lengths().collect::<Vec<_>>(),
            [1, 1, 2]
        );
        assert!(t.without(4).is_none());
        assert_eq!(t.order(), 6);
    }
}
