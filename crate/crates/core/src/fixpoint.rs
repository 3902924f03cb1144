//! `φ_n(π)`, the number of monotone functions fixed by a variable permutation, by
//! several interchangeable methods and a cost-based dispatcher.
//!
//! Every method works on the standard representative of a cycle type, since `φ`
//! is constant on conjugacy classes.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::burnside::registry::known_values;
use crate::cache::Cache;
use crate::error::{Error, Result};
use crate::hypercube::{orbits, CycleType, VarPerm};
use crate::lattice::FunctionLattice;
use crate::mbf::{generate_all, is_fixed, swap_vars, swap_vars_word, MbfSet, MAX_GENERATE};
use crate::poset::OrbitPoset;
use crate::BigCount;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Chain3,
    Chain2,
    Lift2,
    Lift1,
    Threecycle,
    Involution,
    Basic,
    Brute,
    Registry,
}

impl Method {
    /// Computing methods, in order of preference when costs tie.
    pub const COMPUTED: [Method; 8] = [
        Method::Chain3,
        Method::Chain2,
        Method::Lift2,
        Method::Lift1,
        Method::Threecycle,
        Method::Involution,
        Method::Basic,
        Method::Brute,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Chain3 => "chain3",
            Method::Chain2 => "chain2",
            Method::Lift2 => "lift2",
            Method::Lift1 => "lift1",
            Method::Threecycle => "threecycle",
            Method::Involution => "involution",
            Method::Basic => "basic",
            Method::Brute => "brute",
            Method::Registry => "registry",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Method> {
        Method::COMPUTED
            .into_iter()
            .chain([Method::Registry])
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Parse {
                input: s.to_string(),
                reason: "unknown method".into(),
            })
    }
}

impl Serialize for Method {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// Resource limits checked before any method starts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Element pairs visited by the square-map loop of `lift2`.
    pub pairs: u64,
    /// Functions streamed by enumeration, and recursion steps of ideal counting.
    pub ideals: u64,
    /// Functions held in memory as one materialized set.
    pub materialize: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            pairs: 10_000_000_000,
            ideals: 1 << 31,
            materialize: 1 << 25,
        }
    }
}

/// Whether published constants may stand in for computed values.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Constants {
    Forbid,
    /// Use the published value whenever one exists.
    Prefer,
    /// Use the published value only when no method fits the budget.
    Fallback,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PhiResult {
    pub n: usize,
    pub cycle_type: CycleType,
    #[serde(serialize_with = "crate::serialize_decimal")]
    pub value: BigCount,
    pub method: Method,
}

/// All functions fixed by one permutation, sorted.
#[derive(Clone, Debug)]
pub struct FixedPointSet {
    perm: VarPerm,
    set: MbfSet,
}

impl FixedPointSet {
    pub fn perm(&self) -> &VarPerm {
        &self.perm
    }

    pub fn set(&self) -> &MbfSet {
        &self.set
    }

    pub fn len(&self) -> usize {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }

    pub fn into_set(self) -> MbfSet {
        self.set
    }

    /// Checks that the set contains both constants and is closed under pointwise
    /// meet and join, with every member fixed. Quadratic; for small sets.
    pub fn check_closure(&self) -> bool {
        let set = &self.set;
        let w = set.stride();
        if set.len() < 2 || set.table(0).iter().any(|&x| x != 0) {
            return false;
        }
        let top = set.get(set.len() - 1);
        if top != crate::mbf::Mbf::one(set.n()) {
            return false;
        }
        let mut meet = vec![0u64; w];
        let mut join = vec![0u64; w];
        for a in 0..set.len() {
            if !is_fixed(&self.perm, &set.get(a)).unwrap_or(false) {
                return false;
            }
            for b in 0..a {
                for i in 0..w {
                    meet[i] = set.table(a)[i] & set.table(b)[i];
                    join[i] = set.table(a)[i] | set.table(b)[i];
                }
                if !contains(set, &meet) || !contains(set, &join) {
                    return false;
                }
            }
        }
        true
    }
}

fn contains(set: &MbfSet, table: &[u64]) -> bool {
    let (mut lo, mut hi) = (0, set.len());
    while lo < hi {
        let mid = (lo + hi) / 2;
        match crate::mbf::cmp_tables(set.table(mid), table) {
            std::cmp::Ordering::Less => lo = mid + 1,
            std::cmp::Ordering::Greater => hi = mid,
            std::cmp::Ordering::Equal => return true,
        }
    }
    false
}

/// One candidate method for a cycle type with its estimated cost in nanoseconds, or
/// the reason it cannot run.
#[derive(Debug)]
pub struct Candidate {
    pub method: Method,
    pub estimate: Result<f64>,
}

type Progress = Arc<dyn Fn(&str) + Send + Sync>;

// Sets above this size are rebuilt rather than kept between calls.
const MEMO_LIMIT: usize = 1 << 23;
// Cached sets below this size are cheaper to rebuild than to read.
const CACHE_MIN: usize = 1 << 12;

/// Computes `φ` values under a budget, keeping materialized sets for reuse.
pub struct Engine {
    budget: Budget,
    cache: Option<Cache>,
    progress: Option<Progress>,
    memo: Mutex<HashMap<VarPerm, Arc<FunctionLattice>>>,
}

impl Default for Engine {
    fn default() -> Self {
        Engine::new(Budget::default())
    }
}

impl fmt::Debug for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Engine")
            .field("budget", &self.budget)
            .field("cache", &self.cache)
            .finish()
    }
}

// The permutation `x ↦ f(p⁻¹x)` as a fixed sequence of variable swaps.
struct Action {
    swaps: Vec<(usize, usize)>,
}

impl Action {
    fn new(p: &VarPerm) -> Self {
        Action {
            swaps: p.transpositions(),
        }
    }

    #[inline]
    fn word(&self, mut f: u64) -> u64 {
        for &(a, b) in &self.swaps {
            f = swap_vars_word(f, a, b);
        }
        f
    }

    #[inline]
    fn apply(&self, f: &mut [u64]) {
        if f.len() == 1 {
            f[0] = self.word(f[0]);
        } else {
            for &(a, b) in &self.swaps {
                swap_vars(f, a, b);
            }
        }
    }
}

fn estimate_size(t: &CycleType) -> f64 {
    known_values()
        .phi(t)
        .ok()
        .and_then(|v| v.to_f64())
        .unwrap_or(f64::INFINITY)
}

fn orbit_count(p: &VarPerm) -> f64 {
    orbits(p).orbit_count() as f64
}

fn strip_fixed(t: &CycleType, k: usize) -> Option<CycleType> {
    (0..k).try_fold(t.clone(), |acc, _| acc.without(1))
}

fn not_applicable(method: Method, t: &CycleType, why: &str) -> Error {
    Error::NotApplicable(format!("{method} for {t} on {} variables: {why}", t.n()))
}

fn over_budget(what: String, size: f64, budget: u64) -> Error {
    Error::Capacity {
        what,
        count: format!("{size:.0}"),
        budget,
    }
}

fn narrow(v: u128) -> BigUint {
    BigUint::from(v)
}

impl Engine {
    pub fn new(budget: Budget) -> Self {
        Engine {
            budget,
            cache: None,
            progress: None,
            memo: Mutex::new(HashMap::new()),
        }
    }

    pub fn with_cache(mut self, cache: Cache) -> Self {
        self.cache = Some(cache);
        self
    }

    pub fn with_progress(mut self, report: impl Fn(&str) + Send + Sync + 'static) -> Self {
        self.progress = Some(Arc::new(report));
        self
    }

    pub fn budget(&self) -> Budget {
        self.budget
    }

    pub fn cache(&self) -> Option<&Cache> {
        self.cache.as_ref()
    }

    fn note(&self, msg: &str) {
        if let Some(p) = &self.progress {
            p(msg);
        }
    }

    /// `φ` of a permutation's cycle type.
    pub fn phi_perm(
        &self,
        p: &VarPerm,
        method: Option<Method>,
        constants: Constants,
    ) -> Result<PhiResult> {
        self.phi(&p.cycle_type(), method, constants)
    }

    /// `φ` of a cycle type, by the given method or by the cheapest feasible one.
    pub fn phi(
        &self,
        t: &CycleType,
        method: Option<Method>,
        constants: Constants,
    ) -> Result<PhiResult> {
        if let Some(m) = method {
            return self.run(m, t);
        }
        if constants == Constants::Prefer {
            if let Ok(r) = self.run(Method::Registry, t) {
                return Ok(r);
            }
        }
        let mut reasons = Vec::new();
        for c in self.plan(t) {
            let cost = match c.estimate {
                Ok(cost) => cost,
                Err(e) => {
                    reasons.push(format!("{}: {e}", c.method));
                    continue;
                }
            };
            self.note(&format!(
                "phi_{}({t}): trying {} (estimated {:.1}s)",
                t.n(),
                c.method,
                cost / 1e9
            ));
            match self.run(c.method, t) {
                Ok(r) => return Ok(r),
                Err(e @ (Error::Capacity { .. } | Error::Infeasible(_))) => {
                    reasons.push(format!("{}: {e}", c.method));
                }
                Err(e) => return Err(e),
            }
        }
        if constants == Constants::Fallback {
            if let Ok(r) = self.run(Method::Registry, t) {
                return Ok(r);
            }
        }
        Err(Error::Infeasible(format!(
            "no method computes phi_{}({t}) within budget; {}",
            t.n(),
            reasons.join("; ")
        )))
    }

    /// Every computing method with its cost estimate, cheapest first; ties keep the
    /// preference order of [`Method::COMPUTED`].
    pub fn plan(&self, t: &CycleType) -> Vec<Candidate> {
        let mut out: Vec<Candidate> = Method::COMPUTED
            .into_iter()
            .filter(|&m| m != Method::Brute)
            .map(|m| Candidate {
                method: m,
                estimate: self.assess(m, t),
            })
            .collect();
        out.sort_by(|a, b| match (&a.estimate, &b.estimate) {
            (Ok(x), Ok(y)) => x.total_cmp(y),
            (Ok(_), Err(_)) => std::cmp::Ordering::Less,
            (Err(_), Ok(_)) => std::cmp::Ordering::Greater,
            (Err(_), Err(_)) => std::cmp::Ordering::Equal,
        });
        out
    }

    fn materialize_cost(&self, p: &VarPerm, size: f64, what: &str) -> Result<f64> {
        if size > self.budget.materialize as f64 {
            return Err(over_budget(what.to_string(), size, self.budget.materialize));
        }
        // building plus one zeta transform per use
        Ok(size * (150.0 + 25.0 * orbit_count(p)))
    }

    /// Cost estimate for running `m` on `t`, or why it cannot run.
    pub fn assess(&self, m: Method, t: &CycleType) -> Result<f64> {
        let n = t.n();
        match m {
            Method::Registry => known_values().phi(t).map(|_| 0.0),
            Method::Brute => {
                if n > 5 {
                    return Err(Error::Infeasible(format!(
                        "brute force needs n ≤ 5, got {n}"
                    )));
                }
                Ok(estimate_size(&CycleType::identity(n)) * 100.0)
            }
            Method::Basic => {
                let steps = 8.0 * estimate_size(t).sqrt() + 100.0;
                if steps > self.budget.ideals as f64 {
                    return Err(Error::Infeasible(format!(
                        "ideal counting for phi_{n}({t}) needs about {steps:.0} recursion steps, over the budget of {}",
                        self.budget.ideals
                    )));
                }
                Ok(steps * 400.0)
            }
            Method::Lift1 | Method::Lift2 => {
                let k = if m == Method::Lift1 { 1 } else { 2 };
                let res = strip_fixed(t, k)
                    .ok_or_else(|| not_applicable(m, t, "not enough fixed variables"))?;
                let s = estimate_size(&res);
                let mut cost = self.materialize_cost(
                    &res.representative(),
                    s,
                    &format!("fixed-point set of {res} on {} variables", res.n()),
                )?;
                if k == 2 {
                    let pairs = s * (s + 1.0) / 2.0;
                    if pairs > self.budget.pairs as f64 {
                        return Err(over_budget(
                            format!("square-map pair loop over {s:.0} functions"),
                            pairs,
                            self.budget.pairs,
                        ));
                    }
                    cost *= 2.0;
                    cost += pairs * 20.0;
                }
                Ok(cost)
            }
            Method::Chain2 | Method::Chain3 => {
                let len = if m == Method::Chain2 { 2 } else { 3 };
                let res = t
                    .without(len)
                    .ok_or_else(|| not_applicable(m, t, &format!("no cycle of length {len}")))?;
                if res.order().gcd(&len) != 1 {
                    return Err(not_applicable(
                        m,
                        t,
                        &format!(
                            "the remaining permutation has order {}, not coprime to {len}",
                            res.order()
                        ),
                    ));
                }
                let cost = self.materialize_cost(
                    &res.representative(),
                    estimate_size(&res),
                    &format!("fixed-point set of {res} on {} variables", res.n()),
                )?;
                Ok(cost * len as f64)
            }
            Method::Involution => {
                let res = t
                    .without(2)
                    .ok_or_else(|| not_applicable(m, t, "no cycle of length 2"))?;
                let rho = res.representative();
                let lattice = self.materialize_cost(
                    &rho,
                    estimate_size(&res),
                    &format!("fixed-point set of {res} on {} variables", res.n()),
                )?;
                let outer = estimate_size(&rho.power(2).cycle_type());
                if outer > self.budget.ideals as f64 {
                    return Err(over_budget(
                        format!(
                            "enumeration of functions fixed by {} on {} variables",
                            rho.power(2),
                            res.n()
                        ),
                        outer,
                        self.budget.ideals,
                    ));
                }
                Ok(2.0 * lattice + outer * 120.0)
            }
            Method::Threecycle => {
                let res = t
                    .without(3)
                    .ok_or_else(|| not_applicable(m, t, "no cycle of length 3"))?;
                let omega = res.representative();
                let lattice = self.materialize_cost(
                    &omega,
                    estimate_size(&res),
                    &format!("fixed-point set of {res} on {} variables", res.n()),
                )?;
                let cube = omega.power(3);
                let outer = self.materialize_cost(
                    &cube,
                    estimate_size(&cube.cycle_type()),
                    &format!("fixed-point set of {cube} on {} variables", res.n()),
                )?;
                Ok(2.0 * lattice + 2.0 * outer)
            }
        }
    }

    /// Runs one method, checking its budget first.
    pub fn run(&self, m: Method, t: &CycleType) -> Result<PhiResult> {
        let n = t.n();
        self.assess(m, t)?;
        let value = match m {
            Method::Registry => known_values().phi(t)?.clone(),
            Method::Brute => self.brute(t)?,
            Method::Basic => self.basic(t)?,
            Method::Lift1 => self.lift(t, 1)?,
            Method::Lift2 => self.lift(t, 2)?,
            Method::Chain2 => self.chain(t, 2)?,
            Method::Chain3 => self.chain(t, 3)?,
            Method::Involution => self.involution(t)?,
            Method::Threecycle => self.threecycle(t)?,
        };
        Ok(PhiResult {
            n,
            cycle_type: t.clone(),
            value,
            method: m,
        })
    }

    fn brute(&self, t: &CycleType) -> Result<BigCount> {
        let p = t.representative();
        let all = generate_all(t.n())?;
        let mut count = 0u64;
        for f in all.iter() {
            if is_fixed(&p, &f)? {
                count += 1;
            }
        }
        Ok(BigUint::from(count))
    }

    fn basic(&self, t: &CycleType) -> Result<BigCount> {
        let op = OrbitPoset::new(&t.representative())?;
        op.poset().count_ideals_bounded(self.budget.ideals)
    }

    fn lift(&self, t: &CycleType, k: usize) -> Result<BigCount> {
        let res = strip_fixed(t, k).expect("assessed");
        let l = self.lattice(&res.representative())?;
        if k == 1 {
            return l.count_chain_maps(2);
        }
        let down = l.down_counts()?;
        let up = l.up_counts()?;
        l.count_square_maps(&down, &up)
    }

    fn chain(&self, t: &CycleType, len: usize) -> Result<BigCount> {
        let res = t.without(len).expect("assessed");
        self.lattice(&res.representative())?
            .count_chain_maps(len + 1)
    }

    // Corners of B^2 in the last two variables: a (00) and d (11) are fixed by ρ,
    // b (01) lies in Φ(ρ²) and c (10) = ρ·b. Summing over b,
    //   #{a ≤ b ∧ ρb} · #{d ≥ b ∨ ρb}.
    fn involution(&self, t: &CycleType) -> Result<BigCount> {
        let rho = t.without(2).expect("assessed").representative();
        let l = self.lattice(&rho)?;
        let down = l.down_counts()?;
        let up = l.up_counts()?;
        let act = Action::new(&rho);
        let term = |b: &[u64], scratch: &mut Vec<u64>, meet: &mut Vec<u64>| -> u128 {
            scratch.clear();
            scratch.extend_from_slice(b);
            act.apply(scratch);
            meet.clear();
            meet.extend(b.iter().zip(scratch.iter()).map(|(x, y)| x & y));
            for (s, x) in scratch.iter_mut().zip(b) {
                *s |= x;
            }
            let lo = l
                .position(meet)
                .expect("meet of a ρ²-fixed function with its image is ρ-fixed");
            let hi = l.position(scratch).expect("join is ρ-fixed");
            down[lo] * up[hi]
        };
        let square = rho.power(2);
        self.note(&format!(
            "involution: summing over functions fixed by {square}"
        ));
        self.sum_over_fixed(&square, |b, scratch, meet| term(b, scratch, meet))
    }

    // Corners of B^3 in the last three variables: a (000) and h (111) are fixed by
    // ω; the weight-one corners are b, ωb, ω²b and the weight-two corners e, ωe, ω²e
    // with b, e ∈ Φ(ω³). Covering relations reduce to a ≤ b∧ωb∧ω²b, e ≥ b∨ωb and
    // h ≥ e∨ωe∨ω²e, so the count is
    //   Σ_b #{a ≤ b∧ωb∧ω²b} · Σ_{e ≥ b∨ωb} #{h ≥ e∨ωe∨ω²e}.
    fn threecycle(&self, t: &CycleType) -> Result<BigCount> {
        let omega = t.without(3).expect("assessed").representative();
        let l = self.lattice(&omega)?;
        let down = l.down_counts()?;
        let up = l.up_counts()?;
        let cube = self.lattice(&omega.power(3))?;
        let act = Action::new(&omega);
        let w = cube.width();
        // z[e] = #{h ≥ e∨ωe∨ω²e}, then summed over everything above each element
        let mut z: Vec<u128> = (0..cube.len())
            .into_par_iter()
            .map_init(
                || vec![0u64; w],
                |orbit_join, i| {
                    let e = cube.set().table(i);
                    orbit_join.copy_from_slice(e);
                    let mut img = e.to_vec();
                    for _ in 0..2 {
                        act.apply(&mut img);
                        for (j, x) in orbit_join.iter_mut().zip(&img) {
                            *j |= x;
                        }
                    }
                    up[l.position(orbit_join).expect("orbit join is ω-fixed")]
                },
            )
            .collect();
        cube.zeta_up(&mut z)?;
        let total = (0..cube.len())
            .into_par_iter()
            .map(|i| {
                let b = cube.set().table(i);
                let mut b1 = b.to_vec();
                act.apply(&mut b1);
                let mut b2 = b1.clone();
                act.apply(&mut b2);
                let meet: Vec<u64> = (0..w).map(|k| b[k] & b1[k] & b2[k]).collect();
                let pair: Vec<u64> = (0..w).map(|k| b[k] | b1[k]).collect();
                let lo = l.position(&meet).expect("orbit meet is ω-fixed");
                let hi = cube.position(&pair).expect("b ∨ ωb is ω³-fixed");
                down[lo].checked_mul(z[hi])
            })
            .try_reduce(|| 0u128, |a, b| a.checked_add(b))
            .ok_or(Error::Overflow("three-cycle sum"))?;
        Ok(narrow(total))
    }

    // Sums `term` over every function fixed by `p`, exactly.
    fn sum_over_fixed(
        &self,
        p: &VarPerm,
        term: impl Fn(&[u64], &mut Vec<u64>, &mut Vec<u64>) -> u128 + Sync,
    ) -> Result<BigCount> {
        let n = p.n();
        if p.is_identity() && n <= MAX_GENERATE {
            let all = match self.memo_get(p) {
                Some(l) => l,
                None => Arc::new(FunctionLattice::from_set(p, self.generate(n)?)?),
            };
            let w = all.width();
            let total = all
                .set()
                .as_words()
                .par_chunks(w)
                .map_init(|| (Vec::new(), Vec::new()), |(s, m), b| term(b, s, m))
                .try_fold(|| 0u128, |acc, x| acc.checked_add(x))
                .try_reduce(|| 0u128, |a, b| a.checked_add(b))
                .ok_or(Error::Overflow("outer sum"))?;
            return Ok(narrow(total));
        }
        let op = OrbitPoset::new(p)?;
        let mut acc = 0u128;
        let mut overflow = false;
        let (mut s, mut m) = (Vec::new(), Vec::new());
        op.for_each_fixed_function(|b| match acc.checked_add(term(b, &mut s, &mut m)) {
            Some(v) => acc = v,
            None => overflow = true,
        });
        if overflow {
            return Err(Error::Overflow("outer sum"));
        }
        Ok(narrow(acc))
    }

    fn generate(&self, n: usize) -> Result<MbfSet> {
        let t = CycleType::identity(n);
        if let Some(cache) = &self.cache {
            if let Some(set) = cache.load(&t)? {
                return Ok(set);
            }
        }
        let set = generate_all(n)?;
        self.store(&t, &set)?;
        Ok(set)
    }

    fn store(&self, t: &CycleType, set: &MbfSet) -> Result<()> {
        if let Some(cache) = &self.cache {
            if set.len() >= CACHE_MIN && !cache.path(t).exists() {
                let path = cache.store(t, set)?;
                self.note(&format!(
                    "cached {} functions in {}",
                    set.len(),
                    path.display()
                ));
            }
        }
        Ok(())
    }

    fn memo_get(&self, p: &VarPerm) -> Option<Arc<FunctionLattice>> {
        self.memo.lock().expect("memo lock").get(p).cloned()
    }

    /// `Φ_n(p)` as a lattice, from memory, the cache, or by enumeration.
    pub fn lattice(&self, p: &VarPerm) -> Result<Arc<FunctionLattice>> {
        if let Some(l) = self.memo_get(p) {
            return Ok(l);
        }
        let t = p.cycle_type();
        let canonical = *p == t.representative();
        let cached = match (&self.cache, canonical) {
            (Some(cache), true) => cache.load(&t)?,
            _ => None,
        };
        let lattice = if let Some(set) = cached {
            FunctionLattice::from_set(p, set)?
        } else if p.is_identity() && p.n() <= MAX_GENERATE {
            FunctionLattice::from_set(p, self.generate(p.n())?)?
        } else {
            self.note(&format!(
                "enumerating functions fixed by {p} on {} variables",
                p.n()
            ));
            let l = FunctionLattice::build(p, self.budget.materialize)?;
            if canonical {
                self.store(&t, l.set())?;
            }
            l
        };
        let lattice = Arc::new(lattice);
        if lattice.len() <= MEMO_LIMIT {
            self.memo
                .lock()
                .expect("memo lock")
                .insert(*p, Arc::clone(&lattice));
        }
        Ok(lattice)
    }

    /// Materializes every function fixed by `p`, within the materialization budget.
    pub fn fixed_point_set(&self, p: &VarPerm) -> Result<FixedPointSet> {
        let set = self.lattice(p)?.set().clone();
        Ok(FixedPointSet { perm: *p, set })
    }

    /// Drops materialized sets kept from earlier calls.
    pub fn forget(&self) {
        self.memo.lock().expect("memo lock").clear();
    }
}

fn checked(p: &VarPerm, m: Method) -> Result<PhiResult> {
    Engine::default().run(m, &p.cycle_type())
}

/// Ideals of the orbit poset.
pub fn phi_basic(p: &VarPerm) -> Result<PhiResult> {
    checked(p, Method::Basic)
}

/// Monotone maps from `B^k` into the fixed set of the permutation restricted to its
/// other variables; needs `k` fixed variables.
pub fn phi_lift(p: &VarPerm, k: usize) -> Result<PhiResult> {
    match k {
        1 => checked(p, Method::Lift1),
        2 => checked(p, Method::Lift2),
        _ => Err(Error::NotApplicable(format!("lifting by {k} variables"))),
    }
}

/// Peels a cycle of length 2 or 3 and counts chains of length 3 or 4.
pub fn phi_chain(p: &VarPerm, len: usize) -> Result<PhiResult> {
    match len {
        2 => checked(p, Method::Chain2),
        3 => checked(p, Method::Chain3),
        _ => Err(Error::NotApplicable(format!(
            "peeling a cycle of length {len}"
        ))),
    }
}

pub fn phi_involution(p: &VarPerm) -> Result<PhiResult> {
    checked(p, Method::Involution)
}

pub fn phi_threecycle(p: &VarPerm) -> Result<PhiResult> {
    checked(p, Method::Threecycle)
}

/// Filters `D_n` for `n ≤ 5`.
pub fn phi_bruteforce(p: &VarPerm) -> Result<PhiResult> {
    checked(p, Method::Brute)
}

/// The cheapest feasible method, without published constants.
pub fn phi(p: &VarPerm) -> Result<PhiResult> {
    Engine::default().phi_perm(p, None, Constants::Forbid)
}

pub fn fixed_point_set(p: &VarPerm) -> Result<FixedPointSet> {
    Engine::default().fixed_point_set(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::burnside::cycle_types;

    fn t(s: &str, n: usize) -> CycleType {
        CycleType::parse(s, n).unwrap()
    }

    #[test]
    fn methods_agree_on_small_cycle_types() {
        let engine = Engine::default();
        for n in 0..=6 {
            for ct in cycle_types(n) {
                let expected = known_values().phi(&ct).unwrap().clone();
                for m in Method::COMPUTED {
                    match engine.run(m, &ct) {
                        Ok(r) => assert_eq!(r.value, expected, "{m} on {ct} (n={n})"),
                        Err(Error::NotApplicable(_)) => {}
                        Err(Error::Infeasible(_)) if m == Method::Brute && n > 5 => {}
                        Err(e) => panic!("{m} on {ct} (n={n}): {e}"),
                    }
                }
            }
        }
    }

    #[test]
    fn chain_peel_needs_coprime_order() {
        let err = Engine::default()
            .run(Method::Chain2, &t("(12)(34)", 6))
            .unwrap_err();
        assert!(matches!(err, Error::NotApplicable(_)));
        assert!(Engine::default()
            .run(Method::Chain3, &t("(12)(345)", 7))
            .is_ok());
    }

    #[test]
    fn lift_needs_fixed_variables() {
        let err = phi_lift(&VarPerm::parse("(123)(4567)", 7).unwrap(), 1).unwrap_err();
        assert!(err.to_string().contains("not enough fixed variables"));
    }

    #[test]
    fn fixed_point_sets_are_closed_lattices() {
        for (s, n, size) in [("(12)", 2, 4), ("(123)(456)", 6, 562), ("(12)(34)", 5, 309)] {
            let fps = fixed_point_set(&VarPerm::parse(s, n).unwrap()).unwrap();
            assert_eq!(fps.len(), size);
            assert!(fps.check_closure(), "{s}");
        }
    }

    #[test]
    fn conjugates_share_phi() {
        let engine = Engine::default();
        let p = VarPerm::parse("(15)(234)", 6).unwrap();
        let r = engine
            .phi_perm(&p, Some(Method::Basic), Constants::Forbid)
            .unwrap();
        assert_eq!(r.value, BigUint::from(490u32));
        assert_eq!(r.cycle_type, t("(12)(345)", 6));
    }

    #[test]
    fn budget_refusals_name_the_resource() {
        let engine = Engine::default();
        let err = engine.run(Method::Basic, &t("(12)", 9)).unwrap_err();
        assert!(matches!(err, Error::Infeasible(ref m) if m.contains("recursion steps")));
        let err = engine.run(Method::Lift2, &t("(12)", 9)).unwrap_err();
        assert!(matches!(err, Error::Capacity { .. }));
        let err = engine
            .phi(&t("(12)", 9), None, Constants::Forbid)
            .unwrap_err();
        assert!(matches!(err, Error::Infeasible(_)));
        let r = engine
            .phi(&t("(12)", 9), None, Constants::Fallback)
            .unwrap();
        assert_eq!(r.method, Method::Registry);
    }

    #[test]
    fn registry_preference() {
        let r = Engine::default()
            .phi(&t("(12)(34)", 5), None, Constants::Prefer)
            .unwrap();
        assert_eq!(
            (r.method, r.value),
            (Method::Registry, BigUint::from(309u32))
        );
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::COMPUTED.into_iter().chain([Method::Registry]) {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("fast".parse::<Method>().is_err());
    }

    // The corner constraints as printed, e ≥ b∨c, f ≥ b∨d, g ≥ c∨d with c = ωb, d = ω²b,
    // f = ωe, g = ω²e, undercount φ_6((123)(456)); requiring e ≥ b∨ωb gives the true 562.
    #[test]
    fn literal_three_cycle_constraints_undercount() {
        let omega = VarPerm::parse("(123)", 3).unwrap();
        let act = Action::new(&omega);
        let d3: Vec<u64> = generate_all(3).unwrap().as_words().to_vec();
        let fixed: Vec<u64> = d3.iter().copied().filter(|&f| act.word(f) == f).collect();
        let le = |a: u64, b: u64| a & !b == 0;
        let (mut literal, mut equivariant) = (0u64, 0u64);
        for &b in &d3 {
            let (c, d) = (act.word(b), act.word(act.word(b)));
            let na = fixed.iter().filter(|&&a| le(a, b)).count() as u64;
            for &e in &d3 {
                let (f, g) = (act.word(e), act.word(act.word(e)));
                let nh = fixed.iter().filter(|&&h| le(e | f | g, h)).count() as u64;
                if le(b | c, e) && le(b | d, f) && le(c | d, g) {
                    literal += na * nh;
                }
                if le(b | c, e) {
                    equivariant += na * nh;
                }
            }
        }
        assert_eq!(literal, 502);
        assert_eq!(equivariant, 562);
        let r = phi_threecycle(&VarPerm::parse("(123)(456)", 6).unwrap()).unwrap();
        assert_eq!(r.value, BigUint::from(562u32));
    }

    // With σ-fixed a, the constraint a ≤ σ(b) follows from a ≤ b.
    #[test]
    fn involution_lower_corner_implication() {
        for (s, n) in [
            ("(12)", 5),
            ("(12)(34)", 5),
            ("", 4),
            ("(123)", 5),
            ("(123)(456)", 6),
        ] {
            let sigma = VarPerm::parse(s, n).unwrap();
            let fixed = fixed_point_set(&sigma).unwrap();
            let sq = fixed_point_set(&sigma.power(2)).unwrap();
            for a in fixed.set().iter() {
                for b in sq.set().iter() {
                    if a.le(&b) {
                        let c = crate::mbf::apply_perm_fn(&sigma, &b).unwrap();
                        assert!(a.le(&c));
                    }
                }
            }
        }
    }
}
