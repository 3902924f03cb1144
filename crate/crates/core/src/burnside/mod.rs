//! Counting equivalence classes with Burnside's lemma:
//! `r_n = (1/n!) Σ μ_t φ_n(t)` over the cycle types `t` of `S_n`.

pub mod registry;
pub mod report;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::fixpoint::{Constants, Engine, Method, PhiResult};
use crate::hypercube::{CycleType, MAX_VARS};
use crate::mbf::{generate_all, MAX_GENERATE};
use crate::BigCount;

pub use registry::{known_values, Kind, KnownValues};
pub use report::{CensusReport, CycleTypeEntry, Source};

/// All cycle types of `S_n`: the identity first, then by number of nontrivial cycles,
/// then by their lengths in lexicographic order.
pub fn cycle_types(n: usize) -> Vec<CycleType> {
    assert!(n <= MAX_VARS, "{n} variables exceeds {MAX_VARS}");
    let mut parts = Vec::new();
    partitions(n, n, &mut Vec::new(), &mut parts);
    let mut types: Vec<(Vec<usize>, CycleType)> = parts
        .into_iter()
        .map(|p| {
            let nontrivial: Vec<usize> = {
                let mut v: Vec<usize> = p.iter().copied().filter(|&l| l > 1).collect();
                v.sort_unstable();
                v
            };
            (nontrivial, CycleType::new(p).expect("partition of n"))
        })
        .collect();
    types.sort_by(|(a, _), (b, _)| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    types.into_iter().map(|(_, t)| t).collect()
}

fn partitions(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if rest == 0 {
        out.push(cur.clone());
        return;
    }
    for part in (1..=rest.min(max)).rev() {
        cur.push(part);
        partitions(rest - part, part, cur, out);
        cur.pop();
    }
}

pub fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// Number of permutations of cycle type `t`: `n! / Π_j j^{m_j} m_j!`.
pub fn multiplicity(t: &CycleType) -> BigCount {
    let mut denom = BigUint::one();
    for j in 1..=t.n() {
        let m = t.count(j);
        denom *= BigUint::from(j).pow(m as u32) * factorial(m);
    }
    factorial(t.n()) / denom
}

/// Which published constants a census may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Policy {
    /// Published values only for entries out of reach at desk scale.
    #[default]
    Quick,
    /// As `quick`, but also computes `φ_9` of (123) and (12)(34)(56)(78).
    Slow,
    /// Computes whatever fits the budget and takes published values for the rest.
    ConstantsAllowed,
}

impl Policy {
    pub fn name(self) -> &'static str {
        match self {
            Policy::Quick => "quick",
            Policy::Slow => "slow",
            Policy::ConstantsAllowed => "constants-allowed",
        }
    }

    /// How the census treats published constants for one entry.
    pub fn constants_for(self, t: &CycleType) -> Constants {
        let n = t.n();
        let nontrivial: Vec<usize> = t.lengths().filter(|&l| l > 1).collect();
        let desk_infeasible = match n {
            8 => nontrivial.is_empty(),
            9 => matches!(
                nontrivial.as_slice(),
                [] | [2] | [3] | [2, 2] | [2, 2, 2] | [2, 2, 2, 2]
            ),
            _ => false,
        };
        match self {
            Policy::ConstantsAllowed => Constants::Fallback,
            Policy::Quick if desk_infeasible => Constants::Prefer,
            Policy::Slow
                if desk_infeasible && !matches!(nontrivial.as_slice(), [3] | [2, 2, 2, 2]) =>
            {
                Constants::Prefer
            }
            _ => Constants::Forbid,
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Policy> {
        [Policy::Quick, Policy::Slow, Policy::ConstantsAllowed]
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Parse {
                input: s.to_string(),
                reason: "expected quick, slow or constants-allowed".into(),
            })
    }
}

/// Applies Burnside's lemma to one `φ` value per cycle type.
///
/// Fails with [`Error::NotDivisible`] when the weighted sum is not a multiple of `n!`,
/// which can only mean a wrong `φ`.
pub fn aggregate(
    n: usize,
    mut phi: impl FnMut(&CycleType) -> Result<PhiResult>,
) -> Result<CensusReport> {
    let mut entries = Vec::new();
    let mut total = BigUint::zero();
    let mut partial_sum = BigUint::zero();
    for t in cycle_types(n) {
        let r = phi(&t)?;
        if r.cycle_type != t {
            return Err(Error::DimensionMismatch {
                expected: t.n(),
                found: r.cycle_type.n(),
            });
        }
        let mu = multiplicity(&t);
        let term = &mu * &r.value;
        total += &term;
        if !t.is_identity() {
            partial_sum += &term;
        }
        entries.push(CycleTypeEntry::new(t, mu, r.value, r.method));
    }
    let nf = factorial(n);
    let (r, rem) = total.div_rem(&nf);
    if !rem.is_zero() {
        return Err(Error::NotDivisible {
            sum: total.to_string(),
            divisor: nf.to_string(),
        });
    }
    Ok(CensusReport {
        n,
        entries,
        partial_sum,
        r,
    })
}

/// Computes every entry allowed by `policy` and aggregates. `on_entry` sees each
/// result as it arrives.
pub fn census(
    engine: &Engine,
    n: usize,
    policy: Policy,
    mut on_entry: impl FnMut(&PhiResult),
) -> Result<CensusReport> {
    aggregate(n, |t| {
        let r = engine.phi(t, None, policy.constants_for(t))?;
        on_entry(&r);
        Ok(r)
    })
}

/// `d_n`, computed: by generation up to six variables, and as square maps into `D_5`
/// for seven.
pub fn dedekind(engine: &Engine, n: usize) -> Result<BigCount> {
    match n {
        0..=MAX_GENERATE => Ok(BigCount::from(generate_all(n)?.len())),
        7 => Ok(engine.run(Method::Lift2, &CycleType::identity(7))?.value),
        _ => Err(Error::Capacity {
            what: format!("D_{n}"),
            count: known_values()
                .d(n)
                .map_or_else(|_| "too many".into(), |d| d.to_string()),
            budget: engine.budget().materialize,
        }),
    }
}

/// Counts inequivalent monotone functions of `n` variables under `policy`.
pub fn r_n(engine: &Engine, n: usize, policy: Policy) -> Result<BigCount> {
    Ok(census(engine, n, policy, |_| {})?.r)
}

/// Result of checking a census against the published tables.
#[derive(Clone, Debug)]
pub struct Verification {
    pub report: CensusReport,
    /// Entries computed and equal to the published value.
    pub matched: usize,
    /// Entries computed and different from the published value.
    pub mismatched: usize,
    /// Entries taken from the registry.
    pub from_registry: usize,
    pub r_matches: bool,
}

impl Verification {
    pub fn ok(&self) -> bool {
        self.mismatched == 0 && self.r_matches
    }
}

/// Recomputes the census allowed by `policy` and compares it with the registry.
pub fn verify(
    engine: &Engine,
    n: usize,
    policy: Policy,
    on_entry: impl FnMut(&PhiResult),
) -> Result<Verification> {
    Ok(check(census(engine, n, policy, on_entry)?))
}

/// Compares a finished report with the registry.
pub fn check(report: CensusReport) -> Verification {
    let mut v = Verification {
        r_matches: known_values().r(report.n).is_ok_and(|r| *r == report.r),
        report,
        matched: 0,
        mismatched: 0,
        from_registry: 0,
    };
    for e in &v.report.entries {
        match (e.source, e.matches_registry()) {
            (Source::Registry, _) => v.from_registry += 1,
            (Source::Computed, Some(true)) => v.matched += 1,
            (Source::Computed, Some(false)) => v.mismatched += 1,
            (Source::Computed, None) => {}
        }
    }
    v
}

pub fn method_source(m: Method) -> Source {
    if m == Method::Registry {
        Source::Registry
    } else {
        Source::Computed
    }
}
