//! Published values: Dedekind numbers, class counts, and fixed-point counts for every
//! cycle type with n ≤ 9, kept as decimal strings and parsed on first use.

use std::collections::HashMap;
use std::sync::OnceLock;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::hypercube::CycleType;

const D: [&str; 10] = [
    "2",
    "3",
    "6",
    "20",
    "168",
    "7581",
    "7828354",
    "2414682040998",
    "56130437228687557907788",
    "286386577668298411128469151667598498812366",
];

const R: [&str; 10] = [
    "2",
    "3",
    "5",
    "10",
    "30",
    "210",
    "16353",
    "490013148",
    "1392195548889993358",
    "789204635842035040527740846300252680",
];

/// Stated value of the sum of μ·φ over the non-identity cycle types of S_9.
pub const PARTIAL_SUM_9: &str = "586059264378237446637837193706034";

// n, a permutation of the cycle type, μ, φ. Identity rows carry d_n.
// The two order-5 rows of n = 5 are labelled by their multiplicities: a 5-cycle has
// 24 conjugates and (12)(34) has 15.
const PHI: &str = "\
2 (1) 1 6
2 (12) 1 4
3 (1) 1 20
3 (12) 3 10
3 (123) 2 5
4 (1) 1 168
4 (12) 6 50
4 (123) 8 15
4 (1234) 6 8
4 (12)(34) 3 28
5 (1) 1 7581
5 (12) 10 887
5 (123) 20 105
5 (1234) 30 35
5 (12)(34) 15 309
5 (12345) 24 11
5 (12)(345) 20 35
6 (1) 1 7828354
6 (12) 15 160948
6 (123) 40 3490
6 (1234) 90 494
6 (12345) 144 64
6 (123456) 120 44
6 (12)(34) 45 24302
6 (12)(345) 120 490
6 (12)(3456) 90 324
6 (123)(456) 40 562
6 (12)(34)(56) 15 8600
7 (1) 1 2414682040998
7 (12) 21 2208001624
7 (123) 70 2068224
7 (1234) 210 60312
7 (12345) 504 1548
7 (123456) 840 766
7 (1234567) 720 101
7 (12)(34) 105 67922470
7 (12)(345) 420 59542
7 (12)(3456) 630 26878
7 (12)(34567) 504 264
7 (123)(456) 280 69264
7 (123)(4567) 420 294
7 (12)(34)(56) 105 12015832
7 (12)(34)(567) 210 10192
8 (1) 1 56130437228687557907788
8 (12) 28 101627867809333596
8 (123) 112 262808891710
8 (1234) 420 424234996
8 (12345) 1344 531708
8 (123456) 3360 144320
8 (1234567) 5760 3858
8 (12345678) 5040 2364
8 (12)(34) 210 182755441509724
8 (12)(345) 1120 401622018
8 (12)(3456) 2520 93994196
8 (12)(34567) 4032 21216
8 (12)(345678) 3360 70096
8 (123)(456) 1120 535426780
8 (123)(4567) 3360 25168
8 (123)(45678) 2688 870
8 (1234)(5678) 1260 3211276
8 (12)(34)(56) 420 7377670895900
8 (12)(34)(567) 1680 16380370
8 (12)(34)(5678) 1260 37834164
8 (12)(345)(678) 1120 3607596
8 (12)(34)(56)(78) 105 2038188253420
9 (12) 36 16278282012194909428324143293364
9 (123) 168 868329572680304346696
9 (1234) 756 5293103318608452
9 (12345) 3024 26258306096
9 (123456) 10080 2279384919
9 (1234567) 25920 3268698
9 (12345678) 45360 1144094
9 (123456789) 40320 97830
9 (12)(34) 378 107622766375525877620879430
9 (12)(345) 2520 5166662396125146
9 (12)(3456) 7560 323787762940974
9 (12)(34567) 18144 70165054
9 (12)(345678) 30240 547120947
9 (12)(3456789) 25920 80720
9 (123)(456) 3360 7107360458115201
9 (123)(4567) 15120 92605092
9 (123)(45678) 24192 197576
9 (123)(456789) 20160 218542866
9 (123)(456)(789) 2240 221557843276152
9 (1234)(5678) 11340 503500313130
9 (1234)(56789) 18144 10182
9 (12)(34)(56) 1260 328719964864138799170044
9 (12)(34)(567) 7560 14037774553676
9 (12)(34)(5678) 11340 66031909836340
9 (12)(34)(56789) 9072 3710840
9 (12)(345)(678) 10080 866494196253
9 (12)(345)(6789) 15120 22062570
9 (12)(34)(56)(78) 945 17143334331688770356814
9 (12)(34)(56)(789) 2520 807900672006
";

/// Which table a known value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    D,
    R,
    Phi,
}

/// A published row: multiplicity and fixed-point count of one cycle type.
#[derive(Clone, Debug)]
pub struct KnownRow {
    pub mu: BigUint,
    pub phi: BigUint,
}

/// The embedded tables, parsed once.
#[derive(Debug)]
pub struct KnownValues {
    d: Vec<BigUint>,
    r: Vec<BigUint>,
    phi: HashMap<CycleType, KnownRow>,
    partial_sum_9: BigUint,
}

fn parse(s: &str) -> BigUint {
    s.parse().expect("registry constants are decimal")
}

impl KnownValues {
    fn load() -> KnownValues {
        let mut phi = HashMap::new();
        for line in PHI.lines() {
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [n, notation, mu, value] = fields[..] else {
                panic!("malformed registry row {line:?}");
            };
            let n: usize = n.parse().expect("arity");
            let t = CycleType::parse(notation, n).expect("registry notation");
            let row = KnownRow {
                mu: parse(mu),
                phi: parse(value),
            };
            assert!(
                phi.insert(t, row).is_none(),
                "duplicate registry row {line:?}"
            );
        }
        KnownValues {
            d: D.iter().map(|s| parse(s)).collect(),
            r: R.iter().map(|s| parse(s)).collect(),
            phi,
            partial_sum_9: parse(PARTIAL_SUM_9),
        }
    }

    /// Dedekind number `d_n`.
    pub fn d(&self, n: usize) -> Result<&BigUint> {
        self.d
            .get(n)
            .ok_or_else(|| Error::MissingKey(format!("d_{n}")))
    }

    /// Number of inequivalent monotone functions `r_n`.
    pub fn r(&self, n: usize) -> Result<&BigUint> {
        self.r
            .get(n)
            .ok_or_else(|| Error::MissingKey(format!("r_{n}")))
    }

    /// `φ_n` of a cycle type; the identity gives `d_n`.
    pub fn phi(&self, t: &CycleType) -> Result<&BigUint> {
        if let Some(row) = self.phi.get(t) {
            return Ok(&row.phi);
        }
        if t.is_identity() {
            return self.d(t.n());
        }
        Err(Error::MissingKey(format!("phi_{}({})", t.n(), t)))
    }

    /// The published row of a cycle type, when its table lists it.
    pub fn row(&self, t: &CycleType) -> Option<&KnownRow> {
        self.phi.get(t)
    }

    pub fn partial_sum_9(&self) -> &BigUint {
        &self.partial_sum_9
    }

    pub fn value(&self, kind: Kind, n: usize, t: Option<&CycleType>) -> Result<&BigUint> {
        match kind {
            Kind::D => self.d(n),
            Kind::R => self.r(n),
            Kind::Phi => {
                let t = t.ok_or_else(|| Error::MissingKey("phi without cycle type".into()))?;
                if t.n() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: t.n(),
                    });
                }
                self.phi(t)
            }
        }
    }
}

pub fn known_values() -> &'static KnownValues {
    static REGISTRY: OnceLock<KnownValues> = OnceLock::new();
    REGISTRY.get_or_init(KnownValues::load)
}
