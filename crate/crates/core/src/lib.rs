//! Exact counts of monotone Boolean functions fixed by permutations of their
//! variables, and of the equivalence classes of monotone functions of up to nine
//! variables.

pub mod burnside;
pub mod cache;
pub mod error;
pub mod fixpoint;
pub mod hypercube;
pub mod lattice;
pub mod mbf;
pub mod mbfs;
pub mod poset;

pub use burnside::{
    aggregate, census, cycle_types, dedekind, known_values, multiplicity, verify, CensusReport,
    CycleTypeEntry, Policy, Source, Verification,
};
pub use cache::Cache;
pub use error::{Error, Result};
pub use fixpoint::{Budget, Constants, Engine, FixedPointSet, Method, PhiResult};
pub use hypercube::{CycleType, OrbitPartition, Point, VarPerm};
pub use mbf::{EquivClassRep, Mbf, MbfSet};
pub use poset::{OrbitPoset, Poset};

/// Exact counts that outgrow machine integers.
pub type BigCount = num_bigint::BigUint;

pub(crate) fn serialize_decimal<S: serde::Serializer>(
    v: &BigCount,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}
