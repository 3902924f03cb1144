use std::path::Path;

use monotone_core::mbf::{apply_perm_fn, canonical_form, generate_all, is_fixed, unpack};
use monotone_core::mbfs;
use monotone_core::{Mbf, MbfSet, Poset, VarPerm};
use num_bigint::BigUint;
use proptest::prelude::*;
use proptest::sample::subsequence;

/// Random relations along index order, closed transitively.
fn poset_strategy(max: usize) -> impl Strategy<Value = Poset> {
    (0..=max).prop_flat_map(|size| {
        proptest::collection::vec(any::<bool>(), size * size).prop_map(move |bits| {
            let mut leq = vec![vec![false; size]; size];
            for a in 0..size {
                leq[a][a] = true;
                for b in a + 1..size {
                    leq[a][b] = bits[a * size + b];
                }
            }
            for k in 0..size {
                for a in 0..size {
                    for b in 0..size {
                        leq[a][b] |= leq[a][k] && leq[k][b];
                    }
                }
            }
            Poset::build(size, |a, b| leq[a][b]).unwrap()
        })
    })
}

fn perm_strategy(n: usize) -> impl Strategy<Value = VarPerm> {
    Just((0..n).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(|map| VarPerm::from_map(&map).unwrap())
}

fn d4() -> &'static MbfSet {
    static D4: std::sync::OnceLock<MbfSet> = std::sync::OnceLock::new();
    D4.get_or_init(|| generate_all(4).unwrap())
}

fn mbf4() -> impl Strategy<Value = Mbf> {
    (0..d4().len()).prop_map(|i| d4().get(i))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn ideal_stream_length_matches_count(p in poset_strategy(14)) {
        let streamed = p.ideals().count();
        prop_assert_eq!(BigUint::from(streamed), p.count_ideals());
    }

    #[test]
    fn dual_has_as_many_ideals(p in poset_strategy(16)) {
        prop_assert_eq!(p.dual().count_ideals(), p.count_ideals());
    }

    #[test]
    fn ideals_multiply_over_disjoint_sums(p in poset_strategy(10), q in poset_strategy(10)) {
        let sum = p.disjoint_sum(&q).unwrap();
        prop_assert_eq!(sum.count_ideals(), p.count_ideals() * q.count_ideals());
    }

    #[test]
    fn two_chain_maps_are_comparable_pairs(p in poset_strategy(12)) {
        prop_assert_eq!(p.count_maps_from_chain(2), BigUint::from(p.comparable_pairs()));
    }

    #[test]
    fn bounded_count_matches_unbounded(p in poset_strategy(12)) {
        prop_assert_eq!(p.count_ideals_bounded(u64::MAX).unwrap(), p.count_ideals());
    }

    #[test]
    fn permutation_powers_and_conjugates(p in perm_strategy(9), s in perm_strategy(9)) {
        prop_assert!(p.power(p.order()).is_identity());
        prop_assert_eq!(p.conjugate(&s).unwrap().cycle_type(), p.cycle_type());
        prop_assert_eq!(p.inverse().cycle_type(), p.cycle_type());
    }

    #[test]
    fn renaming_preserves_monotonicity_and_class(f in mbf4(), p in perm_strategy(4)) {
        let g = apply_perm_fn(&p, &f).unwrap();
        prop_assert!(d4().contains(&g));
        prop_assert_eq!(g.count_ones(), f.count_ones());
        prop_assert_eq!(canonical_form(&g), canonical_form(&f));
        prop_assert!(unpack(&f).contains(&g));
    }

    #[test]
    fn fixed_functions_are_closed_under_meet_and_join(
        f in mbf4(), g in mbf4(), p in perm_strategy(4)
    ) {
        if is_fixed(&p, &f).unwrap() && is_fixed(&p, &g).unwrap() {
            prop_assert!(is_fixed(&p, &f.meet(&g)).unwrap());
            prop_assert!(is_fixed(&p, &f.join(&g)).unwrap());
        }
        prop_assert!(f.meet(&g).le(&f) && f.le(&f.join(&g)));
    }

    #[test]
    fn mbfs_round_trips(picks in subsequence((0..168).collect::<Vec<usize>>(), 0..=168)) {
        let set = MbfSet::from_functions(4, picks.iter().map(|&i| d4().get(i)));
        let mut bytes = Vec::new();
        mbfs::write_to(&set, &mut bytes).unwrap();
        let back = mbfs::read_from(&mut bytes.as_slice(), Path::new("memory")).unwrap();
        prop_assert_eq!(back, set);
    }
}
