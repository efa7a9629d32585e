use std::collections::BTreeSet;

use proptest::prelude::*;

use foalg::algebra::{kernel, FiniteAlgebra};
use foalg::lattice::prime_filters;
use foalg::representation::{embed, filter_to_morphism, saturate};
use foalg::{Fragment, Universe};

fn fragment() -> impl Strategy<Value = Fragment> {
    proptest::sample::select(Fragment::all())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn filter_models_are_verified(w in 0..=2usize, fragment in fragment(), sort in 0..=2usize, pick in any::<u64>()) {
        let alg = FiniteAlgebra::concrete(Universe::new(w), fragment, 2).unwrap();
        let all = prime_filters(&alg, sort).unwrap();
        prop_assume!(!all.is_empty());
        let f = &all[pick as usize % all.len()];
        let model = filter_to_morphism(&alg, f, fragment, 2).unwrap();
        prop_assert!(model.is_verified(), "{:?}", model.report());
        prop_assert!(model.universe().size() <= sort);
    }

    #[test]
    fn anonymized_tables_embed_identically(seed in any::<u64>(), qf in any::<bool>()) {
        let fragment = if qf { Fragment::QF } else { Fragment::PQF };
        let tables = FiniteAlgebra::concrete(Universe::new(1), fragment, 2)
            .unwrap()
            .tabulate(Some(seed), true)
            .unwrap();
        let a = embed(&tables, fragment, 2).unwrap();
        let b = embed(&tables, fragment, 2).unwrap();
        prop_assert!(a.is_full());
        prop_assert_eq!(a.listing(&tables), b.listing(&tables));
        for sort in 0..=2 {
            prop_assert!(a.model.map().is_injective(sort));
        }
    }

    #[test]
    fn saturation_keeps_old_kernels(fo in any::<bool>(), sort in 0..=1usize, pick in any::<u64>()) {
        let fragment = if fo { Fragment::FO } else { Fragment::PE };
        let alg = FiniteAlgebra::concrete(Universe::new(1), fragment, 2).unwrap();
        let all = prime_filters(&alg, sort).unwrap();
        let start = filter_to_morphism(&alg, &all[pick as usize % all.len()], fragment, 2).unwrap();
        let done = saturate(&alg, &start, 5).unwrap();
        prop_assert!(done.model.is_verified());
        for s in 0..=2 {
            let after: BTreeSet<_> = kernel(done.model.map(), s).into_iter().collect();
            let before: BTreeSet<_> = kernel(start.map(), s).into_iter().collect();
            prop_assert!(after.is_subset(&before));
        }
        let again = saturate(&alg, &start, 5).unwrap();
        prop_assert_eq!(done.transcript, again.transcript);
        prop_assert_eq!(done.status, again.status);
    }
}
