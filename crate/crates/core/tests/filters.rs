use proptest::prelude::*;

use foalg::algebra::FiniteAlgebra;
use foalg::lattice::{
    extend_to_prime, is_prime_filter, join_irreducibles, prime_filters, project_filter, pullback_filter, sum_filters,
    Verify,
};
use foalg::{Fragment, Substitution, Universe};

fn concrete(w: usize, fragment: Fragment, max_sort: usize) -> FiniteAlgebra {
    FiniteAlgebra::concrete(Universe::new(w), fragment, max_sort).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn elements_are_joins_of_irreducibles_below(w in 0..=2usize, sort in 0..=2usize) {
        let alg = concrete(w, Fragment::QF, 2);
        let jis = join_irreducibles(&alg, sort).unwrap();
        for x in alg.elements(sort).unwrap() {
            let below = jis.iter().filter(|&&j| alg.leq(sort, j, x).unwrap());
            let join = below.fold(alg.zero(sort).unwrap(), |acc, &j| alg.join(sort, acc, j).unwrap());
            prop_assert_eq!(join, x);
        }
        for f in prime_filters(&alg, sort).unwrap() {
            prop_assert!(is_prime_filter(&alg, sort, f.members()).unwrap());
        }
    }

    #[test]
    fn extension_contains_filter_and_misses_ideal(
        w in 1..=2usize,
        sort in 0..=3usize,
        g in any::<u64>(),
        m in any::<u64>(),
    ) {
        let alg = concrete(w, Fragment::PQF, 3);
        let size = alg.size(sort).unwrap();
        let (g, m) = (g as usize % size, m as usize % size);
        match extend_to_prime(&alg, sort, g, m, Verify::On) {
            Ok(f) => {
                prop_assert!(f.contains(g));
                prop_assert!(!f.contains(m));
                for x in alg.elements(sort).unwrap() {
                    if alg.leq(sort, x, m).unwrap() {
                        prop_assert!(!f.contains(x));
                    }
                }
            }
            Err(_) => prop_assert!(alg.leq(sort, g, m).unwrap()),
        }
    }

    #[test]
    fn sums_decompose_blockwise(picks in proptest::collection::vec((1..=2usize, any::<u64>()), 1..=3)) {
        let total: usize = picks.iter().map(|p| p.0).sum();
        prop_assume!(total <= 4);
        let alg = concrete(2, Fragment::PQF, 4);
        let filters: Vec<_> = picks
            .iter()
            .map(|&(sort, pick)| {
                let all = prime_filters(&alg, sort).unwrap();
                all[pick as usize % all.len()].clone()
            })
            .collect();
        let g = sum_filters(&alg, &filters, Verify::On).unwrap();
        let blocks: Vec<usize> = picks.iter().map(|p| p.0).collect();
        for (c, f) in Substitution::partitioning(&blocks).iter().zip(&filters) {
            for r in alg.elements(f.sort()).unwrap() {
                prop_assert_eq!(g.contains(alg.subst(c, r).unwrap()), f.contains(r));
            }
        }
    }

    #[test]
    fn projection_then_pullback_recovers_filter(w in 1..=2usize, n in 0..=1usize, pick in any::<u64>(), r in any::<u64>()) {
        let alg = concrete(w, Fragment::PE, 2);
        let all = prime_filters(&alg, n).unwrap();
        let f = &all[pick as usize % all.len()];
        let size = alg.size(n + 1).unwrap();
        let r = r as usize % size;
        let witnessed = alg.exists(n, r).unwrap();
        match project_filter(&alg, f, r, Verify::On) {
            Ok(g) => {
                prop_assert!(g.contains(r));
                let back = pullback_filter(&alg, &g).unwrap();
                prop_assert_eq!(back.members(), f.members());
            }
            Err(_) => prop_assert!(!f.contains(witnessed)),
        }
    }
}
