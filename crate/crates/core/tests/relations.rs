use proptest::prelude::*;

use foalg::relation::Relation;
use foalg::{Substitution, Universe};

fn relation(max_w: usize, max_arity: usize) -> impl Strategy<Value = Relation> {
    (0..=max_w, 0..=max_arity).prop_flat_map(|(w, arity)| {
        let count = Universe::new(w).tuple_count(arity).unwrap();
        let top = if count >= 64 { u64::MAX } else { (1u64 << count) - 1 };
        (0..=top).prop_map(move |mask| Relation::from_mask(Universe::new(w), arity, mask & top).unwrap())
    })
}

fn same_shape(r: &Relation, mask: u64) -> Relation {
    let count = r.universe().tuple_count(r.arity()).unwrap();
    let top = if count >= 64 { u64::MAX } else { (1u64 << count) - 1 };
    Relation::from_mask(r.universe(), r.arity(), mask & top).unwrap()
}

fn substitution(dom: usize, cod: usize) -> impl Strategy<Value = Substitution> {
    if cod == 0 {
        return Just(Substitution::new(vec![], 0).unwrap()).boxed();
    }
    proptest::collection::vec(1..=cod, dom)
        .prop_map(move |map| Substitution::new(map, cod).unwrap())
        .boxed()
}

fn chain() -> impl Strategy<Value = (Relation, Substitution, Substitution)> {
    relation(3, 3).prop_flat_map(|r| {
        let n = r.arity();
        (usize::from(n > 0)..=3).prop_flat_map(move |m| {
            let r = r.clone();
            (usize::from(m > 0)..=3).prop_flat_map(move |k| (Just(r.clone()), substitution(m, k), substitution(n, m)))
        })
    })
}

proptest! {
    #[test]
    fn composition_acts_in_sequence((r, beta, alpha) in chain()) {
        let composite = beta.compose(&alpha).unwrap();
        prop_assert_eq!(composite.apply(&r).unwrap(), beta.apply(&alpha.apply(&r).unwrap()).unwrap());
    }

    #[test]
    fn substitutions_preserve_boolean_structure(
        r in relation(2, 3),
        mask in any::<u64>(),
        cod in 0..=3usize,
        seed in any::<u64>(),
    ) {
        let s = same_shape(&r, mask);
        let n = r.arity();
        prop_assume!(n == 0 || cod > 0);
        let map = (0..n).map(|i| 1 + (seed >> (2 * i)) as usize % cod.max(1)).collect();
        let alpha = Substitution::new(map, cod).unwrap();
        let (w, k) = (r.universe(), cod);
        prop_assert_eq!(alpha.apply(&Relation::empty(w, n).unwrap()).unwrap(), Relation::empty(w, k).unwrap());
        prop_assert_eq!(alpha.apply(&Relation::full(w, n).unwrap()).unwrap(), Relation::full(w, k).unwrap());
        prop_assert_eq!(
            alpha.apply(&r.meet(&s).unwrap()).unwrap(),
            alpha.apply(&r).unwrap().meet(&alpha.apply(&s).unwrap()).unwrap()
        );
        prop_assert_eq!(
            alpha.apply(&r.join(&s).unwrap()).unwrap(),
            alpha.apply(&r).unwrap().join(&alpha.apply(&s).unwrap()).unwrap()
        );
        prop_assert_eq!(alpha.apply(&r.complement()).unwrap(), alpha.apply(&r).unwrap().complement());
    }

    #[test]
    fn projection_laws(r in relation(2, 3), mask in any::<u64>(), lower in any::<u64>()) {
        prop_assume!(r.arity() > 0);
        let n = r.arity() - 1;
        let s = same_shape(&r, mask);
        let w = r.universe();
        let c = Substitution::assoc_cylindrification(n);
        prop_assert_eq!(Relation::empty(w, n + 1).unwrap().exists_last().unwrap(), Relation::empty(w, n).unwrap());
        prop_assert_eq!(
            r.join(&s).unwrap().exists_last().unwrap(),
            r.exists_last().unwrap().join(&s.exists_last().unwrap()).unwrap()
        );
        prop_assert!(r.is_subset(&c.apply(&r.exists_last().unwrap()).unwrap()).unwrap());
        let t = same_shape(&Relation::empty(w, n).unwrap(), lower);
        prop_assert_eq!(
            r.meet(&c.apply(&t).unwrap()).unwrap().exists_last().unwrap(),
            r.exists_last().unwrap().meet(&t).unwrap()
        );
    }

    #[test]
    fn operations_are_deterministic(r in relation(3, 3), mask in any::<u64>()) {
        let s = same_shape(&r, mask);
        prop_assert_eq!(r.meet(&s).unwrap(), r.meet(&s).unwrap());
        prop_assert_eq!(r.to_string(), r.clone().to_string());
        prop_assert_eq!(r.complement().complement(), r);
    }
}
