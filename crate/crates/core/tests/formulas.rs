use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use foalg::formula::{compile, eval, eval_fo_naive, parse_term, sample, FoFormula, Signature, Structure, Term};
use foalg::{Fragment, Universe};

struct Case {
    structure: Structure,
    sig: Signature,
    fragment: Fragment,
    f: FoFormula,
    g: FoFormula,
}

fn case(seed: u64) -> Case {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sig = sample::signature(&mut rng, 3);
    let w = Universe::new(rng.gen_range(0..=3));
    let structure = sample::structure(&mut rng, &sig, w);
    let fragments = Fragment::all();
    let fragment = fragments[rng.gen_range(0..fragments.len())];
    let context = rng.gen_range(0..=3);
    let f = sample::formula(&mut rng, &sig, context, 4, fragment);
    let g = sample::formula(&mut rng, &sig, context, 3, fragment);
    Case {
        structure,
        sig,
        fragment,
        f,
        g,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn compiled_matches_naive(seed in any::<u64>()) {
        let c = case(seed);
        let t = compile(&c.f, &c.sig, c.fragment).unwrap();
        prop_assert_eq!(eval(&t, &c.structure).unwrap(), eval_fo_naive(&c.f, &c.structure).unwrap());
    }

    #[test]
    fn value_arity_is_term_sort(seed in any::<u64>()) {
        let c = case(seed);
        let t = compile(&c.f, &c.sig, c.fragment).unwrap();
        prop_assert_eq!(t.sort(), c.f.arity());
        prop_assert_eq!(eval(&t, &c.structure).unwrap().arity(), t.sort());
        prop_assert!(t.fragment().is_subfragment_of(c.fragment));
    }

    #[test]
    fn printed_terms_parse_back(seed in any::<u64>()) {
        let c = case(seed);
        let t = compile(&c.f, &c.sig, c.fragment).unwrap();
        prop_assert_eq!(parse_term(&t.to_string(), &c.sig).unwrap(), t);
    }

    #[test]
    fn de_morgan_in_the_image(seed in any::<u64>()) {
        let c = case(seed);
        let t = compile(&c.f, &c.sig, Fragment::FO_EQ).unwrap();
        let u = compile(&c.g, &c.sig, Fragment::FO_EQ).unwrap();
        let lhs = Term::not(Term::and(t.clone(), u.clone()).unwrap());
        let rhs = Term::or(Term::not(t), Term::not(u)).unwrap();
        prop_assert_eq!(eval(&lhs, &c.structure).unwrap(), eval(&rhs, &c.structure).unwrap());
    }
}
