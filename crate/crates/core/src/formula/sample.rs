//! Seeded generators for random signatures, structures and formulas.

use rand::Rng;

use super::fo::{Body, FoFormula};
use super::{Signature, Structure};
use crate::fragment::Fragment;
use crate::relation::{Relation, Universe};

/// One to three symbols `R1, R2, ...` of arity at most `max_arity`.
pub fn signature<R: Rng>(rng: &mut R, max_arity: usize) -> Signature {
    let count = rng.gen_range(1..=3);
    Signature::new((1..=count).map(|i| (format!("R{i}"), rng.gen_range(0..=max_arity))))
        .expect("generated names are distinct")
}

/// Each tuple is included independently with probability one half.
pub fn structure<R: Rng>(rng: &mut R, sig: &Signature, universe: Universe) -> Structure {
    let mut s = Structure::new(universe);
    for (name, arity) in sig.symbols() {
        let mut rel = Relation::empty(universe, *arity).expect("small arity");
        for tuple in universe.tuples(*arity) {
            if rng.gen_bool(0.5) {
                rel.insert(&tuple).expect("tuple in range");
            }
        }
        s.insert(name.clone(), rel).expect("same universe");
    }
    s
}

/// A formula in context `context` whose nesting depth is at most `depth`,
/// using only connectives of `fragment`.
pub fn formula<R: Rng>(rng: &mut R, sig: &Signature, context: usize, depth: usize, fragment: Fragment) -> FoFormula {
    let names = (1..=context).map(|i| format!("x{i}")).collect();
    FoFormula::new(names, body(rng, sig, context, depth, fragment))
}

fn leaf<R: Rng>(rng: &mut R, sig: &Signature, k: usize, fragment: Fragment) -> Body {
    let symbols = sig.symbols();
    let roll = rng.gen_range(0..10);
    if roll == 0 {
        return if rng.gen_bool(0.5) { Body::True } else { Body::False };
    }
    if roll == 1 && fragment.equality && k > 0 {
        return Body::Eq(rng.gen_range(1..=k), rng.gen_range(1..=k));
    }
    let usable: Vec<_> = symbols.iter().filter(|(_, a)| *a == 0 || k > 0).collect();
    let Some((name, arity)) = usable.get(rng.gen_range(0..usable.len().max(1))) else {
        return Body::True;
    };
    let args = (0..*arity).map(|_| rng.gen_range(1..=k)).collect();
    Body::Atom(name.clone(), args)
}

fn body<R: Rng>(rng: &mut R, sig: &Signature, k: usize, depth: usize, fragment: Fragment) -> Body {
    if depth == 0 || rng.gen_range(0..4) == 0 {
        return leaf(rng, sig, k, fragment);
    }
    let mut choices = vec![0, 1];
    if fragment.has_negation() {
        choices.push(2);
    }
    if fragment.has_exists() {
        choices.push(3);
        if k > 0 {
            choices.push(4);
        }
    }
    match choices[rng.gen_range(0..choices.len())] {
        0 => Body::And(
            Box::new(body(rng, sig, k, depth - 1, fragment)),
            Box::new(body(rng, sig, k, depth - 1, fragment)),
        ),
        1 => Body::Or(
            Box::new(body(rng, sig, k, depth - 1, fragment)),
            Box::new(body(rng, sig, k, depth - 1, fragment)),
        ),
        2 => Body::Not(Box::new(body(rng, sig, k, depth - 1, fragment))),
        3 => Body::Exists(Box::new(body(rng, sig, k + 1, depth - 1, fragment))),
        _ => Body::ExistsAt(
            rng.gen_range(1..=k),
            Box::new(body(rng, sig, k, depth - 1, fragment)),
        ),
    }
}
