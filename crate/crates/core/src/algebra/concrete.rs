//! Operations of the algebra of all relations on a finite set, with each
//! relation of sort `n` stored as a `u64` mask over the `|W|^n` tuple indices.

use crate::relation::{Relation, Substitution, Universe};

pub(crate) fn full(tuples: usize) -> u64 {
    if tuples == 64 {
        u64::MAX
    } else {
        (1u64 << tuples) - 1
    }
}

pub(crate) fn subst(w: Universe, alpha: &Substitution, a: u64) -> u64 {
    let size = w.size();
    let (n, k) = (alpha.dom(), alpha.cod());
    let count = w.tuple_count(k).expect("bounded by caller");
    let mut digits = vec![0usize; k];
    let mut out = 0u64;
    for x in 0..count {
        let mut rest = x;
        for d in digits.iter_mut().rev() {
            *d = rest % size;
            rest /= size;
        }
        let mut image = 0usize;
        for l in 0..n {
            image = image * size + digits[alpha.map()[l] - 1];
        }
        if a >> image & 1 == 1 {
            out |= 1 << x;
        }
    }
    out
}

/// `a` has sort `n + 1`; the result has sort `n`.
pub(crate) fn exists(w: Universe, n: usize, a: u64) -> u64 {
    let size = w.size();
    let count = w.tuple_count(n).expect("bounded by caller");
    if size == 0 {
        return 0;
    }
    let block = full(size);
    let mut out = 0u64;
    for x in 0..count {
        if a >> (x * size) & block != 0 {
            out |= 1 << x;
        }
    }
    out
}

pub(crate) fn delta(w: Universe, n: usize, i: usize, j: usize) -> u64 {
    let mut out = 0u64;
    for (x, tuple) in w.tuples(n).enumerate() {
        if tuple[i - 1] == tuple[j - 1] {
            out |= 1 << x;
        }
    }
    out
}

pub(crate) fn describe(w: Universe, sort: usize, a: u64) -> String {
    let rel = Relation::from_mask(w, sort, a).expect("bounded by caller");
    let text = rel.to_string();
    match text.find('{') {
        Some(at) => text[at..].to_string(),
        None => text,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn masks_agree_with_relations() {
        let w = Universe::new(2);
        for n in 0..=2usize {
            for k in 0..=2usize {
                for alpha in Substitution::all(n, k) {
                    for a in 0..(1u64 << w.tuple_count(n).unwrap()) {
                        let rel = Relation::from_mask(w, n, a).unwrap();
                        let expected = alpha.apply(&rel).unwrap().to_mask().unwrap();
                        assert_eq!(subst(w, &alpha, a), expected, "{alpha} {a}");
                    }
                }
            }
        }
        for n in 0..=1usize {
            for a in 0..(1u64 << w.tuple_count(n + 1).unwrap()) {
                let rel = Relation::from_mask(w, n + 1, a).unwrap();
                assert_eq!(exists(w, n, a), rel.exists_last().unwrap().to_mask().unwrap());
            }
        }
        assert_eq!(delta(w, 2, 1, 2), Relation::delta(w, 2, 1, 2).unwrap().to_mask().unwrap());
    }

    #[test]
    fn empty_universe() {
        let w = Universe::new(0);
        assert_eq!(w.tuple_count(0).unwrap(), 1);
        assert_eq!(w.tuple_count(2).unwrap(), 0);
        assert_eq!(exists(w, 0, 0), 0);
        let c = Substitution::assoc_cylindrification(0);
        assert_eq!(subst(w, &c, 1), 0);
    }
}
