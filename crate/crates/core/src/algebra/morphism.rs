use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::Serialize;

use super::{AlgebraError, FiniteAlgebra};
use crate::exec::{map_range, Exec};
use crate::relation::{Relation, Substitution, Universe};

/// Anything a morphism can land in: another finite algebra, or the full
/// algebra of relations on a set.
pub trait Codomain: Sync {
    type Elem: Clone + PartialEq + Send + Sync + fmt::Debug;

    fn zero(&self, sort: usize) -> Result<Self::Elem, AlgebraError>;
    fn one(&self, sort: usize) -> Result<Self::Elem, AlgebraError>;
    fn meet(&self, sort: usize, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem, AlgebraError>;
    fn join(&self, sort: usize, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem, AlgebraError>;
    fn neg(&self, sort: usize, a: &Self::Elem) -> Result<Self::Elem, AlgebraError>;
    fn subst(&self, alpha: &Substitution, a: &Self::Elem) -> Result<Self::Elem, AlgebraError>;
    fn exists(&self, n: usize, a: &Self::Elem) -> Result<Self::Elem, AlgebraError>;
    fn delta(&self, n: usize, i: usize, j: usize) -> Result<Self::Elem, AlgebraError>;
    fn show(&self, sort: usize, a: &Self::Elem) -> String;

    fn leq(&self, sort: usize, a: &Self::Elem, b: &Self::Elem) -> Result<bool, AlgebraError> {
        Ok(self.meet(sort, a, b)? == *a)
    }
}

impl Codomain for FiniteAlgebra {
    type Elem = usize;

    fn zero(&self, sort: usize) -> Result<usize, AlgebraError> {
        FiniteAlgebra::zero(self, sort)
    }
    fn one(&self, sort: usize) -> Result<usize, AlgebraError> {
        FiniteAlgebra::one(self, sort)
    }
    fn meet(&self, sort: usize, a: &usize, b: &usize) -> Result<usize, AlgebraError> {
        FiniteAlgebra::meet(self, sort, *a, *b)
    }
    fn join(&self, sort: usize, a: &usize, b: &usize) -> Result<usize, AlgebraError> {
        FiniteAlgebra::join(self, sort, *a, *b)
    }
    fn neg(&self, sort: usize, a: &usize) -> Result<usize, AlgebraError> {
        FiniteAlgebra::neg(self, sort, *a)
    }
    fn subst(&self, alpha: &Substitution, a: &usize) -> Result<usize, AlgebraError> {
        FiniteAlgebra::subst(self, alpha, *a)
    }
    fn exists(&self, n: usize, a: &usize) -> Result<usize, AlgebraError> {
        FiniteAlgebra::exists(self, n, *a)
    }
    fn delta(&self, n: usize, i: usize, j: usize) -> Result<usize, AlgebraError> {
        FiniteAlgebra::delta(self, n, i, j)
    }
    fn show(&self, sort: usize, a: &usize) -> String {
        self.describe(sort, *a)
    }
}

/// The algebra of all relations on a set, with no bound on arity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConcreteTarget(pub Universe);

impl Codomain for ConcreteTarget {
    type Elem = Relation;

    fn zero(&self, sort: usize) -> Result<Relation, AlgebraError> {
        Ok(Relation::empty(self.0, sort)?)
    }
    fn one(&self, sort: usize) -> Result<Relation, AlgebraError> {
        Ok(Relation::full(self.0, sort)?)
    }
    fn meet(&self, _: usize, a: &Relation, b: &Relation) -> Result<Relation, AlgebraError> {
        Ok(a.meet(b)?)
    }
    fn join(&self, _: usize, a: &Relation, b: &Relation) -> Result<Relation, AlgebraError> {
        Ok(a.join(b)?)
    }
    fn neg(&self, _: usize, a: &Relation) -> Result<Relation, AlgebraError> {
        Ok(a.complement())
    }
    fn subst(&self, alpha: &Substitution, a: &Relation) -> Result<Relation, AlgebraError> {
        Ok(alpha.apply(a)?)
    }
    fn exists(&self, _: usize, a: &Relation) -> Result<Relation, AlgebraError> {
        Ok(a.exists_last()?)
    }
    fn delta(&self, n: usize, i: usize, j: usize) -> Result<Relation, AlgebraError> {
        Ok(Relation::delta(self.0, n, i, j)?)
    }
    fn show(&self, _: usize, a: &Relation) -> String {
        a.to_string()
    }
    fn leq(&self, _: usize, a: &Relation, b: &Relation) -> Result<bool, AlgebraError> {
        Ok(a.is_subset(b)?)
    }
}

/// A sort-preserving map from sorts `0..images.len()` of a source algebra.
#[derive(Debug, Clone)]
pub struct MorphismMap<C: Codomain> {
    pub target: C,
    pub images: Vec<Vec<C::Elem>>,
}

impl<C: Codomain> MorphismMap<C> {
    pub fn scope(&self) -> usize {
        self.images.len().saturating_sub(1)
    }

    pub fn image(&self, sort: usize, a: usize) -> &C::Elem {
        &self.images[sort][a]
    }

    pub fn is_injective(&self, sort: usize) -> bool {
        kernel(self, sort).is_empty()
    }
}

/// `Strict` demands `φ(∃r) = ∃φ(r)`; `Almost` only `∃φ(r) ⊆ φ(∃r)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MorphismMode {
    Strict,
    Almost,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MorphismViolation {
    pub condition: String,
    pub sort: usize,
    pub elements: Vec<usize>,
    pub lhs: String,
    pub rhs: String,
}

impl fmt::Display for MorphismViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} fails in sort {} at {:?}: {} vs {}",
            self.condition, self.sort, self.elements, self.lhs, self.rhs
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MorphismReport {
    pub mode: MorphismMode,
    pub scope: usize,
    pub checks: usize,
    pub violation: Option<MorphismViolation>,
}

impl MorphismReport {
    pub fn is_ok(&self) -> bool {
        self.violation.is_none()
    }
}

/// Pairs `a < b` of sort `sort` with the same image.
pub fn kernel<C: Codomain>(map: &MorphismMap<C>, sort: usize) -> Vec<(usize, usize)> {
    let images = &map.images[sort];
    let mut out = Vec::new();
    for a in 0..images.len() {
        for b in a + 1..images.len() {
            if images[a] == images[b] {
                out.push((a, b));
            }
        }
    }
    out
}

pub fn identity_map(alg: &FiniteAlgebra, scope: usize) -> Result<MorphismMap<FiniteAlgebra>, AlgebraError> {
    let images = (0..=scope).map(|s| alg.elements(s).map(Iterator::collect)).collect::<Result<_, _>>()?;
    Ok(MorphismMap {
        target: alg.clone(),
        images,
    })
}

/// The projection of a product onto one factor.
pub fn projection_map(
    product: &FiniteAlgebra,
    factor: usize,
    scope: usize,
) -> Result<MorphismMap<FiniteAlgebra>, AlgebraError> {
    let factors = product
        .factors()
        .ok_or_else(|| AlgebraError::Mismatch("not a product".into()))?;
    let target = factors
        .get(factor)
        .ok_or_else(|| AlgebraError::Mismatch(format!("no factor {factor}")))?
        .clone();
    let images = (0..=scope)
        .map(|s| {
            product
                .elements(s)?
                .map(|a| Ok(product.decompose(s, a)?[factor]))
                .collect::<Result<Vec<_>, AlgebraError>>()
        })
        .collect::<Result<_, _>>()?;
    Ok(MorphismMap { target, images })
}

type Check = Result<Option<MorphismViolation>, AlgebraError>;

struct Verifier<'a, C: Codomain> {
    src: &'a FiniteAlgebra,
    map: &'a MorphismMap<C>,
    exec: Exec,
    checks: AtomicUsize,
}

impl<C: Codomain> Verifier<'_, C> {
    fn compare(&self, condition: &str, sort: usize, elements: Vec<usize>, lhs: &C::Elem, rhs: &C::Elem) -> Check {
        Ok((lhs != rhs).then(|| MorphismViolation {
            condition: condition.to_string(),
            sort,
            elements,
            lhs: self.map.target.show(sort, lhs),
            rhs: self.map.target.show(sort, rhs),
        }))
    }

    /// Runs `f` over `0..n`, returning the lowest-index violation.
    fn each(&self, n: usize, f: impl Fn(usize) -> Check + Sync + Send) -> Check {
        self.checks.fetch_add(n, Ordering::Relaxed);
        for found in map_range(self.exec, n, f) {
            if let Some(v) = found? {
                return Ok(Some(v));
            }
        }
        Ok(None)
    }

    fn run(&self, mode: MorphismMode) -> Check {
        let (src, map) = (self.src, self.map);
        let target = &map.target;
        let scope = map.scope();
        let fragment = src.fragment();
        for s in 0..=scope {
            let size = src.size(s)?;
            if map.images[s].len() != size {
                return Err(AlgebraError::Mismatch(format!(
                    "map has {} images in sort {s}, source has {size} elements",
                    map.images[s].len()
                )));
            }
            self.checks.fetch_add(2, Ordering::Relaxed);
            if let Some(v) = self.compare("zero", s, vec![], map.image(s, src.zero(s)?), &target.zero(s)?)? {
                return Ok(Some(v));
            }
            if let Some(v) = self.compare("one", s, vec![], map.image(s, src.one(s)?), &target.one(s)?)? {
                return Ok(Some(v));
            }
            let found = self.each(size, |a| {
                for b in a..size {
                    let (fa, fb) = (map.image(s, a), map.image(s, b));
                    let lhs = map.image(s, src.meet(s, a, b)?);
                    if let Some(v) = self.compare("meet", s, vec![a, b], lhs, &target.meet(s, fa, fb)?)? {
                        return Ok(Some(v));
                    }
                    let lhs = map.image(s, src.join(s, a, b)?);
                    if let Some(v) = self.compare("join", s, vec![a, b], lhs, &target.join(s, fa, fb)?)? {
                        return Ok(Some(v));
                    }
                }
                Ok(None)
            })?;
            if found.is_some() {
                return Ok(found);
            }
            if fragment.has_negation() {
                let found = self.each(size, |a| {
                    let lhs = map.image(s, src.neg(s, a)?);
                    self.compare("negation", s, vec![a], lhs, &target.neg(s, map.image(s, a))?)
                })?;
                if found.is_some() {
                    return Ok(found);
                }
            }
            if fragment.equality {
                for i in 1..=s {
                    for j in 1..=s {
                        self.checks.fetch_add(1, Ordering::Relaxed);
                        let lhs = map.image(s, src.delta(s, i, j)?);
                        let cond = format!("diagonal {s}:{i},{j}");
                        if let Some(v) = self.compare(&cond, s, vec![], lhs, &target.delta(s, i, j)?)? {
                            return Ok(Some(v));
                        }
                    }
                }
            }
        }
        for n in 0..=scope {
            let size = src.size(n)?;
            for k in 0..=scope {
                for alpha in Substitution::all(n, k) {
                    let cond = format!("substitution {alpha}");
                    let found = self.each(size, |a| {
                        let lhs = map.image(k, src.subst(&alpha, a)?);
                        let rhs = target.subst(&alpha, map.image(n, a))?;
                        self.compare(&cond, k, vec![a], lhs, &rhs)
                    })?;
                    if found.is_some() {
                        return Ok(found);
                    }
                }
            }
        }
        if fragment.has_exists() {
            for n in 0..scope {
                let size = src.size(n + 1)?;
                let found = self.each(size, |a| {
                    let lhs = map.image(n, src.exists(n, a)?);
                    let rhs = target.exists(n, map.image(n + 1, a))?;
                    match mode {
                        MorphismMode::Strict => self.compare("projection", n, vec![a], lhs, &rhs),
                        MorphismMode::Almost => Ok((!target.leq(n, &rhs, lhs)?).then(|| MorphismViolation {
                            condition: "projection containment".into(),
                            sort: n,
                            elements: vec![a],
                            lhs: target.show(n, &rhs),
                            rhs: target.show(n, lhs),
                        })),
                    }
                })?;
                if found.is_some() {
                    return Ok(found);
                }
            }
        }
        Ok(None)
    }
}

/// Checks the morphic conditions of `src`'s fragment for `map` on sorts
/// `0..=map.scope()`, stopping at the first failure.
pub fn verify_morphism<C: Codomain>(
    src: &FiniteAlgebra,
    map: &MorphismMap<C>,
    mode: MorphismMode,
    exec: Exec,
) -> Result<MorphismReport, AlgebraError> {
    let verifier = Verifier {
        src,
        map,
        exec,
        checks: AtomicUsize::new(0),
    };
    let violation = verifier.run(mode)?;
    Ok(MorphismReport {
        mode,
        scope: map.scope(),
        checks: verifier.checks.into_inner(),
        violation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fragment::Fragment;

    #[test]
    fn identity_is_a_morphism() {
        for fragment in Fragment::all() {
            let alg = FiniteAlgebra::concrete(Universe::new(2), fragment, 2).unwrap();
            let id = identity_map(&alg, 2).unwrap();
            let report = verify_morphism(&alg, &id, MorphismMode::Strict, Exec::Parallel).unwrap();
            assert!(report.is_ok(), "{fragment}: {:?}", report.violation);
            assert!(id.is_injective(2));
        }
    }

    #[test]
    fn swapped_constants_fail() {
        let alg = FiniteAlgebra::concrete(Universe::new(1), Fragment::PQF, 1).unwrap();
        let mut id = identity_map(&alg, 1).unwrap();
        id.images[0] = vec![1, 0];
        let report = verify_morphism(&alg, &id, MorphismMode::Strict, Exec::Sequential).unwrap();
        assert_eq!(report.violation.unwrap().condition, "zero");
    }

    #[test]
    fn projections_of_a_product() {
        let one = FiniteAlgebra::concrete(Universe::new(1), Fragment::FO, 2).unwrap();
        let two = FiniteAlgebra::concrete(Universe::new(2), Fragment::FO, 2).unwrap();
        let product = FiniteAlgebra::product(vec![one, two]).unwrap();
        for factor in 0..2 {
            let pi = projection_map(&product, factor, 2).unwrap();
            assert!(verify_morphism(&product, &pi, MorphismMode::Strict, Exec::Parallel).unwrap().is_ok());
            assert!(!pi.is_injective(1));
        }
    }
}
