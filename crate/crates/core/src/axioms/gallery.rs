//! Two algebras that satisfy the equational axioms but fail axiom (0).

use super::{check_axiom, check_fragment, render_axiom0, replay, AxiomId, Bounds, CheckError, CheckReport, FragmentReport, SchemaInstance, Shape, Violation};
use crate::algebra::{AlgebraError, FiniteAlgebra};
use crate::fragment::Fragment;
use crate::relation::Universe;

#[derive(Debug, Clone)]
pub struct GalleryCase {
    pub name: &'static str,
    pub algebra: FiniteAlgebra,
    /// The counterexample, re-evaluated on the algebra.
    pub violation: Violation,
    /// The counterexample with elements named as in the construction.
    pub rendered: String,
    /// Axiom (0) checked within the case's bounds.
    pub axiom0: CheckReport,
    /// The remaining axioms of the fragment, all expected to pass.
    pub others: FragmentReport,
}

/// Names for the four elements of each sort of the diamond.
pub fn diamond_name(x: usize) -> &'static str {
    ["0", "a", "b", "1"].get(x).copied().unwrap_or("?")
}

/// The product of two copies of the qf algebra on one point. Each sort is
/// the four-element lattice `0 < a, b < 1` with `a = (1, 0)` and `b = (0, 1)`.
pub fn diamond() -> Result<FiniteAlgebra, AlgebraError> {
    let one = FiniteAlgebra::concrete(Universe::new(1), Fragment::QF, 2)?;
    FiniteAlgebra::product(vec![one.clone(), one])
}

pub fn gallery_diamond() -> Result<GalleryCase, CheckError> {
    let algebra = diamond()?;
    let (a, b, zero) = (1, 2, 0);
    let instance = SchemaInstance {
        axiom: AxiomId::A0,
        shape: Shape::Blocks { blocks: vec![1, 1] },
        elements: vec![a, b, b, zero],
    };
    let rendered = render_axiom0(&[a, b], &[b, zero], &|_, x| diamond_name(x).to_string());
    finish("diamond", algebra, instance, rendered, 2)
}

/// Relations on `{0, 1, 2}` in the two factors: `A = {0,1}` and `B = {1,2}`
/// in both, and `R` equal to `A` in the first and to `B` in the second.
/// Returns the pe subalgebra of the product generated by `R`, `A`, `B`,
/// together with the indices of the three generators.
pub fn pe_theory() -> Result<(FiniteAlgebra, [usize; 3]), AlgebraError> {
    let w3 = FiniteAlgebra::concrete(Universe::new(3), Fragment::PE, 2)?;
    let product = FiniteAlgebra::product(vec![w3.clone(), w3])?;
    let (a, b) = (0b011, 0b110);
    let parents = [product.compose(1, &[a, b])?, product.compose(1, &[a, a])?, product.compose(1, &[b, b])?];
    let gens: Vec<(usize, usize)> = parents.iter().map(|&p| (1, p)).collect();
    let algebra = FiniteAlgebra::generated_subalgebra(&product, Fragment::PE, &gens)?;
    let mut idx = [0; 3];
    for (slot, &p) in idx.iter_mut().zip(&parents) {
        *slot = algebra
            .index_of_parent(1, p)
            .ok_or_else(|| AlgebraError::Mismatch("generator missing from its closure".into()))?;
    }
    if algebra.size(0)? != 2 {
        return Err(AlgebraError::Mismatch(format!("sort 0 has {} elements", algebra.size(0)?)));
    }
    Ok((algebra, idx))
}

pub fn gallery_pe_theory() -> Result<GalleryCase, CheckError> {
    let (algebra, [r, a, b]) = pe_theory()?;
    let instance = SchemaInstance {
        axiom: AxiomId::A0,
        shape: Shape::Blocks { blocks: vec![1, 1] },
        elements: vec![a, b, r, r],
    };
    let name = |x: usize| match x {
        _ if x == r => "R".to_string(),
        _ if x == a => "A".to_string(),
        _ if x == b => "B".to_string(),
        _ => algebra.describe(1, x),
    };
    let rendered = render_axiom0(&[a, b], &[r, r], &|_, x| name(x));
    finish("pe-theory", algebra, instance, rendered, 2)
}

fn finish(
    name: &'static str,
    algebra: FiniteAlgebra,
    instance: SchemaInstance,
    rendered: String,
    max_sort: usize,
) -> Result<GalleryCase, CheckError> {
    let bounds = Bounds::new(max_sort);
    let violation = replay(&algebra, &instance)?
        .ok_or_else(|| AlgebraError::Mismatch(format!("{name}: the featured instance holds")))?;
    let axiom0 = check_axiom(&algebra, AxiomId::A0, &bounds)?;
    let mut others = check_fragment(&algebra, algebra.fragment(), &bounds)?;
    others.reports.retain(|r| r.axiom != AxiomId::A0);
    others.failed.retain(|&a| a != AxiomId::A0);
    Ok(GalleryCase {
        name,
        algebra,
        violation,
        rendered,
        axiom0,
        others,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relation::Substitution;

    #[test]
    fn diamond_case() {
        let case = gallery_diamond().unwrap();
        assert_eq!(case.rendered, "c1(b) ∨ c2(0) ≥ c1(a) ∧ c2(b), b ≱ a, 0 ≱ b");
        assert!(!case.axiom0.passed());
        assert!(case.others.passed(), "{:?}", case.others.failed);
        let alg = &case.algebra;
        assert_eq!(alg.size(1).unwrap(), 4);
        let c = Substitution::partitioning(&[1, 1]);
        let meet = alg.meet(2, alg.subst(&c[0], 1).unwrap(), alg.subst(&c[1], 2).unwrap()).unwrap();
        assert_eq!(meet, alg.zero(2).unwrap());
    }

    #[test]
    fn pe_theory_case() {
        let case = gallery_pe_theory().unwrap();
        assert_eq!(case.algebra.size(0).unwrap(), 2);
        assert_eq!(case.rendered, "c1(R) ∨ c2(R) ≥ c1(A) ∧ c2(B), R ≱ A, R ≱ B");
        assert!(!case.axiom0.passed());
        assert!(case.others.passed(), "{:?}", case.others.failed);
    }
}
