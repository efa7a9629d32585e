//! Finite, sort-truncated multisorted algebras.
//!
//! Every algebra has a fragment and a bound `max_sort`. Elements of a sort
//! are the indices `0..size(sort)`. Checks and constructions only quantify
//! over sorts up to the bound, but concrete, product and generated algebras
//! can answer for higher sorts on demand, and a table presentation can
//! borrow higher sorts from a source algebra it was tabulated from.

mod concrete;
mod generated;
mod morphism;
mod tables;

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use thiserror::Error;

use crate::fragment::Fragment;
use crate::lattice::SortLattice;
use crate::relation::{RelationError, Substitution, Universe};

pub use generated::Witness;
pub use morphism::{
    identity_map, kernel, projection_map, verify_morphism, Codomain, ConcreteTarget, MorphismMap, MorphismMode,
    MorphismReport, MorphismViolation,
};
pub use tables::TableError;

use generated::Generated;
use tables::Tables;

pub const DEFAULT_ELEMENT_CAP: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("sort {sort} is above the bound {max_sort} and this presentation cannot extend")]
    InsufficientSorts { sort: usize, max_sort: usize },
    #[error("sort {sort} would have {size} elements, over the cap of {cap}")]
    ResourceLimit { sort: usize, size: String, cap: usize },
    #[error("operation {op} is not in fragment {fragment}")]
    NotInFragment { op: &'static str, fragment: Fragment },
    #[error("element {index} is out of range for sort {sort} (size {size})")]
    Element { sort: usize, index: usize, size: usize },
    #[error("extension to sort {sort} adds new elements to sort {grown}")]
    NotConservative { sort: usize, grown: usize },
    #[error("{0}")]
    Mismatch(String),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Relation(#[from] RelationError),
}

pub(crate) enum Repr {
    Concrete(Universe),
    Product(Vec<FiniteAlgebra>),
    Generated(Generated),
    Tables(Tables),
}

/// Where an algebra came from. Determines whether sorts above the bound exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Concrete(usize),
    Product(usize),
    Generated,
    Tables { extensible: bool },
}

type LatticeCache = RwLock<HashMap<usize, Arc<SortLattice>>>;

#[derive(Clone)]
pub struct FiniteAlgebra {
    fragment: Fragment,
    max_sort: usize,
    cap: usize,
    repr: Arc<Repr>,
    lattices: Arc<LatticeCache>,
}

impl std::fmt::Debug for FiniteAlgebra {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FiniteAlgebra")
            .field("fragment", &self.fragment)
            .field("max_sort", &self.max_sort)
            .field("provenance", &self.provenance())
            .finish()
    }
}

impl FiniteAlgebra {
    fn from_repr(fragment: Fragment, max_sort: usize, cap: usize, repr: Repr) -> Self {
        FiniteAlgebra {
            fragment,
            max_sort,
            cap,
            repr: Arc::new(repr),
            lattices: Arc::default(),
        }
    }

    /// All relations on `universe`, sorts `0..=max_sort` materialized.
    pub fn concrete(universe: Universe, fragment: Fragment, max_sort: usize) -> Result<Self, AlgebraError> {
        Self::concrete_with_cap(universe, fragment, max_sort, DEFAULT_ELEMENT_CAP)
    }

    pub fn concrete_with_cap(
        universe: Universe,
        fragment: Fragment,
        max_sort: usize,
        cap: usize,
    ) -> Result<Self, AlgebraError> {
        let alg = Self::from_repr(fragment, max_sort, cap, Repr::Concrete(universe));
        for sort in 0..=max_sort {
            alg.size(sort)?;
        }
        Ok(alg)
    }

    /// Componentwise product. Factors must share fragment and bound.
    pub fn product(factors: Vec<FiniteAlgebra>) -> Result<Self, AlgebraError> {
        let Some(first) = factors.first() else {
            return Err(AlgebraError::Mismatch("a product needs at least one factor".into()));
        };
        let (fragment, max_sort, cap) = (first.fragment, first.max_sort, first.cap);
        if let Some(bad) = factors.iter().find(|f| f.fragment != fragment || f.max_sort != max_sort) {
            return Err(AlgebraError::Mismatch(format!(
                "factor has fragment {} and bound {}, expected {fragment} and {max_sort}",
                bad.fragment, bad.max_sort
            )));
        }
        let alg = Self::from_repr(fragment, max_sort, cap, Repr::Product(factors));
        for sort in 0..=max_sort {
            alg.size(sort)?;
        }
        Ok(alg)
    }

    /// The least subset of `parent` containing `generators` (pairs of sort and
    /// element) and closed under the operations of `fragment` within the
    /// parent's bound.
    pub fn generated_subalgebra(
        parent: &FiniteAlgebra,
        fragment: Fragment,
        generators: &[(usize, usize)],
    ) -> Result<Self, AlgebraError> {
        if !fragment.is_subfragment_of(parent.fragment) {
            return Err(AlgebraError::Mismatch(format!(
                "fragment {fragment} is not a reduct of the parent's {}",
                parent.fragment
            )));
        }
        for &(sort, index) in generators {
            parent.check(sort, index)?;
        }
        let generated = Generated::new(parent.clone(), fragment, generators.to_vec(), parent.max_sort)?;
        Ok(Self::from_repr(fragment, parent.max_sort, parent.cap, Repr::Generated(generated)))
    }

    /// The same algebra seen in a smaller signature.
    pub fn reduct(&self, fragment: Fragment) -> Result<Self, AlgebraError> {
        if !fragment.is_subfragment_of(self.fragment) {
            return Err(AlgebraError::Mismatch(format!("{fragment} is not a reduct of {}", self.fragment)));
        }
        Ok(FiniteAlgebra {
            fragment,
            lattices: Arc::default(),
            ..self.clone()
        })
    }

    pub fn fragment(&self) -> Fragment {
        self.fragment
    }

    pub fn max_sort(&self) -> usize {
        self.max_sort
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn provenance(&self) -> Provenance {
        match &*self.repr {
            Repr::Concrete(w) => Provenance::Concrete(w.size()),
            Repr::Product(f) => Provenance::Product(f.len()),
            Repr::Generated(_) => Provenance::Generated,
            Repr::Tables(t) => Provenance::Tables {
                extensible: t.extension.is_some(),
            },
        }
    }

    /// Whether sorts above the bound can be materialized.
    pub fn can_extend(&self) -> bool {
        match &*self.repr {
            Repr::Concrete(_) | Repr::Generated(_) => true,
            Repr::Product(f) => f.iter().all(|a| a.can_extend()),
            Repr::Tables(t) => t.extension.is_some(),
        }
    }

    pub(crate) fn lattice_cache(&self) -> &LatticeCache {
        &self.lattices
    }

    pub fn size(&self, sort: usize) -> Result<usize, AlgebraError> {
        let limit = |size: String| AlgebraError::ResourceLimit {
            sort,
            size,
            cap: self.cap,
        };
        match &*self.repr {
            Repr::Concrete(w) => {
                let tuples = w.tuple_count(sort).map_err(|_| limit("more than 2^64".into()))?;
                if tuples >= 64 || (1usize << tuples) > self.cap {
                    return Err(limit(format!("2^{tuples}")));
                }
                Ok(1 << tuples)
            }
            Repr::Product(factors) => {
                let mut total: usize = 1;
                for f in factors {
                    total = total
                        .checked_mul(f.size(sort)?)
                        .filter(|&t| t <= self.cap)
                        .ok_or_else(|| limit("a product over the cap".into()))?;
                }
                Ok(total)
            }
            Repr::Generated(g) => g.size(sort),
            Repr::Tables(t) => t.size(sort, self.max_sort),
        }
    }

    pub(crate) fn check(&self, sort: usize, index: usize) -> Result<(), AlgebraError> {
        let size = self.size(sort)?;
        if index < size {
            Ok(())
        } else {
            Err(AlgebraError::Element { sort, index, size })
        }
    }

    pub fn elements(&self, sort: usize) -> Result<std::ops::Range<usize>, AlgebraError> {
        Ok(0..self.size(sort)?)
    }

    pub fn zero(&self, sort: usize) -> Result<usize, AlgebraError> {
        match &*self.repr {
            Repr::Concrete(_) => {
                self.size(sort)?;
                Ok(0)
            }
            Repr::Product(factors) => {
                let parts = factors.iter().map(|f| f.zero(sort)).collect::<Result<Vec<_>, _>>()?;
                self.compose(sort, &parts)
            }
            Repr::Generated(g) => g.zero(sort),
            Repr::Tables(t) => t.zero(sort, self.max_sort),
        }
    }

    pub fn one(&self, sort: usize) -> Result<usize, AlgebraError> {
        match &*self.repr {
            Repr::Concrete(_) => Ok(self.size(sort)? - 1),
            Repr::Product(factors) => {
                let parts = factors.iter().map(|f| f.one(sort)).collect::<Result<Vec<_>, _>>()?;
                self.compose(sort, &parts)
            }
            Repr::Generated(g) => g.one(sort),
            Repr::Tables(t) => t.one(sort, self.max_sort),
        }
    }

    pub fn meet(&self, sort: usize, a: usize, b: usize) -> Result<usize, AlgebraError> {
        self.check(sort, a)?;
        self.check(sort, b)?;
        match &*self.repr {
            Repr::Concrete(_) => Ok(a & b),
            Repr::Product(factors) => self.zip(sort, a, b, |f, x, y| factors[f].meet(sort, x, y)),
            Repr::Generated(g) => g.meet(sort, a, b),
            Repr::Tables(t) => t.meet(sort, a, b, self.max_sort),
        }
    }

    pub fn join(&self, sort: usize, a: usize, b: usize) -> Result<usize, AlgebraError> {
        self.check(sort, a)?;
        self.check(sort, b)?;
        match &*self.repr {
            Repr::Concrete(_) => Ok(a | b),
            Repr::Product(factors) => self.zip(sort, a, b, |f, x, y| factors[f].join(sort, x, y)),
            Repr::Generated(g) => g.join(sort, a, b),
            Repr::Tables(t) => t.join(sort, a, b, self.max_sort),
        }
    }

    pub fn neg(&self, sort: usize, a: usize) -> Result<usize, AlgebraError> {
        self.require(self.fragment.has_negation(), "negation")?;
        self.check(sort, a)?;
        match &*self.repr {
            Repr::Concrete(_) => Ok(self.one(sort)? & !a),
            Repr::Product(factors) => self.map(sort, sort, a, |f, x| factors[f].neg(sort, x)),
            Repr::Generated(g) => g.neg(sort, a),
            Repr::Tables(t) => t.neg(sort, a, self.max_sort),
        }
    }

    /// `α(a)`: `a` has sort `α.dom()`, the result has sort `α.cod()`.
    pub fn subst(&self, alpha: &Substitution, a: usize) -> Result<usize, AlgebraError> {
        let (n, k) = (alpha.dom(), alpha.cod());
        self.check(n, a)?;
        self.size(k)?;
        match &*self.repr {
            Repr::Concrete(w) => Ok(concrete::subst(*w, alpha, a as u64) as usize),
            Repr::Product(factors) => self.map(n, k, a, |f, x| factors[f].subst(alpha, x)),
            Repr::Generated(g) => g.subst(alpha, a),
            Repr::Tables(t) => t.subst(alpha, a, self.max_sort),
        }
    }

    /// Projection of the last coordinate: `a` has sort `n + 1`, the result sort `n`.
    pub fn exists(&self, n: usize, a: usize) -> Result<usize, AlgebraError> {
        self.require(self.fragment.has_exists(), "projection")?;
        self.check(n + 1, a)?;
        self.size(n)?;
        match &*self.repr {
            Repr::Concrete(w) => Ok(concrete::exists(*w, n, a as u64) as usize),
            Repr::Product(factors) => self.map(n + 1, n, a, |f, x| factors[f].exists(n, x)),
            Repr::Generated(g) => g.exists(n, a),
            Repr::Tables(t) => t.exists(n, a, self.max_sort),
        }
    }

    /// The diagonal constant `Δ^n_{i,j}`, indices one-based.
    pub fn delta(&self, n: usize, i: usize, j: usize) -> Result<usize, AlgebraError> {
        self.require(self.fragment.equality, "diagonal")?;
        if i == 0 || j == 0 || i > n || j > n {
            return Err(RelationError::Index {
                index: i.max(j),
                bound: n,
            }
            .into());
        }
        match &*self.repr {
            Repr::Concrete(w) => {
                self.size(n)?;
                Ok(concrete::delta(*w, n, i, j) as usize)
            }
            Repr::Product(factors) => {
                let parts = factors.iter().map(|f| f.delta(n, i, j)).collect::<Result<Vec<_>, _>>()?;
                self.compose(n, &parts)
            }
            Repr::Generated(g) => g.delta(n, i, j),
            Repr::Tables(t) => t.delta(n, i, j, self.max_sort),
        }
    }

    /// `a ≤ b`, i.e. `a ∧ b = a`.
    pub fn leq(&self, sort: usize, a: usize, b: usize) -> Result<bool, AlgebraError> {
        Ok(self.meet(sort, a, b)? == a)
    }

    /// A human-readable rendering of an element.
    pub fn describe(&self, sort: usize, a: usize) -> String {
        match &*self.repr {
            Repr::Concrete(w) => concrete::describe(*w, sort, a as u64),
            Repr::Product(factors) => match self.decompose(sort, a) {
                Ok(parts) => {
                    let shown: Vec<String> = parts.iter().zip(factors).map(|(&x, f)| f.describe(sort, x)).collect();
                    format!("<{}>", shown.join(", "))
                }
                Err(_) => format!("#{a}"),
            },
            Repr::Generated(g) => g.describe(sort, a),
            Repr::Tables(_) => format!("#{a}"),
        }
    }

    fn require(&self, ok: bool, op: &'static str) -> Result<(), AlgebraError> {
        if ok {
            Ok(())
        } else {
            Err(AlgebraError::NotInFragment {
                op,
                fragment: self.fragment,
            })
        }
    }

    /// Splits a product element into its factor components.
    pub fn decompose(&self, sort: usize, a: usize) -> Result<Vec<usize>, AlgebraError> {
        let Repr::Product(factors) = &*self.repr else {
            return Ok(vec![a]);
        };
        let mut rest = a;
        let mut out = Vec::with_capacity(factors.len());
        for f in factors {
            let size = f.size(sort)?;
            out.push(rest % size);
            rest /= size;
        }
        Ok(out)
    }

    /// Inverse of [`decompose`](Self::decompose): factor 0 is least significant.
    pub fn compose(&self, sort: usize, parts: &[usize]) -> Result<usize, AlgebraError> {
        let Repr::Product(factors) = &*self.repr else {
            return Ok(parts[0]);
        };
        let mut out = 0;
        for (f, &x) in factors.iter().zip(parts).rev() {
            let size = f.size(sort)?;
            f.check(sort, x)?;
            out = out * size + x;
        }
        Ok(out)
    }

    fn zip(
        &self,
        sort: usize,
        a: usize,
        b: usize,
        op: impl Fn(usize, usize, usize) -> Result<usize, AlgebraError>,
    ) -> Result<usize, AlgebraError> {
        let (pa, pb) = (self.decompose(sort, a)?, self.decompose(sort, b)?);
        let parts = (0..pa.len())
            .map(|f| op(f, pa[f], pb[f]))
            .collect::<Result<Vec<_>, _>>()?;
        self.compose(sort, &parts)
    }

    fn map(
        &self,
        from: usize,
        to: usize,
        a: usize,
        op: impl Fn(usize, usize) -> Result<usize, AlgebraError>,
    ) -> Result<usize, AlgebraError> {
        let pa = self.decompose(from, a)?;
        let parts = (0..pa.len()).map(|f| op(f, pa[f])).collect::<Result<Vec<_>, _>>()?;
        self.compose(to, &parts)
    }

    /// Factors of a product algebra.
    pub fn factors(&self) -> Option<&[FiniteAlgebra]> {
        match &*self.repr {
            Repr::Product(f) => Some(f),
            _ => None,
        }
    }

    /// Parent index of an element of a generated subalgebra.
    pub fn parent_index(&self, sort: usize, a: usize) -> Option<usize> {
        match &*self.repr {
            Repr::Generated(g) => g.parent_index(sort, a).ok(),
            _ => None,
        }
    }

    /// Index of a parent element in a generated subalgebra, if it is a member.
    pub fn index_of_parent(&self, sort: usize, parent: usize) -> Option<usize> {
        match &*self.repr {
            Repr::Generated(g) => g.index_of(sort, parent).ok().flatten(),
            _ => None,
        }
    }

    /// The first-found term witnessing membership, for generated subalgebras.
    pub fn witness(&self, sort: usize, a: usize) -> Option<Witness> {
        match &*self.repr {
            Repr::Generated(g) => g.witness(sort, a).ok(),
            _ => None,
        }
    }

    /// Re-presents sorts `0..=max_sort` as explicit tables. With `shuffle`, element
    /// indices are permuted per sort by a seeded shuffle; with `extend`, sorts above
    /// the bound are borrowed from `self`.
    pub fn tabulate(&self, shuffle: Option<u64>, extend: bool) -> Result<FiniteAlgebra, AlgebraError> {
        let tables = Tables::tabulate(self, shuffle, extend)?;
        Ok(Self::from_repr(self.fragment, self.max_sort, self.cap, Repr::Tables(tables)))
    }

    /// Loads a table presentation from its JSON form.
    pub fn from_tables_json(text: &str) -> Result<FiniteAlgebra, AlgebraError> {
        let (fragment, max_sort, tables) = Tables::from_json(text)?;
        Ok(Self::from_repr(fragment, max_sort, DEFAULT_ELEMENT_CAP, Repr::Tables(tables)))
    }

    /// Serializes sorts `0..=max_sort` as tables in JSON.
    pub fn to_tables_json(&self) -> Result<String, AlgebraError> {
        let tables = match &*self.repr {
            Repr::Tables(t) => return t.to_json(self.fragment, self.max_sort),
            _ => Tables::tabulate(self, None, false)?,
        };
        tables.to_json(self.fragment, self.max_sort)
    }

    /// Tabulated algebra with `table` overriding the meet of one pair. Used to
    /// inject faults in tests.
    pub fn with_corrupted_meet(&self, sort: usize, a: usize, b: usize, value: usize) -> Result<FiniteAlgebra, AlgebraError> {
        let mut tables = Tables::tabulate(self, None, false)?;
        tables.set_meet(sort, a, b, value)?;
        Ok(Self::from_repr(self.fragment, self.max_sort, self.cap, Repr::Tables(tables)))
    }
}
