//! Exact finite relations and the concrete interpretation of every operation
//! symbol: substitutions (inverse images), the lattice operations, complement,
//! projection of the last coordinate and the diagonal constants.
//!
//! Tuples are encoded big-endian: `(x1, ..., xn)` has index
//! `x1 * size^(n-1) + ... + xn`. File formats and test vectors depend on this.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelationError {
    #[error("arity mismatch: expected {expected}, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("universe mismatch: {left} vs {right}")]
    Universe { left: usize, right: usize },
    #[error("element {element} outside universe of size {size}")]
    Element { element: usize, size: usize },
    #[error("index {index} out of range 1..={bound}")]
    Index { index: usize, bound: usize },
    #[error("relation too large: {size}^{arity} tuples")]
    TooLarge { size: usize, arity: usize },
    #[error("cannot project a relation of arity 0")]
    ProjectNullary,
    #[error("malformed relation literal: {0}")]
    Literal(String),
}

/// The finite set `{0, ..., size-1}`. The empty universe is allowed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Universe(pub usize);

impl Universe {
    pub fn new(size: usize) -> Self {
        Universe(size)
    }

    pub fn size(self) -> usize {
        self.0
    }

    /// Number of `arity`-tuples, i.e. `size^arity` (with `0^0 = 1`).
    pub fn tuple_count(self, arity: usize) -> Result<usize, RelationError> {
        let arity32 = u32::try_from(arity).map_err(|_| RelationError::TooLarge {
            size: self.0,
            arity,
        })?;
        self.0.checked_pow(arity32).ok_or(RelationError::TooLarge {
            size: self.0,
            arity,
        })
    }

    pub fn encode(self, tuple: &[usize]) -> usize {
        tuple.iter().fold(0, |acc, &x| acc * self.0 + x)
    }

    pub fn decode(self, mut index: usize, arity: usize) -> Vec<usize> {
        let mut tuple = vec![0; arity];
        for slot in tuple.iter_mut().rev() {
            *slot = index % self.0;
            index /= self.0;
        }
        tuple
    }

    /// Every `arity`-tuple in index order.
    pub fn tuples(self, arity: usize) -> impl Iterator<Item = Vec<usize>> {
        let count = self.tuple_count(arity).unwrap_or(0);
        (0..count).map(move |i| self.decode(i, arity))
    }
}

/// An `arity`-ary relation on a finite universe, stored as an exact bitset
/// over tuple indices.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Relation {
    universe: Universe,
    arity: usize,
    members: BitSet,
}

impl Relation {
    pub fn empty(universe: Universe, arity: usize) -> Result<Self, RelationError> {
        Ok(Relation {
            universe,
            arity,
            members: BitSet::new(universe.tuple_count(arity)?),
        })
    }

    pub fn full(universe: Universe, arity: usize) -> Result<Self, RelationError> {
        Ok(Relation {
            universe,
            arity,
            members: BitSet::full(universe.tuple_count(arity)?),
        })
    }

    pub fn from_tuples<I, T>(universe: Universe, arity: usize, tuples: I) -> Result<Self, RelationError>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[usize]>,
    {
        let mut rel = Relation::empty(universe, arity)?;
        for tuple in tuples {
            rel.insert(tuple.as_ref())?;
        }
        Ok(rel)
    }

    /// Relation whose member bits are the low `size^arity` bits of `mask`.
    pub fn from_mask(universe: Universe, arity: usize, mask: u64) -> Result<Self, RelationError> {
        let len = universe.tuple_count(arity)?;
        if len > 64 {
            return Err(RelationError::TooLarge {
                size: universe.size(),
                arity,
            });
        }
        Ok(Relation {
            universe,
            arity,
            members: BitSet::from_mask(len, mask),
        })
    }

    pub fn to_mask(&self) -> Option<u64> {
        self.members.to_mask()
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn members(&self) -> &BitSet {
        &self.members
    }

    fn check_tuple(&self, tuple: &[usize]) -> Result<(), RelationError> {
        if tuple.len() != self.arity {
            return Err(RelationError::Arity {
                expected: self.arity,
                found: tuple.len(),
            });
        }
        if let Some(&bad) = tuple.iter().find(|&&x| x >= self.universe.size()) {
            return Err(RelationError::Element {
                element: bad,
                size: self.universe.size(),
            });
        }
        Ok(())
    }

    pub fn insert(&mut self, tuple: &[usize]) -> Result<(), RelationError> {
        self.check_tuple(tuple)?;
        let index = self.universe.encode(tuple);
        self.members.set(index, true);
        Ok(())
    }

    pub fn contains(&self, tuple: &[usize]) -> bool {
        self.check_tuple(tuple).is_ok() && self.members.get(self.universe.encode(tuple))
    }

    pub fn contains_index(&self, index: usize) -> bool {
        self.members.get(index)
    }

    pub fn len(&self) -> usize {
        self.members.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.members.none()
    }

    /// Member tuples in index order.
    pub fn tuples(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        self.members.ones().map(|i| self.universe.decode(i, self.arity))
    }

    fn check_same_sort(&self, other: &Relation) -> Result<(), RelationError> {
        if self.universe != other.universe {
            return Err(RelationError::Universe {
                left: self.universe.size(),
                right: other.universe.size(),
            });
        }
        if self.arity != other.arity {
            return Err(RelationError::Arity {
                expected: self.arity,
                found: other.arity,
            });
        }
        Ok(())
    }

    pub fn meet(&self, other: &Relation) -> Result<Relation, RelationError> {
        self.check_same_sort(other)?;
        Ok(Relation {
            members: self.members.intersect(&other.members),
            ..self.clone()
        })
    }

    pub fn join(&self, other: &Relation) -> Result<Relation, RelationError> {
        self.check_same_sort(other)?;
        Ok(Relation {
            members: self.members.union(&other.members),
            ..self.clone()
        })
    }

    pub fn complement(&self) -> Relation {
        Relation {
            members: self.members.complement(),
            ..self.clone()
        }
    }

    pub fn is_subset(&self, other: &Relation) -> Result<bool, RelationError> {
        self.check_same_sort(other)?;
        Ok(self.members.is_subset(&other.members))
    }

    /// `{x̄ | ∃y. x̄y ∈ r}`.
    pub fn exists_last(&self) -> Result<Relation, RelationError> {
        if self.arity == 0 {
            return Err(RelationError::ProjectNullary);
        }
        let size = self.universe.size();
        let mut out = Relation::empty(self.universe, self.arity - 1)?;
        for index in self.members.ones() {
            out.members.set(index / size, true);
        }
        Ok(out)
    }

    /// `Δ_{i,j}^n = {x̄ | x_i = x_j}`, one-based indices.
    pub fn delta(universe: Universe, arity: usize, i: usize, j: usize) -> Result<Relation, RelationError> {
        for index in [i, j] {
            if index == 0 || index > arity {
                return Err(RelationError::Index { index, bound: arity });
            }
        }
        let mut out = Relation::empty(universe, arity)?;
        for (index, tuple) in universe.tuples(arity).enumerate() {
            if tuple[i - 1] == tuple[j - 1] {
                out.members.set(index, true);
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "arity={} universe={} {{", self.arity, self.universe.size())?;
        for (n, tuple) in self.tuples().enumerate() {
            if n > 0 {
                f.write_str(",")?;
            }
            f.write_str("(")?;
            for (k, x) in tuple.iter().enumerate() {
                if k > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str(")")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Relation {
    type Err = RelationError;

    /// Parses `arity=2 universe=3 {(0,1),(2,0)}`; whitespace is ignored.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = |msg: &str| RelationError::Literal(format!("{msg} in {text:?}"));
        let rest = compact.strip_prefix("arity=").ok_or_else(|| bad("missing arity="))?;
        let split = rest.find("universe=").ok_or_else(|| bad("missing universe="))?;
        let arity: usize = rest[..split].parse().map_err(|_| bad("bad arity"))?;
        let rest = &rest[split + "universe=".len()..];
        let brace = rest.find('{').ok_or_else(|| bad("missing {"))?;
        let size: usize = rest[..brace].parse().map_err(|_| bad("bad universe"))?;
        let body = rest[brace + 1..].strip_suffix('}').ok_or_else(|| bad("missing }"))?;
        let universe = Universe::new(size);
        let mut rel = Relation::empty(universe, arity)?;
        let mut cursor = body;
        while !cursor.is_empty() {
            let inner = cursor.strip_prefix('(').ok_or_else(|| bad("expected ("))?;
            let close = inner.find(')').ok_or_else(|| bad("expected )"))?;
            let tuple: Vec<usize> = if inner[..close].is_empty() {
                Vec::new()
            } else {
                inner[..close]
                    .split(',')
                    .map(|x| x.parse().map_err(|_| bad("bad element")))
                    .collect::<Result<_, _>>()?
            };
            rel.insert(&tuple)?;
            cursor = &inner[close + 1..];
            cursor = cursor.strip_prefix(',').unwrap_or(cursor);
        }
        Ok(rel)
    }
}

/// A function `α: {1..dom} → {1..cod}`. It sends `cod`-tuples to `dom`-tuples
/// and therefore sends relations of arity `dom` to relations of arity `cod`
/// by inverse image.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Substitution {
    cod: usize,
    map: Vec<usize>,
}

impl Substitution {
    /// `map` holds one-based entries, each in `1..=cod`.
    pub fn new(map: Vec<usize>, cod: usize) -> Result<Self, RelationError> {
        if let Some(&index) = map.iter().find(|&&i| i == 0 || i > cod) {
            return Err(RelationError::Index { index, bound: cod });
        }
        Ok(Substitution { cod, map })
    }

    pub fn identity(n: usize) -> Self {
        Substitution {
            cod: n,
            map: (1..=n).collect(),
        }
    }

    /// The cylindrification `c: n → n+1` with `c(i) = i`, paired with projection.
    pub fn assoc_cylindrification(n: usize) -> Self {
        Substitution {
            cod: n + 1,
            map: (1..=n).collect(),
        }
    }

    /// Block inclusions `c_i: k_i → k_1+...+k_m`, `c_i(l) = l + Σ_{j<i} k_j`.
    pub fn partitioning(blocks: &[usize]) -> Vec<Substitution> {
        let total: usize = blocks.iter().sum();
        let mut offset = 0;
        blocks
            .iter()
            .map(|&k| {
                let sub = Substitution {
                    cod: total,
                    map: (offset + 1..=offset + k).collect(),
                };
                offset += k;
                sub
            })
            .collect()
    }

    /// All `cod^dom` substitutions `dom → cod` in lexicographic order of maps.
    pub fn all(dom: usize, cod: usize) -> Vec<Substitution> {
        let count = Universe::new(cod).tuple_count(dom).unwrap_or(0);
        (0..count)
            .map(|i| Substitution {
                cod,
                map: Universe::new(cod).decode(i, dom).into_iter().map(|x| x + 1).collect(),
            })
            .collect()
    }

    pub fn dom(&self) -> usize {
        self.map.len()
    }

    pub fn cod(&self) -> usize {
        self.cod
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    /// One-based lookup `α(i)`.
    pub fn at(&self, i: usize) -> usize {
        self.map[i - 1]
    }

    pub fn is_identity(&self) -> bool {
        self.cod == self.map.len() && self.map.iter().enumerate().all(|(i, &x)| x == i + 1)
    }

    /// Strictly increasing maps.
    pub fn is_cylindrification(&self) -> bool {
        self.map.windows(2).all(|w| w[0] < w[1])
    }

    /// `α^tuple(x₁..x_cod) = (x_{α(1)}, ..., x_{α(dom)})`.
    pub fn apply_tuple<T: Copy>(&self, tuple: &[T]) -> Result<Vec<T>, RelationError> {
        if tuple.len() != self.cod {
            return Err(RelationError::Arity {
                expected: self.cod,
                found: tuple.len(),
            });
        }
        Ok(self.map.iter().map(|&i| tuple[i - 1]).collect())
    }

    /// Inverse image: `{x̄ ∈ W^cod | α^tuple(x̄) ∈ r}`.
    pub fn apply(&self, rel: &Relation) -> Result<Relation, RelationError> {
        if rel.arity() != self.dom() {
            return Err(RelationError::Arity {
                expected: self.dom(),
                found: rel.arity(),
            });
        }
        let universe = rel.universe();
        let mut out = Relation::empty(universe, self.cod)?;
        for (index, tuple) in universe.tuples(self.cod).enumerate() {
            let image = self.apply_tuple(&tuple)?;
            if rel.contains_index(universe.encode(&image)) {
                out.members.set(index, true);
            }
        }
        Ok(out)
    }

    /// `self ∘ inner` as functions: `(self ∘ inner)(i) = self(inner(i))`.
    /// Acting on relations, this is `self(inner(r))`.
    pub fn compose(&self, inner: &Substitution) -> Result<Substitution, RelationError> {
        if self.dom() != inner.cod {
            return Err(RelationError::Arity {
                expected: self.dom(),
                found: inner.cod,
            });
        }
        Ok(Substitution {
            cod: self.cod,
            map: inner.map.iter().map(|&i| self.map[i - 1]).collect(),
        })
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}:[", self.dom(), self.cod)?;
        for (i, x) in self.map.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("]")
    }
}

impl From<Substitution> for String {
    fn from(alpha: Substitution) -> String {
        alpha.to_string()
    }
}

impl TryFrom<String> for Substitution {
    type Error = RelationError;

    fn try_from(text: String) -> Result<Self, Self::Error> {
        text.parse()
    }
}

impl FromStr for Substitution {
    type Err = RelationError;

    /// Parses the `dom->cod:[i1,...,in]` key form.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let bad = || RelationError::Literal(format!("bad substitution key {text:?}"));
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let (head, body) = compact.split_once(":[").ok_or_else(bad)?;
        let body = body.strip_suffix(']').ok_or_else(bad)?;
        let (dom, cod) = head.split_once("->").ok_or_else(bad)?;
        let dom: usize = dom.parse().map_err(|_| bad())?;
        let cod: usize = cod.parse().map_err(|_| bad())?;
        let map: Vec<usize> = if body.is_empty() {
            Vec::new()
        } else {
            body.split(',')
                .map(|x| x.parse().map_err(|_| bad()))
                .collect::<Result<_, _>>()?
        };
        if map.len() != dom {
            return Err(bad());
        }
        Substitution::new(map, cod)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(n: usize) -> Universe {
        Universe::new(n)
    }

    fn rel(size: usize, arity: usize, tuples: &[&[usize]]) -> Relation {
        Relation::from_tuples(w(size), arity, tuples.iter().copied()).unwrap()
    }

    fn sub(map: &[usize], cod: usize) -> Substitution {
        Substitution::new(map.to_vec(), cod).unwrap()
    }

    #[test]
    fn tuple_apply_examples() {
        assert_eq!(sub(&[2, 1], 2).apply_tuple(&[0, 1]).unwrap(), vec![1, 0]);
        assert_eq!(
            sub(&[1, 1, 2, 1], 3).apply_tuple(&['a', 'b', 'c']).unwrap(),
            vec!['a', 'a', 'b', 'a']
        );
        assert_eq!(Substitution::identity(3).apply_tuple(&[2, 0, 1]).unwrap(), vec![2, 0, 1]);
        assert!(sub(&[1], 2).apply_tuple(&[0]).is_err());
    }

    #[test]
    fn rel_apply_examples() {
        let cyl = sub(&[1], 2).apply(&rel(2, 1, &[&[0]])).unwrap();
        assert_eq!(cyl, rel(2, 2, &[&[0, 0], &[0, 1]]));
        let swapped = sub(&[2, 1], 2).apply(&rel(2, 2, &[&[0, 1]])).unwrap();
        assert_eq!(swapped, rel(2, 2, &[&[1, 0]]));
        let diag = sub(&[1, 1], 1).apply(&rel(2, 2, &[&[0, 0], &[0, 1]])).unwrap();
        assert_eq!(diag, rel(2, 1, &[&[0]]));
        assert!(sub(&[1, 1], 1).apply(&rel(2, 1, &[])).is_err());
    }

    #[test]
    fn compose_examples() {
        let beta = sub(&[1, 1], 1);
        let alpha = sub(&[2, 1], 2);
        assert_eq!(beta.compose(&alpha).unwrap(), sub(&[1, 1], 1));
        assert_eq!(Substitution::identity(2).compose(&alpha).unwrap(), alpha);
        assert_eq!(alpha.compose(&Substitution::identity(2)).unwrap(), alpha);
        assert!(sub(&[1], 3).compose(&alpha).is_err());
    }

    #[test]
    fn lattice_examples() {
        let a = rel(2, 2, &[&[0, 1]]);
        let b = rel(2, 2, &[&[0, 1], &[1, 1]]);
        assert_eq!(a.meet(&b).unwrap(), a);
        let bottom = Relation::empty(w(2), 1).unwrap();
        assert_eq!(bottom.complement(), Relation::full(w(2), 1).unwrap());
        assert!(a.meet(&bottom).is_err());
        assert!(a.meet(&rel(3, 2, &[])).is_err());
    }

    #[test]
    fn empty_universe_degeneracies() {
        let top0 = Relation::full(w(0), 0).unwrap();
        assert_eq!(top0.members().len(), 1);
        assert!(top0.contains(&[]));
        assert_eq!(Relation::full(w(0), 1).unwrap(), Relation::empty(w(0), 1).unwrap());
    }

    #[test]
    fn exists_last_examples() {
        assert_eq!(rel(2, 2, &[&[0, 1]]).exists_last().unwrap(), rel(2, 1, &[&[0]]));
        assert_eq!(
            Relation::empty(w(2), 3).unwrap().exists_last().unwrap(),
            Relation::empty(w(2), 2).unwrap()
        );
        assert_eq!(
            rel(2, 2, &[&[0, 0], &[1, 0]]).exists_last().unwrap(),
            rel(2, 1, &[&[0], &[1]])
        );
        assert_eq!(
            Relation::full(w(2), 0).unwrap().exists_last(),
            Err(RelationError::ProjectNullary)
        );
    }

    #[test]
    fn delta_examples() {
        assert_eq!(Relation::delta(w(2), 2, 1, 2).unwrap(), rel(2, 2, &[&[0, 0], &[1, 1]]));
        assert_eq!(Relation::delta(w(3), 3, 2, 2).unwrap(), Relation::full(w(3), 3).unwrap());
        assert_eq!(Relation::delta(w(3), 2, 1, 2), Relation::delta(w(3), 2, 2, 1));
        assert!(Relation::delta(w(2), 2, 0, 1).is_err());
        assert!(Relation::delta(w(2), 2, 1, 3).is_err());
    }

    #[test]
    fn partitioning_examples() {
        let cs = Substitution::partitioning(&[1, 1]);
        assert_eq!(cs, vec![sub(&[1], 2), sub(&[2], 2)]);
        assert_eq!(Substitution::partitioning(&[3]), vec![Substitution::identity(3)]);
        assert!(Substitution::partitioning(&[]).is_empty());
        let cs = Substitution::partitioning(&[2, 0, 1]);
        assert!(cs.iter().all(Substitution::is_cylindrification));
        assert_eq!(cs[0].apply_tuple(&[7, 8, 9]).unwrap(), vec![7, 8]);
        assert_eq!(cs[1].apply_tuple(&[7, 8, 9]).unwrap(), Vec::<i32>::new());
        assert_eq!(cs[2].apply_tuple(&[7, 8, 9]).unwrap(), vec![9]);
    }

    #[test]
    fn assoc_cylindrification_examples() {
        let c0 = Substitution::assoc_cylindrification(0);
        assert_eq!((c0.dom(), c0.cod()), (0, 1));
        let top0 = Relation::full(w(2), 0).unwrap();
        assert_eq!(c0.apply(&top0).unwrap(), Relation::full(w(2), 1).unwrap());
        assert_eq!(c0.apply(&top0.complement()).unwrap(), Relation::empty(w(2), 1).unwrap());
        let c1 = Substitution::assoc_cylindrification(1);
        assert_eq!(c1.apply(&rel(2, 1, &[&[0]])).unwrap(), rel(2, 2, &[&[0, 0], &[0, 1]]));
    }

    #[test]
    fn literal_round_trip() {
        let r = rel(3, 2, &[&[0, 1], &[2, 0]]);
        assert_eq!(r.to_string(), "arity=2 universe=3 {(0,1),(2,0)}");
        assert_eq!(" arity = 2 universe=3 { (2,0), (0, 1) }".parse::<Relation>().unwrap(), r);
        let top0 = Relation::full(w(0), 0).unwrap();
        assert_eq!(top0.to_string(), "arity=0 universe=0 {()}");
        assert_eq!("arity=0 universe=0 {()}".parse::<Relation>().unwrap(), top0);
        assert!("arity=1 universe=2 {(2)}".parse::<Relation>().is_err());
        assert!("arity=1 universe=2 (0)".parse::<Relation>().is_err());
    }

    #[test]
    fn substitution_key_round_trip() {
        let s = sub(&[1], 2);
        assert_eq!(s.to_string(), "1->2:[1]");
        assert_eq!("1->2:[1]".parse::<Substitution>().unwrap(), s);
        assert_eq!("0->3:[]".parse::<Substitution>().unwrap(), Substitution::new(vec![], 3).unwrap());
        assert!("2->2:[1]".parse::<Substitution>().is_err());
    }

    #[test]
    fn all_substitutions_count() {
        assert_eq!(Substitution::all(2, 3).len(), 9);
        assert_eq!(Substitution::all(0, 0).len(), 1);
        assert_eq!(Substitution::all(1, 0).len(), 0);
    }
}
