use std::collections::{HashMap, VecDeque};
use std::sync::RwLock;

use super::{AlgebraError, FiniteAlgebra};
use crate::fragment::Fragment;
use crate::relation::Substitution;

/// How an element of a generated subalgebra was first reached. Operands are
/// element indices of the subalgebra in the operand's sort.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    Generator(usize),
    Zero,
    One,
    Delta(usize, usize),
    Meet(usize, usize),
    Join(usize, usize),
    Neg(usize),
    Subst(Substitution, usize),
    Exists(usize),
}

#[derive(Debug, Clone, Default)]
struct SortState {
    elems: Vec<usize>,
    index: HashMap<usize, usize>,
    witness: Vec<Witness>,
}

#[derive(Debug)]
struct State {
    bound: usize,
    sorts: Vec<SortState>,
}

pub(crate) struct Generated {
    parent: FiniteAlgebra,
    fragment: Fragment,
    generators: Vec<(usize, usize)>,
    state: RwLock<State>,
}

impl Generated {
    pub fn new(
        parent: FiniteAlgebra,
        fragment: Fragment,
        generators: Vec<(usize, usize)>,
        bound: usize,
    ) -> Result<Self, AlgebraError> {
        if let Some(&(sort, _)) = generators.iter().find(|g| g.0 > bound) {
            return Err(AlgebraError::InsufficientSorts { sort, max_sort: bound });
        }
        let state = close(&parent, fragment, &generators, bound, None)?;
        Ok(Generated {
            parent,
            fragment,
            generators,
            state: RwLock::new(state),
        })
    }

    /// Materializes sorts up to `sort`, refusing if lower sorts would grow.
    fn ensure(&self, sort: usize) -> Result<(), AlgebraError> {
        if sort <= self.state.read().expect("lock").bound {
            return Ok(());
        }
        let mut state = self.state.write().expect("lock");
        if sort <= state.bound {
            return Ok(());
        }
        let next = close(&self.parent, self.fragment, &self.generators, sort, Some(&state))?;
        for s in 0..=state.bound {
            if next.sorts[s].elems.len() != state.sorts[s].elems.len() {
                return Err(AlgebraError::NotConservative { sort, grown: s });
            }
        }
        *state = next;
        Ok(())
    }

    fn read<R>(&self, sort: usize, f: impl FnOnce(&SortState) -> R) -> Result<R, AlgebraError> {
        self.ensure(sort)?;
        let state = self.state.read().expect("lock");
        Ok(f(&state.sorts[sort]))
    }

    pub fn size(&self, sort: usize) -> Result<usize, AlgebraError> {
        self.read(sort, |s| s.elems.len())
    }

    pub fn parent_index(&self, sort: usize, a: usize) -> Result<usize, AlgebraError> {
        self.read(sort, |s| {
            s.elems.get(a).copied().ok_or(AlgebraError::Element {
                sort,
                index: a,
                size: s.elems.len(),
            })
        })?
    }

    pub fn index_of(&self, sort: usize, parent: usize) -> Result<Option<usize>, AlgebraError> {
        self.read(sort, |s| s.index.get(&parent).copied())
    }

    fn lift(&self, sort: usize, parent: usize) -> Result<usize, AlgebraError> {
        self.index_of(sort, parent)?.ok_or_else(|| {
            AlgebraError::Mismatch(format!("parent element {parent} of sort {sort} escaped the closure"))
        })
    }

    pub fn witness(&self, sort: usize, a: usize) -> Result<Witness, AlgebraError> {
        self.read(sort, |s| s.witness.get(a).cloned())?
            .ok_or(AlgebraError::Element { sort, index: a, size: 0 })
    }

    pub fn zero(&self, sort: usize) -> Result<usize, AlgebraError> {
        self.lift(sort, self.parent.zero(sort)?)
    }

    pub fn one(&self, sort: usize) -> Result<usize, AlgebraError> {
        self.lift(sort, self.parent.one(sort)?)
    }

    pub fn meet(&self, sort: usize, a: usize, b: usize) -> Result<usize, AlgebraError> {
        let (x, y) = (self.parent_index(sort, a)?, self.parent_index(sort, b)?);
        self.lift(sort, self.parent.meet(sort, x, y)?)
    }

    pub fn join(&self, sort: usize, a: usize, b: usize) -> Result<usize, AlgebraError> {
        let (x, y) = (self.parent_index(sort, a)?, self.parent_index(sort, b)?);
        self.lift(sort, self.parent.join(sort, x, y)?)
    }

    pub fn neg(&self, sort: usize, a: usize) -> Result<usize, AlgebraError> {
        let x = self.parent_index(sort, a)?;
        self.lift(sort, self.parent.neg(sort, x)?)
    }

    pub fn subst(&self, alpha: &Substitution, a: usize) -> Result<usize, AlgebraError> {
        self.ensure(alpha.cod())?;
        let x = self.parent_index(alpha.dom(), a)?;
        self.lift(alpha.cod(), self.parent.subst(alpha, x)?)
    }

    pub fn exists(&self, n: usize, a: usize) -> Result<usize, AlgebraError> {
        let x = self.parent_index(n + 1, a)?;
        self.lift(n, self.parent.exists(n, x)?)
    }

    pub fn delta(&self, n: usize, i: usize, j: usize) -> Result<usize, AlgebraError> {
        self.lift(n, self.parent.delta(n, i, j)?)
    }

    pub fn describe(&self, sort: usize, a: usize) -> String {
        match self.parent_index(sort, a) {
            Ok(x) => self.parent.describe(sort, x),
            Err(_) => format!("#{a}"),
        }
    }
}

struct Builder {
    sorts: Vec<SortState>,
    queue: VecDeque<(usize, usize)>,
    cap: usize,
}

impl Builder {
    fn add(&mut self, sort: usize, value: usize, witness: Witness) -> Result<(), AlgebraError> {
        let s = &mut self.sorts[sort];
        if s.index.contains_key(&value) {
            return Ok(());
        }
        if s.elems.len() >= self.cap {
            return Err(AlgebraError::ResourceLimit {
                sort,
                size: format!("more than {}", self.cap),
                cap: self.cap,
            });
        }
        let i = s.elems.len();
        s.elems.push(value);
        s.index.insert(value, i);
        s.witness.push(witness);
        self.queue.push_back((sort, i));
        Ok(())
    }
}

/// Breadth-first closure within sorts `0..=bound`. Seeded elements keep their
/// indices; then generators in order, then constants.
fn close(
    parent: &FiniteAlgebra,
    fragment: Fragment,
    generators: &[(usize, usize)],
    bound: usize,
    seed: Option<&State>,
) -> Result<State, AlgebraError> {
    let mut b = Builder {
        sorts: vec![SortState::default(); bound + 1],
        queue: VecDeque::new(),
        cap: parent.cap(),
    };
    if let Some(seed) = seed {
        for (sort, s) in seed.sorts.iter().enumerate() {
            for (&value, w) in s.elems.iter().zip(&s.witness) {
                b.add(sort, value, w.clone())?;
            }
        }
    }
    for (g, &(sort, value)) in generators.iter().enumerate() {
        b.add(sort, value, Witness::Generator(g))?;
    }
    for sort in 0..=bound {
        b.add(sort, parent.zero(sort)?, Witness::Zero)?;
        b.add(sort, parent.one(sort)?, Witness::One)?;
        if fragment.equality {
            for i in 1..=sort {
                for j in 1..=sort {
                    b.add(sort, parent.delta(sort, i, j)?, Witness::Delta(i, j))?;
                }
            }
        }
    }
    let substitutions: Vec<Vec<Vec<Substitution>>> = (0..=bound)
        .map(|n| (0..=bound).map(|k| Substitution::all(n, k)).collect())
        .collect();
    while let Some((sort, i)) = b.queue.pop_front() {
        let x = b.sorts[sort].elems[i];
        for j in 0..=i {
            let y = b.sorts[sort].elems[j];
            b.add(sort, parent.meet(sort, x, y)?, Witness::Meet(i, j))?;
            b.add(sort, parent.join(sort, x, y)?, Witness::Join(i, j))?;
        }
        if fragment.has_negation() {
            b.add(sort, parent.neg(sort, x)?, Witness::Neg(i))?;
        }
        for (k, alphas) in substitutions[sort].iter().enumerate() {
            for alpha in alphas {
                b.add(k, parent.subst(alpha, x)?, Witness::Subst(alpha.clone(), i))?;
            }
        }
        if fragment.has_exists() && sort >= 1 {
            b.add(sort - 1, parent.exists(sort - 1, x)?, Witness::Exists(i))?;
        }
    }
    Ok(State { bound, sorts: b.sorts })
}
