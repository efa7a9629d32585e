//! Order theory of one sort at a time: join-irreducibles, prime filters, and
//! the constructions that glue prime filters on small sorts into a single
//! prime filter on a larger sort.
//!
//! Every filter and ideal of a finite lattice is principal, so filters are
//! passed around by generator. A prime filter of a finite distributive
//! lattice is `↑j` for a unique join-irreducible `j`, and its complement is
//! the ideal `↓m` where `m` is the join of all non-members.

use std::sync::{Arc, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{AlgebraError, FiniteAlgebra};
use crate::axioms::render_axiom0;
use crate::bits::BitSet;
use crate::exec::{map_range, Exec};
use crate::relation::Substitution;

/// Sorts up to this size have their lattice laws checked on every triple.
pub const EXHAUSTIVE_LAWS: usize = 64;
/// Triples sampled when a sort is too big for the exhaustive check.
pub const SAMPLED_LAWS: usize = 4096;
/// Largest sort whose join-irreducibles are enumerated in full.
pub const ENUMERATION_LIMIT: usize = 1 << 14;
/// Largest sort on which constructed filters are re-checked by the direct primality test.
pub const DIRECT_CHECK_LIMIT: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("sort {sort} is not a bounded distributive lattice: {law} fails at {elements:?}")]
    NotDistributive {
        sort: usize,
        law: &'static str,
        elements: Vec<usize>,
    },
    #[error("sort {sort} has {size} elements, too many to enumerate join-irreducibles")]
    TooLarge { sort: usize, size: usize },
    #[error("filter ↑{filter} and ideal ↓{ideal} of sort {sort} are not disjoint")]
    NotDisjoint { sort: usize, filter: usize, ideal: usize },
    #[error("axiom (0) obstruction: {shown}")]
    Obstruction {
        shape: Vec<usize>,
        r: Vec<usize>,
        s: Vec<usize>,
        shown: String,
    },
    #[error("witness obstruction on sort {sort}: {shown}")]
    WitnessObstruction { sort: usize, shown: String },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("postcondition failed: {0}")]
    Postcondition(String),
    #[error("not a prime filter: {0}")]
    NotPrime(String),
}

/// Whether constructions re-check their postconditions before returning.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Verify {
    #[default]
    On,
    Off,
}

/// How the lattice laws of a sort were established.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase", tag = "mode")]
pub enum LawCheck {
    Exhaustive,
    Sampled { samples: usize },
}

/// One sort of an algebra, checked to be a bounded distributive lattice.
#[derive(Debug)]
pub struct SortLattice {
    sort: usize,
    size: usize,
    zero: usize,
    one: usize,
    laws: LawCheck,
    irreducibles: OnceLock<Vec<usize>>,
}

impl SortLattice {
    pub fn sort(&self) -> usize {
        self.sort
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn zero(&self) -> usize {
        self.zero
    }

    pub fn one(&self) -> usize {
        self.one
    }

    pub fn laws(&self) -> LawCheck {
        self.laws
    }
}

/// The cached lattice of `sort`, verifying the laws the first time.
pub fn lattice(alg: &FiniteAlgebra, sort: usize) -> Result<Arc<SortLattice>, LatticeError> {
    if let Some(l) = alg.lattice_cache().read().expect("lock").get(&sort) {
        return Ok(l.clone());
    }
    let built = Arc::new(build(alg, sort)?);
    let mut cache = alg.lattice_cache().write().expect("lock");
    Ok(cache.entry(sort).or_insert(built).clone())
}

fn build(alg: &FiniteAlgebra, sort: usize) -> Result<SortLattice, LatticeError> {
    let size = alg.size(sort)?;
    let (zero, one) = (alg.zero(sort)?, alg.one(sort)?);
    let laws = if size <= EXHAUSTIVE_LAWS {
        for a in 0..size {
            for b in 0..size {
                for c in 0..size {
                    check_laws(alg, sort, zero, one, [a, b, c])?;
                }
            }
        }
        LawCheck::Exhaustive
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(sort as u64);
        for _ in 0..SAMPLED_LAWS {
            let t = [rng.gen_range(0..size), rng.gen_range(0..size), rng.gen_range(0..size)];
            check_laws(alg, sort, zero, one, t)?;
        }
        LawCheck::Sampled { samples: SAMPLED_LAWS }
    };
    Ok(SortLattice {
        sort,
        size,
        zero,
        one,
        laws,
        irreducibles: OnceLock::new(),
    })
}

fn check_laws(alg: &FiniteAlgebra, sort: usize, zero: usize, one: usize, t: [usize; 3]) -> Result<(), LatticeError> {
    let [a, b, c] = t;
    let m = |x, y| alg.meet(sort, x, y);
    let j = |x, y| alg.join(sort, x, y);
    let fail = |law| {
        Err(LatticeError::NotDistributive {
            sort,
            law,
            elements: t.to_vec(),
        })
    };
    if m(a, b)? != m(b, a)? || j(a, b)? != j(b, a)? {
        return fail("commutativity");
    }
    if m(a, m(b, c)?)? != m(m(a, b)?, c)? || j(a, j(b, c)?)? != j(j(a, b)?, c)? {
        return fail("associativity");
    }
    if m(a, j(a, b)?)? != a || j(a, m(a, b)?)? != a {
        return fail("absorption");
    }
    if m(a, zero)? != zero || j(a, one)? != one || j(a, zero)? != a || m(a, one)? != a {
        return fail("bounds");
    }
    if m(a, j(b, c)?)? != j(m(a, b)?, m(a, c)?)? {
        return fail("distributivity");
    }
    Ok(())
}

/// `j ≠ 0` and `j` is not the join of the elements strictly below it.
pub fn is_join_irreducible(alg: &FiniteAlgebra, sort: usize, j: usize) -> Result<bool, LatticeError> {
    let l = lattice(alg, sort)?;
    if j == l.zero {
        return Ok(false);
    }
    let mut below = l.zero;
    for x in 0..l.size {
        if x != j && alg.leq(sort, x, j)? {
            below = alg.join(sort, below, x)?;
        }
    }
    Ok(below != j)
}

/// All join-irreducibles of `sort`, in index order.
pub fn join_irreducibles(alg: &FiniteAlgebra, sort: usize) -> Result<Vec<usize>, LatticeError> {
    let l = lattice(alg, sort)?;
    if let Some(v) = l.irreducibles.get() {
        return Ok(v.clone());
    }
    if l.size > ENUMERATION_LIMIT {
        return Err(LatticeError::TooLarge { sort, size: l.size });
    }
    let flags = map_range(Exec::default(), l.size, |j| is_join_irreducible(alg, sort, j));
    let mut out = Vec::new();
    for (j, flag) in flags.into_iter().enumerate() {
        if flag? {
            out.push(j);
        }
    }
    Ok(l.irreducibles.get_or_init(|| out).clone())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeFilter {
    sort: usize,
    generator: usize,
    complement: usize,
    members: BitSet,
}

impl PrimeFilter {
    /// `↑j`, with the join of its non-members as the complementary ideal.
    pub fn principal(alg: &FiniteAlgebra, sort: usize, j: usize) -> Result<Self, LatticeError> {
        let size = alg.size(sort)?;
        alg.check(sort, j)?;
        let mut members = BitSet::new(size);
        let mut complement = alg.zero(sort)?;
        for x in 0..size {
            if alg.leq(sort, j, x)? {
                members.set(x, true);
            } else {
                complement = alg.join(sort, complement, x)?;
            }
        }
        if members.get(complement) || members.get(alg.zero(sort)?) {
            return Err(LatticeError::NotPrime(format!("↑{} on sort {sort}", alg.describe(sort, j))));
        }
        Ok(PrimeFilter {
            sort,
            generator: j,
            complement,
            members,
        })
    }

    pub fn sort(&self) -> usize {
        self.sort
    }

    /// The join-irreducible `j` with `F = ↑j`, the least member.
    pub fn generator(&self) -> usize {
        self.generator
    }

    /// The greatest non-member.
    pub fn complement(&self) -> usize {
        self.complement
    }

    pub fn contains(&self, x: usize) -> bool {
        x < self.members.len() && self.members.get(x)
    }

    pub fn members(&self) -> &BitSet {
        &self.members
    }
}

/// The filters `↑j` for `j` join-irreducible, each re-checked by
/// [`is_prime_filter`].
pub fn prime_filters(alg: &FiniteAlgebra, sort: usize) -> Result<Vec<PrimeFilter>, LatticeError> {
    let filters = join_irreducibles(alg, sort)?
        .into_iter()
        .map(|j| PrimeFilter::principal(alg, sort, j))
        .collect::<Result<Vec<_>, _>>()?;
    for f in &filters {
        if !is_prime_filter(alg, sort, f.members())? {
            return Err(LatticeError::NotPrime(format!("↑{} on sort {sort}", alg.describe(sort, f.generator))));
        }
    }
    Ok(filters)
}

/// The definition, checked directly: proper, upward closed, closed under
/// meets, and prime.
pub fn is_prime_filter(alg: &FiniteAlgebra, sort: usize, set: &BitSet) -> Result<bool, LatticeError> {
    let size = alg.size(sort)?;
    if set.len() != size || set.get(alg.zero(sort)?) || !set.get(alg.one(sort)?) {
        return Ok(false);
    }
    for a in 0..size {
        for b in 0..size {
            let (ia, ib) = (set.get(a), set.get(b));
            if ia && alg.leq(sort, a, b)? && !ib {
                return Ok(false);
            }
            if ia && ib && !set.get(alg.meet(sort, a, b)?) {
                return Ok(false);
            }
            if !ia && !ib && set.get(alg.join(sort, a, b)?) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// A prime filter containing `↑g` and missing `↓m`: `↑j` for the least
/// join-irreducible `j` with `j ≤ g` and `j ≰ m`.
pub fn extend_to_prime(
    alg: &FiniteAlgebra,
    sort: usize,
    g: usize,
    m: usize,
    verify: Verify,
) -> Result<PrimeFilter, LatticeError> {
    let l = lattice(alg, sort)?;
    alg.check(sort, g)?;
    alg.check(sort, m)?;
    if alg.leq(sort, g, m)? {
        return Err(LatticeError::NotDisjoint { sort, filter: g, ideal: m });
    }
    let candidate = |j: usize| -> Result<bool, LatticeError> {
        Ok(alg.leq(sort, j, g)? && !alg.leq(sort, j, m)?)
    };
    let mut chosen = None;
    if let Some(jis) = l.irreducibles.get() {
        for &j in jis {
            if candidate(j)? {
                chosen = Some(j);
                break;
            }
        }
    } else {
        for j in 0..l.size {
            if candidate(j)? && is_join_irreducible(alg, sort, j)? {
                chosen = Some(j);
                break;
            }
        }
    }
    let j = chosen.ok_or_else(|| {
        LatticeError::Postcondition(format!("no join-irreducible below {g} and outside ↓{m} in sort {sort}"))
    })?;
    let f = PrimeFilter::principal(alg, sort, j)?;
    if verify == Verify::On {
        if !f.contains(g) || f.contains(m) {
            return Err(LatticeError::Postcondition(format!(
                "↑{j} does not separate ↑{g} from ↓{m} in sort {sort}"
            )));
        }
        if l.size <= DIRECT_CHECK_LIMIT && !is_prime_filter(alg, sort, f.members())? {
            return Err(LatticeError::NotPrime(format!("↑{j} on sort {sort}")));
        }
    }
    Ok(f)
}

/// One prime filter on sort `k₁ + … + k_m` that restricts to `F^i` along the
/// `i`th partitioning cylindrification: `c_i(r) ∈ G ⇔ r ∈ F^i`.
pub fn sum_filters(alg: &FiniteAlgebra, filters: &[PrimeFilter], verify: Verify) -> Result<PrimeFilter, LatticeError> {
    let shape: Vec<usize> = filters.iter().map(|f| f.sort).collect();
    let n: usize = shape.iter().sum();
    let cs = Substitution::partitioning(&shape);
    let (mut gf, mut gi) = (alg.one(n)?, alg.zero(n)?);
    for (f, c) in filters.iter().zip(&cs) {
        gf = alg.meet(n, gf, alg.subst(c, f.generator)?)?;
        gi = alg.join(n, gi, alg.subst(c, f.complement)?)?;
    }
    if alg.leq(n, gf, gi)? {
        let r: Vec<usize> = filters.iter().map(|f| f.generator).collect();
        let s: Vec<usize> = filters.iter().map(|f| f.complement).collect();
        let shown = render_axiom0(&r, &s, &|i, x| alg.describe(shape[i], x));
        return Err(LatticeError::Obstruction { shape, r, s, shown });
    }
    let g = extend_to_prime(alg, n, gf, gi, verify)?;
    if verify == Verify::On {
        for (i, (f, c)) in filters.iter().zip(&cs).enumerate() {
            for r in alg.elements(f.sort)? {
                if g.contains(alg.subst(c, r)?) != f.contains(r) {
                    return Err(LatticeError::Postcondition(format!(
                        "block {} disagrees at {}",
                        i + 1,
                        alg.describe(f.sort, r)
                    )));
                }
            }
        }
    }
    Ok(g)
}

/// A prime filter `G` on sort `n + 1` with `r ∈ G` and `c(u) ∈ G ⇔ u ∈ F`,
/// where `c` is the associated cylindrification. Needs `∃r ∈ F`.
pub fn project_filter(alg: &FiniteAlgebra, f: &PrimeFilter, r: usize, verify: Verify) -> Result<PrimeFilter, LatticeError> {
    let n = f.sort;
    let er = alg.exists(n, r)?;
    if !f.contains(er) {
        return Err(LatticeError::Precondition(format!(
            "∃{} = {} is not in the filter",
            alg.describe(n + 1, r),
            alg.describe(n, er)
        )));
    }
    let c = Substitution::assoc_cylindrification(n);
    let gf = alg.meet(n + 1, r, alg.subst(&c, f.generator)?)?;
    let gi = alg.subst(&c, f.complement)?;
    let g = extend_to_prime(alg, n + 1, gf, gi, verify)?;
    if verify == Verify::On {
        if !g.contains(r) {
            return Err(LatticeError::Postcondition(format!("{} is not in G", alg.describe(n + 1, r))));
        }
        let back = pullback_filter(alg, &g)?;
        if back.members != f.members {
            return Err(LatticeError::Postcondition("pullback of G differs from F".into()));
        }
    }
    Ok(g)
}

/// `{u : c(u) ∈ G}` for the associated cylindrification `c`.
pub fn pullback_filter(alg: &FiniteAlgebra, g: &PrimeFilter) -> Result<PrimeFilter, LatticeError> {
    if g.sort == 0 {
        return Err(LatticeError::Precondition("sort 0 has no pullback".into()));
    }
    pullback_along(alg, g, &Substitution::assoc_cylindrification(g.sort - 1))
}

/// `{u : α(u) ∈ G}`, checked to be the prime filter `↑` of its least member.
pub fn pullback_along(alg: &FiniteAlgebra, g: &PrimeFilter, alpha: &Substitution) -> Result<PrimeFilter, LatticeError> {
    if alpha.cod() != g.sort {
        return Err(LatticeError::Precondition(format!(
            "substitution {alpha} does not land in sort {}",
            g.sort
        )));
    }
    let n = alpha.dom();
    let size = alg.size(n)?;
    let mut members = BitSet::new(size);
    let mut least = alg.one(n)?;
    for u in 0..size {
        if g.contains(alg.subst(alpha, u)?) {
            members.set(u, true);
            least = alg.meet(n, least, u)?;
        }
    }
    let f = PrimeFilter::principal(alg, n, least)?;
    if f.members != members {
        return Err(LatticeError::NotPrime(format!("pullback of ↑{} along {alpha}", g.generator)));
    }
    Ok(f)
}

/// The prime filter `H` on sort `m + n` from the witness construction, for
/// `p` on sort `m` and pairs `(G_i, α_i)` with `G_i` on sort `k_i + 1` and
/// `α_i: k_i → m`. With `β₀: m → m + n` the inclusion and `β_i` extending
/// `α_i` by `k_i + 1 ↦ m + i`, it satisfies `β₀(r) ∈ H ⇔ r ∈ p` and
/// `r ∈ G_i ⇒ β_i(r) ∈ H`.
pub fn witness_filter(
    alg: &FiniteAlgebra,
    p: &PrimeFilter,
    pairs: &[(PrimeFilter, Substitution)],
    verify: Verify,
) -> Result<PrimeFilter, LatticeError> {
    let m = p.sort;
    let n = pairs.len();
    let mut betas = Vec::with_capacity(n);
    for (i, (g, alpha)) in pairs.iter().enumerate() {
        if alpha.cod() != m || g.sort != alpha.dom() + 1 {
            return Err(LatticeError::Precondition(format!(
                "pair {} is ill-sorted: filter on sort {}, substitution {alpha}",
                i + 1,
                g.sort
            )));
        }
        let down = pullback_filter(alg, g)?;
        let image = pullback_along(alg, p, alpha)?;
        if down.members != image.members {
            return Err(LatticeError::Precondition(format!(
                "pair {}: pullback of G differs from the type of the tuple",
                i + 1
            )));
        }
        let mut map = alpha.map().to_vec();
        map.push(m + i + 1);
        betas.push(Substitution::new(map, m + n).map_err(AlgebraError::from)?);
    }
    let beta0 = Substitution::new((1..=m).collect(), m + n).map_err(AlgebraError::from)?;
    let mut hf = alg.subst(&beta0, p.generator)?;
    for ((g, _), beta) in pairs.iter().zip(&betas) {
        hf = alg.meet(m + n, hf, alg.subst(beta, g.generator)?)?;
    }
    let hi = alg.subst(&beta0, p.complement)?;
    if alg.leq(m + n, hf, hi)? {
        return Err(LatticeError::WitnessObstruction {
            sort: m + n,
            shown: format!("{} ≤ {}", alg.describe(m + n, hf), alg.describe(m + n, hi)),
        });
    }
    let h = extend_to_prime(alg, m + n, hf, hi, verify)?;
    if verify == Verify::On {
        for r in alg.elements(m)? {
            if h.contains(alg.subst(&beta0, r)?) != p.contains(r) {
                return Err(LatticeError::Postcondition(format!(
                    "β₀({}) membership disagrees with p",
                    alg.describe(m, r)
                )));
            }
        }
        for (i, ((g, _), beta)) in pairs.iter().zip(&betas).enumerate() {
            for r in g.members.ones() {
                if !h.contains(alg.subst(beta, r)?) {
                    return Err(LatticeError::Postcondition(format!(
                        "β{}({}) is not in H",
                        i + 1,
                        alg.describe(g.sort, r)
                    )));
                }
            }
        }
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fragment::Fragment;
    use crate::relation::Universe;

    fn concrete(w: usize, f: Fragment, n: usize) -> FiniteAlgebra {
        FiniteAlgebra::concrete(Universe::new(w), f, n).unwrap()
    }

    fn diamond() -> FiniteAlgebra {
        let one = concrete(1, Fragment::QF, 2);
        FiniteAlgebra::product(vec![one.clone(), one]).unwrap()
    }

    #[test]
    fn irreducibles_of_small_lattices() {
        let alg = concrete(2, Fragment::PQF, 2);
        assert_eq!(join_irreducibles(&alg, 1).unwrap(), vec![1, 2]);
        assert_eq!(join_irreducibles(&alg, 0).unwrap(), vec![1]);
        assert_eq!(join_irreducibles(&alg, 2).unwrap(), vec![1, 2, 4, 8]);
        assert_eq!(join_irreducibles(&diamond(), 1).unwrap(), vec![1, 2]);
    }

    #[test]
    fn chain_irreducibles() {
        let parent = concrete(2, Fragment::PQF, 1);
        let chain = FiniteAlgebra::generated_subalgebra(&parent, Fragment::PQF, &[(1, 1)]).unwrap();
        assert_eq!(chain.size(1).unwrap(), 3);
        let top = chain.one(1).unwrap();
        assert_eq!(join_irreducibles(&chain, 1).unwrap(), vec![0, top]);
    }

    #[test]
    fn prime_filters_match_brute_force_on_sort_two() {
        let alg = concrete(2, Fragment::PQF, 2);
        let filters = prime_filters(&alg, 2).unwrap();
        assert_eq!(filters.len(), 4);
        let mut brute = Vec::new();
        for mask in 0u64..(1 << 16) {
            let set = BitSet::from_mask(16, mask);
            if is_prime_filter(&alg, 2, &set).unwrap() {
                brute.push(set);
            }
        }
        let found: Vec<BitSet> = filters.iter().map(|f| f.members().clone()).collect();
        assert_eq!(found, brute);
    }

    #[test]
    fn extend_examples() {
        let d = diamond();
        assert_eq!(extend_to_prime(&d, 1, 1, 2, Verify::On).unwrap().generator(), 1);
        let alg = concrete(2, Fragment::PQF, 1);
        assert_eq!(extend_to_prime(&alg, 1, 3, 0, Verify::On).unwrap().generator(), 1);
        assert!(matches!(
            extend_to_prime(&alg, 1, 1, 3, Verify::On),
            Err(LatticeError::NotDisjoint { .. })
        ));
    }

    #[test]
    fn sum_of_two_singletons() {
        let alg = concrete(2, Fragment::PQF, 2);
        let f1 = PrimeFilter::principal(&alg, 1, 1).unwrap();
        let f2 = PrimeFilter::principal(&alg, 1, 2).unwrap();
        let g = sum_filters(&alg, &[f1.clone(), f2.clone()], Verify::On).unwrap();
        assert_eq!(g.generator(), 1 << 1);
        let single = sum_filters(&alg, std::slice::from_ref(&f1), Verify::On).unwrap();
        assert_eq!(single, f1);
        let back = pullback_along(&alg, &g, &Substitution::partitioning(&[1, 1])[1]).unwrap();
        assert_eq!(back, f2);
    }

    #[test]
    fn diamond_sum_is_obstructed() {
        let d = diamond();
        let fa = PrimeFilter::principal(&d, 1, 1).unwrap();
        let fb = PrimeFilter::principal(&d, 1, 2).unwrap();
        match sum_filters(&d, &[fa, fb], Verify::On) {
            Err(LatticeError::Obstruction { r, s, .. }) => {
                assert_eq!(r, vec![1, 2]);
                assert_eq!(s, vec![2, 1]);
            }
            other => panic!("expected an obstruction, got {other:?}"),
        }
    }

    #[test]
    fn project_and_pullback() {
        let alg = concrete(2, Fragment::PE, 2);
        let f = PrimeFilter::principal(&alg, 1, 1).unwrap();
        let g = project_filter(&alg, &f, 1 << 1, Verify::On).unwrap();
        assert_eq!(g.generator(), 1 << 1);
        assert_eq!(pullback_filter(&alg, &g).unwrap(), f);
        let bad = PrimeFilter::principal(&alg, 1, 2).unwrap();
        assert!(project_filter(&alg, &bad, 1 << 2, Verify::On).is_ok());
        assert!(matches!(
            project_filter(&alg, &bad, 1 << 1, Verify::On),
            Err(LatticeError::Precondition(_))
        ));
    }

    #[test]
    fn witness_examples() {
        let alg = concrete(2, Fragment::PE, 2);
        let p = PrimeFilter::principal(&alg, 1, 1).unwrap();
        assert_eq!(witness_filter(&alg, &p, &[], Verify::On).unwrap(), p);
        let g = PrimeFilter::principal(&alg, 2, 1 << 1).unwrap();
        let h = witness_filter(&alg, &p, &[(g.clone(), Substitution::identity(1))], Verify::On).unwrap();
        assert_eq!(h.generator(), 1 << 1);
        let q = PrimeFilter::principal(&alg, 1, 2).unwrap();
        assert!(matches!(
            witness_filter(&alg, &q, &[(g, Substitution::identity(1))], Verify::On),
            Err(LatticeError::Precondition(_))
        ));
    }

    #[test]
    fn corrupted_meet_is_not_a_lattice() {
        let alg = concrete(2, Fragment::PQF, 1);
        let bad = alg.with_corrupted_meet(1, 1, 2, 3).unwrap();
        assert!(matches!(lattice(&bad, 1), Err(LatticeError::NotDistributive { .. })));
    }
}
