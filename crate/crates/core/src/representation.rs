//! Representations of finite algebras as algebras of relations.
//!
//! A prime filter `F` on sort `n` gives a structure whose points are the
//! formal coordinates `F₁, …, Fₙ` (identified along the diagonals in `F` when
//! equality is present). An element `r` of sort `k` is sent to the set of
//! tuples `(F_{α(1)}, …, F_{α(k)})` with `α(r) ∈ F`. Gluing enough prime
//! filters into one gives an injective map, and for the existential
//! fragments further prime filters add witnesses round by round.

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{
    kernel, verify_morphism, AlgebraError, ConcreteTarget, FiniteAlgebra, MorphismMap, MorphismMode, MorphismReport,
    MorphismViolation,
};
use crate::exec::{map_range, Exec};
use crate::fragment::Fragment;
use crate::lattice::{
    is_join_irreducible, join_irreducibles, prime_filters, pullback_along, pullback_filter, sum_filters, witness_filter,
    LatticeError, PrimeFilter, Verify,
};
use crate::relation::{Relation, Substitution, Universe};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RepresentationError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("ill-defined on sort {sort}: element {element} under {alpha} and {beta} name the same tuple but disagree")]
    IllDefined {
        sort: usize,
        element: usize,
        alpha: Substitution,
        beta: Substitution,
    },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("not a morphism: {0}")]
    NotMorphic(MorphismViolation),
    #[error("not injective on sort {sort}: {a} and {b} have the same image")]
    NotInjective { sort: usize, a: usize, b: usize },
    #[error("stage {round} changed an old tuple: {detail}")]
    NotPreserved { round: usize, detail: String },
}

impl RepresentationError {
    /// Whether this failure is an axiom (0) obstruction in the gluing step.
    pub fn is_obstruction(&self) -> bool {
        matches!(self, RepresentationError::Lattice(LatticeError::Obstruction { .. }))
    }
}

fn restrict(alg: &FiniteAlgebra, fragment: Fragment) -> Result<FiniteAlgebra, RepresentationError> {
    if fragment == alg.fragment() {
        Ok(alg.clone())
    } else {
        Ok(alg.reduct(fragment)?)
    }
}

fn mode_for(fragment: Fragment) -> MorphismMode {
    if fragment.has_exists() {
        MorphismMode::Almost
    } else {
        MorphismMode::Strict
    }
}

/// The structure induced by one prime filter, with the map into it.
#[derive(Debug, Clone)]
pub struct FilterModel {
    fragment: Fragment,
    filter: PrimeFilter,
    classes: Vec<usize>,
    reps: Vec<usize>,
    map: MorphismMap<ConcreteTarget>,
    report: MorphismReport,
}

impl FilterModel {
    pub fn fragment(&self) -> Fragment {
        self.fragment
    }

    pub fn filter(&self) -> &PrimeFilter {
        &self.filter
    }

    pub fn universe(&self) -> Universe {
        self.map.target.0
    }

    /// The point each coordinate `1..=n` became, zero-based.
    pub fn classes(&self) -> &[usize] {
        &self.classes
    }

    pub fn scope(&self) -> usize {
        self.map.scope()
    }

    pub fn map(&self) -> &MorphismMap<ConcreteTarget> {
        &self.map
    }

    pub fn phi(&self, sort: usize, r: usize) -> &Relation {
        self.map.image(sort, r)
    }

    /// The morphic (strict) or almost-morphic check of the fragment.
    pub fn report(&self) -> &MorphismReport {
        &self.report
    }

    pub fn is_verified(&self) -> bool {
        self.report.is_ok()
    }

    /// The tuple `(F_1, …, F_n)` of all coordinates.
    pub fn generic_tuple(&self) -> Vec<usize> {
        self.classes.clone()
    }

    /// The substitution naming a tuple of points by least coordinates.
    fn naming(&self, tuple: &[usize]) -> Substitution {
        let map = tuple.iter().map(|&p| self.reps[p] + 1).collect();
        Substitution::new(map, self.classes.len()).expect("representatives are coordinates")
    }
}

/// Builds the map of `F` on sorts `0..=scope` and checks it: strictly for
/// fragments without projection, up to `∃φ(r) ⊆ φ(∃r)` otherwise.
pub fn filter_to_morphism(
    alg: &FiniteAlgebra,
    filter: &PrimeFilter,
    fragment: Fragment,
    scope: usize,
) -> Result<FilterModel, RepresentationError> {
    let alg = restrict(alg, fragment)?;
    let n = filter.sort();
    let mut classes = vec![usize::MAX; n];
    let mut reps = Vec::new();
    for i in 0..n {
        if classes[i] != usize::MAX {
            continue;
        }
        classes[i] = reps.len();
        if fragment.equality {
            for j in i + 1..n {
                if filter.contains(alg.delta(n, i + 1, j + 1)?) {
                    classes[j] = reps.len();
                }
            }
        }
        reps.push(i);
    }
    if fragment.equality {
        for i in 0..n {
            for j in 0..n {
                let same = filter.contains(alg.delta(n, i + 1, j + 1)?);
                if same != (classes[i] == classes[j]) {
                    return Err(RepresentationError::Precondition(format!(
                        "the diagonals in the filter are not an equivalence at coordinates {} and {}",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
    }
    let universe = Universe::new(reps.len());
    let mut images = Vec::with_capacity(scope + 1);
    for k in 0..=scope {
        let size = alg.size(k)?;
        let tuples: Vec<Vec<usize>> = universe.tuples(k).collect();
        let alphas = Substitution::all(k, n);
        let row = map_range(Exec::default(), size, |r| -> Result<Relation, RepresentationError> {
            let mut rel = Relation::empty(universe, k).map_err(AlgebraError::from)?;
            for t in &tuples {
                let alpha = Substitution::new(t.iter().map(|&p| reps[p] + 1).collect(), n).map_err(AlgebraError::from)?;
                if filter.contains(alg.subst(&alpha, r)?) {
                    rel.insert(t).map_err(AlgebraError::from)?;
                }
            }
            if fragment.equality {
                for beta in &alphas {
                    let t: Vec<usize> = beta.map().iter().map(|&i| classes[i - 1]).collect();
                    if filter.contains(alg.subst(beta, r)?) != rel.contains(&t) {
                        let alpha = Substitution::new(t.iter().map(|&p| reps[p] + 1).collect(), n)
                            .map_err(AlgebraError::from)?;
                        return Err(RepresentationError::IllDefined {
                            sort: k,
                            element: r,
                            alpha,
                            beta: beta.clone(),
                        });
                    }
                }
            }
            Ok(rel)
        });
        images.push(row.into_iter().collect::<Result<Vec<_>, _>>()?);
    }
    let map = MorphismMap {
        target: ConcreteTarget(universe),
        images,
    };
    let report = verify_morphism(&alg, &map, mode_for(fragment), Exec::default())?;
    Ok(FilterModel {
        fragment,
        filter: filter.clone(),
        classes,
        reps,
        map,
        report,
    })
}

/// The least prime filter, by generator, containing exactly one of `r`, `s`.
pub fn separating_filter(alg: &FiniteAlgebra, sort: usize, r: usize, s: usize) -> Result<PrimeFilter, RepresentationError> {
    if r == s {
        return Err(RepresentationError::Precondition(format!("{r} = {s}: nothing to separate")));
    }
    let splits = |j: usize| -> Result<bool, AlgebraError> { Ok(alg.leq(sort, j, r)? != alg.leq(sort, j, s)?) };
    let chosen = match join_irreducibles(alg, sort) {
        Ok(jis) => {
            let mut found = None;
            for j in jis {
                if splits(j)? {
                    found = Some(j);
                    break;
                }
            }
            found
        }
        Err(LatticeError::TooLarge { .. }) => {
            let mut found = None;
            for j in alg.elements(sort)? {
                if splits(j)? && is_join_irreducible(alg, sort, j)? {
                    found = Some(j);
                    break;
                }
            }
            found
        }
        Err(e) => return Err(e.into()),
    };
    let j = chosen.ok_or_else(|| {
        RepresentationError::Precondition(format!("no prime filter of sort {sort} separates {r} and {s}"))
    })?;
    Ok(PrimeFilter::principal(alg, sort, j)?)
}

/// A model in which `r` and `s` differ on the generic tuple.
pub fn separate(
    alg: &FiniteAlgebra,
    sort: usize,
    r: usize,
    s: usize,
    fragment: Fragment,
) -> Result<FilterModel, RepresentationError> {
    let f = separating_filter(alg, sort, r, s)?;
    let model = filter_to_morphism(alg, &f, fragment, sort)?;
    let generic = model.generic_tuple();
    if model.phi(sort, r).contains(&generic) == model.phi(sort, s).contains(&generic) {
        return Err(RepresentationError::Precondition(format!(
            "the generic tuple does not tell {r} and {s} apart"
        )));
    }
    Ok(model)
}

/// An unmet witness demand: no point extends `tuple` to realize the prime
/// filter `↑generator` on sort `tuple.len() + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Obligation {
    pub tuple: Vec<usize>,
    pub sort: usize,
    pub generator: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase", tag = "status")]
pub enum Status {
    Full,
    Almost { remaining: Vec<Obligation> },
}

#[derive(Debug, Clone)]
pub struct EmbeddingCertificate {
    pub fragment: Fragment,
    pub scope: usize,
    /// The prime filters glued into the master filter, if this came from gluing.
    pub separating: Vec<PrimeFilter>,
    pub model: FilterModel,
    pub transcript: Vec<String>,
    pub rounds: usize,
    pub status: Status,
}

impl EmbeddingCertificate {
    pub fn is_full(&self) -> bool {
        self.status == Status::Full
    }

    pub fn universe_size(&self) -> usize {
        self.model.universe().size()
    }

    /// Every element of the scoped sorts with its image.
    pub fn listing(&self, alg: &FiniteAlgebra) -> Vec<ListingEntry> {
        let mut out = Vec::new();
        for (sort, row) in self.model.map.images.iter().enumerate() {
            for (element, rel) in row.iter().enumerate() {
                out.push(ListingEntry {
                    sort,
                    element,
                    shown: alg.describe(sort, element),
                    image: rel.to_string(),
                });
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ListingEntry {
    pub sort: usize,
    pub element: usize,
    pub shown: String,
    pub image: String,
}

fn check_injective(model: &FilterModel, transcript: &mut Vec<String>) -> Result<(), RepresentationError> {
    for sort in 0..=model.scope() {
        if let Some(&(a, b)) = kernel(&model.map, sort).first() {
            return Err(RepresentationError::NotInjective { sort, a, b });
        }
        transcript.push(format!("injective on sort {sort}: ok"));
    }
    Ok(())
}

fn describe_report(report: &MorphismReport) -> String {
    let kind = match report.mode {
        MorphismMode::Strict => "morphism",
        MorphismMode::Almost => "almost morphism",
    };
    format!("{kind} on sorts ≤ {}: {} checks, ok", report.scope, report.checks)
}

/// One separating filter per pair of distinct elements in sorts `0..=scope`,
/// glued into a master filter.
fn glue(alg: &FiniteAlgebra, fragment: Fragment, scope: usize) -> Result<(Vec<PrimeFilter>, FilterModel, Vec<String>), RepresentationError> {
    let alg = restrict(alg, fragment)?;
    let mut family: Vec<PrimeFilter> = Vec::new();
    for sort in 0..=scope {
        let size = alg.size(sort)?;
        for r in 0..size {
            for s in r + 1..size {
                let f = separating_filter(&alg, sort, r, s)?;
                if !family.iter().any(|g| g.sort() == f.sort() && g.generator() == f.generator()) {
                    family.push(f);
                }
            }
        }
    }
    family.sort_by_key(|f| (f.sort(), f.generator()));
    let mut transcript = vec![format!(
        "separating filters: {} on sorts ({})",
        family.len(),
        family.iter().map(|f| f.sort().to_string()).collect::<Vec<_>>().join(",")
    )];
    let master = sum_filters(&alg, &family, Verify::On)?;
    transcript.push(format!(
        "master filter ↑{} on sort {}",
        alg.describe(master.sort(), master.generator()),
        master.sort()
    ));
    let model = filter_to_morphism(&alg, &master, fragment, scope)?;
    if let Some(v) = &model.report.violation {
        return Err(RepresentationError::NotMorphic(v.clone()));
    }
    transcript.push(describe_report(&model.report));
    check_injective(&model, &mut transcript)?;
    Ok((family, model, transcript))
}

/// An injective morphism into a concrete algebra, for fragments without projection.
pub fn embed(alg: &FiniteAlgebra, fragment: Fragment, scope: usize) -> Result<EmbeddingCertificate, RepresentationError> {
    if fragment.has_exists() {
        return Err(RepresentationError::Precondition(format!(
            "fragment {fragment} has projection; use an almost morphism and saturate"
        )));
    }
    let (separating, model, transcript) = glue(alg, fragment, scope)?;
    Ok(EmbeddingCertificate {
        fragment,
        scope,
        separating,
        model,
        transcript,
        rounds: 0,
        status: Status::Full,
    })
}

/// An injective almost morphism, for fragments with projection. The status
/// lists the witnesses still missing.
pub fn one_to_one_almost_morphism(
    alg: &FiniteAlgebra,
    fragment: Fragment,
    scope: usize,
) -> Result<EmbeddingCertificate, RepresentationError> {
    let (separating, model, mut transcript) = glue(alg, fragment, scope)?;
    let alg = restrict(alg, fragment)?;
    let status = settle(&alg, &model, &mut transcript)?;
    Ok(EmbeddingCertificate {
        fragment,
        scope,
        separating,
        model,
        transcript,
        rounds: 0,
        status,
    })
}

struct Demand {
    obligation: Obligation,
    alpha: Substitution,
    filter: PrimeFilter,
}

/// Witness demands of `model` on tuples of length `k` with `k + 1 ≤ scope`.
fn demands(alg: &FiniteAlgebra, model: &FilterModel) -> Result<Vec<Demand>, RepresentationError> {
    let universe = model.universe();
    let f = &model.filter;
    let mut out = Vec::new();
    for k in 0..model.scope() {
        let candidates = prime_filters(alg, k + 1)?;
        let downs = candidates
            .iter()
            .map(|g| pullback_filter(alg, g))
            .collect::<Result<Vec<_>, _>>()?;
        let tuples: Vec<Vec<usize>> = universe.tuples(k).collect();
        let found = map_range(Exec::default(), tuples.len(), |t| -> Result<Vec<Demand>, RepresentationError> {
            let tuple = &tuples[t];
            let alpha = model.naming(tuple);
            let kind = pullback_along(alg, f, &alpha)?;
            let mut missing = Vec::new();
            for (g, down) in candidates.iter().zip(&downs) {
                if down.members() != kind.members() {
                    continue;
                }
                let mut realized = false;
                for b in 0..universe.size() {
                    let mut ext = tuple.clone();
                    ext.push(b);
                    if f.contains(alg.subst(&model.naming(&ext), g.generator())?) {
                        realized = true;
                        break;
                    }
                }
                if !realized {
                    missing.push(Demand {
                        obligation: Obligation {
                            tuple: tuple.clone(),
                            sort: k + 1,
                            generator: g.generator(),
                        },
                        alpha: alpha.clone(),
                        filter: g.clone(),
                    });
                }
            }
            Ok(missing)
        });
        for d in found {
            out.extend(d?);
        }
    }
    Ok(out)
}

/// Full status needs no demands and a strict morphism check.
fn settle(alg: &FiniteAlgebra, model: &FilterModel, transcript: &mut Vec<String>) -> Result<Status, RepresentationError> {
    let open = demands(alg, model)?;
    if !open.is_empty() {
        transcript.push(format!("{} witness obligations open", open.len()));
        return Ok(Status::Almost {
            remaining: open.into_iter().map(|d| d.obligation).collect(),
        });
    }
    let strict = verify_morphism(alg, &model.map, MorphismMode::Strict, Exec::default())?;
    if let Some(v) = strict.violation {
        return Err(RepresentationError::NotMorphic(v));
    }
    transcript.push(describe_report(&strict));
    Ok(Status::Full)
}

/// Adds witnesses to `start` for at most `rounds` rounds. Each round glues
/// the current filter with every open demand into one witness filter and
/// takes its model, which keeps every old tuple's truth values.
pub fn saturate(
    alg: &FiniteAlgebra,
    start: &FilterModel,
    rounds: usize,
) -> Result<EmbeddingCertificate, RepresentationError> {
    let fragment = start.fragment;
    let alg = restrict(alg, fragment)?;
    let scope = start.scope();
    let mut transcript = Vec::new();
    let mut model = start.clone();
    let start_kernels: Vec<Vec<(usize, usize)>> = (0..=scope).map(|s| kernel(&start.map, s)).collect();
    let mut round = 0;
    loop {
        let open = demands(&alg, &model)?;
        if open.is_empty() || round == rounds {
            break;
        }
        round += 1;
        let pairs: Vec<(PrimeFilter, Substitution)> = open.iter().map(|d| (d.filter.clone(), d.alpha.clone())).collect();
        let h = witness_filter(&alg, &model.filter, &pairs, Verify::On)?;
        let next = filter_to_morphism(&alg, &h, fragment, scope)?;
        if let Some(v) = &next.report.violation {
            return Err(RepresentationError::NotMorphic(v.clone()));
        }
        preserve(&model, &next, round)?;
        for (s, old) in start_kernels.iter().enumerate() {
            let new = kernel(&next.map, s);
            if let Some(pair) = new.iter().find(|p| !old.contains(p)) {
                return Err(RepresentationError::NotPreserved {
                    round,
                    detail: format!("kernel on sort {s} gained {pair:?}"),
                });
            }
        }
        transcript.push(format!(
            "round {round}: {} obligations, witness filter on sort {}, {} points, old tuples preserved, kernel contained",
            open.len(),
            h.sort(),
            next.universe().size()
        ));
        model = next;
    }
    let status = settle(&alg, &model, &mut transcript)?;
    if status == Status::Full {
        let mut inj = Vec::new();
        if start_kernels.iter().all(|k| k.is_empty()) {
            check_injective(&model, &mut inj)?;
            transcript.extend(inj);
        }
    }
    Ok(EmbeddingCertificate {
        fragment,
        scope,
        separating: Vec::new(),
        model,
        transcript,
        rounds: round,
        status,
    })
}

/// Every old tuple, read through the first coordinates of the new model,
/// has the same truth values as before.
fn preserve(old: &FilterModel, new: &FilterModel, round: usize) -> Result<(), RepresentationError> {
    let lift: Vec<usize> = old.reps.iter().map(|&c| new.classes[c]).collect();
    for a in 0..lift.len() {
        for b in a + 1..lift.len() {
            if lift[a] == lift[b] {
                return Err(RepresentationError::NotPreserved {
                    round,
                    detail: format!("points {a} and {b} were identified"),
                });
            }
        }
    }
    for (sort, row) in old.map.images.iter().enumerate() {
        for (r, rel) in row.iter().enumerate() {
            for t in old.universe().tuples(sort) {
                let moved: Vec<usize> = t.iter().map(|&p| lift[p]).collect();
                if rel.contains(&t) != new.phi(sort, r).contains(&moved) {
                    return Err(RepresentationError::NotPreserved {
                        round,
                        detail: format!("element {r} of sort {sort} at {t:?}"),
                    });
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn concrete(w: usize, f: Fragment, n: usize) -> FiniteAlgebra {
        FiniteAlgebra::concrete(Universe::new(w), f, n).unwrap()
    }

    #[test]
    fn singleton_filter_model() {
        let alg = concrete(2, Fragment::PQF, 2);
        let f = PrimeFilter::principal(&alg, 2, 1 << 1).unwrap();
        let model = filter_to_morphism(&alg, &f, Fragment::PQF, 2).unwrap();
        assert!(model.is_verified(), "{:?}", model.report().violation);
        assert_eq!(model.universe().size(), 2);
        assert_eq!(model.phi(1, 1).to_string(), "arity=1 universe=2 {(0)}");
        assert!(model.phi(1, 0).is_empty());
        assert_eq!(model.phi(2, 15).len(), 4);
    }

    #[test]
    fn diagonal_identifies_points() {
        let alg = concrete(2, Fragment::PQF.with_equality(true), 2);
        let f = PrimeFilter::principal(&alg, 2, 1).unwrap();
        let model = filter_to_morphism(&alg, &f, alg.fragment(), 2).unwrap();
        assert_eq!(model.universe().size(), 1);
        assert!(model.is_verified());
    }

    #[test]
    fn separation() {
        let alg = concrete(2, Fragment::PQF, 1);
        let model = separate(&alg, 1, 1, 2, Fragment::PQF).unwrap();
        assert_eq!(model.filter().generator(), 1);
        assert!(separate(&alg, 1, 2, 2, Fragment::PQF).is_err());
        let d = crate::axioms::diamond().unwrap();
        assert_eq!(separating_filter(&d, 1, 1, 2).unwrap().generator(), 1);
    }

    #[test]
    fn embed_one_point() {
        let alg = concrete(1, Fragment::PQF, 2).tabulate(Some(3), true).unwrap();
        let cert = embed(&alg, Fragment::PQF, 2).unwrap();
        assert!(cert.is_full());
        assert_eq!(cert.universe_size(), 3);
        assert_eq!(cert.model.filter().sort(), 3);
    }

    #[test]
    fn diamond_does_not_embed() {
        let d = crate::axioms::diamond().unwrap();
        let err = embed(&d, Fragment::QF, 2).unwrap_err();
        assert!(err.is_obstruction(), "{err}");
    }

    #[test]
    fn saturation_from_sort_zero() {
        let alg = concrete(1, Fragment::PE, 2);
        let f = PrimeFilter::principal(&alg, 0, 1).unwrap();
        let start = filter_to_morphism(&alg, &f, Fragment::PE, 2).unwrap();
        assert!(start.is_verified());
        let stuck = saturate(&alg, &start, 0).unwrap();
        assert!(matches!(&stuck.status, Status::Almost { remaining } if !remaining.is_empty()));
        let done = saturate(&alg, &start, 5).unwrap();
        assert!(done.is_full(), "{:?}", done.status);
        assert_eq!(done.rounds, 1);
        assert_eq!(done.universe_size(), 1);
    }

    #[test]
    fn already_full() {
        let alg = concrete(1, Fragment::PE, 2);
        let cert = one_to_one_almost_morphism(&alg, Fragment::PE, 2).unwrap();
        assert!(cert.is_full());
        let again = saturate(&alg, &cert.model, 3).unwrap();
        assert_eq!(again.rounds, 0);
        assert!(again.is_full());
    }
}
