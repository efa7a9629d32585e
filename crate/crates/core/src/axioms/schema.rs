//! The axiom schemas: their parameter shapes, the sorts of their element
//! slots, and evaluation of a single instance.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraError, FiniteAlgebra};
use crate::fragment::Fragment;
use crate::relation::Substitution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum AxiomId {
    A0,
    A1,
    A2,
    A3,
    A4,
    A5,
    A6,
    A7,
    A8,
    A9,
    A10,
    A11a,
    A11b,
    A11c,
    A12,
    A13,
}

/// Whether an axiom is a Horn clause or needs the full universal theory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AxiomClass {
    Horn,
    Universal,
}

impl AxiomId {
    pub const ALL: [AxiomId; 16] = [
        AxiomId::A0,
        AxiomId::A1,
        AxiomId::A2,
        AxiomId::A3,
        AxiomId::A4,
        AxiomId::A5,
        AxiomId::A6,
        AxiomId::A7,
        AxiomId::A8,
        AxiomId::A9,
        AxiomId::A10,
        AxiomId::A11a,
        AxiomId::A11b,
        AxiomId::A11c,
        AxiomId::A12,
        AxiomId::A13,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AxiomId::A0 => "0",
            AxiomId::A1 => "1",
            AxiomId::A2 => "2",
            AxiomId::A3 => "3",
            AxiomId::A4 => "4",
            AxiomId::A5 => "5",
            AxiomId::A6 => "6",
            AxiomId::A7 => "7",
            AxiomId::A8 => "8",
            AxiomId::A9 => "9",
            AxiomId::A10 => "10",
            AxiomId::A11a => "11a",
            AxiomId::A11b => "11b",
            AxiomId::A11c => "11c",
            AxiomId::A12 => "12",
            AxiomId::A13 => "13",
        }
    }

    pub fn class(self) -> AxiomClass {
        if self == AxiomId::A0 {
            AxiomClass::Universal
        } else {
            AxiomClass::Horn
        }
    }

    /// pqf: 0–4; qf adds 5–6; pe adds 7–10; fo has 0–10; equality adds 11–13.
    pub fn applies_to(self, fragment: Fragment) -> bool {
        use AxiomId::*;
        match self {
            A0 | A1 | A2 | A3 | A4 => true,
            A5 | A6 => fragment.has_negation(),
            A7 | A8 | A9 | A10 => fragment.has_exists(),
            A11a | A11b | A11c | A12 | A13 => fragment.equality,
        }
    }

    pub fn for_fragment(fragment: Fragment) -> Vec<AxiomId> {
        Self::ALL.into_iter().filter(|a| a.applies_to(fragment)).collect()
    }
}

impl fmt::Display for AxiomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownAxiom(pub String);

impl fmt::Display for UnknownAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown axiom `{}`", self.0)
    }
}

impl std::error::Error for UnknownAxiom {}

impl FromStr for AxiomId {
    type Err = UnknownAxiom;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let t = text.trim().trim_start_matches('(').trim_end_matches(')');
        AxiomId::ALL
            .into_iter()
            .find(|a| a.name() == t)
            .ok_or_else(|| UnknownAxiom(text.to_string()))
    }
}

impl From<AxiomId> for String {
    fn from(a: AxiomId) -> String {
        a.name().to_string()
    }
}

impl TryFrom<String> for AxiomId {
    type Error = UnknownAxiom;

    fn try_from(text: String) -> Result<Self, Self::Error> {
        text.parse()
    }
}

/// The non-element parameters of a schema instance.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    /// Partitioning cylindrifications `c_i: k_i → Σk`.
    Blocks { blocks: Vec<usize> },
    Sort { sort: usize },
    Subst { alpha: Substitution },
    /// `α: n → k` followed by `β: k → l`.
    Compose { alpha: Substitution, beta: Substitution },
    /// Projection from sort `sort + 1` to `sort`.
    Projection { sort: usize },
    /// `α_i: k_i → target`, one fresh coordinate per `i`.
    Ensemble { target: usize, alphas: Vec<Substitution> },
    Diagonal { sort: usize, indices: Vec<usize> },
    /// Two substitutions with the same domain and codomain.
    Pair { alpha: Substitution, beta: Substitution },
    SubstDiagonal { alpha: Substitution, i: usize, j: usize },
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |xs: &[usize]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        match self {
            Shape::Blocks { blocks } => write!(f, "blocks ({})", list(blocks)),
            Shape::Sort { sort } => write!(f, "sort {sort}"),
            Shape::Subst { alpha } => write!(f, "α={alpha}"),
            Shape::Compose { alpha, beta } => write!(f, "α={alpha} β={beta}"),
            Shape::Projection { sort } => write!(f, "∃: {} → {sort}", sort + 1),
            Shape::Ensemble { target, alphas } => {
                let shown: Vec<String> = alphas.iter().map(|a| a.to_string()).collect();
                write!(f, "target {target} α=({})", shown.join(" "))
            }
            Shape::Diagonal { sort, indices } => write!(f, "sort {sort} indices ({})", list(indices)),
            Shape::Pair { alpha, beta } => write!(f, "α={alpha} β={beta}"),
            Shape::SubstDiagonal { alpha, i, j } => write!(f, "α={alpha} Δ_{i},{j}"),
        }
    }
}

/// Limits on the schema parameters.
#[derive(Debug, Clone, Copy)]
pub struct SchemaBounds {
    pub max_sort: usize,
    pub max_blocks: usize,
    pub max_subst_count: usize,
}

fn compositions(total_max: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 0..=total_max {
        for mut rest in compositions(total_max - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn substitutions_up_to(max: usize) -> Vec<Substitution> {
    let mut out = Vec::new();
    for n in 0..=max {
        for k in 0..=max {
            out.extend(Substitution::all(n, k));
        }
    }
    out
}

/// Every parameter choice for `axiom` within the bounds, in canonical order.
pub fn shapes(axiom: AxiomId, b: SchemaBounds) -> Vec<Shape> {
    let n = b.max_sort;
    let sorts = || (0..=n).map(|sort| Shape::Sort { sort });
    let projections = || (0..n).map(|sort| Shape::Projection { sort });
    match axiom {
        AxiomId::A0 => (0..=b.max_blocks)
            .flat_map(|m| compositions(n, m))
            .map(|blocks| Shape::Blocks { blocks })
            .collect(),
        AxiomId::A1 | AxiomId::A4 | AxiomId::A6 => sorts().collect(),
        AxiomId::A2 | AxiomId::A5 => substitutions_up_to(n).into_iter().map(|alpha| Shape::Subst { alpha }).collect(),
        AxiomId::A3 => {
            let mut out = Vec::new();
            for alpha in substitutions_up_to(n) {
                for l in 0..=n {
                    for beta in Substitution::all(alpha.cod(), l) {
                        out.push(Shape::Compose {
                            alpha: alpha.clone(),
                            beta,
                        });
                    }
                }
            }
            out
        }
        AxiomId::A7 | AxiomId::A8 | AxiomId::A9 => projections().collect(),
        AxiomId::A10 => {
            let mut out = Vec::new();
            for count in 1..=b.max_subst_count {
                for target in 0..=n.saturating_sub(count) {
                    if target + count > n {
                        continue;
                    }
                    let choices: Vec<Substitution> =
                        (0..n).flat_map(|k| Substitution::all(k, target)).collect();
                    let mut tuples: Vec<Vec<Substitution>> = vec![Vec::new()];
                    for _ in 0..count {
                        tuples = tuples
                            .into_iter()
                            .flat_map(|t| {
                                choices.iter().map(move |c| {
                                    let mut t = t.clone();
                                    t.push(c.clone());
                                    t
                                })
                            })
                            .collect();
                    }
                    out.extend(tuples.into_iter().map(|alphas| Shape::Ensemble { target, alphas }));
                }
            }
            out
        }
        AxiomId::A11a | AxiomId::A11b | AxiomId::A11c => {
            let arity = match axiom {
                AxiomId::A11a => 1,
                AxiomId::A11b => 2,
                _ => 3,
            };
            let mut out = Vec::new();
            for sort in 1..=n {
                for t in crate::relation::Universe::new(sort).tuples(arity) {
                    out.push(Shape::Diagonal {
                        sort,
                        indices: t.into_iter().map(|x| x + 1).collect(),
                    });
                }
            }
            out
        }
        AxiomId::A12 => {
            let mut out = Vec::new();
            for k in 0..=n {
                for cod in 0..=n {
                    let all = Substitution::all(k, cod);
                    for alpha in &all {
                        for beta in &all {
                            out.push(Shape::Pair {
                                alpha: alpha.clone(),
                                beta: beta.clone(),
                            });
                        }
                    }
                }
            }
            out
        }
        AxiomId::A13 => {
            let mut out = Vec::new();
            for alpha in substitutions_up_to(n) {
                for i in 1..=alpha.dom() {
                    for j in 1..=alpha.dom() {
                        out.push(Shape::SubstDiagonal { alpha: alpha.clone(), i, j });
                    }
                }
            }
            out
        }
    }
}

/// Sorts of the element slots of an instance with this shape.
pub fn slots(axiom: AxiomId, shape: &Shape) -> Vec<usize> {
    match (axiom, shape) {
        (AxiomId::A0, Shape::Blocks { blocks }) => blocks.iter().chain(blocks).copied().collect(),
        (AxiomId::A1, Shape::Sort { sort }) => vec![*sort; 3],
        (_, Shape::Sort { sort }) => vec![*sort],
        (AxiomId::A2, Shape::Subst { alpha }) => vec![alpha.dom(); 2],
        (_, Shape::Subst { alpha }) => vec![alpha.dom()],
        (_, Shape::Compose { alpha, .. }) => vec![alpha.dom()],
        (AxiomId::A7, Shape::Projection { sort }) => vec![sort + 1; 2],
        (AxiomId::A8, Shape::Projection { sort }) => vec![sort + 1],
        (_, Shape::Projection { sort }) => vec![sort + 1, *sort],
        (_, Shape::Ensemble { alphas, .. }) => alphas.iter().map(|a| a.dom() + 1).collect(),
        (_, Shape::Pair { alpha, .. }) => vec![alpha.dom()],
        (_, Shape::Diagonal { .. }) | (_, Shape::SubstDiagonal { .. }) => Vec::new(),
        _ => Vec::new(),
    }
}

/// Whether `shape` is a parameter choice that `axiom` accepts.
pub fn well_formed(axiom: AxiomId, shape: &Shape) -> bool {
    match (axiom, shape) {
        (AxiomId::A0, Shape::Blocks { .. }) => true,
        (AxiomId::A1 | AxiomId::A4 | AxiomId::A6, Shape::Sort { .. }) => true,
        (AxiomId::A2 | AxiomId::A5, Shape::Subst { .. }) => true,
        (AxiomId::A3, Shape::Compose { alpha, beta }) => alpha.cod() == beta.dom(),
        (AxiomId::A7 | AxiomId::A8 | AxiomId::A9, Shape::Projection { .. }) => true,
        (AxiomId::A10, Shape::Ensemble { target, alphas }) => alphas.iter().all(|a| a.cod() == *target),
        (AxiomId::A11a, Shape::Diagonal { sort, indices }) => indices.len() == 1 && in_range(*sort, indices),
        (AxiomId::A11b, Shape::Diagonal { sort, indices }) => indices.len() == 2 && in_range(*sort, indices),
        (AxiomId::A11c, Shape::Diagonal { sort, indices }) => indices.len() == 3 && in_range(*sort, indices),
        (AxiomId::A12, Shape::Pair { alpha, beta }) => alpha.dom() == beta.dom() && alpha.cod() == beta.cod(),
        (AxiomId::A13, Shape::SubstDiagonal { alpha, i, j }) => in_range(alpha.dom(), &[*i, *j]),
        _ => false,
    }
}

fn in_range(sort: usize, indices: &[usize]) -> bool {
    indices.iter().all(|&i| i >= 1 && i <= sort)
}

/// A failed condition: its name and the two sides as `(sort, element)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub condition: String,
    pub sort: usize,
    pub lhs: usize,
    pub rhs: usize,
}

fn fail(condition: impl Into<String>, sort: usize, lhs: usize, rhs: usize) -> Option<Failure> {
    Some(Failure {
        condition: condition.into(),
        sort,
        lhs,
        rhs,
    })
}

/// Renders an axiom (0) instance: `⋁c_i(s_i) ≥ ⋀c_i(r_i)` followed by each `s_i ≱ r_i`.
pub fn render_axiom0(r: &[usize], s: &[usize], name: &dyn Fn(usize, usize) -> String) -> String {
    let side = |xs: &[usize], op: &str, empty: &str| {
        if xs.is_empty() {
            return empty.to_string();
        }
        xs.iter()
            .enumerate()
            .map(|(i, &x)| format!("c{}({})", i + 1, name(i, x)))
            .collect::<Vec<_>>()
            .join(&format!(" {op} "))
    };
    let mut out = format!("{} ≥ {}", side(s, "∨", "0"), side(r, "∧", "1"));
    for i in 0..r.len() {
        out += &format!(", {} ≱ {}", name(i, s[i]), name(i, r[i]));
    }
    out
}

/// Evaluates one instance. `Ok(None)` means it holds.
pub fn evaluate(alg: &FiniteAlgebra, axiom: AxiomId, shape: &Shape, e: &[usize]) -> Result<Option<Failure>, AlgebraError> {
    let eq = |cond: &str, sort, l: usize, r: usize| if l == r { None } else { fail(cond, sort, l, r) };
    Ok(match (axiom, shape) {
        (AxiomId::A0, Shape::Blocks { blocks }) => {
            let m = blocks.len();
            let n: usize = blocks.iter().sum();
            let cs = Substitution::partitioning(blocks);
            let (r, s) = e.split_at(m);
            let (mut lhs, mut rhs) = (alg.zero(n)?, alg.one(n)?);
            for i in 0..m {
                lhs = alg.join(n, lhs, alg.subst(&cs[i], s[i])?)?;
                rhs = alg.meet(n, rhs, alg.subst(&cs[i], r[i])?)?;
            }
            if !alg.leq(n, rhs, lhs)? {
                return Ok(None);
            }
            for i in 0..m {
                if alg.leq(blocks[i], r[i], s[i])? {
                    return Ok(None);
                }
            }
            let name = |i: usize, x: usize| alg.describe(blocks[i], x);
            fail(render_axiom0(r, s, &name), n, lhs, rhs)
        }
        (AxiomId::A1, &Shape::Sort { sort }) => {
            let [a, b, c] = [e[0], e[1], e[2]];
            let m = |x, y| alg.meet(sort, x, y);
            let j = |x, y| alg.join(sort, x, y);
            let (zero, one) = (alg.zero(sort)?, alg.one(sort)?);
            eq("a ∧ b = b ∧ a", sort, m(a, b)?, m(b, a)?)
                .or(eq("a ∨ b = b ∨ a", sort, j(a, b)?, j(b, a)?))
                .or(eq("a ∧ (b ∧ c) = (a ∧ b) ∧ c", sort, m(a, m(b, c)?)?, m(m(a, b)?, c)?))
                .or(eq("a ∨ (b ∨ c) = (a ∨ b) ∨ c", sort, j(a, j(b, c)?)?, j(j(a, b)?, c)?))
                .or(eq("a ∧ a = a", sort, m(a, a)?, a))
                .or(eq("a ∨ a = a", sort, j(a, a)?, a))
                .or(eq("a ∧ (a ∨ b) = a", sort, m(a, j(a, b)?)?, a))
                .or(eq("a ∨ (a ∧ b) = a", sort, j(a, m(a, b)?)?, a))
                .or(eq("a ∧ 0 = 0", sort, m(a, zero)?, zero))
                .or(eq("a ∨ 1 = 1", sort, j(a, one)?, one))
                .or(eq("a ∧ (b ∨ c) = (a ∧ b) ∨ (a ∧ c)", sort, m(a, j(b, c)?)?, j(m(a, b)?, m(a, c)?)?))
                .or(eq("a ∨ (b ∧ c) = (a ∨ b) ∧ (a ∨ c)", sort, j(a, m(b, c)?)?, m(j(a, b)?, j(a, c)?)?))
        }
        (AxiomId::A2, Shape::Subst { alpha }) => {
            let (n, k) = (alpha.dom(), alpha.cod());
            let [a, b] = [e[0], e[1]];
            let s = |x| alg.subst(alpha, x);
            eq("α(0) = 0", k, s(alg.zero(n)?)?, alg.zero(k)?)
                .or(eq("α(1) = 1", k, s(alg.one(n)?)?, alg.one(k)?))
                .or(eq("α(a ∨ b) = α(a) ∨ α(b)", k, s(alg.join(n, a, b)?)?, alg.join(k, s(a)?, s(b)?)?))
                .or(eq("α(a ∧ b) = α(a) ∧ α(b)", k, s(alg.meet(n, a, b)?)?, alg.meet(k, s(a)?, s(b)?)?))
        }
        (AxiomId::A3, Shape::Compose { alpha, beta }) => {
            let composite = beta.compose(alpha)?;
            eq(
                "(β∘α)(a) = β(α(a))",
                beta.cod(),
                alg.subst(&composite, e[0])?,
                alg.subst(beta, alg.subst(alpha, e[0])?)?,
            )
        }
        (AxiomId::A4, &Shape::Sort { sort }) => eq("id(a) = a", sort, alg.subst(&Substitution::identity(sort), e[0])?, e[0]),
        (AxiomId::A5, Shape::Subst { alpha }) => eq(
            "α(¬a) = ¬α(a)",
            alpha.cod(),
            alg.subst(alpha, alg.neg(alpha.dom(), e[0])?)?,
            alg.neg(alpha.cod(), alg.subst(alpha, e[0])?)?,
        ),
        (AxiomId::A6, &Shape::Sort { sort }) => {
            let na = alg.neg(sort, e[0])?;
            eq("a ∨ ¬a = 1", sort, alg.join(sort, e[0], na)?, alg.one(sort)?)
                .or(eq("a ∧ ¬a = 0", sort, alg.meet(sort, e[0], na)?, alg.zero(sort)?))
        }
        (AxiomId::A7, &Shape::Projection { sort: n }) => {
            let [a, b] = [e[0], e[1]];
            eq("∃0 = 0", n, alg.exists(n, alg.zero(n + 1)?)?, alg.zero(n)?).or(eq(
                "∃(a ∨ b) = ∃a ∨ ∃b",
                n,
                alg.exists(n, alg.join(n + 1, a, b)?)?,
                alg.join(n, alg.exists(n, a)?, alg.exists(n, b)?)?,
            ))
        }
        (AxiomId::A8, &Shape::Projection { sort: n }) => {
            let c = Substitution::assoc_cylindrification(n);
            let bound = alg.subst(&c, alg.exists(n, e[0])?)?;
            if alg.leq(n + 1, e[0], bound)? {
                None
            } else {
                fail("a ≤ c(∃a)", n + 1, e[0], bound)
            }
        }
        (AxiomId::A9, &Shape::Projection { sort: n }) => {
            let c = Substitution::assoc_cylindrification(n);
            let (a, b) = (e[0], e[1]);
            eq(
                "∃(a ∧ c(b)) = ∃a ∧ b",
                n,
                alg.exists(n, alg.meet(n + 1, a, alg.subst(&c, b)?)?)?,
                alg.meet(n, alg.exists(n, a)?, b)?,
            )
        }
        (AxiomId::A10, Shape::Ensemble { target, alphas }) => {
            let (m, count) = (*target, alphas.len());
            let top = m + count;
            let mut inner = alg.one(top)?;
            let mut rhs = alg.one(m)?;
            for (i, alpha) in alphas.iter().enumerate() {
                let mut map = alpha.map().to_vec();
                map.push(m + i + 1);
                let beta = Substitution::new(map, top)?;
                inner = alg.meet(top, inner, alg.subst(&beta, e[i])?)?;
                rhs = alg.meet(m, rhs, alg.subst(alpha, alg.exists(alpha.dom(), e[i])?)?)?;
            }
            let mut lhs = inner;
            for s in (m..top).rev() {
                lhs = alg.exists(s, lhs)?;
            }
            eq("∃ⁿ(⋀βᵢ(rᵢ)) = ⋀αᵢ(∃rᵢ)", m, lhs, rhs)
        }
        (AxiomId::A11a, Shape::Diagonal { sort, indices }) => {
            eq("Δᵢᵢ = 1", *sort, alg.delta(*sort, indices[0], indices[0])?, alg.one(*sort)?)
        }
        (AxiomId::A11b, Shape::Diagonal { sort, indices }) => {
            let (i, j) = (indices[0], indices[1]);
            eq("Δᵢⱼ = Δⱼᵢ", *sort, alg.delta(*sort, i, j)?, alg.delta(*sort, j, i)?)
        }
        (AxiomId::A11c, Shape::Diagonal { sort, indices }) => {
            let n = *sort;
            let (i, j, k) = (indices[0], indices[1], indices[2]);
            let lhs = alg.meet(n, alg.delta(n, i, j)?, alg.delta(n, j, k)?)?;
            let rhs = alg.delta(n, i, k)?;
            if alg.leq(n, lhs, rhs)? {
                None
            } else {
                fail("Δᵢⱼ ∧ Δⱼₖ ≤ Δᵢₖ", n, lhs, rhs)
            }
        }
        (AxiomId::A12, Shape::Pair { alpha, beta }) => {
            let n = alpha.cod();
            let mut d = alg.one(n)?;
            for l in 1..=alpha.dom() {
                d = alg.meet(n, d, alg.delta(n, alpha.at(l), beta.at(l))?)?;
            }
            eq(
                "α(r) ∧ D = β(r) ∧ D",
                n,
                alg.meet(n, alg.subst(alpha, e[0])?, d)?,
                alg.meet(n, alg.subst(beta, e[0])?, d)?,
            )
        }
        (AxiomId::A13, Shape::SubstDiagonal { alpha, i, j }) => {
            let (k, n) = (alpha.dom(), alpha.cod());
            eq(
                "α(Δᵢⱼ) = Δ_α(i)α(j)",
                n,
                alg.subst(alpha, alg.delta(k, *i, *j)?)?,
                alg.delta(n, alpha.at(*i), alpha.at(*j))?,
            )
        }
        _ => {
            return Err(AlgebraError::Mismatch(format!(
                "shape {shape} does not belong to axiom ({axiom})"
            )))
        }
    })
}
