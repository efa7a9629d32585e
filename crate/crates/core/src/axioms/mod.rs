//! Bounded checking of the axiom schemas against a finite algebra.
//!
//! A schema has infinitely many instances, so parameters are bounded: sorts
//! up to `max_sort`, at most `max_blocks` partitioning cylindrifications for
//! axiom (0), and at most `max_subst_count` substitutions for axiom (10).
//! Within those bounds every element tuple is checked when the total count is
//! at most `exhaustive_cap`; otherwise a seeded sample is drawn.

mod gallery;
mod schema;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, FiniteAlgebra};
use crate::exec::{map_range, Exec};
use crate::fragment::Fragment;

pub use gallery::{diamond, diamond_name, gallery_diamond, gallery_pe_theory, pe_theory, GalleryCase};
pub use schema::{evaluate, render_axiom0, shapes, slots, well_formed, AxiomClass, AxiomId, Failure, SchemaBounds, Shape, UnknownAxiom};

pub const DEFAULT_EXHAUSTIVE_CAP: u64 = 1_000_000;
pub const DEFAULT_SAMPLES: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 0x5eed;
const CHUNK: usize = 1 << 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("axiom ({axiom}) does not apply to fragment {fragment}")]
    Inapplicable { axiom: AxiomId, fragment: Fragment },
    #[error("shape {shape} is not a parameter of axiom ({axiom})")]
    Shape { axiom: AxiomId, shape: String },
    #[error("instance has {found} elements, expected {expected}")]
    Elements { expected: usize, found: usize },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    pub max_sort: usize,
    pub max_blocks: usize,
    pub max_subst_count: usize,
    pub exhaustive_cap: u64,
    pub samples: u64,
    pub seed: u64,
    pub violation_cap: usize,
    pub exec: Exec,
}

impl Bounds {
    pub fn new(max_sort: usize) -> Self {
        Bounds {
            max_sort,
            max_blocks: 3,
            max_subst_count: 2,
            exhaustive_cap: DEFAULT_EXHAUSTIVE_CAP,
            samples: DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
            violation_cap: 16,
            exec: Exec::default(),
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Bounds { seed, ..self }
    }

    pub fn with_exec(self, exec: Exec) -> Self {
        Bounds { exec, ..self }
    }

    fn schema(&self) -> SchemaBounds {
        SchemaBounds {
            max_sort: self.max_sort,
            max_blocks: self.max_blocks,
            max_subst_count: self.max_subst_count,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaInstance {
    pub axiom: AxiomId,
    pub shape: Shape,
    pub elements: Vec<usize>,
}

impl std::fmt::Display for SchemaInstance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}) {} elements {:?}", self.axiom, self.shape, self.elements)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub instance: SchemaInstance,
    pub condition: String,
    pub sort: usize,
    pub lhs: usize,
    pub rhs: usize,
    pub lhs_shown: String,
    pub rhs_shown: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}: {} fails with {} against {}",
            self.instance, self.condition, self.lhs_shown, self.rhs_shown
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase", tag = "mode")]
pub enum CheckMode {
    Exhaustive,
    Sampled { seed: u64, samples: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub axiom: AxiomId,
    pub class: AxiomClass,
    pub fragment: Fragment,
    pub max_sort: usize,
    pub mode: CheckMode,
    pub shapes: usize,
    /// Number of instances within bounds, saturating at `u64::MAX`.
    pub space: u64,
    pub checked: u64,
    pub violation_count: u64,
    pub violations: Vec<Violation>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.violation_count == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FragmentReport {
    pub fragment: Fragment,
    pub max_sort: usize,
    pub seed: u64,
    pub reports: Vec<CheckReport>,
    pub failed: Vec<AxiomId>,
}

impl FragmentReport {
    pub fn passed(&self) -> bool {
        self.failed.is_empty()
    }
}

enum Plan {
    All(u64),
    Sample(u64),
}

fn decode(mut t: u64, sizes: &[usize]) -> Vec<usize> {
    let mut out = vec![0; sizes.len()];
    for (slot, &size) in sizes.iter().enumerate().rev() {
        out[slot] = (t % size as u64) as usize;
        t /= size as u64;
    }
    out
}

fn violation(alg: &FiniteAlgebra, instance: SchemaInstance, f: Failure) -> Violation {
    Violation {
        lhs_shown: alg.describe(f.sort, f.lhs),
        rhs_shown: alg.describe(f.sort, f.rhs),
        condition: f.condition,
        sort: f.sort,
        lhs: f.lhs,
        rhs: f.rhs,
        instance,
    }
}

/// Failures in a run of instances, and the first few of them.
type Tally = (u64, Vec<(Vec<usize>, Failure)>);

/// Checks one axiom schema within `bounds`.
pub fn check_axiom(alg: &FiniteAlgebra, axiom: AxiomId, bounds: &Bounds) -> Result<CheckReport, CheckError> {
    if !axiom.applies_to(alg.fragment()) {
        return Err(CheckError::Inapplicable {
            axiom,
            fragment: alg.fragment(),
        });
    }
    let shapes = schema::shapes(axiom, bounds.schema());
    let mut sizes = Vec::with_capacity(shapes.len());
    for shape in &shapes {
        let s = schema::slots(axiom, shape)
            .into_iter()
            .map(|sort| alg.size(sort))
            .collect::<Result<Vec<_>, _>>()?;
        sizes.push(s);
    }
    let counts: Vec<u64> = sizes
        .iter()
        .map(|s| s.iter().fold(1u64, |acc, &x| acc.saturating_mul(x as u64)))
        .collect();
    let space = counts.iter().fold(0u64, |acc, &c| acc.saturating_add(c));
    let mut plans: Vec<Plan> = counts.iter().map(|&c| Plan::All(c)).collect();
    let mode = if space <= bounds.exhaustive_cap {
        CheckMode::Exhaustive
    } else {
        let mut order: Vec<usize> = (0..shapes.len()).collect();
        order.sort_by_key(|&i| (counts[i], i));
        let mut budget = bounds.samples;
        for (done, &i) in order.iter().enumerate() {
            let share = budget / (order.len() - done) as u64;
            if counts[i] <= share {
                budget -= counts[i];
            } else {
                plans[i] = Plan::Sample(share.max(1).min(budget.max(1)));
                budget = budget.saturating_sub(share.max(1));
            }
        }
        CheckMode::Sampled {
            seed: bounds.seed,
            samples: 0,
        }
    };

    let mut checked = 0u64;
    let mut count = 0u64;
    let mut found: Vec<(usize, Vec<usize>, Failure)> = Vec::new();
    for (idx, shape) in shapes.iter().enumerate() {
        let slot_sizes = &sizes[idx];
        let run = |tuples: &(dyn Fn(u64) -> Vec<usize> + Sync), total: u64| -> Result<Tally, CheckError> {
            let chunks = total.div_ceil(CHUNK as u64) as usize;
            let parts = map_range(bounds.exec, chunks, |c| -> Result<Tally, AlgebraError> {
                let start = c as u64 * CHUNK as u64;
                let end = (start + CHUNK as u64).min(total);
                let mut n = 0;
                let mut kept = Vec::new();
                for t in start..end {
                    let e = tuples(t);
                    if let Some(f) = schema::evaluate(alg, axiom, shape, &e)? {
                        n += 1;
                        if kept.len() < bounds.violation_cap {
                            kept.push((e, f));
                        }
                    }
                }
                Ok((n, kept))
            });
            let mut n = 0;
            let mut kept = Vec::new();
            for p in parts {
                let (pn, pk) = p?;
                n += pn;
                kept.extend(pk);
            }
            Ok((n, kept))
        };
        let (n, kept) = match plans[idx] {
            Plan::All(total) => {
                checked += total;
                run(&|t| decode(t, slot_sizes), total)?
            }
            Plan::Sample(k) => {
                let mut rng = ChaCha8Rng::seed_from_u64(bounds.seed);
                rng.set_stream(idx as u64);
                let samples: Vec<Vec<usize>> = (0..k)
                    .map(|_| slot_sizes.iter().map(|&s| rng.gen_range(0..s)).collect())
                    .collect();
                checked += k;
                run(&|t| samples[t as usize].clone(), k)?
            }
        };
        count += n;
        found.extend(kept.into_iter().map(|(e, f)| (idx, e, f)));
    }
    found.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    found.dedup_by(|a, b| a.0 == b.0 && a.1 == b.1);
    found.truncate(bounds.violation_cap);
    let violations = found
        .into_iter()
        .map(|(idx, elements, f)| {
            let instance = SchemaInstance {
                axiom,
                shape: shapes[idx].clone(),
                elements,
            };
            violation(alg, instance, f)
        })
        .collect();
    let mode = match mode {
        CheckMode::Sampled { seed, .. } => CheckMode::Sampled { seed, samples: checked },
        m => m,
    };
    Ok(CheckReport {
        axiom,
        class: axiom.class(),
        fragment: alg.fragment(),
        max_sort: bounds.max_sort,
        mode,
        shapes: shapes.len(),
        space,
        checked,
        violation_count: count,
        violations,
    })
}

/// Checks every axiom of `fragment`, seen on `alg` through the reduct.
pub fn check_fragment(alg: &FiniteAlgebra, fragment: Fragment, bounds: &Bounds) -> Result<FragmentReport, CheckError> {
    let alg = if fragment == alg.fragment() {
        alg.clone()
    } else {
        alg.reduct(fragment)?
    };
    let mut reports = Vec::new();
    for axiom in AxiomId::for_fragment(fragment) {
        reports.push(check_axiom(&alg, axiom, bounds)?);
    }
    let failed = reports.iter().filter(|r| !r.passed()).map(|r| r.axiom).collect();
    Ok(FragmentReport {
        fragment,
        max_sort: bounds.max_sort,
        seed: bounds.seed,
        reports,
        failed,
    })
}

/// Re-evaluates one instance, returning the violation if it still fails.
pub fn replay(alg: &FiniteAlgebra, instance: &SchemaInstance) -> Result<Option<Violation>, CheckError> {
    let axiom = instance.axiom;
    if !axiom.applies_to(alg.fragment()) {
        return Err(CheckError::Inapplicable {
            axiom,
            fragment: alg.fragment(),
        });
    }
    if !schema::well_formed(axiom, &instance.shape) {
        return Err(CheckError::Shape {
            axiom,
            shape: instance.shape.to_string(),
        });
    }
    let slots = schema::slots(axiom, &instance.shape);
    if slots.len() != instance.elements.len() {
        return Err(CheckError::Elements {
            expected: slots.len(),
            found: instance.elements.len(),
        });
    }
    for (&sort, &e) in slots.iter().zip(&instance.elements) {
        alg.check(sort, e)?;
    }
    let failure = schema::evaluate(alg, axiom, &instance.shape, &instance.elements)?;
    Ok(failure.map(|f| violation(alg, instance.clone(), f)))
}
