//! Finite multisorted algebras of relations.
//!
//! Sort `n` of the concrete algebra on a set `W` holds every `n`-ary relation
//! on `W`. Substitutions act by inverse image, and depending on the fragment
//! the signature also has negation, projection of the last coordinate, and
//! diagonal constants. The crate evaluates formulas as such operations,
//! checks the universal axiom schemas on finite algebras, and carries out the
//! prime-filter constructions that embed a finite algebra satisfying those
//! axioms into concrete ones, verifying each construction as it goes.
//!
//! Modules, bottom up:
//!
//! * [`relation`]: relations, universes and substitutions.
//! * [`formula`]: terms, first-order formulas, a compiler and two evaluators.
//! * [`algebra`]: concrete, product, generated and table-presented algebras.
//! * [`lattice`]: join-irreducibles, prime filters and the filter
//!   amalgamation constructions.
//! * [`axioms`]: bounded schema checking and a gallery of counterexamples.
//! * [`representation`]: filter models, embeddings and witness saturation.

pub mod algebra;
pub mod axioms;
pub mod bits;
pub mod exec;
pub mod formula;
pub mod fragment;
pub mod lattice;
pub mod relation;
pub mod representation;

pub use algebra::{AlgebraError, FiniteAlgebra};
pub use exec::Exec;
pub use fragment::{Fragment, Reduct};
pub use relation::{Relation, Substitution, Universe};
