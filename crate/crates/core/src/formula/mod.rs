//! A small formula language over relational signatures.
//!
//! Two surfaces are provided. [`Term`]s are elements of the free algebra in the
//! operation signature (substitutions, lattice operations, negation,
//! projection and diagonals). [`FoFormula`]s are ordinary first-order syntax
//! with an explicit variable context. [`compile`] turns the latter into the
//! former; [`eval`] interprets terms by structural recursion and
//! [`eval_fo_naive`] interprets formulas by direct enumeration of assignments,
//! so the two evaluators check each other.

mod compile;
mod eval;
mod fo;
mod lex;
pub mod sample;
mod term;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fragment::Fragment;
use crate::relation::{Relation, RelationError, Universe};

pub use compile::compile;
pub use eval::{eval, eval_fo_naive};
pub use fo::{parse_fo, Body, FoFormula};
pub use term::{parse_term, Term, TermKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("syntax error at byte {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("sort error in `{subterm}`: {message}")]
    Sort { subterm: String, message: String },
    #[error("unknown relation symbol `{0}`")]
    UnknownSymbol(String),
    #[error("unbound variable `{name}` at byte {pos}")]
    UnboundVariable { name: String, pos: usize },
    #[error("`{symbol}` has arity {expected} but was given {found} arguments")]
    Arity {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("{connective} is not available in fragment {fragment}")]
    Fragment {
        connective: &'static str,
        fragment: Fragment,
    },
    #[error("`{0}` is a reserved word")]
    Reserved(String),
    #[error("duplicate relation symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("structure: {0}")]
    Structure(String),
    #[error(transparent)]
    Relation(#[from] RelationError),
}

impl FormulaError {
    pub(crate) fn syntax(pos: usize, message: impl Into<String>) -> Self {
        FormulaError::Syntax {
            pos,
            message: message.into(),
        }
    }
}

/// Relation symbols with their arities, in declaration order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    symbols: Vec<(String, usize)>,
}

impl Signature {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = (S, usize)>) -> Result<Self, FormulaError> {
        let mut sig = Signature::default();
        for (name, arity) in symbols {
            let name = name.into();
            if term::is_keyword(&name) {
                return Err(FormulaError::Reserved(name));
            }
            if sig.arity(&name).is_some() {
                return Err(FormulaError::DuplicateSymbol(name));
            }
            sig.symbols.push((name, arity));
        }
        Ok(sig)
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.symbols.iter().find(|(n, _)| n == name).map(|&(_, a)| a)
    }

    pub fn symbols(&self) -> &[(String, usize)] {
        &self.symbols
    }
}

/// A universe together with one relation per signature symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Structure {
    universe: Universe,
    relations: BTreeMap<String, Relation>,
}

#[derive(Serialize, Deserialize)]
struct StructureFile {
    universe: usize,
    relations: BTreeMap<String, RelationEntry>,
}

#[derive(Serialize, Deserialize)]
struct RelationEntry {
    arity: usize,
    tuples: Vec<Vec<usize>>,
}

impl Structure {
    pub fn new(universe: Universe) -> Self {
        Structure {
            universe,
            relations: BTreeMap::new(),
        }
    }

    pub fn with(mut self, name: impl Into<String>, relation: Relation) -> Result<Self, FormulaError> {
        self.insert(name, relation)?;
        Ok(self)
    }

    pub fn insert(&mut self, name: impl Into<String>, relation: Relation) -> Result<(), FormulaError> {
        if relation.universe() != self.universe {
            return Err(RelationError::Universe {
                left: self.universe.size(),
                right: relation.universe().size(),
            }
            .into());
        }
        self.relations.insert(name.into(), relation);
        Ok(())
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.relations.get(name)
    }

    pub fn signature(&self) -> Signature {
        Signature {
            symbols: self.relations.iter().map(|(n, r)| (n.clone(), r.arity())).collect(),
        }
    }

    /// Reads `{"universe": 2, "relations": {"R": {"arity": 2, "tuples": [[0,1]]}}}`.
    pub fn from_json(text: &str) -> Result<Self, FormulaError> {
        let file: StructureFile =
            serde_json::from_str(text).map_err(|e| FormulaError::Structure(e.to_string()))?;
        let universe = Universe::new(file.universe);
        let mut out = Structure::new(universe);
        for (name, entry) in file.relations {
            let rel = Relation::from_tuples(universe, entry.arity, &entry.tuples)?;
            out.insert(name, rel)?;
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        let file = StructureFile {
            universe: self.universe.size(),
            relations: self
                .relations
                .iter()
                .map(|(name, rel)| {
                    (
                        name.clone(),
                        RelationEntry {
                            arity: rel.arity(),
                            tuples: rel.tuples().collect(),
                        },
                    )
                })
                .collect(),
        };
        serde_json::to_string(&file).expect("structure serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structure_json_round_trip() {
        let text = r#"{"universe": 2, "relations": {"R": {"arity": 2, "tuples": [[0,1]]}}}"#;
        let s = Structure::from_json(text).unwrap();
        assert_eq!(s.relation("R").unwrap().to_string(), "arity=2 universe=2 {(0,1)}");
        assert_eq!(Structure::from_json(&s.to_json()).unwrap(), s);
        assert_eq!(s.signature().arity("R"), Some(2));
    }

    #[test]
    fn structure_rejects_bad_tuples() {
        let text = r#"{"universe": 2, "relations": {"R": {"arity": 1, "tuples": [[2]]}}}"#;
        assert!(Structure::from_json(text).is_err());
        assert!(Structure::from_json("{").is_err());
    }

    #[test]
    fn duplicate_symbols_rejected() {
        assert!(Signature::new([("R", 1), ("R", 2)]).is_err());
        assert_eq!(Signature::new([("exists", 1)]), Err(FormulaError::Reserved("exists".into())));
    }
}
