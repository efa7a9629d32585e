use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Which connectives, beyond substitutions and `0, 1, ∨, ∧`, a signature has.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reduct {
    /// Positive quantifier-free.
    Pqf,
    /// Quantifier-free: adds negation.
    Qf,
    /// Positive existential: adds projection.
    Pe,
    /// First order: negation and projection.
    Fo,
}

/// A signature fragment: a reduct, optionally with the diagonal constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Fragment {
    pub reduct: Reduct,
    pub equality: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown fragment {0:?} (expected pqf, qf, pe or fo, optionally with +eq)")]
pub struct FragmentParseError(pub String);

impl Fragment {
    pub const PQF: Fragment = Fragment::new(Reduct::Pqf, false);
    pub const QF: Fragment = Fragment::new(Reduct::Qf, false);
    pub const PE: Fragment = Fragment::new(Reduct::Pe, false);
    pub const FO: Fragment = Fragment::new(Reduct::Fo, false);
    pub const FO_EQ: Fragment = Fragment::new(Reduct::Fo, true);

    pub const fn new(reduct: Reduct, equality: bool) -> Self {
        Fragment { reduct, equality }
    }

    pub fn with_equality(self, equality: bool) -> Self {
        Fragment { equality, ..self }
    }

    pub fn has_negation(self) -> bool {
        matches!(self.reduct, Reduct::Qf | Reduct::Fo)
    }

    pub fn has_exists(self) -> bool {
        matches!(self.reduct, Reduct::Pe | Reduct::Fo)
    }

    /// Every symbol of `self` is also a symbol of `other`.
    pub fn is_subfragment_of(self, other: Fragment) -> bool {
        (!self.has_negation() || other.has_negation())
            && (!self.has_exists() || other.has_exists())
            && (!self.equality || other.equality)
    }

    /// The smallest fragment containing the given connectives.
    pub fn minimal(negation: bool, exists: bool, equality: bool) -> Fragment {
        let reduct = match (negation, exists) {
            (false, false) => Reduct::Pqf,
            (true, false) => Reduct::Qf,
            (false, true) => Reduct::Pe,
            (true, true) => Reduct::Fo,
        };
        Fragment { reduct, equality }
    }

    pub fn all() -> Vec<Fragment> {
        let mut out = Vec::new();
        for reduct in [Reduct::Pqf, Reduct::Qf, Reduct::Pe, Reduct::Fo] {
            for equality in [false, true] {
                out.push(Fragment { reduct, equality });
            }
        }
        out
    }
}

impl fmt::Display for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.reduct {
            Reduct::Pqf => "pqf",
            Reduct::Qf => "qf",
            Reduct::Pe => "pe",
            Reduct::Fo => "fo",
        };
        f.write_str(name)?;
        if self.equality {
            f.write_str("+eq")?;
        }
        Ok(())
    }
}

impl FromStr for Fragment {
    type Err = FragmentParseError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let lower = text.trim().to_ascii_lowercase();
        let (base, equality) = match lower.strip_suffix("+eq") {
            Some(base) => (base, true),
            None => (lower.as_str(), false),
        };
        let reduct = match base {
            "pqf" => Reduct::Pqf,
            "qf" => Reduct::Qf,
            "pe" => Reduct::Pe,
            "fo" => Reduct::Fo,
            _ => return Err(FragmentParseError(text.to_string())),
        };
        Ok(Fragment { reduct, equality })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        for fragment in Fragment::all() {
            assert_eq!(fragment.to_string().parse::<Fragment>().unwrap(), fragment);
        }
        assert_eq!("FO+eq".parse::<Fragment>().unwrap(), Fragment::FO_EQ);
        assert!("ho".parse::<Fragment>().is_err());
    }

    #[test]
    fn inclusions() {
        assert!(Fragment::PQF.is_subfragment_of(Fragment::PE));
        assert!(!Fragment::QF.is_subfragment_of(Fragment::PE));
        assert!(Fragment::PE.is_subfragment_of(Fragment::FO));
        assert!(!Fragment::FO_EQ.is_subfragment_of(Fragment::FO));
    }
}
