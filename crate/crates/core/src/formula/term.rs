use std::fmt;

use super::lex::{Cursor, Tok};
use super::{FormulaError, Signature};
use crate::fragment::Fragment;
use crate::relation::Substitution;

/// A sort-annotated element of the free algebra over a relational signature.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Term {
    kind: TermKind,
    sort: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TermKind {
    Sym(String),
    Subst(Substitution, Box<Term>),
    Top,
    Bot,
    Or(Box<Term>, Box<Term>),
    And(Box<Term>, Box<Term>),
    Not(Box<Term>),
    Exists(Box<Term>),
    /// `Δ_{i,j}` in the term's sort, one-based.
    Delta(usize, usize),
}

impl Term {
    pub fn kind(&self) -> &TermKind {
        &self.kind
    }

    pub fn sort(&self) -> usize {
        self.sort
    }

    pub fn sym(name: impl Into<String>, arity: usize) -> Term {
        Term {
            kind: TermKind::Sym(name.into()),
            sort: arity,
        }
    }

    pub fn top(sort: usize) -> Term {
        Term { kind: TermKind::Top, sort }
    }

    pub fn bot(sort: usize) -> Term {
        Term { kind: TermKind::Bot, sort }
    }

    pub fn delta(sort: usize, i: usize, j: usize) -> Result<Term, FormulaError> {
        if i == 0 || j == 0 || i > sort || j > sort {
            return Err(FormulaError::Sort {
                subterm: format!("delta {sort} {i} {j}"),
                message: format!("indices must lie in 1..={sort}"),
            });
        }
        Ok(Term {
            kind: TermKind::Delta(i, j),
            sort,
        })
    }

    pub fn subst(alpha: Substitution, t: Term) -> Result<Term, FormulaError> {
        if alpha.dom() != t.sort {
            return Err(FormulaError::Sort {
                subterm: t.to_string(),
                message: format!("substitution {alpha} expects sort {}, found {}", alpha.dom(), t.sort),
            });
        }
        let sort = alpha.cod();
        Ok(Term {
            kind: TermKind::Subst(alpha, Box::new(t)),
            sort,
        })
    }

    fn binary(t: Term, u: Term, op: &str) -> Result<(Box<Term>, Box<Term>, usize), FormulaError> {
        if t.sort != u.sort {
            return Err(FormulaError::Sort {
                subterm: format!("{op}({t},{u})"),
                message: format!("operands have sorts {} and {}", t.sort, u.sort),
            });
        }
        let sort = t.sort;
        Ok((Box::new(t), Box::new(u), sort))
    }

    pub fn and(t: Term, u: Term) -> Result<Term, FormulaError> {
        let (t, u, sort) = Term::binary(t, u, "and")?;
        Ok(Term {
            kind: TermKind::And(t, u),
            sort,
        })
    }

    pub fn or(t: Term, u: Term) -> Result<Term, FormulaError> {
        let (t, u, sort) = Term::binary(t, u, "or")?;
        Ok(Term {
            kind: TermKind::Or(t, u),
            sort,
        })
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(t: Term) -> Term {
        let sort = t.sort;
        Term {
            kind: TermKind::Not(Box::new(t)),
            sort,
        }
    }

    pub fn exists(t: Term) -> Result<Term, FormulaError> {
        if t.sort == 0 {
            return Err(FormulaError::Sort {
                subterm: t.to_string(),
                message: "cannot project a sort-0 term".into(),
            });
        }
        let sort = t.sort - 1;
        Ok(Term {
            kind: TermKind::Exists(Box::new(t)),
            sort,
        })
    }

    /// The smallest fragment whose signature contains every symbol used.
    pub fn fragment(&self) -> Fragment {
        let mut flags = (false, false, false);
        self.visit(&mut |t| match t.kind {
            TermKind::Not(_) => flags.0 = true,
            TermKind::Exists(_) => flags.1 = true,
            TermKind::Delta(..) => flags.2 = true,
            _ => {}
        });
        Fragment::minimal(flags.0, flags.1, flags.2)
    }

    fn visit(&self, f: &mut impl FnMut(&Term)) {
        f(self);
        match &self.kind {
            TermKind::Subst(_, t) | TermKind::Not(t) | TermKind::Exists(t) => t.visit(f),
            TermKind::Or(t, u) | TermKind::And(t, u) => {
                t.visit(f);
                u.visit(f);
            }
            _ => {}
        }
    }

    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }
}

fn default_cod(map: &[usize]) -> usize {
    map.iter().copied().max().unwrap_or(0)
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            TermKind::Sym(name) => f.write_str(name),
            TermKind::Subst(alpha, t) => {
                f.write_str("sub [")?;
                for (i, x) in alpha.map().iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str("]")?;
                if alpha.cod() != default_cod(alpha.map()) {
                    write!(f, "->{}", alpha.cod())?;
                }
                write!(f, " {t}")
            }
            TermKind::Top => write!(f, "top {}", self.sort),
            TermKind::Bot => write!(f, "bot {}", self.sort),
            TermKind::Or(t, u) => write!(f, "or({t}, {u})"),
            TermKind::And(t, u) => write!(f, "and({t}, {u})"),
            TermKind::Not(t) => write!(f, "not({t})"),
            TermKind::Exists(t) => write!(f, "exists({t})"),
            TermKind::Delta(i, j) => write!(f, "delta {} {i} {j}", self.sort),
        }
    }
}

const KEYWORDS: &[&str] = &["sub", "and", "or", "not", "exists", "top", "bot", "delta", "true", "false"];

/// Parses the term grammar:
///
/// ```text
/// term := 'sub' '[' i1,...,in ']' ('->' k)? term
///       | 'and' '(' term ',' term ')' | 'or' '(' term ',' term ')'
///       | 'not' '(' term ')' | 'exists' '(' term ')'
///       | 'top' n | 'bot' n | 'delta' n i j
///       | '(' term ')' | symbol
/// ```
///
/// Substitution indices are one-based. When `->k` is omitted the codomain is
/// the largest index in the map.
pub fn parse_term(text: &str, sig: &Signature) -> Result<Term, FormulaError> {
    let mut cur = Cursor::new(text)?;
    let t = term(&mut cur, sig)?;
    cur.finish()?;
    Ok(t)
}

fn term(cur: &mut Cursor, sig: &Signature) -> Result<Term, FormulaError> {
    let pos = cur.pos();
    match cur.next() {
        Some(Tok::LParen) => {
            let t = term(cur, sig)?;
            cur.expect(Tok::RParen, "')'")?;
            Ok(t)
        }
        Some(Tok::Ident(word)) => match word.as_str() {
            "sub" => {
                cur.expect(Tok::LBracket, "'['")?;
                let mut map = Vec::new();
                if !cur.eat(&Tok::RBracket) {
                    loop {
                        map.push(cur.int()?);
                        if cur.eat(&Tok::RBracket) {
                            break;
                        }
                        cur.expect(Tok::Comma, "',' or ']'")?;
                    }
                }
                let cod = if cur.eat(&Tok::Arrow) {
                    cur.int()?
                } else {
                    default_cod(&map)
                };
                let alpha = Substitution::new(map, cod)
                    .map_err(|e| FormulaError::syntax(pos, e.to_string()))?;
                let child = term(cur, sig)?;
                Term::subst(alpha, child)
            }
            "and" | "or" => {
                cur.expect(Tok::LParen, "'('")?;
                let t = term(cur, sig)?;
                cur.expect(Tok::Comma, "','")?;
                let u = term(cur, sig)?;
                cur.expect(Tok::RParen, "')'")?;
                if word == "and" {
                    Term::and(t, u)
                } else {
                    Term::or(t, u)
                }
            }
            "not" | "exists" => {
                cur.expect(Tok::LParen, "'('")?;
                let t = term(cur, sig)?;
                cur.expect(Tok::RParen, "')'")?;
                if word == "not" {
                    Ok(Term::not(t))
                } else {
                    Term::exists(t)
                }
            }
            "top" => Ok(Term::top(cur.int()?)),
            "bot" => Ok(Term::bot(cur.int()?)),
            "delta" => {
                let n = cur.int()?;
                let i = cur.int()?;
                let j = cur.int()?;
                Term::delta(n, i, j)
            }
            name => match sig.arity(name) {
                Some(arity) => Ok(Term::sym(name, arity)),
                None => Err(FormulaError::UnknownSymbol(name.to_string())),
            },
        },
        _ => Err(FormulaError::syntax(pos, "expected a term")),
    }
}

pub(crate) fn is_keyword(name: &str) -> bool {
    KEYWORDS.contains(&name)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        Signature::new([("R", 1), ("S", 2), ("T", 0)]).unwrap()
    }

    #[test]
    fn leaf() {
        let t = parse_term("R", &sig()).unwrap();
        assert_eq!(t, Term::sym("R", 1));
        assert_eq!(t.sort(), 1);
    }

    #[test]
    fn exists_of_swap() {
        let t = parse_term("exists(sub [2,1] S)", &sig()).unwrap();
        let swap = Substitution::new(vec![2, 1], 2).unwrap();
        let expected = Term::exists(Term::subst(swap, Term::sym("S", 2)).unwrap()).unwrap();
        assert_eq!(t, expected);
        assert_eq!(t.sort(), 1);
    }

    #[test]
    fn conjunction_sort() {
        let t = parse_term("and(R, exists(sub [2,1] S))", &sig()).unwrap();
        assert_eq!(t.sort(), 1);
        assert!(matches!(t.kind(), TermKind::And(..)));
    }

    #[test]
    fn explicit_codomain() {
        let t = parse_term("sub [1,1,2,1]->3 (sub [1,1,1,1] R)", &sig());
        assert!(t.is_err(), "inner sub yields sort 1, outer expects 4");
        let sig4 = Signature::new([("Q", 4)]).unwrap();
        let t = parse_term("sub [1,1,2,1]->3 Q", &sig4).unwrap();
        assert_eq!(t.sort(), 3);
        assert_eq!(t.to_string(), "sub [1,1,2,1]->3 Q");
    }

    #[test]
    fn errors_carry_positions() {
        match parse_term("and(R, )", &sig()) {
            Err(FormulaError::Syntax { pos, .. }) => assert_eq!(pos, 7),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_term("and(R, S)", &sig()), Err(FormulaError::Sort { .. })));
        assert!(matches!(parse_term("exists(T)", &sig()), Err(FormulaError::Sort { .. })));
        assert!(matches!(parse_term("U", &sig()), Err(FormulaError::UnknownSymbol(_))));
        assert!(parse_term("delta 2 1 3", &sig()).is_err());
        assert!(parse_term("R R", &sig()).is_err());
    }

    #[test]
    fn fragment_detection() {
        assert_eq!(parse_term("and(R, R)", &sig()).unwrap().fragment(), Fragment::PQF);
        assert_eq!(parse_term("not(exists(S))", &sig()).unwrap().fragment(), Fragment::FO);
        assert!(parse_term("delta 2 1 2", &sig()).unwrap().fragment().equality);
    }

    #[test]
    fn printing_round_trips() {
        for text in [
            "or(and(R, top 1), not(bot 1))",
            "exists(and(S, delta 2 1 2))",
            "sub [] T",
            "sub []->2 T",
            "sub [2,1] sub [1]->2 R",
        ] {
            let t = parse_term(text, &sig()).unwrap();
            assert_eq!(parse_term(&t.to_string(), &sig()).unwrap(), t, "{text}");
        }
    }
}
