use super::fo::{Body, FoFormula};
use super::term::Term;
use super::{FormulaError, Signature};
use crate::fragment::Fragment;
use crate::relation::Substitution;

/// Translates a formula into a term of sort `f.arity()`, rejecting
/// connectives outside `fragment`.
pub fn compile(f: &FoFormula, sig: &Signature, fragment: Fragment) -> Result<Term, FormulaError> {
    body(&f.body, f.arity(), sig, fragment)
}

fn body(b: &Body, k: usize, sig: &Signature, fragment: Fragment) -> Result<Term, FormulaError> {
    let refuse = |connective| FormulaError::Fragment { connective, fragment };
    match b {
        Body::Atom(name, args) => {
            let arity = sig
                .arity(name)
                .ok_or_else(|| FormulaError::UnknownSymbol(name.clone()))?;
            if arity != args.len() {
                return Err(FormulaError::Arity {
                    symbol: name.clone(),
                    expected: arity,
                    found: args.len(),
                });
            }
            let alpha = Substitution::new(args.clone(), k)?;
            let sym = Term::sym(name.clone(), arity);
            if alpha.is_identity() {
                Ok(sym)
            } else {
                Term::subst(alpha, sym)
            }
        }
        Body::Eq(i, j) => {
            if !fragment.equality {
                return Err(refuse("equality"));
            }
            Term::delta(k, *i, *j)
        }
        Body::True => Ok(Term::top(k)),
        Body::False => Ok(Term::bot(k)),
        Body::And(a, c) => Term::and(body(a, k, sig, fragment)?, body(c, k, sig, fragment)?),
        Body::Or(a, c) => Term::or(body(a, k, sig, fragment)?, body(c, k, sig, fragment)?),
        Body::Not(a) => {
            if !fragment.has_negation() {
                return Err(refuse("negation"));
            }
            Ok(Term::not(body(a, k, sig, fragment)?))
        }
        Body::Exists(a) => {
            if !fragment.has_exists() {
                return Err(refuse("existential quantification"));
            }
            Term::exists(body(a, k + 1, sig, fragment)?)
        }
        Body::ExistsAt(i, a) => {
            if !fragment.has_exists() {
                return Err(refuse("existential quantification"));
            }
            let i = *i;
            let inner = body(a, k, sig, fragment)?;
            let rotation: Vec<usize> = (1..=k)
                .map(|l| match l.cmp(&i) {
                    std::cmp::Ordering::Less => l,
                    std::cmp::Ordering::Equal => k,
                    std::cmp::Ordering::Greater => l - 1,
                })
                .collect();
            let rotation = Substitution::new(rotation, k)?;
            let rotated = if rotation.is_identity() {
                inner
            } else {
                Term::subst(rotation, inner)?
            };
            let projected = Term::exists(rotated)?;
            let skip: Vec<usize> = (1..k).map(|l| if l < i { l } else { l + 1 }).collect();
            Term::subst(Substitution::new(skip, k)?, projected)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse_fo, parse_term, TermKind};

    fn sig() -> Signature {
        Signature::new([("R1", 2), ("R2", 2), ("R", 2), ("Q", 4), ("A", 1)]).unwrap()
    }

    fn compiled(text: &str, fragment: Fragment) -> Result<Term, FormulaError> {
        compile(&parse_fo(text, &sig())?, &sig(), fragment)
    }

    #[test]
    fn atom_becomes_substitution() {
        let t = compiled("[x,y,z] Q(x,x,y,x)", Fragment::PQF).unwrap();
        let alpha = Substitution::new(vec![1, 1, 2, 1], 3).unwrap();
        assert_eq!(t, Term::subst(alpha, Term::sym("Q", 4)).unwrap());
        assert_eq!(t.sort(), 3);
    }

    #[test]
    fn projection_of_intersection() {
        let t = compiled("[x] exists y (R1(x,y) & R2(x,y))", Fragment::PE).unwrap();
        assert_eq!(t, parse_term("exists(and(R1, R2))", &sig()).unwrap());
    }

    #[test]
    fn identity_is_eliminated() {
        let t = compiled("[x,y] R(x,y)", Fragment::PQF).unwrap();
        assert_eq!(t, Term::sym("R", 2));
        let t = compiled("[x,y,z] R(x,y)", Fragment::PQF).unwrap();
        assert_eq!(t.to_string(), "sub [1,2]->3 R");
    }

    #[test]
    fn interior_quantifier_rotates() {
        let t = compiled("[x,y,z] exists x R(x,z)", Fragment::PE).unwrap();
        assert_eq!(t.sort(), 3);
        assert_eq!(t.to_string(), "sub [2,3] exists(sub [3,1,2] sub [1,3] R)");
        let TermKind::Subst(_, inner) = t.kind() else { panic!() };
        assert_eq!(inner.sort(), 2);
    }

    #[test]
    fn fragment_violations() {
        assert!(matches!(
            compiled("[x] ~A(x)", Fragment::PE),
            Err(FormulaError::Fragment { connective: "negation", .. })
        ));
        assert!(compiled("[x] exists y R(x,y)", Fragment::QF).is_err());
        assert!(compiled("[x,y] x = y", Fragment::FO).is_err());
        assert!(compiled("[x,y] x = y", Fragment::PQF.with_equality(true)).is_ok());
    }
}
