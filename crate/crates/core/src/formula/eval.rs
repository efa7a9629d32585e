use super::fo::{Body, FoFormula};
use super::term::{Term, TermKind};
use super::{FormulaError, Structure};
use crate::relation::Relation;

/// Interprets a term in a structure by structural recursion.
pub fn eval(t: &Term, s: &Structure) -> Result<Relation, FormulaError> {
    let w = s.universe();
    let out = match t.kind() {
        TermKind::Sym(name) => {
            let rel = s
                .relation(name)
                .ok_or_else(|| FormulaError::UnknownSymbol(name.clone()))?;
            if rel.arity() != t.sort() {
                return Err(FormulaError::Sort {
                    subterm: name.clone(),
                    message: format!("structure interprets it with arity {}", rel.arity()),
                });
            }
            rel.clone()
        }
        TermKind::Subst(alpha, u) => alpha.apply(&eval(u, s)?)?,
        TermKind::Top => Relation::full(w, t.sort())?,
        TermKind::Bot => Relation::empty(w, t.sort())?,
        TermKind::Or(a, b) => eval(a, s)?.join(&eval(b, s)?)?,
        TermKind::And(a, b) => eval(a, s)?.meet(&eval(b, s)?)?,
        TermKind::Not(a) => eval(a, s)?.complement(),
        TermKind::Exists(a) => eval(a, s)?.exists_last()?,
        TermKind::Delta(i, j) => Relation::delta(w, t.sort(), *i, *j)?,
    };
    Ok(out)
}

/// Interprets a formula by enumerating assignments, independently of [`eval`].
pub fn eval_fo_naive(f: &FoFormula, s: &Structure) -> Result<Relation, FormulaError> {
    let w = s.universe();
    let mut out = Relation::empty(w, f.arity())?;
    for tuple in w.tuples(f.arity()) {
        let mut env = tuple.clone();
        if satisfies(&f.body, s, &mut env)? {
            out.insert(&tuple)?;
        }
    }
    Ok(out)
}

fn satisfies(b: &Body, s: &Structure, env: &mut Vec<usize>) -> Result<bool, FormulaError> {
    Ok(match b {
        Body::Atom(name, args) => {
            let rel = s
                .relation(name)
                .ok_or_else(|| FormulaError::UnknownSymbol(name.clone()))?;
            let point: Vec<usize> = args.iter().map(|&i| env[i - 1]).collect();
            if point.len() != rel.arity() {
                return Err(FormulaError::Arity {
                    symbol: name.clone(),
                    expected: rel.arity(),
                    found: point.len(),
                });
            }
            rel.contains(&point)
        }
        Body::Eq(i, j) => env[i - 1] == env[j - 1],
        Body::True => true,
        Body::False => false,
        Body::And(a, c) => satisfies(a, s, env)? && satisfies(c, s, env)?,
        Body::Or(a, c) => satisfies(a, s, env)? || satisfies(c, s, env)?,
        Body::Not(a) => !satisfies(a, s, env)?,
        Body::Exists(a) => {
            let mut found = false;
            for y in 0..s.universe().size() {
                env.push(y);
                let hit = satisfies(a, s, env);
                env.pop();
                if hit? {
                    found = true;
                    break;
                }
            }
            found
        }
        Body::ExistsAt(i, a) => {
            let saved = env[i - 1];
            let mut found = false;
            for y in 0..s.universe().size() {
                env[i - 1] = y;
                if satisfies(a, s, env)? {
                    found = true;
                    break;
                }
            }
            env[i - 1] = saved;
            found
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{compile, parse_fo, parse_term};
    use crate::fragment::Fragment;
    use crate::relation::Universe;

    fn fixture() -> Structure {
        let w = Universe::new(2);
        Structure::new(w)
            .with("R1", Relation::from_tuples(w, 2, [[0, 0], [0, 1]]).unwrap())
            .unwrap()
            .with("R2", Relation::from_tuples(w, 2, [[0, 1], [1, 1]]).unwrap())
            .unwrap()
    }

    #[test]
    fn projection_of_intersection() {
        let s = fixture();
        let t = parse_term("exists(and(R1, R2))", &s.signature()).unwrap();
        assert_eq!(eval(&t, &s).unwrap().to_string(), "arity=1 universe=2 {(0)}");
        let f = parse_fo("[x] exists y (R1(x,y) & R2(x,y))", &s.signature()).unwrap();
        assert_eq!(eval_fo_naive(&f, &s).unwrap(), eval(&t, &s).unwrap());
    }

    #[test]
    fn constants() {
        let s = fixture();
        let sig = s.signature();
        assert_eq!(eval(&parse_term("top 2", &sig).unwrap(), &s).unwrap().len(), 4);
        assert_eq!(
            eval(&parse_term("delta 2 1 2", &sig).unwrap(), &s).unwrap().to_string(),
            "arity=2 universe=2 {(0,0),(1,1)}"
        );
        let f = parse_fo("[x] false", &sig).unwrap();
        assert!(eval_fo_naive(&f, &s).unwrap().is_empty());
    }

    #[test]
    fn closed_existential_sentence() {
        let w = Universe::new(3);
        let s = Structure::new(w)
            .with("A", Relation::from_tuples(w, 1, [[0], [1]]).unwrap())
            .unwrap()
            .with("B", Relation::from_tuples(w, 1, [[1], [2]]).unwrap())
            .unwrap();
        let f = parse_fo("[] exists x (A(x) & B(x))", &s.signature()).unwrap();
        assert_eq!(eval_fo_naive(&f, &s).unwrap(), Relation::full(w, 0).unwrap());
        let t = compile(&f, &s.signature(), Fragment::PE).unwrap();
        assert_eq!(eval(&t, &s).unwrap(), Relation::full(w, 0).unwrap());
    }

    #[test]
    fn interior_quantifier_agrees() {
        let s = fixture();
        let sig = s.signature();
        for text in [
            "[x,y] exists x R1(x,y)",
            "[x,y,z] exists y (R1(x,y) & R2(y,z))",
            "[x,y] ~exists x ~(R1(x,y) | x = y)",
        ] {
            let f = parse_fo(text, &sig).unwrap();
            let t = compile(&f, &sig, Fragment::FO_EQ).unwrap();
            assert_eq!(eval(&t, &s).unwrap(), eval_fo_naive(&f, &s).unwrap(), "{text}");
        }
    }

    #[test]
    fn de_morgan() {
        let s = fixture();
        let sig = s.signature();
        let l = parse_term("not(and(R1, R2))", &sig).unwrap();
        let r = parse_term("or(not(R1), not(R2))", &sig).unwrap();
        assert_eq!(eval(&l, &s).unwrap(), eval(&r, &s).unwrap());
    }
}
