use std::fmt;

use super::lex::{Cursor, Tok};
use super::{FormulaError, Signature};

/// A first-order formula over an explicit variable context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoFormula {
    pub context: Vec<String>,
    pub body: Body,
}

/// Formula bodies. Variables are one-based slots of the enclosing context;
/// `Exists` appends a fresh slot, `ExistsAt(i, _)` rebinds slot `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Body {
    Atom(String, Vec<usize>),
    Eq(usize, usize),
    True,
    False,
    And(Box<Body>, Box<Body>),
    Or(Box<Body>, Box<Body>),
    Not(Box<Body>),
    Exists(Box<Body>),
    ExistsAt(usize, Box<Body>),
}

impl FoFormula {
    pub fn new(context: Vec<String>, body: Body) -> Self {
        FoFormula { context, body }
    }

    pub fn arity(&self) -> usize {
        self.context.len()
    }
}

impl Body {
    pub fn depth(&self) -> usize {
        match self {
            Body::Atom(..) | Body::Eq(..) | Body::True | Body::False => 0,
            Body::And(a, b) | Body::Or(a, b) => 1 + a.depth().max(b.depth()),
            Body::Not(a) | Body::Exists(a) | Body::ExistsAt(_, a) => 1 + a.depth(),
        }
    }
}

/// Parses `[x1,...,xk] body`. Connectives: `&`/`∧`, `|`/`∨`, `~`/`!`/`¬`,
/// `exists y body`/`∃y. body`, `x = y`, `true`/`⊤`, `false`/`⊥`. Conjunction
/// binds tighter than disjunction; quantifier bodies extend as far as a
/// unary formula does, so `exists y (A(y) & B(y))` needs its parentheses.
pub fn parse_fo(text: &str, sig: &Signature) -> Result<FoFormula, FormulaError> {
    let mut cur = Cursor::new(text)?;
    cur.expect(Tok::LBracket, "'[' opening the variable context")?;
    let mut context = Vec::new();
    if !cur.eat(&Tok::RBracket) {
        loop {
            let pos = cur.pos();
            let name = cur.ident()?;
            if context.contains(&name) {
                return Err(FormulaError::syntax(pos, format!("variable `{name}` declared twice")));
            }
            context.push(name);
            if cur.eat(&Tok::RBracket) {
                break;
            }
            cur.expect(Tok::Comma, "',' or ']'")?;
        }
    }
    let mut parser = Parser {
        cur,
        sig,
        scope: context.clone(),
    };
    let body = parser.disjunction()?;
    parser.cur.finish()?;
    Ok(FoFormula { context, body })
}

struct Parser<'a> {
    cur: Cursor,
    sig: &'a Signature,
    scope: Vec<String>,
}

impl Parser<'_> {
    fn lookup(&self, name: &str) -> Option<usize> {
        self.scope.iter().rposition(|n| n == name).map(|i| i + 1)
    }

    fn variable(&mut self) -> Result<usize, FormulaError> {
        let pos = self.cur.pos();
        let name = self.cur.ident()?;
        self.lookup(&name)
            .ok_or(FormulaError::UnboundVariable { name, pos })
    }

    fn disjunction(&mut self) -> Result<Body, FormulaError> {
        let mut left = self.conjunction()?;
        while self.cur.eat(&Tok::Or) {
            let right = self.conjunction()?;
            left = Body::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn conjunction(&mut self) -> Result<Body, FormulaError> {
        let mut left = self.unary()?;
        while self.cur.eat(&Tok::And) {
            let right = self.unary()?;
            left = Body::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Body, FormulaError> {
        if self.cur.eat(&Tok::Not) {
            return Ok(Body::Not(Box::new(self.unary()?)));
        }
        let quantifier = match self.cur.peek() {
            Some(Tok::Exists) => true,
            Some(Tok::Ident(w)) => w == "exists" && matches!(self.cur.peek2(), Some(Tok::Ident(_))),
            _ => false,
        };
        if quantifier {
            self.cur.next();
            let name = self.cur.ident()?;
            self.cur.eat(&Tok::Dot);
            return match self.lookup(&name) {
                Some(slot) => Ok(Body::ExistsAt(slot, Box::new(self.unary()?))),
                None => {
                    self.scope.push(name);
                    let body = self.unary();
                    self.scope.pop();
                    Ok(Body::Exists(Box::new(body?)))
                }
            };
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Body, FormulaError> {
        let pos = self.cur.pos();
        match self.cur.peek().cloned() {
            Some(Tok::Top) => {
                self.cur.next();
                Ok(Body::True)
            }
            Some(Tok::Bot) => {
                self.cur.next();
                Ok(Body::False)
            }
            Some(Tok::LParen) => {
                self.cur.next();
                let body = self.disjunction()?;
                self.cur.expect(Tok::RParen, "')'")?;
                Ok(body)
            }
            Some(Tok::Ident(name)) => {
                if self.cur.peek2() == Some(&Tok::Equals) {
                    let i = self.variable()?;
                    self.cur.next();
                    let j = self.variable()?;
                    return Ok(Body::Eq(i, j));
                }
                self.cur.next();
                if self.cur.peek() != Some(&Tok::LParen) {
                    match name.as_str() {
                        "true" => return Ok(Body::True),
                        "false" => return Ok(Body::False),
                        _ => {}
                    }
                }
                let Some(arity) = self.sig.arity(&name) else {
                    if self.lookup(&name).is_some() {
                        return Err(FormulaError::syntax(pos, format!("variable `{name}` used as a formula")));
                    }
                    return Err(FormulaError::UnknownSymbol(name));
                };
                let mut args = Vec::new();
                if self.cur.eat(&Tok::LParen) && !self.cur.eat(&Tok::RParen) {
                    loop {
                        args.push(self.variable()?);
                        if self.cur.eat(&Tok::RParen) {
                            break;
                        }
                        self.cur.expect(Tok::Comma, "',' or ')'")?;
                    }
                }
                if args.len() != arity {
                    return Err(FormulaError::Arity {
                        symbol: name,
                        expected: arity,
                        found: args.len(),
                    });
                }
                Ok(Body::Atom(name, args))
            }
            _ => Err(FormulaError::syntax(pos, "expected a formula")),
        }
    }
}

impl fmt::Display for FoFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] ", self.context.join(","))?;
        let mut names = self.context.clone();
        write_body(f, &self.body, &mut names)
    }
}

fn write_body(f: &mut fmt::Formatter<'_>, body: &Body, names: &mut Vec<String>) -> fmt::Result {
    match body {
        Body::Atom(name, args) => {
            write!(f, "{name}(")?;
            for (n, &i) in args.iter().enumerate() {
                if n > 0 {
                    f.write_str(",")?;
                }
                f.write_str(&names[i - 1])?;
            }
            f.write_str(")")
        }
        Body::Eq(i, j) => write!(f, "{} = {}", names[i - 1], names[j - 1]),
        Body::True => f.write_str("true"),
        Body::False => f.write_str("false"),
        Body::And(a, b) | Body::Or(a, b) => {
            let op = if matches!(body, Body::And(..)) { "&" } else { "|" };
            f.write_str("(")?;
            write_body(f, a, names)?;
            write!(f, " {op} ")?;
            write_body(f, b, names)?;
            f.write_str(")")
        }
        Body::Not(a) => {
            f.write_str("~")?;
            write_body(f, a, names)
        }
        Body::Exists(a) => {
            let mut fresh = names.len() + 1;
            while names.contains(&format!("v{fresh}")) {
                fresh += 1;
            }
            let name = format!("v{fresh}");
            write!(f, "exists {name} ")?;
            names.push(name);
            let out = write_body(f, a, names);
            names.pop();
            out
        }
        Body::ExistsAt(i, a) => {
            write!(f, "exists {} ", names[i - 1])?;
            write_body(f, a, names)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        Signature::new([("R1", 2), ("R2", 2), ("R", 2), ("Q", 4), ("P", 0)]).unwrap()
    }

    #[test]
    fn projection_of_intersection() {
        let f = parse_fo("[x] exists y (R1(x,y) & R2(x,y))", &sig()).unwrap();
        assert_eq!(f.arity(), 1);
        let atom = |n: &str| Box::new(Body::Atom(n.into(), vec![1, 2]));
        assert_eq!(f.body, Body::Exists(Box::new(Body::And(atom("R1"), atom("R2")))));
    }

    #[test]
    fn cylindrified_atom() {
        let f = parse_fo("[x,y,z] R(x,y)", &sig()).unwrap();
        assert_eq!(f.arity(), 3);
        assert_eq!(f.body, Body::Atom("R".into(), vec![1, 2]));
    }

    #[test]
    fn equality_and_precedence() {
        let f = parse_fo("[x,y] x = y", &sig()).unwrap();
        assert_eq!(f.body, Body::Eq(1, 2));
        let f = parse_fo("[x,y] R(x,y) | R(y,x) & x = y", &sig()).unwrap();
        assert!(matches!(f.body, Body::Or(_, ref r) if matches!(**r, Body::And(..))));
        let f = parse_fo("[] ∃x. ¬P ∧ ⊤", &sig()).unwrap();
        assert!(matches!(f.body, Body::And(ref l, _) if matches!(**l, Body::Exists(_))));
    }

    #[test]
    fn rebinding_an_interior_variable() {
        let f = parse_fo("[x,y] exists x R(x,y)", &sig()).unwrap();
        assert_eq!(f.body, Body::ExistsAt(1, Box::new(Body::Atom("R".into(), vec![1, 2]))));
    }

    #[test]
    fn diagnostics() {
        assert!(matches!(
            parse_fo("[x] R(x,z)", &sig()),
            Err(FormulaError::UnboundVariable { ref name, pos: 8 }) if name == "z"
        ));
        assert!(matches!(parse_fo("[x] S(x)", &sig()), Err(FormulaError::UnknownSymbol(_))));
        assert!(matches!(parse_fo("[x] R(x)", &sig()), Err(FormulaError::Arity { expected: 2, found: 1, .. })));
        assert!(parse_fo("[x] R(x,x) &", &sig()).is_err());
        assert!(parse_fo("x R(x,x)", &sig()).is_err());
        assert!(parse_fo("[x,x] true", &sig()).is_err());
    }

    #[test]
    fn display_reparses() {
        for text in [
            "[x] exists y (R1(x,y) & R2(x,y))",
            "[x,y,z] ~Q(x,x,y,x) | exists x (x = z)",
            "[] exists a exists b (R(a,b) & ~P)",
        ] {
            let f = parse_fo(text, &sig()).unwrap();
            assert_eq!(parse_fo(&f.to_string(), &sig()).unwrap(), f, "{text}");
        }
    }
}
