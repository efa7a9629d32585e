use super::FormulaError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Int(usize),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Arrow,
    And,
    Or,
    Not,
    Equals,
    Dot,
    Exists,
    Top,
    Bot,
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub pos: usize,
}

pub(crate) fn lex(text: &str) -> Result<Vec<Token>, FormulaError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ',' => Some(Tok::Comma),
            '&' | '∧' => Some(Tok::And),
            '|' | '∨' => Some(Tok::Or),
            '~' | '!' | '¬' => Some(Tok::Not),
            '=' => Some(Tok::Equals),
            '.' => Some(Tok::Dot),
            '∃' => Some(Tok::Exists),
            '⊤' => Some(Tok::Top),
            '⊥' => Some(Tok::Bot),
            _ => None,
        };
        if let Some(tok) = single {
            chars.next();
            out.push(Token { tok, pos });
            continue;
        }
        if c == '-' {
            chars.next();
            match chars.next() {
                Some((_, '>')) => out.push(Token { tok: Tok::Arrow, pos }),
                _ => return Err(FormulaError::syntax(pos, "expected '->'")),
            }
            continue;
        }
        if c.is_ascii_digit() {
            let mut value: usize = 0;
            while let Some(&(_, d)) = chars.peek() {
                let Some(digit) = d.to_digit(10) else { break };
                value = value
                    .checked_mul(10)
                    .and_then(|v| v.checked_add(digit as usize))
                    .ok_or_else(|| FormulaError::syntax(pos, "integer too large"))?;
                chars.next();
            }
            out.push(Token {
                tok: Tok::Int(value),
                pos,
            });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let mut name = String::new();
            while let Some(&(_, d)) = chars.peek() {
                if d.is_alphanumeric() || d == '_' || d == '\'' {
                    name.push(d);
                    chars.next();
                } else {
                    break;
                }
            }
            out.push(Token {
                tok: Tok::Ident(name),
                pos,
            });
            continue;
        }
        return Err(FormulaError::syntax(pos, format!("unexpected character {c:?}")));
    }
    Ok(out)
}

/// Token cursor shared by the term and formula parsers.
pub(crate) struct Cursor {
    tokens: Vec<Token>,
    at: usize,
    end: usize,
}

impl Cursor {
    pub fn new(text: &str) -> Result<Self, FormulaError> {
        Ok(Cursor {
            tokens: lex(text)?,
            at: 0,
            end: text.len(),
        })
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.at).map(|t| &t.tok)
    }

    pub fn peek2(&self) -> Option<&Tok> {
        self.tokens.get(self.at + 1).map(|t| &t.tok)
    }

    pub fn pos(&self) -> usize {
        self.tokens.get(self.at).map_or(self.end, |t| t.pos)
    }

    pub fn next(&mut self) -> Option<Tok> {
        let tok = self.tokens.get(self.at).map(|t| t.tok.clone());
        if tok.is_some() {
            self.at += 1;
        }
        tok
    }

    pub fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, tok: Tok, what: &str) -> Result<(), FormulaError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(FormulaError::syntax(self.pos(), format!("expected {what}")))
        }
    }

    pub fn int(&mut self) -> Result<usize, FormulaError> {
        match self.peek() {
            Some(Tok::Int(n)) => {
                let n = *n;
                self.at += 1;
                Ok(n)
            }
            _ => Err(FormulaError::syntax(self.pos(), "expected an integer")),
        }
    }

    pub fn ident(&mut self) -> Result<String, FormulaError> {
        match self.peek() {
            Some(Tok::Ident(name)) => {
                let name = name.clone();
                self.at += 1;
                Ok(name)
            }
            _ => Err(FormulaError::syntax(self.pos(), "expected an identifier")),
        }
    }

    pub fn finish(&self) -> Result<(), FormulaError> {
        if self.at == self.tokens.len() {
            Ok(())
        } else {
            Err(FormulaError::syntax(self.pos(), "unexpected trailing input"))
        }
    }
}
