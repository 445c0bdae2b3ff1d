//! Recursive-descent parser for the formula DSL.
//!
//! ```text
//! formula := quant | iff
//! quant   := ("forall" | "exists") var {var} "." formula
//! iff     := impl ["<->" impl]
//! impl    := disj ["->" impl]
//! disj    := conj {"|" conj}
//! conj    := lit {"&" lit}
//! lit     := "~" lit | "(" formula ")" | "true" | "false" | quant | atom
//! atom    := name "(" term {"," term} ")" | term ("<" suffix | "=") term
//! term    := ident | number ["/" number] | "@" ident
//! ```
//!
//! Identifiers declared as constants in the signature are constant
//! symbols; every other identifier in term position is a variable.

use super::formula::{Formula, PartitionedFormula, Term};
use super::signature::Signature;
use crate::error::{Error, ParseError, Result};
use crate::rational::parse_rat;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(String),
    Elem(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Not,
    And,
    Or,
    Arrow,
    Iff,
    Eq,
    /// `<` or an infix relation `<suffix`.
    Infix(String),
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Num(s) => format!("number `{s}`"),
            Tok::Elem(s) => format!("`@{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Not => "`~`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Iff => "`<->`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Infix(r) => format!("`{r}`"),
            Tok::End => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

fn lex(text: &str, sig: &Signature) -> std::result::Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |msg: String, line, column, token| ParseError {
        message: msg,
        line,
        column,
        token,
    };
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let start_col = col;
        let rest = &chars[i..];
        let starts = |s: &str| {
            let v: Vec<char> = s.chars().collect();
            rest.len() >= v.len() && rest[..v.len()] == v[..]
        };
        let (tok, len) = if starts("<->") {
            (Tok::Iff, 3)
        } else if starts("->") {
            (Tok::Arrow, 2)
        } else if c == '<' {
            // Longest relation `<suffix` declared in the signature.
            let run = rest[1..].iter().take_while(|c| is_ident_char(**c)).count();
            let found = (1..=run).rev().find_map(|k| {
                let name: String = std::iter::once('<').chain(rest[1..=k].iter().copied()).collect();
                sig.relation(&name).map(|_| (name, k + 1))
            });
            match found {
                Some((name, len)) => (Tok::Infix(name), len),
                None => (Tok::Infix("<".into()), 1),
            }
        } else if c.is_ascii_digit() || (c == '-' && rest.get(1).is_some_and(|d| d.is_ascii_digit())) {
            let mut k = 1;
            while k < rest.len() && rest[k].is_ascii_digit() {
                k += 1;
            }
            if k + 1 < rest.len() && rest[k] == '/' && rest[k + 1].is_ascii_digit() {
                k += 1;
                while k < rest.len() && rest[k].is_ascii_digit() {
                    k += 1;
                }
            }
            (Tok::Num(rest[..k].iter().collect()), k)
        } else if c == '@' {
            let run = rest[1..].iter().take_while(|c| is_ident_char(**c)).count();
            if run == 0 {
                return Err(err("`@` must be followed by an element name".into(), line, start_col, out.len() + 1));
            }
            (Tok::Elem(rest[1..=run].iter().collect()), run + 1)
        } else if is_ident_start(c) {
            let run = rest.iter().take_while(|c| is_ident_char(**c)).count();
            (Tok::Ident(rest[..run].iter().collect()), run)
        } else {
            let tok = match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                '.' => Tok::Dot,
                '~' | '!' | '¬' => Tok::Not,
                '&' | '∧' => Tok::And,
                '|' | '∨' => Tok::Or,
                '=' => Tok::Eq,
                other => {
                    return Err(err(
                        format!("unexpected character `{other}`"),
                        line,
                        start_col,
                        out.len() + 1,
                    ))
                }
            };
            (tok, 1)
        };
        out.push(Spanned {
            tok,
            line,
            column: start_col,
        });
        i += len;
        col += len;
    }
    out.push(Spanned {
        tok: Tok::End,
        line,
        column: col,
    });
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    sig: &'a Signature,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, msg: impl Into<String>) -> Error {
        let s = &self.toks[self.pos];
        Error::Parse(ParseError {
            message: msg.into(),
            line: s.line,
            column: s.column,
            token: self.pos + 1,
        })
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!(
                "expected {}, found {}",
                want.describe(),
                self.peek().describe()
            )))
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        if let Tok::Ident(k) = self.peek() {
            if k == "forall" || k == "exists" {
                return self.quant();
            }
        }
        self.iff()
    }

    fn quant(&mut self) -> Result<Formula> {
        let universal = matches!(self.bump(), Tok::Ident(k) if k == "forall");
        let mut vars = Vec::new();
        while let Tok::Ident(v) = self.peek().clone() {
            if is_keyword(&v) || self.sig.has_constant(&v) {
                return Err(self.error(format!("`{v}` cannot be bound")));
            }
            vars.push(v);
            self.bump();
            if *self.peek() == Tok::Comma {
                self.bump();
            }
        }
        if vars.is_empty() {
            return Err(self.error(format!(
                "expected a variable, found {}",
                self.peek().describe()
            )));
        }
        self.expect(Tok::Dot)?;
        let mut body = self.formula()?;
        for v in vars.iter().rev() {
            body = if universal {
                Formula::Forall(v.clone(), Box::new(body))
            } else {
                Formula::Exists(v.clone(), Box::new(body))
            };
        }
        Ok(body)
    }

    fn iff(&mut self) -> Result<Formula> {
        let lhs = self.implication()?;
        if *self.peek() == Tok::Iff {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::Iff(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut f = self.conjunction()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.conjunction()?;
            f = Formula::Or(Box::new(f), Box::new(rhs));
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut f = self.literal()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.literal()?;
            f = Formula::And(Box::new(f), Box::new(rhs));
        }
        Ok(f)
    }

    fn literal(&mut self) -> Result<Formula> {
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(Formula::Not(Box::new(self.literal()?)))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(k) if k == "true" => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::Ident(k) if k == "false" => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::Ident(k) if k == "forall" || k == "exists" => self.quant(),
            Tok::Ident(name) if *self.peek_at(1) == Tok::LParen => {
                self.bump();
                self.bump();
                let mut args = vec![self.term()?];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    args.push(self.term()?);
                }
                self.expect(Tok::RParen)?;
                self.relation_atom(name, args)
            }
            _ => {
                let lhs = self.term()?;
                match self.bump() {
                    Tok::Eq => Ok(Formula::Eq(lhs, self.term()?)),
                    Tok::Infix(rel) => {
                        let rhs = self.term()?;
                        self.relation_atom(rel, vec![lhs, rhs])
                    }
                    other => {
                        self.pos -= 1;
                        Err(self.error(format!(
                            "expected `=` or an infix relation, found {}",
                            other.describe()
                        )))
                    }
                }
            }
        }
    }

    fn relation_atom(&self, rel: String, args: Vec<Term>) -> Result<Formula> {
        match self.sig.relation(&rel) {
            None => Err(Error::UnknownRelation(rel)),
            Some((_, arity)) if arity != args.len() => Err(Error::ArityMismatch {
                name: rel,
                expected: arity,
                found: args.len(),
            }),
            Some(_) => Ok(Formula::Atom { rel, args }),
        }
    }

    fn term(&mut self) -> Result<Term> {
        match self.peek().clone() {
            Tok::Ident(name) if !is_keyword(&name) => {
                self.bump();
                Ok(if self.sig.has_constant(&name) {
                    Term::Const(name)
                } else {
                    Term::Var(name)
                })
            }
            Tok::Num(text) => {
                self.bump();
                Ok(Term::Num(parse_rat(&text)?))
            }
            Tok::Elem(e) => {
                self.bump();
                Ok(Term::Elem(e))
            }
            other => Err(self.error(format!("expected a term, found {}", other.describe()))),
        }
    }
}

fn is_keyword(s: &str) -> bool {
    matches!(s, "forall" | "exists" | "true" | "false")
}

pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula> {
    let toks = lex(text, sig)?;
    let mut p = Parser { toks, pos: 0, sig };
    let f = p.formula()?;
    if *p.peek() != Tok::End {
        return Err(p.error(format!("unexpected {}", p.peek().describe())));
    }
    Ok(f)
}

/// Parses `text` as φ(x;y). When `y` is `None` the parameters are the free
/// variables outside `x` in order of first occurrence.
pub fn parse_partitioned(
    text: &str,
    sig: &Signature,
    x: &[String],
    y: Option<&[String]>,
) -> Result<PartitionedFormula> {
    let body = parse_formula(text, sig)?;
    match y {
        Some(y) => PartitionedFormula::new(body, x.to_vec(), y.to_vec()),
        None => PartitionedFormula::with_object_vars(body, x.to_vec()),
    }
}
