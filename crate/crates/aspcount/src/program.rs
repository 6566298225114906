//! Ground program data model, textual parser, and structural classifiers.
//!
//! The input grammar (one statement per `.`, `%` comments to end of line):
//!
//! ```text
//! program    := statement* ;
//! statement  := head? ( ":-" body )? "." ;
//! head       := atom ( "|" atom )* ;
//! body       := literal ( "," literal )* ;
//! literal    := "not" atom | atom ;
//! atom       := [a-zA-Z_][a-zA-Z0-9_]* ;
//! ```
//!
//! Atom ids are dense and assigned by first textual occurrence, which makes
//! CNF variable numbering reproducible across runs.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use thiserror::Error;

/// Dense atom index, contiguous from 0 in first-occurrence order.
pub type AtomId = u32;

/// Interned atom names. Ids are contiguous from 0; names are unique.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AtomTable {
    names: Vec<String>,
    index: HashMap<String, AtomId>,
}

impl AtomTable {
    pub fn intern(&mut self, name: &str) -> AtomId {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = self.names.len() as AtomId;
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        id
    }

    pub fn lookup(&self, name: &str) -> Option<AtomId> {
        self.index.get(name).copied()
    }

    pub fn name(&self, id: AtomId) -> &str {
        &self.names[id as usize]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = AtomId> {
        0..self.names.len() as AtomId
    }
}

/// A ground rule `h1 | ... | hk :- b1, ..., bm, not c1, ..., not cn.`
///
/// Facts have an empty body; constraints have an empty head. The three
/// positions are duplicate-free sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub head: BTreeSet<AtomId>,
    pub pos_body: BTreeSet<AtomId>,
    pub neg_body: BTreeSet<AtomId>,
}

impl Rule {
    /// A rule is a constraint when its head is empty.
    pub fn is_constraint(&self) -> bool {
        self.head.is_empty()
    }

    pub fn is_fact(&self) -> bool {
        self.pos_body.is_empty() && self.neg_body.is_empty()
    }

    pub fn body_len(&self) -> usize {
        self.pos_body.len() + self.neg_body.len()
    }
}

/// A ground program: an atom table plus rules in source order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Program {
    pub atoms: AtomTable,
    pub rules: Vec<Rule>,
}

impl Program {
    pub fn num_atoms(&self) -> u32 {
        self.atoms.len() as u32
    }

    /// True iff some rule has a head with two or more atoms.
    pub fn is_disjunctive(&self) -> bool {
        self.rules.iter().any(|r| r.head.len() >= 2)
    }

    /// True iff every rule head has at most one atom (constraints allowed).
    pub fn is_normal(&self) -> bool {
        !self.is_disjunctive()
    }

    pub fn parse(text: &str) -> Result<Program, ParseError> {
        Parser::new(text).parse_program()
    }
}

/// Syntax error with 1-based line and column.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("syntax error at {line}:{col}: {msg}")]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Ident(String),
    Not,
    Arrow,
    Pipe,
    Comma,
    Dot,
}

struct Parser<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: u32,
    col: u32,
    lookahead: Option<(Token, u32, u32)>,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            chars: text.chars().peekable(),
            line: 1,
            col: 1,
            lookahead: None,
        }
    }

    fn err<T>(&self, line: u32, col: u32, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            line,
            col,
            msg: msg.into(),
        })
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.chars.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('%') => {
                    while let Some(&c) = self.chars.peek() {
                        self.bump();
                        if c == '\n' {
                            break;
                        }
                    }
                }
                _ => break,
            }
        }
    }

    /// Next token, or None at end of input.
    fn next_token(&mut self) -> Result<Option<(Token, u32, u32)>, ParseError> {
        if let Some(t) = self.lookahead.take() {
            return Ok(Some(t));
        }
        self.skip_trivia();
        let (line, col) = (self.line, self.col);
        let c = match self.chars.peek() {
            None => return Ok(None),
            Some(&c) => c,
        };
        let tok = match c {
            '.' => {
                self.bump();
                Token::Dot
            }
            ',' => {
                self.bump();
                Token::Comma
            }
            '|' => {
                self.bump();
                Token::Pipe
            }
            ':' => {
                self.bump();
                match self.chars.peek() {
                    Some('-') => {
                        self.bump();
                        Token::Arrow
                    }
                    _ => return self.err(line, col, "expected `:-`"),
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        s.push(c);
                        self.bump();
                    } else {
                        break;
                    }
                }
                if s == "not" {
                    Token::Not
                } else {
                    Token::Ident(s)
                }
            }
            c => return self.err(line, col, format!("unexpected character `{c}`")),
        };
        Ok(Some((tok, line, col)))
    }

    fn peek_token(&mut self) -> Result<Option<&Token>, ParseError> {
        if self.lookahead.is_none() {
            self.lookahead = self.next_token()?;
        }
        Ok(self.lookahead.as_ref().map(|(t, _, _)| t))
    }

    fn expect_atom(&mut self, atoms: &mut AtomTable) -> Result<AtomId, ParseError> {
        match self.next_token()? {
            Some((Token::Ident(name), _, _)) => Ok(atoms.intern(&name)),
            Some((tok, l, c)) => self.err(l, c, format!("expected atom, found {}", show(&tok))),
            None => self.err(self.line, self.col, "expected atom, found end of input"),
        }
    }

    fn parse_program(&mut self) -> Result<Program, ParseError> {
        let mut program = Program::default();
        while self.peek_token()?.is_some() {
            let rule = self.parse_statement(&mut program.atoms)?;
            program.rules.push(rule);
        }
        Ok(program)
    }

    fn parse_statement(&mut self, atoms: &mut AtomTable) -> Result<Rule, ParseError> {
        let mut rule = Rule {
            head: BTreeSet::new(),
            pos_body: BTreeSet::new(),
            neg_body: BTreeSet::new(),
        };
        self.peek_token()?;
        let (start_line, start_col) = match &self.lookahead {
            Some((_, l, c)) => (*l, *c),
            None => (self.line, self.col),
        };
        // optional head
        if matches!(self.peek_token()?, Some(Token::Ident(_))) {
            rule.head.insert(self.expect_atom(atoms)?);
            while matches!(self.peek_token()?, Some(Token::Pipe)) {
                self.next_token()?;
                rule.head.insert(self.expect_atom(atoms)?);
            }
        }
        // optional body
        let has_body = matches!(self.peek_token()?, Some(Token::Arrow));
        if has_body {
            self.next_token()?;
            loop {
                if matches!(self.peek_token()?, Some(Token::Not)) {
                    self.next_token()?;
                    rule.neg_body.insert(self.expect_atom(atoms)?);
                } else {
                    rule.pos_body.insert(self.expect_atom(atoms)?);
                }
                if matches!(self.peek_token()?, Some(Token::Comma)) {
                    self.next_token()?;
                } else {
                    break;
                }
            }
        }
        if rule.head.is_empty() && !has_body {
            return self.err(start_line, start_col, "statement with neither head nor body");
        }
        match self.next_token()? {
            Some((Token::Dot, _, _)) => Ok(rule),
            Some((tok, l, c)) => self.err(l, c, format!("expected `.`, found {}", show(&tok))),
            None => self.err(self.line, self.col, "expected `.`, found end of input"),
        }
    }
}

fn show(tok: &Token) -> String {
    match tok {
        Token::Ident(s) => format!("`{s}`"),
        Token::Not => "`not`".into(),
        Token::Arrow => "`:-`".into(),
        Token::Pipe => "`|`".into(),
        Token::Comma => "`,`".into(),
        Token::Dot => "`.`".into(),
    }
}

impl fmt::Display for Program {
    /// Renders one rule per line. Atoms within a rule are emitted in id order
    /// (head first, then the body merged across positive and negative
    /// literals), so reparsing the output reproduces the same id assignment.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for rule in &self.rules {
            let mut first = true;
            for &a in &rule.head {
                if !first {
                    write!(f, " | ")?;
                }
                write!(f, "{}", self.atoms.name(a))?;
                first = false;
            }
            if rule.body_len() > 0 {
                write!(f, "{}:- ", if rule.head.is_empty() { "" } else { " " })?;
                // merge pos and neg literals in ascending atom-id order
                let mut lits: Vec<(AtomId, bool)> = rule
                    .pos_body
                    .iter()
                    .map(|&a| (a, false))
                    .chain(rule.neg_body.iter().map(|&a| (a, true)))
                    .collect();
                lits.sort();
                for (i, (a, neg)) in lits.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    if *neg {
                        write!(f, "not ")?;
                    }
                    write!(f, "{}", self.atoms.name(*a))?;
                }
            }
            writeln!(f, ".")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atom_set(p: &Program, names: &[&str]) -> BTreeSet<AtomId> {
        names.iter().map(|n| p.atoms.lookup(n).unwrap()).collect()
    }

    #[test]
    fn parses_normal_rule() {
        let p = Program::parse("a :- b, not c.").unwrap();
        assert_eq!(p.rules.len(), 1);
        assert_eq!(p.rules[0].head, atom_set(&p, &["a"]));
        assert_eq!(p.rules[0].pos_body, atom_set(&p, &["b"]));
        assert_eq!(p.rules[0].neg_body, atom_set(&p, &["c"]));
    }

    #[test]
    fn parses_disjunctive_fact() {
        let p = Program::parse("a | b.").unwrap();
        assert_eq!(p.rules.len(), 1);
        assert_eq!(p.rules[0].head, atom_set(&p, &["a", "b"]));
        assert!(p.rules[0].is_fact());
    }

    #[test]
    fn parses_constraint_with_shared_atom() {
        let p = Program::parse(":- a, not a.").unwrap();
        assert_eq!(p.rules.len(), 1);
        assert!(p.rules[0].is_constraint());
        assert_eq!(p.rules[0].pos_body, atom_set(&p, &["a"]));
        assert_eq!(p.rules[0].neg_body, atom_set(&p, &["a"]));
    }

    #[test]
    fn classifiers() {
        assert!(Program::parse(":- a.").unwrap().rules[0].is_constraint());
        assert!(!Program::parse("a.").unwrap().rules[0].is_constraint());
        assert!(!Program::parse("a | b :- c.").unwrap().rules[0].is_constraint());

        assert!(Program::parse("a | b.").unwrap().is_disjunctive());
        assert!(!Program::parse("a :- not b. b :- not a.").unwrap().is_disjunctive());
        assert!(!Program::parse("").unwrap().is_disjunctive());

        assert!(Program::parse("a :- b. :- a.").unwrap().is_normal());
        assert!(!Program::parse("a | b :- c.").unwrap().is_normal());
        assert!(Program::parse("a.").unwrap().is_normal());
    }

    #[test]
    fn first_occurrence_ids() {
        let p = Program::parse("b :- c. a :- b.").unwrap();
        assert_eq!(p.atoms.lookup("b"), Some(0));
        assert_eq!(p.atoms.lookup("c"), Some(1));
        assert_eq!(p.atoms.lookup("a"), Some(2));
    }

    #[test]
    fn dedup_within_position() {
        let p = Program::parse("a :- b, b, not c, not c.").unwrap();
        assert_eq!(p.rules[0].pos_body.len(), 1);
        assert_eq!(p.rules[0].neg_body.len(), 1);
    }

    #[test]
    fn comments_and_whitespace() {
        let p = Program::parse("% header\n a :- % inline\n   b.\n\n% tail").unwrap();
        assert_eq!(p.rules.len(), 1);
    }

    #[test]
    fn error_positions() {
        let e = Program::parse("a :- b\nc.").unwrap_err();
        assert_eq!((e.line, e.col), (2, 1));
        let e = Program::parse(".").unwrap_err();
        assert_eq!((e.line, e.col), (1, 1));
        let e = Program::parse("a :- .").unwrap_err();
        assert_eq!(e.line, 1);
        let e = Program::parse("a :- b,").unwrap_err();
        assert_eq!(e.line, 1);
        assert!(Program::parse("a ;").is_err());
    }

    #[test]
    fn headless_bodyless_statement_rejected() {
        assert!(Program::parse(":- .").is_err());
    }

    #[test]
    fn round_trip_identity() {
        for src in [
            "a :- b, not c. c | d :- e. :- f, not a. g.",
            "x :- not y. y :- not x.",
            "b. a :- b. a :- not c, b.",
            "p :- q, r. q :- not p.",
            "",
        ] {
            let p1 = Program::parse(src).unwrap();
            let p2 = Program::parse(&p1.to_string()).unwrap();
            assert_eq!(p1, p2, "round trip failed for {src:?}");
        }
    }
}
