//! Parsing and serialisation of rule, fact, query, and DL axiom files.
//!
//! Grammar notes:
//! - comments run from `%` to end of line;
//! - identifiers are letters, digits, and underscores, not starting with a
//!   digit; the `__` prefix is reserved for generated symbols and rejected;
//! - variables are written `?name`;
//! - `TOP` and `BOT` are the truth and falsehood predicates;
//! - `exists` and `ask` are keywords.
//!
//! Source rules are function-free by construction: the grammar has no way
//! to write a function application. Function symbols only ever appear after
//! skolemisation, in memory.

use std::collections::HashMap;

use crate::atom::{Atom, Pred};
use crate::error::{Error, Result, SourceSpan};
use crate::rule::{Provenance, Rule, RuleSet};
use crate::store::FactStore;
use crate::symbols::RESERVED_PREFIX;
use crate::term::Term;
use serde_json::json;

const KEYWORDS: [&str; 2] = ["exists", "ask"];

// ---------------------------------------------------------------- lexing

#[derive(Clone, PartialEq, Eq, Debug)]
enum Tok {
    Ident(String),
    Var(String),
    Arrow,
    Comma,
    Dot,
    LParen,
    RParen,
    Equals,
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::Var(s) => write!(f, "'?{s}'"),
            Tok::Arrow => write!(f, "'->'"),
            Tok::Comma => write!(f, "','"),
            Tok::Dot => write!(f, "'.'"),
            Tok::LParen => write!(f, "'('"),
            Tok::RParen => write!(f, "')'"),
            Tok::Equals => write!(f, "'='"),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    span: SourceSpan,
}

fn lex(text: &str, file: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let mut line = 1u32;
    let mut col = 1u32;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let span = SourceSpan::new(file, line, col);
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            '%' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    col += 1;
                }
            }
            ',' => {
                chars.next();
                col += 1;
                out.push(Token {
                    tok: Tok::Comma,
                    span,
                });
            }
            '.' => {
                chars.next();
                col += 1;
                out.push(Token {
                    tok: Tok::Dot,
                    span,
                });
            }
            '(' => {
                chars.next();
                col += 1;
                out.push(Token {
                    tok: Tok::LParen,
                    span,
                });
            }
            ')' => {
                chars.next();
                col += 1;
                out.push(Token {
                    tok: Tok::RParen,
                    span,
                });
            }
            '=' => {
                chars.next();
                col += 1;
                out.push(Token {
                    tok: Tok::Equals,
                    span,
                });
            }
            '-' => {
                chars.next();
                col += 1;
                match chars.peek() {
                    Some('>') => {
                        chars.next();
                        col += 1;
                        out.push(Token {
                            tok: Tok::Arrow,
                            span,
                        });
                    }
                    _ => {
                        return Err(Error::Syntax {
                            span,
                            message: "expected '->'".into(),
                        })
                    }
                }
            }
            '?' => {
                chars.next();
                col += 1;
                let name_span = SourceSpan::new(file, line, col);
                let name = lex_ident(&mut chars, &mut col);
                if name.is_empty() {
                    return Err(Error::Syntax {
                        span: name_span,
                        message: "expected a variable name after '?'".into(),
                    });
                }
                check_ident(&name, &span)?;
                out.push(Token {
                    tok: Tok::Var(name),
                    span,
                });
            }
            c if c.is_alphabetic() || c == '_' => {
                let name = lex_ident(&mut chars, &mut col);
                check_ident(&name, &span)?;
                out.push(Token {
                    tok: Tok::Ident(name),
                    span,
                });
            }
            other => {
                return Err(Error::Syntax {
                    span,
                    message: format!("unexpected character '{other}'"),
                })
            }
        }
    }
    Ok(out)
}

fn lex_ident(chars: &mut std::iter::Peekable<std::str::Chars>, col: &mut u32) -> String {
    let mut s = String::new();
    while let Some(&c) = chars.peek() {
        if c.is_alphanumeric() || c == '_' {
            s.push(c);
            chars.next();
            *col += 1;
        } else {
            break;
        }
    }
    s
}

fn check_ident(name: &str, span: &SourceSpan) -> Result<()> {
    if name.starts_with(RESERVED_PREFIX) {
        return Err(Error::ReservedIdentifier {
            span: span.clone(),
            name: name.to_owned(),
        });
    }
    Ok(())
}

// ---------------------------------------------------------------- parsing

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: SourceSpan,
    /// first-use arity and span per predicate, for conflict diagnostics
    arities: HashMap<Pred, (usize, SourceSpan)>,
}

impl Parser {
    fn new(text: &str, file: &str) -> Result<Parser> {
        let tokens = lex(text, file)?;
        let end = tokens
            .last()
            .map(|t| t.span.clone())
            .unwrap_or_else(|| SourceSpan::new(file, 1, 1));
        Ok(Parser {
            tokens,
            pos: 0,
            end,
            arities: HashMap::new(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn span(&self) -> SourceSpan {
        self.tokens
            .get(self.pos)
            .map(|t| t.span.clone())
            .unwrap_or_else(|| self.end.clone())
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok) -> Result<Token> {
        match self.next() {
            Some(t) if t.tok == tok => Ok(t),
            Some(t) => Err(Error::Syntax {
                span: t.span,
                message: format!("expected {tok}, found {}", t.tok),
            }),
            None => Err(Error::Syntax {
                span: self.end.clone(),
                message: format!("expected {tok}, found end of input"),
            }),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::Syntax {
            span: self.span(),
            message: message.into(),
        }
    }

    fn ident(&mut self) -> Result<(String, SourceSpan)> {
        match self.next() {
            Some(Token {
                tok: Tok::Ident(s),
                span,
            }) => {
                if KEYWORDS.contains(&s.as_str()) {
                    return Err(Error::Syntax {
                        span,
                        message: format!("'{s}' is a keyword"),
                    });
                }
                Ok((s, span))
            }
            Some(t) => Err(Error::Syntax {
                span: t.span,
                message: format!("expected an identifier, found {}", t.tok),
            }),
            None => Err(Error::Syntax {
                span: self.end.clone(),
                message: "expected an identifier, found end of input".into(),
            }),
        }
    }

    fn term(&mut self) -> Result<(Term, SourceSpan)> {
        match self.next() {
            Some(Token {
                tok: Tok::Var(s),
                span,
            }) => Ok((Term::var(&s), span)),
            Some(Token {
                tok: Tok::Ident(s),
                span,
            }) => {
                if KEYWORDS.contains(&s.as_str()) {
                    return Err(Error::Syntax {
                        span,
                        message: format!("'{s}' is a keyword"),
                    });
                }
                Ok((Term::constant(&s), span))
            }
            Some(t) => Err(Error::Syntax {
                span: t.span,
                message: format!("expected a term, found {}", t.tok),
            }),
            None => Err(Error::Syntax {
                span: self.end.clone(),
                message: "expected a term, found end of input".into(),
            }),
        }
    }

    fn record_arity(&mut self, pred: Pred, arity: usize, span: &SourceSpan) -> Result<()> {
        if (pred.is_top() || pred.is_bot()) && arity != 1 {
            return Err(Error::Syntax {
                span: span.clone(),
                message: format!("{pred} is unary"),
            });
        }
        match self.arities.get(&pred) {
            Some(&(n, _)) if n != arity => Err(Error::ArityConflict {
                pred: pred.to_string(),
                expected: n,
                found: arity,
            }),
            Some(_) => Ok(()),
            None => {
                self.arities.insert(pred, (arity, span.clone()));
                Ok(())
            }
        }
    }

    /// `atom | term "=" term`
    fn atom_or_equality(&mut self) -> Result<Atom> {
        // equality with a variable or constant on the left
        if matches!(self.peek(), Some(Tok::Var(_)))
            || matches!(
                (self.peek(), self.tokens.get(self.pos + 1).map(|t| &t.tok)),
                (Some(Tok::Ident(_)), Some(Tok::Equals))
            )
        {
            let (lhs, span) = self.term()?;
            self.expect(Tok::Equals)?;
            let (rhs, _) = self.term()?;
            let _ = span;
            return Ok(Atom::equality(lhs, rhs));
        }
        self.plain_atom()
    }

    /// `IDENT [ "(" term ("," term)* ")" ]`
    fn plain_atom(&mut self) -> Result<Atom> {
        let (name, span) = self.ident()?;
        let pred = Pred::new(&name);
        let mut args = Vec::new();
        if matches!(self.peek(), Some(Tok::LParen)) {
            self.next();
            loop {
                let (t, _) = self.term()?;
                args.push(t);
                match self.next() {
                    Some(Token {
                        tok: Tok::Comma, ..
                    }) => continue,
                    Some(Token {
                        tok: Tok::RParen, ..
                    }) => break,
                    Some(t) => {
                        return Err(Error::Syntax {
                            span: t.span,
                            message: format!("expected ',' or ')', found {}", t.tok),
                        })
                    }
                    None => {
                        return Err(Error::Syntax {
                            span: self.end.clone(),
                            message: "unbalanced '(': expected ',' or ')'".into(),
                        })
                    }
                }
            }
        }
        self.record_arity(pred, args.len(), &span)?;
        Ok(Atom::new(pred, args))
    }

    fn varlist(&mut self) -> Result<Vec<Term>> {
        let mut vars = Vec::new();
        loop {
            match self.next() {
                Some(Token {
                    tok: Tok::Var(s), ..
                }) => vars.push(Term::var(&s)),
                Some(t) => {
                    return Err(Error::Syntax {
                        span: t.span,
                        message: format!("expected a variable, found {}", t.tok),
                    })
                }
                None => {
                    return Err(Error::Syntax {
                        span: self.end.clone(),
                        message: "expected a variable, found end of input".into(),
                    })
                }
            }
            if matches!(self.peek(), Some(Tok::Comma)) {
                self.next();
            } else {
                break;
            }
        }
        Ok(vars)
    }

    fn rule(&mut self, id: String) -> Result<Rule> {
        let mut body = Vec::new();
        loop {
            body.push(self.atom_or_equality()?);
            match self.next() {
                Some(Token {
                    tok: Tok::Comma, ..
                }) => continue,
                Some(Token {
                    tok: Tok::Arrow, ..
                }) => break,
                Some(t) => {
                    return Err(Error::Syntax {
                        span: t.span,
                        message: format!("expected ',' or '->', found {}", t.tok),
                    })
                }
                None => {
                    return Err(Error::Syntax {
                        span: self.end.clone(),
                        message: "expected ',' or '->', found end of input".into(),
                    })
                }
            }
        }
        let mut exist = Vec::new();
        if matches!(self.peek(), Some(Tok::Ident(s)) if s == "exists") {
            self.next();
            exist = self.varlist()?;
            self.expect(Tok::Dot)?;
        }
        let mut head = Vec::new();
        loop {
            head.push(self.atom_or_equality()?);
            match self.next() {
                Some(Token {
                    tok: Tok::Comma, ..
                }) => continue,
                Some(Token { tok: Tok::Dot, .. }) => break,
                Some(t) => {
                    return Err(Error::Syntax {
                        span: t.span,
                        message: format!("expected ',' or '.', found {}", t.tok),
                    })
                }
                None => {
                    return Err(Error::Syntax {
                        span: self.end.clone(),
                        message: "expected ',' or '.', found end of input".into(),
                    })
                }
            }
        }
        Rule::new(id, body, head, exist, Provenance::User)
    }
}

/// Parse a `.rules` file. Variable partitions are computed per rule, variable
/// names are standardised apart set-wide, and body equalities are kept (the
/// transforms eliminate them later).
pub fn parse_rules(text: &str, file: &str) -> Result<RuleSet> {
    let mut p = Parser::new(text, file)?;
    let mut rules = Vec::new();
    while !p.at_end() {
        let id = format!("r{}", rules.len() + 1);
        rules.push(p.rule(id)?);
    }
    let rs = RuleSet::new(rules).standardize_apart();
    rs.signature()?;
    Ok(rs)
}

/// Parse a `.facts` file: ground atoms terminated by `.`.
pub fn parse_facts(text: &str, file: &str) -> Result<FactStore> {
    let mut p = Parser::new(text, file)?;
    let mut store = FactStore::new();
    while !p.at_end() {
        let span = p.span();
        let atom = p.plain_atom()?;
        if !atom.is_ground() {
            return Err(Error::Syntax {
                span,
                message: format!("non-ground atom in facts file: {atom}"),
            });
        }
        p.expect(Tok::Dot)?;
        store.insert(atom)?;
    }
    Ok(store)
}

/// A conjunctive query: answer variables are the free ones; the query is
/// Boolean when there are none.
#[derive(Clone, Debug)]
pub struct Cq {
    pub answer_vars: Vec<Term>,
    pub exist_vars: Vec<Term>,
    pub atoms: Vec<Atom>,
}

impl Cq {
    pub fn is_boolean(&self) -> bool {
        self.answer_vars.is_empty()
    }
}

impl std::fmt::Display for Cq {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ask ")?;
        if !self.exist_vars.is_empty() {
            write!(f, "exists ")?;
            for (i, v) in self.exist_vars.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{v}")?;
            }
            write!(f, " . ")?;
        }
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, " .")
    }
}

/// Parse a `.query` file: `ask [exists ?v,... .] Atom, ... .`
/// Equality atoms are rejected.
pub fn parse_query(text: &str, file: &str) -> Result<Cq> {
    let mut p = Parser::new(text, file)?;
    match p.next() {
        Some(Token {
            tok: Tok::Ident(s), ..
        }) if s == "ask" => {}
        Some(t) => {
            return Err(Error::Syntax {
                span: t.span,
                message: "a query starts with 'ask'".into(),
            })
        }
        None => {
            return Err(Error::Syntax {
                span: p.end.clone(),
                message: "empty query".into(),
            })
        }
    }
    let mut exist_vars = Vec::new();
    if matches!(p.peek(), Some(Tok::Ident(s)) if s == "exists") {
        p.next();
        exist_vars = p.varlist()?;
        p.expect(Tok::Dot)?;
    }
    let mut atoms = Vec::new();
    loop {
        let span = p.span();
        let atom = p.atom_or_equality()?;
        if atom.pred.is_equality() {
            return Err(Error::Syntax {
                span,
                message: "equality atoms are not allowed in queries".into(),
            });
        }
        atoms.push(atom);
        match p.next() {
            Some(Token {
                tok: Tok::Comma, ..
            }) => continue,
            Some(Token { tok: Tok::Dot, .. }) => break,
            Some(t) => {
                return Err(Error::Syntax {
                    span: t.span,
                    message: format!("expected ',' or '.', found {}", t.tok),
                })
            }
            None => {
                return Err(Error::Syntax {
                    span: p.end.clone(),
                    message: "expected ',' or '.', found end of input".into(),
                })
            }
        }
    }
    if !p.at_end() {
        return Err(p.error("trailing input after query"));
    }
    let mut answer_vars = Vec::new();
    for a in &atoms {
        for v in a.vars() {
            if !exist_vars.contains(&v) && !answer_vars.contains(&v) {
                answer_vars.push(v);
            }
        }
    }
    Ok(Cq {
        answer_vars,
        exist_vars,
        atoms,
    })
}

// ---------------------------------------------------------------- DL axioms

/// A role: atomic or inverse. `inv(R)` swaps the argument order when the
/// axiom is translated to a rule.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Role {
    Atomic(Pred),
    Inverse(Pred),
}

impl Role {
    /// The atom `role(t1, t2)`, with inverse roles swapping the arguments.
    pub fn atom(self, t1: Term, t2: Term) -> Atom {
        match self {
            Role::Atomic(p) => Atom::new(p, vec![t1, t2]),
            Role::Inverse(p) => Atom::new(p, vec![t2, t1]),
        }
    }
}

impl std::fmt::Display for Role {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Role::Atomic(p) => write!(f, "{p}"),
            Role::Inverse(p) => write!(f, "inv({p})"),
        }
    }
}

/// One normalised Horn axiom. The numbering follows the usual catalogue of
/// normalised class/property inclusion shapes.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum DlAxiom {
    /// Type 1: `A subclassof some R B`
    SomeValues { sub: Pred, role: Role, filler: Pred },
    /// Type 2: `A subclassof max1 R B`
    MaxOne { sub: Pred, role: Role, filler: Pred },
    /// Type 3: `A and B subclassof C`
    ConjSubclass { left: Pred, right: Pred, sup: Pred },
    /// Type 4: `A subclassof all R B`
    AllValues { sub: Pred, role: Role, filler: Pred },
    /// Type 5: `R subpropertyof S`
    SubRole { sub: Role, sup: Role },
    /// Type 6: `R o S subpropertyof T`
    RoleChain {
        first: Role,
        second: Role,
        sup: Role,
    },
    /// Type 7: `A subclassof one a`
    Nominal { sub: Pred, individual: Term },
}

impl DlAxiom {
    pub fn axiom_type(&self) -> u8 {
        match self {
            DlAxiom::SomeValues { .. } => 1,
            DlAxiom::MaxOne { .. } => 2,
            DlAxiom::ConjSubclass { .. } => 3,
            DlAxiom::AllValues { .. } => 4,
            DlAxiom::SubRole { .. } => 5,
            DlAxiom::RoleChain { .. } => 6,
            DlAxiom::Nominal { .. } => 7,
        }
    }
}

struct DlParser {
    words: Vec<(String, SourceSpan)>,
    pos: usize,
    end: SourceSpan,
}

impl DlParser {
    fn next(&mut self) -> Option<(String, SourceSpan)> {
        let w = self.words.get(self.pos).cloned();
        if w.is_some() {
            self.pos += 1;
        }
        w
    }

    fn word(&mut self, what: &str) -> Result<(String, SourceSpan)> {
        match self.next() {
            Some(w) => Ok(w),
            None => Err(Error::Syntax {
                span: self.end.clone(),
                message: format!("expected {what}, found end of line"),
            }),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<()> {
        let (w, span) = self.word(&format!("'{kw}'"))?;
        if w == kw {
            Ok(())
        } else {
            Err(Error::Syntax {
                span,
                message: format!("expected '{kw}', found '{w}'"),
            })
        }
    }

    fn concept(&mut self) -> Result<Pred> {
        let (w, span) = self.word("a concept name")?;
        check_ident(&w, &span)?;
        if !is_ident(&w) {
            return Err(Error::Syntax {
                span,
                message: format!("'{w}' is not a valid concept name"),
            });
        }
        Ok(Pred::new(&w))
    }

    fn role(&mut self) -> Result<Role> {
        let (w, span) = self.word("a role")?;
        if let Some(rest) = w.strip_prefix("inv(") {
            let inner = rest.strip_suffix(')').ok_or_else(|| Error::Syntax {
                span: span.clone(),
                message: "unbalanced parenthesis in inverse role".into(),
            })?;
            check_ident(inner, &span)?;
            if !is_ident(inner) {
                return Err(Error::Syntax {
                    span,
                    message: format!("'{inner}' is not a valid role name"),
                });
            }
            return Ok(Role::Inverse(Pred::new(inner)));
        }
        check_ident(&w, &span)?;
        if !is_ident(&w) {
            return Err(Error::Syntax {
                span,
                message: format!("'{w}' is not a valid role name"),
            });
        }
        Ok(Role::Atomic(Pred::new(&w)))
    }
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_alphanumeric() || c == '_')
}

/// Parse a `.dlx` file: one axiom per line, `%` comments.
pub fn parse_dl_axioms(text: &str, file: &str) -> Result<Vec<DlAxiom>> {
    let mut axioms = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('%') {
            Some(i) => &raw[..i],
            None => raw,
        };
        if line.trim().is_empty() {
            continue;
        }
        let mut words = Vec::new();
        let mut col = 1u32;
        for piece in line.split_whitespace() {
            let at = line[(col as usize - 1)..]
                .find(piece)
                .map(|o| col + o as u32)
                .unwrap_or(col);
            words.push((
                piece.to_owned(),
                SourceSpan::new(file, (lineno + 1) as u32, at),
            ));
            col = at + piece.len() as u32;
        }
        let end = SourceSpan::new(file, (lineno + 1) as u32, (line.len() + 1) as u32);
        let mut p = DlParser { words, pos: 0, end };

        // Forms starting with two concept/role words diverge at the second
        // word: `and` (Type 3), `o` (Type 6), `subpropertyof` (Type 5),
        // `subclassof` (Types 1, 2, 4, 7).
        let axiom = match p.words.get(1).map(|(w, _)| w.as_str()) {
            Some("and") => {
                let left = p.concept()?;
                p.keyword("and")?;
                let right = p.concept()?;
                p.keyword("subclassof")?;
                let sup = p.concept()?;
                DlAxiom::ConjSubclass { left, right, sup }
            }
            Some("o") => {
                let first = p.role()?;
                p.keyword("o")?;
                let second = p.role()?;
                p.keyword("subpropertyof")?;
                let sup = p.role()?;
                DlAxiom::RoleChain { first, second, sup }
            }
            Some("subpropertyof") => {
                let sub = p.role()?;
                p.keyword("subpropertyof")?;
                let sup = p.role()?;
                DlAxiom::SubRole { sub, sup }
            }
            Some("subclassof") => {
                let sub = p.concept()?;
                p.keyword("subclassof")?;
                let (kw, span) = p.word("'some', 'max1', 'all', or 'one'")?;
                match kw.as_str() {
                    "some" => {
                        let role = p.role()?;
                        let filler = p.concept()?;
                        DlAxiom::SomeValues { sub, role, filler }
                    }
                    "max1" => {
                        let role = p.role()?;
                        let filler = p.concept()?;
                        DlAxiom::MaxOne { sub, role, filler }
                    }
                    "all" => {
                        let role = p.role()?;
                        let filler = p.concept()?;
                        DlAxiom::AllValues { sub, role, filler }
                    }
                    "one" => {
                        let (name, span) = p.word("an individual name")?;
                        check_ident(&name, &span)?;
                        if !is_ident(&name) {
                            return Err(Error::Syntax {
                                span,
                                message: format!("'{name}' is not a valid individual name"),
                            });
                        }
                        DlAxiom::Nominal {
                            sub,
                            individual: Term::constant(&name),
                        }
                    }
                    other => {
                        return Err(Error::Syntax {
                            span,
                            message: format!(
                                "unknown axiom form: expected 'some', 'max1', 'all', or 'one', found '{other}'"
                            ),
                        })
                    }
                }
            }
            _ => {
                return Err(Error::Syntax {
                    span: p
                        .words
                        .first()
                        .map(|(_, s)| s.clone())
                        .unwrap_or(p.end.clone()),
                    message: "unknown axiom form".into(),
                })
            }
        };
        if p.pos != p.words.len() {
            let (w, span) = p.words[p.pos].clone();
            return Err(Error::Syntax {
                span,
                message: format!("trailing input '{w}' after axiom"),
            });
        }
        axioms.push(axiom);
    }
    Ok(axioms)
}

/// The machine-readable report for one verdict, with sorted keys. Timings
/// are off by default so identical inputs produce byte-identical output.
pub fn report_value(v: &crate::check::Verdict, timings: bool) -> serde_json::Value {
    let witness = match &v.witness {
        None => serde_json::Value::Null,
        Some(w) => {
            let kind = match w {
                crate::check::Witness::Graph(g) => match g {
                    crate::graphs::GraphWitness::PositionCycle(_) => "position-cycle",
                    crate::graphs::GraphWitness::VariableCycle(_) => "variable-cycle",
                    crate::graphs::GraphWitness::RuleCycle(_) => "rule-cycle",
                    crate::graphs::GraphWitness::RemovedPosition { .. } => "removed-position",
                    crate::graphs::GraphWitness::RankOverflow { .. } => "rank-overflow",
                },
                crate::check::Witness::CyclicTerm { .. } => "cyclic-term",
                crate::check::Witness::AlarmDerived => "alarm-derived",
                crate::check::Witness::Component { .. } => "component",
                crate::check::Witness::Marking { .. } => "marking",
                crate::check::Witness::MarkingsExhausted { .. } => "markings-exhausted",
                crate::check::Witness::Limit(_) => "limit",
            };
            let mut obj = serde_json::Map::new();
            obj.insert("kind".into(), json!(kind));
            obj.insert("detail".into(), json!(w.to_string()));
            if let crate::check::Witness::CyclicTerm { term, .. } = w {
                obj.insert("term".into(), json!(term));
            }
            serde_json::Value::Object(obj)
        }
    };
    let mut stats = serde_json::Map::new();
    if let Some(f) = v.stats.facts {
        stats.insert("facts".into(), json!(f));
    }
    if let Some(t) = v.stats.terms {
        stats.insert("terms".into(), json!(t));
    }
    if let Some(d) = v.stats.depth {
        stats.insert("depth".into(), json!(d));
    }
    if let Some(s) = v.stats.steps {
        stats.insert("steps".into(), json!(s));
    }
    if timings {
        stats.insert("elapsedMs".into(), json!(v.stats.elapsed_ms as u64));
    }
    json!({
        "notion": if v.dep { format!("{}+dep", v.notion) } else { v.notion.to_string() },
        "mode": v.mode,
        "equality": v.equality.as_str(),
        "verdict": v.outcome.as_str(),
        "witness": witness,
        "stats": serde_json::Value::Object(stats),
    })
}

/// Render a report as canonical JSON text.
pub fn emit_report(v: &crate::check::Verdict, timings: bool) -> String {
    report_value(v, timings).to_string()
}

/// Fail if a fact store uses a predicate from the rule set at the wrong arity.
pub fn check_compatible(rs: &RuleSet, store: &FactStore) -> Result<()> {
    let sig = rs.signature()?;
    for (pred, arity) in store.predicates() {
        if let Some(&expected) = sig.get(&pred) {
            if expected != arity {
                return Err(Error::ArityConflict {
                    pred: pred.to_string(),
                    expected,
                    found: arity,
                });
            }
        }
    }
    Ok(())
}
