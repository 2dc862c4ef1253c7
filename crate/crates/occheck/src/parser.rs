//! Reader and writer for the textual program format.
//!
//! The format is a Prolog subset: `%` comments, clauses `h.` and `h :- b.`,
//! queries `?- a, b.`, list sugar, the arithmetic operators `^`, `*`, `/`,
//! `+`, `-` and the comparison predicates, plus two directive forms:
//!
//! ```text
//! :- mode p(+,-,?).     % three-valued moding, ? marks a neutral position
//! :- mode2 p(+,-).      % secondary two-valued moding
//! ```
//!
//! A bare `_` denotes a fresh variable per occurrence; the fresh names are
//! allocated while parsing and avoid every variable written in the source.
//! Atom names starting with `$` are reserved for internal transforms and
//! rejected.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::modes::{Mode, Mode3, Moding, ThreeModing};
use crate::term::{
    infix_op, record_arity, Atom, Clause, Equation, EquationSet, Program, Query, Term, OP_XFY,
    OP_YFX,
};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("duplicate mode directive for predicate {0}")]
    DuplicateMode(String),
    #[error("mode directive for {predicate} has {moded} positions but the predicate is used with arity {used}")]
    ModeArityMismatch {
        predicate: String,
        moded: usize,
        used: usize,
    },
    #[error("{0}")]
    ArityConflict(crate::term::ArityConflict),
    #[error("names starting with $ are reserved for internal use")]
    ReservedName,
}

fn err(line: usize, col: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, col, kind }
}

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> ParseError {
    err(line, col, ParseErrorKind::Syntax(msg.into()))
}

/// A parsed source file: clauses, queries and the declared modings.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SourceFile {
    pub program: Program,
    pub queries: Vec<Query>,
    pub moding: ThreeModing,
    pub moding2: Moding,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Var(String),
    Ident(String),
    Quoted(String),
    Int(String),
    Sym(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Bar,
    Comma,
    EndDot,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Var(s) | Tok::Ident(s) | Tok::Int(s) | Tok::Sym(s) => write!(f, "'{s}'"),
            Tok::Quoted(s) => write!(f, "'{s}'"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::LBracket => f.write_str("'['"),
            Tok::RBracket => f.write_str("']'"),
            Tok::Bar => f.write_str("'|'"),
            Tok::Comma => f.write_str("','"),
            Tok::EndDot => f.write_str("'.'"),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

const SYMBOL_CHARS: &str = "+-*/\\^<>=~:?@#&";

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    let mut line = 1;
    let mut col = 1;
    let bump = |c: char, line: &mut usize, col: &mut usize| {
        if c == '\n' {
            *line += 1;
            *col = 1;
        } else {
            *col += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        let (tline, tcol) = (line, col);
        if c.is_whitespace() {
            bump(c, &mut line, &mut col);
            i += 1;
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
                col += 1;
            }
            continue;
        }
        let tok = match c {
            '(' => {
                i += 1;
                col += 1;
                Tok::LParen
            }
            ')' => {
                i += 1;
                col += 1;
                Tok::RParen
            }
            '[' => {
                i += 1;
                col += 1;
                Tok::LBracket
            }
            ']' => {
                i += 1;
                col += 1;
                Tok::RBracket
            }
            '|' => {
                i += 1;
                col += 1;
                Tok::Bar
            }
            ',' => {
                i += 1;
                col += 1;
                Tok::Comma
            }
            '.' => {
                let next = chars.get(i + 1);
                if next.is_none() || next.is_some_and(|n| n.is_whitespace() || *n == '%') {
                    i += 1;
                    col += 1;
                    Tok::EndDot
                } else {
                    return Err(syntax(tline, tcol, "unexpected '.'"));
                }
            }
            '\'' => {
                i += 1;
                col += 1;
                let mut s = String::new();
                loop {
                    match chars.get(i) {
                        None | Some('\n') => {
                            return Err(syntax(tline, tcol, "unterminated quoted atom"))
                        }
                        Some('\'') => {
                            i += 1;
                            col += 1;
                            break;
                        }
                        Some('\\') => {
                            let esc = chars.get(i + 1);
                            let decoded = match esc {
                                Some('\\') => '\\',
                                Some('\'') => '\'',
                                Some('n') => '\n',
                                Some('t') => '\t',
                                _ => {
                                    return Err(syntax(line, col, "unknown escape in quoted atom"))
                                }
                            };
                            s.push(decoded);
                            i += 2;
                            col += 2;
                        }
                        Some(&ch) => {
                            s.push(ch);
                            i += 1;
                            col += 1;
                        }
                    }
                }
                if s.starts_with('$') {
                    return Err(err(tline, tcol, ParseErrorKind::ReservedName));
                }
                Tok::Quoted(s)
            }
            _ if c.is_ascii_digit() => {
                let mut s = String::new();
                while i < chars.len() && chars[i].is_ascii_digit() {
                    s.push(chars[i]);
                    i += 1;
                    col += 1;
                }
                Tok::Int(s)
            }
            _ if c.is_ascii_lowercase() => {
                let mut s = String::new();
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    s.push(chars[i]);
                    i += 1;
                    col += 1;
                }
                Tok::Ident(s)
            }
            _ if c.is_ascii_uppercase() || c == '_' => {
                let mut s = String::new();
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    s.push(chars[i]);
                    i += 1;
                    col += 1;
                }
                Tok::Var(s)
            }
            _ if SYMBOL_CHARS.contains(c) => {
                let mut s = String::new();
                while i < chars.len() && SYMBOL_CHARS.contains(chars[i]) {
                    s.push(chars[i]);
                    i += 1;
                    col += 1;
                }
                Tok::Sym(s)
            }
            _ => return Err(syntax(tline, tcol, format!("unexpected character '{c}'"))),
        };
        toks.push(Token {
            tok,
            line: tline,
            col: tcol,
        });
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    used_vars: BTreeSet<String>,
    fresh_idx: usize,
    /// Every atom parsed, with its position, for arity validation.
    atom_uses: Vec<(String, usize, usize, usize)>,
    end_line: usize,
    end_col: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Parser, ParseError> {
        let toks = lex(src)?;
        let used_vars = toks
            .iter()
            .filter_map(|t| match &t.tok {
                Tok::Var(v) if v != "_" => Some(v.clone()),
                _ => None,
            })
            .collect();
        let lines = src.lines().count().max(1);
        Ok(Parser {
            toks,
            pos: 0,
            used_vars,
            fresh_idx: 0,
            atom_uses: Vec::new(),
            end_line: lines,
            end_col: src.lines().last().map_or(1, |l| l.chars().count() + 1),
        })
    }

    fn fresh_var(&mut self) -> String {
        loop {
            let name = format!("_{}", self.fresh_idx);
            self.fresh_idx += 1;
            if self.used_vars.insert(name.clone()) {
                return name;
            }
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map(|t| (t.line, t.col))
            .unwrap_or((self.end_line, self.end_col))
    }

    fn advance(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: &Tok, what: &str) -> Result<(), ParseError> {
        let (line, col) = self.here();
        match self.advance() {
            Some(t) if &t == want => Ok(()),
            Some(t) => Err(syntax(line, col, format!("expected {what}, found {t}"))),
            None => Err(syntax(
                line,
                col,
                format!("expected {what}, found end of input"),
            )),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn parse_primary(&mut self) -> Result<Term, ParseError> {
        let (line, col) = self.here();
        match self.advance() {
            Some(Tok::Var(v)) => {
                if v == "_" {
                    Ok(Term::var(self.fresh_var()))
                } else {
                    Ok(Term::var(v))
                }
            }
            Some(Tok::Int(n)) => Ok(Term::constant(n)),
            Some(Tok::Ident(f)) | Some(Tok::Quoted(f)) => {
                if self.peek() == Some(&Tok::LParen) {
                    self.advance();
                    let args = self.parse_args()?;
                    Ok(Term::app(f, args))
                } else {
                    Ok(Term::constant(f))
                }
            }
            Some(Tok::LParen) => {
                let t = self.parse_term(1200)?;
                self.expect(&Tok::RParen, "')'")?;
                Ok(t)
            }
            Some(Tok::LBracket) => self.parse_list(),
            Some(t) => Err(syntax(line, col, format!("expected a term, found {t}"))),
            None => Err(syntax(line, col, "expected a term, found end of input")),
        }
    }

    fn parse_args(&mut self) -> Result<Vec<Term>, ParseError> {
        let mut args = vec![self.parse_term(999)?];
        loop {
            match self.peek() {
                Some(Tok::Comma) => {
                    self.advance();
                    args.push(self.parse_term(999)?);
                }
                Some(Tok::RParen) => {
                    self.advance();
                    return Ok(args);
                }
                _ => {
                    let (line, col) = self.here();
                    return Err(syntax(line, col, "expected ',' or ')' in argument list"));
                }
            }
        }
    }

    fn parse_list(&mut self) -> Result<Term, ParseError> {
        if self.peek() == Some(&Tok::RBracket) {
            self.advance();
            return Ok(Term::constant("[]"));
        }
        let mut items = vec![self.parse_term(999)?];
        let mut tail = None;
        loop {
            match self.peek() {
                Some(Tok::Comma) => {
                    self.advance();
                    items.push(self.parse_term(999)?);
                }
                Some(Tok::Bar) => {
                    self.advance();
                    tail = Some(self.parse_term(999)?);
                    break;
                }
                Some(Tok::RBracket) => break,
                _ => {
                    let (line, col) = self.here();
                    return Err(syntax(line, col, "expected ',', '|' or ']' in list"));
                }
            }
        }
        self.expect(&Tok::RBracket, "']'")?;
        let mut t = tail.unwrap_or_else(|| Term::constant("[]"));
        for item in items.into_iter().rev() {
            t = Term::app(".", vec![item, t]);
        }
        Ok(t)
    }

    fn parse_term(&mut self, max_prec: u16) -> Result<Term, ParseError> {
        let mut lhs = self.parse_primary()?;
        let mut lhs_prec = 0u16;
        while let Some(Tok::Sym(op)) = self.peek() {
            let Some((prec, fixity)) = infix_op(op) else {
                break;
            };
            if prec > max_prec {
                break;
            }
            let left_max = if fixity == OP_YFX { prec } else { prec - 1 };
            if lhs_prec > left_max {
                break;
            }
            let op = op.clone();
            self.advance();
            let right_max = if fixity == OP_XFY { prec } else { prec - 1 };
            let rhs = self.parse_term(right_max)?;
            lhs = Term::app(op, vec![lhs, rhs]);
            lhs_prec = prec;
        }
        Ok(lhs)
    }

    fn parse_atom(&mut self) -> Result<Atom, ParseError> {
        let (line, col) = self.here();
        let t = self.parse_term(1200)?;
        match t {
            Term::App(f, args) => {
                self.atom_uses.push((f.clone(), args.len(), line, col));
                Ok(Atom::new(f, args))
            }
            Term::Var(v) => Err(syntax(
                line,
                col,
                format!("expected an atom, found variable {v}"),
            )),
        }
    }

    fn parse_atoms_until_dot(&mut self) -> Result<Vec<Atom>, ParseError> {
        let mut atoms = vec![self.parse_atom()?];
        loop {
            match self.peek() {
                Some(Tok::Comma) => {
                    self.advance();
                    atoms.push(self.parse_atom()?);
                }
                Some(Tok::EndDot) => {
                    self.advance();
                    return Ok(atoms);
                }
                _ => {
                    let (line, col) = self.here();
                    return Err(syntax(line, col, "expected ',' or '.' after an atom"));
                }
            }
        }
    }

    /// One `name(modes)` entry of a mode directive.
    fn parse_modespec(&mut self) -> Result<(String, Vec<Mode3>, usize, usize), ParseError> {
        let (line, col) = self.here();
        let name = match self.advance() {
            Some(Tok::Ident(s)) | Some(Tok::Quoted(s)) | Some(Tok::Sym(s)) => s,
            Some(t) => {
                return Err(syntax(
                    line,
                    col,
                    format!("expected a predicate name, found {t}"),
                ))
            }
            None => return Err(syntax(line, col, "expected a predicate name")),
        };
        let mut modes = Vec::new();
        if self.peek() == Some(&Tok::LParen) {
            self.advance();
            loop {
                let (mline, mcol) = self.here();
                match self.advance() {
                    Some(Tok::Sym(s)) if s == "+" => modes.push(Mode3::Input),
                    Some(Tok::Sym(s)) if s == "-" => modes.push(Mode3::Output),
                    Some(Tok::Sym(s)) if s == "?" => modes.push(Mode3::Neutral),
                    Some(t) => {
                        return Err(syntax(
                            mline,
                            mcol,
                            format!("expected '+', '-' or '?', found {t}"),
                        ))
                    }
                    None => return Err(syntax(mline, mcol, "expected a mode character")),
                }
                match self.peek() {
                    Some(Tok::Comma) => {
                        self.advance();
                    }
                    Some(Tok::RParen) => {
                        self.advance();
                        break;
                    }
                    _ => {
                        let (eline, ecol) = self.here();
                        return Err(syntax(eline, ecol, "expected ',' or ')' in mode directive"));
                    }
                }
            }
        }
        Ok((name, modes, line, col))
    }
}

/// Parses a whole source file and validates arity consistency, mode
/// directives against uses, and directive uniqueness.
pub fn parse_program(src: &str) -> Result<SourceFile, ParseError> {
    let mut p = Parser::new(src)?;
    let mut file = SourceFile::default();
    // Directive positions, for the arity check against uses.
    let mut decls: Vec<(String, usize, usize, usize)> = Vec::new();

    while !p.at_end() {
        match p.peek() {
            Some(Tok::Sym(s)) if s == ":-" => {
                p.advance();
                let (line, col) = p.here();
                let family = match p.advance() {
                    Some(Tok::Ident(k)) if k == "mode" || k == "mode2" => k,
                    Some(t) => return Err(syntax(line, col, format!("unknown directive {t}"))),
                    None => return Err(syntax(line, col, "expected a directive name")),
                };
                loop {
                    let (name, modes, sline, scol) = p.parse_modespec()?;
                    decls.push((name.clone(), modes.len(), sline, scol));
                    if family == "mode" {
                        if !file.moding.insert(name.clone(), modes) {
                            return Err(err(sline, scol, ParseErrorKind::DuplicateMode(name)));
                        }
                    } else {
                        let narrowed: Result<Vec<Mode>, ParseError> = modes
                            .iter()
                            .map(|m| match m {
                                Mode3::Input => Ok(Mode::Input),
                                Mode3::Output => Ok(Mode::Output),
                                Mode3::Neutral => Err(syntax(
                                    sline,
                                    scol,
                                    "mode2 directives accept only '+' and '-'",
                                )),
                            })
                            .collect();
                        if !file.moding2.insert(name.clone(), narrowed?) {
                            return Err(err(sline, scol, ParseErrorKind::DuplicateMode(name)));
                        }
                    }
                    match p.peek() {
                        Some(Tok::Comma) => {
                            p.advance();
                        }
                        Some(Tok::EndDot) => {
                            p.advance();
                            break;
                        }
                        _ => {
                            let (eline, ecol) = p.here();
                            return Err(syntax(
                                eline,
                                ecol,
                                "expected ',' or '.' after a mode entry",
                            ));
                        }
                    }
                }
            }
            Some(Tok::Sym(s)) if s == "?-" => {
                p.advance();
                let atoms = p.parse_atoms_until_dot()?;
                file.queries.push(Query::new(atoms));
            }
            _ => {
                let head = p.parse_atom()?;
                match p.peek() {
                    Some(Tok::EndDot) => {
                        p.advance();
                        file.program.clauses.push(Clause::fact(head));
                    }
                    Some(Tok::Sym(s)) if s == ":-" => {
                        p.advance();
                        let body = p.parse_atoms_until_dot()?;
                        file.program.clauses.push(Clause::rule(head, body));
                    }
                    _ => {
                        let (line, col) = p.here();
                        return Err(syntax(
                            line,
                            col,
                            "expected '.' or ':-' after a clause head",
                        ));
                    }
                }
            }
        }
    }

    let mut arities: BTreeMap<String, usize> = BTreeMap::new();
    for (name, arity, line, col) in &p.atom_uses {
        let probe = Atom::new(name.clone(), vec![Term::constant("x"); *arity]);
        if let Err(e) = record_arity(&mut arities, &probe) {
            return Err(err(*line, *col, ParseErrorKind::ArityConflict(e)));
        }
    }
    for (name, moded, line, col) in decls {
        if let Some(&used) = arities.get(&name) {
            if used != moded {
                return Err(err(
                    line,
                    col,
                    ParseErrorKind::ModeArityMismatch {
                        predicate: name,
                        moded,
                        used,
                    },
                ));
            }
        }
    }
    Ok(file)
}

/// Parses `t1 = u1, t2 = u2.` groups into one equation set.
pub fn parse_equations(src: &str) -> Result<EquationSet, ParseError> {
    let mut p = Parser::new(src)?;
    let mut set = EquationSet::new();
    while !p.at_end() {
        loop {
            let (line, col) = p.here();
            let t = p.parse_term(1200)?;
            match t {
                Term::App(eq, args) if eq == "=" && args.len() == 2 => {
                    let mut it = args.into_iter();
                    set.insert(Equation::terms(it.next().unwrap(), it.next().unwrap()));
                }
                _ => return Err(syntax(line, col, "expected an equation 'lhs = rhs'")),
            }
            match p.peek() {
                Some(Tok::Comma) => {
                    p.advance();
                }
                Some(Tok::EndDot) => {
                    p.advance();
                    break;
                }
                _ => {
                    let (eline, ecol) = p.here();
                    return Err(syntax(eline, ecol, "expected ',' or '.' after an equation"));
                }
            }
        }
    }
    Ok(set)
}

/// Parses a bare query `a, b` with an optional trailing period.
pub fn parse_query(src: &str) -> Result<Query, ParseError> {
    let mut p = Parser::new(src)?;
    let mut atoms = vec![p.parse_atom()?];
    loop {
        match p.peek() {
            Some(Tok::Comma) => {
                p.advance();
                atoms.push(p.parse_atom()?);
            }
            Some(Tok::EndDot) => {
                p.advance();
                break;
            }
            None => break,
            _ => {
                let (line, col) = p.here();
                return Err(syntax(line, col, "expected ',' or end of query"));
            }
        }
    }
    if !p.at_end() {
        let (line, col) = p.here();
        return Err(syntax(line, col, "unexpected input after the query"));
    }
    Ok(Query::new(atoms))
}

/// Parses a single term, for tests and diagnostics.
pub fn parse_term_text(src: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.parse_term(1200)?;
    if p.peek() == Some(&Tok::EndDot) {
        p.advance();
    }
    if !p.at_end() {
        let (line, col) = p.here();
        return Err(syntax(line, col, "unexpected input after the term"));
    }
    Ok(t)
}

/// Parses a moding override like `p(+,-,?), q(+)`.
pub fn parse_three_moding(src: &str) -> Result<ThreeModing, ParseError> {
    let mut p = Parser::new(src)?;
    let mut m = ThreeModing::new();
    loop {
        let (name, modes, line, col) = p.parse_modespec()?;
        if !m.insert(name.clone(), modes) {
            return Err(err(line, col, ParseErrorKind::DuplicateMode(name)));
        }
        match p.peek() {
            Some(Tok::Comma) => {
                p.advance();
            }
            Some(Tok::EndDot) => {
                p.advance();
                break;
            }
            None => break,
            _ => {
                let (eline, ecol) = p.here();
                return Err(syntax(eline, ecol, "expected ',' between mode entries"));
            }
        }
    }
    Ok(m)
}

/// Parses a two-valued moding override like `p(+,-), q(+)`.
pub fn parse_moding(src: &str) -> Result<Moding, ParseError> {
    let three = parse_three_moding(src)?;
    three
        .narrow()
        .ok_or_else(|| syntax(1, 1, "a two-valued moding accepts only '+' and '-'"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::HasVars;

    #[test]
    fn parses_facts_rules_and_queries() {
        let src = "p(a).\np(f(X)) :- q(X), r(X).\n?- p(Y).\n";
        let f = parse_program(src).unwrap();
        assert_eq!(f.program.clauses.len(), 2);
        assert_eq!(f.queries.len(), 1);
        assert_eq!(f.program.clauses[1].body.len(), 2);
        assert_eq!(f.program.clauses[1].to_string(), "p(f(X)) :- q(X), r(X).");
    }

    #[test]
    fn underscore_is_fresh_per_occurrence() {
        let f = parse_program("p(_, _).").unwrap();
        let args = &f.program.clauses[0].head.args;
        assert!(args[0].is_var() && args[1].is_var());
        assert_ne!(args[0], args[1]);
        // Fresh names avoid variables written in the source.
        let g = parse_program("p(_0, _).").unwrap();
        let args = &g.program.clauses[0].head.args;
        assert_eq!(args[0], Term::var("_0"));
        assert_ne!(args[1], Term::var("_0"));
    }

    #[test]
    fn list_sugar_desugars_to_cells() {
        let t = parse_term_text("[a,b|T]").unwrap();
        assert_eq!(
            t,
            Term::app(
                ".",
                vec![
                    Term::constant("a"),
                    Term::app(".", vec![Term::constant("b"), Term::var("T")]),
                ],
            )
        );
        assert_eq!(parse_term_text("[]").unwrap(), Term::constant("[]"));
        assert_eq!(t.to_string(), "[a,b|T]");
    }

    #[test]
    fn operator_precedence_is_conventional() {
        let t = parse_term_text("s(N)*X^N + D*G").unwrap();
        assert_eq!(t.to_string(), "s(N)*X^N+D*G");
        let Term::App(plus, args) = &t else { panic!() };
        assert_eq!(plus, "+");
        let Term::App(mul, margs) = &args[0] else {
            panic!()
        };
        assert_eq!(mul, "*");
        let Term::App(pow, _) = &margs[1] else {
            panic!()
        };
        assert_eq!(pow, "^");
    }

    #[test]
    fn xfx_operators_do_not_chain() {
        assert!(parse_term_text("a = b = c").is_err());
    }

    #[test]
    fn comparison_atoms_parse_infix() {
        let f = parse_program("p(X) :- X \\== [], q(X).").unwrap();
        let body = &f.program.clauses[0].body;
        assert_eq!(body[0].predicate, "\\==");
        assert_eq!(body[0].args[1], Term::constant("[]"));
        assert_eq!(body[0].to_string(), "X \\== []");
    }

    #[test]
    fn mode_directives_fill_modings() {
        let src = ":- mode p(+,-,?).\n:- mode2 p(+,-,-).\np(a,b,c).";
        let f = parse_program(src).unwrap();
        assert_eq!(
            f.moding.get("p"),
            Some([Mode3::Input, Mode3::Output, Mode3::Neutral].as_slice())
        );
        assert_eq!(
            f.moding2.get("p"),
            Some([Mode::Input, Mode::Output, Mode::Output].as_slice())
        );
    }

    #[test]
    fn symbolic_predicates_can_be_moded() {
        let src = ":- mode \\==(+,+), =<(+,+).\np(X) :- X \\== a, X =< b.";
        let f = parse_program(src).unwrap();
        assert!(f.moding.get("\\==").is_some());
        assert!(f.moding.get("=<").is_some());
    }

    #[test]
    fn duplicate_mode_directive_fails() {
        let e = parse_program(":- mode p(+).\n:- mode p(-).\np(a).").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::DuplicateMode(_)));
        assert_eq!(e.line, 2);
        // Distinct families may mode the same predicate.
        assert!(parse_program(":- mode p(?).\n:- mode2 p(+).\np(a).").is_ok());
    }

    #[test]
    fn mode_arity_mismatch_fails() {
        let e = parse_program(":- mode p(+,-).\np(a).").unwrap_err();
        assert!(matches!(
            e.kind,
            ParseErrorKind::ModeArityMismatch { used: 1, .. }
        ));
    }

    #[test]
    fn conflicting_predicate_arities_fail() {
        let e = parse_program("p(a).\np(a,b).").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::ArityConflict(_)));
        assert_eq!(e.line, 2);
    }

    #[test]
    fn reserved_dollar_names_are_rejected() {
        let e = parse_program("p('$g0').").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::ReservedName));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let e = parse_program("p(a)\nq(b).").unwrap_err();
        assert_eq!((e.line, e.col), (2, 1));
        let e = parse_program("p(a) :- .").unwrap_err();
        assert_eq!(e.line, 1);
    }

    #[test]
    fn equations_parse_into_a_set() {
        let set = parse_equations("X = f(Y), Y = a.\ng(X,X) = g(Y,f(Y)).").unwrap();
        assert_eq!(set.len(), 3);
        assert_eq!(set.to_string(), "X = f(Y), Y = a, g(X,X) = g(Y,f(Y))");
        assert!(parse_equations("f(a).").is_err());
    }

    #[test]
    fn quoted_atoms_round_trip() {
        let t = parse_term_text("'Hello world'(x)").unwrap();
        assert_eq!(t.to_string(), "'Hello world'(x)");
        let back = parse_term_text(&t.to_string()).unwrap();
        assert_eq!(t, back);
        let esc = parse_term_text("'\\\\=='(a,b)").unwrap();
        assert_eq!(
            esc,
            Term::app("\\==", vec![Term::constant("a"), Term::constant("b")])
        );
    }

    #[test]
    fn program_display_round_trips() {
        let src = "\
flatten_dl([X|Xs],Ys,Zs) :- flatten_dl(X,Ys,Ys1), flatten_dl(Xs,Ys1,Zs).
flatten_dl(X,[X|Xs],Xs) :- constant(X), X \\== [].
flatten_dl([],Xs,Xs).
flatten(Xs,Ys) :- flatten_dl(Xs,Ys,[]).
";
        let f = parse_program(src).unwrap();
        let printed = f.program.to_string();
        let again = parse_program(&printed).unwrap();
        assert_eq!(f.program, again.program);
    }

    #[test]
    fn queries_parse_bare() {
        let q = parse_query("p(X), q(X)").unwrap();
        assert_eq!(q.len(), 2);
        assert!(parse_query("p(X), ").is_err());
        let anon = parse_query("pqs(s(0), [Q], _, _)").unwrap();
        let vars = anon.vars();
        assert_eq!(vars.len(), 3);
    }

    #[test]
    fn moding_overrides_parse() {
        let m = parse_three_moding("p(+,?,-), q(+)").unwrap();
        assert_eq!(
            m.get("p"),
            Some([Mode3::Input, Mode3::Neutral, Mode3::Output].as_slice())
        );
        assert!(parse_moding("p(+,?)").is_err());
        assert!(parse_moding("p(+,-)").is_ok());
    }
}
