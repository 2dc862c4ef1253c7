//! First-order terms, atoms, clauses, queries, substitutions and equations.
//!
//! All values are immutable; operations return fresh values. `BTreeSet` /
//! `BTreeMap` backing gives every aggregate a canonical order, which the
//! run-enumeration machinery relies on for state identity.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// A first-order term. Constants are zero-argument applications.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn app(functor: impl Into<String>, args: Vec<Term>) -> Term {
        Term::App(functor.into(), args)
    }

    pub fn constant(name: impl Into<String>) -> Term {
        Term::App(name.into(), Vec::new())
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            Term::App(..) => None,
        }
    }

    /// Number of variable and function-symbol occurrences. Constants count;
    /// `size` is always positive and additive over subterms.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    /// Maximum argument count of any function symbol occurring in the term.
    pub fn max_arity(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => args
                .iter()
                .map(Term::max_arity)
                .max()
                .unwrap_or(0)
                .max(args.len()),
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub fn contains_var(&self, name: &str) -> bool {
        match self {
            Term::Var(v) => v == name,
            Term::App(_, args) => args.iter().any(|a| a.contains_var(name)),
        }
    }
}

/// An atom: a predicate applied to argument terms. Atoms are not terms; they
/// only meet terms at the top level of an atom equation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Atom {
        Atom {
            predicate: predicate.into(),
            args,
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }
}

/// A definite clause `head :- body`. Facts have an empty body.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Clause {
    pub head: Atom,
    pub body: Vec<Atom>,
}

impl Clause {
    pub fn fact(head: Atom) -> Clause {
        Clause {
            head,
            body: Vec::new(),
        }
    }

    pub fn rule(head: Atom, body: Vec<Atom>) -> Clause {
        Clause { head, body }
    }

    /// All atoms of the clause, head first.
    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        std::iter::once(&self.head).chain(self.body.iter())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Program {
    pub clauses: Vec<Clause>,
}

impl Program {
    pub fn new(clauses: Vec<Clause>) -> Program {
        Program { clauses }
    }

    /// Clauses whose head predicate and arity match `a`.
    pub fn matching_clauses<'a>(
        &'a self,
        a: &'a Atom,
    ) -> impl Iterator<Item = (usize, &'a Clause)> {
        self.clauses
            .iter()
            .enumerate()
            .filter(move |(_, c)| c.head.predicate == a.predicate && c.head.arity() == a.arity())
    }

    /// Predicate name to arity, failing on conflicting uses.
    pub fn arities(&self) -> Result<BTreeMap<String, usize>, ArityConflict> {
        let mut map = BTreeMap::new();
        for c in &self.clauses {
            for a in c.atoms() {
                record_arity(&mut map, a)?;
            }
        }
        Ok(map)
    }
}

/// A query: a sequence of atoms, resolved left to right unless a selection
/// rule says otherwise. The empty query is the success state.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Query {
    pub atoms: Vec<Atom>,
}

impl Query {
    pub fn new(atoms: Vec<Atom>) -> Query {
        Query { atoms }
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("predicate {predicate} used with arities {first} and {second}")]
pub struct ArityConflict {
    pub predicate: String,
    pub first: usize,
    pub second: usize,
}

pub(crate) fn record_arity(
    map: &mut BTreeMap<String, usize>,
    a: &Atom,
) -> Result<(), ArityConflict> {
    match map.get(&a.predicate) {
        Some(&n) if n != a.arity() => Err(ArityConflict {
            predicate: a.predicate.clone(),
            first: n,
            second: a.arity(),
        }),
        Some(_) => Ok(()),
        None => {
            map.insert(a.predicate.clone(), a.arity());
            Ok(())
        }
    }
}

/// An equation between two terms, or between two atoms of the same predicate.
/// Atom equations arise when a query atom is unified with a clause head; the
/// unification machinery decomposes them into argument equations on entry.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Equation {
    Terms(Term, Term),
    Atoms(Atom, Atom),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("atom equation between distinct predicates {0} and {1}")]
pub struct PredicateMismatch(pub String, pub String);

impl Equation {
    pub fn terms(lhs: Term, rhs: Term) -> Equation {
        Equation::Terms(lhs, rhs)
    }

    pub fn atoms(lhs: Atom, rhs: Atom) -> Result<Equation, PredicateMismatch> {
        if lhs.predicate != rhs.predicate || lhs.arity() != rhs.arity() {
            return Err(PredicateMismatch(
                format!("{}/{}", lhs.predicate, lhs.arity()),
                format!("{}/{}", rhs.predicate, rhs.arity()),
            ));
        }
        Ok(Equation::Atoms(lhs, rhs))
    }
}

/// A finite set of equations with set semantics: duplicates collapse, and
/// iteration follows the canonical (structural) order of `Equation`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EquationSet {
    eqs: BTreeSet<Equation>,
}

impl EquationSet {
    pub fn new() -> EquationSet {
        EquationSet::default()
    }

    pub fn insert(&mut self, e: Equation) {
        self.eqs.insert(e);
    }

    pub fn remove(&mut self, e: &Equation) -> bool {
        self.eqs.remove(e)
    }

    pub fn contains(&self, e: &Equation) -> bool {
        self.eqs.contains(e)
    }

    pub fn len(&self) -> usize {
        self.eqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eqs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Equation> {
        self.eqs.iter()
    }

    pub fn union(&self, other: &EquationSet) -> EquationSet {
        let mut eqs = self.eqs.clone();
        eqs.extend(other.eqs.iter().cloned());
        EquationSet { eqs }
    }
}

impl FromIterator<Equation> for EquationSet {
    fn from_iter<I: IntoIterator<Item = Equation>>(iter: I) -> EquationSet {
        EquationSet {
            eqs: iter.into_iter().collect(),
        }
    }
}

impl IntoIterator for EquationSet {
    type Item = Equation;
    type IntoIter = std::collections::btree_set::IntoIter<Equation>;

    fn into_iter(self) -> Self::IntoIter {
        self.eqs.into_iter()
    }
}

impl<'a> IntoIterator for &'a EquationSet {
    type Item = &'a Equation;
    type IntoIter = std::collections::btree_set::Iter<'a, Equation>;

    fn into_iter(self) -> Self::IntoIter {
        self.eqs.iter()
    }
}

/// A substitution: a finite map from variables to terms. Identity pairs are
/// dropped at every construction site, so `dom` never reports them.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Substitution {
    map: BTreeMap<String, Term>,
}

impl Substitution {
    pub fn new() -> Substitution {
        Substitution::default()
    }

    pub fn singleton(var: impl Into<String>, term: Term) -> Substitution {
        let mut s = Substitution::new();
        s.bind(var.into(), term);
        s
    }

    pub fn from_bindings(bindings: impl IntoIterator<Item = (String, Term)>) -> Substitution {
        let mut s = Substitution::new();
        for (v, t) in bindings {
            s.bind(v, t);
        }
        s
    }

    /// Adds `var -> term`, silently skipping identity bindings. A rebinding of
    /// an existing variable is a programming error upstream.
    pub fn bind(&mut self, var: String, term: Term) {
        if term.as_var() == Some(var.as_str()) {
            return;
        }
        debug_assert!(!self.map.contains_key(&var), "rebinding {var}");
        self.map.insert(var, term);
    }

    pub fn get(&self, var: &str) -> Option<&Term> {
        self.map.get(var)
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Term)> {
        self.map.iter()
    }

    pub fn dom(&self) -> BTreeSet<String> {
        self.map.keys().cloned().collect()
    }

    /// Variables occurring in the range terms.
    pub fn ran_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for t in self.map.values() {
            t.collect_vars(&mut out);
        }
        out
    }

    /// `self` then `other`: applying the result is applying `self` followed by
    /// `other`.
    pub fn compose(&self, other: &Substitution) -> Substitution {
        let mut s = Substitution::new();
        for (v, t) in &self.map {
            s.bind(v.clone(), t.apply(other));
        }
        for (v, t) in &other.map {
            if !self.map.contains_key(v) {
                s.bind(v.clone(), t.clone());
            }
        }
        s
    }

    /// Restriction of the substitution to the given variables.
    pub fn restrict(&self, vars: &BTreeSet<String>) -> Substitution {
        Substitution {
            map: self
                .map
                .iter()
                .filter(|(v, _)| vars.contains(*v))
                .map(|(v, t)| (v.clone(), t.clone()))
                .collect(),
        }
    }
}

/// Collecting the free variables of a syntactic object.
pub trait HasVars {
    fn collect_vars(&self, out: &mut BTreeSet<String>);

    fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }
}

impl HasVars for Term {
    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::App(_, args) => {
                for a in args {
                    a.collect_vars(out);
                }
            }
        }
    }
}

impl HasVars for Atom {
    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        for a in &self.args {
            a.collect_vars(out);
        }
    }
}

impl HasVars for Clause {
    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        for a in self.atoms() {
            a.collect_vars(out);
        }
    }
}

impl HasVars for Query {
    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        for a in &self.atoms {
            a.collect_vars(out);
        }
    }
}

impl HasVars for Equation {
    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Equation::Terms(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
            Equation::Atoms(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }
}

impl HasVars for EquationSet {
    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        for e in &self.eqs {
            e.collect_vars(out);
        }
    }
}

impl HasVars for Substitution {
    /// Variables of a substitution: domain plus range variables.
    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        for (v, t) in &self.map {
            out.insert(v.clone());
            t.collect_vars(out);
        }
    }
}

impl<T: HasVars> HasVars for [T] {
    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        for x in self {
            x.collect_vars(out);
        }
    }
}

impl<T: HasVars> HasVars for Vec<T> {
    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        self.as_slice().collect_vars(out)
    }
}

/// Applying a substitution, simultaneously on all variables.
pub trait ApplySubst {
    fn apply(&self, s: &Substitution) -> Self;
}

impl ApplySubst for Term {
    fn apply(&self, s: &Substitution) -> Term {
        match self {
            Term::Var(v) => s.get(v).cloned().unwrap_or_else(|| self.clone()),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.apply(s)).collect()),
        }
    }
}

impl ApplySubst for Atom {
    fn apply(&self, s: &Substitution) -> Atom {
        Atom {
            predicate: self.predicate.clone(),
            args: self.args.iter().map(|a| a.apply(s)).collect(),
        }
    }
}

impl ApplySubst for Clause {
    fn apply(&self, s: &Substitution) -> Clause {
        Clause {
            head: self.head.apply(s),
            body: self.body.iter().map(|a| a.apply(s)).collect(),
        }
    }
}

impl ApplySubst for Query {
    fn apply(&self, s: &Substitution) -> Query {
        Query {
            atoms: self.atoms.iter().map(|a| a.apply(s)).collect(),
        }
    }
}

impl ApplySubst for Equation {
    fn apply(&self, s: &Substitution) -> Equation {
        match self {
            Equation::Terms(l, r) => Equation::Terms(l.apply(s), r.apply(s)),
            Equation::Atoms(l, r) => Equation::Atoms(l.apply(s), r.apply(s)),
        }
    }
}

impl ApplySubst for EquationSet {
    fn apply(&self, s: &Substitution) -> EquationSet {
        self.eqs.iter().map(|e| e.apply(s)).collect()
    }
}

/// True when no variable occurs twice across the given terms.
pub fn is_linear<'a>(terms: impl IntoIterator<Item = &'a Term>) -> bool {
    let mut seen = BTreeSet::new();
    fn walk(t: &Term, seen: &mut BTreeSet<String>) -> bool {
        match t {
            Term::Var(v) => seen.insert(v.clone()),
            Term::App(_, args) => args.iter().all(|a| walk(a, seen)),
        }
    }
    terms.into_iter().all(|t| walk(t, &mut seen))
}

/// Occurrence counts of every variable across the given terms.
pub fn var_occurrences<'a>(terms: impl IntoIterator<Item = &'a Term>) -> BTreeMap<String, usize> {
    let mut counts = BTreeMap::new();
    fn walk(t: &Term, counts: &mut BTreeMap<String, usize>) {
        match t {
            Term::Var(v) => *counts.entry(v.clone()).or_insert(0) += 1,
            Term::App(_, args) => {
                for a in args {
                    walk(a, counts);
                }
            }
        }
    }
    for t in terms {
        walk(t, &mut counts);
    }
    counts
}

/// Monotone counter feeding `rename_apart`. One counter per derivation keeps
/// all renamed clauses mutually fresh.
#[derive(Clone, Debug, Default)]
pub struct RenameCounter(u64);

impl RenameCounter {
    pub fn new() -> RenameCounter {
        RenameCounter(0)
    }

    fn next(&mut self) -> u64 {
        self.0 += 1;
        self.0
    }
}

/// A variant of `c` whose variables avoid `avoid`. Returns the clause
/// unchanged when it is already disjoint; otherwise every variable gets the
/// same numeric suffix, retried until disjoint from `avoid`.
pub fn rename_apart(c: &Clause, avoid: &BTreeSet<String>, counter: &mut RenameCounter) -> Clause {
    let cvars = c.vars();
    if cvars.is_disjoint(avoid) {
        return c.clone();
    }
    loop {
        let n = counter.next();
        let renaming = Substitution::from_bindings(
            cvars
                .iter()
                .map(|v| (v.clone(), Term::var(format!("{v}{n}")))),
        );
        let renamed: BTreeSet<String> = cvars.iter().map(|v| format!("{v}{n}")).collect();
        if renamed.is_disjoint(avoid) {
            return c.apply(&renaming);
        }
    }
}

fn variant_walk<'a>(
    a: &'a Term,
    b: &'a Term,
    fwd: &mut BTreeMap<&'a str, &'a str>,
    bwd: &mut BTreeMap<&'a str, &'a str>,
) -> bool {
    match (a, b) {
        (Term::Var(x), Term::Var(y)) => {
            let f = *fwd.entry(x).or_insert(y);
            let g = *bwd.entry(y).or_insert(x);
            f == y.as_str() && g == x.as_str()
        }
        (Term::App(f, xs), Term::App(g, ys)) => {
            f == g
                && xs.len() == ys.len()
                && xs.iter().zip(ys).all(|(x, y)| variant_walk(x, y, fwd, bwd))
        }
        _ => false,
    }
}

/// True when the term sequences are equal up to a bijective variable renaming.
pub fn variant_terms(a: &[Term], b: &[Term]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut fwd = BTreeMap::new();
    let mut bwd = BTreeMap::new();
    a.iter()
        .zip(b)
        .all(|(x, y)| variant_walk(x, y, &mut fwd, &mut bwd))
}

pub fn variant_queries(a: &Query, b: &Query) -> bool {
    a.atoms.len() == b.atoms.len()
        && a.atoms
            .iter()
            .zip(&b.atoms)
            .all(|(x, y)| x.predicate == y.predicate)
        && variant_terms(
            &a.atoms
                .iter()
                .flat_map(|x| x.args.clone())
                .collect::<Vec<_>>(),
            &b.atoms
                .iter()
                .flat_map(|y| y.args.clone())
                .collect::<Vec<_>>(),
        )
}

/// Renames the variables of a query to `A`, `B`, ... in order of first
/// occurrence. Two variants canonicalize to the same query.
pub fn canonicalize_query(q: &Query) -> Query {
    let mut mapping: BTreeMap<String, String> = BTreeMap::new();
    let mut order: Vec<String> = Vec::new();
    fn visit(t: &Term, mapping: &mut BTreeMap<String, String>, order: &mut Vec<String>) {
        match t {
            Term::Var(v) => {
                if !mapping.contains_key(v) {
                    let n = order.len();
                    let name = if n < 26 {
                        ((b'A' + n as u8) as char).to_string()
                    } else {
                        format!("V{n}")
                    };
                    mapping.insert(v.clone(), name);
                    order.push(v.clone());
                }
            }
            Term::App(_, args) => {
                for a in args {
                    visit(a, mapping, order);
                }
            }
        }
    }
    for a in &q.atoms {
        for t in &a.args {
            visit(t, &mut mapping, &mut order);
        }
    }
    let s = Substitution::from_bindings(
        mapping
            .iter()
            .map(|(v, n)| (v.clone(), Term::var(n.clone()))),
    );
    q.apply(&s)
}

// Printing. Infix sugar is restored for the arithmetic operators and the
// comparison predicates; list cells print in bracket notation.

pub(crate) const OP_XFX: u8 = 0;
pub(crate) const OP_XFY: u8 = 1;
pub(crate) const OP_YFX: u8 = 2;

/// Binary operators as (precedence, fixity). Lower precedence binds tighter.
pub(crate) fn infix_op(name: &str) -> Option<(u16, u8)> {
    match name {
        "=" | "==" | "\\==" | "<" | ">" | "=<" | ">=" => Some((700, OP_XFX)),
        "+" | "-" => Some((500, OP_YFX)),
        "*" | "/" => Some((400, OP_YFX)),
        "^" => Some((200, OP_XFY)),
        _ => None,
    }
}

fn is_lower_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn is_integer(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_digit())
}

pub(crate) fn is_symbolic(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| "+-*/\\^<>=~:.?@#&".contains(c))
}

fn write_functor(f: &mut fmt::Formatter<'_>, name: &str) -> fmt::Result {
    if is_lower_ident(name) || is_integer(name) || name == "[]" || is_symbolic(name) {
        f.write_str(name)
    } else {
        write!(f, "'{}'", name.replace('\\', "\\\\").replace('\'', "\\'"))
    }
}

fn write_term(f: &mut fmt::Formatter<'_>, t: &Term, max_prec: u16) -> fmt::Result {
    match t {
        Term::Var(v) => f.write_str(v),
        Term::App(functor, args) if functor == "." && args.len() == 2 => {
            f.write_str("[")?;
            write_term(f, &args[0], 999)?;
            let mut tail = &args[1];
            loop {
                match tail {
                    Term::App(c, rest) if c == "." && rest.len() == 2 => {
                        f.write_str(",")?;
                        write_term(f, &rest[0], 999)?;
                        tail = &rest[1];
                    }
                    Term::App(nil, rest) if nil == "[]" && rest.is_empty() => break,
                    other => {
                        f.write_str("|")?;
                        write_term(f, other, 999)?;
                        break;
                    }
                }
            }
            f.write_str("]")
        }
        Term::App(functor, args) => {
            if args.len() == 2 {
                if let Some((prec, fixity)) = infix_op(functor) {
                    let (lp, rp) = match fixity {
                        OP_YFX => (prec, prec - 1),
                        OP_XFY => (prec - 1, prec),
                        _ => (prec - 1, prec - 1),
                    };
                    if prec > max_prec {
                        f.write_str("(")?;
                    }
                    write_term(f, &args[0], lp)?;
                    write!(f, "{functor}")?;
                    write_term(f, &args[1], rp)?;
                    if prec > max_prec {
                        f.write_str(")")?;
                    }
                    return Ok(());
                }
            }
            if args.is_empty() && is_symbolic(functor) && functor != "[]" {
                // A bare symbolic constant would lex as an operator.
                return write!(
                    f,
                    "'{}'",
                    functor.replace('\\', "\\\\").replace('\'', "\\'")
                );
            }
            write_functor(f, functor)?;
            if !args.is_empty() {
                f.write_str("(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write_term(f, a, 999)?;
                }
                f.write_str(")")?;
            }
            Ok(())
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(f, self, 1200)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.args.len() == 2 && infix_op(&self.predicate).is_some() {
            write_term(f, &self.args[0], 699)?;
            write!(f, " {} ", self.predicate)?;
            return write_term(f, &self.args[1], 699);
        }
        write_functor(f, &self.predicate)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write_term(f, a, 999)?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        if !self.body.is_empty() {
            f.write_str(" :- ")?;
            for (i, a) in self.body.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{a}")?;
            }
        }
        f.write_str(".")
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Equation::Terms(l, r) => {
                write_term(f, l, 699)?;
                f.write_str(" = ")?;
                write_term(f, r, 699)
            }
            Equation::Atoms(l, r) => write!(f, "{l} = {r}"),
        }
    }
}

impl fmt::Display for EquationSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.eqs.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.map.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}/{t}")?;
        }
        f.write_str("}")
    }
}
