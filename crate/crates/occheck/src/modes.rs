//! Mode systems and the syntactic conditions built on them.
//!
//! A moding assigns `+` (input) or `-` (output) to every argument position of
//! a predicate; a three-valued moding adds `?` (neutral) positions that count
//! as neither. The checkers here are purely syntactic: built-in predicates
//! need a mode directive like any other predicate and are otherwise ignored.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::term::{is_linear, var_occurrences, Atom, Clause, HasVars, Program, Query, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    Input,
    Output,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode3 {
    Input,
    Output,
    Neutral,
}

impl Mode {
    pub fn widen(self) -> Mode3 {
        match self {
            Mode::Input => Mode3::Input,
            Mode::Output => Mode3::Output,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Input => "+",
            Mode::Output => "-",
        })
    }
}

impl fmt::Display for Mode3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode3::Input => "+",
            Mode3::Output => "-",
            Mode3::Neutral => "?",
        })
    }
}

/// Two-valued moding: every position of every moded predicate is `+` or `-`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Moding {
    map: BTreeMap<String, Vec<Mode>>,
}

/// Three-valued moding, allowing neutral positions.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct ThreeModing {
    map: BTreeMap<String, Vec<Mode3>>,
}

macro_rules! moding_impl {
    ($ty:ident, $mode:ident) => {
        impl $ty {
            pub fn new() -> $ty {
                $ty::default()
            }

            /// Returns false when the predicate was already moded.
            pub fn insert(&mut self, predicate: impl Into<String>, modes: Vec<$mode>) -> bool {
                use std::collections::btree_map::Entry;
                match self.map.entry(predicate.into()) {
                    Entry::Occupied(_) => false,
                    Entry::Vacant(e) => {
                        e.insert(modes);
                        true
                    }
                }
            }

            pub fn get(&self, predicate: &str) -> Option<&[$mode]> {
                self.map.get(predicate).map(Vec::as_slice)
            }

            pub fn is_empty(&self) -> bool {
                self.map.is_empty()
            }

            pub fn iter(&self) -> impl Iterator<Item = (&String, &Vec<$mode>)> {
                self.map.iter()
            }

            /// The declared modes of the atom's predicate, validated
            /// against its arity.
            pub fn modes_for(&self, a: &Atom) -> Result<&[$mode], ModeError> {
                let modes = self
                    .map
                    .get(&a.predicate)
                    .ok_or_else(|| ModeError::Unmoded {
                        predicate: a.predicate.clone(),
                    })?;
                if modes.len() != a.arity() {
                    return Err(ModeError::ArityMismatch {
                        predicate: a.predicate.clone(),
                        moded: modes.len(),
                        used: a.arity(),
                    });
                }
                Ok(modes)
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                for (i, (p, modes)) in self.map.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    f.write_str(p)?;
                    if !modes.is_empty() {
                        f.write_str("(")?;
                        for (j, m) in modes.iter().enumerate() {
                            if j > 0 {
                                f.write_str(",")?;
                            }
                            write!(f, "{m}")?;
                        }
                        f.write_str(")")?;
                    }
                }
                Ok(())
            }
        }
    };
}

moding_impl!(Moding, Mode);
moding_impl!(ThreeModing, Mode3);

impl Moding {
    pub fn widen(&self) -> ThreeModing {
        ThreeModing {
            map: self
                .map
                .iter()
                .map(|(p, ms)| (p.clone(), ms.iter().map(|m| m.widen()).collect()))
                .collect(),
        }
    }
}

impl ThreeModing {
    pub fn has_neutral(&self) -> bool {
        self.map.values().any(|ms| ms.contains(&Mode3::Neutral))
    }

    pub fn has_output(&self) -> bool {
        self.map.values().any(|ms| ms.contains(&Mode3::Output))
    }

    /// The same moding with `+`/`-` only, if there are no neutral positions.
    pub fn narrow(&self) -> Option<Moding> {
        let mut m = Moding::new();
        for (p, ms) in &self.map {
            let narrowed: Option<Vec<Mode>> = ms
                .iter()
                .map(|x| match x {
                    Mode3::Input => Some(Mode::Input),
                    Mode3::Output => Some(Mode::Output),
                    Mode3::Neutral => None,
                })
                .collect();
            m.insert(p.clone(), narrowed?);
        }
        Some(m)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ModeError {
    #[error("no mode directive for predicate {predicate}")]
    Unmoded { predicate: String },
    #[error("predicate {predicate} moded with {moded} positions but used with {used}")]
    ArityMismatch {
        predicate: String,
        moded: usize,
        used: usize,
    },
}

fn select_terms<'a>(a: &'a Atom, modes: &[Mode3], want: Mode3) -> Vec<&'a Term> {
    a.args
        .iter()
        .zip(modes)
        .filter(|(_, m)| **m == want)
        .map(|(t, _)| t)
        .collect()
}

/// Terms in the input positions of `a`.
pub fn input_terms<'a>(a: &'a Atom, m: &ThreeModing) -> Result<Vec<&'a Term>, ModeError> {
    Ok(select_terms(a, m.modes_for(a)?, Mode3::Input))
}

/// Terms in the output positions of `a`.
pub fn output_terms<'a>(a: &'a Atom, m: &ThreeModing) -> Result<Vec<&'a Term>, ModeError> {
    Ok(select_terms(a, m.modes_for(a)?, Mode3::Output))
}

/// Variables occurring in input positions. Neutral positions contribute to
/// neither `varin` nor `varout`.
pub fn varin(a: &Atom, m: &ThreeModing) -> Result<BTreeSet<String>, ModeError> {
    let mut out = BTreeSet::new();
    for t in input_terms(a, m)? {
        t.collect_vars(&mut out);
    }
    Ok(out)
}

/// Variables occurring in output positions.
pub fn varout(a: &Atom, m: &ThreeModing) -> Result<BTreeSet<String>, ModeError> {
    let mut out = BTreeSet::new();
    for t in output_terms(a, m)? {
        t.collect_vars(&mut out);
    }
    Ok(out)
}

/// Linearity of the concatenated input terms of the given atoms.
pub fn is_input_linear<'a>(
    atoms: impl IntoIterator<Item = &'a Atom>,
    m: &ThreeModing,
) -> Result<bool, ModeError> {
    let mut terms = Vec::new();
    for a in atoms {
        terms.extend(input_terms(a, m)?);
    }
    Ok(is_linear(terms))
}

/// Linearity of the concatenated output terms of the given atoms.
pub fn is_output_linear<'a>(
    atoms: impl IntoIterator<Item = &'a Atom>,
    m: &ThreeModing,
) -> Result<bool, ModeError> {
    let mut terms = Vec::new();
    for a in atoms {
        terms.extend(output_terms(a, m)?);
    }
    Ok(is_linear(terms))
}

/// True when no variable occurs both in an input and an output position of `a`.
pub fn is_io_disjoint(a: &Atom, m: &ThreeModing) -> Result<bool, ModeError> {
    Ok(varin(a, m)?.is_disjoint(&varout(a, m)?))
}

/// Atom dependency edges of a query: `(i, j)` when a variable occurs in an
/// output position of atom `i` and an input position of atom `j`. Self-loops
/// are included.
pub fn dependency_graph(q: &Query, m: &ThreeModing) -> Result<Vec<(usize, usize)>, ModeError> {
    let outs: Vec<BTreeSet<String>> = q
        .atoms
        .iter()
        .map(|a| varout(a, m))
        .collect::<Result<_, _>>()?;
    let ins: Vec<BTreeSet<String>> = q
        .atoms
        .iter()
        .map(|a| varin(a, m))
        .collect::<Result<_, _>>()?;
    let mut edges = Vec::new();
    for (i, out) in outs.iter().enumerate() {
        for (j, inp) in ins.iter().enumerate() {
            if !out.is_disjoint(inp) {
                edges.push((i, j));
            }
        }
    }
    Ok(edges)
}

/// Cycle check over the strict reachability relation; a self-loop is a cycle.
pub fn is_acyclic(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut adj = vec![Vec::new(); n];
    for &(i, j) in edges {
        if i == j {
            return false;
        }
        adj[i].push(j);
    }
    // 0 = unvisited, 1 = on stack, 2 = done.
    let mut state = vec![0u8; n];
    fn dfs(v: usize, adj: &[Vec<usize>], state: &mut [u8]) -> bool {
        state[v] = 1;
        for &w in &adj[v] {
            match state[w] {
                0 => {
                    if !dfs(w, adj, state) {
                        return false;
                    }
                }
                1 => return false,
                _ => {}
            }
        }
        state[v] = 2;
        true
    }
    (0..n).all(|v| state[v] != 0 || dfs(v, &adj, &mut state))
}

/// Where a condition failed, for diagnostics.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Witness {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clause: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub query: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variable: Option<String>,
    pub detail: String,
}

impl Witness {
    fn new(detail: impl Into<String>) -> Witness {
        Witness {
            detail: detail.into(),
            ..Witness::default()
        }
    }

    fn var(mut self, v: impl Into<String>) -> Witness {
        self.variable = Some(v.into());
        self
    }

    fn at_clause(mut self, idx: usize) -> Witness {
        self.clause = Some(idx);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Fails,
    NotApplicable,
}

/// Outcome of one named syntactic condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionReport {
    pub condition: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl ConditionReport {
    pub fn from_witness(
        condition: impl Into<String>,
        w: Result<Option<Witness>, ModeError>,
    ) -> ConditionReport {
        match w {
            Ok(None) => ConditionReport {
                condition: condition.into(),
                verdict: Verdict::Holds,
                witness: None,
            },
            Ok(Some(witness)) => ConditionReport {
                condition: condition.into(),
                verdict: Verdict::Fails,
                witness: Some(witness),
            },
            Err(e) => ConditionReport {
                condition: condition.into(),
                verdict: Verdict::NotApplicable,
                witness: Some(Witness::new(e.to_string())),
            },
        }
    }

    pub fn not_applicable(condition: impl Into<String>, why: impl Into<String>) -> ConditionReport {
        ConditionReport {
            condition: condition.into(),
            verdict: Verdict::NotApplicable,
            witness: Some(Witness::new(why)),
        }
    }

    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }
}

fn first_nonlinear_var<'a>(terms: impl IntoIterator<Item = &'a Term>) -> Option<String> {
    var_occurrences(terms)
        .into_iter()
        .find(|(_, n)| *n > 1)
        .map(|(v, _)| v)
}

/// Tidy query: outputs linear over the whole query, dependency graph acyclic.
pub fn tidy_query(q: &Query, m: &Moding) -> Result<Option<Witness>, ModeError> {
    let m3 = m.widen();
    let mut outs = Vec::new();
    for a in &q.atoms {
        outs.extend(output_terms(a, &m3)?);
    }
    if let Some(v) = first_nonlinear_var(outs) {
        return Ok(Some(
            Witness::new("variable occurs twice in output positions of the query").var(v),
        ));
    }
    let edges = dependency_graph(q, &m3)?;
    if !is_acyclic(q.atoms.len(), &edges) {
        return Ok(Some(Witness::new(
            "atom dependency graph of the query has a cycle",
        )));
    }
    Ok(None)
}

/// Tidy clause: tidy body, input-linear head, and no head-input variable in a
/// body output position.
pub fn tidy_clause(c: &Clause, m: &Moding) -> Result<Option<Witness>, ModeError> {
    let m3 = m.widen();
    if let Some(w) = tidy_query(&Query::new(c.body.clone()), m)? {
        return Ok(Some(w));
    }
    if let Some(v) = first_nonlinear_var(input_terms(&c.head, &m3)?) {
        return Ok(Some(
            Witness::new("variable occurs twice in input positions of the head").var(v),
        ));
    }
    let head_in = varin(&c.head, &m3)?;
    for b in &c.body {
        if let Some(v) = varout(b, &m3)?.intersection(&head_in).next() {
            return Ok(Some(
                Witness::new("head input variable occurs in a body output position").var(v.clone()),
            ));
        }
    }
    Ok(None)
}

pub fn tidy_program(p: &Program, m: &Moding) -> Result<Option<Witness>, ModeError> {
    for (i, c) in p.clauses.iter().enumerate() {
        if let Some(w) = tidy_clause(c, m)? {
            return Ok(Some(w.at_clause(i)));
        }
    }
    Ok(None)
}

/// Nicely moded query: outputs linear and every dependency edge goes left to
/// right. Nicely moded queries are tidy.
pub fn nicely_moded_query(q: &Query, m: &Moding) -> Result<Option<Witness>, ModeError> {
    let m3 = m.widen();
    let mut outs = Vec::new();
    for a in &q.atoms {
        outs.extend(output_terms(a, &m3)?);
    }
    if let Some(v) = first_nonlinear_var(outs) {
        return Ok(Some(
            Witness::new("variable occurs twice in output positions of the query").var(v),
        ));
    }
    for (i, j) in dependency_graph(q, &m3)? {
        if i >= j {
            return Ok(Some(Witness::new(format!(
                "dependency edge from atom {} to atom {} does not go left to right",
                i + 1,
                j + 1
            ))));
        }
    }
    Ok(None)
}

pub fn nicely_moded_clause(c: &Clause, m: &Moding) -> Result<Option<Witness>, ModeError> {
    let m3 = m.widen();
    if let Some(w) = nicely_moded_query(&Query::new(c.body.clone()), m)? {
        return Ok(Some(w));
    }
    if let Some(v) = first_nonlinear_var(input_terms(&c.head, &m3)?) {
        return Ok(Some(
            Witness::new("variable occurs twice in input positions of the head").var(v),
        ));
    }
    let head_in = varin(&c.head, &m3)?;
    for b in &c.body {
        if let Some(v) = varout(b, &m3)?.intersection(&head_in).next() {
            return Ok(Some(
                Witness::new("head input variable occurs in a body output position").var(v.clone()),
            ));
        }
    }
    Ok(None)
}

pub fn nicely_moded_program(p: &Program, m: &Moding) -> Result<Option<Witness>, ModeError> {
    for (i, c) in p.clauses.iter().enumerate() {
        if let Some(w) = nicely_moded_clause(c, m)? {
            return Ok(Some(w.at_clause(i)));
        }
    }
    Ok(None)
}

/// Well-3-moded clause. A defining occurrence of a variable is an occurrence
/// in an input position of the head or an output position of a body atom.
/// Every head-output variable needs a defining occurrence somewhere in the
/// clause; every variable in an input position of body atom `j` needs one in
/// the head input or in the output of a body atom strictly before `j`.
pub fn well_3_moded_clause(c: &Clause, m: &ThreeModing) -> Result<Option<Witness>, ModeError> {
    let head_in = varin(&c.head, m)?;
    let body_outs: Vec<BTreeSet<String>> = c
        .body
        .iter()
        .map(|b| varout(b, m))
        .collect::<Result<_, _>>()?;
    let mut anywhere = head_in.clone();
    for o in &body_outs {
        anywhere.extend(o.iter().cloned());
    }
    for v in varout(&c.head, m)? {
        if !anywhere.contains(&v) {
            return Ok(Some(
                Witness::new("head output variable has no defining occurrence").var(v),
            ));
        }
    }
    let mut defined = head_in;
    for (j, b) in c.body.iter().enumerate() {
        for v in varin(b, m)? {
            if !defined.contains(&v) {
                return Ok(Some(
                    Witness::new(format!(
                        "input variable of body atom {} has no earlier defining occurrence",
                        j + 1
                    ))
                    .var(v),
                ));
            }
        }
        defined.extend(body_outs[j].iter().cloned());
    }
    Ok(None)
}

/// A query is checked as the body of a headless clause.
pub fn well_3_moded_query(q: &Query, m: &ThreeModing) -> Result<Option<Witness>, ModeError> {
    let mut defined: BTreeSet<String> = BTreeSet::new();
    for (j, a) in q.atoms.iter().enumerate() {
        for v in varin(a, m)? {
            if !defined.contains(&v) {
                return Ok(Some(
                    Witness::new(format!(
                        "input variable of atom {} has no earlier defining occurrence",
                        j + 1
                    ))
                    .var(v),
                ));
            }
        }
        defined.extend(varout(a, m)?);
    }
    Ok(None)
}

pub fn well_3_moded_program(p: &Program, m: &ThreeModing) -> Result<Option<Witness>, ModeError> {
    for (i, c) in p.clauses.iter().enumerate() {
        if let Some(w) = well_3_moded_clause(c, m)? {
            return Ok(Some(w.at_clause(i)));
        }
    }
    Ok(None)
}

/// Well-moded clause in the classic set-inclusion formulation: body inputs are
/// covered by head inputs plus earlier body outputs, and head outputs by head
/// inputs plus all body outputs. Coincides with `well_3_moded_clause` on
/// modings without neutral positions; the two are kept as separate code paths
/// so they can check each other.
pub fn well_moded_clause(c: &Clause, m: &Moding) -> Result<Option<Witness>, ModeError> {
    let m3 = m.widen();
    let mut available = varin(&c.head, &m3)?;
    for (j, b) in c.body.iter().enumerate() {
        let needed = varin(b, &m3)?;
        if let Some(v) = needed.difference(&available).next() {
            return Ok(Some(
                Witness::new(format!(
                    "input variable of body atom {} not covered by earlier outputs",
                    j + 1
                ))
                .var(v.clone()),
            ));
        }
        available.extend(varout(b, &m3)?);
    }
    let head_out = varout(&c.head, &m3)?;
    if let Some(v) = head_out.difference(&available).next() {
        return Ok(Some(
            Witness::new("head output variable not covered by any output").var(v.clone()),
        ));
    }
    Ok(None)
}

pub fn well_moded_query(q: &Query, m: &Moding) -> Result<Option<Witness>, ModeError> {
    well_3_moded_query(q, &m.widen())
}

pub fn well_moded_program(p: &Program, m: &Moding) -> Result<Option<Witness>, ModeError> {
    for (i, c) in p.clauses.iter().enumerate() {
        if let Some(w) = well_moded_clause(c, m)? {
            return Ok(Some(w.at_clause(i)));
        }
    }
    Ok(None)
}

/// Weakly linear atom: every variable occurring more than once in `a` occurs
/// at least once in an input position of `a`.
pub fn is_weakly_linear(a: &Atom, m: &ThreeModing) -> Result<bool, ModeError> {
    let ins = varin(a, m)?;
    Ok(var_occurrences(a.args.iter())
        .into_iter()
        .all(|(v, n)| n <= 1 || ins.contains(&v)))
}

/// Weak linearity of every clause head of the program.
pub fn weakly_linear_heads(p: &Program, m: &ThreeModing) -> Result<Option<Witness>, ModeError> {
    for (i, c) in p.clauses.iter().enumerate() {
        if !is_weakly_linear(&c.head, m)? {
            return Ok(Some(
                Witness::new("clause head is not weakly linear").at_clause(i),
            ));
        }
    }
    Ok(None)
}

/// Supplies the reserved constants `$g0`, `$g1`, ... used by
/// `ground_plus_positions`. The `$` prefix is rejected by the parser, so the
/// constants cannot clash with source programs.
#[derive(Clone, Debug, Default)]
pub struct GroundSupply(usize);

impl GroundSupply {
    pub fn new() -> GroundSupply {
        GroundSupply(0)
    }

    fn next(&mut self) -> Term {
        let t = Term::constant(format!("$g{}", self.0));
        self.0 += 1;
        t
    }
}

/// Replaces every variable occurring in an input position of the head by a
/// fresh constant, throughout the clause.
pub fn ground_plus_positions(
    c: &Clause,
    m: &ThreeModing,
    supply: &mut GroundSupply,
) -> Result<Clause, ModeError> {
    let grounded = varin(&c.head, m)?;
    let s =
        crate::term::Substitution::from_bindings(grounded.into_iter().map(|v| (v, supply.next())));
    Ok(crate::term::ApplySubst::apply(c, &s))
}

/// Weakly tidy program under a three-valued moding `m` and a two-valued
/// moding `m2`: every clause, after grounding its head input variables, is
/// tidy under `m2`.
pub fn weakly_tidy_program(
    p: &Program,
    m: &ThreeModing,
    m2: &Moding,
) -> Result<Option<Witness>, ModeError> {
    let mut supply = GroundSupply::new();
    for (i, c) in p.clauses.iter().enumerate() {
        let t = ground_plus_positions(c, m, &mut supply)?;
        if let Some(w) = tidy_clause(&t, m2)? {
            return Ok(Some(w.at_clause(i)));
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchCondition {
    Tidy,
    NicelyModed,
    Well3Moded,
    WeaklyTidy,
}

impl SearchCondition {
    pub fn name(self) -> &'static str {
        match self {
            SearchCondition::Tidy => "tidy",
            SearchCondition::NicelyModed => "nicely-moded",
            SearchCondition::Well3Moded => "well-3-moded",
            SearchCondition::WeaklyTidy => "weakly-tidy",
        }
    }
}

/// One point of the mode search space: a three-valued moding, plus a
/// two-valued one for the weakly-tidy condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModingAssignment {
    pub primary: ThreeModing,
    pub secondary: Option<Moding>,
}

impl fmt::Display for ModingAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.primary)?;
        if let Some(m2) = &self.secondary {
            write!(f, " with {m2}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SearchError {
    #[error("search space of {candidates} candidate modings exceeds 2^{limit}; lower the position count or raise the bound")]
    SpaceTooLarge { candidates: u128, limit: u32 },
    #[error(transparent)]
    Arity(#[from] crate::term::ArityConflict),
}

fn assignment_space(arities: &BTreeMap<String, usize>, radix: u128) -> u128 {
    arities.values().fold(1u128, |acc, &n| {
        acc.saturating_mul(radix.saturating_pow(n as u32))
    })
}

fn nth_assignment<T: Copy>(
    arities: &BTreeMap<String, usize>,
    choices: &[T],
    mut idx: u128,
) -> BTreeMap<String, Vec<T>> {
    let radix = choices.len() as u128;
    let mut out = BTreeMap::new();
    for (p, &n) in arities {
        let mut modes = Vec::with_capacity(n);
        for _ in 0..n {
            modes.push(choices[(idx % radix) as usize]);
            idx /= radix;
        }
        out.insert(p.clone(), modes);
    }
    out
}

/// Exhaustive search for modings under which the program, and every query if
/// any are given, satisfies the condition. The candidate count is capped at
/// `2^max_positions`.
pub fn mode_search(
    p: &Program,
    queries: &[Query],
    cond: SearchCondition,
    max_positions: u32,
) -> Result<Vec<ModingAssignment>, SearchError> {
    let mut arities = p.arities()?;
    for q in queries {
        for a in &q.atoms {
            crate::term::record_arity(&mut arities, a)?;
        }
    }
    let radix: u128 = match cond {
        SearchCondition::Tidy | SearchCondition::NicelyModed => 2,
        SearchCondition::Well3Moded => 3,
        SearchCondition::WeaklyTidy => 6,
    };
    let space = assignment_space(&arities, radix);
    let limit = 1u128 << max_positions.min(127);
    if space > limit {
        return Err(SearchError::SpaceTooLarge {
            candidates: space,
            limit: max_positions,
        });
    }

    let mut found = Vec::new();
    for idx in 0..space {
        let candidate = match cond {
            SearchCondition::Tidy | SearchCondition::NicelyModed => {
                let m = Moding {
                    map: nth_assignment(&arities, &[Mode::Input, Mode::Output], idx),
                };
                ModingAssignment {
                    primary: m.widen(),
                    secondary: None,
                }
            }
            SearchCondition::Well3Moded => ModingAssignment {
                primary: ThreeModing {
                    map: nth_assignment(
                        &arities,
                        &[Mode3::Input, Mode3::Output, Mode3::Neutral],
                        idx,
                    ),
                },
                secondary: None,
            },
            SearchCondition::WeaklyTidy => {
                // Six joint choices per position: primary mode times secondary mode.
                let joint = nth_assignment(
                    &arities,
                    &[
                        (Mode3::Input, Mode::Input),
                        (Mode3::Input, Mode::Output),
                        (Mode3::Output, Mode::Input),
                        (Mode3::Output, Mode::Output),
                        (Mode3::Neutral, Mode::Input),
                        (Mode3::Neutral, Mode::Output),
                    ],
                    idx,
                );
                let mut primary = ThreeModing::new();
                let mut secondary = Moding::new();
                for (pred, pairs) in joint {
                    primary.insert(pred.clone(), pairs.iter().map(|x| x.0).collect());
                    secondary.insert(pred, pairs.iter().map(|x| x.1).collect());
                }
                ModingAssignment {
                    primary,
                    secondary: Some(secondary),
                }
            }
        };
        if candidate_satisfies(p, queries, cond, &candidate) {
            found.push(candidate);
        }
    }
    Ok(found)
}

fn candidate_satisfies(
    p: &Program,
    queries: &[Query],
    cond: SearchCondition,
    cand: &ModingAssignment,
) -> bool {
    let ok = |r: Result<Option<Witness>, ModeError>| matches!(r, Ok(None));
    match cond {
        SearchCondition::Tidy => {
            let m = cand
                .primary
                .narrow()
                .expect("tidy search uses two-valued modings");
            ok(tidy_program(p, &m)) && queries.iter().all(|q| ok(tidy_query(q, &m)))
        }
        SearchCondition::NicelyModed => {
            let m = cand
                .primary
                .narrow()
                .expect("nicely-moded search uses two-valued modings");
            ok(nicely_moded_program(p, &m)) && queries.iter().all(|q| ok(nicely_moded_query(q, &m)))
        }
        SearchCondition::Well3Moded => {
            ok(well_3_moded_program(p, &cand.primary))
                && queries
                    .iter()
                    .all(|q| ok(well_3_moded_query(q, &cand.primary)))
        }
        SearchCondition::WeaklyTidy => {
            let m2 = cand
                .secondary
                .as_ref()
                .expect("weakly-tidy search carries a secondary moding");
            ok(weakly_tidy_program(p, &cand.primary, m2))
                && queries.iter().all(|q| ok(tidy_query(q, m2)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Term;

    fn m2(entries: &[(&str, &str)]) -> Moding {
        let mut m = Moding::new();
        for (p, s) in entries {
            m.insert(
                *p,
                s.chars()
                    .map(|c| if c == '+' { Mode::Input } else { Mode::Output })
                    .collect(),
            );
        }
        m
    }

    fn m3(entries: &[(&str, &str)]) -> ThreeModing {
        let mut m = ThreeModing::new();
        for (p, s) in entries {
            m.insert(
                *p,
                s.chars()
                    .map(|c| match c {
                        '+' => Mode3::Input,
                        '-' => Mode3::Output,
                        _ => Mode3::Neutral,
                    })
                    .collect(),
            );
        }
        m
    }

    fn atom(p: &str, args: Vec<Term>) -> Atom {
        Atom::new(p, args)
    }

    #[test]
    fn varin_varout_split_by_mode() {
        let a = atom("p", vec![Term::var("X"), Term::var("Y"), Term::var("Z")]);
        let m = m3(&[("p", "+-?")]);
        assert_eq!(varin(&a, &m).unwrap(), ["X".to_string()].into());
        assert_eq!(varout(&a, &m).unwrap(), ["Y".to_string()].into());
    }

    #[test]
    fn unmoded_predicate_is_an_error() {
        let a = atom("q", vec![Term::var("X")]);
        assert!(matches!(
            varin(&a, &m3(&[("p", "+")])),
            Err(ModeError::Unmoded { .. })
        ));
    }

    #[test]
    fn mode_arity_mismatch_is_an_error() {
        let a = atom("p", vec![Term::var("X"), Term::var("Y")]);
        assert!(matches!(
            varin(&a, &m3(&[("p", "+")])),
            Err(ModeError::ArityMismatch { .. })
        ));
    }

    #[test]
    fn self_loop_is_a_cycle() {
        assert!(!is_acyclic(1, &[(0, 0)]));
        assert!(is_acyclic(2, &[(0, 1)]));
        assert!(!is_acyclic(2, &[(0, 1), (1, 0)]));
    }

    #[test]
    fn single_output_var_query_is_tidy() {
        // p(X, Y) under p(+,-): output Y linear, edge set empty.
        let q = Query::new(vec![atom("p", vec![Term::var("X"), Term::var("Y")])]);
        assert_eq!(tidy_query(&q, &m2(&[("p", "+-")])).unwrap(), None);
    }

    #[test]
    fn repeated_output_var_breaks_tidiness() {
        let q = Query::new(vec![atom("p", vec![Term::var("X"), Term::var("X")])]);
        let w = tidy_query(&q, &m2(&[("p", "--")])).unwrap().unwrap();
        assert_eq!(w.variable.as_deref(), Some("X"));
    }

    #[test]
    fn io_sharing_atom_makes_self_loop() {
        // p(X, X) under p(+,-) has a self dependency, hence a cycle.
        let q = Query::new(vec![atom("p", vec![Term::var("X"), Term::var("X")])]);
        assert!(tidy_query(&q, &m2(&[("p", "+-")])).unwrap().is_some());
    }

    #[test]
    fn fact_with_repeated_var_is_tidy_unless_inputs_repeat() {
        let p = Program::new(vec![Clause::fact(atom(
            "p",
            vec![Term::var("X"), Term::var("X")],
        ))]);
        assert_eq!(tidy_program(&p, &m2(&[("p", "--")])).unwrap(), None);
        assert_eq!(tidy_program(&p, &m2(&[("p", "+-")])).unwrap(), None);
        assert!(tidy_program(&p, &m2(&[("p", "++")])).unwrap().is_some());
    }

    #[test]
    fn nicely_moded_requires_left_to_right_edges() {
        // q1 consumes X which q2 produces: edge (2,1), tidy but not nicely.
        let q = Query::new(vec![
            atom("p", vec![Term::var("X")]),
            atom("q", vec![Term::var("X")]),
        ]);
        let back = m2(&[("p", "+"), ("q", "-")]);
        assert_eq!(tidy_query(&q, &back).unwrap(), None);
        assert!(nicely_moded_query(&q, &back).unwrap().is_some());
        let fwd = m2(&[("p", "-"), ("q", "+")]);
        assert_eq!(nicely_moded_query(&q, &fwd).unwrap(), None);
    }

    #[test]
    fn well_3_moded_needs_defining_occurrences_in_order() {
        // p(X) :- q(X, Y), r(Y). with q(+,-), r(+): X defined by head input.
        let c = Clause::rule(
            atom("p", vec![Term::var("X")]),
            vec![
                atom("q", vec![Term::var("X"), Term::var("Y")]),
                atom("r", vec![Term::var("Y")]),
            ],
        );
        let m = m3(&[("p", "+"), ("q", "+-"), ("r", "+")]);
        assert_eq!(well_3_moded_clause(&c, &m).unwrap(), None);
        // Reversing the body breaks the order.
        let rev = Clause::rule(c.head.clone(), vec![c.body[1].clone(), c.body[0].clone()]);
        assert!(well_3_moded_clause(&rev, &m).unwrap().is_some());
    }

    #[test]
    fn well_moded_routes_agree_without_neutral() {
        let c = Clause::rule(
            atom("p", vec![Term::var("X"), Term::var("Z")]),
            vec![
                atom("q", vec![Term::var("X"), Term::var("Y")]),
                atom("q", vec![Term::var("Y"), Term::var("Z")]),
            ],
        );
        let m = m2(&[("p", "+-"), ("q", "+-")]);
        assert_eq!(well_moded_clause(&c, &m).unwrap(), None);
        assert_eq!(well_3_moded_clause(&c, &m.widen()).unwrap(), None);
        let bad = m2(&[("p", "-+"), ("q", "+-")]);
        assert!(well_moded_clause(&c, &bad).unwrap().is_some());
        assert!(well_3_moded_clause(&c, &bad.widen()).unwrap().is_some());
    }

    #[test]
    fn ground_query_inputs_are_well_3_moded() {
        let q = Query::new(vec![atom("p", vec![Term::constant("a"), Term::var("Y")])]);
        assert_eq!(well_3_moded_query(&q, &m3(&[("p", "+-")])).unwrap(), None);
        let q2 = Query::new(vec![atom("p", vec![Term::var("X"), Term::var("Y")])]);
        assert!(well_3_moded_query(&q2, &m3(&[("p", "+-")]))
            .unwrap()
            .is_some());
    }

    #[test]
    fn weak_linearity_checks_repeated_vars_against_inputs() {
        let a = atom(
            "pq",
            vec![
                Term::var("I"),
                Term::app(".", vec![Term::var("I"), Term::var("A")]),
                Term::app(".", vec![Term::var("I"), Term::var("B")]),
                Term::app(".", vec![Term::var("I"), Term::var("C")]),
            ],
        );
        assert!(is_weakly_linear(&a, &m3(&[("pq", "+???")])).unwrap());
        assert!(!is_weakly_linear(&a, &m3(&[("pq", "????")])).unwrap());
        // A linear atom is weakly linear under any moding.
        let lin = atom("p", vec![Term::var("X"), Term::var("Y")]);
        assert!(is_weakly_linear(&lin, &m3(&[("p", "??")])).unwrap());
    }

    #[test]
    fn grounding_replaces_head_input_vars_throughout() {
        let c = Clause::rule(
            atom("d", vec![Term::var("F"), Term::var("X")]),
            vec![atom("d", vec![Term::var("F"), Term::var("X")])],
        );
        let mut supply = GroundSupply::new();
        let g = ground_plus_positions(&c, &m3(&[("d", "?+")]), &mut supply).unwrap();
        assert_eq!(g.head.args[0], Term::var("F"));
        assert_eq!(g.head.args[1], Term::constant("$g0"));
        assert_eq!(g.body[0].args[1], Term::constant("$g0"));
    }

    #[test]
    fn mode_search_finds_output_only_moding_for_repeated_fact() {
        let p = Program::new(vec![Clause::fact(atom(
            "p",
            vec![Term::var("X"), Term::var("X")],
        ))]);
        let found = mode_search(&p, &[], SearchCondition::Tidy, 16).unwrap();
        // Any moding with at most one input position keeps the head input linear.
        let primaries: std::collections::BTreeSet<_> =
            found.into_iter().map(|f| f.primary).collect();
        let expected: std::collections::BTreeSet<_> =
            [m3(&[("p", "+-")]), m3(&[("p", "-+")]), m3(&[("p", "--")])].into();
        assert_eq!(primaries, expected);
        // With the nonlinear query no moding survives.
        let q = Query::new(vec![atom(
            "p",
            vec![
                Term::app(
                    "f",
                    vec![Term::var("Y"), Term::app("g", vec![Term::var("Y")])],
                ),
                Term::app("f", vec![Term::var("Z"), Term::var("Z")]),
            ],
        )]);
        let found = mode_search(&p, &[q], SearchCondition::Tidy, 16).unwrap();
        assert!(found.is_empty());
    }

    #[test]
    fn mode_search_bound_is_enforced() {
        let p = Program::new(vec![Clause::fact(atom(
            "p",
            (0..20).map(|i| Term::var(format!("X{i}"))).collect(),
        ))]);
        assert!(matches!(
            mode_search(&p, &[], SearchCondition::Tidy, 16),
            Err(SearchError::SpaceTooLarge { .. })
        ));
    }
}
