//! Bounded construction of SLD-trees.
//!
//! Derivations use idealized unification (the full occur-check system), so
//! the tree explored here is the sound one: an occur-check failure is a
//! failure leaf. `verify_tree` then asks, for every unification any engine
//! could attempt at any node, whether skipping the occur-check would have
//! been safe: it decides NSTO and WNSTO of the atom-head equation for every
//! matching clause, including those whose unification fails.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::modes::{input_terms, ThreeModing};
use crate::term::{
    canonicalize_query, ApplySubst, Atom, Clause, Equation, EquationSet, HasVars, Program, Query,
    RenameCounter, Substitution, Term,
};
use crate::unify::{
    decide_nsto_wnsto, mgu_of_solved, run, Algorithm, DecideLimits, RunOutcome, RunTrace, Strategy,
};

/// Which atom of a query a derivation step rewrites.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SelectionRule {
    Leftmost,
    Rightmost,
    /// Per-node uniform choice, deterministic in the seed.
    Random(u64),
    /// Leftmost atom whose input positions are all ground; a query with
    /// atoms but no such atom flounders. Predicates absent from the moding
    /// are treated as having no input positions.
    ModingCompatible(ThreeModing),
}

fn splitmix(h: u64, v: u64) -> u64 {
    let mut z = h.wrapping_add(0x9E3779B97F4A7C15).wrapping_add(v);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4B9FE);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

fn inputs_ground(atom: &Atom, moding: &ThreeModing) -> bool {
    match input_terms(atom, moding) {
        Ok(inputs) => inputs.iter().all(|t| t.is_ground()),
        Err(_) => true,
    }
}

/// The selected atom index, or `None` when every atom of a nonempty query
/// violates the rule's groundness requirement.
pub fn select(query: &Query, rule: &SelectionRule, token: u64) -> Option<usize> {
    assert!(!query.is_empty(), "selection from a nonempty query only");
    match rule {
        SelectionRule::Leftmost => Some(0),
        SelectionRule::Rightmost => Some(query.len() - 1),
        SelectionRule::Random(_) => {
            let mut rng = ChaCha8Rng::seed_from_u64(token);
            Some(rng.gen_range(0..query.len()))
        }
        SelectionRule::ModingCompatible(moding) => {
            query.atoms.iter().position(|a| inputs_ground(a, moding))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Resolution {
    pub resolvent: Query,
    pub mgu: Substitution,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ResolveOutcome {
    Resolved(Resolution),
    Clash,
    OccurFailure,
}

/// One derivation step: rename the clause apart from `avoid` and the query,
/// unify the selected atom with its head, and instantiate the query with
/// the clause body spliced in place of the atom.
///
/// Returns the renamed clause alongside the outcome so callers can inspect
/// the exact equation the step attempted.
pub fn resolve(
    query: &Query,
    selected: usize,
    clause: &Clause,
    avoid: &BTreeSet<String>,
    counter: &mut RenameCounter,
) -> (Clause, ResolveOutcome) {
    let atom = &query.atoms[selected];
    assert_eq!(atom.predicate, clause.head.predicate);
    assert_eq!(atom.arity(), clause.head.arity());
    let mut avoid = avoid.clone();
    query.collect_vars(&mut avoid);
    let renamed = crate::term::rename_apart(clause, &avoid, counter);

    let set: EquationSet = [Equation::atoms(atom.clone(), renamed.head.clone()).unwrap()]
        .into_iter()
        .collect();
    let outcome = match run(&set, Algorithm::Mma, Strategy::Canonical).outcome {
        RunOutcome::Clash => ResolveOutcome::Clash,
        RunOutcome::OccurCheckFailure => ResolveOutcome::OccurFailure,
        RunOutcome::Final(solved) => {
            let mgu = mgu_of_solved(&solved).expect("action-free states are solved");
            debug_assert!(
                {
                    let mut relevant = atom.vars();
                    renamed.head.collect_vars(&mut relevant);
                    mgu.vars().is_subset(&relevant)
                },
                "unifier binds variables outside the equation"
            );
            let mut atoms = Vec::with_capacity(query.len() - 1 + renamed.body.len());
            atoms.extend_from_slice(&query.atoms[..selected]);
            atoms.extend(renamed.body.iter().cloned());
            atoms.extend_from_slice(&query.atoms[selected + 1..]);
            let resolvent = Query::new(atoms).apply(&mgu);
            ResolveOutcome::Resolved(Resolution { resolvent, mgu })
        }
    };
    (renamed, outcome)
}

fn int_const(t: &Term) -> Option<i64> {
    match t {
        Term::App(name, args) if args.is_empty() => name.parse().ok(),
        _ => None,
    }
}

/// Truth value of a built-in atom, or `None` when the predicate is not
/// built in. Comparisons hold only between integer constants; anything
/// else fails.
fn builtin_eval(atom: &Atom) -> Option<bool> {
    let args = &atom.args;
    match (atom.predicate.as_str(), atom.arity()) {
        ("constant", 1) => Some(matches!(&args[0], Term::App(_, a) if a.is_empty())),
        ("==", 2) => Some(args[0] == args[1]),
        ("\\==", 2) => Some(args[0] != args[1]),
        ("=<" | "<" | ">" | ">=", 2) => {
            let (Some(a), Some(b)) = (int_const(&args[0]), int_const(&args[1])) else {
                return Some(false);
            };
            Some(match atom.predicate.as_str() {
                "=<" => a <= b,
                "<" => a < b,
                ">" => a > b,
                _ => a >= b,
            })
        }
        _ => None,
    }
}

/// An atom is handled as a built-in only when the program defines no
/// clauses for its predicate.
pub fn is_builtin(program: &Program, atom: &Atom) -> bool {
    builtin_eval(atom).is_some() && program.matching_clauses(atom).next().is_none()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    /// Empty query.
    Success,
    /// Nonempty query with no selectable atom.
    Floundered,
    /// Depth limit reached before selection.
    Clipped,
    /// Selected atom admits no derivation step.
    Failure,
    Inner,
}

#[derive(Debug)]
pub struct NodeInfo<'a> {
    pub id: usize,
    pub depth: usize,
    pub query: &'a Query,
    /// Composition of the step unifiers from the root to this node.
    pub answer: &'a Substitution,
    pub kind: NodeKind,
    pub selected: Option<usize>,
}

/// Callbacks invoked during exploration: once per node, and once per
/// matching clause of the selected atom (successful or not). Built-in steps
/// produce no alternatives.
pub trait SldVisitor {
    fn visit(&mut self, _node: &NodeInfo) {}
    fn visit_alternative(
        &mut self,
        _node: &NodeInfo,
        _clause_index: usize,
        _renamed: &Clause,
        _outcome: &ResolveOutcome,
    ) {
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ExploreLimits {
    pub max_depth: usize,
    pub max_nodes: usize,
}

impl Default for ExploreLimits {
    fn default() -> ExploreLimits {
        ExploreLimits {
            max_depth: 64,
            max_nodes: 10_000,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Exploration {
    pub nodes_visited: usize,
    pub success_leaves: usize,
    pub floundered_leaves: usize,
    /// Depth or node budget cut some branch short.
    pub truncated: bool,
}

struct Frame {
    query: Query,
    answer: Substitution,
    depth: usize,
    token: u64,
}

/// Depth-first left-to-right traversal of the SLD-tree for `query`.
pub fn explore_sld<V: SldVisitor>(
    program: &Program,
    query: &Query,
    rule: &SelectionRule,
    limits: &ExploreLimits,
    visitor: &mut V,
) -> Exploration {
    let mut stats = Exploration::default();
    let mut counter = RenameCounter::new();
    let root_vars = query.vars();
    let root_token = match rule {
        SelectionRule::Random(seed) => *seed,
        _ => 0,
    };
    let mut stack = vec![Frame {
        query: query.clone(),
        answer: Substitution::new(),
        depth: 0,
        token: root_token,
    }];

    while let Some(frame) = stack.pop() {
        if stats.nodes_visited >= limits.max_nodes {
            stats.truncated = true;
            break;
        }
        let id = stats.nodes_visited;
        stats.nodes_visited += 1;

        if frame.query.is_empty() {
            stats.success_leaves += 1;
            visitor.visit(&NodeInfo {
                id,
                depth: frame.depth,
                query: &frame.query,
                answer: &frame.answer,
                kind: NodeKind::Success,
                selected: None,
            });
            continue;
        }
        if frame.depth >= limits.max_depth {
            stats.truncated = true;
            visitor.visit(&NodeInfo {
                id,
                depth: frame.depth,
                query: &frame.query,
                answer: &frame.answer,
                kind: NodeKind::Clipped,
                selected: None,
            });
            continue;
        }
        let Some(selected) = select(&frame.query, rule, splitmix(frame.token, 0)) else {
            stats.floundered_leaves += 1;
            visitor.visit(&NodeInfo {
                id,
                depth: frame.depth,
                query: &frame.query,
                answer: &frame.answer,
                kind: NodeKind::Floundered,
                selected: None,
            });
            continue;
        };

        let atom = &frame.query.atoms[selected];
        let mut children: Vec<Frame> = Vec::new();
        let mut alternatives: Vec<(usize, Clause, ResolveOutcome)> = Vec::new();
        if is_builtin(program, atom) {
            if builtin_eval(atom) == Some(true) {
                let mut atoms = frame.query.atoms.clone();
                atoms.remove(selected);
                children.push(Frame {
                    query: Query::new(atoms),
                    answer: frame.answer.clone(),
                    depth: frame.depth + 1,
                    token: splitmix(frame.token, 1),
                });
            }
        } else {
            let mut avoid = root_vars.clone();
            frame.answer.collect_vars(&mut avoid);
            for (clause_index, clause) in program.matching_clauses(atom) {
                let (renamed, outcome) =
                    resolve(&frame.query, selected, clause, &avoid, &mut counter);
                if let ResolveOutcome::Resolved(r) = &outcome {
                    children.push(Frame {
                        query: r.resolvent.clone(),
                        answer: frame.answer.compose(&r.mgu),
                        depth: frame.depth + 1,
                        token: splitmix(frame.token, children.len() as u64 + 1),
                    });
                }
                alternatives.push((clause_index, renamed, outcome));
            }
        }

        let kind = if children.is_empty() {
            NodeKind::Failure
        } else {
            NodeKind::Inner
        };
        let info = NodeInfo {
            id,
            depth: frame.depth,
            query: &frame.query,
            answer: &frame.answer,
            kind,
            selected: Some(selected),
        };
        visitor.visit(&info);
        for (clause_index, renamed, outcome) in &alternatives {
            visitor.visit_alternative(&info, *clause_index, renamed, outcome);
        }
        stack.extend(children.into_iter().rev());
    }
    stats
}

/// A unification the tree could attempt whose equation is subject to the
/// occur-check.
#[derive(Clone, Debug)]
pub struct OccurCheckHit {
    pub query: Query,
    pub selected: usize,
    pub clause_index: usize,
    pub witness: RunTrace,
}

#[derive(Clone, Debug)]
pub struct TreeVerdict {
    /// Every attempted equation is NSTO, up to the exploration bound.
    pub ocf_up_to_bound: bool,
    /// Every attempted equation is WNSTO, up to the bound.
    pub weakly_ocf_up_to_bound: bool,
    /// First equation that is not NSTO.
    pub counterexample: Option<OccurCheckHit>,
    /// First equation that is not even WNSTO.
    pub weak_counterexample: Option<OccurCheckHit>,
    /// Attempted equations whose verdict exhausted the state budget.
    pub undecided: usize,
    pub floundered_leaves: usize,
    pub success_leaves: usize,
    pub nodes_visited: usize,
    pub truncated: bool,
}

struct Verifier {
    decide_limits: DecideLimits,
    counterexample: Option<OccurCheckHit>,
    weak_counterexample: Option<OccurCheckHit>,
    undecided: usize,
}

impl SldVisitor for Verifier {
    fn visit_alternative(
        &mut self,
        node: &NodeInfo,
        clause_index: usize,
        renamed: &Clause,
        _outcome: &ResolveOutcome,
    ) {
        let selected = node.selected.unwrap();
        let atom = &node.query.atoms[selected];
        let set: EquationSet = [Equation::atoms(atom.clone(), renamed.head.clone()).unwrap()]
            .into_iter()
            .collect();
        match decide_nsto_wnsto(&set, &self.decide_limits) {
            Ok(report) => {
                if !report.nsto && self.counterexample.is_none() {
                    self.counterexample = Some(OccurCheckHit {
                        query: node.query.clone(),
                        selected,
                        clause_index,
                        witness: report.occur_witness.clone().unwrap(),
                    });
                }
                if !report.wnsto && self.weak_counterexample.is_none() {
                    self.weak_counterexample = Some(OccurCheckHit {
                        query: node.query.clone(),
                        selected,
                        clause_index,
                        witness: report.occur_witness.unwrap(),
                    });
                }
            }
            Err(_) => self.undecided += 1,
        }
    }
}

/// Checks every unification the tree for `query` could attempt, on every
/// branch reachable within the limits.
pub fn verify_tree(
    program: &Program,
    query: &Query,
    rule: &SelectionRule,
    limits: &ExploreLimits,
    decide_limits: &DecideLimits,
) -> TreeVerdict {
    let mut v = Verifier {
        decide_limits: *decide_limits,
        counterexample: None,
        weak_counterexample: None,
        undecided: 0,
    };
    let stats = explore_sld(program, query, rule, limits, &mut v);
    TreeVerdict {
        ocf_up_to_bound: v.counterexample.is_none(),
        weakly_ocf_up_to_bound: v.weak_counterexample.is_none(),
        counterexample: v.counterexample,
        weak_counterexample: v.weak_counterexample,
        undecided: v.undecided,
        floundered_leaves: stats.floundered_leaves,
        success_leaves: stats.success_leaves,
        nodes_visited: stats.nodes_visited,
        truncated: stats.truncated,
    }
}

#[derive(Clone, Debug)]
pub struct InvariantReport {
    pub holds: bool,
    pub first_violation: Option<(usize, Query)>,
    pub nodes_visited: usize,
    pub truncated: bool,
}

/// Evaluates `pred` on the instantiated query at every visited node.
pub fn probe_invariant<F: FnMut(&NodeInfo) -> bool>(
    program: &Program,
    query: &Query,
    rule: &SelectionRule,
    limits: &ExploreLimits,
    pred: F,
) -> InvariantReport {
    struct Probe<F> {
        pred: F,
        first_violation: Option<(usize, Query)>,
    }
    impl<F: FnMut(&NodeInfo) -> bool> SldVisitor for Probe<F> {
        fn visit(&mut self, node: &NodeInfo) {
            if self.first_violation.is_none() && !(self.pred)(node) {
                self.first_violation = Some((node.depth, node.query.clone()));
            }
        }
    }
    let mut p = Probe {
        pred,
        first_violation: None,
    };
    let stats = explore_sld(program, query, rule, limits, &mut p);
    InvariantReport {
        holds: p.first_violation.is_none(),
        first_violation: p.first_violation,
        nodes_visited: stats.nodes_visited,
        truncated: stats.truncated,
    }
}

#[derive(Clone, Debug)]
pub struct AnswerSet {
    /// Computed answers as instantiated copies of the query, with variables
    /// renamed to a canonical sequence so variants coincide.
    pub answers: BTreeSet<Query>,
    pub floundered_leaves: usize,
    pub truncated: bool,
}

/// Collects the computed answers of all success branches within the limits.
pub fn answers(
    program: &Program,
    query: &Query,
    rule: &SelectionRule,
    limits: &ExploreLimits,
) -> AnswerSet {
    struct Collect<'a> {
        root: &'a Query,
        answers: BTreeSet<Query>,
    }
    impl SldVisitor for Collect<'_> {
        fn visit(&mut self, node: &NodeInfo) {
            if node.kind == NodeKind::Success {
                self.answers
                    .insert(canonicalize_query(&self.root.apply(node.answer)));
            }
        }
    }
    let mut c = Collect {
        root: query,
        answers: BTreeSet::new(),
    };
    let stats = explore_sld(program, query, rule, limits, &mut c);
    AnswerSet {
        answers: c.answers,
        floundered_leaves: stats.floundered_leaves,
        truncated: stats.truncated,
    }
}
