//! Unification as nondeterministic rewriting of equation sets.
//!
//! Two rule systems act on a set of term equations. `Mma` is the classic
//! Martelli-Montanari system: decompose, clash, delete, orient, eliminate,
//! occur-check. `MmaMinus` drops the occur-check and replaces full
//! elimination by variable-variable elimination plus a merge rule for two
//! bindings of the same variable; it is the idealization of unification as
//! implemented by Prolog engines.
//!
//! A state is judged *not subject to occur-check* (NSTO) when no run of `Mma`
//! can perform the occur-check action, and *weakly* so (WNSTO) when at least
//! one maximal run avoids it; halting with a clash counts as avoiding it.
//! Both are decided by exhaustive exploration of the reachable state graph,
//! which is finite and acyclic because every action strictly decreases a
//! well-founded measure.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::term::{ApplySubst, Equation, EquationSet, Substitution, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    Mma,
    MmaMinus,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Mma => "mma",
            Algorithm::MmaMinus => "mma-minus",
        })
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Algorithm, String> {
        match s {
            "mma" => Ok(Algorithm::Mma),
            "mma-minus" => Ok(Algorithm::MmaMinus),
            other => Err(format!(
                "unknown algorithm '{other}', expected mma or mma-minus"
            )),
        }
    }
}

/// One rewriting action. `Eliminate` and `OccurCheck` belong to `Mma` only;
/// `EliminateVar` and `Merge` to `MmaMinus` only; the rest are shared.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Action {
    Decompose,
    Clash,
    Delete,
    Orient,
    Eliminate,
    OccurCheck,
    EliminateVar,
    Merge,
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Action::Decompose => "decompose",
            Action::Clash => "clash",
            Action::Delete => "delete",
            Action::Orient => "orient",
            Action::Eliminate => "eliminate",
            Action::OccurCheck => "occur-check",
            Action::EliminateVar => "eliminate-var",
            Action::Merge => "merge",
        })
    }
}

/// The equation (or pair, for `Merge`) an action is applied to.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum StepTarget {
    One(Equation),
    /// Merge: the kept binding and the replaced binding.
    Pair(Equation, Equation),
}

impl fmt::Display for StepTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepTarget::One(e) => write!(f, "{e}"),
            StepTarget::Pair(a, b) => write!(f, "{a} with {b}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepOutcome {
    Next(EquationSet),
    FailClash,
    FailOccurCheck,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub action: Action,
    pub target: StepTarget,
    pub outcome: StepOutcome,
}

/// Replaces every atom equation by the equations between corresponding
/// arguments. Runs operate on normalized sets only.
pub fn normalize(set: &EquationSet) -> EquationSet {
    let mut out = EquationSet::new();
    for e in set {
        match e {
            Equation::Terms(..) => out.insert(e.clone()),
            Equation::Atoms(a, b) => {
                for (s, t) in a.args.iter().zip(&b.args) {
                    out.insert(Equation::terms(s.clone(), t.clone()));
                }
            }
        }
    }
    out
}

fn clone_without(set: &EquationSet, skip: &Equation) -> EquationSet {
    set.iter().filter(|e| *e != skip).cloned().collect()
}

fn occurs_elsewhere(set: &EquationSet, this: &Equation, x: &str) -> bool {
    set.iter().any(|e| {
        e != this
            && match e {
                Equation::Terms(l, r) => l.contains_var(x) || r.contains_var(x),
                Equation::Atoms(a, b) => a.args.iter().chain(&b.args).any(|t| t.contains_var(x)),
            }
    })
}

fn term_pair(e: &Equation) -> (&Term, &Term) {
    match e {
        Equation::Terms(l, r) => (l, r),
        Equation::Atoms(..) => panic!("atom equation in a normalized set"),
    }
}

/// The single action applicable to `eq` within `set`, if any. Under `Mma`
/// at most one action applies to each equation; under `MmaMinus` the merge
/// rule is pairwise and enumerated separately.
fn equation_step(set: &EquationSet, eq: &Equation, algo: Algorithm) -> Option<Step> {
    let (l, r) = term_pair(eq);
    match (l, r) {
        (Term::App(f, fs), Term::App(g, gs)) => {
            if f == g && fs.len() == gs.len() {
                let mut next = clone_without(set, eq);
                for (a, b) in fs.iter().zip(gs) {
                    next.insert(Equation::terms(a.clone(), b.clone()));
                }
                Some(Step {
                    action: Action::Decompose,
                    target: StepTarget::One(eq.clone()),
                    outcome: StepOutcome::Next(next),
                })
            } else {
                Some(Step {
                    action: Action::Clash,
                    target: StepTarget::One(eq.clone()),
                    outcome: StepOutcome::FailClash,
                })
            }
        }
        (Term::App(..), Term::Var(_)) => {
            let mut next = clone_without(set, eq);
            next.insert(Equation::terms(r.clone(), l.clone()));
            Some(Step {
                action: Action::Orient,
                target: StepTarget::One(eq.clone()),
                outcome: StepOutcome::Next(next),
            })
        }
        (Term::Var(x), Term::Var(y)) if x == y => {
            let next = clone_without(set, eq);
            Some(Step {
                action: Action::Delete,
                target: StepTarget::One(eq.clone()),
                outcome: StepOutcome::Next(next),
            })
        }
        (Term::Var(x), t) => {
            let occurs_inside = t.contains_var(x);
            match algo {
                Algorithm::Mma => {
                    if occurs_inside {
                        Some(Step {
                            action: Action::OccurCheck,
                            target: StepTarget::One(eq.clone()),
                            outcome: StepOutcome::FailOccurCheck,
                        })
                    } else if occurs_elsewhere(set, eq, x) {
                        Some(eliminate_step(set, eq, x, t, Action::Eliminate))
                    } else {
                        None
                    }
                }
                Algorithm::MmaMinus => {
                    if t.is_var() && occurs_elsewhere(set, eq, x) {
                        Some(eliminate_step(set, eq, x, t, Action::EliminateVar))
                    } else {
                        None
                    }
                }
            }
        }
    }
}

fn eliminate_step(set: &EquationSet, eq: &Equation, x: &str, t: &Term, action: Action) -> Step {
    let sub = Substitution::singleton(x, t.clone());
    let mut next = EquationSet::new();
    next.insert(eq.clone());
    for e in set.iter().filter(|e| *e != eq) {
        next.insert(e.apply(&sub));
    }
    Step {
        action,
        target: StepTarget::One(eq.clone()),
        outcome: StepOutcome::Next(next),
    }
}

fn merge_step(set: &EquationSet, keep: &Equation, replace: &Equation) -> Step {
    let (_, s1) = term_pair(keep);
    let (_, s2) = term_pair(replace);
    let mut next = clone_without(set, replace);
    next.insert(Equation::terms(s1.clone(), s2.clone()));
    Step {
        action: Action::Merge,
        target: StepTarget::Pair(keep.clone(), replace.clone()),
        outcome: StepOutcome::Next(next),
    }
}

/// All steps applicable to a normalized equation set, in a deterministic
/// order: per-equation steps in canonical equation order, then merge steps.
pub fn applicable_steps(set: &EquationSet, algo: Algorithm) -> Vec<Step> {
    let mut steps: Vec<Step> = set
        .iter()
        .filter_map(|eq| equation_step(set, eq, algo))
        .collect();
    if algo == Algorithm::MmaMinus {
        let mut bindings: BTreeMap<&str, Vec<&Equation>> = BTreeMap::new();
        for eq in set {
            if let Equation::Terms(Term::Var(x), t) = eq {
                if !t.is_var() {
                    bindings.entry(x).or_default().push(eq);
                }
            }
        }
        for eqs in bindings.values() {
            for i in 0..eqs.len() {
                for j in i + 1..eqs.len() {
                    let (si, sj) = (term_pair(eqs[i]).1.size(), term_pair(eqs[j]).1.size());
                    if si <= sj {
                        steps.push(merge_step(set, eqs[i], eqs[j]));
                    }
                    if sj <= si {
                        steps.push(merge_step(set, eqs[j], eqs[i]));
                    }
                }
            }
        }
    }
    steps
}

/// How a deterministic run picks among applicable steps.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Strategy {
    /// Smallest target in canonical equation order, then action order.
    #[default]
    Canonical,
    /// Uniform choice from a seeded generator.
    Seeded(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub state: EquationSet,
    pub action: Action,
    pub target: StepTarget,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunOutcome {
    /// No action applicable; under `Mma` the state is solved, under
    /// `MmaMinus` semi-solved.
    Final(EquationSet),
    Clash,
    OccurCheckFailure,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunTrace {
    pub steps: Vec<TraceStep>,
    pub outcome: RunOutcome,
}

impl RunTrace {
    pub fn final_state(&self) -> Option<&EquationSet> {
        match &self.outcome {
            RunOutcome::Final(s) => Some(s),
            _ => None,
        }
    }

    pub fn performs(&self, action: Action) -> bool {
        self.steps.iter().any(|s| s.action == action)
    }
}

impl fmt::Display for RunTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.steps {
            writeln!(f, "{{{}}}", s.state)?;
            writeln!(f, "  {} {}", s.action, s.target)?;
        }
        match &self.outcome {
            RunOutcome::Final(s) => writeln!(f, "{{{s}}}"),
            RunOutcome::Clash => writeln!(f, "failure (clash)"),
            RunOutcome::OccurCheckFailure => writeln!(f, "failure (occur-check)"),
        }
    }
}

fn step_sort_key(s: &Step) -> (StepTarget, Action) {
    (s.target.clone(), s.action)
}

/// A complete deterministic run from the given set; atom equations are
/// decomposed on entry.
pub fn run(set: &EquationSet, algo: Algorithm, strategy: Strategy) -> RunTrace {
    let mut state = normalize(set);
    let mut steps = Vec::new();
    let mut rng = match strategy {
        Strategy::Seeded(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        Strategy::Canonical => None,
    };
    loop {
        let mut av = applicable_steps(&state, algo);
        if av.is_empty() {
            return RunTrace {
                steps,
                outcome: RunOutcome::Final(state),
            };
        }
        let chosen = match &mut rng {
            None => av
                .iter()
                .enumerate()
                .min_by_key(|(_, s)| step_sort_key(s))
                .map(|(i, _)| i)
                .unwrap(),
            Some(r) => r.gen_range(0..av.len()),
        };
        let step = av.swap_remove(chosen);
        steps.push(TraceStep {
            state: state.clone(),
            action: step.action,
            target: step.target,
        });
        match step.outcome {
            StepOutcome::Next(next) => state = next,
            StepOutcome::FailClash => {
                return RunTrace {
                    steps,
                    outcome: RunOutcome::Clash,
                }
            }
            StepOutcome::FailOccurCheck => {
                return RunTrace {
                    steps,
                    outcome: RunOutcome::OccurCheckFailure,
                }
            }
        }
    }
}

/// Exploration budget: the maximum number of distinct states.
#[derive(Clone, Copy, Debug)]
pub struct DecideLimits {
    pub max_states: usize,
}

impl Default for DecideLimits {
    fn default() -> DecideLimits {
        DecideLimits {
            max_states: 100_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("state budget of {budget} distinct equation sets exhausted")]
pub struct BudgetExhausted {
    pub budget: usize,
}

#[derive(Clone, Debug)]
pub struct GraphNode {
    pub state: EquationSet,
    pub steps: Vec<Step>,
    /// Parallel to `steps`: successor node index for non-halting steps.
    pub successors: Vec<Option<usize>>,
}

/// The full graph of states reachable from a root set. Node 0 is the
/// normalized root; the graph is acyclic.
#[derive(Clone, Debug)]
pub struct StateGraph {
    pub nodes: Vec<GraphNode>,
}

impl StateGraph {
    pub fn final_states(&self) -> impl Iterator<Item = &EquationSet> {
        self.nodes
            .iter()
            .filter(|n| n.steps.is_empty())
            .map(|n| &n.state)
    }

    pub fn any_step(&self, action: Action) -> bool {
        self.nodes
            .iter()
            .any(|n| n.steps.iter().any(|s| s.action == action))
    }
}

/// Breadth-first enumeration of every state reachable under `algo`.
pub fn explore(
    set: &EquationSet,
    algo: Algorithm,
    limits: &DecideLimits,
) -> Result<StateGraph, BudgetExhausted> {
    let root = normalize(set);
    let mut index: HashMap<EquationSet, usize> = HashMap::new();
    let mut nodes: Vec<GraphNode> = Vec::new();
    let mut queue: VecDeque<usize> = VecDeque::new();

    let intern = |state: EquationSet,
                  index: &mut HashMap<EquationSet, usize>,
                  nodes: &mut Vec<GraphNode>,
                  queue: &mut VecDeque<usize>|
     -> Result<usize, BudgetExhausted> {
        if let Some(&i) = index.get(&state) {
            return Ok(i);
        }
        if nodes.len() >= limits.max_states {
            return Err(BudgetExhausted {
                budget: limits.max_states,
            });
        }
        let i = nodes.len();
        index.insert(state.clone(), i);
        nodes.push(GraphNode {
            state,
            steps: Vec::new(),
            successors: Vec::new(),
        });
        queue.push_back(i);
        Ok(i)
    };

    intern(root, &mut index, &mut nodes, &mut queue)?;
    while let Some(i) = queue.pop_front() {
        let steps = applicable_steps(&nodes[i].state, algo);
        let mut successors = Vec::with_capacity(steps.len());
        for s in &steps {
            match &s.outcome {
                StepOutcome::Next(next) => {
                    let j = intern(next.clone(), &mut index, &mut nodes, &mut queue)?;
                    successors.push(Some(j));
                }
                _ => successors.push(None),
            }
        }
        nodes[i].steps = steps;
        nodes[i].successors = successors;
    }
    Ok(StateGraph { nodes })
}

/// Verdict on occur-check reachability for one equation set.
#[derive(Clone, Debug)]
pub struct NstoReport {
    /// No run can perform the occur-check action.
    pub nsto: bool,
    /// Some maximal run avoids it (ending in clash counts as avoiding).
    pub wnsto: bool,
    pub states_explored: usize,
    /// A run performing the occur-check, when `nsto` is false.
    pub occur_witness: Option<RunTrace>,
    /// An occur-check-free maximal run, when `wnsto` is true.
    pub free_witness: Option<RunTrace>,
}

/// Shortest path of trace steps from the root to `target`, inclusive of the
/// halting step at `target` with the given action.
fn halting_trace(g: &StateGraph, target: usize, action: Action, outcome: RunOutcome) -> RunTrace {
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; g.nodes.len()];
    let mut seen = vec![false; g.nodes.len()];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(i) = queue.pop_front() {
        if i == target {
            break;
        }
        for (k, succ) in g.nodes[i].successors.iter().enumerate() {
            if let Some(j) = succ {
                if !seen[*j] {
                    seen[*j] = true;
                    parent[*j] = Some((i, k));
                    queue.push_back(*j);
                }
            }
        }
    }
    let mut rev = Vec::new();
    let mut at = target;
    while let Some((prev, k)) = parent[at] {
        rev.push(TraceStep {
            state: g.nodes[prev].state.clone(),
            action: g.nodes[prev].steps[k].action,
            target: g.nodes[prev].steps[k].target.clone(),
        });
        at = prev;
    }
    rev.reverse();
    let mut steps = rev;
    let halt = g.nodes[target]
        .steps
        .iter()
        .find(|s| s.action == action)
        .expect("target admits the halting action");
    steps.push(TraceStep {
        state: g.nodes[target].state.clone(),
        action: halt.action,
        target: halt.target.clone(),
    });
    RunTrace { steps, outcome }
}

/// Decides NSTO and WNSTO by exhaustive exploration of the `Mma` state
/// graph, with witnesses for both verdicts.
pub fn decide_nsto_wnsto(
    set: &EquationSet,
    limits: &DecideLimits,
) -> Result<NstoReport, BudgetExhausted> {
    let g = explore(set, Algorithm::Mma, limits)?;
    let n = g.nodes.len();

    let occur_node = g
        .nodes
        .iter()
        .position(|node| node.steps.iter().any(|s| s.action == Action::OccurCheck));
    let occur_witness =
        occur_node.map(|t| halting_trace(&g, t, Action::OccurCheck, RunOutcome::OccurCheckFailure));

    // A state admits an occur-check-free continuation when it can halt by
    // clash, is final, or some successor does. Computed bottom-up; the graph
    // is acyclic.
    #[derive(Clone, Copy)]
    enum Choice {
        Final,
        Halt(usize),
        Continue(usize, usize),
    }
    let mut ok: Vec<Option<bool>> = vec![None; n];
    let mut choice: Vec<Option<Choice>> = vec![None; n];
    let mut stack: Vec<(usize, usize)> = vec![(0, 0)];
    while let Some((i, cursor)) = stack.pop() {
        if ok[i].is_some() {
            continue;
        }
        if cursor == 0 {
            if g.nodes[i].steps.is_empty() {
                ok[i] = Some(true);
                choice[i] = Some(Choice::Final);
                continue;
            }
            if let Some(k) = g.nodes[i]
                .steps
                .iter()
                .position(|s| s.action == Action::Clash)
            {
                ok[i] = Some(true);
                choice[i] = Some(Choice::Halt(k));
                continue;
            }
        }
        let mut cur = cursor;
        let mut settled = false;
        while cur < g.nodes[i].steps.len() {
            let Some(j) = g.nodes[i].successors[cur] else {
                cur += 1;
                continue;
            };
            match ok[j] {
                Some(true) => {
                    ok[i] = Some(true);
                    choice[i] = Some(Choice::Continue(cur, j));
                    settled = true;
                    break;
                }
                Some(false) => {
                    cur += 1;
                }
                None => {
                    stack.push((i, cur));
                    stack.push((j, 0));
                    settled = true;
                    break;
                }
            }
        }
        if !settled && cur >= g.nodes[i].steps.len() {
            ok[i] = Some(false);
        }
    }
    let wnsto = ok[0].expect("root settled");

    let free_witness = wnsto.then(|| {
        let mut steps = Vec::new();
        let mut at = 0usize;
        loop {
            match choice[at].expect("ok nodes carry a choice") {
                Choice::Final => {
                    return RunTrace {
                        steps,
                        outcome: RunOutcome::Final(g.nodes[at].state.clone()),
                    }
                }
                Choice::Halt(k) => {
                    steps.push(TraceStep {
                        state: g.nodes[at].state.clone(),
                        action: g.nodes[at].steps[k].action,
                        target: g.nodes[at].steps[k].target.clone(),
                    });
                    return RunTrace {
                        steps,
                        outcome: RunOutcome::Clash,
                    };
                }
                Choice::Continue(k, j) => {
                    steps.push(TraceStep {
                        state: g.nodes[at].state.clone(),
                        action: g.nodes[at].steps[k].action,
                        target: g.nodes[at].steps[k].target.clone(),
                    });
                    at = j;
                }
            }
        }
    });

    let nsto = occur_node.is_none();
    debug_assert!(!nsto || wnsto, "NSTO implies WNSTO");
    Ok(NstoReport {
        nsto,
        wnsto,
        states_explored: n,
        occur_witness,
        free_witness,
    })
}

/// Solved form: every equation binds a distinct variable that occurs in no
/// right-hand side.
pub fn is_solved(set: &EquationSet) -> bool {
    let mut lhs = BTreeSet::new();
    for e in set {
        let Equation::Terms(Term::Var(x), _) = e else {
            return false;
        };
        if !lhs.insert(x.clone()) {
            return false;
        }
    }
    set.iter().all(|e| {
        let (_, t) = term_pair(e);
        lhs.iter().all(|x| !t.contains_var(x))
    })
}

/// Semi-solved form: every equation binds a distinct variable to a different
/// term, and a variable bound to a variable occurs nowhere else in the set.
pub fn is_semi_solved(set: &EquationSet) -> bool {
    let mut lhs = BTreeSet::new();
    for e in set {
        let Equation::Terms(Term::Var(x), t) = e else {
            return false;
        };
        if t.as_var() == Some(x.as_str()) || !lhs.insert(x.clone()) {
            return false;
        }
    }
    for e in set {
        let (l, t) = term_pair(e);
        if t.is_var() {
            let x = l.as_var().unwrap();
            let occurrences: usize = set
                .iter()
                .map(|e2| {
                    let (l2, r2) = term_pair(e2);
                    count_var(l2, x) + count_var(r2, x)
                })
                .sum();
            if occurrences != 1 {
                return false;
            }
        }
    }
    true
}

fn count_var(t: &Term, x: &str) -> usize {
    match t {
        Term::Var(v) => usize::from(v == x),
        Term::App(_, args) => args.iter().map(|a| count_var(a, x)).sum(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum FormError {
    #[error("equation set is not in solved form")]
    NotSolved,
    #[error("equation set is not in semi-solved form")]
    NotSemiSolved,
}

/// Reads the most general unifier off a solved form.
pub fn mgu_of_solved(set: &EquationSet) -> Result<Substitution, FormError> {
    if !is_solved(set) {
        return Err(FormError::NotSolved);
    }
    Ok(Substitution::from_bindings(set.iter().map(|e| {
        let (l, r) = term_pair(e);
        (l.as_var().unwrap().to_string(), r.clone())
    })))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    Mgu(Substitution),
    OccurCheckFailure,
}

/// Continues a semi-solved form with the occur-check system until it either
/// reaches a solved form or fails the occur-check. From a semi-solved form
/// only elimination and occur-check steps are possible.
pub fn solve_semi_solved(set: &EquationSet) -> Result<SolveOutcome, FormError> {
    if !is_semi_solved(set) {
        return Err(FormError::NotSemiSolved);
    }
    let trace = run(set, Algorithm::Mma, Strategy::Canonical);
    for s in &trace.steps {
        debug_assert!(
            matches!(s.action, Action::Eliminate | Action::OccurCheck),
            "unexpected action {} from a semi-solved form",
            s.action
        );
    }
    match trace.outcome {
        RunOutcome::Final(f) => Ok(SolveOutcome::Mgu(
            mgu_of_solved(&f).expect("action-free Mma states are solved"),
        )),
        RunOutcome::OccurCheckFailure => Ok(SolveOutcome::OccurCheckFailure),
        RunOutcome::Clash => unreachable!("clash from a semi-solved form"),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum NormError {
    #[error("norm base {base} must exceed 1 and every arity (largest is {max_arity})")]
    BaseTooSmall { base: u32, max_arity: usize },
    #[error("norm overflow")]
    Overflow,
}

fn equation_terms(set: &EquationSet) -> impl Iterator<Item = &Term> {
    set.iter().flat_map(|e| {
        let (l, r) = term_pair(e);
        [l, r]
    })
}

/// The smallest admissible norm base for the set: above 1 and above every
/// arity occurring in it.
pub fn norm_base(set: &EquationSet) -> u32 {
    let max_arity = equation_terms(set).map(Term::max_arity).max().unwrap_or(0);
    (max_arity as u32 + 1).max(2)
}

/// Norm of one equation: `base` raised to the larger of the two term sizes.
pub fn equation_norm(e: &Equation, base: u32) -> Result<u128, NormError> {
    let (l, r) = term_pair(e);
    (base as u128)
        .checked_pow(l.size().max(r.size()) as u32)
        .ok_or(NormError::Overflow)
}

/// Sum of the equation norms. The base must exceed 1 and every arity; runs
/// of the occur-check-free system strictly decrease the triple of this norm,
/// `f45a` and `f5b` in lexicographic order.
pub fn norm(set: &EquationSet, base: u32) -> Result<u128, NormError> {
    let max_arity = equation_terms(set).map(Term::max_arity).max().unwrap_or(0);
    if base < 2 || (base as usize) <= max_arity {
        return Err(NormError::BaseTooSmall { base, max_arity });
    }
    let mut total: u128 = 0;
    for e in set {
        total = total
            .checked_add(equation_norm(e, base)?)
            .ok_or(NormError::Overflow)?;
    }
    Ok(total)
}

/// Number of equations the orient or variable-elimination action applies to.
pub fn f45a(set: &EquationSet) -> usize {
    set.iter()
        .filter(|e| {
            matches!(
                equation_step(set, e, Algorithm::MmaMinus),
                Some(Step {
                    action: Action::Orient | Action::EliminateVar,
                    ..
                })
            )
        })
        .count()
}

/// Number of equations binding a variable to a non-variable term.
pub fn f5b(set: &EquationSet) -> usize {
    set.iter()
        .filter(|e| matches!(e, Equation::Terms(Term::Var(_), t) if !t.is_var()))
        .count()
}

/// Solvability over rational (possibly infinite) trees: unification closure
/// without the occur-check, by union-find over the term graph. Two compound
/// terms in one class with different functors are the only failure.
pub fn rational_unifiable(set: &EquationSet) -> bool {
    struct Uf {
        parent: Vec<usize>,
        structure: Vec<Option<(String, Vec<usize>)>>,
    }
    impl Uf {
        fn find(&mut self, mut i: usize) -> usize {
            while self.parent[i] != i {
                self.parent[i] = self.parent[self.parent[i]];
                i = self.parent[i];
            }
            i
        }
        fn node(&mut self, structure: Option<(String, Vec<usize>)>) -> usize {
            self.parent.push(self.parent.len());
            self.structure.push(structure);
            self.parent.len() - 1
        }
    }

    fn term_node(t: &Term, uf: &mut Uf, vars: &mut BTreeMap<String, usize>) -> usize {
        match t {
            Term::Var(v) => {
                if let Some(&i) = vars.get(v) {
                    i
                } else {
                    let i = uf.node(None);
                    vars.insert(v.clone(), i);
                    i
                }
            }
            Term::App(f, args) => {
                let children = args.iter().map(|a| term_node(a, uf, vars)).collect();
                uf.node(Some((f.clone(), children)))
            }
        }
    }

    let mut uf = Uf {
        parent: Vec::new(),
        structure: Vec::new(),
    };
    let mut vars = BTreeMap::new();
    let mut pending: Vec<(usize, usize)> = Vec::new();
    for e in &normalize(set) {
        let (l, r) = term_pair(e);
        let a = term_node(l, &mut uf, &mut vars);
        let b = term_node(r, &mut uf, &mut vars);
        pending.push((a, b));
    }
    while let Some((a, b)) = pending.pop() {
        let (ra, rb) = (uf.find(a), uf.find(b));
        if ra == rb {
            continue;
        }
        match (uf.structure[ra].clone(), uf.structure[rb].clone()) {
            (Some((f, fs)), Some((g, gs))) => {
                if f != g || fs.len() != gs.len() {
                    return false;
                }
                pending.extend(fs.iter().copied().zip(gs.iter().copied()));
                uf.parent[rb] = ra;
            }
            (Some(_), None) => uf.parent[rb] = ra,
            _ => uf.parent[ra] = rb,
        }
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("trace does not end in a solved form")]
pub struct TraceNotSuccessful;

/// The elimination bindings of a successful run, in order, together with
/// their composition extended by the bindings of final equations no
/// elimination step selected. The extended composition equals the unifier
/// read off the final solved form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MguComposition {
    pub eliminations: Vec<Substitution>,
    pub theta: Substitution,
}

pub fn mgu_composition(trace: &RunTrace) -> Result<MguComposition, TraceNotSuccessful> {
    let Some(final_state) = trace.final_state() else {
        return Err(TraceNotSuccessful);
    };
    if !is_solved(final_state) {
        return Err(TraceNotSuccessful);
    }
    let mut eliminations = Vec::new();
    let mut selected: BTreeSet<String> = BTreeSet::new();
    for s in &trace.steps {
        if s.action == Action::Eliminate {
            let StepTarget::One(Equation::Terms(Term::Var(x), t)) = &s.target else {
                unreachable!("elimination targets a binding");
            };
            selected.insert(x.clone());
            eliminations.push(Substitution::singleton(x.clone(), t.clone()));
        }
    }
    let mut theta = eliminations
        .iter()
        .fold(Substitution::new(), |acc, g| acc.compose(g));
    for e in final_state {
        let (l, r) = term_pair(e);
        let x = l.as_var().unwrap();
        if !selected.contains(x) {
            theta.bind(x.to_string(), r.clone());
        }
    }
    Ok(MguComposition {
        eliminations,
        theta,
    })
}
