//! Deterministic generators and oracles shared by the integration suites.

// Each test target compiles this module separately and uses a subset of it.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use occheck::modes::{Mode, Mode3, Moding, ThreeModing};
use occheck::term::{
    variant_terms, ApplySubst, Atom, Clause, Equation, EquationSet, Query, Substitution, Term,
};
use occheck::unify::{run, Algorithm, RunOutcome, Strategy};

/// Fresh variable supply with a distinguishing prefix.
pub struct Fresh {
    prefix: &'static str,
    n: usize,
}

impl Fresh {
    pub fn new(prefix: &'static str) -> Fresh {
        Fresh { prefix, n: 0 }
    }

    pub fn next_var(&mut self) -> String {
        let v = format!("{}{}", self.prefix, self.n);
        self.n += 1;
        v
    }
}

pub struct Gen {
    pub rng: StdRng,
}

impl Gen {
    pub fn new(seed: u64) -> Gen {
        Gen {
            rng: StdRng::seed_from_u64(seed),
        }
    }

    pub fn pick<'a, T>(&mut self, xs: &'a [T]) -> &'a T {
        &xs[self.rng.gen_range(0..xs.len())]
    }

    /// Random term of bounded depth over the given variable pool.
    pub fn term(&mut self, depth: usize, vars: &[String]) -> Term {
        if depth == 0 || self.rng.gen_bool(0.35) {
            if !vars.is_empty() && self.rng.gen_bool(0.6) {
                Term::var(self.pick(vars).clone())
            } else {
                Term::constant(*self.pick(&["a", "b"]))
            }
        } else {
            match self.rng.gen_range(0..3) {
                0 => Term::app("g", vec![self.term(depth - 1, vars)]),
                1 => Term::app(
                    "f",
                    vec![self.term(depth - 1, vars), self.term(depth - 1, vars)],
                ),
                _ => Term::app(
                    "h",
                    vec![
                        self.term(depth - 1, vars),
                        self.term(depth - 1, vars),
                        self.term(depth - 1, vars),
                    ],
                ),
            }
        }
    }

    /// Random equation set with at most `max_eqs` equations.
    pub fn equations(&mut self, max_eqs: usize, depth: usize, vars: &[String]) -> EquationSet {
        let n = self.rng.gen_range(1..=max_eqs);
        (0..n)
            .map(|_| Equation::terms(self.term(depth, vars), self.term(depth, vars)))
            .collect()
    }

    /// Linear term: every variable comes fresh from the supply.
    pub fn linear_term(&mut self, depth: usize, fresh: &mut Fresh) -> Term {
        if depth == 0 || self.rng.gen_bool(0.35) {
            if self.rng.gen_bool(0.7) {
                Term::var(fresh.next_var())
            } else {
                Term::constant(*self.pick(&["a", "b"]))
            }
        } else {
            match self.rng.gen_range(0..2) {
                0 => Term::app("g", vec![self.linear_term(depth - 1, fresh)]),
                _ => Term::app(
                    "f",
                    vec![
                        self.linear_term(depth - 1, fresh),
                        self.linear_term(depth - 1, fresh),
                    ],
                ),
            }
        }
    }

    pub fn atom(&mut self, predicate: &str, arity: usize, depth: usize, vars: &[String]) -> Atom {
        Atom::new(
            predicate,
            (0..arity).map(|_| self.term(depth, vars)).collect(),
        )
    }
}

pub fn var_pool(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// Reference unification by a deterministic run of the occur-check system,
/// which is correct on every input.
pub fn oracle_mgu(set: &EquationSet) -> Option<Substitution> {
    let trace = run(set, Algorithm::Mma, Strategy::Canonical);
    match trace.outcome {
        RunOutcome::Final(f) => Some(occheck::unify::mgu_of_solved(&f).unwrap()),
        _ => None,
    }
}

/// Substitution equality up to variable renaming, compared on the tuple of
/// the given variables.
pub fn variant_subst(a: &Substitution, b: &Substitution, vars: &BTreeSet<String>) -> bool {
    let instance = |s: &Substitution| -> Vec<Term> {
        vars.iter().map(|v| Term::var(v.clone()).apply(s)).collect()
    };
    variant_terms(&instance(a), &instance(b))
}

/// Predicate signature used by the mode-level generators.
pub const PREDICATES: &[(&str, usize)] = &[("p", 2), ("q", 3), ("r", 1)];

pub fn random_moding(g: &mut Gen) -> Moding {
    let mut m = Moding::new();
    for (p, n) in PREDICATES {
        let modes = (0..*n)
            .map(|_| {
                if g.rng.gen_bool(0.5) {
                    Mode::Input
                } else {
                    Mode::Output
                }
            })
            .collect();
        m.insert(*p, modes);
    }
    m
}

pub fn random_three_moding(g: &mut Gen) -> ThreeModing {
    let mut m = ThreeModing::new();
    for (p, n) in PREDICATES {
        let modes = (0..*n)
            .map(|_| match g.rng.gen_range(0..3) {
                0 => Mode3::Input,
                1 => Mode3::Output,
                _ => Mode3::Neutral,
            })
            .collect();
        m.insert(*p, modes);
    }
    m
}

pub fn random_query(g: &mut Gen, max_atoms: usize, depth: usize, vars: &[String]) -> Query {
    let n = g.rng.gen_range(1..=max_atoms);
    Query::new(
        (0..n)
            .map(|_| {
                let (p, a) = *g.pick(PREDICATES);
                g.atom(p, a, depth, vars)
            })
            .collect(),
    )
}

pub fn random_clause(g: &mut Gen, max_body: usize, depth: usize, vars: &[String]) -> Clause {
    let (p, a) = *g.pick(PREDICATES);
    let head = g.atom(p, a, depth, vars);
    let n = g.rng.gen_range(0..=max_body);
    let body = (0..n)
        .map(|_| {
            let (p, a) = *g.pick(PREDICATES);
            g.atom(p, a, depth, vars)
        })
        .collect();
    Clause::rule(head, body)
}
