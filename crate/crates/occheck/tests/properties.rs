//! Cross-module properties on randomized inputs. Counts here stay modest;
//! the acceptance suite reruns the load-bearing ones at full volume.

mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use common::{var_pool, Gen};
use occheck::parser::parse_term_text;
use occheck::term::{ApplySubst, Equation, EquationSet, HasVars, Substitution, Term};
use occheck::unify::{
    applicable_steps, decide_nsto_wnsto, equation_norm, explore, f45a, f5b, is_semi_solved,
    is_solved, norm, norm_base, normalize, rational_unifiable, Action, Algorithm, DecideLimits,
    RunOutcome, RunTrace, Step, StepOutcome,
};

fn term_strategy() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        prop::sample::select(vec!["X", "Y", "Z"]).prop_map(Term::var),
        prop::sample::select(vec!["a", "b"]).prop_map(Term::constant),
    ];
    leaf.prop_recursive(3, 24, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| Term::app("g", vec![t])),
            (inner.clone(), inner.clone()).prop_map(|(s, t)| Term::app("f", vec![s, t])),
            (inner.clone(), inner.clone()).prop_map(|(s, t)| Term::app("+", vec![s, t])),
            (inner.clone(), inner).prop_map(|(s, t)| Term::app("*", vec![s, t])),
        ]
    })
}

proptest! {
    #[test]
    fn term_display_round_trips(t in term_strategy()) {
        let reparsed = parse_term_text(&t.to_string()).unwrap();
        prop_assert_eq!(reparsed, t);
    }

    #[test]
    fn applying_a_substitution_distributes_over_composition(
        t in term_strategy(),
        u in term_strategy(),
        v in term_strategy(),
    ) {
        let theta = Substitution::singleton("X", u);
        let sigma = Substitution::singleton("Y", v);
        prop_assert_eq!(
            t.apply(&theta).apply(&sigma),
            t.apply(&theta.compose(&sigma))
        );
    }

    #[test]
    fn ground_terms_are_fixed_points(t in term_strategy(), u in term_strategy()) {
        if t.is_ground() {
            let theta = Substitution::singleton("X", u);
            prop_assert_eq!(t.apply(&theta), t);
        }
    }
}

/// Replays a trace against the step relation: every recorded step must be
/// applicable in its state and lead to the next one.
fn validate_trace(set: &EquationSet, algo: Algorithm, trace: &RunTrace) {
    let mut state = normalize(set);
    for step in &trace.steps {
        assert_eq!(step.state, state, "trace state drifted");
        let steps = applicable_steps(&state, algo);
        let matching: Vec<&Step> = steps
            .iter()
            .filter(|s| s.action == step.action && s.target == step.target)
            .collect();
        assert_eq!(matching.len(), 1, "recorded step is not applicable");
        match &matching[0].outcome {
            StepOutcome::Next(next) => state = next.clone(),
            StepOutcome::FailClash => {
                assert_eq!(trace.outcome, RunOutcome::Clash);
                return;
            }
            StepOutcome::FailOccurCheck => {
                assert_eq!(trace.outcome, RunOutcome::OccurCheckFailure);
                return;
            }
        }
    }
    assert_eq!(trace.outcome, RunOutcome::Final(state));
}

#[test]
fn every_reduced_step_decreases_the_measure_triple() {
    let mut g = Gen::new(11);
    let vars = var_pool(&["X", "Y", "Z"]);
    let limits = DecideLimits::default();
    for _ in 0..400 {
        let set = g.equations(4, 3, &vars);
        let base = norm_base(&normalize(&set));
        let graph = explore(&set, Algorithm::MmaMinus, &limits).unwrap();
        for node in &graph.nodes {
            let before = (
                norm(&node.state, base).unwrap(),
                f45a(&node.state),
                f5b(&node.state),
            );
            for (step, succ) in node.steps.iter().zip(&node.successors) {
                let Some(j) = succ else { continue };
                let next = &graph.nodes[*j].state;
                let after = (norm(next, base).unwrap(), f45a(next), f5b(next));
                assert!(
                    after < before,
                    "step {} on {{{}}} did not decrease the measure: {:?} -> {:?}",
                    step.action,
                    node.state,
                    before,
                    after
                );
            }
        }
    }
}

#[test]
fn decomposition_shrinks_the_norm_of_the_pieces() {
    let mut g = Gen::new(12);
    let vars = var_pool(&["X", "Y", "Z"]);
    for _ in 0..600 {
        let s = g.term(3, &vars);
        let t = g.term(3, &vars);
        let (Term::App(f, fs), Term::App(h, hs)) = (&s, &t) else {
            continue;
        };
        if f != h || fs.len() != hs.len() {
            continue;
        }
        let eq = Equation::terms(s.clone(), t.clone());
        let base = norm_base(&[eq.clone()].into_iter().collect::<EquationSet>());
        let whole = equation_norm(&eq, base).unwrap();
        let pieces: u128 = fs
            .iter()
            .zip(hs)
            .map(|(a, b)| equation_norm(&Equation::terms(a.clone(), b.clone()), base).unwrap())
            .sum();
        assert!(whole > pieces, "{eq}: {whole} <= {pieces}");
    }
}

#[test]
fn rational_solvability_is_invariant_along_steps() {
    let mut g = Gen::new(13);
    let vars = var_pool(&["X", "Y", "Z"]);
    let limits = DecideLimits::default();
    for i in 0..300 {
        let set = g.equations(3, 2, &vars);
        let algo = if i % 2 == 0 {
            Algorithm::Mma
        } else {
            Algorithm::MmaMinus
        };
        let solvable = rational_unifiable(&set);
        let graph = explore(&set, algo, &limits).unwrap();
        for node in &graph.nodes {
            assert_eq!(
                rational_unifiable(&node.state),
                solvable,
                "{{{}}} under {algo}",
                node.state
            );
        }
    }
}

#[test]
fn action_free_states_are_solved_or_semi_solved_forms() {
    let mut g = Gen::new(14);
    let vars = var_pool(&["X", "Y", "Z"]);
    let limits = DecideLimits::default();
    for _ in 0..300 {
        let set = g.equations(4, 3, &vars);
        for final_state in explore(&set, Algorithm::Mma, &limits)
            .unwrap()
            .final_states()
        {
            assert!(is_solved(final_state), "{{{final_state}}}");
        }
        for final_state in explore(&set, Algorithm::MmaMinus, &limits)
            .unwrap()
            .final_states()
        {
            assert!(is_semi_solved(final_state), "{{{final_state}}}");
            assert!(rational_unifiable(final_state), "{{{final_state}}}");
        }
    }
}

#[test]
fn decide_witnesses_replay_as_real_runs() {
    let mut g = Gen::new(15);
    let vars = var_pool(&["X", "Y", "Z"]);
    let limits = DecideLimits::default();
    for _ in 0..300 {
        let set = g.equations(3, 3, &vars);
        let report = decide_nsto_wnsto(&set, &limits).unwrap();
        assert!(!report.nsto || report.wnsto, "NSTO must imply WNSTO");
        if let Some(w) = &report.occur_witness {
            assert!(!report.nsto);
            assert!(w.performs(Action::OccurCheck));
            validate_trace(&set, Algorithm::Mma, w);
        }
        if let Some(w) = &report.free_witness {
            assert!(report.wnsto);
            assert!(!w.performs(Action::OccurCheck));
            validate_trace(&set, Algorithm::Mma, w);
        }
        assert_eq!(report.wnsto, report.free_witness.is_some());
        assert_eq!(report.nsto, report.occur_witness.is_none());
    }
}

#[test]
fn deterministic_runs_replay_and_share_verdicts_with_the_graph() {
    let mut g = Gen::new(16);
    let vars = var_pool(&["X", "Y", "Z"]);
    for seed in 0..300u64 {
        let set = g.equations(4, 2, &vars);
        let trace =
            occheck::unify::run(&set, Algorithm::Mma, occheck::unify::Strategy::Seeded(seed));
        validate_trace(&set, Algorithm::Mma, &trace);
        // Unifiability does not depend on the run: compare against the
        // canonical strategy.
        let canonical =
            occheck::unify::run(&set, Algorithm::Mma, occheck::unify::Strategy::Canonical);
        let succeeded = |t: &RunTrace| matches!(t.outcome, RunOutcome::Final(_));
        assert_eq!(succeeded(&trace), succeeded(&canonical), "{set}");
    }
}

#[test]
fn solved_forms_unify_their_own_equations() {
    let mut g = Gen::new(17);
    let vars = var_pool(&["X", "Y", "Z"]);
    let limits = DecideLimits::default();
    for _ in 0..200 {
        let set = g.equations(3, 2, &vars);
        let graph = explore(&set, Algorithm::Mma, &limits).unwrap();
        for final_state in graph.final_states() {
            let mgu = occheck::unify::mgu_of_solved(final_state).unwrap();
            for eq in final_state {
                let Equation::Terms(l, r) = eq else {
                    unreachable!()
                };
                assert_eq!(l.apply(&mgu), r.apply(&mgu), "{mgu} on {eq}");
            }
            // The unifier also solves the initial system.
            for eq in &normalize(&set) {
                let Equation::Terms(l, r) = eq else {
                    unreachable!()
                };
                assert_eq!(l.apply(&mgu), r.apply(&mgu), "{mgu} on initial {eq}");
            }
        }
    }
}

#[test]
fn substitution_variables_stay_relevant_in_resolution() {
    use occheck::sld::{resolve, ResolveOutcome};
    use occheck::term::RenameCounter;

    let mut g = Gen::new(18);
    let vars = var_pool(&["A", "B", "C", "D"]);
    let mut counter = RenameCounter::new();
    let mut resolved = 0;
    for _ in 0..2000 {
        let q = common::random_query(&mut g, 2, 2, &vars);
        let c = common::random_clause(&mut g, 2, 2, &vars);
        for idx in 0..q.len() {
            let a = &q.atoms[idx];
            if a.predicate != c.head.predicate || a.arity() != c.head.arity() {
                continue;
            }
            let (renamed, outcome) = resolve(&q, idx, &c, &BTreeSet::new(), &mut counter);
            if let ResolveOutcome::Resolved(r) = outcome {
                resolved += 1;
                let mut relevant = a.vars();
                renamed.head.collect_vars(&mut relevant);
                assert!(r.mgu.vars().is_subset(&relevant), "{}: {}", a, r.mgu);
                // Resolvent variables come from the query or the clause.
                let mut scope = q.vars();
                renamed.collect_vars(&mut scope);
                assert!(r.resolvent.vars().is_subset(&scope));
            }
        }
    }
    assert!(resolved > 100, "only {resolved} resolutions exercised");
}
