//! Whole-file occur-check safety verdicts.
//!
//! Four independent routes each combine syntactic conditions on the program
//! with conditions on the file's queries. A route that holds guarantees
//! derivations for those queries stay clear of the occur-check to the
//! stated degree, under the stated selection rules:
//!
//! * `tidy`: tidiness of program and queries under a two-valued moding
//!   makes every attempted unification occur-check free, whatever atom is
//!   selected. Not applicable to modings with neutral positions, whose
//!   neutral arguments this argument does not cover.
//! * `weakly-linear-heads`: weak linearity of every clause head guarantees,
//!   under any selection rule compatible with the moding, that some
//!   occur-check-free derivation exists for each node.
//! * `well-3-moded`: a well-3-moded program with weakly linear heads and
//!   well-3-moded queries gives the weak guarantee under the leftmost rule,
//!   and under every rule when the moding has no output position.
//! * `weakly-tidy`: a program weakly tidy for the moding pair, with queries
//!   tidy under the secondary moding and everything well-3-moded under the
//!   primary one, gives the same guarantees as the previous route.

use serde::Serialize;

use crate::modes::{
    tidy_program, tidy_query, weakly_linear_heads, weakly_tidy_program, well_3_moded_program,
    well_3_moded_query, ConditionReport, ModeError, Moding, ThreeModing, Verdict, Witness,
};
use crate::term::{Program, Query};

/// Strength of the conclusion a holding route licenses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Guarantee {
    /// No run of any attempted unification performs the occur-check,
    /// under any selection rule.
    OccurCheckFreeAnyRule,
    /// Every attempted unification admits an occur-check-free run, under
    /// selection rules that only pick atoms with ground input positions.
    WeaklyOccurCheckFreeCompatibleRules,
    /// The weak guarantee under the leftmost selection rule.
    WeaklyOccurCheckFreeLeftmost,
    /// The weak guarantee under any selection rule.
    WeaklyOccurCheckFreeAnyRule,
}

impl Guarantee {
    pub fn describe(&self) -> &'static str {
        match self {
            Guarantee::OccurCheckFreeAnyRule => "occur-check free under any selection rule",
            Guarantee::WeaklyOccurCheckFreeCompatibleRules => {
                "weakly occur-check free under moding-compatible selection rules"
            }
            Guarantee::WeaklyOccurCheckFreeLeftmost => {
                "weakly occur-check free under the leftmost selection rule"
            }
            Guarantee::WeaklyOccurCheckFreeAnyRule => {
                "weakly occur-check free under any selection rule"
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RouteReport {
    pub route: &'static str,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub guarantee: Option<Guarantee>,
    /// Short identifier of the applied conclusion, e.g. `tidy-any-rule`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<&'static str>,
    pub conditions: Vec<ConditionReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub routes: Vec<RouteReport>,
}

impl AnalysisReport {
    pub fn applied(&self) -> impl Iterator<Item = &RouteReport> {
        self.routes.iter().filter(|r| r.verdict == Verdict::Holds)
    }

    /// Labels of the holding routes, in route order.
    pub fn labels(&self) -> Vec<&'static str> {
        self.applied().filter_map(|r| r.label).collect()
    }

    pub fn any_applies(&self) -> bool {
        self.applied().next().is_some()
    }
}

fn label_for(route: &'static str, g: Guarantee) -> &'static str {
    match (route, g) {
        ("tidy", _) => "tidy-any-rule",
        ("weakly-linear-heads", _) => "weakly-linear-compatible",
        ("well-3-moded", Guarantee::WeaklyOccurCheckFreeAnyRule) => "well3-any-rule",
        ("well-3-moded", _) => "well3-leftmost",
        ("weakly-tidy", Guarantee::WeaklyOccurCheckFreeAnyRule) => "weakly-tidy-any-rule",
        _ => "weakly-tidy-leftmost",
    }
}

fn finish(route: &'static str, conditions: Vec<ConditionReport>, g: Guarantee) -> RouteReport {
    let holds = conditions.iter().all(ConditionReport::holds);
    RouteReport {
        route,
        verdict: if holds {
            Verdict::Holds
        } else {
            Verdict::Fails
        },
        guarantee: holds.then_some(g),
        label: holds.then(|| label_for(route, g)),
        conditions,
    }
}

fn query_condition(
    name: &str,
    index: usize,
    result: Result<Option<Witness>, ModeError>,
) -> ConditionReport {
    ConditionReport::from_witness(
        name,
        result.map(|w| {
            w.map(|mut w| {
                w.query = Some(index);
                w
            })
        }),
    )
}

fn tidy_route(program: &Program, queries: &[Query], moding: &ThreeModing) -> RouteReport {
    let Some(two_valued) = moding.narrow() else {
        return RouteReport {
            route: "tidy",
            verdict: Verdict::NotApplicable,
            guarantee: None,
            label: None,
            conditions: vec![ConditionReport::not_applicable(
                "two-valued-moding",
                "the moding has neutral positions",
            )],
        };
    };
    let mut conditions = vec![ConditionReport::from_witness(
        "program-tidy",
        tidy_program(program, &two_valued),
    )];
    for (i, q) in queries.iter().enumerate() {
        conditions.push(query_condition("query-tidy", i, tidy_query(q, &two_valued)));
    }
    finish("tidy", conditions, Guarantee::OccurCheckFreeAnyRule)
}

fn weakly_linear_route(program: &Program, moding: &ThreeModing) -> RouteReport {
    let conditions = vec![ConditionReport::from_witness(
        "weakly-linear-heads",
        weakly_linear_heads(program, moding),
    )];
    finish(
        "weakly-linear-heads",
        conditions,
        Guarantee::WeaklyOccurCheckFreeCompatibleRules,
    )
}

fn well3_route(program: &Program, queries: &[Query], moding: &ThreeModing) -> RouteReport {
    let mut conditions = vec![
        ConditionReport::from_witness(
            "program-well-3-moded",
            well_3_moded_program(program, moding),
        ),
        ConditionReport::from_witness("weakly-linear-heads", weakly_linear_heads(program, moding)),
    ];
    for (i, q) in queries.iter().enumerate() {
        conditions.push(query_condition(
            "query-well-3-moded",
            i,
            well_3_moded_query(q, moding),
        ));
    }
    let g = if moding.has_output() {
        Guarantee::WeaklyOccurCheckFreeLeftmost
    } else {
        Guarantee::WeaklyOccurCheckFreeAnyRule
    };
    finish("well-3-moded", conditions, g)
}

fn weakly_tidy_route(
    program: &Program,
    queries: &[Query],
    moding: &ThreeModing,
    moding2: Option<&Moding>,
) -> RouteReport {
    let Some(second) = moding2 else {
        return RouteReport {
            route: "weakly-tidy",
            verdict: Verdict::NotApplicable,
            guarantee: None,
            label: None,
            conditions: vec![ConditionReport::not_applicable(
                "secondary-moding",
                "no secondary moding given",
            )],
        };
    };
    let mut conditions = vec![ConditionReport::from_witness(
        "program-weakly-tidy",
        weakly_tidy_program(program, moding, second),
    )];
    for (i, q) in queries.iter().enumerate() {
        conditions.push(query_condition(
            "query-tidy-secondary",
            i,
            tidy_query(q, second),
        ));
    }
    conditions.push(ConditionReport::from_witness(
        "program-well-3-moded",
        well_3_moded_program(program, moding),
    ));
    for (i, q) in queries.iter().enumerate() {
        conditions.push(query_condition(
            "query-well-3-moded",
            i,
            well_3_moded_query(q, moding),
        ));
    }
    let g = if moding.has_output() {
        Guarantee::WeaklyOccurCheckFreeLeftmost
    } else {
        Guarantee::WeaklyOccurCheckFreeAnyRule
    };
    finish("weakly-tidy", conditions, g)
}

/// Runs all four routes for a program, its queries, and its moding pair.
pub fn analyze(
    program: &Program,
    queries: &[Query],
    moding: &ThreeModing,
    moding2: Option<&Moding>,
) -> AnalysisReport {
    AnalysisReport {
        routes: vec![
            tidy_route(program, queries, moding),
            weakly_linear_route(program, moding),
            well3_route(program, queries, moding),
            weakly_tidy_route(program, queries, moding, moding2),
        ],
    }
}

/// Convenience for a parsed file: secondary moding only when declared.
pub fn analyze_file(file: &crate::parser::SourceFile) -> AnalysisReport {
    let moding2 = (!file.moding2.is_empty()).then_some(&file.moding2);
    analyze(&file.program, &file.queries, &file.moding, moding2)
}
