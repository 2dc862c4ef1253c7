//! C interface to the occur-check analysis library.
//!
//! Conventions:
//! - Inputs are NUL-terminated UTF-8 strings.
//! - Results cross the boundary as JSON in newly allocated strings; pass
//!   them to [`occheck_string_free`] when done.
//! - Every function returns an `OCCHECK_*` code. On failure the output
//!   string, when requested, holds `{"error": "..."}` instead of a result.
//! - Parsed programs live behind the opaque [`OccheckSource`] handle and
//!   must be released with [`occheck_source_free`].

use std::ffi::{CStr, CString};
use std::os::raw::{c_char, c_int, c_uint};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use occheck::parser::{parse_equations, parse_program, parse_query, SourceFile};
use occheck::report::analyze_file;
use occheck::sld::{answers, verify_tree, ExploreLimits, SelectionRule};
use occheck::unify::{
    decide_nsto_wnsto, mgu_of_solved, run, solve_semi_solved, Algorithm, DecideLimits, RunOutcome,
    SolveOutcome, Strategy,
};
use serde_json::json;

pub const OCCHECK_OK: c_int = 0;
/// A required pointer argument was NULL.
pub const OCCHECK_ERR_NULL_ARGUMENT: c_int = 1;
/// An input string was not valid UTF-8.
pub const OCCHECK_ERR_INVALID_UTF8: c_int = 2;
/// The input did not parse; the output string holds the diagnostic.
pub const OCCHECK_ERR_PARSE: c_int = 3;
/// An argument was structurally valid but unusable (unknown rule name,
/// missing query, missing moding).
pub const OCCHECK_ERR_UNSUPPORTED: c_int = 4;
/// The state budget was exhausted before a verdict was reached.
pub const OCCHECK_ERR_BUDGET: c_int = 5;
/// An internal invariant failed.
pub const OCCHECK_ERR_INTERNAL: c_int = 6;

/// An opaque parsed program file: clauses, queries, and mode declarations.
pub struct OccheckSource {
    file: SourceFile,
}

/// Writes `text` into `*out` as a newly allocated C string.
///
/// Returns false when the text cannot be represented (interior NUL).
fn set_out(out: *mut *mut c_char, text: String) -> bool {
    match CString::new(text) {
        Ok(s) => {
            unsafe { *out = s.into_raw() };
            true
        }
        Err(_) => {
            unsafe { *out = ptr::null_mut() };
            false
        }
    }
}

/// Writes `{"error": msg}` into `*out` (when non-NULL) and returns `code`.
fn fail(out: *mut *mut c_char, code: c_int, msg: &str) -> c_int {
    if !out.is_null() {
        set_out(out, json!({ "error": msg }).to_string());
    }
    code
}

/// Reads a required UTF-8 argument.
unsafe fn read_str<'a>(p: *const c_char, out: *mut *mut c_char) -> Result<&'a str, c_int> {
    if p.is_null() {
        return Err(fail(out, OCCHECK_ERR_NULL_ARGUMENT, "argument is NULL"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(out, OCCHECK_ERR_INVALID_UTF8, "argument is not UTF-8"))
}

/// Runs `body` with panics converted into `OCCHECK_ERR_INTERNAL`.
fn guarded<F: FnOnce() -> c_int>(out: *mut *mut c_char, body: F) -> c_int {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(code) => code,
        Err(_) => fail(out, OCCHECK_ERR_INTERNAL, "internal panic"),
    }
}

fn decide_limits(budget: c_uint) -> DecideLimits {
    if budget == 0 {
        DecideLimits::default()
    } else {
        DecideLimits {
            max_states: budget as usize,
        }
    }
}

fn parse_rule(name: &str, file: &SourceFile) -> Result<SelectionRule, String> {
    match name {
        "leftmost" => Ok(SelectionRule::Leftmost),
        "rightmost" => Ok(SelectionRule::Rightmost),
        "moding" => {
            if file.moding.is_empty() {
                Err("rule \"moding\" needs mode declarations in the file".into())
            } else {
                Ok(SelectionRule::ModingCompatible(file.moding.clone()))
            }
        }
        _ => match name.strip_prefix("random:").and_then(|s| s.parse().ok()) {
            Some(seed) => Ok(SelectionRule::Random(seed)),
            None => Err(format!("unknown selection rule \"{name}\"")),
        },
    }
}

/// Resolves the query argument: an explicit string, or the file's first
/// query when NULL.
unsafe fn resolve_query(
    src: &OccheckSource,
    query: *const c_char,
    out: *mut *mut c_char,
) -> Result<occheck::term::Query, c_int> {
    if query.is_null() {
        return src.file.queries.first().cloned().ok_or_else(|| {
            fail(
                out,
                OCCHECK_ERR_UNSUPPORTED,
                "no query given and the file declares none",
            )
        });
    }
    let text = read_str(query, out)?;
    parse_query(text).map_err(|e| fail(out, OCCHECK_ERR_PARSE, &e.to_string()))
}

/// Parses a program file into a new handle.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be a valid pointer.
/// On success `*out` owns the handle; release it with
/// [`occheck_source_free`]. On failure `*out` is NULL and, when `error`
/// is non-NULL, `*error` holds a JSON diagnostic to release with
/// [`occheck_string_free`].
#[no_mangle]
pub unsafe extern "C" fn occheck_source_parse(
    text: *const c_char,
    out: *mut *mut OccheckSource,
    error: *mut *mut c_char,
) -> c_int {
    if out.is_null() {
        return fail(error, OCCHECK_ERR_NULL_ARGUMENT, "out is NULL");
    }
    *out = ptr::null_mut();
    guarded(error, || {
        let text = match read_str(text, error) {
            Ok(t) => t,
            Err(code) => return code,
        };
        match parse_program(text) {
            Ok(file) => {
                *out = Box::into_raw(Box::new(OccheckSource { file }));
                OCCHECK_OK
            }
            Err(e) => fail(error, OCCHECK_ERR_PARSE, &e.to_string()),
        }
    })
}

/// Releases a handle returned by [`occheck_source_parse`].
///
/// # Safety
/// `src` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn occheck_source_free(src: *mut OccheckSource) {
    if !src.is_null() {
        drop(Box::from_raw(src));
    }
}

/// Releases a string returned by any function of this library.
///
/// # Safety
/// `s` must be NULL or a string obtained from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn occheck_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// The library version as a static string; do not free it.
#[no_mangle]
pub extern "C" fn occheck_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Reports which occur-check safety routes accept the program, as JSON:
/// `{"routes": [...], "applied": [...], "established": bool}`.
///
/// # Safety
/// `src` must be a live handle; `out` must be a valid pointer. Release
/// `*out` with [`occheck_string_free`].
#[no_mangle]
pub unsafe extern "C" fn occheck_analyze(
    src: *const OccheckSource,
    out: *mut *mut c_char,
) -> c_int {
    if out.is_null() {
        return OCCHECK_ERR_NULL_ARGUMENT;
    }
    *out = ptr::null_mut();
    guarded(out, || {
        if src.is_null() {
            return fail(out, OCCHECK_ERR_NULL_ARGUMENT, "source is NULL");
        }
        let report = analyze_file(&(*src).file);
        let v = json!({
            "schema_version": 1,
            "routes": report.routes,
            "applied": report.labels(),
            "established": report.any_applies(),
        });
        if set_out(out, v.to_string()) {
            OCCHECK_OK
        } else {
            OCCHECK_ERR_INTERNAL
        }
    })
}

/// Decides the NSTO and WNSTO verdicts of an equation set, as JSON:
/// `{"nsto": bool, "wnsto": bool, "states_explored": n}`.
///
/// `budget` bounds the number of distinct states explored; 0 means the
/// default (100000).
///
/// # Safety
/// `equations` must be a NUL-terminated string; `out` must be a valid
/// pointer. Release `*out` with [`occheck_string_free`].
#[no_mangle]
pub unsafe extern "C" fn occheck_decide(
    equations: *const c_char,
    budget: c_uint,
    out: *mut *mut c_char,
) -> c_int {
    if out.is_null() {
        return OCCHECK_ERR_NULL_ARGUMENT;
    }
    *out = ptr::null_mut();
    guarded(out, || {
        let text = match read_str(equations, out) {
            Ok(t) => t,
            Err(code) => return code,
        };
        let set = match parse_equations(text) {
            Ok(s) => s,
            Err(e) => return fail(out, OCCHECK_ERR_PARSE, &e.to_string()),
        };
        match decide_nsto_wnsto(&set, &decide_limits(budget)) {
            Ok(r) => {
                let v = json!({
                    "schema_version": 1,
                    "nsto": r.nsto,
                    "wnsto": r.wnsto,
                    "states_explored": r.states_explored,
                });
                if set_out(out, v.to_string()) {
                    OCCHECK_OK
                } else {
                    OCCHECK_ERR_INTERNAL
                }
            }
            Err(e) => fail(out, OCCHECK_ERR_BUDGET, &e.to_string()),
        }
    })
}

/// Runs unification on an equation set and reports the outcome as JSON:
/// `{"algorithm": ..., "outcome": "solved"|"semi-solved"|"clash"|
/// "occur-check", "final": ..., "mgu": ..., "residue": ...}`.
///
/// `with_occur_check` selects the algorithm: nonzero runs the occur-check
/// variant, zero the occur-check-free one. For a semi-solved outcome,
/// `residue` holds the result of solving the remaining equations: an mgu,
/// or `"occur-check failure"`.
///
/// # Safety
/// `equations` must be a NUL-terminated string; `out` must be a valid
/// pointer. Release `*out` with [`occheck_string_free`].
#[no_mangle]
pub unsafe extern "C" fn occheck_unify(
    equations: *const c_char,
    with_occur_check: c_int,
    out: *mut *mut c_char,
) -> c_int {
    if out.is_null() {
        return OCCHECK_ERR_NULL_ARGUMENT;
    }
    *out = ptr::null_mut();
    guarded(out, || {
        let text = match read_str(equations, out) {
            Ok(t) => t,
            Err(code) => return code,
        };
        let set = match parse_equations(text) {
            Ok(s) => s,
            Err(e) => return fail(out, OCCHECK_ERR_PARSE, &e.to_string()),
        };
        let algo = if with_occur_check != 0 {
            Algorithm::Mma
        } else {
            Algorithm::MmaMinus
        };
        let trace = run(&set, algo, Strategy::Canonical);
        let v = match &trace.outcome {
            RunOutcome::Clash => json!({
                "schema_version": 1,
                "algorithm": algo.to_string(),
                "outcome": "clash",
            }),
            RunOutcome::OccurCheckFailure => json!({
                "schema_version": 1,
                "algorithm": algo.to_string(),
                "outcome": "occur-check",
            }),
            RunOutcome::Final(state) => match algo {
                Algorithm::Mma => json!({
                    "schema_version": 1,
                    "algorithm": algo.to_string(),
                    "outcome": "solved",
                    "final": state.to_string(),
                    "mgu": mgu_of_solved(state).expect("final states are solved").to_string(),
                }),
                Algorithm::MmaMinus => {
                    let residue =
                        match solve_semi_solved(state).expect("final states are semi-solved") {
                            SolveOutcome::Mgu(m) => m.to_string(),
                            SolveOutcome::OccurCheckFailure => "occur-check failure".into(),
                        };
                    json!({
                        "schema_version": 1,
                        "algorithm": algo.to_string(),
                        "outcome": "semi-solved",
                        "final": state.to_string(),
                        "residue": residue,
                    })
                }
            },
        };
        if set_out(out, v.to_string()) {
            OCCHECK_OK
        } else {
            OCCHECK_ERR_INTERNAL
        }
    })
}

/// Explores the derivation tree for a query and verifies every unification
/// it could attempt, as JSON: `{"ocf_up_to_bound": bool,
/// "weakly_ocf_up_to_bound": bool, "undecided": n, "success_leaves": n,
/// "floundered_leaves": n, "nodes_visited": n, "truncated": bool}`.
///
/// `query` may be NULL to use the file's first query. `rule` is
/// `"leftmost"`, `"rightmost"`, `"random:SEED"`, or `"moding"`.
/// `max_depth`/`max_nodes` of 0 select the defaults (64 and 10000).
///
/// # Safety
/// `src` must be a live handle; `out` must be a valid pointer; `query` may
/// be NULL. Release `*out` with [`occheck_string_free`].
#[no_mangle]
pub unsafe extern "C" fn occheck_verify_tree(
    src: *const OccheckSource,
    query: *const c_char,
    rule: *const c_char,
    max_depth: c_uint,
    max_nodes: c_uint,
    out: *mut *mut c_char,
) -> c_int {
    if out.is_null() {
        return OCCHECK_ERR_NULL_ARGUMENT;
    }
    *out = ptr::null_mut();
    guarded(out, || {
        if src.is_null() {
            return fail(out, OCCHECK_ERR_NULL_ARGUMENT, "source is NULL");
        }
        let src = &*src;
        let rule_name = match read_str(rule, out) {
            Ok(t) => t,
            Err(code) => return code,
        };
        let rule = match parse_rule(rule_name, &src.file) {
            Ok(r) => r,
            Err(e) => return fail(out, OCCHECK_ERR_UNSUPPORTED, &e),
        };
        let q = match resolve_query(src, query, out) {
            Ok(q) => q,
            Err(code) => return code,
        };
        let verdict = verify_tree(
            &src.file.program,
            &q,
            &rule,
            &explore_limits(max_depth, max_nodes),
            &DecideLimits::default(),
        );
        let v = json!({
            "schema_version": 1,
            "query": q.to_string(),
            "rule": rule_name,
            "ocf_up_to_bound": verdict.ocf_up_to_bound,
            "weakly_ocf_up_to_bound": verdict.weakly_ocf_up_to_bound,
            "undecided": verdict.undecided,
            "success_leaves": verdict.success_leaves,
            "floundered_leaves": verdict.floundered_leaves,
            "nodes_visited": verdict.nodes_visited,
            "truncated": verdict.truncated,
        });
        if set_out(out, v.to_string()) {
            OCCHECK_OK
        } else {
            OCCHECK_ERR_INTERNAL
        }
    })
}

/// Collects the computed answers of a query, as JSON: `{"answers": [...],
/// "floundered_leaves": n, "truncated": bool}`.
///
/// Arguments follow [`occheck_verify_tree`].
///
/// # Safety
/// `src` must be a live handle; `out` must be a valid pointer; `query` may
/// be NULL. Release `*out` with [`occheck_string_free`].
#[no_mangle]
pub unsafe extern "C" fn occheck_answers(
    src: *const OccheckSource,
    query: *const c_char,
    rule: *const c_char,
    max_depth: c_uint,
    max_nodes: c_uint,
    out: *mut *mut c_char,
) -> c_int {
    if out.is_null() {
        return OCCHECK_ERR_NULL_ARGUMENT;
    }
    *out = ptr::null_mut();
    guarded(out, || {
        if src.is_null() {
            return fail(out, OCCHECK_ERR_NULL_ARGUMENT, "source is NULL");
        }
        let src = &*src;
        let rule_name = match read_str(rule, out) {
            Ok(t) => t,
            Err(code) => return code,
        };
        let rule = match parse_rule(rule_name, &src.file) {
            Ok(r) => r,
            Err(e) => return fail(out, OCCHECK_ERR_UNSUPPORTED, &e),
        };
        let q = match resolve_query(src, query, out) {
            Ok(q) => q,
            Err(code) => return code,
        };
        let set = answers(
            &src.file.program,
            &q,
            &rule,
            &explore_limits(max_depth, max_nodes),
        );
        let v = json!({
            "schema_version": 1,
            "query": q.to_string(),
            "answers": set.answers.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
            "floundered_leaves": set.floundered_leaves,
            "truncated": set.truncated,
        });
        if set_out(out, v.to_string()) {
            OCCHECK_OK
        } else {
            OCCHECK_ERR_INTERNAL
        }
    })
}

fn explore_limits(max_depth: c_uint, max_nodes: c_uint) -> ExploreLimits {
    let defaults = ExploreLimits::default();
    ExploreLimits {
        max_depth: if max_depth == 0 {
            defaults.max_depth
        } else {
            max_depth as usize
        },
        max_nodes: if max_nodes == 0 {
            defaults.max_nodes
        } else {
            max_nodes as usize
        },
    }
}
