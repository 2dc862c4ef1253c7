//! Exercises the C entry points from Rust, including the error paths a C
//! caller can hit.

use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::ptr;

use occheck_capi::*;
use serde_json::Value;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

/// Copies and frees a string returned by the library.
fn take_string(p: *mut c_char) -> String {
    assert!(!p.is_null(), "expected an output string");
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string();
    unsafe { occheck_string_free(p) };
    s
}

fn take_json(p: *mut c_char) -> Value {
    serde_json::from_str(&take_string(p)).unwrap()
}

fn parse_source(text: &str) -> *mut OccheckSource {
    let text = cstr(text);
    let mut src = ptr::null_mut();
    let mut err = ptr::null_mut();
    let code = unsafe { occheck_source_parse(text.as_ptr(), &mut src, &mut err) };
    assert_eq!(code, OCCHECK_OK, "parse failed: {}", take_string(err));
    assert!(err.is_null());
    src
}

#[test]
fn version_is_a_static_semver_string() {
    let v = unsafe { CStr::from_ptr(occheck_version()) }
        .to_str()
        .unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn analyze_reports_the_applied_routes() {
    let src = parse_source(occheck::corpus::find("flatten").unwrap().source);
    let mut out = ptr::null_mut();
    let code = unsafe { occheck_analyze(src, &mut out) };
    assert_eq!(code, OCCHECK_OK);
    let v = take_json(out);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["established"], true);
    let applied: Vec<&str> = v["applied"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_str().unwrap())
        .collect();
    assert_eq!(applied, ["tidy-any-rule", "weakly-linear-compatible"]);
    assert_eq!(v["routes"].as_array().unwrap().len(), 4);
    unsafe { occheck_source_free(src) };
}

#[test]
fn parse_errors_carry_a_diagnostic() {
    let text = cstr("p(.");
    let mut src = ptr::null_mut();
    let mut err = ptr::null_mut();
    let code = unsafe { occheck_source_parse(text.as_ptr(), &mut src, &mut err) };
    assert_eq!(code, OCCHECK_ERR_PARSE);
    assert!(src.is_null());
    let v = take_json(err);
    assert!(!v["error"].as_str().unwrap().is_empty());
}

#[test]
fn parse_tolerates_a_null_error_slot() {
    let text = cstr("p(.");
    let mut src = ptr::null_mut();
    let code = unsafe { occheck_source_parse(text.as_ptr(), &mut src, ptr::null_mut()) };
    assert_eq!(code, OCCHECK_ERR_PARSE);
    assert!(src.is_null());
}

#[test]
fn null_arguments_are_rejected() {
    let mut src = ptr::null_mut();
    let mut err = ptr::null_mut();
    let code = unsafe { occheck_source_parse(ptr::null(), &mut src, &mut err) };
    assert_eq!(code, OCCHECK_ERR_NULL_ARGUMENT);
    take_string(err);

    let mut out = ptr::null_mut();
    let code = unsafe { occheck_analyze(ptr::null(), &mut out) };
    assert_eq!(code, OCCHECK_ERR_NULL_ARGUMENT);
    take_string(out);

    let eqs = cstr("X = a.");
    let code = unsafe { occheck_decide(eqs.as_ptr(), 0, ptr::null_mut()) };
    assert_eq!(code, OCCHECK_ERR_NULL_ARGUMENT);
}

#[test]
fn non_utf8_input_is_rejected() {
    let bytes: [c_char; 2] = [-1, 0];
    let mut out = ptr::null_mut();
    let code = unsafe { occheck_decide(bytes.as_ptr(), 0, &mut out) };
    assert_eq!(code, OCCHECK_ERR_INVALID_UTF8);
    take_string(out);
}

#[test]
fn decide_classifies_the_direct_cycle() {
    let eqs = cstr("X = f(X).");
    let mut out = ptr::null_mut();
    let code = unsafe { occheck_decide(eqs.as_ptr(), 0, &mut out) };
    assert_eq!(code, OCCHECK_OK);
    let v = take_json(out);
    assert_eq!(v["nsto"], false);
    assert_eq!(v["wnsto"], false);
    assert!(v["states_explored"].as_u64().unwrap() >= 1);
}

#[test]
fn decide_reports_budget_exhaustion() {
    let eqs = cstr("X = f(Y), Y = g(Z), Z = a.");
    let mut out = ptr::null_mut();
    let code = unsafe { occheck_decide(eqs.as_ptr(), 1, &mut out) };
    assert_eq!(code, OCCHECK_ERR_BUDGET);
    let v = take_json(out);
    assert!(v["error"].as_str().unwrap().contains("budget"));
}

#[test]
fn unify_with_occur_check_reaches_a_solved_form() {
    let eqs = cstr("f(X,b) = f(a,Y).");
    let mut out = ptr::null_mut();
    let code = unsafe { occheck_unify(eqs.as_ptr(), 1, &mut out) };
    assert_eq!(code, OCCHECK_OK);
    let v = take_json(out);
    assert_eq!(v["algorithm"], "mma");
    assert_eq!(v["outcome"], "solved");
    assert_eq!(v["mgu"], "{X/a, Y/b}");
}

#[test]
fn unify_with_occur_check_halts_on_the_cycle() {
    let eqs = cstr("X = f(X).");
    let mut out = ptr::null_mut();
    let code = unsafe { occheck_unify(eqs.as_ptr(), 1, &mut out) };
    assert_eq!(code, OCCHECK_OK);
    let v = take_json(out);
    assert_eq!(v["outcome"], "occur-check");
}

#[test]
fn unify_without_occur_check_leaves_the_cycle_in_the_residue() {
    let eqs = cstr("X = f(X).");
    let mut out = ptr::null_mut();
    let code = unsafe { occheck_unify(eqs.as_ptr(), 0, &mut out) };
    assert_eq!(code, OCCHECK_OK);
    let v = take_json(out);
    assert_eq!(v["algorithm"], "mma-minus");
    assert_eq!(v["outcome"], "semi-solved");
    assert_eq!(v["residue"], "occur-check failure");
}

#[test]
fn unify_reports_clashes() {
    let eqs = cstr("a = b.");
    let mut out = ptr::null_mut();
    let code = unsafe { occheck_unify(eqs.as_ptr(), 1, &mut out) };
    assert_eq!(code, OCCHECK_OK);
    assert_eq!(take_json(out)["outcome"], "clash");
}

#[test]
fn verify_tree_flags_the_circular_program() {
    let src = parse_source(occheck::corpus::find("p_xx").unwrap().source);
    let rule = cstr("leftmost");
    let mut out = ptr::null_mut();
    let code = unsafe { occheck_verify_tree(src, ptr::null(), rule.as_ptr(), 0, 0, &mut out) };
    assert_eq!(code, OCCHECK_OK);
    let v = take_json(out);
    assert_eq!(v["weakly_ocf_up_to_bound"], false);
    assert_eq!(v["ocf_up_to_bound"], false);
    unsafe { occheck_source_free(src) };
}

#[test]
fn answers_collects_the_file_query_solutions() {
    let src = parse_source(occheck::corpus::find("flatten").unwrap().source);
    let rule = cstr("leftmost");
    let mut out = ptr::null_mut();
    let code = unsafe { occheck_answers(src, ptr::null(), rule.as_ptr(), 0, 0, &mut out) };
    assert_eq!(code, OCCHECK_OK);
    let v = take_json(out);
    let answers: Vec<&str> = v["answers"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_str().unwrap())
        .collect();
    assert_eq!(answers, ["flatten([a,[b]],[a,b])"]);
    assert_eq!(v["truncated"], false);
    unsafe { occheck_source_free(src) };
}

#[test]
fn answers_accepts_an_explicit_query_and_rule() {
    let src = parse_source(occheck::corpus::find("flatten").unwrap().source);
    let query = cstr("flatten([],L).");
    let rule = cstr("random:7");
    let mut out = ptr::null_mut();
    let code = unsafe { occheck_answers(src, query.as_ptr(), rule.as_ptr(), 0, 0, &mut out) };
    assert_eq!(code, OCCHECK_OK);
    let v = take_json(out);
    assert_eq!(v["answers"].as_array().unwrap().len(), 1);
    unsafe { occheck_source_free(src) };
}

#[test]
fn unknown_selection_rules_are_rejected() {
    let src = parse_source(occheck::corpus::find("flatten").unwrap().source);
    let rule = cstr("sideways");
    let mut out = ptr::null_mut();
    let code = unsafe { occheck_verify_tree(src, ptr::null(), rule.as_ptr(), 0, 0, &mut out) };
    assert_eq!(code, OCCHECK_ERR_UNSUPPORTED);
    let v = take_json(out);
    assert!(v["error"].as_str().unwrap().contains("sideways"));
    unsafe { occheck_source_free(src) };
}

#[test]
fn queries_are_required_when_the_file_has_none() {
    let src = parse_source("p(a).\n");
    let rule = cstr("leftmost");
    let mut out = ptr::null_mut();
    let code = unsafe { occheck_answers(src, ptr::null(), rule.as_ptr(), 0, 0, &mut out) };
    assert_eq!(code, OCCHECK_ERR_UNSUPPORTED);
    take_string(out);
    unsafe { occheck_source_free(src) };
}

#[test]
fn free_functions_ignore_null() {
    unsafe {
        occheck_source_free(ptr::null_mut());
        occheck_string_free(ptr::null_mut());
    }
}
