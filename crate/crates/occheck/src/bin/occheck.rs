//! Command-line front end: file analysis, unification runs, derivation
//! trees, and mode search.

use std::error::Error;
use std::fmt::Write as _;
use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use occheck::modes::{SearchCondition, ThreeModing, Verdict, Witness};
use occheck::parser::{
    parse_equations, parse_moding, parse_program, parse_query, parse_three_moding,
};
use occheck::report::analyze_file;
use occheck::sld::{answers, verify_tree, ExploreLimits, OccurCheckHit, SelectionRule};
use occheck::unify::{
    decide_nsto_wnsto, explore, is_semi_solved, is_solved, mgu_composition, run, solve_semi_solved,
    Action, Algorithm, DecideLimits, RunOutcome, RunTrace, SolveOutcome, Strategy,
};
use occheck::{corpus, Query};

#[derive(Parser)]
#[command(
    name = "occheck",
    version,
    about = "Occur-check analysis for logic programs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report which occur-check safety routes accept a program file
    Analyze {
        /// Program file, or corpus:NAME
        file: String,
        /// Replace the file's moding, e.g. "p(+,-), q(+)"
        #[arg(long)]
        mode_override: Option<String>,
        /// Replace the file's secondary moding
        #[arg(long)]
        mode2_override: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Rewrite an equation set and report its occur-check verdicts
    Unify {
        /// Equations inline ("X = f(Y), Y = a") or a file containing them
        input: String,
        /// mma (with occur-check) or mma-minus (without)
        #[arg(long, default_value = "mma")]
        algo: String,
        /// Pick steps from a seeded generator instead of canonically
        #[arg(long)]
        seed: Option<u64>,
        /// Print every state and action of the run
        #[arg(long)]
        trace: bool,
        /// Enumerate all reachable states, not just one run
        #[arg(long)]
        enumerate: bool,
        #[arg(long)]
        json: bool,
    },
    /// Build a bounded derivation tree and verify its unifications
    Derive {
        /// Program file, or corpus:NAME
        file: String,
        /// Query to derive (defaults to the first query in the file)
        #[arg(long)]
        query: Option<String>,
        /// leftmost, rightmost, random:SEED, or moding
        #[arg(long, default_value = "leftmost")]
        rule: String,
        /// Maximum derivation depth
        #[arg(long, default_value_t = 64)]
        depth: usize,
        /// Maximum number of tree nodes
        #[arg(long, default_value_t = 10_000)]
        nodes: usize,
        /// Exit nonzero unless the tree passes: nsto or wnsto
        #[arg(long)]
        check: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Enumerate modings under which a file satisfies a condition
    Modesearch {
        /// Program file, or corpus:NAME
        file: String,
        /// tidy, nicely, well3, or weakly-tidy
        #[arg(long, default_value = "tidy")]
        condition: String,
        /// Refuse searches with more than 2^N candidate modings
        #[arg(long, default_value_t = 16)]
        max_positions: u32,
        #[arg(long)]
        json: bool,
    },
    /// List the bundled example programs, or print one
    Corpus { name: Option<String> },
}

fn main() -> ExitCode {
    // Die quietly when a downstream pager or head closes the pipe.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

type Fallible<T> = Result<T, Box<dyn Error>>;

fn dispatch(cli: Cli) -> Fallible<ExitCode> {
    match cli.command {
        Command::Analyze {
            file,
            mode_override,
            mode2_override,
            json,
        } => cmd_analyze(&file, mode_override, mode2_override, json),
        Command::Unify {
            input,
            algo,
            seed,
            trace,
            enumerate,
            json,
        } => cmd_unify(&input, &algo, seed, trace, enumerate, json),
        Command::Derive {
            file,
            query,
            rule,
            depth,
            nodes,
            check,
            json,
        } => cmd_derive(&file, query, &rule, depth, nodes, check, json),
        Command::Modesearch {
            file,
            condition,
            max_positions,
            json,
        } => cmd_modesearch(&file, &condition, max_positions, json),
        Command::Corpus { name } => cmd_corpus(name),
    }
}

/// Resolves `corpus:NAME` entries and plain paths to (display name, text).
fn load_source(arg: &str) -> Fallible<(String, String)> {
    if let Some(name) = arg.strip_prefix("corpus:") {
        let entry = corpus::find(name)
            .ok_or_else(|| format!("no corpus entry named '{name}'; run `occheck corpus`"))?;
        return Ok((arg.to_string(), entry.source.to_string()));
    }
    let text = std::fs::read_to_string(arg).map_err(|e| format!("{arg}: {e}"))?;
    Ok((arg.to_string(), text))
}

/// State budget for occur-check decisions, overridable via OCCHECK_BUDGET.
fn decide_limits() -> Fallible<DecideLimits> {
    match std::env::var("OCCHECK_BUDGET") {
        Err(_) => Ok(DecideLimits::default()),
        Ok(s) => {
            let max_states = s
                .parse()
                .map_err(|_| format!("OCCHECK_BUDGET must be a positive integer, got '{s}'"))?;
            Ok(DecideLimits { max_states })
        }
    }
}

fn witness_suffix(w: &Witness) -> String {
    let mut locators = Vec::new();
    if let Some(c) = w.clause {
        locators.push(format!("clause {c}"));
    }
    if let Some(q) = w.query {
        locators.push(format!("query {q}"));
    }
    if let Some(v) = &w.variable {
        locators.push(format!("variable {v}"));
    }
    if locators.is_empty() {
        format!(" ({})", w.detail)
    } else {
        format!(" ({}: {})", locators.join(", "), w.detail)
    }
}

fn verdict_text(v: Verdict) -> &'static str {
    match v {
        Verdict::Holds => "holds",
        Verdict::Fails => "fails",
        Verdict::NotApplicable => "not applicable",
    }
}

fn cmd_analyze(
    file: &str,
    mode_override: Option<String>,
    mode2_override: Option<String>,
    json: bool,
) -> Fallible<ExitCode> {
    let (name, text) = load_source(file)?;
    let mut parsed = parse_program(&text)?;
    if let Some(spec) = mode_override {
        parsed.moding = parse_three_moding(&spec)?;
    }
    if let Some(spec) = mode2_override {
        parsed.moding2 = parse_moding(&spec)?;
    }
    let report = analyze_file(&parsed);
    let established = report.any_applies();

    if json {
        let v = json!({
            "schema_version": 1,
            "command": "analyze",
            "source": name,
            "moding": parsed.moding.to_string(),
            "moding2": if parsed.moding2.is_empty() { None } else { Some(parsed.moding2.to_string()) },
            "queries": parsed.queries.iter().map(|q| q.to_string()).collect::<Vec<_>>(),
            "routes": serde_json::to_value(&report.routes)?,
            "applied": report.labels(),
            "established": established,
        });
        println!("{}", serde_json::to_string_pretty(&v)?);
    } else {
        println!("source: {name}");
        println!("moding: {}", parsed.moding);
        if !parsed.moding2.is_empty() {
            println!("secondary moding: {}", parsed.moding2);
        }
        for (i, q) in parsed.queries.iter().enumerate() {
            println!("query {i}: {q}");
        }
        println!();
        for route in &report.routes {
            match route.guarantee {
                Some(g) => println!(
                    "{}: {} ({})",
                    route.route,
                    verdict_text(route.verdict),
                    g.describe()
                ),
                None => println!("{}: {}", route.route, verdict_text(route.verdict)),
            }
            for c in &route.conditions {
                if !c.holds() {
                    let suffix = c.witness.as_ref().map(witness_suffix).unwrap_or_default();
                    println!("  - {}: {}{}", c.condition, verdict_text(c.verdict), suffix);
                }
            }
        }
        println!();
        if established {
            println!("established: {}", report.labels().join(", "));
        } else {
            println!("established: none");
        }
    }
    Ok(if established {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn trace_json(trace: &RunTrace) -> serde_json::Value {
    json!({
        "steps": trace.steps.iter().map(|s| json!({
            "state": s.state.to_string(),
            "action": s.action.to_string(),
            "target": s.target.to_string(),
        })).collect::<Vec<_>>(),
        "outcome": match &trace.outcome {
            RunOutcome::Final(_) => "final",
            RunOutcome::Clash => "clash",
            RunOutcome::OccurCheckFailure => "occur-check",
        },
        "final": trace.final_state().map(|s| s.to_string()),
    })
}

fn indented(text: &str, prefix: &str) -> String {
    let mut out = String::new();
    for line in text.lines() {
        let _ = writeln!(out, "{prefix}{line}");
    }
    out
}

fn cmd_unify(
    input: &str,
    algo: &str,
    seed: Option<u64>,
    trace_flag: bool,
    enumerate: bool,
    json: bool,
) -> Fallible<ExitCode> {
    let text = if Path::new(input).exists() {
        std::fs::read_to_string(input)?
    } else {
        let mut t = input.trim().to_string();
        if !t.ends_with('.') {
            t.push('.');
        }
        t
    };
    let set = parse_equations(&text)?;
    let algorithm: Algorithm = algo.parse()?;
    let strategy = seed.map_or(Strategy::Canonical, Strategy::Seeded);
    let trace = run(&set, algorithm, strategy);

    let limits = decide_limits()?;
    let decision = decide_nsto_wnsto(&set, &limits);
    let enumeration = enumerate
        .then(|| explore(&set, algorithm, &limits))
        .transpose()
        .ok()
        .flatten();

    // Residue of a successful run: the unifier for the full system, the
    // outcome of solving the semi-solved form for the reduced one.
    let mut mgu = None;
    let mut eliminations = Vec::new();
    let mut residue = None;
    if let Some(final_state) = trace.final_state() {
        if algorithm == Algorithm::Mma && is_solved(final_state) {
            let c = mgu_composition(&trace).expect("successful full-system run");
            mgu = Some(c.theta.to_string());
            eliminations = c.eliminations.iter().map(|g| g.to_string()).collect();
        }
        if algorithm == Algorithm::MmaMinus && is_semi_solved(final_state) {
            residue = Some(match solve_semi_solved(final_state).expect("semi-solved") {
                SolveOutcome::Mgu(s) => format!("mgu {s}"),
                SolveOutcome::OccurCheckFailure => "occur-check failure".to_string(),
            });
        }
    }

    if json {
        let v = json!({
            "schema_version": 1,
            "command": "unify",
            "equations": set.to_string(),
            "algorithm": algorithm.to_string(),
            "seed": seed,
            "run": trace_json(&trace),
            "mgu": mgu,
            "eliminations": eliminations,
            "residue": residue,
            "enumeration": enumeration.as_ref().map(|g| json!({
                "states": g.nodes.len(),
                "finals": g.final_states().map(|s| s.to_string()).collect::<Vec<_>>(),
                "clash_reachable": g.any_step(Action::Clash),
                "occur_check_reachable": g.any_step(Action::OccurCheck),
            })),
            "nsto": decision.as_ref().ok().map(|r| r.nsto),
            "wnsto": decision.as_ref().ok().map(|r| r.wnsto),
            "states_explored": decision.as_ref().ok().map(|r| r.states_explored),
            "decision_error": decision.as_ref().err().map(|e| e.to_string()),
        });
        println!("{}", serde_json::to_string_pretty(&v)?);
        return Ok(ExitCode::SUCCESS);
    }

    println!("equations: {set}");
    println!("algorithm: {algorithm}");
    if let Some(s) = seed {
        println!("strategy: seeded {s}");
    }
    if trace_flag {
        println!();
        print!("{trace}");
        println!();
    }
    match &trace.outcome {
        RunOutcome::Final(f) if f.is_empty() => println!("outcome: solved form (empty)"),
        RunOutcome::Final(f) => {
            let form = if is_solved(f) {
                "solved form"
            } else {
                "semi-solved form"
            };
            println!("outcome: {form} {f}");
        }
        RunOutcome::Clash => println!("outcome: failure (clash)"),
        RunOutcome::OccurCheckFailure => println!("outcome: failure (occur-check)"),
    }
    if let Some(m) = &mgu {
        println!("mgu: {m}");
        if !eliminations.is_empty() {
            println!("eliminations: {}", eliminations.join(" then "));
        }
    }
    if let Some(r) = &residue {
        println!("residue: {r}");
    }
    if let Some(g) = &enumeration {
        println!();
        println!("reachable states: {}", g.nodes.len());
        let finals: Vec<String> = g.final_states().map(|s| s.to_string()).collect();
        println!("final states ({}):", finals.len());
        for f in finals {
            println!("  {}", if f.is_empty() { "(empty)" } else { &f });
        }
        println!(
            "clash reachable: {}",
            if g.any_step(Action::Clash) {
                "yes"
            } else {
                "no"
            }
        );
        if algorithm == Algorithm::Mma {
            println!(
                "occur-check reachable: {}",
                if g.any_step(Action::OccurCheck) {
                    "yes"
                } else {
                    "no"
                }
            );
        }
    }
    match &decision {
        Ok(r) => {
            println!("nsto: {}", if r.nsto { "yes" } else { "no" });
            println!("wnsto: {}", if r.wnsto { "yes" } else { "no" });
        }
        Err(e) => {
            println!("nsto: unknown ({e})");
            println!("wnsto: unknown ({e})");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_rule(s: &str, moding: &ThreeModing) -> Fallible<SelectionRule> {
    match s {
        "leftmost" => Ok(SelectionRule::Leftmost),
        "rightmost" => Ok(SelectionRule::Rightmost),
        "moding" => {
            if moding.is_empty() {
                return Err("the moding rule needs a mode directive in the file".into());
            }
            Ok(SelectionRule::ModingCompatible(moding.clone()))
        }
        _ => {
            if let Some(seed) = s.strip_prefix("random:") {
                let seed = seed
                    .parse()
                    .map_err(|_| format!("bad seed in rule '{s}'"))?;
                return Ok(SelectionRule::Random(seed));
            }
            Err(
                format!("unknown rule '{s}', expected leftmost, rightmost, random:SEED, or moding")
                    .into(),
            )
        }
    }
}

fn hit_json(hit: &OccurCheckHit) -> serde_json::Value {
    json!({
        "goal": hit.query.to_string(),
        "selected": hit.selected,
        "clause": hit.clause_index,
        "witness": trace_json(&hit.witness),
    })
}

fn print_hit(kind: &str, hit: &OccurCheckHit) {
    println!("{kind}:");
    println!("  goal: {}", hit.query);
    println!(
        "  selected atom {}: {}",
        hit.selected, hit.query.atoms[hit.selected]
    );
    println!("  clause: {}", hit.clause_index);
    println!("  witness run:");
    print!("{}", indented(&hit.witness.to_string(), "    "));
}

fn cmd_derive(
    file: &str,
    query: Option<String>,
    rule: &str,
    depth: usize,
    nodes: usize,
    check: Option<String>,
    json: bool,
) -> Fallible<ExitCode> {
    let (name, text) = load_source(file)?;
    let parsed = parse_program(&text)?;
    let q: Query = match query {
        Some(s) => parse_query(&s)?,
        None => parsed
            .queries
            .first()
            .cloned()
            .ok_or("the file has no query; pass --query")?,
    };
    let rule = parse_rule(rule, &parsed.moding)?;
    let limits = ExploreLimits {
        max_depth: depth,
        max_nodes: nodes,
    };
    let verdict = verify_tree(&parsed.program, &q, &rule, &limits, &decide_limits()?);
    let ans = answers(&parsed.program, &q, &rule, &limits);

    let passed = match check.as_deref() {
        None => true,
        Some("nsto") => verdict.ocf_up_to_bound,
        Some("wnsto") => verdict.weakly_ocf_up_to_bound,
        Some(other) => {
            return Err(format!("unknown check '{other}', expected nsto or wnsto").into())
        }
    };

    if json {
        let v = json!({
            "schema_version": 1,
            "command": "derive",
            "source": name,
            "query": q.to_string(),
            "rule": rule_name(&rule),
            "limits": { "depth": depth, "nodes": nodes },
            "explored": {
                "nodes": verdict.nodes_visited,
                "truncated": verdict.truncated,
                "success_leaves": verdict.success_leaves,
                "floundered_leaves": verdict.floundered_leaves,
            },
            "answers": ans.answers.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
            "ocf_up_to_bound": verdict.ocf_up_to_bound,
            "weakly_ocf_up_to_bound": verdict.weakly_ocf_up_to_bound,
            "undecided": verdict.undecided,
            "counterexample": verdict.counterexample.as_ref().map(hit_json),
            "weak_counterexample": verdict.weak_counterexample.as_ref().map(hit_json),
            "check_passed": check.as_deref().map(|_| passed),
        });
        println!("{}", serde_json::to_string_pretty(&v)?);
    } else {
        println!("source: {name}");
        println!("query: {q}");
        println!("rule: {}", rule_name(&rule));
        println!(
            "explored: {} nodes (truncated: {})",
            verdict.nodes_visited,
            if verdict.truncated { "yes" } else { "no" }
        );
        println!("success leaves: {}", verdict.success_leaves);
        println!("floundered leaves: {}", verdict.floundered_leaves);
        println!("answers ({}):", ans.answers.len());
        for a in &ans.answers {
            println!("  {a}");
        }
        println!();
        if verdict.ocf_up_to_bound {
            println!("occur-check verdict: safe (every attempted unification is NSTO)");
        } else if verdict.weakly_ocf_up_to_bound {
            println!("occur-check verdict: weakly safe (every attempted unification is WNSTO, some is not NSTO)");
        } else {
            println!("occur-check verdict: unsafe (some attempted unification is not WNSTO)");
        }
        if verdict.undecided > 0 {
            println!(
                "undecided unifications at the state budget: {}",
                verdict.undecided
            );
        }
        if let Some(hit) = &verdict.counterexample {
            print_hit("not NSTO", hit);
        }
        if let Some(hit) = &verdict.weak_counterexample {
            print_hit("not WNSTO", hit);
        }
    }
    Ok(if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn rule_name(rule: &SelectionRule) -> String {
    match rule {
        SelectionRule::Leftmost => "leftmost".to_string(),
        SelectionRule::Rightmost => "rightmost".to_string(),
        SelectionRule::Random(seed) => format!("random:{seed}"),
        SelectionRule::ModingCompatible(_) => "moding".to_string(),
    }
}

fn cmd_modesearch(
    file: &str,
    condition: &str,
    max_positions: u32,
    json: bool,
) -> Fallible<ExitCode> {
    let (name, text) = load_source(file)?;
    let parsed = parse_program(&text)?;
    let cond = match condition {
        "tidy" => SearchCondition::Tidy,
        "nicely" => SearchCondition::NicelyModed,
        "well3" => SearchCondition::Well3Moded,
        "weakly-tidy" => SearchCondition::WeaklyTidy,
        other => {
            return Err(format!(
                "unknown condition '{other}', expected tidy, nicely, well3, or weakly-tidy"
            )
            .into())
        }
    };
    let found = occheck::modes::mode_search(&parsed.program, &parsed.queries, cond, max_positions)?;

    if json {
        let v = json!({
            "schema_version": 1,
            "command": "modesearch",
            "source": name,
            "condition": cond.name(),
            "matches": found.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
        });
        println!("{}", serde_json::to_string_pretty(&v)?);
    } else {
        println!("source: {name}");
        println!("condition: {}", cond.name());
        println!("matches ({}):", found.len());
        for a in &found {
            println!("  {a}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_corpus(name: Option<String>) -> Fallible<ExitCode> {
    match name {
        None => {
            for e in corpus::ENTRIES {
                println!("{:<14} {}", e.name, e.description);
            }
        }
        Some(n) => {
            let entry = corpus::find(&n)
                .ok_or_else(|| format!("no corpus entry named '{n}'; run `occheck corpus`"))?;
            print!("{}", entry.source);
        }
    }
    Ok(ExitCode::SUCCESS)
}
