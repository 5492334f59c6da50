//! Golden tests for the command line. `UPDATE_GOLDENS=1` rewrites the
//! expected outputs.

use std::path::PathBuf;

use tx10_cli::main_with;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("tx10").chain(args.iter().copied());
    let code = main_with(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn golden(name: &str, args: &[&str], expect_code: i32) -> String {
    let (code, out, err) = run(args);
    assert_eq!(
        code, expect_code,
        "{args:?}\nstdout:\n{out}\nstderr:\n{err}"
    );
    let (_, again, _) = run(args);
    assert_eq!(out, again, "output differs between two runs");
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    if std::env::var_os("UPDATE_GOLDENS").is_some() {
        std::fs::write(&path, &out).unwrap();
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(out, want, "{name} differs from its golden file");
    out
}

const SKIP: &str = "tests/programs/skip.tx10";
const OBJECTS: &str = "tests/programs/objects.tx10";
const EXAMPLE1: &str = "tests/programs/example1.tx10";
const THROW_REMOTE: &str = "tests/programs/throw_remote.tx10";

#[test]
fn run_skip_prints_the_final_heap() {
    let out = golden("run_skip.out", &["run", SKIP], 0);
    assert!(out.ends_with("result=done steps=2 label=ok heap=0[] 1[] 2[]\n"));
}

#[test]
fn run_with_random_scheduler_as_json() {
    let out = golden(
        "run_objects_seed3.jsonl",
        &[
            "run", OBJECTS, "--policy", "random", "--seed", "3", "--json",
        ],
        0,
    );
    for l in out.lines() {
        let v: serde_json::Value = serde_json::from_str(l).unwrap();
        assert!(v.is_object());
    }
}

#[test]
fn run_with_a_scheduled_failure() {
    let out = golden(
        "run_objects_fail.out",
        &["run", OBJECTS, "--fail-at", "4:1"],
        0,
    );
    assert!(out.contains("inject=1"));
}

#[test]
fn explore_reports_the_finals() {
    golden(
        "explore_objects.out",
        &["explore", OBJECTS, "--max-failures", "1"],
        0,
    );
}

#[test]
fn emp_holds_for_a_throw_at_a_place_that_fails() {
    let out = golden(
        "check_emp.out",
        &[
            "check",
            THROW_REMOTE,
            "--props",
            "emp",
            "--max-failures",
            "1",
        ],
        0,
    );
    assert!(out.contains("check=emp verdict=pass"));
}

#[test]
fn all_checks_pass_on_a_resilient_program() {
    golden(
        "check_all.out",
        &[
            "check",
            OBJECTS,
            "--props",
            "all",
            "--max-failures",
            "1",
            "--json",
        ],
        0,
    );
}

#[test]
fn hb_relation_and_comparison() {
    golden("hb_objects.out", &["hb", OBJECTS], 0);
    let out = golden("hb_example1_compare.out", &["hb", EXAMPLE1, "--compare"], 0);
    assert!(out.contains("hbi verdict=equal"));
}

#[test]
fn bisim_of_throw_absorbing_skip() {
    let out = golden(
        "bisim_law3.out",
        &[
            "bisim",
            "tests/programs/law3_lhs.tx10",
            "tests/programs/law3_rhs.tx10",
        ],
        0,
    );
    assert!(out.contains("BisimilarUpTo(8)"));
}

#[test]
fn bisim_distinguishes_two_throws_from_one() {
    let out = golden(
        "bisim_twice.out",
        &[
            "bisim",
            "tests/programs/twice_lhs.tx10",
            "tests/programs/twice_rhs.tx10",
        ],
        1,
    );
    assert!(out.contains("Distinguished"));
}

#[test]
fn selected_laws_as_json() {
    let out = golden(
        "laws_selected.jsonl",
        &[
            "laws",
            "--law",
            "seq-skip-left,spawned-throw-twice,r-at-seq",
            "--depth",
            "4",
            "--json",
        ],
        0,
    );
    assert!(out.lines().last().unwrap().contains("\"mismatches\":0"));
}

#[test]
fn usage_and_input_errors_exit_2() {
    for args in [
        vec!["run", "tests/programs/bad_place.tx10"],
        vec!["run", "tests/programs/bad_syntax.tx10"],
        vec!["run", "tests/programs/missing.tx10"],
        vec!["run"],
        vec!["frobnicate"],
        vec!["check", SKIP, "--props", "no-such-check"],
        vec!["run", SKIP, "--fail-places", "0", "--max-failures", "1"],
        vec!["run", SKIP, "--fail-at", "x:1"],
        vec!["run", SKIP, "--places", "0"],
        vec!["run", SKIP, "--semantics", "tx10", "--max-failures", "1"],
        vec!["laws", "--law", "no-such-law"],
    ] {
        let (code, _, err) = run(&args);
        assert_eq!(code, 2, "{args:?}");
        assert!(!err.is_empty(), "{args:?}");
    }
}

#[test]
fn place_ids_are_checked_against_places() {
    let (code, _, err) = run(&["run", EXAMPLE1, "--places", "2"]);
    assert_eq!(code, 2);
    assert!(err.contains("place 2 out of range"));
    let (code, _, _) = run(&["run", EXAMPLE1, "--places", "3"]);
    assert_eq!(code, 0);
}

#[test]
fn help_exits_0() {
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("bisim"));
}
