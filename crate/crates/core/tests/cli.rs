//! The `dbcat` command line, driven through `cli::run`.

use std::fs;
use std::path::{Path, PathBuf};

use dbcat::cli::run;

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).display().to_string()
}

fn dbcat(args: &[&str]) -> (i32, String) {
    run(std::iter::once("dbcat").chain(args.iter().copied()))
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let p: PathBuf = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn closure_of_the_empty_instance_is_bottom() {
    let (code, out) = dbcat(&["--max-arity", "1", "closure", "--db", &fixture("bot.dbi")]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(out.lines().count(), 1);
    assert!(out.starts_with("arity=0 tuples="), "{out}");
}

#[test]
fn closure_lists_every_view() {
    let (code, out) = dbcat(&["closure", "--db", &fixture("small.dbi")]);
    assert_eq!(code, 0, "{out}");
    // every unary and binary relation over {a, b}, plus bottom
    assert_eq!(out.lines().count(), 4 + 16 - 1, "{out}");
    let (code, out) = dbcat(&["--max-arity", "1", "closure", "--db", &fixture("small.dbi")]);
    assert_eq!(code, 1);
    assert!(out.starts_with("ERROR BoundTooSmall: "), "{out}");
}

#[test]
fn solves_the_guarded_system() {
    let (code, out) = dbcat(&["solve", "--db", &fixture("cq.dbi"), "--eqs", &fixture("cq.eq"), "--var", "X1"]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(out, "X1: arity=2 tuples=(m,q)\n");
    let (code, out) = dbcat(&["flatten", "--eqs", &fixture("cq.eq"), "--var", "X1"]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(
        out,
        "X1: project[2,5](join[l3=r3](select[1=a](project[2,3,4](rP)),select[1=b](project[1,2,3](rQ))))\n"
    );
}

#[test]
fn eval_prints_the_view() {
    let (code, out) = dbcat(&["eval", "--db", &fixture("small.dbi"), "--query", "select[1=a](r)"]);
    assert_eq!((code, out.as_str()), (0, "arity=1 tuples=(a)\n"));
}

#[test]
fn lattice_commands() {
    let small = fixture("small.dbi");
    let sel = fixture("select_a.dbi");
    let (code, out) = dbcat(&["order", "--db", &sel, "--other", &small]);
    assert_eq!((code, out.as_str()), (0, "LEQ true\nGEQ false\n"));
    let (code, out) = dbcat(&["equiv", "--db", &small, "--other", &small]);
    assert_eq!((code, out.as_str()), (0, "EQUIV true\n"));
    let (code, out) = dbcat(&["match", "--db", &sel, "--other", &small]);
    assert_eq!(code, 0);
    // bottom, {a} and {(a,a)}
    assert_eq!(out.lines().count(), 3, "{out}");
}

#[test]
fn laws_pass_on_a_fixture_and_at_random() {
    let (code, out) = dbcat(&["laws", "--db", &fixture("small.dbi")]);
    assert_eq!(code, 0, "{out}");
    assert!(out.lines().all(|l| l.starts_with("LAW ") && l.ends_with(" PASS")), "{out}");
    let (code, out) = dbcat(&["--seed", "5", "laws", "--count", "3"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("LAW kleisli_left_unit PASS"), "{out}");
}

#[test]
fn morphism_reports_flux_and_properties() {
    let args = [
        "morphism",
        "--src",
        &fixture("small.dbi"),
        "--tgt",
        &fixture("select_a.dbi"),
        "--maps",
        &fixture("select_a.maps"),
    ];
    let (code, out) = dbcat(&args);
    assert_eq!(code, 0, "{out}");
    assert!(out.starts_with("ARROW small -> select_a\n"), "{out}");
    assert!(out.contains("EPI true\n") && out.contains("MONO false\n") && out.contains("ISO false\n"), "{out}");
    assert_eq!(dbcat(&args), (code, out), "output is deterministic");
}

#[test]
fn rewrite_outcomes() {
    let base = ["--src", &fixture("small.dbi"), "--tgt", &fixture("select_a.dbi"), "--maps", &fixture("select_a.maps")];
    let mut ok = vec!["rewrite"];
    ok.extend(base);
    ok.extend(["--query", "project[1](select[1=a](r))"]);
    let (code, out) = dbcat(&ok);
    assert_eq!(code, 0, "{out}");
    assert!(out.starts_with("REWRITTEN: "), "{out}");
    let mut refused = vec!["rewrite"];
    refused.extend(base);
    refused.extend(["--query", "e"]);
    let (code, out) = dbcat(&refused);
    assert_eq!(code, 1);
    assert!(out.starts_with("NOT-REWRITABLE\nERROR NotRewritable: "), "{out}");
}

#[test]
fn malformed_files_report_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let db = write(&dir, "bad.dbi", "domain a\nrelation r two\na\n");
    let (code, out) = dbcat(&["closure", "--db", &db]);
    assert_eq!(code, 1);
    assert!(out.starts_with("ERROR SyntaxError: "), "{out}");
    assert!(out.contains('2'), "{out}");
    let eqs = write(&dir, "bad.eq", "X := rel r\nY := union(project[1](X), X)\n");
    let (code, out) = dbcat(&["flatten", "--eqs", &eqs]);
    assert_eq!(code, 1);
    assert!(out.starts_with("ERROR SyntaxError: "), "{out}");
}

#[test]
fn domain_errors_name_their_code() {
    let dir = tempfile::tempdir().unwrap();
    let maps = write(&dir, "wrong.maps", "r => s\n");
    let (code, out) = dbcat(&["morphism", "--src", &fixture("small.dbi"), "--tgt", &fixture("select_a.dbi"), "--maps", &maps]);
    assert_eq!(code, 1);
    assert!(out.starts_with("ERROR ResultNotInTarget: "), "{out}");

    let cyc = write(&dir, "cyc.eq", "X := project[1](Y)\nY := project[1](X)\n");
    let (code, out) = dbcat(&["solve", "--db", &fixture("small.dbi"), "--eqs", &cyc]);
    assert_eq!(code, 1);
    assert!(out.starts_with("ERROR CyclicSystem: "), "{out}");

    let (code, out) = dbcat(&["eval", "--db", &fixture("small.dbi"), "--query", "nope"]);
    assert_eq!(code, 1);
    assert!(out.starts_with("ERROR UnknownRelation: "), "{out}");

    let (code, out) = dbcat(&["closure", "--db", "/nonexistent/x.dbi"]);
    assert_eq!(code, 1);
    assert!(out.starts_with("ERROR IoError: "), "{out}");

    let (code, out) = dbcat(&["--max-views", "3", "closure", "--db", &fixture("small.dbi")]);
    assert_eq!(code, 1);
    assert!(out.starts_with("ERROR "), "{out}");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(dbcat(&["frobnicate"]).0, 2);
    assert_eq!(dbcat(&["closure"]).0, 2);
    assert_eq!(dbcat(&["--max-arity", "x", "closure", "--db", "a"]).0, 2);
}
