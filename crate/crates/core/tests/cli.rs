mod common;

use std::path::Path;

use bmcq::cli::{run, QuboFile, EXIT_NO_WITNESS, EXIT_OK, EXIT_USAGE};
use common::fixture_path;
use tempfile::TempDir;

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn bmcq(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("bmcq").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Run {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn fixture(name: &str) -> String {
    fixture_path(name).to_string_lossy().into_owned()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_string_lossy().into_owned()
}

#[test]
fn counter3_has_no_witness_at_six() {
    let dir = TempDir::new().unwrap();
    let qubo = path(&dir, "c.qubo");
    assert_eq!(bmcq(&["qubot", &fixture("counter3.btor2"), "--bound", "6", "-o", &qubo]).code, EXIT_OK);
    let r = bmcq(&["solve", &qubo, "--method", "exhaustive"]);
    assert_eq!(r.code, EXIT_NO_WITNESS);
    assert!(r.out.starts_with("energy 1 "), "{}", r.out);
    assert!(r.err.contains("no witness"));
}

#[test]
fn guess4_solve_and_validate() {
    let dir = TempDir::new().unwrap();
    let (qubo, witness) = (path(&dir, "g.qubo"), path(&dir, "g.wit"));
    let model = fixture("guess4.btor2");
    assert_eq!(bmcq(&["qubot", &model, "--bound", "0", "-o", &qubo]).code, EXIT_OK);
    let r = bmcq(&["solve", &qubo, "--method", "anneal", "--seed", "1", "--restarts", "64", "-o", &witness]);
    assert_eq!(r.code, EXIT_OK, "{}{}", r.out, r.err);
    let text = std::fs::read_to_string(&witness).unwrap();
    assert!(text.contains("step 0 3=10"), "{text}");

    let v = bmcq(&["validate", &qubo, &witness, "--model", &model]);
    assert_eq!(v.code, EXIT_OK, "{}", v.err);
    assert!(v.out.contains("energy 0") && v.out.contains("agreement yes"), "{}", v.out);
    let v = bmcq(&["validate", &model, &witness]);
    assert_eq!(v.code, EXIT_OK);

    let wrong = path(&dir, "wrong.wit");
    std::fs::write(&wrong, text.replace("3=10", "3=3")).unwrap();
    let v = bmcq(&["validate", &model, &wrong]);
    assert_eq!(v.code, EXIT_NO_WITNESS);
    assert!(v.out.contains("energy 1") && v.out.contains("agreement yes"), "{}", v.out);
}

#[test]
fn anneal_requires_seed() {
    let dir = TempDir::new().unwrap();
    let qubo = path(&dir, "g.qubo");
    bmcq(&["qubot", &fixture("guess4.btor2"), "--bound", "0", "-o", &qubo]);
    let r = bmcq(&["solve", &qubo, "--method", "anneal"]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(!r.err.is_empty());
}

#[test]
fn usage_errors() {
    assert_eq!(bmcq(&["frobnicate"]).code, EXIT_USAGE);
    assert_eq!(bmcq(&["qubot", "/nonexistent/model.btor2", "--bound", "1"]).code, EXIT_USAGE);
    let dir = TempDir::new().unwrap();
    let broken = path(&dir, "broken.qubo");
    std::fs::write(&broken, "qubo vars 1 offset 0 bound 0\nlin 7 1\n").unwrap();
    let r = bmcq(&["solve", &broken]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.err.contains("line"), "{}", r.err);
}

#[test]
fn qubo_file_round_trip() {
    for (name, bound) in [("guess4", 2), ("memory4", 2), ("twobad", 4)] {
        let r = bmcq(&["qubot", &fixture(&format!("{name}.btor2")), "--bound", &bound.to_string()]);
        assert_eq!(r.code, EXIT_OK);
        let parsed = QuboFile::parse(&r.out).unwrap();
        assert_eq!(parsed.write(), r.out, "{name}");
    }
}

#[test]
fn stats_csv() {
    let r = bmcq(&["stats", &fixture("accumulator.btor2"), "--bound", "5"]);
    assert_eq!(r.code, EXIT_OK);
    let rows: Vec<Vec<usize>> = r
        .out
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 6);
    assert!(rows[1..].iter().all(|row| row[1] == rows[1][1]));
    assert!(r.out.starts_with("step,new_vars,cumulative_vars,nonconstant_pc_flags\n"));
}

#[test]
fn emulate_running_example() {
    let source = fixture("running_example.s");
    let r = bmcq(&["emulate", &source, "--input", "1"]);
    assert_eq!(r.out.trim(), "bad b8 step 37 instructions 32");
    let r = bmcq(&["emulate", &source, "--input", "0"]);
    assert_eq!(r.out.trim(), "exit 0 instructions 26 steps 31");
}

#[test]
fn emulator_witness_validates() {
    let dir = TempDir::new().unwrap();
    let witness = path(&dir, "w.txt");
    let source = fixture("divide.s");
    let r = bmcq(&["emulate", &source, "--input", "0", "--witness", &witness]);
    assert!(r.out.starts_with("bad b2 "), "{}", r.out);
    let v = bmcq(&["validate", &source, &witness]);
    assert_eq!(v.code, EXIT_OK, "{}{}", v.out, v.err);
    assert!(v.out.contains("simulator bad b2"), "{}", v.out);
}

#[test]
fn beator_output_is_stable() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (path(&dir, "a.btor2"), path(&dir, "b.btor2"));
    let source = fixture("call.s");
    assert_eq!(bmcq(&["beator", &source, "-o", &a]).code, EXIT_OK);
    assert_eq!(bmcq(&["beator", &source, "-o", &b]).code, EXIT_OK);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let listing = bmcq(&["assemble", &source]);
    assert_eq!(listing.code, EXIT_OK);
}

#[test]
fn pipeline_on_running_example() {
    let dir = TempDir::new().unwrap();
    let out_dir = path(&dir, "artifacts");
    let r = bmcq(&["pipeline", &fixture("running_example.s"), "--bound", "37", "--out-dir", &out_dir]);
    assert_eq!(r.code, EXIT_OK, "{}{}", r.out, r.err);
    assert!(r.out.contains("input bytes 49\n"), "{}", r.out);
    assert!(r.out.ends_with("validated\n"));
    for file in ["model.btor2", "model.qubo", "witness.txt"] {
        assert!(Path::new(&out_dir).join(file).exists(), "{file}");
    }
}

#[test]
fn pipeline_on_btor2() {
    let r = bmcq(&["pipeline", &fixture("toggle.btor2"), "--bound", "3", "--method", "exhaustive", "--var-limit", "28"]);
    assert_eq!(r.code, EXIT_OK, "{}{}", r.out, r.err);
    let r = bmcq(&["pipeline", &fixture("toggle.btor2"), "--bound", "2", "--method", "exhaustive"]);
    assert_eq!(r.code, EXIT_NO_WITNESS);
}
