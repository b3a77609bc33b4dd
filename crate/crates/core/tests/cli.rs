use std::io::Write;
use std::process::{Command, Output};

use tempfile::NamedTempFile;

fn ms3(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ms3")).args(args).env_remove("MS3_ORACLE_BOUND").output().unwrap()
}

fn file(text: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn emit(key: &str) -> NamedTempFile {
    file(&stdout(&ms3(&["catalog", "emit", key])))
}

fn path(f: &NamedTempFile) -> &str {
    f.path().to_str().unwrap()
}

#[test]
fn catalog_list_and_emit() {
    let out = ms3(&["catalog", "list"]);
    assert!(out.status.success());
    assert!(stdout(&out).lines().any(|l| l == "trivial:+1:-1"));
    let emitted = stdout(&ms3(&["catalog", "emit", "twisted:0"]));
    assert!(emitted.lines().any(|l| l == "omega 0-handle = (1, 1)"));
    assert_eq!(ms3(&["catalog", "emit", "nope"]).status.code(), Some(2));
}

#[test]
fn check_exit_codes() {
    let a = emit("trivial:+1:+1");
    let b = emit("trivial:-1:-1");
    let same = ms3(&["check", path(&a), path(&a)]);
    assert_eq!(same.status.code(), Some(0));
    assert!(stdout(&same).starts_with("equivalent\n"));
    assert!(stdout(&same).contains("edge a -> a"));

    let diff = ms3(&["check", path(&a), path(&b)]);
    assert_eq!(diff.status.code(), Some(1));
    assert!(stdout(&diff).contains("failing criterion: "), "{}", stdout(&diff));

    let broken = file("[graph]\nvertex A\nedge a = A -- B orient=fixed kind=corner\n[surface S]\ngenus 0\n");
    let bad = ms3(&["check", path(&broken), path(&a)]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("line 3"));
}

#[test]
fn validate_and_canon() {
    let a = emit("annulus-pair");
    let ok = ms3(&["validate", path(&a)]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(stdout(&ok), "valid\n");

    let canon = ms3(&["canon", path(&a)]);
    assert_eq!(stdout(&canon), std::fs::read_to_string(a.path()).unwrap());

    let single = file("[graph]\nvertex A\nvertex B\nedge x = A -- B orient=free kind=upper-curve\nedge y = B -- A orient=free kind=upper-curve\n[surface R]\ngenus 0\nboundary x y\n");
    let report = ms3(&["validate", path(&single)]);
    assert_eq!(report.status.code(), Some(1));
    assert!(stdout(&report).contains("edge occurrence ≠ 2"));
}

#[test]
fn framed_check_with_oracle() {
    let g = file("vertex s role=source\nvertex x role=saddle\nvertex t role=sink\nedge e1 = s -> x\nedge e2 = x -> t\n");
    let f1 = file("e1 = 1\ne2 = 1\n");
    let f2 = file("e1 = 4\ne2 = 4\n");
    let f3 = file("e1 = 0\ne2 = 1\n");

    let yes = ms3(&["framed", "check", path(&g), path(&f1), path(&f2), "--oracle", "8"]);
    assert_eq!(yes.status.code(), Some(0));
    let text = stdout(&yes);
    assert!(text.contains("component 1: type 3 edges [e1 e2] groups [e1] [e2]"), "{text}");
    assert!(text.contains("lemmas: equivalent"));
    assert!(text.contains("oracle (bound 8): equivalent"));

    let no = ms3(&["framed", "check", path(&g), path(&f1), path(&f3), "--oracle"]);
    assert_eq!(no.status.code(), Some(1));
    assert!(stdout(&no).contains("oracle (bound 4): not equivalent"), "{}", stdout(&no));

    let env = Command::new(env!("CARGO_BIN_EXE_ms3"))
        .args(["framed", "check", path(&g), path(&f1), path(&f2), "--oracle"])
        .env("MS3_ORACLE_BOUND", "5")
        .output()
        .unwrap();
    assert!(stdout(&env).contains("oracle (bound 5): equivalent"), "{}", stdout(&env));

    let tight = ms3(&["framed", "check", path(&g), path(&f1), path(&f2), "--oracle", "2"]);
    assert_eq!(tight.status.code(), Some(2));
}
