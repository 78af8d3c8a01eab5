//! End-to-end runs of the `pxdg` binary.

use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_pxdg");

fn pxdg(args: &[&str], dir: &Path) -> Output {
    Command::new(BIN).args(args).current_dir(dir).env_remove("PXDG_WORKERS").output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn write_linear_problem(dir: &Path) -> String {
    let path = dir.join("linear.problem");
    std::fs::write(&path, "p=kind=const value=2\nu_left=-1\nu_right=1\n").unwrap();
    format!("custom:{}", path.display())
}

#[test]
fn solve_constant_exponent_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let problem = write_linear_problem(dir.path());
    let out = pxdg(&["solve", "--problem", &problem, "--n", "8", "--out", "run"], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["solution.csv", "terms.csv", "trace.csv"] {
        assert!(dir.path().join("run").join(f).exists(), "missing {f}");
    }
}

#[test]
fn bad_flags_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&pxdg(&["solve", "--no-such-flag"], dir.path())), 3);
    assert_eq!(code(&pxdg(&["solve", "--method", "fem"], dir.path())), 3);
    assert_eq!(code(&pxdg(&["solve", "--problem", "custom:/does/not/exist"], dir.path())), 3);
    assert_eq!(code(&pxdg(&["--help"], dir.path())), 0);
}

#[test]
fn broken_face_size_fails_the_lifting_suite() {
    let dir = tempfile::tempdir().unwrap();
    let out = pxdg(&["properties", "--suites", "lifting", "--broken-h", "--out", "props"], dir.path());
    assert_eq!(code(&out), 2);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.lines().any(|l| l.starts_with("FAIL lifting/")), "{stdout}");

    let out = pxdg(&["properties", "--suites", "lifting", "--out", "props"], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let problem = write_linear_problem(dir.path());
    std::fs::write(dir.path().join("run.cfg"), format!("problem={problem}\nns=4,8\nout=from_file\n")).unwrap();

    let out = pxdg(&["convergence", "--config", "run.cfg"], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let table = std::fs::read_to_string(dir.path().join("from_file/convergence.csv")).unwrap();
    assert_eq!(table.lines().filter(|l| !l.starts_with("order") && !l.starts_with("n,")).count(), 2);

    let out = pxdg(&["convergence", "--config", "run.cfg", "--ns", "4", "--out", "from_flag"], dir.path());
    assert_eq!(code(&out), 0);
    let table = std::fs::read_to_string(dir.path().join("from_flag/convergence.csv")).unwrap();
    // one mesh: no order rows
    assert_eq!(table.lines().count(), 2, "{table}");
    assert!(dir.path().join("from_flag/timings.csv").metadata().unwrap().len() > 0);
    assert!(!dir.path().join("from_file/convergence.svg").exists());
}

#[test]
fn convergence_table_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let problem = write_linear_problem(dir.path());
    let run = |out: &str, workers: &str| {
        let o = pxdg(&["convergence", "--problem", &problem, "--ns", "4,8,16", "--workers", workers, "--out", out], dir.path());
        assert_eq!(code(&o), 0);
        std::fs::read(dir.path().join(out).join("convergence.csv")).unwrap()
    };
    assert_eq!(run("a", "1"), run("b", "3"));
}

#[test]
fn exact_writes_requested_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = pxdg(&["exact", "--samples", "11", "--out", "u.csv"], dir.path());
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(dir.path().join("u.csv")).unwrap();
    assert_eq!(text.lines().count(), 12);
    assert!(String::from_utf8_lossy(&out.stdout).contains("u'(0)"));
}
