use std::io::Write;
use std::process::{Command, Output, Stdio};

use swhull::hull2::{check, System};
use swhull::pointfile::PointFile;
use swhull::repair::sample_lacking;
use swhull::TolerancePolicy;

const E_ATOM: &str = r#"{"x":[1,1],"X":[1,1,1],"y":[1,1],"Y12":1,"alpha":[0,0],"beta":[0,0]}"#;
const BAD_RLTY: &str = r#"{"x":[0.2,0.2],"X":[0.04,0.04,0.04],"y":[0.5,0.5],"Y12":0.6,"alpha":[0,0],"beta":[0,0]}"#;

fn swhull(args: &[&str], stdin: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_swhull"));
    cmd.args(args).stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped());
    let mut child = cmd.spawn().unwrap();
    if let Some(s) = stdin {
        // the process may exit before reading, e.g. on a bad flag
        let _ = child.stdin.take().unwrap().write_all(s.as_bytes());
    }
    drop(child.stdin.take());
    child.wait_with_output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn file(content: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(content.as_bytes()).unwrap();
    f
}

#[test]
fn check_exit_codes() {
    let f = file(E_ATOM);
    let path = f.path().to_str().unwrap();
    for s in ["disj", "nobeta", "minimal", "conjecture"] {
        assert_eq!(code(&swhull(&["check", path, "--system", s], None)), 0, "{s}");
    }
    let bad = swhull(&["check", "-", "--system", "nobeta"], Some(BAD_RLTY));
    assert_eq!(code(&bad), 1);
    let out = String::from_utf8(bad.stdout).unwrap();
    assert!(out.lines().any(|l| l.starts_with("FAIL") && l.contains("RLT_y")), "{out}");

    let no_alpha = r#"{"x":[1,1],"X":[1,1,1],"y":[1,1],"Y12":1}"#;
    assert_eq!(code(&swhull(&["check", "-", "--system", "minimal"], Some(no_alpha))), 2);
    assert_eq!(code(&swhull(&["check", "-"], Some("{"))), 2);
    assert_eq!(code(&swhull(&["check", "-"], Some(&E_ATOM.replace("}", r#","extra":1}"#)))), 2);
    assert_eq!(code(&swhull(&["check", "-", "--system", "disj"], Some(&E_ATOM.replace(r#","beta":[0,0]"#, "")))), 2);
    assert_eq!(code(&swhull(&["check", "-", "--system", "bogus"], Some(E_ATOM))), 2);
}

#[test]
fn repair_commands() {
    let tol = TolerancePolicy::default();
    let same = swhull(&["repair", "-"], Some(E_ATOM));
    assert_eq!(code(&same), 0);
    let p = PointFile::parse(&String::from_utf8(same.stdout).unwrap()).unwrap();
    assert_eq!(p, PointFile::parse(E_ATOM).unwrap());

    for z in sample_lacking(11, 5) {
        let input = PointFile::from_lifted(&z).to_json();
        let o = swhull(&["repair", "-"], Some(&input));
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let r = PointFile::parse(&String::from_utf8(o.stdout).unwrap()).unwrap().to_lifted().unwrap();
        assert_eq!(r.base, z.base);
        assert!(check(&r, System::NoBeta, &tol).unwrap().passed());
    }

    let o = swhull(&["repair", "-"], Some(BAD_RLTY));
    assert_eq!(code(&o), 1);
    assert!(o.stdout.is_empty());
}

#[test]
fn repair_writes_out_file() {
    let z = &sample_lacking(12, 1)[0];
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = swhull(&["repair", "-", "--out", out.to_str().unwrap()], Some(&PointFile::from_lifted(z).to_json()));
    assert_eq!(code(&o), 0);
    let r = PointFile::parse(&std::fs::read_to_string(out).unwrap()).unwrap().to_lifted().unwrap();
    assert!(check(&r, System::NoBeta, &TolerancePolicy::default()).unwrap().passed());
}

#[test]
fn exactness_deterministic() {
    let a = swhull(&["exactness", "--trials", "1", "--seed", "7"], None);
    let b = swhull(&["exactness", "--trials", "1", "--seed", "7"], None);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("trial_id,seed,"));
    let fields: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(fields.len(), 15);
    assert_eq!(fields[14], "ok");
    let gap: f64 = fields[12].parse().unwrap();
    let (ov, rv): (f64, f64) = (fields[10].parse().unwrap(), fields[11].parse().unwrap());
    assert_eq!(gap, rv - ov);
}

#[test]
fn conjecture_rows_independent_of_thread_count() {
    let run = |threads: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_swhull"))
            .args(["conjecture", "--trials", "6", "--seed", "3"])
            .env("RAYON_NUM_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0));
        o.stdout
    };
    let one = run("1");
    assert_eq!(one, run("4"));
    let text = String::from_utf8(one).unwrap();
    assert!(text.lines().skip(1).all(|l| l.split(',').nth(9) == Some("0.0000000000000000e0")));
}

#[test]
fn conjecture_forced_c_y_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.csv");
    let o = swhull(&["conjecture", "--trials", "3", "--c-y", "-1", "--system", "minimal", "--out", out.to_str().unwrap()], None);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(out).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.lines().skip(1).all(|l| l.split(',').nth(9) == Some("-1.0000000000000000e0")));
}

#[test]
fn support_prints_both_values() {
    let o = swhull(&["support", "--objective", "1,1,0,0,0,0,0,0", "--system", "nobeta"], None);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("hull: 2.0000000000000000e0"), "{text}");
    assert_eq!(code(&swhull(&["support", "--objective", "1,1"], None)), 2);
}

#[test]
fn selftest_and_mutation() {
    let ok = swhull(&["selftest"], None);
    assert_eq!(code(&ok), 0, "{}", String::from_utf8_lossy(&ok.stdout));
    let text = String::from_utf8(ok.stdout).unwrap();
    assert!(text.lines().filter(|l| l.contains(" ok ")).count() >= 9);

    let bad = swhull(&["selftest", "--lambda-rule", "literal"], None);
    assert_eq!(code(&bad), 1);
    let text = String::from_utf8(bad.stdout).unwrap();
    let decomp = text.lines().find(|l| l.starts_with("decomposition")).unwrap();
    assert!(decomp.contains("FAIL"));
    assert_eq!(text.lines().filter(|l| l.contains("FAIL")).count(), 1);
}
