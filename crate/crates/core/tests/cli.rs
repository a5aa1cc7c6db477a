use std::path::PathBuf;
use std::process::Command;

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("slacq-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn slacq(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_slacq")).args(args).env("SLACQ_WORKERS", "1").output().unwrap()
}

fn run_to(dir: &PathBuf, file: &str, args: &[&str]) -> (i32, String) {
    let out = dir.join(file);
    let mut all: Vec<&str> = args.to_vec();
    let out_s = out.to_str().unwrap().to_string();
    all.extend(["--out", &out_s]);
    let o = slacq(&all);
    let code = o.status.code().unwrap();
    let csv = std::fs::read_to_string(&out).unwrap_or_default();
    (code, csv)
}

#[test]
fn same_seed_gives_identical_csv() {
    let dir = scratch("determinism");
    let cases: [&[&str]; 4] = [
        &["solve", "--n", "5", "--rhs", "random", "--seed", "11"],
        &["trunc-error", "--N", "8..64"],
        &["prep-stats", "--M", "16..64"],
        &["band-check", "--n", "6"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let (c1, a) = run_to(&dir, &format!("a{i}.csv"), args);
        let (c2, b) = run_to(&dir, &format!("b{i}.csv"), args);
        assert_eq!((c1, c2), (0, 0), "{args:?}");
        assert!(!a.is_empty());
        assert_eq!(a, b, "{args:?}");
    }
    let (_, x) = run_to(&dir, "s1.csv", &["solve", "--n", "5", "--rhs", "random", "--seed", "1"]);
    let (_, y) = run_to(&dir, "s2.csv", &["solve", "--n", "5", "--rhs", "random", "--seed", "2"]);
    assert_ne!(x, y);
}

#[test]
fn csv_floats_have_17_significant_digits_and_summary_exists() {
    let dir = scratch("format");
    let (code, csv) = run_to(&dir, "sym.csv", &["symbols", "--n", "3", "--samples", "16"]);
    assert_eq!(code, 0);
    let row = csv.lines().nth(1).unwrap();
    let float = row.split(',').find(|f| f.contains('e')).unwrap();
    let mantissa = float.trim_start_matches('-').split('e').next().unwrap().replace('.', "");
    assert_eq!(mantissa.len(), 17, "{float}");
    let summary = std::fs::read_to_string(dir.join("sym.summary")).unwrap();
    assert!(summary.lines().all(|l| l.contains('=')), "{summary}");
    assert!(summary.contains("pass=true"));
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(slacq(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(slacq(&["trunc-error", "--N", "12"]).status.code(), Some(1));
    assert_eq!(slacq(&["solve", "--rhs", "bogus"]).status.code(), Some(1));
    assert_eq!(slacq(&["--help"]).status.code(), Some(0));
}

#[test]
fn selftest_exit_reflects_criteria() {
    let dir = scratch("selftest");
    let (pass, _) = run_to(&dir, "ok.csv", &["selftest", "--only", "1,2,12"]);
    assert_eq!(pass, 0);
    let (fail, csv) = run_to(&dir, "bad.csv", &["selftest", "--only", "3"]);
    let c3 = slacq::acceptance::run_selected(&[3], false);
    assert_eq!(fail == 0, c3.iter().all(|r| r.passed));
    if fail != 0 {
        assert_eq!(fail, 2);
        assert!(csv.contains("false"));
    }
}
