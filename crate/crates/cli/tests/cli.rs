use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn flagiso(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_flagiso"));
    cmd.args(args).env_remove("FLAGISO_MAX_RANK");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("run flagiso");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let r = flagiso(&full, &[]);
    let v = serde_json::from_str(&r.stdout).unwrap_or_else(|e| panic!("{e}: {}", r.stdout));
    (r.code, v)
}

fn lockfile() -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../derived_values.json");
    p.to_str().unwrap().to_owned()
}

/// Timings and paths vary between runs.
fn scrub(v: &mut Value) {
    match v {
        Value::Object(m) => {
            for (k, x) in m.iter_mut() {
                if k == "elapsed_ms" || k == "lockfile" {
                    *x = Value::Null;
                } else {
                    scrub(x);
                }
            }
        }
        Value::Array(a) => a.iter_mut().for_each(scrub),
        _ => {}
    }
}

fn golden(name: &str, expected_code: i32, args: &[&str]) {
    let (code, mut v) = json(args);
    assert_eq!(code, expected_code, "{name}: {v}");
    scrub(&mut v);
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.json"));
    let rendered = serde_json::to_string_pretty(&v).unwrap() + "\n";
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &rendered).unwrap();
        return;
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(rendered, want, "{name} differs from {}", path.display());
}

#[test]
fn golden_outputs() {
    let lock = lockfile();
    let cases: Vec<(&str, i32, Vec<&str>)> = vec![
        ("decide", 0, vec!["decide", "gen: seq[1,inf]", "symp: half=seq[1]; middle=inf"]),
        ("decide_bd", 0, vec!["decide", "orth: half=seq[inf]; middle=1", "orth: half=seq[inf]; middle=empty"]),
        ("decide_not_iso", 0, vec!["decide", "gen: omega(1)", "gen: omegastar(1) + seq[1]"]),
        ("decide_finite", 0, vec!["decide-finite", "A(1; 6)", "C(1; 6)"]),
        ("normalize", 0, vec!["normalize", "seq[1] + seq[2,2] + omega(2)"]),
        ("dual_general", 0, vec!["dual", "gen: seq[1] + omega(2)"]),
        ("dual_isotropic", 0, vec!["dual", "symp: half=omega(1); middle=empty"]),
        ("points", 0, vec!["points", "--type", "B", "--ambient", "5", "--dims", "2", "--q", "3"]),
        ("points_brute", 0, vec!["points", "--type", "A", "--ambient", "4", "--dims", "1,3", "--q", "2", "--brute"]),
        ("poincare", 0, vec!["poincare", "--type", "A", "--ambient", "4", "--dims", "2"]),
        ("dim", 0, vec!["dim", "--type", "A", "--ambient", "3", "--dims", "1,2"]),
        ("pic_rank", 0, vec!["pic-rank", "orth: half=seq[1,2]; middle=inf"]),
        ("truncate", 0, vec!["truncate", "orth: half=seq[inf]; middle=1", "--n", "2"]),
        ("witness_rebase", 0, vec!["witness-rebase", "--field", "7", "--ambient", "5", "--dims", "1,3", "--seed", "1"]),
        ("witness_rebase_symp", 0, vec!["witness-rebase", "--form", "symp", "--ambient", "6", "--dims", "1,3", "--seed", "2"]),
        ("witness_bd", 0, vec!["witness-bd", "--n", "2", "--field", "3", "--all"]),
        ("selftest", 0, vec!["selftest", "--only", "1", "--lockfile", &lock]),
        ("error_validation", 1, vec!["dual", "orth: half=seq[inf]; middle=2"]),
        ("error_syntax", 1, vec!["normalize", "seq[1,\n x]"]),
    ];
    for (name, code, args) in &cases {
        golden(name, *code, args);
    }
}

#[test]
fn spec_examples() {
    let (code, v) = json(&["decide", "gen: seq[1,inf]", "symp: half=seq[1]; middle=inf"]);
    assert_eq!(code, 0);
    assert_eq!((v["verdict"].as_str(), v["reason"].as_str()), (Some("Isomorphic"), Some("ExceptionalProjSymp")));

    let r = flagiso(&["points", "--type", "B", "--ambient", "5", "--dims", "2", "--q", "3"], &[]);
    let brute = flagiso(&["points", "--type", "B", "--ambient", "5", "--dims", "2", "--q", "3", "--brute"], &[]);
    assert_eq!((r.code, r.stdout.trim()), (0, "40"));
    assert_eq!(brute.stdout, r.stdout);

    let r = flagiso(&["normalize", "seq[2] + omega(2)"], &[]);
    assert_eq!(r.stdout.trim(), "omega(2)");

    let r = flagiso(&["dual", "orth: half=seq[inf]; middle=2"], &[]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("validation failed"), "{}", r.stderr);
}

#[test]
fn decide_is_invariant_under_swap() {
    let pairs = [
        ("gen: seq[1,inf]", "symp: half=seq[1]; middle=inf"),
        ("gen: seq[1] + omega(2)", "gen: omegastar(2) + seq[1]"),
        ("orth: half=seq[inf]; middle=1", "orth: half=seq[inf]; middle=empty"),
        ("gen: omega(1)", "gen: seq[2,inf]"),
    ];
    for (x, y) in pairs {
        let (_, mut a) = json(&["decide", x, y]);
        let (_, mut b) = json(&["decide", y, x]);
        assert_ne!(a["swapped"], b["swapped"], "{x} / {y}");
        a["swapped"] = Value::Null;
        b["swapped"] = Value::Null;
        assert_eq!(a, b, "{x} / {y}");
    }
    let (_, mut a) = json(&["decide-finite", "B(2; 5)", "D(3; 6)"]);
    let (_, mut b) = json(&["decide-finite", "D(3; 6)", "B(2; 5)"]);
    a["swapped"] = Value::Null;
    b["swapped"] = Value::Null;
    assert_eq!(a, b);
}

#[test]
fn exit_codes() {
    let ok = flagiso(&["pic-rank", "gen: omega(1)"], &[]);
    assert_eq!((ok.code, ok.stdout.trim()), (0, "inf"));
    assert_eq!(flagiso(&["normalize", "seq[1"], &[]).code, 1);
    assert_eq!(flagiso(&["normalize", "seq[]"], &[]).code, 1);
    assert_eq!(flagiso(&["truncate", "symp: half=seq[1]; middle=inf", "--n", "1"], &[]).code, 1);
    assert_eq!(flagiso(&["decide-finite", "C(1; 4)", "A(1; 4)"], &[]).code, 1);
    assert_eq!(flagiso(&["points", "--type", "B", "--ambient", "5", "--dims", "2", "--q", "2", "--brute"], &[]).code, 1);
    assert_eq!(flagiso(&["witness-bd", "--n", "2", "--field", "Q", "--all"], &[]).code, 1);
    assert_eq!(flagiso(&["frobnicate"], &[]).code, 1);
    let capped = flagiso(&["points", "--type", "A", "--ambient", "6", "--dims", "1", "--q", "2"], &[("FLAGISO_MAX_RANK", "2")]);
    assert_eq!(capped.code, 2, "{}", capped.stderr);
    let uncapped = flagiso(&["points", "--type", "A", "--ambient", "6", "--dims", "1", "--q", "2"], &[]);
    assert_eq!((uncapped.code, uncapped.stdout.trim()), (0, "63"));
}

#[test]
fn selftest_detects_a_stale_lockfile() {
    let dir = std::env::temp_dir().join(format!("flagiso-selftest-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("derived_values.json");
    let p = path.to_str().unwrap();
    let created = flagiso(&["selftest", "--only", "1", "--lockfile", p], &[]);
    assert_eq!(created.code, 0, "{}", created.stdout);
    assert!(created.stdout.contains("derived values: created"));
    let body = std::fs::read_to_string(&path).unwrap();
    assert_eq!(body, std::fs::read_to_string(lockfile()).unwrap());
    std::fs::write(&path, body.replace("\"C(1; 8)\"", "\"C(1; 10)\"")).unwrap();
    let stale = flagiso(&["selftest", "--only", "1", "--lockfile", p], &[]);
    assert_eq!(stale.code, 1);
    assert!(stale.stdout.contains("differs: flag.truncate.symplectic"), "{}", stale.stdout);
    let fixed = flagiso(&["selftest", "--only", "1", "--lockfile", p, "--update-lockfile"], &[]);
    assert_eq!(fixed.code, 0);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), body);
    std::fs::remove_dir_all(&dir).unwrap();
}
