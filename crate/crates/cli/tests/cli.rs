use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use golodlab_cli::report::Report;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_golodlab"))
}

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

fn golodlab(args: &[&str], input: &Path) -> Output {
    bin().args(args).arg("--input").arg(input).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn json_report_round_trips() {
    let out = golodlab(&["golod-ring"], &corpus("03-complete-intersection.json"));
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let r: Report = serde_json::from_str(&text).unwrap();
    assert_eq!(r.schema, 1);
    assert_eq!(r.verdict.as_ref().unwrap().kind(), "refuted-not-golod");
    assert!(r.meta.elapsed_ms.is_some());
    let again = serde_json::to_string_pretty(&r).unwrap() + "\n";
    assert_eq!(again, text);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    for key in ["schema", "input", "betti", "series", "verdict", "witnesses", "meta"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    for key in ["poincare", "kappa_module", "kappa_ring", "serre_bound"] {
        assert!(v["series"].get(key).is_some(), "missing series.{key}");
    }
    for key in ["h_cap", "d_cap", "completeness", "elapsed_ms"] {
        assert!(v["meta"].get(key).is_some(), "missing meta.{key}");
    }
}

#[test]
fn reruns_are_byte_identical() {
    let spec = corpus("04-cube-of-maximal-ideal.json");
    let a = golodlab(&["golod-ring", "--no-timing"], &spec);
    let b = golodlab(&["golod-ring", "--no-timing"], &spec);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn text_output() {
    let out = golodlab(&["golod-ring", "--format", "text", "--no-certify"], &corpus("02-square-of-maximal-ideal.json"));
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("P(t) = 1 + 2t + 4t^2 + 8t^3 + 16t^4 + 32t^5 + … [complete through t^5]"), "{text}");
    assert!(text.contains("κ_R(t) = 1 + 3t + 2t^2"), "{text}");
    assert!(text.contains("verdict: ConsistentUpTo(H=5"), "{text}");
    // the Betti grid has one labelled row per internal shift
    assert!(text.contains("  0:"), "{text}");
}

#[test]
fn flags_override_the_spec() {
    let out = golodlab(&["golod-ring", "--max-h", "3", "--field", "p:7"], &corpus("03-complete-intersection.json"));
    assert!(out.status.success());
    let r: Report = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r.meta.h_cap, 3);
    assert_eq!(r.meta.field, "p:7");
    assert_eq!(r.series.unwrap().poincare.coeffs, vec![1, 2, 3, 4]);
}

#[test]
fn empty_module_is_a_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "bad.json",
        r#"{"schema": 1, "ring": {"variables": ["x"], "ideal": ["x^3"]}, "module": {"ideal": []}}"#,
    );
    let out = golodlab(&["golod-module"], &p);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("module.ideal"), "{err}");
}

#[test]
fn vanishing_module_is_a_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "zero.json",
        r#"{"schema": 1, "ring": {"variables": ["x"], "ideal": ["x^3"]}, "module": {"ideal": ["x^3"]}}"#,
    );
    let out = golodlab(&["golod-module"], &p);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("module.ideal"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    assert_eq!(golodlab(&["betti"], &missing).status.code(), Some(2));
    let p =
        write(dir.path(), "inhom.json", r#"{"schema": 1, "ring": {"variables": ["x", "y"], "ideal": ["x^2 + y"]}}"#);
    let out = golodlab(&["betti"], &p);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("ring.ideal"));
    let p = write(dir.path(), "unit.json", r#"{"schema": 1, "ring": {"variables": ["x"], "ideal": ["x", "1"]}}"#);
    assert_eq!(golodlab(&["betti"], &p).status.code(), Some(2));
    let p = corpus("01-cubic-hypersurface.json");
    assert_eq!(golodlab(&["betti", "--max-d", "5000"], &p).status.code(), Some(3));
    let p = write(dir.path(), "nocmd.json", r#"{"schema": 1, "ring": {"variables": ["x"], "ideal": ["x^3"]}}"#);
    assert_eq!(golodlab(&["run"], &p).status.code(), Some(2));
}

#[test]
fn corpus_directory_in_parallel() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["01-cubic-hypersurface.json", "03-complete-intersection.json", "07-largeness-of-section.json"] {
        std::fs::copy(corpus(name), dir.path().join(name)).unwrap();
    }
    let serial = golodlab(&["run", "--no-timing"], dir.path());
    let parallel = golodlab(&["run", "--no-timing", "--jobs", "3"], dir.path());
    assert!(serial.status.success());
    assert_eq!(serial.stdout, parallel.stdout);
    let reports: Vec<Report> = serde_json::from_slice(&serial.stdout).unwrap();
    let commands: Vec<&str> = reports.iter().map(|r| r.command.as_str()).collect();
    assert_eq!(commands, ["golod-ring", "golod-ring", "largeness"]);
}

#[test]
fn theorem_holds_through_the_binary() {
    let out = golodlab(&["verify-theorem"], &corpus("05-trivial-extension-cubic.json"));
    assert!(out.status.success());
    let r: Report = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r.details["outcome"], "holds");
}
