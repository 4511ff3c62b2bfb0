use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fusionkit"))
        .args(args)
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn verify_exit_codes() {
    let ok = run(&["rule", "verify", path(&fixture("moore_read.json"))]);
    assert_eq!(ok.status.code(), Some(0));
    let bad = run(&["rule", "verify", path(&fixture("broken_rule.json"))]);
    assert_eq!(bad.status.code(), Some(1));
    let checks = json(&bad)["checks"].as_array().unwrap().clone();
    assert!(
        checks
            .iter()
            .any(|c| c["axiom"] == "duality" && c["passed"] == false),
        "{checks:?}"
    );
}

#[test]
fn malformed_json_reports_location() {
    let p = scratch("malformed.json");
    std::fs::write(&p, "{\"labels\": [\"1\",\n  oops]}").unwrap();
    let out = run(&["rule", "verify", path(&p)]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2, column 3"), "{err}");
}

#[test]
fn missing_file_is_an_error() {
    let out = run(&["rule", "verify", "/nonexistent/rule.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn budget_overrun_exits_two() {
    let out = run(&[
        "fsys",
        "enumerate",
        "--rule",
        path(&fixture("moore_read.json")),
        "--p",
        "17",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let ok = run(&[
        "fsys",
        "enumerate",
        "--rule",
        path(&fixture("ty_z2.json")),
        "--p",
        "17",
    ]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json(&ok)["class_count"], 2);
}

#[test]
fn analyze_reports() {
    let mr = json(&run(&[
        "rule",
        "analyze",
        path(&fixture("moore_read.json")),
    ]));
    assert_eq!(mr["nilpotency_class"], 2);
    assert_eq!(mr["simple_current_index"], 2);
    assert_eq!(mr["universal_grading"]["group"], "Z4");
    let text = run(&[
        "--format",
        "text",
        "rule",
        "analyze",
        path(&fixture("moore_read.json")),
    ]);
    assert!(String::from_utf8_lossy(&text.stdout).contains("group: Z4"));
}

#[test]
fn reports_are_deterministic() {
    let mr = fixture("moore_read.json");
    let args = ["uber", "classify", "--rule", path(&mr), "--p", "17"];
    let a = run(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_fusionkit"))
        .args(args)
        .env("FUSIONKIT_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let h = ["cohom", "h3", "--group", "Z2xZ2", "--p", "17"];
    assert_eq!(run(&h).stdout, run(&h).stdout);
}

#[test]
fn out_flag_writes_file() {
    let p = scratch("analysis.json");
    let out = run(&[
        "--out",
        path(&p),
        "rule",
        "analyze",
        path(&fixture("ty_z2.json")),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    assert_eq!(v["universal_grading"]["order"], 2);
}

#[test]
fn classify_reconstruct_psi_pipeline() {
    let rule = fixture("moore_read.json");
    let classes = json(&run(&[
        "uber",
        "classify",
        "--rule",
        path(&rule),
        "--p",
        "17",
    ]));
    assert_eq!(classes["class_count"], 4);
    for (i, c) in classes["classes"].as_array().unwrap().iter().enumerate() {
        let u = scratch(&format!("mr_uber_{i}.json"));
        let f = scratch(&format!("mr_sys_{i}.json"));
        std::fs::write(&u, c["representative"].to_string()).unwrap();
        let rec = run(&[
            "--out",
            path(&f),
            "uber",
            "reconstruct",
            path(&u),
            "--rule",
            path(&rule),
            "--p",
            "17",
        ]);
        assert_eq!(
            rec.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&rec.stderr)
        );
        assert_eq!(run(&["fsys", "verify", path(&f)]).status.code(), Some(0));
        let back = json(&run(&["uber", "psi", path(&f)]));
        assert_eq!(back["input_was_normal"], true);
        assert_eq!(back["chi"], c["representative"]["chi"]);
        assert_eq!(back["ups"], c["representative"]["ups"]);
        assert_eq!(back["tau"], c["representative"]["tau"]);
        let gauge = scratch("identity_gauge.json");
        std::fs::write(&gauge, r#"{"xi": {}}"#).unwrap();
        let moved = json(&run(&[
            "fsys",
            "gauge-apply",
            path(&f),
            "--gauge",
            path(&gauge),
        ]));
        let orig: Value = serde_json::from_str(&std::fs::read_to_string(&f).unwrap()).unwrap();
        assert_eq!(moved["coeffs"], orig["coeffs"]);
    }
}

#[test]
fn feudal_commands() {
    let rule = json(&run(&[
        "feudal",
        "phi",
        path(&fixture("hom_z4_doubling.json")),
    ]));
    let p = scratch("phi_rule.json");
    std::fs::write(&p, rule.to_string()).unwrap();
    assert_eq!(run(&["rule", "verify", path(&p)]).status.code(), Some(0));
    let g = run(&["feudal", "gamma", path(&fixture("moore_read.json"))]);
    assert_eq!(g.status.code(), Some(0));
    let e = run(&["feudal", "enumerate", "--max-order", "4"]);
    assert_eq!(e.status.code(), Some(0));
    assert!(
        run(&["feudal", "enumerate", "--max-order", "64"])
            .status
            .code()
            == Some(2)
    );
}

#[test]
fn cohomology_and_obstructions() {
    let h = json(&run(&[
        "cohom",
        "h3",
        "--group",
        "Z4",
        "--p",
        "17",
        "--via-uber",
        "2",
    ]));
    assert_eq!(h["order"], 4);
    let o = run(&[
        "uber",
        "obstructions",
        "--rule",
        path(&fixture("ty_z3.json")),
        "--p",
        "7",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["sqrt_available"], false);
}
