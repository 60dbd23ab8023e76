use std::path::PathBuf;
use std::process::Command;

fn corpus(rel: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(rel).to_string_lossy().into_owned()
}

fn clott(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_clott")).args(args).output().expect("run clott");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn json(args: &[&str]) -> (i32, serde_json::Value) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let mut all = args.to_vec();
    let p = path.to_string_lossy().into_owned();
    all.extend(["--json", &p]);
    let (code, _) = clott(&all);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("no report for {args:?}"));
    (code, serde_json::from_str(&text).unwrap())
}

#[test]
fn check_exit_codes() {
    assert_eq!(clott(&["check", &corpus("next.clott")]).0, 0);
    assert_eq!(clott(&["check", &corpus("next.clott"), "--fuel", "0"]).0, 3);
    assert_eq!(clott(&["check", &corpus("golden/fix.reject.clott")]).0, 1);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.clott");
    std::fs::write(&bad, "check fun -> .\n").unwrap();
    assert_eq!(clott(&["check", &bad.to_string_lossy()]).0, 2);
    assert_eq!(clott(&["check", "/nonexistent.clott"]).0, 2);
}

#[test]
fn usage_errors() {
    assert_eq!(clott(&[]).0, 2);
    assert_eq!(clott(&["frobnicate"]).0, 2);
    assert_eq!(clott(&["suite", "nope"]).0, 2);
    assert_eq!(clott(&["model", "verify", "nope"]).0, 2);
    assert_eq!(clott(&["eval", "later("]).0, 2);
    assert_eq!(clott(&["--help"]).0, 0);
}

#[test]
fn drop_report() {
    let (code, r) = json(&["theory", "drop", &corpus("theories/truncation.thy")]);
    assert_eq!(code, 0);
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["checks"][0]["evidence"]["drop"], true);
    let (_, r) = json(&["theory", "drop", &corpus("theories/semilattice.thy")]);
    assert_eq!(r["checks"][0]["evidence"]["drop"], false);
}

#[test]
fn force_on_delay_is_a_truncation_artifact() {
    let (code, r) = json(&["model", "verify", "force", "--type", "delay(1)", "--bound", "4"]);
    assert_eq!(code, 0);
    assert_eq!(r["checks"][0]["verdict"], "truncation_artifact");
    assert_eq!(r["params"]["bound"], 4);
}

#[test]
fn theory_suite_records_the_truncation_square() {
    let (code, r) = json(&["suite", "theories"]);
    assert_eq!(code, 1);
    let failing: Vec<&serde_json::Value> = r["checks"].as_array().unwrap().iter().filter(|c| c["verdict"] == "fail").collect();
    assert_eq!(failing.len(), 1);
    assert_eq!(failing[0]["name"], "pullbacks truncation");
    let sq = &failing[0]["evidence"]["first"];
    assert_eq!((sq["x"].as_u64(), sq["y"].as_u64()), (Some(1), Some(2)));
    assert!(sq["p"].as_array().unwrap().is_empty());
}

#[test]
fn passing_suites() {
    for name in ["requirements", "figures", "coalgebra"] {
        let (code, r) = json(&["suite", name]);
        assert_eq!(code, 0, "{name}: {r}");
        assert!(r["checks"].as_array().unwrap().iter().all(|c| c["verdict"] == "pass" && c["anchor"].is_string()));
    }
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        clott(&["suite", "requirements", "--json", &p.to_string_lossy()]);
    }
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}

#[test]
fn coalgebra_commands() {
    let (code, r) = json(&["coalg", "bisim", &corpus("coalgebras/coins.coalg")]);
    assert_eq!(code, 0);
    assert_eq!(r["checks"][0]["evidence"]["classes"], serde_json::json!([[0, 2], [1, 3]]));
    let (code, r) = json(&["coalg", "terminal", "pf(id)"]);
    assert_eq!(code, 0);
    let sizes: Vec<u64> = r["checks"][0]["evidence"]["table"].as_array().unwrap().iter().map(|row| row["size"].as_u64().unwrap()).collect();
    assert_eq!(sizes, [1, 2, 4, 16, 65536]);
    assert_eq!(clott(&["coalg", "final", "const{a, b}"]).0, 0);
    // the powerset sequence never settles, so no final coalgebra is found
    assert_eq!(clott(&["coalg", "final", "pf(id)", "--bound", "3"]).0, 3);
    assert_eq!(clott(&["coalg", "weakbisim", "now a", "step^3 now a"]).0, 0);
    assert_eq!(clott(&["coalg", "weakbisim", "now a", "step now b"]).0, 1);
}

#[test]
fn eval_reports_fibers() {
    let (code, r) = json(&["eval", "delay(1)", "--clocks", "1", "--pool", "1", "--bound", "3"]);
    assert_eq!(code, 0);
    assert_eq!(r["checks"][1]["name"], "invariance");
    let fibers = r["checks"][0]["evidence"]["fibers"].as_array().unwrap();
    assert!(!fibers.is_empty());
}
