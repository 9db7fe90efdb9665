//! End-to-end runs of the `gaussrt` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn gaussrt<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(env!("CARGO_BIN_EXE_gaussrt"))
        .args(args)
        .env_remove("GAUSSRT_TOL")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json_out(o: &Output) -> Value {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&stdout(o)).expect("json on stdout")
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

/// Generates a state document in `dir` and returns its path.
fn gen(dir: &TempDir, name: &str, args: &[&str]) -> PathBuf {
    let path = dir.path().join(name);
    let mut all = vec!["gen"];
    all.extend_from_slice(args);
    let o = gaussrt(
        all.into_iter()
            .map(String::from)
            .chain(["--out".into(), path.display().to_string()]),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    path
}

fn matrix(doc: &Value) -> Vec<Vec<f64>> {
    doc["V"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| {
            r.as_array()
                .unwrap()
                .iter()
                .map(|x| x.as_f64().unwrap())
                .collect()
        })
        .collect()
}

fn assert_scaled_identity(doc: &Value, n: usize, scale: f64, tol: f64) {
    let v = matrix(doc);
    assert_eq!(v.len(), 2 * n);
    for (i, row) in v.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            let want = if i == j { scale } else { 0.0 };
            assert!((x - want).abs() <= tol, "V[{i}][{j}] = {x}");
        }
    }
}

#[test]
fn generated_documents_have_the_expected_shape() {
    let dir = TempDir::new().unwrap();
    let tmsv = read_json(&gen(&dir, "tmsv.json", &["tmsv", "--r", "0.5"]));
    assert_eq!(tmsv["partition"], serde_json::json!(["A", "B"]));
    assert_eq!(tmsv["ordering"], "xxpp");
    let vac = read_json(&gen(&dir, "vac.json", &["vacuum", "--modes", "3"]));
    assert_eq!(vac["modes"], 3);
    assert_scaled_identity(&vac, 3, 1.0, 0.0);
}

#[test]
fn documents_validate_and_round_trip() {
    let dir = TempDir::new().unwrap();
    let src = gen(&dir, "sq.json", &["squeezed", "--r", "0.7", "--phi", "0.3"]);
    let o = gaussrt(["validate", "--json", "--input", src.to_str().unwrap()]);
    assert_eq!(json_out(&o)["valid"], true);
    // Full precision keeps a pure state exactly on the boundary.
    let before = read_json(&src);
    let text = std::fs::read_to_string(&src).unwrap();
    let again = gaussrt_doc_from(&text);
    assert_eq!(before, again);
}

fn gaussrt_doc_from(text: &str) -> Value {
    let doc = gaussrt::CmDocument::parse(text).unwrap();
    serde_json::from_str(&doc.to_json()).unwrap()
}

#[test]
fn ppt_kappa_of_two_mode_squeezing() {
    let dir = TempDir::new().unwrap();
    let src = gen(&dir, "tmsv.json", &["tmsv", "--r", "0.5"]);
    let o = gaussrt([
        "kappa",
        "--theory",
        "ppt",
        "--json",
        "--input",
        src.to_str().unwrap(),
    ]);
    let out = json_out(&o);
    assert!((out["kappa"].as_f64().unwrap() - 1f64.exp()).abs() < 1e-6);
    assert_eq!(out["member"], false);

    let o = gaussrt([
        "kappa",
        "--theory",
        "ppt",
        "--method",
        "both",
        "--json",
        "--input",
        src.to_str().unwrap(),
    ]);
    let out = json_out(&o);
    assert!(out["agreement"]["difference"].as_f64().unwrap() < 1e-6);
}

#[test]
fn vacuum_is_free_for_nonclassicality() {
    let dir = TempDir::new().unwrap();
    let src = gen(&dir, "vac.json", &["vacuum", "--modes", "2"]);
    let o = gaussrt([
        "kappa",
        "--theory",
        "nonclassicality",
        "--input",
        src.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("kappa: 1\n"), "{text}");
    assert!(text.contains("member: true"), "{text}");
}

#[test]
fn partition_override_changes_the_bipartition() {
    let dir = TempDir::new().unwrap();
    let src = gen(&dir, "tmsv.json", &["tmsv", "--r", "0.5"]);
    // Both modes in one party: no entanglement across a cut.
    let o = gaussrt([
        "kappa",
        "--theory",
        "ppt",
        "--json",
        "--partition",
        "A,A",
        "--input",
        src.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(2),
        "single-party partition is rejected"
    );
    let o = gaussrt([
        "kappa",
        "--theory",
        "ppt",
        "--json",
        "--partition",
        "B=1:A=1",
        "--input",
        src.to_str().unwrap(),
    ]);
    let out = json_out(&o);
    assert_eq!(out["partition"], serde_json::json!(["B", "A"]));
    assert!((out["kappa"].as_f64().unwrap() - 1f64.exp()).abs() < 1e-6);
}

#[test]
fn steering_witness_is_normalized() {
    let dir = TempDir::new().unwrap();
    let src = gen(&dir, "tmsv.json", &["tmsv", "--r", "0.5"]);
    let o = gaussrt([
        "witness",
        "--theory",
        "steering",
        "--json",
        "--input",
        src.to_str().unwrap(),
    ]);
    let out = json_out(&o);
    let value = out["value"].as_f64().unwrap();
    assert!((value - 1.0 / 1f64.cosh()).abs() < 1e-6, "{value}");
    assert!((out["normalization"].as_f64().unwrap() - 1.0).abs() < 1e-7);
    assert!(out["verdict"].as_str().unwrap().starts_with("violation"));
    assert!(out["W"]["re"].is_array());
}

#[test]
fn loss_halves_thermal_noise() {
    let dir = TempDir::new().unwrap();
    let src = gen(&dir, "th.json", &["thermal", "--nbar", "1"]);
    let dst = dir.path().join("out.json");
    let o = gaussrt([
        "channel",
        "loss",
        "--eta",
        "0.5",
        "--input",
        src.to_str().unwrap(),
        "--out",
        dst.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    // 0.5 * 3 + 0.5 * 1 = 2.
    assert_scaled_identity(&read_json(&dst), 1, 2.0, 1e-12);

    let inline = dir.path().join("inline.json");
    let o = gaussrt([
        "channel",
        "--apply",
        "loss:eta=0.5",
        "--input",
        src.to_str().unwrap(),
        "--out",
        inline.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert_eq!(read_json(&dst), read_json(&inline));
}

#[test]
fn channels_move_the_mean() {
    let dir = TempDir::new().unwrap();
    let src = gen(&dir, "coh.json", &["coherent", "--u", "2,-1"]);
    let dst = dir.path().join("out.json");
    let o = gaussrt([
        "channel",
        "--apply",
        "loss:eta=0.25",
        "--input",
        src.to_str().unwrap(),
        "--out",
        dst.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let s: Vec<f64> = read_json(&dst)["s"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert!(
        (s[0] - 1.0).abs() < 1e-12 && (s[1] + 0.5).abs() < 1e-12,
        "{s:?}"
    );
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"modes": 1, "ordering": "xxpp", "partition": ["A"], "V": [[0.5, 0], [0, 0.5]]}"#,
    )
    .unwrap();
    assert_eq!(
        gaussrt(["validate", "--input", bad.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        gaussrt(["kappa", "--theory", "ppt", "--input", bad.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    let missing = dir.path().join("missing.json");
    assert_eq!(
        gaussrt(["validate", "--input", missing.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        gaussrt(["harness", "--suite", "bogus"]).status.code(),
        Some(2)
    );
    assert_eq!(gaussrt(["frobnicate"]).status.code(), Some(2));

    // A no-go configuration whose target is no more resourceful than the
    // source violates the experiment's precondition.
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"theories": ["ppt"], "source_r": 0.8, "target_r": 0.3}"#,
    )
    .unwrap();
    let o = gaussrt([
        "harness",
        "--suite",
        "nogo",
        "--config",
        cfg.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));

    let vac = gen(&dir, "vac.json", &["vacuum"]);
    let o = Command::new(env!("CARGO_BIN_EXE_gaussrt"))
        .args(["validate", "--input", vac.to_str().unwrap()])
        .env("GAUSSRT_TOL", "nope")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn tolerance_override_accepts_slightly_unphysical_input() {
    let dir = TempDir::new().unwrap();
    let doc = dir.path().join("edge.json");
    std::fs::write(
        &doc,
        r#"{"modes": 1, "ordering": "xxpp", "partition": ["A"], "V": [[0.9999, 0], [0, 1]]}"#,
    )
    .unwrap();
    let strict = gaussrt(["validate", "--input", doc.to_str().unwrap()]);
    assert_eq!(strict.status.code(), Some(2));
    let loose = Command::new(env!("CARGO_BIN_EXE_gaussrt"))
        .args(["validate", "--input", doc.to_str().unwrap()])
        .env("GAUSSRT_TOL", "1e-3")
        .output()
        .unwrap();
    assert!(loose.status.success());
}

#[test]
fn harness_reports_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = gaussrt([
            "harness",
            "--suite",
            "tensorization",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stdout(&o));
        assert!(stdout(&o).starts_with("tensorization: PASS"));
        std::fs::read_to_string(out).unwrap()
    };
    assert_eq!(run("a.json"), run("b.json"));
}

#[test]
fn nogo_summary_reports_constant_kappa() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"theories": ["steering", "ppt"], "channel_samples": 10}"#,
    )
    .unwrap();
    let o = gaussrt([
        "harness",
        "--suite",
        "nogo",
        "--config",
        cfg.to_str().unwrap(),
    ]);
    let doc = json_out(&o);
    assert_eq!(doc["passed"], true);
    let report = &doc["reports"][0];
    for rec in report["records"].as_array().unwrap() {
        let ks: Vec<f64> = rec["kappa_copies"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_f64().unwrap())
            .collect();
        assert_eq!(ks.len(), 8);
        assert!(ks.iter().all(|k| (k - ks[0]).abs() <= 1e-6));
        assert!(rec["kappa_target"].as_f64().unwrap() > ks[0]);
    }
    assert!(report["summary"][0].as_str().unwrap().contains("stays at"));
}
