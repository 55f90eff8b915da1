use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const PAPER_CSV: &str = "\
0.1,0.1,0.3,-0.7,0.7,-0.1,0.1,0.3
0.4,-0.8,-0.4,-0.1,0.3,0.3,0.3,-0.5
0.3,0.5,-0.5,0.4,0.5,-0.7,0.1,-0.4
-0.7,-0.3,0.1,0.3,0.4,-0.5,0.5,-0.7
-0.5,0.1,-0.7,-0.5,-0.1,-0.4,-0.8,-0.1
";

fn cscert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cscert"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn certify_paper_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "a.csv", PAPER_CSV);
    let out = cscert(&["certify", "--matrix", m.to_str().unwrap(), "--kmax", "5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["spark"], 6);
    assert_eq!(v["spark_limit"], 2);
    assert_eq!(v["coherence"], 0.49);
    assert_eq!(v["coherence_limit"], 1);
    assert_eq!(v["rip_unique_limit"], 1);
    assert_eq!(v["l1_equiv_limit_0493"], 1);
    assert_eq!(v["l1_equiv_limit_sqrt2"], 0);
    let deltas: Vec<f64> = v["rip"]["orders"]
        .as_array()
        .unwrap()
        .iter()
        .map(|o| o["delta"].as_f64().unwrap())
        .collect();
    let want = [0.0, 0.49, 0.9406, 1.2063, 1.3368];
    assert_eq!(deltas.len(), 5);
    for (d, w) in deltas.iter().zip(want) {
        assert!((d - w).abs() < 5e-5, "{d} vs {w}");
    }
}

#[test]
fn certify_text_and_budget_exhaustion() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "a.csv", PAPER_CSV);
    let path = m.to_str().unwrap();
    let out = cscert(&["certify", "--matrix", path, "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("spark             6"));

    let out = cscert(&["certify", "--matrix", path, "--budget", "50"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["spark_exact"], false);
    let out = cscert(&["certify", "--matrix", path, "--budget", "50", "--allow-approx"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn certify_unnormalized_needs_flag() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "g.csv", "1,2,0\n0,1,3\n2,0,1\n1,1,1\n");
    let path = m.to_str().unwrap();
    let out = cscert(&["certify", "--matrix", path]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("normalize"));
    let out = cscert(&["certify", "--matrix", path, "--normalize"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn dft_limit_worked_example() {
    let out = cscert(&["dft-limit", "--n", "32", "--missing", "2,3,8,13,19,22,23,28,30"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["k_max"], 7);
    assert_eq!(v["penalty"], 16);
    assert_eq!(v["stride_counts"]["1"], 5);
    assert_eq!(v["derivation"].as_array().unwrap().len(), 5);
}

#[test]
fn dft_limit_from_pattern_file_and_text() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p.txt", "32\n2,3,8,13,19,22,23,28,30\n");
    let out = cscert(&["dft-limit", "--pattern", p.to_str().unwrap(), "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("penalty = 16"));
    assert!(text.contains("unique for K <= 7"));
}

#[test]
fn dft_limit_rejects_non_power_of_two() {
    let out = cscert(&["dft-limit", "--n", "12", "--missing", "1,2"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("N must be a power of two"));
    assert_eq!(err.trim_end().lines().count(), 1);
}

#[test]
fn bad_input_exits_one() {
    assert_eq!(cscert(&["certify", "--bogus"]).status.code(), Some(1));
    assert_eq!(cscert(&["certify", "--matrix", "/nonexistent.csv"]).status.code(), Some(1));
    assert_eq!(cscert(&["dft-limit", "--n", "x"]).status.code(), Some(1));
    assert_eq!(cscert(&["--help"]).status.code(), Some(0));
}

#[test]
fn gen_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("g.csv");
    let o = out_path.to_str().unwrap();
    let run = cscert(&["gen", "--kind", "gaussian", "--rows", "5", "--cols", "8", "--seed", "42", "-o", o]);
    assert_eq!(run.status.code(), Some(0));
    let first = std::fs::read_to_string(&out_path).unwrap();
    assert!(first.ends_with('\n'));
    assert_eq!(first.lines().count(), 5);
    cscert(&["gen", "--kind", "gaussian", "--rows", "5", "--cols", "8", "--seed", "42", "-o", o]);
    assert_eq!(std::fs::read_to_string(&out_path).unwrap(), first);

    let idft = cscert(&["gen", "--kind", "partial-idft", "--cols", "4", "--positions", "0"]);
    assert_eq!(String::from_utf8_lossy(&idft.stdout), "0.25,0.25,0.25,0.25\n");

    let rf = cscert(&["gen", "--kind", "random-fourier", "--cols", "2", "--times", "0"]);
    assert_eq!(String::from_utf8_lossy(&rf.stdout), "1,1\n");

    let bad = cscert(&["gen", "--kind", "partial-idft", "--cols", "4", "--positions", "1,1"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn recon_recovers_a_spike() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "a.csv", PAPER_CSV);
    // column 4 of the matrix
    let y = write(dir.path(), "y.csv", "0.7\n0.3\n0.5\n0.4\n-0.1\n");
    let out = cscert(&[
        "recon",
        "--matrix",
        m.to_str().unwrap(),
        "--measurements",
        y.to_str().unwrap(),
        "--k",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["vector"]["support"]["indices"], serde_json::json!([4]));
    let amp = v["vector"]["values"][0][0].as_f64().unwrap();
    assert!((amp - 1.0).abs() < 1e-12);
}

#[test]
fn experiment_is_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "a.csv", PAPER_CSV);
    let mpath = m.to_str().unwrap();
    let run = |name: &str, fmt: &str| {
        let p = dir.path().join(name);
        let out = cscert(&[
            "experiment", "--matrix", mpath, "--kmin", "1", "--kmax", "3", "--trials", "40",
            "--seed", "9", "--format", fmt, "-o", p.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        std::fs::read(p).unwrap()
    };
    let a = run("a.json", "json");
    let b = run("b.json", "json");
    assert_eq!(a, b);
    let v: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["outcomes"][0]["success_rate"], 1.0);
    let csv = String::from_utf8(run("r.csv", "csv")).unwrap();
    assert!(csv.starts_with("k,success_rate\n1,1\n"));
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn certify_report_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "a.csv", PAPER_CSV);
    let p = dir.path().join("r.json");
    let out = cscert(&["certify", "--matrix", m.to_str().unwrap(), "-o", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let bytes = std::fs::read(&p).unwrap();
    let report: cscert::CertificationReport = serde_json::from_slice(&bytes).unwrap();
    let mut again = serde_json::to_string_pretty(&report).unwrap();
    again.push('\n');
    assert_eq!(again.as_bytes(), &bytes[..]);

    let second = dir.path().join("r2.json");
    cscert(&["certify", "--matrix", m.to_str().unwrap(), "-o", second.to_str().unwrap()]);
    assert_eq!(std::fs::read(second).unwrap(), bytes);
}
