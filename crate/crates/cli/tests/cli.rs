use std::process::{Command, Output};

use serde_json::Value;

fn naqc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_naqc")).args(args).output().expect("binary runs")
}

fn naqc_threads(threads: &str, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_naqc")).env("NAQC_THREADS", threads).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).unwrap()
}

fn error_kind(o: &Output) -> String {
    let v: Value = serde_json::from_slice(&o.stderr).expect("stderr is JSON");
    v["error"]["kind"].as_str().unwrap().to_string()
}

#[test]
fn critical_qubit_l1() {
    let v = json(&naqc(&["--json", "critical", "--d", "2", "--metric", "l1"]));
    assert!((v["N_c"].as_f64().unwrap() - 2.449490).abs() < 1e-6);
    assert!((v["lambda_crit"].as_f64().unwrap() - 0.816497).abs() < 1e-6);
    assert!((v["optimizer_max"].as_f64().unwrap() - 2.449490).abs() < 1e-6);
}

#[test]
fn critical_qubit_re_has_no_optimizer_echo() {
    let v = json(&naqc(&["--json", "critical", "--d", "2", "--metric", "re"]));
    assert!((v["N_c"].as_f64().unwrap() - 2.232022653747).abs() < 1e-9);
    assert!(v.get("optimizer_max").is_none());
}

#[test]
fn human_default_is_not_json() {
    let s = stdout(&naqc(&["chsh", "--lambda1", "0.8333333333333334"]));
    assert!(s.contains("CHSH = 2.28"));
    assert!(serde_json::from_str::<Value>(&s).is_err());
}

#[test]
fn chsh_json() {
    let v = json(&naqc(&["--json", "chsh", "--lambda1", "0.8333333333333334"]));
    assert!((v["chsh"].as_f64().unwrap() - 2.2853).abs() < 1e-3);
    assert!((v["violation_percent"].as_f64().unwrap() - 14.26).abs() < 0.05);
}

#[test]
fn asc_frameworks() {
    let p = json(&naqc(&["--json", "asc", "--d", "3", "--lambda", "1", "--metric", "l1"]));
    assert_eq!(p["framework"], "permuted");
    assert!((p["value"].as_f64().unwrap() - 8.0).abs() < 1e-9);
    assert!(p["violates"].as_bool().unwrap());
    let a = json(&naqc(&["--json", "asc", "--d", "3", "--lambda", "1", "--metric", "l1", "--framework", "averaged"]));
    assert_eq!(a["framework"], "averaged");
    assert!(a["permutation"].is_null());
}

#[test]
fn chain_report() {
    let v = json(&naqc(&["--json", "chain", "--d", "2", "--lambdas", "0.82,1.0", "--metric", "l1"]));
    let alices = v["alices"].as_array().unwrap();
    assert_eq!(alices.len(), 2);
    assert!((alices[0]["value"].as_f64().unwrap() - 2.46).abs() < 1e-12);
    assert!(alices[0]["violates"].as_bool().unwrap());
    assert!(!alices[1]["violates"].as_bool().unwrap());
}

#[test]
fn chain_per_setting_and_bias() {
    let v = json(&naqc(&[
        "--json", "chain", "--d", "2", "--lambdas", "1,1,1,1,1,1", "--per-setting", "--bias", "0.2,0.3,0.5", "--metric",
        "l1",
    ]));
    assert!((v["alices"][0]["value"].as_f64().unwrap() - 3.0).abs() < 1e-12);
    assert!((v["alices"][1]["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let bad = naqc(&["chain", "--d", "2", "--lambdas", "1,1", "--per-setting", "--metric", "l1"]);
    assert_eq!(bad.status.code(), Some(2));
    let bad_bias = naqc(&["chain", "--d", "2", "--lambdas", "1", "--bias", "0.5,0.6,0.1", "--metric", "l1"]);
    assert_eq!(bad_bias.status.code(), Some(2));
    assert_eq!(error_kind(&bad_bias), "usage");
}

#[test]
fn mub_csv_and_check() {
    let csv = stdout(&naqc(&["mub", "--d", "3"]));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "v,a,n,re,im");
    assert_eq!(lines.len(), 1 + 4 * 3 * 3);
    let r = json(&naqc(&["--json", "mub", "--d", "7", "--check"]));
    assert!(r["max_unbiasedness_error"].as_f64().unwrap() < 1e-10);
}

#[test]
fn tradeoff_series() {
    let csv = stdout(&naqc(&["tradeoff", "--dmax", "29"]));
    let mut series: Vec<String> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap().to_string()).collect();
    series.dedup();
    assert_eq!(series.len(), 10 + 2);
    assert_eq!(&series[10..], ["square", "optimal"]);
    assert_eq!(csv.lines().count(), 1 + 12 * 1001);
}

#[test]
fn fig3_unsharp_deltas_negative() {
    let csv = stdout(&naqc(&["fig3", "--dmax", "13", "--metric", "l1"]));
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "d,lambda1,asc2,N_c,delta");
    let deltas: Vec<f64> = lines.map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(deltas.len(), 6);
    assert!(deltas.iter().all(|&x| x < 0.0));
    assert!((deltas[0] + 0.2948).abs() < 1e-3);
}

#[test]
fn scan_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig4.csv");
    let out = naqc(&["scan", "--d", "2", "--res", "21", "--metric", "l1", "--out", path.to_str().unwrap()]);
    assert!(stdout(&out).contains("lambda_1t"));
    let csv = std::fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "lambda1,lambda2,asc1,asc2,v1,v2");
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 21 * 21);
    assert!(rows.iter().all(|r| !(r[4] == "1" && r[5] == "1")));
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let args = ["--json", "critical", "--d", "5", "--metric", "re"];
    let a = naqc_threads("1", &args);
    let b = naqc_threads("2", &args);
    let c = naqc_threads("1", &args);
    assert_eq!(stdout(&a), stdout(&b));
    assert_eq!(a.stdout, c.stdout);
    let s = ["scan", "--d", "3", "--res", "15", "--metric", "re"];
    assert_eq!(naqc_threads("1", &s).stdout, naqc_threads("3", &s).stdout);
}

#[test]
fn seed_override_is_accepted() {
    let v = json(&naqc(&["--json", "--seed", "7", "critical", "--d", "3", "--metric", "re"]));
    assert!((v["N_c"].as_f64().unwrap() - 4.97603020499597).abs() < 1e-7);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["critical", "--d", "4", "--metric", "l1"],
        vec!["critical", "--d", "3", "--metric", "nope"],
        vec!["asc", "--d", "3", "--lambda", "0", "--metric", "l1"],
        vec!["frobnicate"],
    ] {
        let o = naqc(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert_eq!(error_kind(&o), "usage");
    }
    assert_eq!(naqc_threads("zero", &["chsh", "--lambda1", "0.5"]).status.code(), Some(2));
}

#[test]
fn computation_errors_exit_1() {
    let o = naqc(&["chain", "--d", "2", "--lambdas", "1,1,1,1,1,1,1,1,1,1,1,1", "--metric", "l1"]);
    // 3^11 branch states exceed the enumeration cap; that is a usage problem.
    assert_eq!(o.status.code(), Some(2));
    let o = naqc(&["--out", "/nonexistent/dir/x.csv", "mub", "--d", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(error_kind(&o), "computation");
}
