use std::process::{Command, Output};

fn bjss(args: &[&str]) -> Output {
    let dir = tempfile::tempdir().unwrap();
    bjss_in(dir.path(), args)
}

fn bjss_in(dir: &std::path::Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bjss"))
        .args(args)
        .env("BJSS_OUT_DIR", dir)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<csv::StringRecord> {
    csv::Reader::from_reader(text.as_bytes())
        .records()
        .map(|r| r.unwrap())
        .collect()
}

fn column(text: &str, name: &str) -> Vec<String> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let idx = r.headers().unwrap().iter().position(|h| h == name).unwrap();
    r.records().map(|rec| rec.unwrap()[idx].to_string()).collect()
}

const SCHEMA: &str = "kind,source,eta,l,alpha2,phi_c,phi_cp,phi_d,phi_dp,value,bound,violated";

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(bjss(&["--help"]).status.code(), Some(0));
    assert_eq!(bjss(&["--version"]).status.code(), Some(0));
    assert_eq!(bjss(&["margin", "--help"]).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        &["frobnicate"][..],
        &["margin", "--kind", "bell"],
        &["margin", "--eta", "1.5"],
        &["margin", "--phi-c", "0"],
        &["critical-curve", "--grid", "1:0:0.1", "--kind", "ch"],
        &["critical-curve", "--grid", "0:1"],
        &["critical-curve"],
        &["approx-check", "--x", "0"],
        &["probabilities", "--source", "exact"],
    ] {
        assert_eq!(bjss(args).status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn margin_examples() {
    let o = bjss(&["margin", "--kind", "ch", "--eta", "1", "--l", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().next().unwrap(), SCHEMA);
    assert_eq!(column(&text, "violated"), ["true"]);

    let o = bjss(&["margin", "--kind", "werner-ch", "--eta", "0.8", "--l", "1"]);
    assert_eq!(column(&stdout(&o), "violated"), ["false"]);

    let o = bjss(&["margin", "--kind", "chsh", "--eta", "1", "--l", "1", "--source", "oracle", "--alpha2", "50"]);
    assert_eq!(column(&stdout(&o), "source"), ["oracle"]);
    assert_eq!(column(&stdout(&o), "violated"), ["true"]);
}

#[test]
fn mixed_margin_at_low_transmission_is_not_violated() {
    // the printed 3 - 2 sqrt 2 threshold does not survive the Fock-space computation
    let o = bjss(&["margin", "--kind", "ch-mixed", "--eta", "0.2", "--l", "1"]);
    assert_eq!(column(&stdout(&o), "violated"), ["false"]);
    let o = bjss(&["margin", "--kind", "ch-mixed", "--eta", "0.2", "--l", "1", "--source", "oracle"]);
    assert_eq!(column(&stdout(&o), "violated"), ["false"]);
}

#[test]
fn user_phases_in_degrees() {
    let deg = bjss(&[
        "margin", "--kind", "ch", "--phi-c", "0", "--phi-cp", "90", "--phi-d", "225", "--phi-dp", "135", "--degrees",
    ]);
    let opt = bjss(&["margin", "--kind", "ch"]);
    let a: f64 = column(&stdout(&deg), "value")[0].parse().unwrap();
    let b: f64 = column(&stdout(&opt), "value")[0].parse().unwrap();
    assert!((a - b).abs() < 1e-12);
}

#[test]
fn werner_curve_is_monotone() {
    let o = bjss(&["critical-curve", "--kind", "werner-ch", "--grid", "0.71:1.0:0.01"]);
    assert_eq!(o.status.code(), Some(0));
    let eta: Vec<f64> = column(&stdout(&o), "eta").iter().map(|v| v.parse().unwrap()).collect();
    assert_eq!(eta.len(), 30);
    assert!(eta.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn all_curves_are_labelled() {
    let o = bjss(&["critical-curve", "--all", "--grid", "0.9,1.0"]);
    let kinds = column(&stdout(&o), "kind");
    for k in ["werner-ch", "ch", "chsh", "ch-mixed"] {
        assert_eq!(kinds.iter().filter(|x| *x == k).count(), 2, "{k}");
    }
}

#[test]
fn curve_without_threshold_reports_skip() {
    let o = bjss(&["critical-curve", "--kind", "ch", "--grid", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(csv_rows(&stdout(&o)).is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("no threshold"));
}

#[test]
fn approx_check_columns() {
    let o = bjss(&["approx-check"]);
    let text = stdout(&o);
    assert!(text.starts_with("source,x,alpha2,ratio_shifted,ratio_weighted,ratio_shifted_weighted,ratio_plain"));
    let last = csv_rows(&text).pop().unwrap();
    for i in 3..7 {
        let r: f64 = last[i].parse().unwrap();
        assert!((r - 1.0).abs() < 1e-2);
    }

    let dev = |x: &str| -> f64 {
        let o = bjss(&["approx-check", "--x", x, "--grid", "100"]);
        let v: f64 = column(&stdout(&o), "ratio_shifted")[0].parse().unwrap();
        (v - 1.0).abs()
    };
    assert!(dev("1.0") < dev("0.2"));
}

#[test]
fn probabilities_examples() {
    let o = bjss(&["probabilities", "--eta", "1", "--l", "1", "--alpha2", "100", "--delta", "3.14159"]);
    let text = stdout(&o);
    let q = column(&text, "quantity");
    let v = column(&text, "value");
    for (q, v) in q.iter().zip(&v) {
        if q == "p_plus" {
            assert!((v.parse::<f64>().unwrap() - 0.5).abs() < 2e-2);
        }
    }
    let o = bjss(&["probabilities", "--eta", "0"]);
    let text = stdout(&o);
    for (q, v) in column(&text, "quantity").iter().zip(column(&text, "value")) {
        if q.starts_with("p_joint") {
            assert_eq!(v.parse::<f64>().unwrap(), 0.0);
        }
    }
    let o = bjss(&["probabilities", "--eta", "0.8", "--l", "0.9", "--alpha2", "4"]);
    let text = stdout(&o);
    let rows: Vec<(String, String, f64)> = column(&text, "quantity")
        .into_iter()
        .zip(column(&text, "source"))
        .zip(column(&text, "abs_dev_oracle"))
        .map(|((q, s), d)| (q, s, d.parse().unwrap()))
        .collect();
    let paper = rows.iter().find(|r| r.0 == "p_joint" && r.1 == "paper").unwrap();
    assert!(paper.2 > 1e-3);
}

#[test]
fn output_is_deterministic_and_goes_to_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["critical-curve", "--all", "--grid", "0.8:1.0:0.05", "--out", "curve.csv"];
    assert_eq!(bjss_in(dir.path(), &args).status.code(), Some(0));
    let first = std::fs::read(dir.path().join("curve.csv")).unwrap();
    assert_eq!(bjss_in(dir.path(), &args).status.code(), Some(0));
    assert_eq!(first, std::fs::read(dir.path().join("curve.csv")).unwrap());
    assert!(!first.is_empty());
}

#[test]
fn json_mirrors_csv() {
    let o = bjss(&["margin", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let row = &v[0];
    for key in SCHEMA.split(',') {
        assert!(row.get(key).is_some(), "{key}");
    }
}

#[test]
fn reproduce_reports_and_writes_ledger() {
    let dir = tempfile::tempdir().unwrap();
    let o = bjss_in(dir.path(), &["reproduce"]);
    let text = stdout(&o);
    for id in [1, 2, 3, 4, 8, 9, 10] {
        assert!(text.contains(&format!("criterion {id:>2} PASS")), "{id}");
    }
    // mixed-CH threshold, ordering and the plain Poisson sum do not hold
    for id in [5, 6, 7] {
        assert!(text.contains(&format!("criterion {id:>2} FAIL")), "{id}");
    }
    assert_eq!(o.status.code(), Some(2));
    let ledger = std::fs::read_to_string(dir.path().join("ledger.csv")).unwrap();
    for key in ["ch-critical-simplification", "chsh-correlation-missing-l", "chsh-threshold-closed-form", "half-angle"] {
        assert!(ledger.contains(key), "{key}");
    }
}

#[test]
fn tampered_tolerance_fails() {
    let o = bjss(&["reproduce", "--tol", "1e-300"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("criterion  1 FAIL"));
}

#[test]
fn printed_source_flags_ledger_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = bjss_in(dir.path(), &["reproduce", "--source", "paper", "--format", "json"]);
    assert_eq!(o.status.code(), Some(2));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("ledger.json")).unwrap()).unwrap();
    assert!(v.as_array().unwrap().iter().all(|e| e["agree"] == false));
}
