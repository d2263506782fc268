//! Black-box tests of the `kgbound` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn kgbound(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kgbound"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

const TABLE1: [&str; 8] = ["--family", "tanh", "--m", "0.25", "--s0", "4", "--v0", "0.35"];
const TABLE3: [&str; 8] = ["--family", "exp", "--m", "1.6", "--s0", "4", "--v0", "0.25"];
const TABLE4: [&str; 8] = ["--family", "linear", "--m", "0.5", "--s0", "4", "--v0", "0.35"];

fn with<'a>(cmd: &'a str, couplings: &[&'a str], rest: &[&'a str]) -> Vec<&'a str> {
    std::iter::once(cmd)
        .chain(couplings.iter().copied())
        .chain(rest.iter().copied())
        .collect()
}

/// Compares against `tests/golden/<name>`; `KGBOUND_BLESS=1` rewrites it.
fn golden(name: &str, actual: &str) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    if std::env::var_os("KGBOUND_BLESS").is_some() {
        std::fs::write(&path, actual).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, expected, "golden file {name} differs");
}

#[test]
fn output_record_has_fixed_top_level_keys() {
    let o = kgbound(&with("spectrum", &TABLE1, &[]));
    assert!(o.status.success());
    let v = json(&o);
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["command", "inputs", "results", "schema_version", "warnings"]);
    assert_eq!(v["schema_version"], "1");
    assert_eq!(v["command"], "spectrum");
}

#[test]
fn spectrum_json_golden() {
    let o = kgbound(&with("spectrum", &TABLE1, &[]));
    assert_eq!(o.status.code(), Some(0));
    golden("spectrum_table1.json", &stdout(&o));
    let v = json(&o);
    assert_eq!(v["results"]["counts"]["plus"], 3);
    assert_eq!(v["results"]["counts"]["minus"], 3);
    assert_eq!(v["results"]["truncated"], false);
}

#[test]
fn spectrum_csv_golden() {
    let o = kgbound(&with("spectrum", &TABLE3, &["--format", "csv"]));
    assert_eq!(o.status.code(), Some(0));
    golden("spectrum_table3.csv", &stdout(&o));
    let mut reader = csv::Reader::from_reader(o.stdout.as_slice());
    let headers = reader.headers().unwrap().clone();
    assert_eq!(headers.get(0), Some("family"));
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.iter().filter(|r| &r[3] == "accepted").count(), 4);
}

#[test]
fn tables_all_pass_and_csv_golden() {
    let o = kgbound(&["tables", "--table", "all"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["results"]["all_pass"], true);
    assert_eq!(v["results"]["tables"].as_array().unwrap().len(), 4);

    let o = kgbound(&["tables", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    golden("tables.csv", &stdout(&o));
}

#[test]
fn single_table_selection() {
    let v = json(&kgbound(&["tables", "--table", "3"]));
    let tables = v["results"]["tables"].as_array().unwrap();
    assert_eq!(tables.len(), 1);
    assert_eq!(tables[0]["family"], "exp");
    assert_eq!(tables[0]["rows"].as_array().unwrap().len(), 8);
}

#[test]
fn inputs_round_trip_deterministically() {
    let first = kgbound(&with("spectrum", &TABLE4, &["--nmax", "5"]));
    let v = json(&first);
    let inputs = &v["inputs"];
    let fmt = |k: &str| inputs[k].to_string();
    let family = inputs["family"].as_str().unwrap().to_string();
    let (m, s0, v0, nmax) = (fmt("m"), fmt("s0"), fmt("v0"), fmt("nmax"));
    let second = kgbound(&[
        "spectrum", "--family", &family, "--m", &m, "--s0", &s0, "--v0", &v0, "--nmax", &nmax,
    ]);
    assert_eq!(first.stdout, second.stdout);
}

fn comment(text: &str, key: &str) -> String {
    text.lines()
        .filter_map(|l| l.strip_prefix("# "))
        .flat_map(|l| l.split(' '))
        .find_map(|kv| kv.strip_prefix(&format!("{key}=")).map(str::to_string))
        .unwrap_or_else(|| panic!("no {key} in comment block"))
}

#[test]
fn wavefunction_csv_is_nodeless_ground_state() {
    let o = kgbound(&with("wavefunction", &TABLE4, &["--n", "0", "--sign", "plus"]));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(comment(&text, "residual").parse::<f64>().unwrap() < 1e-4);
    assert_eq!(comment(&text, "nodes"), "0");

    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    assert_eq!(reader.headers().unwrap(), vec!["x", "re_psi", "im_psi"]);
    let rows: Vec<(f64, f64, f64)> = reader.deserialize().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 4001);
    assert!(rows.iter().all(|r| r.2 == 0.0));
    let h = rows[1].0 - rows[0].0;
    let norm: f64 = rows
        .windows(2)
        .map(|w| 0.5 * h * (w[0].1 * w[0].1 + w[1].1 * w[1].1))
        .sum();
    assert!((norm - 1.0).abs() < 1e-9, "norm {norm}");
}

#[test]
fn shifted_wavefunction_is_complex_with_same_epsilon() {
    let base = stdout(&kgbound(&with(
        "wavefunction",
        &TABLE4,
        &["--n", "0", "--sign", "plus"],
    )));
    let o = kgbound(&with(
        "wavefunction",
        &TABLE4,
        &["--n", "0", "--sign", "plus", "--shift", "0.3"],
    ));
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(comment(&text, "epsilon"), comment(&base, "epsilon"));
    assert!(comment(&text, "residual").parse::<f64>().unwrap() < 1e-3);
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let rows: Vec<(f64, f64, f64)> = reader.deserialize().map(Result::unwrap).collect();
    assert!(rows.iter().any(|r| r.2.abs() > 1e-3));
}

#[test]
fn wavefunction_json_and_explicit_grid() {
    let o = kgbound(&with(
        "wavefunction",
        &TABLE1,
        &[
            "--n",
            "1",
            "--sign",
            "minus",
            "--grid",
            "-15:15:4001",
            "--format",
            "json",
        ],
    ));
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["inputs"]["grid"]["count"], 4001);
    assert_eq!(v["results"]["nodes"], 1);
    assert!(v["results"]["residual"].as_f64().unwrap() < 1e-3);
    assert_eq!(v["results"]["re_psi"].as_array().unwrap().len(), 4001);
}

#[test]
fn rejected_level_exits_three_with_reason() {
    let o = kgbound(&with("wavefunction", &TABLE1, &["--n", "5", "--sign", "plus"]));
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).is_empty());
    assert!(stderr(&o).contains("S2NonPositive"), "{}", stderr(&o));

    let o = kgbound(&with("wavefunction", &TABLE1, &["--n", "3", "--sign", "minus"]));
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("S1NonPositive"), "{}", stderr(&o));
}

#[test]
fn preconditions_exit_two() {
    let massless = ["spectrum", "--family", "tanh", "--m", "0", "--s0", "4", "--v0", "0.35"];
    assert_eq!(kgbound(&massless).status.code(), Some(2));
    let vector_dominated = ["spectrum", "--family", "exp", "--m", "1", "--s0", "0.3", "--v0", "0.5"];
    let o = kgbound(&vector_dominated);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).is_empty());
    let pole = with("verify", &TABLE1, &["--check", "pt", "--shift", "1.6"]);
    assert_eq!(kgbound(&pole).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(kgbound(&[]).status.code(), Some(1));
    assert_eq!(kgbound(&["spectrum", "--family", "tanh"]).status.code(), Some(1));
    assert_eq!(
        kgbound(&with("wavefunction", &TABLE1, &["--n", "0", "--sign", "both"]))
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        kgbound(&with(
            "wavefunction",
            &TABLE1,
            &["--n", "0", "--sign", "plus", "--grid", "1:0:5"]
        ))
        .status
        .code(),
        Some(1)
    );
    assert_eq!(kgbound(&["--help"]).status.code(), Some(0));
}

#[test]
fn verify_pt_reports_defect_and_passing_residuals() {
    let o = kgbound(&with("verify", &TABLE1, &["--check", "pt", "--shift", "0.4"]));
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v = json(&o);
    let checks = v["results"]["checks"].as_array().unwrap();
    let defects: Vec<f64> = checks
        .iter()
        .filter(|c| c["check"] == "pt_defect")
        .map(|c| c["measured"].as_f64().unwrap())
        .collect();
    assert_eq!(defects.len(), 6);
    assert!(defects.iter().all(|&d| d > 0.0));
    assert!(checks
        .iter()
        .filter(|c| c["check"] == "shifted_residual")
        .all(|c| c["pass"] == true));
}

#[test]
fn verify_oracle_reports_marginal_skip() {
    let o = kgbound(&with("verify", &TABLE3, &["--check", "oracle"]));
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let skipped: Vec<&Value> = v["results"]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["note"] == "skipped_marginal")
        .collect();
    assert_eq!(skipped.len(), 1);
    assert_eq!(skipped[0]["n"], 1);
    assert_eq!(skipped[0]["sign"], "minus");
    assert!(stderr(&o).contains("marginal"));
}

#[test]
fn verify_failure_exits_four() {
    // Too few points for a 2e-3 oracle agreement.
    let o = kgbound(&with(
        "verify",
        &TABLE1,
        &["--check", "oracle", "--oracle-points", "201"],
    ));
    assert_eq!(o.status.code(), Some(4), "{}", stdout(&o));
    assert_eq!(json(&o)["results"]["all_pass"], false);
}

#[test]
fn verify_shape_csv() {
    let o = kgbound(&with("verify", &TABLE4, &["--check", "shape", "--format", "csv"]));
    assert_eq!(o.status.code(), Some(0));
    let mut reader = csv::Reader::from_reader(o.stdout.as_slice());
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 2 * 2 * 65);
    assert!(rows.iter().all(|r| &r[5] == "true"));
}
