use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::atomic::{AtomicUsize, Ordering};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use qflow::args::{parse_range, parse_space, parse_window, SpaceArg};
use qflow::spec_doc::{parse_document, AnySpec, QChoice, RingChoice};
use qflow::CliError;
use serde_json::Value;

fn qflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qflow")).args(args).output().expect("run qflow")
}

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn scratch(tag: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("qflow-cli-{tag}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&d);
    fs::create_dir_all(&d).unwrap();
    d
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn gaussian_binomial(n: u32, k: u32, q: &BigRational) -> BigRational {
    let pow = |e: u32| (0..e).fold(BigRational::one(), |acc, _| acc * q);
    (1..=k).fold(BigRational::one(), |acc, j| {
        acc * (BigRational::one() - pow(n - k + j)) / (BigRational::one() - pow(j))
    })
}

#[test]
fn heine_spec_gives_gaussian_binomials() {
    let dir = scratch("heine");
    let out = dir.join("t.csv");
    let o = qflow(&["solve", &data("heine.json"), "-o", out.to_str().unwrap(), "--both-paths"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("n,m,component,value\n"));
    let q = BigRational::new(BigInt::from(3), BigInt::from(2));
    let rows = rows(&text);
    assert_eq!(rows.len(), 13 * 13);
    for r in rows {
        let (n, m): (u32, u32) = (r[0].parse().unwrap(), r[1].parse().unwrap());
        let got: BigRational = r[3].parse().unwrap();
        assert_eq!(got, gaussian_binomial(n + m, m, &q), "({n},{m})");
    }
    let cc: Value = serde_json::from_str(&fs::read_to_string(dir.join("t.cross_check.json")).unwrap()).unwrap();
    assert_eq!(cc["agree"], Value::Bool(true));
    let diag: Value = serde_json::from_str(&fs::read_to_string(dir.join("t.diagnostics.json")).unwrap()).unwrap();
    assert_eq!(diag["path"], "x-major");
}

#[test]
fn float_ring_writes_re_im_columns() {
    let dir = scratch("float");
    let out = dir.join("t.csv");
    let o = qflow(&["solve", &data("heine.json"), "-o", out.to_str().unwrap(), "--ring", "float", "--window", "4,4"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("n,m,component,re,im\n"));
    let rows = rows(&text);
    assert_eq!(rows.len(), 25);
    let r = rows.iter().find(|r| r[0] == "1" && r[1] == "1").unwrap();
    assert_eq!(r[3].parse::<f64>().unwrap(), 2.5);
}

#[test]
fn zero_forcing_gives_zero_table() {
    let dir = scratch("zero");
    let spec = write(
        &dir,
        "zero.json",
        r#"{"operator":"dq","p":1,"alpha":1,"N":2,"q":{"mode":"gaussian","value":[[3,2],[1,2]]},
            "truncation":{"nx":5,"ne":4},
            "F":{"A":[[0,0,[[1,0],[0,2]]],[1,1,[[1,1],[0,1]]]],
                 "nonlinear":[{"I":[1,1],"terms":[[0,0,[1,0]]]}]}}"#,
    );
    let out = dir.join("t.csv");
    let o = qflow(&["solve", &spec, "-o", out.to_str().unwrap(), "--both-paths"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = rows(&fs::read_to_string(&out).unwrap());
    assert_eq!(rows.len(), 6 * 5 * 2);
    assert!(rows.iter().all(|r| r[3] == "0+0i"), "{rows:?}");
}

#[test]
fn sigma_with_p_minus_one_is_rejected() {
    let dir = scratch("pm1");
    let spec = write(
        &dir,
        "bad.json",
        r#"{"operator":"sigmaq","p":-1,"alpha":1,"N":1,"q":{"mode":"rational","value":[2,1]},
            "truncation":{"nx":3,"ne":3},"F":{"b":[[1,0,[1]]],"A":[[0,0,[[1]]]]}}"#,
    );
    let o = qflow(&["solve", &spec, "-o", dir.join("t.csv").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("p=-1 requires d_q operator"));
    assert!(!dir.join("t.csv").exists());
}

#[test]
fn schema_errors_name_the_field() {
    let dir = scratch("schema");
    let spec = write(
        &dir,
        "bad.json",
        r#"{"operator":"dq","p":0,"alpha":1,"N":1,"q":{"mode":"rational","value":[2,1]},
            "truncation":{"nx":3,"ne":"three"},"F":{}}"#,
    );
    let o = qflow(&["solve", &spec, "-o", dir.join("t.csv").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("truncation.ne"));

    let spec = write(
        &dir,
        "bad2.json",
        r#"{"operator":"dq","p":0,"alpha":1,"N":2,"q":{"mode":"rational","value":[2,1]},
            "truncation":{"nx":3,"ne":3},"F":{"b":[[4,0,[1,0]],[1,1,[1]]],"A":[[0,0,[[1,0],[0,1]]]]}}"#,
    );
    let o = qflow(&["solve", &spec, "-o", dir.join("t.csv").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("F.b[0]") && err.contains("F.b[1]"), "{err}");
}

#[test]
fn reproduce_reports_and_exits_cleanly() {
    let o = qflow(&["reproduce", "dq-p1-pm", "--q", "symbolic", "--max-order", "6"]);
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.lines().count() == 2 && text.lines().all(|l| l.starts_with("PASS")), "{text}");
    let o = qflow(&["reproduce", "euler-q", "--alpha", "2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = qflow(&["reproduce", "no-such-example"]);
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn pm_ladder_prints_rungs() {
    let o = qflow(&["pm-ladder", "--m-max", "3", "--full"]);
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("P_2 = (1)"));
    assert!(text.contains("P_3 = (-q^2)*x^2 + (q)*x + (q + 1)"), "{text}");
    assert_eq!(qflow(&["pm-ladder", "--m-max", "1"]).status.code(), Some(2));
}

#[test]
fn empty_norm_run_succeeds() {
    let dir = scratch("norms");
    let out = dir.join("n.json");
    let o = qflow(&["norms", "--samples", "0", "-o", out.to_str().unwrap()]);
    assert!(o.status.success());
    let doc: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["samples"], 0);
    assert_eq!(doc["total_violations"], 0);
    assert!(doc["tallies"].as_array().unwrap().iter().all(|t| t["checked"] == 0));
    assert_eq!(qflow(&["norms", "--q", "0.5", "--samples", "0"]).status.code(), Some(2));
}

#[test]
fn primed_mode_includes_classical_limit() {
    let dir = scratch("primed");
    let out = dir.join("n.json");
    let o = qflow(&["norms", "--q", "1.0001", "--samples", "5", "-o", out.to_str().unwrap()]);
    assert!(o.status.success());
    let doc: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let gaps = doc["classical_limit"].as_array().unwrap();
    assert!(!gaps.is_empty());
    assert!(gaps.iter().all(|g| g["relative_gap"].as_f64().unwrap() < 1e-2));
}

fn growth_json(args: &[&str]) -> Value {
    static RUNS: AtomicUsize = AtomicUsize::new(0);
    let dir = scratch(&format!("growth-{}", RUNS.fetch_add(1, Ordering::Relaxed)));
    let out = dir.join("g.json");
    let mut full = vec!["growth"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["-o", out.to_str().unwrap()]);
    let o = qflow(&full);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap()
}

#[test]
fn reingested_table_gives_same_verdicts() {
    let dir = scratch("roundtrip");
    for (id, q, space) in [("sigma-x2", "3/2", "monomial:2,1"), ("model-M", "3/2", "o0"), ("heine", "3/2+1/5i", "o0")] {
        let table = dir.join(format!("{id}.csv"));
        let o = qflow(&["reproduce", id, "--q", q, "--max-order", "12", "--table", table.to_str().unwrap()]);
        assert!(o.status.success());
        let a = growth_json(&["--example", id, "--q", q, "--window", "12,12", "--space", space]);
        let b = growth_json(&["--table", table.to_str().unwrap(), "--q", q, "--space", space]);
        for key in ["row_maxima", "row_fit", "row_fit_error", "space", "window"] {
            assert_eq!(a[key], b[key], "{id}: {key}");
        }
    }
    let float = dir.join("f.csv");
    let o = qflow(&["reproduce", "model-M", "--q", "1.5", "--max-order", "12", "--table", float.to_str().unwrap()]);
    assert!(o.status.success());
    let a = growth_json(&["--example", "model-M", "--q", "1.5", "--window", "12,12", "--space", "o0"]);
    let b = growth_json(&["--table", float.to_str().unwrap(), "--q", "1.5", "--space", "o0"]);
    assert_eq!(a["space"], b["space"]);
}

#[test]
fn growth_examples() {
    let g = growth_json(&["--example", "euler-q", "--window", "61,60"]);
    let s = g["row_fit"]["s"].as_f64().unwrap();
    assert!((0.95..=1.05).contains(&s), "s = {s}");
    let g = growth_json(&["--example", "sigma-x2", "--q", "3/2", "--window", "25,12"]);
    assert_eq!(g["space"]["space"], "monomial:2,1");
    assert_eq!(g["space"]["consistent"], true);
    let g = growth_json(&["--example", "model-M", "--q", "3/2", "--window", "12,12"]);
    let c = &g["space"]["constants"];
    assert!((c["c"].as_f64().unwrap() - 1.0).abs() < 1e-12 && (c["a"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn confluence_single_point_has_one_row() {
    let dir = scratch("confluence");
    let out = dir.join("c.json");
    let o = qflow(&["confluence", "dq-p1-pm", "--k-range", "6", "-o", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let doc: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["rows"].as_array().unwrap().len(), 1);
    assert_eq!(doc["converging"], Value::Null);
    assert_eq!(doc["limit_diagonal"][5], "24");
    let o = qflow(&["confluence", "dq-pminus1", "--k-range", "3..6", "-o", out.to_str().unwrap()]);
    assert!(o.status.success());
    let doc: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["converging"], true);
    assert_eq!(doc["limit_discipline"]["stable"], true);
    assert_eq!(qflow(&["confluence", "model-M"]).status.code(), Some(2));
}

#[test]
fn argument_parsers() {
    assert_eq!(parse_window("12, 5"), Ok((12, 5)));
    assert!(parse_window("12").is_err());
    assert_eq!(parse_range("3..7"), Ok((3, 7)));
    assert_eq!(parse_range("3..=7"), Ok((3, 7)));
    assert_eq!(parse_range("4"), Ok((4, 4)));
    assert!(parse_range("7..3").is_err());
    assert_eq!(parse_space("monomial:2,1"), Ok(SpaceArg::Monomial { p: 2, alpha: 1 }));
    assert!(parse_space("monomial:0,1").is_err());
    assert_eq!(QChoice::parse_flag("symbolic").unwrap(), QChoice::Symbolic);
    assert!(matches!(QChoice::parse_flag("3/2").unwrap(), QChoice::Rational(_)));
    assert!(matches!(QChoice::parse_flag("3/2-1/3i").unwrap(), QChoice::Gaussian(_)));
    assert!(matches!(QChoice::parse_flag("1.25").unwrap(), QChoice::Float(_)));
    assert!(matches!(QChoice::parse_flag("1.2,0.4").unwrap(), QChoice::Float(_)));
    assert!(QChoice::parse_flag("banana").is_err());
}

#[test]
fn document_rings() {
    let text = fs::read_to_string(data("heine.json")).unwrap();
    let doc = parse_document(&text).unwrap();
    assert!(matches!(doc.to_spec(RingChoice::Exact, None).unwrap(), AnySpec::Rational(_)));
    assert!(matches!(doc.to_spec(RingChoice::Float, None).unwrap(), AnySpec::Float(_)));
    let sym = text.replace(r#"{"mode": "rational", "value": [3, 2]}"#, r#"{"mode": "symbolic"}"#);
    let doc = parse_document(&sym).unwrap();
    assert!(matches!(doc.to_spec(RingChoice::Exact, None).unwrap(), AnySpec::Symbolic(_)));
    assert!(matches!(doc.to_spec(RingChoice::Float, None), Err(CliError::Validation(_))));
}

#[test]
fn exit_codes() {
    assert_eq!(CliError::Validation(String::new()).exit_code(), 2);
    assert_eq!(CliError::Mismatch(String::new()).exit_code(), 3);
    assert_eq!(CliError::Other(anyhow::anyhow!("x")).exit_code(), 1);
    let e: CliError = qflow_core::Error::InvalidSpec(vec!["bad".into()]).into();
    assert_eq!(e.exit_code(), 2);
}
