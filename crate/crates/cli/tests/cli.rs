use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn data(name: &str) -> String {
    root().join("data").join(name).display().to_string()
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn asymm(args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_asymm")).args(args).output().unwrap();
    Output {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn json(args: &[&str]) -> Value {
    let out = asymm(args);
    assert_eq!(out.code, 0, "{}", out.stderr);
    serde_json::from_str(&out.stdout).unwrap()
}

fn validator(name: &str) -> jsonschema::Validator {
    let text = std::fs::read_to_string(root().join("schema").join(name)).unwrap();
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).unwrap()
}

fn assert_valid(v: &jsonschema::Validator, doc: &Value) {
    let errors: Vec<String> = v.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}");
}

fn close(v: &Value, want: f64, tol: f64) {
    let got = v.as_f64().unwrap();
    assert!((got - want).abs() <= tol + 1e-12, "{got} vs {want}");
}

#[test]
fn analyze_reproduces_reference_results() {
    let doc = json(&["analyze", "--input", &data("shrinkage_2yr.csv")]);
    let m = &doc["measures"];
    assert_eq!(m[0]["weight"], "uniform");
    close(&m[0]["estimate"], 0.197, 5e-4);
    close(&m[0]["se"], 0.047, 5e-4);
    close(&m[0]["ci_lower"], 0.104, 5e-4);
    close(&m[0]["ci_upper"], 0.289, 5e-4);
    assert_eq!(m[1]["weight"], "pair");
    close(&m[1]["estimate"], 0.172, 5e-4);
    close(&m[1]["se"], 0.035, 5e-4);
    close(&m[1]["ci_lower"], 0.103, 5e-4);
    close(&m[1]["ci_upper"], 0.241, 5e-4);
    close(&doc["symmetry_test"]["statistic"], 23.73, 0.01);

    let doc = json(&["analyze", "--input", &data("induration_5yr.csv"), "--weight", "uniform"]);
    let m = &doc["measures"];
    assert_eq!(m.as_array().unwrap().len(), 1);
    close(&m[0]["estimate"], 0.272, 5e-4);
    close(&m[0]["se"], 0.030, 5e-4);
    close(&m[0]["ci_lower"], 0.212, 5e-4);
    close(&m[0]["ci_upper"], 0.331, 5e-4);
}

#[test]
fn analyze_symmetric_fixture() {
    let doc = json(&["analyze", "--input", &fixture("symmetric.csv")]);
    for m in doc["measures"].as_array().unwrap() {
        assert_eq!(m["estimate"].as_f64(), Some(0.0));
        assert_eq!(m["zero_se"], true);
    }
    assert_eq!(doc["symmetry_test"]["p_value"].as_f64(), Some(1.0));
    assert_eq!(doc["symmetry_test"]["statistic"].as_f64(), Some(0.0));
}

#[test]
fn analyze_documents_match_the_schema() {
    let v = validator("analysis.schema.json");
    for file in [
        "shrinkage_2yr.csv",
        "shrinkage_5yr.csv",
        "induration_2yr.csv",
        "induration_5yr.csv",
    ] {
        for extra in [
            &[][..],
            &["--normalization", "full"],
            &["--weight", "pair", "--lambda", "2"],
        ] {
            let mut args = vec!["analyze", "--input"];
            let path = data(file);
            args.push(&path);
            args.extend_from_slice(extra);
            assert_valid(&v, &json(&args));
        }
    }
    let sym = fixture("symmetric.csv");
    assert_valid(&v, &json(&["analyze", "--input", &sym]));
    let sparse = fixture("empty_pair.csv");
    let doc = json(&["analyze", "--input", &sparse, "--zero-pair-policy", "skip"]);
    assert_valid(&v, &doc);
    assert!(doc["warnings"]
        .as_array()
        .unwrap()
        .iter()
        .any(|w| w.as_str().unwrap().contains("(1, 3)")));
    // The schema is not vacuous.
    let mut broken = doc.clone();
    broken["measures"][0]["estimate"] = Value::from(1.5);
    assert!(!v.is_valid(&broken));
    broken = doc;
    broken.as_object_mut().unwrap().remove("warnings");
    assert!(!v.is_valid(&broken));
}

#[test]
fn coverage_document_matches_the_schema() {
    let doc = json(&[
        "coverage", "--delta", "0.5", "--n", "500", "--reps", "100", "--seed", "3",
    ]);
    assert_valid(&validator("coverage.schema.json"), &doc);
    for key in ["coverage", "mean_ci_width", "mean_estimate", "truth"] {
        assert!(doc[key].is_f64(), "{key}");
    }
    assert_eq!(doc["parameters"]["reps"], 100);
}

#[test]
fn normalization_does_not_change_the_interval() {
    let off = json(&["analyze", "--input", &data("shrinkage_5yr.csv")]);
    let full = json(&[
        "analyze",
        "--input",
        &data("shrinkage_5yr.csv"),
        "--normalization",
        "full",
    ]);
    for k in 0..2 {
        for key in ["estimate", "se", "ci_lower", "ci_upper"] {
            let (a, b) = (
                off["measures"][k][key].as_f64().unwrap(),
                full["measures"][k][key].as_f64().unwrap(),
            );
            assert!((a - b).abs() < 1e-12, "{key}: {a} {b}");
        }
    }
    assert_eq!(off["measures"][0]["n"], 264);
    assert_eq!(full["measures"][0]["n"], 534);
}

#[test]
fn exit_codes() {
    for name in [
        "ragged.csv",
        "non_numeric.csv",
        "diagonal_only.csv",
        "negative.csv",
        "one_by_one.csv",
    ] {
        let out = asymm(&["analyze", "--input", &fixture(name)]);
        assert_eq!(out.code, 2, "{name}: {}", out.stderr);
        assert!(out.stdout.is_empty());
        assert!(out.stderr.contains(name), "{}", out.stderr);
    }
    let missing = asymm(&["analyze", "--input", "/nonexistent/table.csv"]);
    assert_eq!(missing.code, 2);
    assert!(missing.stderr.contains("cannot read"));

    let sparse = fixture("empty_pair.csv");
    let out = asymm(&["analyze", "--input", &sparse]);
    assert_eq!(out.code, 3);
    assert!(out.stderr.contains("(1, 3)"), "{}", out.stderr);
    assert_eq!(asymm(&["analyze", "--input", &sparse, "--weight", "pair"]).code, 0);

    let good = data("shrinkage_2yr.csv");
    for bad in [
        vec!["analyze", "--input", &good, "--alpha", "1.5"],
        vec!["analyze", "--input", &good, "--lambda", "-1"],
        vec!["analyze", "--input", &good, "--lambda", "0,abc"],
        vec!["analyze", "--input", &good, "--weight", "cubic"],
        vec!["analyze"],
        vec!["sweep", "--delta-step", "0"],
        vec!["sweep", "--delta-min", "2", "--delta-max", "1"],
        vec!["geometry", "--grid-step", "0.3"],
        vec!["coverage", "--delta", "0.5", "--reps", "50"],
        vec!["coverage", "--delta", "-1", "--reps", "100"],
        vec!["coverage", "--delta", "0.5", "--dim", "1", "--reps", "100"],
        vec!["frobnicate"],
    ] {
        let out = asymm(&bad);
        assert_eq!(out.code, 2, "{bad:?}: {}", out.stderr);
        assert!(!out.stderr.is_empty());
    }
    assert_eq!(asymm(&["--help"]).code, 0);
}

#[test]
fn bad_thread_override_is_an_input_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_asymm"))
        .args(["coverage", "--delta", "0.5", "--reps", "100", "--n", "100"])
        .env("ASYMM_THREADS", "lots")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn analyze_csv_format() {
    let out = asymm(&["analyze", "--input", &data("shrinkage_2yr.csv"), "--format", "csv"]);
    assert_eq!(out.code, 0);
    let lines: Vec<&str> = out.stdout.lines().collect();
    assert_eq!(
        lines[0],
        "measure,weight,lambda,estimate,se,ci_lower,ci_upper,df,p_value"
    );
    assert_eq!(lines.len(), 1 + 2 + 3 + 1);
    assert!(
        lines[1].starts_with("phi,uniform,,0.196543,0.047079,0.10427,0.288816"),
        "{}",
        lines[1]
    );
    assert!(lines[6].starts_with("bowker,,,23.7289,,,,3,"));
    assert!(!out.stdout.contains('\r'));
    let cols = lines[0].split(',').count();
    assert!(lines.iter().all(|l| l.split(',').count() == cols));
}

#[test]
fn sweep_matches_the_reference_grid() {
    let out = asymm(&["sweep", "--delta-step", "0.2"]);
    assert_eq!(out.code, 0);
    let lines: Vec<&str> = out.stdout.lines().collect();
    assert_eq!(lines[0], "delta,pc,sqrt_pc,phi,phi_power_-0.5,phi_power_0,phi_power_1");
    assert_eq!(lines.len(), 7);
    let row = |k: usize| -> Vec<f64> { lines[k].split(',').map(|x| x.parse().unwrap()).collect() };
    // Δ, p^c, √p^c, Φ, Φ^(-1/2), Φ^(0), Φ^(1) to three decimals.
    let expected = [
        [0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0],
        [0.2, 0.833, 0.913, 0.465, 0.225, 0.350, 0.444],
        [0.4, 0.714, 0.845, 0.282, 0.083, 0.137, 0.184],
        [0.6, 0.625, 0.791, 0.161, 0.027, 0.046, 0.062],
        [0.8, 0.556, 0.745, 0.071, 0.005, 0.009, 0.012],
        [1.0, 0.5, 0.707, 0.0, 0.0, 0.0, 0.0],
    ];
    for (k, want) in expected.iter().enumerate() {
        for (got, want) in row(k + 1).iter().zip(want) {
            assert!((got - want).abs() <= 5e-4 + 1e-12, "row {k}: {got} vs {want}");
        }
    }
}

#[test]
fn collapsed_sweep_is_a_single_symmetric_row() {
    let out = asymm(&["sweep", "--delta-min", "1", "--delta-max", "1"]);
    assert_eq!(out.code, 0);
    let lines: Vec<&str> = out.stdout.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[1], "1,0.5,0.707107,0,0,0,0");
}

#[test]
fn sweep_svg_has_a_monotone_phi_curve() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("sweep.svg");
    let csv = dir.path().join("sweep.csv");
    let out = asymm(&["sweep", "--svg", svg.to_str().unwrap(), "--out", csv.to_str().unwrap()]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 102);
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<?xml") && text.contains(r#"version="1.1""#) && text.trim_end().ends_with("</svg>"));
    let polyline = |id: &str| -> Vec<(f64, f64)> {
        let start = text.find(&format!(r#"id="{id}""#)).unwrap();
        let rest = &text[start..];
        let p = rest.find(r#"points=""#).unwrap() + 8;
        let end = rest[p..].find('"').unwrap();
        rest[p..p + end]
            .split(' ')
            .map(|xy| {
                let (x, y) = xy.split_once(',').unwrap();
                (x.parse().unwrap(), y.parse().unwrap())
            })
            .collect()
    };
    let phi = polyline("phi");
    assert_eq!(phi.len(), 101);
    // Screen y grows downward, so a nonincreasing Φ has nondecreasing y.
    for w in phi.windows(2) {
        assert!(w[1].0 > w[0].0 && w[1].1 >= w[0].1, "{w:?}");
    }
    for k in 0..3 {
        assert_eq!(polyline(&format!("phi-power-{k}")).len(), 101);
    }
}

#[test]
fn geometry_rows() {
    let out = asymm(&["geometry"]);
    assert_eq!(out.code, 0);
    let lines: Vec<&str> = out.stdout.lines().collect();
    assert_eq!(lines[0], "pc,ed,frd,hd");
    assert_eq!(lines.len(), 1002);
    assert_eq!(lines[501], "0.5,0,0,0");
    let last: Vec<f64> = lines[1001].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(last[0], 1.0);
    assert!((last[1] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-5);
    assert!((last[2] - std::f64::consts::FRAC_PI_4).abs() < 1e-5);
    assert!((last[3] - 0.54120).abs() < 1e-5);
}

#[test]
fn library_entry_point_reports_exit_codes() {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let path = data("shrinkage_5yr.csv");
    assert_eq!(
        asymm_cli::run(
            ["asymm", "analyze", "--input", &path, "--format", "csv"],
            &mut out,
            &mut err
        ),
        0
    );
    assert!(String::from_utf8(out).unwrap().starts_with("measure,"));
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let sparse = fixture("empty_pair.csv");
    assert_eq!(
        asymm_cli::run(["asymm", "analyze", "--input", &sparse], &mut out, &mut err),
        3
    );
    assert!(out.is_empty());
}
