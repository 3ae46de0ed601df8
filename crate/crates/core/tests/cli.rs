use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_facdirac"))
}

fn config(dir: &TempDir, name: &str, json: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, json).unwrap();
    p
}

fn run(sub: &str, cfg: &Path, extra: &[&str]) -> Output {
    bin().arg(sub).arg("--config").arg(cfg).args(extra).output().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn check<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["checks"].as_array().unwrap().iter().find(|c| c["name"] == name).unwrap()
}

fn csv_rows(out: &Output) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(&out.stdout[..]);
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|x| x.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

#[test]
fn default_trig_suite_passes() {
    let d = TempDir::new().unwrap();
    let cfg = config(&d, "t.json", r#"{"model_id":"trig_pt","n":1,"k_max":3}"#);
    let out = run("verify", &cfg, &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rep = stdout_json(&out);
    assert_eq!(rep["schema_version"], 1);
    assert_eq!(rep["seed"], 42);
    assert!(rep["summary"]["total"].as_u64().unwrap() >= 10);
    assert_eq!(rep["summary"]["failed"], 0);
    assert!(rep["checks"].as_array().unwrap().iter().all(|c| c["wall_time_ms"].is_null()));
}

#[test]
fn reports_are_byte_identical() {
    let d = TempDir::new().unwrap();
    let cfg = config(&d, "h.json", r#"{"model_id":"hyp_pt","n":3,"k_max":2}"#);
    let a = d.path().join("a.json");
    let b = d.path().join("b.json");
    assert_eq!(run("verify", &cfg, &["--seed", "7", "--out", a.to_str().unwrap()]).status.code(), Some(0));
    assert_eq!(run("verify", &cfg, &["--seed", "7", "--out", b.to_str().unwrap()]).status.code(), Some(0));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let c = d.path().join("c.json");
    run("verify", &cfg, &["--seed", "8", "--out", c.to_str().unwrap()]);
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());
}

#[test]
fn scaled_superpotential_breaks_intertwining() {
    let d = TempDir::new().unwrap();
    let cfg = config(
        &d,
        "c.json",
        r#"{"model_id":"trig_pt","n":1,"k_max":2,"checks":["intertwining","factorization"],"superpotential_scale":1.05}"#,
    );
    let out = run("verify", &cfg, &[]);
    assert_eq!(out.status.code(), Some(1));
    let rep = stdout_json(&out);
    assert_eq!(check(&rep, "intertwining")["pass"], false);
    assert!(check(&rep, "intertwining")["residual"].as_f64().unwrap() > 1e-2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("intertwining"));
}

#[test]
fn hyperbolic_operator_is_pseudo_hermitian() {
    let d = TempDir::new().unwrap();
    let cfg = config(
        &d,
        "p.json",
        r#"{"model_id":"hyp_pt","n":3,"k_max":2,"checks":["pseudo_hermiticity","non_hermiticity_control"]}"#,
    );
    let out = run("verify", &cfg, &[]);
    assert_eq!(out.status.code(), Some(0));
    let rep = stdout_json(&out);
    assert!(check(&rep, "pseudo_hermiticity")["residual"].as_f64().unwrap() < 1e-10);
    assert!(check(&rep, "non_hermiticity_control")["residual"].as_f64().unwrap() < 10.0);
}

#[test]
fn csv_report_has_one_row_per_check() {
    let d = TempDir::new().unwrap();
    let cfg = config(
        &d,
        "v.json",
        r#"{"model_id":"trig_pt","n":2,"k_max":2,"checks":["ladder","dirac_eigen"],"output":{"format":"csv"}}"#,
    );
    let out = run("verify", &cfg, &[]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = csv_rows(&out);
    assert_eq!(header, ["name", "residual", "tolerance", "pass", "wall_time_ms"]);
    assert_eq!(rows.iter().map(|r| r[0].as_str()).collect::<Vec<_>>(), ["dirac_eigen", "ladder"]);
}

#[test]
fn configuration_errors_exit_with_two() {
    let d = TempDir::new().unwrap();
    let unknown = config(&d, "u.json", r#"{"model_id":"trig_pt","n":1,"k_max":2,"checks":["zzz"]}"#);
    let out = run("verify", &unknown, &[]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("zzz") && err.contains("factorization"), "{err}");

    for bad in [
        r#"{"model_id":"morse","n":1,"k_max":2}"#,
        r#"{"model_id":"hyp_pt","n":0,"k_max":0}"#,
        r#"{"model_id":"hyp_pt","n":3,"k_max":3}"#,
        r#"{"model_id":"hyp_pt","n":3,"k_max":1,"m0":1.0}"#,
        r#"{"model_id":"trig_pt","n":1,"k_max":2,"m0":-1.0}"#,
        r#"{"model_id":"trig_pt","n":1,"k_max":2,"typo":true}"#,
        "not json",
    ] {
        let cfg = config(&d, "bad.json", bad);
        assert_eq!(run("verify", &cfg, &[]).status.code(), Some(2), "{bad}");
    }
    let missing = d.path().join("missing.json");
    assert_eq!(run("spectrum", &missing, &[]).status.code(), Some(2));
}

#[test]
fn trig_spectrum_table() {
    let d = TempDir::new().unwrap();
    let cfg = config(&d, "a.json", r#"{"model_id":"trig_pt","n":0,"k_max":2}"#);
    let out = run("spectrum", &cfg, &[]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = csv_rows(&out);
    assert_eq!(header, ["model", "n", "k", "sign", "epsilon_analytic", "epsilon_numeric", "abs_err"]);
    let eps: Vec<f64> = rows.iter().map(|r| r[4].parse().unwrap()).collect();
    assert_eq!(eps, [-2.5, -1.5, 0.5, 1.5, 2.5]);
    for r in &rows {
        assert!(r[6].parse::<f64>().unwrap() < 1e-3, "{r:?}");
    }
}

#[test]
fn hyperbolic_spectrum_table() {
    let d = TempDir::new().unwrap();
    let cfg = config(&d, "h.json", r#"{"model_id":"hyp_pt","n":3,"k_max":2}"#);
    let out = run("spectrum", &cfg, &[]);
    assert_eq!(out.status.code(), Some(0));
    let (_, rows) = csv_rows(&out);
    let states: Vec<(String, f64)> = rows.iter().map(|r| (format!("{}{}", r[2], r[3]), r[4].parse().unwrap())).collect();
    let expected = [("1-", -1.5), ("2-", -0.5), ("2+", 0.5), ("1+", 1.5), ("0-", -2.5)];
    for (s, e) in expected {
        assert!(states.iter().any(|(x, v)| x == s && (*v - e).abs() < 1e-12), "{s} missing in {states:?}");
    }
    assert_eq!(states.len(), 5);
}

#[test]
fn massive_spectrum_table() {
    let d = TempDir::new().unwrap();
    let cfg = config(&d, "b.json", r#"{"model_id":"trig_pt","n":0,"k_max":1,"m0":1}"#);
    let out = run("spectrum", &cfg, &[]);
    assert_eq!(out.status.code(), Some(0));
    let (_, rows) = csv_rows(&out);
    assert!(rows.iter().all(|r| r[0] == "trig_pt/massive"));
    let mut e: Vec<f64> = rows.iter().map(|r| r[4].parse().unwrap()).collect();
    e.sort_by(f64::total_cmp);
    let a = 1.25f64.sqrt();
    let b = 3.25f64.sqrt();
    for (x, y) in e.iter().zip([-b, -a, a, b]) {
        assert!((x - y).abs() < 1e-12, "{e:?}");
    }
    assert!((a - 1.11803).abs() < 1e-5);
}

#[test]
fn plotdata_columns() {
    let d = TempDir::new().unwrap();
    let cfg = config(&d, "p.json", r#"{"model_id":"trig_pt","n":0,"k_max":1,"output":{"format":"json"}}"#);
    let out = run("plotdata", &cfg, &[]);
    assert_eq!(out.status.code(), Some(0));
    let p = stdout_json(&out);
    let x: Vec<f64> = p["x"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    let col = |name: &str| -> Vec<f64> {
        let c = p["columns"].as_array().unwrap().iter().find(|c| c["name"] == name).unwrap();
        c["values"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap_or(0.0)).collect()
    };
    let psi = col("psi_n0_k0");
    let (imax, vmax) = psi.iter().enumerate().fold((0, 0.0f64), |a, (i, &v)| if v.abs() > a.1 { (i, v.abs()) } else { a });
    assert!((vmax - 0.5f64.sqrt()).abs() < 1e-5, "{vmax}");
    assert!((x[imax] - std::f64::consts::FRAC_PI_2).abs() < 1e-2);

    let h = x[1] - x[0];
    let norm: f64 = ["upper_re", "upper_im", "lower_re", "lower_im"]
        .iter()
        .map(|part| col(&format!("spinor_n0_k1_plus_{part}")).iter().map(|v| v * v).sum::<f64>())
        .sum::<f64>()
        * h;
    assert!((norm - 1.0).abs() < 1e-3, "{norm}");
}

#[test]
fn plotdata_hyperbolic_ground_spinor_has_empty_upper_component() {
    let d = TempDir::new().unwrap();
    let cfg = config(&d, "h.json", r#"{"model_id":"hyp_pt","n":3,"k_max":0}"#);
    let out_path = d.path().join("plot.csv");
    let out = run("plotdata", &cfg, &["--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let mut r = csv::Reader::from_path(&out_path).unwrap();
    let header: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    let col = header.iter().position(|h| h == "spinor_n3_k0_minus_upper_re").unwrap();
    let coli = header.iter().position(|h| h == "spinor_n3_k0_minus_upper_im").unwrap();
    let mut rows = 0;
    for rec in r.records() {
        let rec = rec.unwrap();
        assert_eq!(rec[col].parse::<f64>().unwrap(), 0.0);
        assert_eq!(rec[coli].parse::<f64>().unwrap(), 0.0);
        rows += 1;
    }
    assert_eq!(rows, 4001);
}
