use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semistable"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("SEMISTABLE_OUT")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json(path: impl AsRef<Path>) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_rows(path: impl AsRef<Path>) -> Vec<Vec<f64>> {
    let text = fs::read_to_string(path).unwrap();
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap_or(f64::NAN)).collect())
        .collect()
}

#[test]
fn family_zero_seed_is_the_log_solution() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["family", "--dim", "10", "--h", "zero"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let summary = json(dir.path().join("family.json"));
    assert_eq!(summary["semistable"], Value::Bool(true));
    let c = (2.0f64 / 3.0).sqrt();
    for row in csv_rows(dir.path().join("profile.csv")) {
        let (r, u, ur) = (row[0], row[1], row[2]);
        assert!((u - c * -r.ln()).abs() <= 1e-10 * (1.0 + u.abs()), "u({r}) = {u}");
        assert!((ur + c / r).abs() <= 1e-12 * c / r);
    }
    let report = json(dir.path().join("report.json"));
    assert_eq!(report["overall_pass"], Value::Bool(true));
    assert!(dir.path().join("g.csv").exists() && dir.path().join("spec.json").exists());
}

#[test]
fn family_below_dimension_ten_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["family", "--dim", "9", "--h", "zero"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("N >= 10"));
    assert!(!dir.path().join("report.json").exists());
}

#[test]
fn first_order_counterexample_meets_every_target() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &["family", "--dim", "10", "--counterexample", "k=1", "--radii", "dyadic", "--magnitudes", "linear"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let cx = json(dir.path().join("counterexample.json"));
    let checks = cx["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 20);
    for (i, c) in checks.iter().enumerate() {
        let n = (i + 1) as f64;
        assert_eq!(c["r"].as_f64().unwrap(), 0.5f64.powi(i as i32 + 1));
        assert_eq!(c["required"].as_f64().unwrap(), n);
        assert!(c["achieved"].as_f64().unwrap() >= n);
    }
    // cross-check against the written profile
    let rows = csv_rows(dir.path().join("profile.csv"));
    for i in 1..=20 {
        let r = 0.5f64.powi(i);
        let row = rows.iter().find(|row| row[0] == r).expect("target radius is a node");
        assert!(row[2].abs() >= i as f64);
    }
}

#[test]
fn estimate_fails_uniformity_on_escaping_counterexample() {
    let dir = tempfile::tempdir().unwrap();
    let cx = dir.path().join("cx");
    let o = run(&cx, &["family", "--counterexample", "k=1", "--magnitudes", "escape"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let profile = cx.join("profile.csv");
    let v = dir.path().join("verify");
    let o = run(
        &v,
        &["verify", "--theorem", "thm_estimas", "--g", "recovered", "--profile", profile.to_str().unwrap()],
    );
    assert_eq!(code(&o), 0);
    let report = json(v.join("report.json"));
    let item_i = report["entries"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["item"] == "i")
        .unwrap();
    assert_eq!(item_i["holds_uniformly"], Value::Bool(false));
    // g changes sign, so the estimate is not asserted
    assert_eq!(item_i["outcome"], "skipped");
    assert!(v.join("traces/thm_estimas_i.csv").exists());
}

#[test]
fn branch_dimension_ten_reaches_gelfand_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["branch", "--dim", "10", "--nonlinearity", "exp"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let b = json(dir.path().join("branch.json"));
    let l = b["lambda_star_estimate"].as_f64().unwrap();
    assert!((15.8..=16.0).contains(&l), "lambda* = {l}");
    assert_eq!(b["turning_detected"], Value::Bool(false));
    for p in b["points"].as_array().unwrap() {
        let rel = p["profile_ref"].as_str().unwrap();
        assert!(dir.path().join(rel).exists());
        assert!(p["eigenvalue"].as_f64().is_some());
    }
}

#[test]
fn branch_dimension_three_turns() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["branch", "--dim", "3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(dir.path().join("branch.json"))["turning_detected"], Value::Bool(true));
}

#[test]
fn branch_dimension_two_matches_liouville_threshold() {
    // Liouville in the disc: explicit solutions give λ* = 2
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["branch", "--dim", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let l = json(dir.path().join("branch.json"))["lambda_star_estimate"].as_f64().unwrap();
    assert!((l - 2.0).abs() / 2.0 < 1e-2, "lambda* = {l}");
}

#[test]
fn verify_extremal_items_hold_in_dimension_ten() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["verify", "--dim", "10", "--theorem", "thm_extremal"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report = json(dir.path().join("report.json"));
    let entries = report["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 4);
    for e in entries {
        assert_eq!(e["theorem_id"], "thm_extremal");
        assert_eq!(e["outcome"], "pass", "{e}");
        assert!(!e["hypotheses"].as_array().unwrap().is_empty());
    }
}

#[test]
fn verify_monotonicity_on_constant_profile_is_vacuous() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("r,u,u_r,u_rr,u_rrr\n");
    for i in 0..100 {
        let r = 1e-4f64.powf(1.0 - i as f64 / 99.0);
        csv.push_str(&format!("{r},1,0,0,0\n"));
    }
    let profile = dir.path().join("const.csv");
    fs::write(&profile, csv).unwrap();
    let out = dir.path().join("v");
    let o = run(&out, &["verify", "--theorem", "lemma_monotonias", "--profile", profile.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let report = json(out.join("report.json"));
    assert_eq!(report["entries"][0]["outcome"], "vacuous");
}

#[test]
fn unstable_profile_exits_with_one() {
    // -2 log r in N = 9 has potential 14/r², above the Hardy constant 49/4
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("r,u,u_r,u_rr,u_rrr\n");
    for i in 0..2000 {
        let r = 1e-6f64.powf(1.0 - i as f64 / 1999.0);
        csv.push_str(&format!("{r},{},{},{},{}\n", -2.0 * r.ln(), -2.0 / r, 2.0 / (r * r), -4.0 / r.powi(3)));
    }
    let profile = dir.path().join("log.csv");
    fs::write(&profile, csv).unwrap();
    let o = run(&dir.path().join("s"), &["stability", "--dim", "9", "--profile", profile.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let o = run(&dir.path().join("s10"), &["stability", "--dim", "10", "--profile", profile.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
}

#[test]
fn hardy_threshold_sides() {
    let dir = tempfile::tempdir().unwrap();
    for (n, stable) in [(9, false), (10, true), (12, true)] {
        let out = dir.path().join(n.to_string());
        let o = run(&out, &["hardy", "--dim", &n.to_string()]);
        assert_eq!(code(&o), 0);
        let h = json(out.join("hardy.json"));
        assert_eq!(h["semistable"], Value::Bool(stable), "N = {n}");
    }
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["family", "--dim", "12", "--h", "bump:0.3:0.1:2+power:1:0.5", "--seed", "7"];
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(code(&run(&a, &args)), 0);
    let mut seq = args.to_vec();
    seq.push("--sequential");
    assert_eq!(code(&run(&b, &seq)), 0);
    for f in ["report.json", "family.json", "profile.csv", "g.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let c = dir.path().join("c");
    assert_eq!(code(&run(&c, &["branch", "--dim", "10"])), 0);
    let d = dir.path().join("d");
    assert_eq!(code(&run(&d, &["branch", "--dim", "10", "--sequential"])), 0);
    assert_eq!(fs::read(c.join("branch.json")).unwrap(), fs::read(d.join("branch.json")).unwrap());
}

#[test]
fn csv_format_flattens_the_summary() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["hardy", "--dim", "11", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(dir.path().join("hardy.csv")).unwrap();
    assert!(text.starts_with("key,value\n"));
    assert!(text.contains("verdict.mu1,"));
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(dir.path(), &["branch", "--nonlinearity", "sin"])), 2);
    assert_eq!(code(&run(dir.path(), &["branch", "--tol-ode", "0"])), 2);
    assert_eq!(code(&run(dir.path(), &["branch", "--dim", "1"])), 2);
    assert_eq!(code(&run(dir.path(), &["family", "--h", "bump:0.5"])), 2);
    assert_eq!(code(&run(dir.path(), &["extremal", "--nonlinearity", "power:jl"])), 2);
}

#[test]
fn recovered_table_feeds_back_into_the_solver() {
    let dir = tempfile::tempdir().unwrap();
    let fam = dir.path().join("fam");
    assert_eq!(code(&run(&fam, &["family", "--dim", "11", "--h", "power:1:1"])), 0);
    let table = format!("table:{}", fam.join("g.csv").display());
    let prof = fam.join("profile.csv");
    let o = run(
        &dir.path().join("st"),
        &["stability", "--dim", "11", "--nonlinearity", &table, "--lambda", "1", "--profile", prof.to_str().unwrap()],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}
