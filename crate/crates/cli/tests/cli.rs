use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ebound"))
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn run(cmd: &str, cfg: &Path, out: &Path, extra: &[&str]) -> Output {
    bin().arg(cmd).arg("--config").arg(cfg).arg("--out").arg(out).args(extra).output().unwrap()
}

fn json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn config(system: &str, kinematics: &str, extra: &str) -> String {
    format!(r#"{{"schema":1,"system":{system},"kinematics":{kinematics}{extra}}}"#)
}

const PEA_REF: &str = r#"{"actuation":"pea","m":1,"c":1}"#;
const SEA_REF: &str = r#"{"actuation":"sea","m":1,"c":1}"#;
const HARMONIC: &str = r#"{"kind":"harmonic"}"#;

/// Midpoint rule on P(t) = (cos t + sin t)·sin t, the reference actuator power.
fn reference_oracle() -> (f64, f64) {
    let n = 1_000_000;
    let h = 2.0 * std::f64::consts::PI / n as f64;
    let (mut b, mut c) = (0.0, 0.0);
    for i in 0..n {
        let t = (i as f64 + 0.5) * h;
        let p = (t.cos() + t.sin()) * t.sin();
        b += p.abs() * h;
        c += p.max(0.0) * h;
    }
    let period = 2.0 * std::f64::consts::PI;
    (b / period, c / period)
}

#[test]
fn analyze_reference_pea() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(d.path(), "c.json", &config(PEA_REF, HARMONIC, ""));
    let o = run("analyze", &cfg, &d.path().join("out"), &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&d.path().join("out/report.json"));
    let q1 = r["metrics"].as_array().unwrap().iter().find(|m| m["q"] == 1.0).unwrap();
    let (pb, pc) = reference_oracle();
    assert!((q1["metrics"]["p_a"].as_f64().unwrap() - 0.5).abs() < 1e-8);
    assert!((q1["metrics"]["p_b"].as_f64().unwrap() - pb).abs() < 1e-8);
    assert!((q1["metrics"]["p_c"].as_f64().unwrap() - pc).abs() < 1e-8);
    assert_eq!(r["loop"]["admissibility"]["admissible"], true);
    for f in ["loop.csv", "loop.svg", "loop_samples.csv", "report.json"] {
        assert!(d.path().join("out").join(f).is_file(), "{f}");
    }
}

#[test]
fn analyze_reference_sea_reports_f_hat() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(d.path(), "c.json", &config(SEA_REF, HARMONIC, ""));
    let o = run("analyze", &cfg, &d.path().join("out"), &[]);
    assert!(o.status.success());
    let r = json(&d.path().join("out/report.json"));
    assert!((r["loop"]["f_hat"].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-9);
}

#[test]
fn kinked_sawtooth_is_inadmissible() {
    let d = tempfile::tempdir().unwrap();
    let k = r#"{"kind":"smoothed-sawtooth","smoothing":0}"#;
    let cfg = write_config(d.path(), "c.json", &config(PEA_REF, k, ""));
    let o = run("analyze", &cfg, &d.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("inadmissible") && err.contains("corners"), "{err}");
}

#[test]
fn self_intersecting_loop_names_condition() {
    let d = tempfile::tempdir().unwrap();
    let k = r#"{"kind":"smoothed-sawtooth","smoothing":0.3}"#;
    let cfg = write_config(d.path(), "c.json", &config(PEA_REF, k, ""));
    let o = run("analyze", &cfg, &d.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("self-intersecting"));
}

#[test]
fn one_way_design_has_half_duty_cycle() {
    let d = tempfile::tempdir().unwrap();
    let sys = r#"{"actuation":"pea","m":1,"c":0,"c_q":1}"#;
    let extra = r#","design":{"family":"one-way","side":"upper"},"metrics":{"q":[1],"eps_rel":1e-6}"#;
    let cfg = write_config(d.path(), "c.json", &config(sys, HARMONIC, extra));
    let o = run("design", &cfg, &d.path().join("out"), &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&d.path().join("out/report.json"));
    let duty = r["metrics"][0]["metrics"]["duty_cycle"].as_f64().unwrap();
    assert!((duty - 0.5).abs() <= 1.0 / 1024.0, "{duty}");
    assert_eq!(r["design"]["bound"]["optimal"], true);
}

#[test]
fn sea_linear_design_echoes_k1() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(d.path(), "c.json", &config(SEA_REF, HARMONIC, r#","design":{"family":"linear"}"#));
    let o = run("design", &cfg, &d.path().join("out"), &[]);
    assert!(o.status.success());
    let r = json(&d.path().join("out/report.json"));
    // k1 = (m²ω² + c²)/m
    assert!((r["design"]["k1"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert_eq!(r["design"]["bound"]["optimal"], true);
    assert!(d.path().join("out/compliance.csv").is_file());
}

#[test]
fn bistable_design_lists_equilibria() {
    let d = tempfile::tempdir().unwrap();
    let extra = r#","design":{"family":"bistable","delta":0.2,"width":0.02}"#;
    let cfg = write_config(d.path(), "c.json", &config(PEA_REF, HARMONIC, extra));
    let o = run("design", &cfg, &d.path().join("out"), &["--format", "json"]);
    assert!(o.status.success());
    let r = json(&d.path().join("out/report.json"));
    let p = &r["design"]["profile"];
    assert_eq!(p["regime"], "bistable");
    let eq = p["equilibria"].as_array().unwrap();
    // two stable wells around one unstable centre
    let stable = eq.iter().filter(|e| e["stability"] == "stable").count();
    let unstable = eq.iter().filter(|e| e["stability"] == "unstable").count();
    assert_eq!((stable, unstable), (2, 1), "{eq:?}");
    // json only
    let files: Vec<_> = std::fs::read_dir(d.path().join("out")).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(files, vec![std::ffi::OsString::from("report.json")]);
}

#[test]
fn verify_passes_linear_and_fails_over_stiff() {
    let d = tempfile::tempdir().unwrap();
    let good = write_config(d.path(), "g.json", &config(PEA_REF, HARMONIC, r#","design":{"family":"linear"},"metrics":{"q":[1]}"#));
    let o = run("verify", &good, &d.path().join("g"), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    assert_eq!(json(&d.path().join("g/verify.json"))["passed"], true);

    let bad = write_config(d.path(), "b.json", &config(PEA_REF, HARMONIC, r#","design":{"family":"linear","k":3},"metrics":{"q":[1]}"#));
    let o = run("verify", &bad, &d.path().join("b"), &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("elastic bound violation"));
}

#[test]
fn sweep_argmin_row_near_global_resonance() {
    let d = tempfile::tempdir().unwrap();
    let sys = r#"{"actuation":"sea","m":1,"c":0.2}"#;
    let extra = r#","sweep":{"k1":1,"lo":0.3,"hi":1.2,"rows":901}"#;
    let cfg = write_config(d.path(), "c.json", &config(sys, HARMONIC, extra));
    let o = run("sweep", &cfg, &d.path().join("out"), &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let mut rdr = csv::Reader::from_path(d.path().join("out/sweep.csv")).unwrap();
    let rows: Vec<(f64, f64)> = rdr
        .records()
        .map(|r| {
            let r = r.unwrap();
            (r[0].parse().unwrap(), r[3].parse().unwrap())
        })
        .collect();
    let best = rows.iter().min_by(|a, b| a.1.total_cmp(&b.1)).unwrap().0;
    let target = (1.0f64 - 4.0 * 0.1 * 0.1).sqrt();
    assert!((best / target - 1.0).abs() < 1e-3, "{best} vs {target}");
}

#[test]
fn config_errors_exit_3() {
    let d = tempfile::tempdir().unwrap();
    let out = d.path().join("out");
    let unknown = write_config(d.path(), "u.json", &config(PEA_REF, r#"{"kind":"harmonic","speed":2}"#, ""));
    assert_eq!(run("analyze", &unknown, &out, &[]).status.code(), Some(3));
    let schema = write_config(d.path(), "s.json", &config(PEA_REF, HARMONIC, "").replace("\"schema\":1", "\"schema\":7"));
    assert_eq!(run("analyze", &schema, &out, &[]).status.code(), Some(3));
    assert_eq!(run("analyze", &d.path().join("missing.json"), &out, &[]).status.code(), Some(3));
    let nodesign = write_config(d.path(), "n.json", &config(PEA_REF, HARMONIC, ""));
    assert_eq!(run("design", &nodesign, &out, &[]).status.code(), Some(3));
    let wrong = write_config(d.path(), "w.json", &config(PEA_REF, HARMONIC, r#","design":{"family":"dwell","side":"upper"}"#));
    assert_eq!(run("design", &wrong, &out, &[]).status.code(), Some(3));
    let neg = write_config(d.path(), "m.json", &config(r#"{"actuation":"pea","m":-1,"c":1}"#, HARMONIC, ""));
    assert_eq!(run("analyze", &neg, &out, &[]).status.code(), Some(3));
}

#[test]
fn outputs_are_bit_identical_across_runs() {
    let d = tempfile::tempdir().unwrap();
    let extra = r#","design":{"family":"polynomial","degree":3}"#;
    let cfg = write_config(d.path(), "c.json", &config(PEA_REF, HARMONIC, extra));
    for o in ["a", "b"] {
        assert!(run("design", &cfg, &d.path().join(o), &[]).status.success());
    }
    let mut names: Vec<_> = std::fs::read_dir(d.path().join("a")).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 5);
    for n in names {
        let a = std::fs::read(d.path().join("a").join(&n)).unwrap();
        let b = std::fs::read(d.path().join("b").join(&n)).unwrap();
        assert!(a == b, "{n:?} differs");
    }
}

#[test]
fn svg_always_has_sample_csv() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(d.path(), "c.json", &config(SEA_REF, HARMONIC, r#","design":{"family":"dwell","side":"upper"}"#));
    let o = run("design", &cfg, &d.path().join("out"), &["--format", "svg"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let svg = std::fs::read_to_string(d.path().join("out/design.svg")).unwrap();
    let mut rdr = csv::Reader::from_path(d.path().join("out/design_samples.csv")).unwrap();
    assert_eq!(rdr.headers().unwrap().len(), 4);
    let n = rdr.records().count();
    // every plotted curve has one vertex per sample row
    for path in svg.lines().filter(|l| l.starts_with("<path")) {
        let vertices = path.matches(['M', 'L']).count();
        assert!(vertices <= n && vertices > n / 2, "{vertices} vs {n}");
    }
}

#[test]
fn relative_csv_paths_resolve_against_config() {
    let d = tempfile::tempdir().unwrap();
    let mut s = String::from("t,x\n");
    let n = 256;
    for i in 0..n {
        let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
        s.push_str(&format!("{t},{}\n", t.cos()));
    }
    std::fs::write(d.path().join("wave.csv"), s).unwrap();
    let cfg = write_config(d.path(), "c.json", &config(PEA_REF, r#"{"kind":"tabulated","csv":"wave.csv"}"#, ""));
    let o = run("analyze", &cfg, &d.path().join("out"), &["--format", "json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&d.path().join("out/report.json"));
    assert!((r["metrics"][0]["metrics"]["p_a"].as_f64().unwrap() - 0.5).abs() < 1e-6);
}
