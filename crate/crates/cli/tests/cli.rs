use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn whodge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_whodge")).args(args).output().unwrap()
}

fn run_to(dir: &Path, name: &str, args: &[&str]) -> (i32, Value) {
    let path = dir.join(name);
    let mut all: Vec<&str> = args.to_vec();
    let p = path.to_str().unwrap().to_string();
    all.extend(["--report", &p]);
    let out = whodge(&all);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("no report: {}", String::from_utf8_lossy(&out.stderr)));
    (out.status.code().unwrap(), serde_json::from_str(&text).unwrap())
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn identities_example() {
    let dir = tempfile::tempdir().unwrap();
    let (code, r) = run_to(
        dir.path(),
        "i.json",
        &["identities", "--domain", "ball3", "--weight", "r2/4", "--potential", "1+x1*x1/2", "--order", "12"],
    );
    assert_eq!(code, 0);
    let reilly = r["results"].as_array().unwrap().iter().find(|x| x["identity_id"] == "reilly").unwrap();
    assert!(reilly["rel_residual"].as_f64().unwrap() < 1e-8);
    assert_eq!(r["command"], "identities");
    assert_eq!(r["config"]["order"], "12");
    assert_eq!(r["config"]["weight"], "r2/4");
}

#[test]
fn spectrum_example() {
    let out = whodge(&["spectrum", "--shape", "icosphere", "--level", "0", "--p", "0", "--k", "4"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    let ev: Vec<f64> = r["results"][0]["eigenvalues"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    // Coarsest icosahedron: a triple near the S² eigenvalue 2.
    assert_eq!(ev.len(), 4);
    assert!((ev[0] - ev[2]).abs() < 1e-9 && (ev[0] - 2.0).abs() < 1.0, "{ev:?}");
    assert_eq!(r["schema_version"], "1");
    assert!(r["conventions"].as_str().unwrap().contains("δ_f = δ + i_{∇f}"));
}

#[test]
fn theorem_example() {
    let dir = tempfile::tempdir().unwrap();
    let (code, r) = run_to(
        dir.path(),
        "t.json",
        &["theorem", "--case", "thm1.2", "--domain", "ball3", "--p", "1", "--weight", "0.5*r2/2", "--level", "4"],
    );
    assert_eq!(code, 0);
    let c = &r["results"][0];
    assert_eq!(c["theorem_id"], "thm1.2");
    assert!(c["margin"].as_f64().unwrap() >= 0.0);
    assert!((c["bound"].as_f64().unwrap() - 1.5).abs() < 1e-12);
}

#[test]
fn hypothesis_violation_is_a_failed_check() {
    let dir = tempfile::tempdir().unwrap();
    let (code, r) = run_to(dir.path(), "h.json", &["theorem", "--case", "thm1.2", "--domain", "annulus3", "--level", "0"]);
    assert_eq!(code, 1);
    assert_eq!(r["results"][0]["status"], "hypothesis_violated");
    assert!(r["results"][0]["constants"]["sigma_p"].is_object());
}

#[test]
fn failure_injection_exits_one() {
    let out = whodge(&["identities", "--domain", "ball2", "--poly-degree", "4", "--order", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["pass"], false);
    assert_eq!(r["exit_code"], 1);
}

#[test]
fn config_errors_exit_two_with_position() {
    let out = whodge(&["identities", "--weight", "x1 + y"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("flag --weight, column 6"), "{}", stderr(&out));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "seed = 1\n[spectrum]\nshape = icosphere\n  k = four\n").unwrap();
    let out = whodge(&["spectrum", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("bad.cfg:4:7:"), "{}", stderr(&out));

    std::fs::write(&cfg, "[spectrum]\nshape = icosphere\nembedding = circle\n").unwrap();
    let out = whodge(&["spectrum", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains(":3:13: key 'embedding' is not used"), "{}", stderr(&out));

    for args in [
        &["steklov", "--shape", "icosphere"][..],
        &["spectrum", "--shape", "disc"],
        &["spectrum"],
        &["lp", "--embedding", "klein_bottle"],
        &["theorem", "--case", "thm9"],
        &["frobnicate"],
        &[],
    ] {
        assert_eq!(whodge(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn command_from_config_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.cfg");
    std::fs::write(&cfg, "command = spectrum\n# closed mesh\n[spectrum]\nshape = circle(64)\nk = 2\n[lp]\nj = 4\n").unwrap();
    let (code, r) = run_to(dir.path(), "a.json", &["--config", cfg.to_str().unwrap(), "--k", "3"]);
    assert_eq!(code, 0);
    assert_eq!(r["config"]["k"], "3");
    assert_eq!(r["results"][0]["eigenvalues"].as_array().unwrap().len(), 3);
}

#[test]
fn csv_outputs_have_fixed_columns() {
    let dir = tempfile::tempdir().unwrap();
    let csv = |args: &[&str]| {
        let path = dir.path().join("o.csv");
        let mut all = args.to_vec();
        let p = path.to_str().unwrap().to_string();
        all.extend(["--csv", &p]);
        let out = whodge(&all);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        std::fs::read_to_string(&path).unwrap()
    };
    let s = csv(&["spectrum", "--shape", "circle(32)", "--k", "3"]);
    assert!(s.starts_with("index,eigenvalue,residual\n1,"));
    assert_eq!(s.lines().count(), 4);
    let s = csv(&["lp", "--embedding", "circle", "--j", "1,2", "--resolution", "64"]);
    assert!(s.starts_with("theorem_id,label,computed,bound,margin,tol_rel,pass\nthm1.7,"));
    let s = csv(&["identities", "--domain", "ball2"]);
    assert!(s.starts_with("identity_id,domain,lhs,rhs,abs_residual,rel_residual,tolerance,pass,quadrature_orders,seed,points\n"));
    let s = csv(&["convergence", "--shape", "circle", "--levels", "0..2", "--k", "2", "--expect", "1", "--tol-rel", "0.01"]);
    assert!(s.starts_with("level,h,lambda_1,lambda_2\n0,"));
    assert_eq!(s.lines().count(), 4);
    let s = csv(&["theorem", "--case", "thm1.2", "--level", "1"]);
    assert!(s.contains("\"lambda'_1,1\""), "{s}");
}

#[test]
fn reports_are_atomic_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["steklov", "--shape", "disc", "--level", "3", "--seed", "4"];
    let (_, a) = run_to(dir.path(), "r.json", &args);
    let (_, b) = run_to(dir.path(), "r.json", &args);
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("wall_time_s");
        v
    };
    assert_eq!(strip(a), strip(b));
    let leftovers: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(leftovers.len(), 1, "{leftovers:?}");
}

#[test]
fn dump_matrices_flag() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("m");
    let out = whodge(&["spectrum", "--shape", "circle(16)", "--dump-matrices", d.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    for f in ["mass_0.txt", "mass_1.txt", "d_0.txt", "stiffness_0.txt"] {
        assert!(d.join(f).exists(), "{f}");
    }
    let out = whodge(&["lp", "--embedding", "circle", "--dump-matrices", d.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
