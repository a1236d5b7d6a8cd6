use std::process::{Command, Output};

use serde_json::Value;

fn jacobi0(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jacobi0"))
        .args(args)
        .env_remove("JACOBI0_PRECISION")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn term(v: &Value, n: i64, r: i64) -> Option<i64> {
    v["terms"]
        .as_array()?
        .iter()
        .find(|t| t["n"] == n && t["r"] == r)
        .map(|t| t["num"].as_str().unwrap().parse::<i64>().unwrap())
}

#[test]
fn expand_sigma_to_q5() {
    let out = jacobi0(&["expand", "sigma", "--trunc", "5", "--output", "json"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["kind"], "biseries");
    assert_eq!(v["N"], 5);
    // q² row: -3ζ⁻¹ + 9 - 9ζ + 3ζ²
    assert_eq!(term(&v, 2, -1), Some(-3));
    assert_eq!(term(&v, 2, 0), Some(9));
    assert_eq!(term(&v, 2, 2), Some(3));
    // q⁴ row, centre coefficients
    assert_eq!(term(&v, 4, 0), Some(51));
    assert_eq!(term(&v, 4, 1), Some(-51));
    assert!(v["terms"].as_array().unwrap().iter().all(|t| t["n"].as_i64().unwrap() <= 5));
}

#[test]
fn zeros_of_sigma() {
    let out = jacobi0(&["zeros", "--form", "sigma", "--tau", "i"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["count"], 1);
    assert!(v["residual"].as_f64().unwrap() < 0.01);
    assert_eq!(v["tau0"][1].as_f64(), Some(1.0));

    let out = jacobi0(&["zeros", "--form", "sigma2", "--tau", "0.5+1.1i"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["count"], 2);
}

#[test]
fn legendre_suite_passes() {
    let out = jacobi0(&["verify", "legendre", "--grid", "default"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["pass"], true);
    for r in v["suites"][0]["reports"].as_array().unwrap() {
        assert!(r["max_abs_deviation"].as_f64().unwrap() < 1e-9);
    }
}

#[test]
fn verify_all_passes() {
    let out = jacobi0(&["verify", "all"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let v = json(&out);
    assert_eq!(v["suites"].as_array().unwrap().len(), 9);
}

#[test]
fn output_is_deterministic() {
    for args in [&["verify", "cocycle"][..], &["phix", "--X", "1/3,1/5"], &["zeros", "--tau", "0.2+0.9i"]] {
        let a = jacobi0(args);
        let b = jacobi0(args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["zeros", "--tau", "-i"][..],
        &["zeros", "--tau", "0.3"],
        &["verify", "no-such-suite"],
        &["klein", "--X", "0.5,0"],
        &["expand", "--trunc", "0"],
        &["verify", "legendre", "--tol", "-1"],
        &["verify", "sigma-transform", "--matrix", "2,0,0,2"],
        &["embed", "--m", "0", "--X", "1/2,1/2", "--X", "1/3,2/3"],
        &["embed", "--m", "2", "--X", "1/2,1/2"],
    ] {
        assert_eq!(jacobi0(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn tolerance_from_environment() {
    let run = |tol: &str| {
        Command::new(env!("CARGO_BIN_EXE_jacobi0"))
            .args(["verify", "legendre"])
            .env("JACOBI0_PRECISION", tol)
            .output()
            .unwrap()
    };
    assert_eq!(run("1e-30").status.code(), Some(1));
    assert!(run("1e-6").status.success());
    assert_eq!(run("zero").status.code(), Some(2));
}

#[test]
fn csv_output() {
    let out = jacobi0(&["expand", "sigma", "--trunc", "1", "--output", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,r,num,den"));
    assert_eq!(lines.next(), Some("0,0,1,1"));
    assert_eq!(lines.count(), 5);

    let out = jacobi0(&["verify", "filtration", "--output", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("suite,identity,"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn klein_paths_agree() {
    let out = jacobi0(&["klein", "--X", "1/5,2/5", "--tau", "0.1+0.8i"]);
    assert!(out.status.success());
    assert!(json(&out)["deviation"].as_f64().unwrap() < 1e-9);

    let v = json(&jacobi0(&["klein", "--X", "1/2,0"]));
    assert_eq!(v["kind"], "fracqseries");
    assert_eq!(v["D"], 8);
    assert_eq!(v["terms"][0]["e"], -1);
}

#[test]
fn classify_reports_filtration() {
    let v = json(&jacobi0(&["classify", "--form", "sigma"]));
    assert_eq!(v["filtration"], 2);
    assert_eq!(v["integral"], true);
    assert_eq!(v["coefficient_relation"]["violations"].as_array().unwrap().len(), 0);

    // a series file round-trips through classify
    let dir = std::env::temp_dir().join(format!("jacobi0-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("s2.json");
    std::fs::write(&path, jacobi0(&["expand", "sigma2", "--trunc", "8"]).stdout).unwrap();
    let v = json(&jacobi0(&["classify", "--input", path.to_str().unwrap(), "--weight", "-2"]));
    assert_eq!(v["filtration"], 3);
    assert_eq!(v["order"], 8);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn grid_file_is_read() {
    let dir = std::env::temp_dir().join(format!("jacobi0-grid-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("grid.json");
    std::fs::write(&path, r#"{"taus": ["0.25+1.5i", "i"], "zs": ["0.1+0.05i"]}"#).unwrap();
    let out = jacobi0(&["verify", "sigma-transform", "--grid", path.to_str().unwrap()]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["suites"][0]["reports"][1]["samples"], 8);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn embed_sigma() {
    let v = json(&jacobi0(&["embed", "--form", "sigma", "--m", "2", "--X", "1/2,1/2", "--X", "1/3,2/3"]));
    assert_eq!(v["weight"], 23);
    assert_eq!(v["components"][0]["ord"], "15/8");
}
