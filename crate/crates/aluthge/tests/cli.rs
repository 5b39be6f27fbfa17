use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aluthge"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn sqrt_of_point_mass() {
    let out = run(&["sqrt", "d(1)"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["root"]["expr"], "d(1)");
    assert_eq!(v["scalar"], "1/1");
    assert_eq!(v["sign_verdict"], "constant_sign");
}

#[test]
fn certify_first_family() {
    let out = run(&[
        "certify",
        "d(4)+2d(8)+3/5 d(16)+8/5 d(32)+101/25 d(64)+8/5 d(128)+3/5 d(256)+2 d(512)+d(1024)",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["w_alpha_subnormal"], true);
    assert_eq!(v["sqrt_shift_subnormal"], false);
    assert_eq!(v["aluthge_subnormal"], true);
    assert_eq!(v["implication_violations"], Value::Array(vec![]));
}

#[test]
fn convolve_moments_and_tmul() {
    let v = json(&run(&["convolve", "d(2)", "d(2)+d(4)"]));
    assert_eq!(v["expr"], "d(4) + d(8)");
    let v = json(&run(&["moments", "1/2 d(1) + 1/2 d(2)", "--n", "4"]));
    assert_eq!(v["moments"], serde_json::json!(["1/1", "3/2", "5/2", "9/2"]));
    let v = json(&run(&["tmul", "d(2) - d(4)"]));
    assert_eq!(v["expr"], "2 d(2) - 4 d(4)");
}

#[test]
fn domain_errors_exit_one() {
    let out = run(&["square", "d(3)+d(5)"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["error"]["kind"], "NoCommonBase");

    let out = run(&["square", "d(4) x"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["error"]["kind"], "SyntaxError");
    assert_eq!(v["error"]["offset"], 5);

    let out = run(&["recover", "--moments", "1,1,2,3,5,8,13,21"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["error"]["data"]["exact"], false);
}

#[test]
fn usage_errors_exit_two() {
    for args in [&["frobnicate"][..], &["sqrt"], &["suite", "thm44", "--trials", "many"]] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty());
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn suite_exit_code_and_determinism() {
    let a = run(&["suite", "thm44", "--trials", "300", "--seed", "7", "--threads", "2"]);
    let b = run(&["suite", "thm44", "--trials", "300", "--seed", "7", "--threads", "1"]);
    assert_eq!(a.status.code(), Some(0));
    let (mut va, mut vb) = (json(&a), json(&b));
    assert_eq!(va["violations"], Value::Array(vec![]));
    va["elapsed_ms"] = Value::Null;
    vb["elapsed_ms"] = Value::Null;
    assert_eq!(va, vb);
}

#[test]
fn example_and_scan() {
    let v = json(&run(&["example", "ex61", "--lambda", "2", "--b", "1,2,3,1"]));
    assert_eq!(v["xx"], true);
    assert_eq!(v["mu_positive"], false);
    let out = run(&["example", "ex52", "--lambda", "2", "--alpha", "3"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&run(&["scan", "ex61", "--lambdas", "2,3,41/11,15/4,4", "--bs", "1,2,3,1"]));
    let confirmed: Vec<&str> = v["confirmed"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["params"]["lambda"].as_str().unwrap())
        .collect();
    assert_eq!(confirmed, ["2/1", "3/1", "41/11"]);
}

#[test]
fn mellin_scan_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.csv");
    let out = run(&[
        "mellin-scan",
        "d(2) + d(4)",
        "--rect",
        "-1,1,0,2",
        "--nx",
        "5",
        "--ny",
        "3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["rows"], 15);
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("re,im,abs,arg"));
    let first: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    // M(−1) = 1/2 + 1/4
    assert_eq!(first[..2], [-1.0, 0.0]);
    assert!((first[2] - 0.75).abs() < 1e-12);
    assert_eq!(text.lines().count(), 16);
}

#[test]
fn zeros_and_pretty() {
    // M(z) = 2^z + 4^z vanishes where 2^z = −1
    let v = json(&run(&["zeros", "d(2)+d(4)", "--rect", "-1,1,1,8"]));
    assert_eq!(v["count"], 1);
    let out = run(&["--pretty", "sqrt", "d(4)"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("scalar"));
    assert!(serde_json::from_str::<Value>(&text).is_err());
}
