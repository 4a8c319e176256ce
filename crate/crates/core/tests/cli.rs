use std::process::{Command, Output};

fn cvdj(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cvdj")).args(args).output().unwrap()
}

fn code(args: &[&str]) -> i32 {
    cvdj(args).status.code().unwrap()
}

#[test]
fn repeated_runs_are_byte_identical() {
    for args in [
        &["dj", "--trials", "5000", "--seed", "9"][..],
        &["estimate", "--replicas", "300", "--seed", "4"],
        &["crosscheck", "--r", "0,P/2", "--phi", "0:pi:5"],
        &["fisher-phi", "--engine", "all", "--r", "P/4", "--phi", "0.3,1.2"],
    ] {
        let a = cvdj(args);
        let b = cvdj(args);
        assert!(a.status.success(), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn out_file_matches_stdout() {
    let dir = std::env::temp_dir().join(format!("cvdj-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("audit.json");
    let args = ["audit", "--format", "json"];
    let stdout = cvdj(&args).stdout;
    let mut with_out = args.to_vec();
    let p = path.to_str().unwrap();
    with_out.extend(["--out", p]);
    let o = cvdj(&with_out);
    assert!(o.status.success() && o.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), stdout);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn json_rows_use_csv_headers() {
    let csv_out = cvdj(&["prob", "--engine", "all", "--r", "0", "--phi", "0,pi/4"]).stdout;
    let header: Vec<String> = String::from_utf8(csv_out)
        .unwrap()
        .lines()
        .next()
        .unwrap()
        .split(',')
        .map(String::from)
        .collect();
    let json_out = cvdj(&[
        "prob", "--engine", "all", "--r", "0", "--phi", "0,pi/4", "--format", "json",
    ])
    .stdout;
    let v: serde_json::Value = serde_json::from_slice(&json_out).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    let keys: Vec<String> = rows[0].as_object().unwrap().keys().cloned().collect();
    assert_eq!(keys, header);
}

#[test]
fn crosscheck_single_points() {
    let out = cvdj(&["crosscheck", "--r", "0", "--phi", "pi/2", "--tol", "1e-8"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let row: Vec<f64> = text
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .take(5)
        .map(|c| c.parse().unwrap())
        .collect();
    assert!(row[2..].iter().all(|p| p.abs() <= 1e-8));
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["audit"]), 0);
    assert_eq!(code(&["crosscheck", "--tol", "1e-12", "--r", "0", "--phi", "0"]), 3);
    assert_eq!(code(&["prob", "--delta", "-1"]), 2);
    assert_eq!(code(&["prob", "--phi", "0:1:1"]), 2);
    assert_eq!(code(&["prob", "--phi", "banana"]), 2);
    assert_eq!(code(&["fisher-r", "--engine", "grid"]), 2);
    assert_eq!(code(&["fisher-phi", "--fig4", "--delta", "1"]), 2);
    assert_eq!(code(&["estimate", "--r", "P"]), 2);
    assert_eq!(code(&["validate", "--big-t", "0"]), 2);
    assert_eq!(code(&["nonsense"]), 2);
    assert_eq!(code(&["prob", "--big-t", "1"]), 2);
}

#[test]
fn help_documents_columns() {
    let out = cvdj(&["crosscheck", "--help"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("max_deviation") && text.contains("--tol"));
}
