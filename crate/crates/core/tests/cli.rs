use std::process::{Command, Output};

fn wlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wlab"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn analyze_emits_the_bundle() {
    let out = wlab(&["analyze", "--comp", "1,3,2,1"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["composition"], "1,3,2,1");
    assert_eq!(v["eigenvalue_sum"], "0");
}

#[test]
fn output_is_deterministic_for_a_seed() {
    let a = wlab(&["analyze", "--comp", "2,1,2,1,2", "--seed", "7"]);
    let b = wlab(&["analyze", "--comp", "2,1,2,1,2", "--seed", "7"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(wlab(&["analyze", "--comp", "0,2"]).status.code(), Some(2));
    assert_eq!(
        wlab(&["analyze", "--comp", "2,2", "--prime", "15"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(wlab(&["sweep", "--n", "12"]).status.code(), Some(2));
    assert_eq!(wlab(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn sweep_writes_files() {
    let dir = std::env::temp_dir().join(format!("wlab-cli-{}", std::process::id()));
    let out = wlab(&[
        "sweep",
        "--n",
        "4",
        "--format",
        "ascii",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.join("sweep.txt")).unwrap();
    assert!(text
        .lines()
        .any(|l| l.split_whitespace().take(4).eq(["4", "8", "8", "0"])));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn render_tableau() {
    let out = wlab(&["render", "tableau", "--comp", "1,3,2,1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(!out.stdout.is_empty());
}
