use std::path::Path;
use std::process::Command;

fn lab(args: &[&str], cwd: &Path) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_yukawa-lab"))
        .args(args)
        .current_dir(cwd)
        .output()
        .unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn theorem_preset_passes() {
    let dir = tempfile::tempdir().unwrap();
    let (code, stdout, _) = lab(&["verify", "--theorem", "lem-lemx", "--out", "o", "--seed", "3"], dir.path());
    assert_eq!(code, 0, "{stdout}");
    assert!(stdout.starts_with("PASS"));
    let json = std::fs::read_to_string(dir.path().join("o/report.json")).unwrap();
    assert!(json.contains("\"seed\": 3"));
}

#[test]
fn failing_verdict_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    // two coarse shells cannot meet the Cauchy criterion
    std::fs::write(
        dir.path().join("run.toml"),
        "[[checks]]\ntheorem = \"thm-1.6\"\nfield = \"yukawa:1\"\nn = 2\nshells = [0.5, 0.4]\n",
    )
    .unwrap();
    let (code, stdout, _) = lab(&["report", "--config", "run.toml", "--out", "o", "--workers", "1"], dir.path());
    assert_eq!(code, 2, "{stdout}");
    assert!(stdout.starts_with("FAIL"));
    assert!(dir.path().join("o/tables/check-0-thm-1.6_shells.csv").exists());
}

#[test]
fn operational_errors_exit_with_1() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, stderr) = lab(&["verify", "--config", "missing.toml"], dir.path());
    assert_eq!(code, 1);
    assert!(stderr.contains("missing.toml"), "{stderr}");
    std::fs::write(dir.path().join("bad.toml"), "checks = 3").unwrap();
    let (code, _, stderr) = lab(&["verify", "--config", "bad.toml"], dir.path());
    assert_eq!(code, 1);
    assert!(stderr.contains("parse"), "{stderr}");
    let (code, _, _) = lab(&["verify", "--theorem", "thm-0"], dir.path());
    assert_eq!(code, 1);
}

#[test]
fn json_config_and_solve_verb() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("run.json"),
        r#"{"problems": [{"id": "disk", "n": 2, "lambda": "const:0.5", "backend": "fd-grid"}]}"#,
    )
    .unwrap();
    let (code, stdout, _) = lab(&["solve", "--config", "run.json", "--out", "o"], dir.path());
    assert_eq!(code, 0, "{stdout}");
    assert!(stdout.contains("backend=fd-grid"));
}
