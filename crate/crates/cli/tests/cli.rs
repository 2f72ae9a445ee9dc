use std::process::Command;

fn approach() -> Command {
    Command::new(env!("CARGO_BIN_EXE_approach"))
}

const CONFIG: &str = r#"
[scenario]
kind = "example1"
[strategy]
kind = "block"
[adversary]
kind = "constant"
point = [1.0]
[run]
horizon = 1000
seed = 1
metrics = ["phi_star"]
"#;

#[test]
fn run_writes_csv_with_header_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("minimal.toml");
    std::fs::write(&cfg, CONFIG).unwrap();
    let out = dir.path().join("out");
    let status = approach()
        .arg("run")
        .arg(&cfg)
        .env("APPROACH_OUTPUT_DIR", &out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(out.join("minimal.csv")).unwrap();
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert!(body[0].starts_with("t,rbar_0,rbar_1,mbar_0,dist_phi_star"));
    assert!(body.len() > 10);
    assert!(out.join("minimal.txt").exists());

    let report = approach()
        .arg("report")
        .arg(out.join("minimal.csv"))
        .env("APPROACH_OUTPUT_DIR", &out)
        .output()
        .unwrap();
    assert!(report.status.success());
    assert!(String::from_utf8_lossy(&report.stdout).contains("phi_star: final"));
}

#[test]
fn bad_config_exits_nonzero_naming_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, CONFIG.replace("seed = 1", "seeed = 1")).unwrap();
    let output = approach()
        .arg("run")
        .arg(&cfg)
        .env("APPROACH_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(!output.status.success());
    assert!(String::from_utf8_lossy(&output.stderr).contains("seeed"));
}

#[test]
fn verify_targets_passes_and_writes_grids() {
    let dir = tempfile::tempdir().unwrap();
    let output = approach()
        .arg("verify-targets")
        .env("APPROACH_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(!stdout.contains("FAIL"));
    assert!(dir.path().join("example1_targets.csv").exists());
}

#[test]
fn blackwell_subcommand_reports_excess() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("quadrant.toml");
    std::fs::write(
        &cfg,
        "[scenario]\nkind = \"example2_quadrant\"\n[strategy]\nkind = \"block\"\n[adversary]\nkind = \"random_iid\"\n[run]\nhorizon = 2000\n",
    )
    .unwrap();
    let output = approach()
        .arg("blackwell")
        .arg(&cfg)
        .env("APPROACH_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    assert!(String::from_utf8_lossy(&output.stdout).contains("inner-product excess"));
}
