//! End-to-end tests invoking the built binary on real scenario files.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use emqs::matrix_market;
use emqs::scenario::{parse_scenario_str, resolve};
use emqs::verdict::Verdict;
use emqs_core::formulation::assemble_system;

const SCENARIO: &str = r#"
formulations = ["MAXWELL", "EMQS_SYMMETRIZED", "EMQS_COULOMB_SKEW"]

[grid]
nx = 3
ny = 3
nz = 3
dx = 0.1
dy = 0.1
dz = 0.1

[material]
kappa = 1e-3
eps = 1.0
nu = 1.0

[gauge]
eps_hat = 0.5

[source]
profile = { type = "sine", frequency = 2.0 }
pattern = { type = "stride", step = 5 }

[stepper]
dt = 1e-3
steps = 20
record_stride = 5
"#;

fn write_scenario(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("scenario.toml");
    fs::write(&path, SCENARIO).unwrap();
    path
}

fn emqs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_emqs"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn check_passes_and_writes_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let scn = write_scenario(dir.path());
    let out_arg = dir.path().join("out");
    let out = emqs(&["check", scn.to_str().unwrap(), "--out", out_arg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(out_arg.join("check/verdicts.json")).unwrap();
    let verdicts: Vec<Verdict> = serde_json::from_str(&text).unwrap();
    assert!(!verdicts.is_empty());
    assert!(verdicts.iter().all(|v| v.pass));
    // one dense oracle verdict per assemblable formulation
    assert_eq!(verdicts.iter().filter(|v| v.check.contains("oracle")).count(), 8);
}

#[test]
fn run_writes_one_csv_row_per_recorded_step() {
    let dir = tempfile::tempdir().unwrap();
    let scn = write_scenario(dir.path());
    let out_arg = dir.path().join("out");
    let out = emqs(&["run", scn.to_str().unwrap(), "--out", out_arg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for tag in ["maxwell", "emqs_symmetrized", "emqs_coulomb_skew"] {
        let text = fs::read_to_string(out_arg.join(format!("run/{tag}.csv"))).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        // header plus steps / record_stride + 1 rows
        assert_eq!(lines.len(), 1 + 20 / 5 + 1, "{tag}");
        assert!(lines[0].starts_with("step,t,h_quadratic"));
        assert!(lines[1].starts_with("0,0,"));
    }
}

#[test]
fn stepper_overrides_change_the_row_count() {
    let dir = tempfile::tempdir().unwrap();
    let scn = write_scenario(dir.path());
    let out_arg = dir.path().join("out");
    let out = emqs(&[
        "run",
        scn.to_str().unwrap(),
        "--steps",
        "10",
        "--out",
        out_arg.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(out_arg.join("run/maxwell.csv")).unwrap();
    assert_eq!(text.lines().count(), 1 + 10 / 5 + 1);
}

#[test]
fn exported_matrices_reimport_bitwise_identical() {
    let dir = tempfile::tempdir().unwrap();
    let scn = write_scenario(dir.path());
    let out_arg = dir.path().join("out");
    let out = emqs(&["export", scn.to_str().unwrap(), "--out", out_arg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let resolved = resolve(parse_scenario_str(SCENARIO).unwrap()).unwrap();
    for tag in resolved.scenario.tags() {
        let sys = assemble_system(tag, &resolved.ops, &resolved.hodges).unwrap();
        let sub = out_arg.join("export").join(tag.name().to_lowercase());
        for (name, expected) in [("E", &sys.e), ("J", &sys.j), ("R", &sys.r), ("B", &sys.b)] {
            let got = matrix_market::read_file(&sub.join(format!("{name}.mtx"))).unwrap();
            assert_eq!(got, *expected, "{} {}", tag.name(), name);
        }
    }
}

#[test]
fn compare_of_identical_formulations_reports_zero() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scenario.toml");
    let text = SCENARIO.replace(
        r#"["MAXWELL", "EMQS_SYMMETRIZED", "EMQS_COULOMB_SKEW"]"#,
        r#"["EMQS_SYMMETRIZED", "EMQS_SYMMETRIZED"]"#,
    );
    fs::write(&path, text).unwrap();
    let out_arg = dir.path().join("out");
    let out = emqs(&[
        "compare",
        path.to_str().unwrap(),
        "--tolerance",
        "1e-14",
        "--out",
        out_arg.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_arg.join("compare/comparison.json")).unwrap())
            .unwrap();
    assert_eq!(doc[0]["max_rel"], 0.0);
    assert_eq!(doc[0]["pass"], true);
}

#[test]
fn compare_without_tolerance_is_informational() {
    let dir = tempfile::tempdir().unwrap();
    let scn = write_scenario(dir.path());
    let out_arg = dir.path().join("out");
    let out = emqs(&["compare", scn.to_str().unwrap(), "--out", out_arg.to_str().unwrap()]);
    // genuinely different trajectories, yet no tolerance means no failure
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_arg.join("compare/comparison.json")).unwrap())
            .unwrap();
    assert!(doc[0].get("pass").is_none());
    assert!(doc[0]["max_rel"].as_f64().unwrap() > 0.0);
}

#[test]
fn non_solenoidal_source_triggers_a_warning() {
    let dir = tempfile::tempdir().unwrap();
    let scn = write_scenario(dir.path());
    let out_arg = dir.path().join("out");
    let out = emqs(&["run", scn.to_str().unwrap(), "--out", out_arg.to_str().unwrap()]);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("not solenoidal"), "{stderr}");
}

#[test]
fn malformed_scenario_exits_with_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(&path, SCENARIO.replace("dt = 1e-3", "dt = -1.0")).unwrap();
    let out = emqs(&["check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dt"));
}
