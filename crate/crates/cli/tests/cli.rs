//! End-to-end CLI coverage: report schema, determinism, exit codes, and the
//! cost/weight ingestion paths.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn binary() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_recourse"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn run(args: &[&str], out_dir: &Path) -> Output {
    Command::new(binary())
        .args(args)
        .arg("--out-dir")
        .arg(out_dir)
        .env_remove("RECOURSE_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn linf_args<'a>(command: &'a str, matrix: &'a str, config: &'a str) -> Vec<&'a str> {
    vec![
        command, "--matrix", matrix, "--kind", "weight", "--config", config,
    ]
}

#[test]
fn match_report_has_the_full_schema() {
    let dir = tempfile::tempdir().unwrap();
    let matrix = fixture("two_moon_linf_weights.csv");
    let config = fixture("two_moon_linf.cfg");
    let output = run(
        &linf_args("match", matrix.to_str().unwrap(), config.to_str().unwrap()),
        dir.path(),
    );
    assert!(output.status.success(), "{output:?}");

    let report = read_json(&dir.path().join("match_report.json"));
    let keys: Vec<&str> = report.as_object().unwrap().keys().map(|k| k.as_str()).collect();
    assert_eq!(
        keys,
        vec![
            "assignments",
            "capacities_in",
            "capacities_out",
            "capacity_delta",
            "config",
            "individual_welfare",
            "objective",
            "pct_of_individual",
            "penalty",
            "social_welfare",
            "welfare_gap",
        ]
    );
    assert!((report["social_welfare"].as_f64().unwrap() - 5.591).abs() < 1e-9);
    assert_eq!(report["assignments"].as_array().unwrap().len(), 8);
    assert_eq!(report["config"]["command"], "match");
    assert_eq!(report["config"]["transform"], "none");
    assert_eq!(
        report["config"]["fixture_hash"].as_str().unwrap().len(),
        64
    );
}

#[test]
fn identical_runs_are_byte_identical() {
    let matrix = fixture("two_moon_linf_weights.csv");
    let config = fixture("two_moon_linf.cfg");
    let mut outputs = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().unwrap();
        let status = run(
            &[
                "sweep",
                "--matrix",
                matrix.to_str().unwrap(),
                "--kind",
                "weight",
                "--config",
                config.to_str().unwrap(),
            ],
            dir.path(),
        );
        assert!(status.status.success());
        outputs.push((
            std::fs::read(dir.path().join("sweep_report.json")).unwrap(),
            std::fs::read(dir.path().join("sweep_curve.csv")).unwrap(),
        ));
    }
    assert_eq!(outputs[0].0, outputs[1].0, "JSON reports differ between runs");
    assert_eq!(outputs[0].1, outputs[1].1, "curve CSVs differ between runs");
}

#[test]
fn cost_kind_applies_the_exponential_transform() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("costs.csv"),
        "seeker,p1,p2\ns1,0.0,0.2\ns2,0.1,0.05\n",
    )
    .unwrap();
    std::fs::write(
        dir.path().join("run.cfg"),
        "gamma = 2\ninitial_capacities = 1,1\n",
    )
    .unwrap();
    let output = run(
        &[
            "match",
            "--matrix",
            dir.path().join("costs.csv").to_str().unwrap(),
            "--kind",
            "cost",
            "--config",
            dir.path().join("run.cfg").to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(output.status.success(), "{output:?}");
    let report = read_json(&dir.path().join("match_report.json"));
    assert_eq!(report["config"]["transform"], "exp");
    // Optimum pairs s1 with its zero-cost provider: weights exp(0) = 1 and
    // exp(-2 * 0.05).
    let expected = 1.0 + (-2.0f64 * 0.05).exp();
    assert!((report["social_welfare"].as_f64().unwrap() - expected).abs() < 1e-8);
}

#[test]
fn cost_kind_without_gamma_is_a_named_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("costs.csv"), "seeker,p1\ns1,0.5\n").unwrap();
    std::fs::write(dir.path().join("run.cfg"), "initial_capacities = 1\n").unwrap();
    let output = run(
        &[
            "match",
            "--matrix",
            dir.path().join("costs.csv").to_str().unwrap(),
            "--kind",
            "cost",
            "--config",
            dir.path().join("run.cfg").to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("gamma"), "{stderr}");
    assert!(!dir.path().join("match_report.json").exists());
}

#[test]
fn invalid_inputs_exit_one_and_write_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let config = fixture("two_moon_linf.cfg");

    // Weight outside (0, 1].
    std::fs::write(dir.path().join("bad.csv"), "seeker,p1\ns1,1.5\n").unwrap();
    let output = run(
        &linf_args(
            "match",
            dir.path().join("bad.csv").to_str().unwrap(),
            config.to_str().unwrap(),
        ),
        dir.path(),
    );
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&output.stderr).contains("(0, 1]"));

    // Duplicate seeker ids.
    std::fs::write(
        dir.path().join("dup.csv"),
        "seeker,p1\ns1,0.5\ns1,0.6\n",
    )
    .unwrap();
    let output = run(
        &linf_args(
            "match",
            dir.path().join("dup.csv").to_str().unwrap(),
            config.to_str().unwrap(),
        ),
        dir.path(),
    );
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&output.stderr).contains("duplicate"));

    // Unknown config key.
    std::fs::write(dir.path().join("bad.cfg"), "velocity = 9\n").unwrap();
    let output = run(
        &linf_args(
            "match",
            fixture("two_moon_linf_weights.csv").to_str().unwrap(),
            dir.path().join("bad.cfg").to_str().unwrap(),
        ),
        dir.path(),
    );
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&output.stderr).contains("velocity"));

    assert!(!dir.path().join("match_report.json").exists());
}

#[test]
fn missing_required_config_keys_are_named() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("empty.cfg"), "# nothing here\n").unwrap();
    let matrix = fixture("two_moon_linf_weights.csv");
    let cases = [
        ("match", "initial_capacities"),
        ("allocate", "k_total"),
        ("redistribute", "initial_capacities"),
    ];
    for (command, key) in cases {
        let output = run(
            &linf_args(
                command,
                matrix.to_str().unwrap(),
                dir.path().join("empty.cfg").to_str().unwrap(),
            ),
            dir.path(),
        );
        assert_eq!(output.status.code(), Some(1), "{command}");
        let stderr = String::from_utf8_lossy(&output.stderr);
        assert!(stderr.contains(key), "{command}: {stderr}");
    }
}

#[test]
fn underflowing_costs_warn_but_still_solve() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("costs.csv"),
        "seeker,p1,p2\ns1,0.1,5000\n",
    )
    .unwrap();
    std::fs::write(
        dir.path().join("run.cfg"),
        "gamma = 1\ninitial_capacities = 1,1\n",
    )
    .unwrap();
    let output = run(
        &[
            "match",
            "--matrix",
            dir.path().join("costs.csv").to_str().unwrap(),
            "--kind",
            "cost",
            "--config",
            dir.path().join("run.cfg").to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(output.status.success(), "{output:?}");
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("clamped"), "{stderr}");
    let report = read_json(&dir.path().join("match_report.json"));
    // The clamp keeps the underflowed weight positive, so the report is valid.
    assert!(report["social_welfare"].as_f64().unwrap() > 0.0);
}

#[test]
fn oversized_redistribution_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("huge.cfg"),
        "initial_capacities = 2,4,1,1\nbetas = 0.03\nk_total = 300\n",
    )
    .unwrap();
    let output = run(
        &linf_args(
            "redistribute",
            fixture("two_moon_linf_weights.csv").to_str().unwrap(),
            dir.path().join("huge.cfg").to_str().unwrap(),
        ),
        dir.path(),
    );
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("local_search"), "{stderr}");
    assert!(!dir.path().join("redistribute_report.json").exists());
}

#[test]
fn env_var_overrides_the_default_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let output = Command::new(binary())
        .args(linf_args(
            "allocate",
            fixture("two_moon_linf_weights.csv").to_str().unwrap(),
            fixture("two_moon_linf.cfg").to_str().unwrap(),
        ))
        .env("RECOURSE_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(output.status.success());
    assert!(dir.path().join("allocate_report.json").exists());

    // An explicit --out-dir beats the env var.
    let flag_dir = tempfile::tempdir().unwrap();
    let output = Command::new(binary())
        .args(linf_args(
            "allocate",
            fixture("two_moon_linf_weights.csv").to_str().unwrap(),
            fixture("two_moon_linf.cfg").to_str().unwrap(),
        ))
        .arg("--out-dir")
        .arg(flag_dir.path())
        .env("RECOURSE_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(output.status.success());
    assert!(flag_dir.path().join("allocate_report.json").exists());
}

#[test]
fn sweep_curve_is_monotone_and_sized() {
    let dir = tempfile::tempdir().unwrap();
    let output = run(
        &linf_args(
            "sweep",
            fixture("two_moon_linf_weights.csv").to_str().unwrap(),
            fixture("two_moon_linf.cfg").to_str().unwrap(),
        ),
        dir.path(),
    );
    assert!(output.status.success());
    let csv = std::fs::read_to_string(dir.path().join("sweep_curve.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("k,welfare,individual_welfare,gap"));
    let welfare: Vec<f64> = lines
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(welfare.len(), 33);
    for pair in welfare.windows(2) {
        assert!(pair[1] >= pair[0] - 1e-9);
    }
}

#[test]
fn costs_subcommand_writes_matrix_and_null_report() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("seekers.csv"),
        "seeker,f0,f1\ns1,0,0\ns2,-1,0.5\n",
    )
    .unwrap();
    std::fs::write(
        dir.path().join("providers.csv"),
        "provider,bias,w0,w1\np1,-1,1,0\np2,-1,1,1\n",
    )
    .unwrap();
    std::fs::write(dir.path().join("run.cfg"), "norm = linf\n").unwrap();
    let output = run(
        &[
            "costs",
            "--seekers",
            dir.path().join("seekers.csv").to_str().unwrap(),
            "--providers",
            dir.path().join("providers.csv").to_str().unwrap(),
            "--config",
            dir.path().join("run.cfg").to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(output.status.success(), "{output:?}");

    let matrix = std::fs::read_to_string(dir.path().join("cost_matrix.csv")).unwrap();
    let mut lines = matrix.lines();
    assert_eq!(lines.next(), Some("seeker,p1,p2"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    // s1 at the origin: distance 1 to w=(1,0), half that to w=(1,1) in Linf.
    assert!((first[1].parse::<f64>().unwrap() - 1.000001).abs() < 1e-9);
    assert!((first[2].parse::<f64>().unwrap() - 0.5000005).abs() < 1e-9);

    let report = read_json(&dir.path().join("costs_report.json"));
    assert_eq!(report["config"]["command"], "costs");
    assert_eq!(report["config"]["norm"], "linf");
    assert!(report["social_welfare"].is_null());
    assert!(report["assignments"].is_null());
}
