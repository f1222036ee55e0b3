#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

pub const BIN: &str = env!("CARGO_BIN_EXE_qdeform");

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Run {
    pub fn json(&self) -> Value {
        serde_json::from_str(&self.stdout)
            .unwrap_or_else(|e| panic!("stdout is not JSON ({e}):\n{}", self.stdout))
    }
}

/// Runs the binary with `QDEFORM_CONFIG` cleared.
pub fn run(args: &[&str]) -> Run {
    run_with_env(args, &[])
}

pub fn run_with_env(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(BIN);
    cmd.args(args).env_remove("QDEFORM_CONFIG");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("spawn qdeform");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// The frozen matrix convergence calibration.
pub fn convergence_golden() -> Value {
    let text = std::fs::read_to_string(golden_dir().join("matrix_convergence.json"))
        .expect("read matrix_convergence.json");
    serde_json::from_str(&text).expect("golden calibration is JSON")
}

/// Writes a config carrying the frozen convergence threshold; returns its path.
pub fn threshold_config(dir: &Path) -> PathBuf {
    let threshold = convergence_golden()["threshold"]
        .as_f64()
        .expect("threshold");
    let path = dir.join("qdeform.toml");
    std::fs::write(
        &path,
        format!("[thresholds]\nmatrix_residual = {threshold:e}\n"),
    )
    .unwrap();
    path
}

pub struct Case {
    pub name: &'static str,
    pub args: Vec<String>,
}

fn case(name: &'static str, args: &[&str]) -> Case {
    Case {
        name,
        args: args.iter().map(|s| s.to_string()).collect(),
    }
}

/// Every command the acceptance criteria run. `config` is passed to the
/// matrix convergence scans.
pub fn command_matrix(config: &Path) -> Vec<Case> {
    let config = config.to_str().expect("utf-8 temp path");
    vec![
        case(
            "verify-symbolic-d10",
            &["verify", "--engine", "symbolic", "--degree", "10"],
        ),
        case(
            "verify-symbolic-d12",
            &["verify", "--engine", "symbolic", "--degree", "12"],
        ),
        case(
            "scan-symbolic-d10",
            &["scan", "--engine", "symbolic", "--degree", "10"],
        ),
        case(
            "verify-matrix-n128-mu0.3",
            &[
                "verify",
                "--engine",
                "matrix",
                "--dim",
                "128",
                "--interior",
                "8",
                "--mu",
                "0.3",
                "--nu",
                "0.3",
            ],
        ),
        case(
            "verify-clock-shift-n16-k3",
            &[
                "verify",
                "--engine",
                "clock-shift",
                "--dim",
                "16",
                "--level",
                "3",
            ],
        ),
        case(
            "verify-clock-shift-n64-k63",
            &[
                "verify",
                "--engine",
                "clock-shift",
                "--dim",
                "64",
                "--level",
                "63",
            ],
        ),
        case(
            "scan-periodicity-alpha3",
            &[
                "scan",
                "--engine",
                "clock-shift",
                "--alpha",
                "3.0",
                "--n",
                "0..100",
            ],
        ),
        case(
            "scan-hbar-to-0",
            &[
                "scan",
                "--path",
                "hbar-to-0",
                "--alpha",
                "1.0",
                "--beta",
                "1.0",
                "--n",
                "0..5",
            ],
        ),
        case(
            "scan-matrix-mu0.2",
            &[
                "scan",
                "--engine",
                "matrix",
                "--mu",
                "0.2",
                "--nu",
                "0.2",
                "--interior",
                "8",
                "--dims",
                "16,32,64,128",
                "--config",
                config,
            ],
        ),
        case(
            "scan-matrix-mu0",
            &[
                "scan",
                "--engine",
                "matrix",
                "--mu",
                "0",
                "--nu",
                "0",
                "--interior",
                "8",
                "--dims",
                "16,32,64,128",
                "--config",
                config,
            ],
        ),
        case("scan-q-to-1", &["scan", "--path", "q-to-1", "--n", "0..5"]),
        case(
            "scan-omega-to-0",
            &["scan", "--path", "omega-to-0", "--n", "0..5"],
        ),
        case("verify-params", &["verify", "--engine", "params"]),
        case("expand-P-d2", &["expand", "--target", "P", "--degree", "2"]),
        case(
            "expand-prefactor-d4",
            &["expand", "--target", "prefactor", "--degree", "4"],
        ),
        case(
            "expand-eq9-d2",
            &["expand", "--target", "eq9", "--degree", "2"],
        ),
        case(
            "expand-eq8-rhs-d4",
            &["expand", "--target", "eq8-rhs", "--degree", "4"],
        ),
        case(
            "verify-matrix-bad-interior",
            &[
                "verify",
                "--engine",
                "matrix",
                "--dim",
                "4",
                "--interior",
                "8",
            ],
        ),
        case(
            "scan-matrix-empty-dims",
            &["scan", "--engine", "matrix", "--dims", ""],
        ),
    ]
}

/// Output with the timestamp masked when it is a JSON report.
pub fn masked(stdout: &str) -> String {
    if stdout.trim_start().starts_with('{') {
        qdeform_cli::report::mask_timestamp(stdout).expect("report JSON")
    } else {
        stdout.to_string()
    }
}

pub fn golden_file(name: &str, output: &str) -> PathBuf {
    let ext = if output.trim_start().starts_with('{') {
        "json"
    } else {
        "txt"
    };
    golden_dir().join("reports").join(format!("{name}.{ext}"))
}
