//! End-to-end tests of the `ringfem` binary: flag parsing, exit codes, and
//! the CSV/JSON artifacts.

use std::path::PathBuf;
use std::process::{Command, Output};

fn ringfem(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ringfem"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn tmp(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("ringfem-cli-{}-{name}", std::process::id()))
}

/// Relative energy error column of the first data row.
fn err_rel(csv: &str) -> f64 {
    let row = csv.lines().nth(1).expect("data row");
    row.split(',').nth(4).unwrap().parse().unwrap()
}

#[test]
fn solve_manufactured_reaches_roundoff() {
    let out = ringfem(&[
        "solve",
        "--case",
        "manufactured",
        "--radii",
        "1,1.8,3",
        "--eps",
        "0.5",
        "--p",
        "3",
        "--sectors",
        "8",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let csv = stdout(&out);
    assert!(csv.starts_with("eps,p,N,err_energy_abs,err_energy_rel,err_l2,runtime_ms\n"));
    assert!(err_rel(&csv) <= 1e-8, "error {}", err_rel(&csv));
}

#[test]
fn flipping_the_interface_sign_breaks_the_manufactured_case() {
    // the manufactured solution at radii (1,1.8,3) has a nonzero interface
    // flux datum, so the sign of the interface term is observable
    let good = ringfem(&[
        "solve", "--case", "manufactured", "--radii", "1,1.8,3", "--eps", "0.5", "--p", "3",
        "--sectors", "8", "--h-sign", "+",
    ]);
    let bad = ringfem(&[
        "solve", "--case", "manufactured", "--radii", "1,1.8,3", "--eps", "0.5", "--p", "3",
        "--sectors", "8", "--h-sign", "-",
    ]);
    assert!(good.status.success() && bad.status.success());
    assert!(err_rel(&stdout(&good)) <= 1e-8);
    assert!(err_rel(&stdout(&bad)) > 1e-3, "flipped sign still converged");
}

#[test]
fn invalid_radii_exit_with_config_code() {
    let out = ringfem(&["solve", "--radii", "2,1,3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("radii"));
}

#[test]
fn empty_degree_list_is_a_usage_error() {
    let out = ringfem(&["sweep", "--p", ""]);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr(&out));
}

#[test]
fn solve_rejects_lists() {
    let out = ringfem(&["solve", "--p", "2,3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("sweep"));
}

#[test]
fn sweep_is_deterministic_and_writes_a_json_mirror() {
    let a = tmp("sweep-a.csv");
    let b = tmp("sweep-b.csv");
    for path in [&a, &b] {
        let out = ringfem(&[
            "sweep",
            "--eps",
            "1e-2",
            "--p",
            "1,2,3",
            "--sectors",
            "8",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "stderr: {}", stderr(&out));
    }
    let strip = |p: &PathBuf| -> String {
        std::fs::read_to_string(p)
            .unwrap()
            .lines()
            .map(|line| {
                if line.starts_with('#') {
                    line.to_string()
                } else {
                    line.split(',').take(6).collect::<Vec<_>>().join(",")
                }
            })
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&a), strip(&b), "sweep output not deterministic");

    let csv = std::fs::read_to_string(&a).unwrap();
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 1 + 3);
    assert!(csv.lines().any(|l| l.starts_with("# fit eps=")), "missing fit line");

    let json = std::fs::read_to_string(a.with_extension("json")).unwrap();
    assert!(json.contains("\"records\"") && json.contains("\"fits\""));
    assert!(json.contains("\"err_energy_rel\""));
    for p in [&a, &b] {
        let _ = std::fs::remove_file(p);
        let _ = std::fs::remove_file(p.with_extension("json"));
    }
}

#[test]
fn mesh_dump_reports_the_regime() {
    let pre = ringfem(&["mesh", "--eps", "1e-2", "--p", "8"]);
    assert!(pre.status.success());
    let js = stdout(&pre);
    assert!(js.contains("\"regime\": \"preasymptotic\""));
    assert!(js.contains("boundary-needle") && js.contains("interface-needle"));

    let asy = ringfem(&["mesh", "--eps", "1", "--p", "8"]);
    assert!(asy.status.success());
    let js = stdout(&asy);
    assert!(js.contains("\"regime\": \"asymptotic\""));
    assert!(!js.contains("needle"));
}

#[test]
fn oracle_table_has_the_pinned_shape() {
    let out = ringfem(&["oracle", "--eps", "1e-2", "--samples", "5"]);
    assert!(out.status.success());
    let csv = stdout(&out);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "r,u,dudr");
    // 5 samples per ring, interface listed from both sides
    assert_eq!(lines.len(), 1 + 10);
    let first: Vec<f64> =
        lines[1].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(first[0], 1.0);
    assert!(first[1].abs() < 1e-12, "Dirichlet value {}", first[1]);
}

#[test]
fn expansion_table_decays_with_eps() {
    let out = ringfem(&["expansion", "--eps", "1e-1,1e-2", "--samples", "400"]);
    assert!(out.status.success());
    let csv = stdout(&out);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "eps,sup_error");
    let sup: Vec<f64> = lines[1..]
        .iter()
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(sup[1] < 0.2 * sup[0], "sup errors {sup:?} not decaying");
}

#[test]
fn solution_dump_is_written() {
    let path = tmp("solution.json");
    let out = ringfem(&[
        "solve",
        "--eps",
        "0.5",
        "--p",
        "2",
        "--sectors",
        "4",
        "--solution-out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let js = std::fs::read_to_string(&path).unwrap();
    assert!(js.contains("\"radii\"") && js.contains("\"thetas\"") && js.contains("\"values\""));
    let _ = std::fs::remove_file(&path);
}
