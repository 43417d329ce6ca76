use std::path::{Path, PathBuf};
use std::process::Command;

use jetvar::cli::{render_json, run, CliOutput};

fn dir(sub: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join(sub)
}

fn fixture(name: &str) -> String {
    dir("fixtures").join(name).to_string_lossy().into_owned()
}

fn oscillator() -> String {
    dir("golden").join("oscillator.json").to_string_lossy().into_owned()
}

fn jetvar(args: &[&str]) -> CliOutput {
    run(std::iter::once("jetvar").chain(args.iter().copied()))
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(dir("golden").join(name)).unwrap()
}

fn subcommands() -> Vec<(&'static str, Vec<&'static str>)> {
    vec![
        ("el", vec!["el"]),
        ("prolong", vec!["prolong"]),
        ("symcheck", vec!["symcheck"]),
        ("noether_direct", vec!["noether", "--direct"]),
        ("noether_inverse", vec!["noether", "--inverse"]),
        ("verify", vec!["verify"]),
    ]
}

#[test]
fn golden_outputs_for_the_oscillator() {
    let file = oscillator();
    for (name, args) in subcommands() {
        for json in [false, true] {
            let mut argv: Vec<&str> = Vec::new();
            if json {
                argv.push("--json");
            }
            argv.extend(&args);
            argv.push(&file);
            let out = jetvar(&argv);
            assert_eq!(out.code, 0, "{name}: {}", out.stderr);
            let expected = golden(&format!("{name}{}.txt", if json { "_json" } else { "" }));
            assert_eq!(out.stdout, expected, "{name} json={json}");
            assert_eq!(jetvar(&argv), out, "{name} is not stable across runs");
            let mut seeded = vec!["--seed", "24301"];
            seeded.extend(&argv);
            assert_eq!(jetvar(&seeded).stdout, out.stdout);
        }
    }
}

#[test]
fn json_output_round_trips() {
    let file = oscillator();
    for (name, args) in subcommands() {
        let mut argv = vec!["--json"];
        argv.extend(&args);
        argv.push(&file);
        let out = jetvar(&argv).stdout;
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(render_json(&v), out, "{name}");
    }
}

#[test]
fn lagrangian_files() {
    let out = jetvar(&["el", &fixture("oscillator_lagrangian.json")]);
    assert_eq!(out.code, 0);
    assert_eq!(out.stdout, "sigma_1 = -y1_0 - y1_2\n");
    let out = jetvar(&["noether", "--direct", &fixture("oscillator_lagrangian.json")]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.contains("f = -1/2*y1_0^2 - 1/2*y1_1^2\n"), "{}", out.stdout);
    let out = jetvar(&["--chart-order", "3", "prolong", &fixture("oscillator_lagrangian.json")]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.starts_with("depth = 1\n"), "{}", out.stdout);
}

#[test]
fn hamiltonian_el_prints_both_rows() {
    let out = jetvar(&["el", &oscillator()]);
    assert_eq!(out.stdout, "sigma_1 = -q1 - p1_1\nsigma_2 = -p1 + q1_1\n");
}

#[test]
fn one_form_files() {
    let out = jetvar(&["el", &fixture("one_form.json")]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(out.stdout, jetvar(&["el", &oscillator()]).stdout);
}

#[test]
fn noether_examples() {
    let out = jetvar(&["noether", "--inverse", &fixture("free_particle.json")]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("X = d/dq1\n"));
    assert!(out.stdout.contains("interior(X, a_o) = p1\n"));
    let out = jetvar(&["noether", "--direct", &oscillator()]);
    assert!(out.stdout.contains("f = -1/2*q1^2 - 1/2*p1^2\n"));
    let out = jetvar(&["noether", "--inverse", &fixture("free_particle_q.json")]);
    assert_eq!(out.code, 3, "{}", out.stderr);
    let out = jetvar(&["noether", "--direct", "--field", &fixture("shift_q.json"), &oscillator()]);
    assert_eq!(out.code, 1, "{}", out.stderr);
    let out = jetvar(&["noether", "--inverse", &fixture("planar_ansatz.json")]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.contains("fiber projection = (-y2_0) d/dy1_0 + (y1_0) d/dy2_0\n"), "{}", out.stdout);
}

#[test]
fn symcheck_exit_codes() {
    assert_eq!(jetvar(&["symcheck", &oscillator()]).code, 0);
    let out = jetvar(&["symcheck", "--field", &fixture("shift_q.json"), &oscillator()]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.contains("action symmetry: fail"));
    assert_eq!(jetvar(&["symcheck", "--field", &fixture("missing.json"), &oscillator()]).code, 2);
    assert_eq!(jetvar(&["symcheck", &fixture("oscillator_no_initial.json")]).code, 2);
}

#[test]
fn verify_exit_codes() {
    assert_eq!(jetvar(&["verify", &fixture("free_particle.json")]).code, 0);
    let out = jetvar(&["verify", &fixture("free_particle_q.json")]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.contains("conserved q1: max drift 1.000e1 (tol 1e-8) fail"), "{}", out.stdout);
    assert_eq!(jetvar(&["verify", &fixture("oscillator_no_initial.json")]).code, 2);
    assert_eq!(jetvar(&["verify", "--dt", "0", &oscillator()]).code, 2);
    assert_eq!(jetvar(&["verify", &fixture("oscillator_lagrangian.json")]).code, 3);
}

#[test]
fn input_errors() {
    assert_eq!(jetvar(&["el", &fixture("malformed.json")]).code, 2);
    assert_eq!(jetvar(&["el", &fixture("does_not_exist.json")]).code, 2);
    assert_eq!(jetvar(&["noether", &oscillator()]).code, 2);
    assert_eq!(jetvar(&["frobnicate"]).code, 2);
    assert_eq!(jetvar(&["--help"]).code, 0);
}

#[test]
fn binary_matches_library_entry_point() {
    let out = Command::new(env!("CARGO_BIN_EXE_jetvar"))
        .args(["el", &oscillator()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden("el.txt"));
    let bad = Command::new(env!("CARGO_BIN_EXE_jetvar"))
        .args(["el", &fixture("malformed.json")])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
