use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ftlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ftlab")).args(args).output().expect("run ftlab")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn path(dir: &tempfile::TempDir, name: &str) -> String {
    dir.path().join(name).to_string_lossy().into_owned()
}

#[test]
fn flow_at_the_fixed_point_stays_put() {
    let o = ftlab(&["flow", "--p0", "0.047619", "--levels", "5"]);
    assert_eq!(code(&o), 0);
    let values: Vec<f64> = stdout(&o).lines().map(|l| l.rsplit(' ').next().unwrap().parse().unwrap()).collect();
    assert_eq!(values.len(), 6);
    for v in &values[1..] {
        assert!((v - 1.0 / 21.0).abs() < 1e-5, "{v}");
    }
}

#[test]
fn resources_for_432_bits() {
    let o = ftlab(&["resources", "--bits", "432"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.contains("qubits=2160"), "{s}");
    assert!(s.contains(&format!("toffolis={}", 38u64 * 432 * 432 * 432)), "{s}");
}

#[test]
fn noiseless_mc_has_no_failures() {
    let o = ftlab(&["mc", "--method", "steane", "--eps-store", "0", "--eps-gate", "0", "--trials", "1000", "--seed", "7"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("failures=0"), "{}", stdout(&o));
}

#[test]
fn randomized_subcommands_need_a_seed() {
    for args in [
        &["mc", "--trials", "10"][..],
        &["recover-demo"][..],
        &["threshold", "--max-trials", "100", "--min-trials", "100"][..],
        &["toffoli-verify"][..],
    ] {
        let o = ftlab(args);
        assert_eq!(code(&o), 2, "{args:?}");
    }
}

#[test]
fn config_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = path(&dir, "bad.cfg");
    fs::write(&cfg, "eps_stor = 0.01\n").unwrap();
    assert_eq!(code(&ftlab(&["mc", "--config", &cfg, "--seed", "1"])), 2);
    assert_eq!(code(&ftlab(&["mc", "--set", "nonsense=1", "--seed", "1"])), 2);
    assert_eq!(code(&ftlab(&["mc", "--eps-store", "1.5", "--seed", "1"])), 2);
    assert_eq!(code(&ftlab(&["no-such-subcommand"])), 2);
    assert_eq!(code(&ftlab(&["encode", "--circuit", "nope"])), 2);
    assert_eq!(code(&ftlab(&["threshold", "--seed", "1", "--eps-store", "0.1"])), 2);
}

#[test]
fn codes_that_cannot_correct_one_error_are_rejected() {
    // two-qubit repetition code: a bit flip is detected but not located
    let dir = tempfile::tempdir().unwrap();
    let file = path(&dir, "rep2.code");
    fs::write(&file, ".code rep2\nZZ\n.logical_z\nZI\n.logical_x\nXX\n").unwrap();
    assert_eq!(code(&ftlab(&["syndrome-demo", "--code", &file, "--error", "XI"])), 2);
    assert_eq!(code(&ftlab(&["code-info", "--code", &file])), 2);
    assert_eq!(code(&ftlab(&["syndrome-demo"])), 0);
}

#[test]
fn config_round_trips_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let (file, a, b) = (path(&dir, "in.cfg"), path(&dir, "a.cfg"), path(&dir, "b.cfg"));
    fs::write(&file, "# sweep\nmethod = shor\neps_store = 0.002\neps_gate.cnot = 0.001\ntrials = 50\nseed = 4\n").unwrap();
    let o = ftlab(&["mc", "--config", &file, "--eps-store", "0.003", "--dump-config", &a]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let first = fs::read_to_string(&a).unwrap();
    assert!(first.contains("eps_store = 0.003"), "{first}");
    assert!(first.contains("method = shor"), "{first}");
    assert!(first.contains("eps_gate.cnot = 0.001"), "{first}");
    let o = ftlab(&["mc", "--config", &a, "--dump-config", &b]);
    assert_eq!(code(&o), 0);
    assert_eq!(first, fs::read_to_string(&b).unwrap());
}

#[test]
fn json_summary_echoes_the_effective_config() {
    let dir = tempfile::tempdir().unwrap();
    let j = path(&dir, "out.json");
    let o = ftlab(&["mc", "--trials", "200", "--seed", "9", "--eps-store", "0.01", "--json", &j]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&fs::read_to_string(&j).unwrap()).unwrap();
    assert_eq!(v["subcommand"], "mc");
    assert_eq!(v["config"]["eps_store"], "0.01");
    assert_eq!(v["config"]["seed"], "9");
    assert_eq!(v["digest"].as_str().unwrap().len(), 64);
    assert_eq!(v["results"][0]["trials"], 200);
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, ["subcommand", "config", "digest", "results"]);
}

fn csv_with_workers(dir: &tempfile::TempDir, args: &[&str], workers: usize) -> Vec<u8> {
    let out = path(dir, &format!("w{workers}.csv"));
    let w = workers.to_string();
    let mut full = vec!["--workers", &w];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--csv", &out]);
    let o = ftlab(&full);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    fs::read(Path::new(&out)).unwrap()
}

#[test]
fn mc_csv_is_identical_for_any_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["mc", "--seed", "12", "--trials", "4000", "--grid", "0.001,0.003,0.01", "--eps-gate", "0.0005"];
    let one = csv_with_workers(&dir, &args, 1);
    assert!(String::from_utf8_lossy(&one).lines().count() == 4);
    for w in [2, 3, 8] {
        assert_eq!(one, csv_with_workers(&dir, &args, w), "workers = {w}");
    }
}

#[test]
fn threshold_csv_is_identical_for_any_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "threshold", "--seed", "5", "--lo", "0.0003", "--hi", "0.03", "--min-trials", "500", "--max-trials", "2000",
        "--rel-tol", "1.0",
    ];
    let one = csv_with_workers(&dir, &args, 1);
    assert_eq!(one, csv_with_workers(&dir, &args, 4));
}

#[test]
fn every_subcommand_has_help() {
    for sub in [
        "code-info",
        "encode",
        "syndrome-demo",
        "recover-demo",
        "mc",
        "threshold",
        "flow",
        "tradeoff",
        "resources",
        "toffoli-verify",
        "fluxon-demo",
    ] {
        let o = ftlab(&[sub, "--help"]);
        assert_eq!(code(&o), 0, "{sub}");
        let first = stdout(&o).lines().next().unwrap_or_default().to_string();
        assert!(first.contains(':'), "{sub}: {first}");
    }
}

#[test]
fn demos_verify() {
    assert_eq!(code(&ftlab(&["code-info", "--code", "five-qubit"])), 0);
    assert_eq!(code(&ftlab(&["recover-demo", "--seed", "2", "--method", "shor", "--error", "IIIIXII"])), 0);
    assert_eq!(code(&ftlab(&["recover-demo", "--seed", "2", "--basis", "plus", "--error", "ZIIIIII"])), 0);
    assert_eq!(code(&ftlab(&["toffoli-verify", "--seed", "1", "--random", "4"])), 0);
    let o = ftlab(&["fluxon-demo"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("(125)"));
}

#[test]
fn encode_emits_parseable_circuits() {
    let o = ftlab(&["encode", "--circuit", "steane-round"]);
    assert_eq!(code(&o), 0);
    let c = ftlab::circuit::Circuit::from_text(&stdout(&o)).unwrap();
    assert_eq!(c.to_text(), stdout(&o));
}
