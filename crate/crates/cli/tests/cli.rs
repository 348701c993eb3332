use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qroofline"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout)
        .unwrap_or_else(|e| panic!("bad JSON ({e}): {}", String::from_utf8_lossy(&o.stdout)))
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn metrics_adder() {
    let o = run(&["metrics", data("adder_9.qasm").to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["metrics"]["n1"], 70);
    assert_eq!(v["metrics"]["n2"], 49);
    assert_eq!(v["metrics"]["width"], 9);
    for key in ["m", "depth", "p1", "p2"] {
        assert!(v["metrics"].get(key).is_some(), "{key}");
    }
    assert_eq!(v["manifest"]["command"], "metrics");
    assert_eq!(v["manifest"]["tool_version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn metrics_empty_and_malformed() {
    let o = run(&[
        "metrics",
        data("empty.qasm").to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().nth(1).unwrap(), "2,0,0,0,0,0,0");

    let o = run(&["metrics", data("malformed.qasm").to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 4"));
}

#[test]
fn fidelity_counts_only() {
    let o = run(&[
        "fidelity", "--counts", "0,10", "--f2", "0.99", "--model", "digital",
    ]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let f = v["estimate"]["value"].as_f64().unwrap();
    assert!((f - 0.99f64.powi(10)).abs() < 1e-15);
    assert_eq!(v["inputs_echo"]["f1"], 1.0);
}

#[test]
fn fidelity_echoes_machine() {
    let o = run(&[
        "fidelity",
        "--counts",
        "70,49",
        "--machine",
        "Quantinuum H2",
    ]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["inputs_echo"]["gate_2q"]["avg_fidelity"], 0.998);
    assert_eq!(v["inputs_echo"]["machine"], "Quantinuum H2");
}

#[test]
fn fidelity_errors() {
    let o = run(&[
        "fidelity",
        "--counts",
        "70,49",
        "--machine",
        "Quantinuum H2",
        "--model",
        "coupling",
    ]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("coupling_error"));

    let o = run(&["fidelity", "--counts", "1,1", "--machine", "Nonesuch 9000"]);
    assert_eq!(code(&o), 2);

    let o = run(&["fidelity", "--counts", "1,1", "--model", "cyclic"]);
    assert_eq!(code(&o), 2);

    let o = run(&["fidelity"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn fidelity_cyclic_from_circuit() {
    let o = run(&[
        "fidelity",
        data("bell.qasm").to_str().unwrap(),
        "--machine",
        "falcon",
        "--model",
        "cyclic",
    ]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["estimate"]["model"], "cyclic");
    let f = v["estimate"]["value"].as_f64().unwrap();
    assert!(f > 0.98 && f < 1.0, "{f}");
}

#[test]
fn compare_adder_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("grid.csv");
    let thr = dir.path().join("threshold.json");
    let o = run(&[
        "compare",
        "--a-counts",
        "70,49",
        "--a-machine",
        "IBM Falcon",
        "--b-counts",
        "91,66",
        "--b-machine",
        "Google Sycamore",
        "--b-gate",
        "SYC",
        "--out",
        grid.to_str().unwrap(),
        "--threshold-out",
        thr.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&grid).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "x,y,f2A,f2B,label,domain_flag");
    let labels: Vec<&str> = lines.map(|l| l.split(',').nth(4).unwrap()).collect();
    assert_eq!(labels.len(), 200 * 200);
    for l in ["always_a", "always_b", "one_qubit_dependent"] {
        assert!(labels.contains(&l), "{l}");
    }
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&thr).unwrap()).unwrap();
    let f = v["threshold"]["value"].as_f64().unwrap();
    assert!((f - 0.9968).abs() < 0.002, "{f}");
    assert_eq!(v["threshold"]["status"], "solved");
}

#[test]
fn compare_single_cell_and_json() {
    let o = run(&[
        "compare",
        "--a-counts",
        "10,10",
        "--b-counts",
        "10,10",
        "--grid",
        "1x1",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().count(), 2);

    let o = run(&[
        "compare",
        "--a-counts",
        "10,10",
        "--b-counts",
        "10,12",
        "--grid",
        "3x4",
        "--format",
        "json",
    ]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["grid"]["cells"].as_array().unwrap().len(), 12);
    assert_eq!(v["threshold"]["kind"], "two_qubit");
    assert_eq!(
        v["manifest"]["parameters"]["command"]["compare"]["grid"],
        "3x4"
    );
}

#[test]
fn compare_records() {
    let o = run(&[
        "compare",
        "--records",
        data("compiler_counts.csv").to_str().unwrap(),
        "--a-record",
        "mul_10,cz,a2a",
        "--b-record",
        "mul_10,syc,mesh",
        "--grid",
        "5x5",
        "--format",
        "json",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["grid"]["config_echo"]["metrics_b"]["n2"], 139);

    let o = run(&[
        "compare",
        "--records",
        data("compiler_counts.csv").to_str().unwrap(),
        "--a-record",
        "mul_10,xx,a2a",
        "--b-counts",
        "1,1",
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn threshold_one_qubit_flags() {
    let o = run(&[
        "threshold",
        "--kind",
        "one_qubit",
        "--a-counts",
        "70,49",
        "--a-machine",
        "IBM Falcon",
        "--b-counts",
        "91,66",
        "--b-machine",
        "Google Sycamore",
        "--b-gate",
        "SYC",
    ]);
    let v = json(&o);
    assert_eq!(v["threshold"]["kind"], "one_qubit");
    let flagged = v["threshold"]["status"] != "solved";
    assert_eq!(code(&o), if flagged { 3 } else { 0 });
}

#[test]
fn threshold_ratio_pairs() {
    let o = run(&[
        "threshold",
        "--kind",
        "ratio",
        "--a-counts",
        "0,1000",
        "--a-machine",
        "IBM Falcon",
        "--b-machine",
        "IBM Eagle",
    ]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let x = v["threshold"]["value"].as_f64().unwrap();
    assert!((x - 1.46).abs() < 0.2, "{x}");
    assert_eq!(v["threshold"]["assumptions"]["inner_monotone"], true);

    let o = run(&[
        "threshold",
        "--kind",
        "ratio",
        "--a-counts",
        "0,1000",
        "--a-machine",
        "sycamore",
        "--b-machine",
        "h2",
    ]);
    assert_eq!(code(&o), 3);
    let v = json(&o);
    assert_eq!(v["threshold"]["status"], "no_window");
    assert_eq!(v["threshold"]["value"], 1.0);
}

#[test]
fn threshold_usage_errors() {
    let o = run(&["threshold", "--kind", "sideways"]);
    assert_eq!(code(&o), 1);
    let o = run(&["threshold", "--kind", "two_qubit", "--a-counts", "1,1"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn weyl_bell_and_identity() {
    let o = run(&["weyl", data("bell.qasm").to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "block_id,qubits,c1,c2,c3");
    assert_eq!(rows.len(), 2);
    let f: Vec<f64> = rows[1]
        .split(',')
        .skip(2)
        .map(|x| x.parse().unwrap())
        .collect();
    assert!(
        (f[0] - 0.5).abs() < 1e-9 && f[1].abs() < 1e-9 && f[2].abs() < 1e-9,
        "{f:?}"
    );

    let o = run(&["weyl", data("identity.qasm").to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    for row in stdout(&o).lines().skip(1) {
        assert!(row.ends_with(",0,0,0"), "{row}");
    }
}

#[test]
fn weyl_histogram() {
    let o = run(&[
        "weyl",
        data("hubbard_4.qasm").to_str().unwrap(),
        "--blocks",
        "3",
    ]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert_eq!(text.lines().next().unwrap(), "two_qubit_gates,blocks");
    let total: usize = text
        .lines()
        .skip(1)
        .map(|l| {
            let (k, n) = l.split_once(',').unwrap();
            k.parse::<usize>().unwrap() * n.parse::<usize>().unwrap()
        })
        .sum();
    assert_eq!(total, 64);

    let o = run(&[
        "weyl",
        data("bell.qasm").to_str().unwrap(),
        "--format",
        "json",
    ]);
    let v = json(&o);
    assert!(v["convention"]
        .as_str()
        .unwrap()
        .contains("most significant"));

    let o = run(&["weyl", data("bell.qasm").to_str().unwrap(), "--blocks", "4"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn validate_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = |p: &PathBuf| {
        vec![
            "validate".to_string(),
            "--cnots".into(),
            "5:15:5".into(),
            "--trajectories".into(),
            "200".into(),
            "--seed".into(),
            "11".into(),
            "--out".into(),
            p.to_str().unwrap().into(),
        ]
    };
    let args_a = args(&a);
    let args_b = args(&b);
    assert_eq!(
        code(&run(&args_a.iter().map(String::as_str).collect::<Vec<_>>())),
        0
    );
    assert_eq!(
        code(&run(&args_b.iter().map(String::as_str).collect::<Vec<_>>())),
        0
    );
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let text = String::from_utf8(ta).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "n_cnot,depth,model_f,mc_f,stderr,trajectories,seed"
    );
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn validate_width_cap() {
    let o = run(&["validate", "--width", "13"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("cap"));
}

#[test]
fn manifest_reproduces_output() {
    let o = run(&[
        "fidelity", "--counts", "3,4", "--f1", "0.999", "--f2", "0.99",
    ]);
    let v = json(&o);
    let p = &v["manifest"]["parameters"]["command"]["fidelity"];
    let rerun = run(&[
        "fidelity",
        "--counts",
        p["counts"].as_str().unwrap(),
        "--f1",
        &p["f1"].to_string(),
        "--f2",
        &p["f2"].to_string(),
    ]);
    assert_eq!(o.stdout, rerun.stdout);
}

#[test]
fn machines_list_and_datasheet() {
    let o = run(&["machines", "list"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 9);
    assert!(text.contains("Quantinuum H2,trapped ion,32,all_to_all,U3=0.99997;ZZ=0.998"));

    let dir = tempfile::tempdir().unwrap();
    let sheet = dir.path().join("m.json");
    std::fs::write(
        &sheet,
        r#"{"machines":[{"name":"Toy","technology":"test","qubit_count":2,"topology":{"kind":"all_to_all"},
        "gates":[{"name":"U3","arity":1,"avg_fidelity":0.999,"coupling_error":0.0001},{"name":"CZ","arity":2,"avg_fidelity":0.98,"coupling_error":0.001}]}]}"#,
    )
    .unwrap();
    let s = sheet.to_str().unwrap();
    let o = run(&["--datasheet", s, "machines", "list", "--format", "json"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["machines"][0]["name"], "Toy");

    let o = run(&[
        "--datasheet",
        s,
        "fidelity",
        "--counts",
        "2,3",
        "--machine",
        "toy",
        "--model",
        "coupling",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    std::fs::write(&sheet, r#"{"machines":[{"name":"Bad","technology":"t","qubit_count":2,"topology":{"kind":"all_to_all"},"gates":[{"name":"U3","arity":1,"avg_fidelity":1.5}]}]}"#).unwrap();
    let o = run(&["--datasheet", s, "machines", "list"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("/machines/0/gates/0/avg_fidelity"));
}

#[test]
fn usage_exit_codes() {
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["--version"])), 0);
    assert_eq!(
        code(&run(&[
            "compare",
            "--a-counts",
            "1,1",
            "--b-counts",
            "1,1",
            "--grid",
            "0x3"
        ])),
        1
    );
}
