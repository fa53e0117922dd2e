//! End-to-end checks of the quadspec binary: exit codes, determinism, and
//! agreement between the output formats.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_quadspec"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn quadspec")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no exit code (signal?)")
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["--version"])), 0);
    assert_eq!(code(&run(&["spectrum", "--help"])), 0);
}

#[test]
fn usage_errors_exit_64() {
    // No subcommand, unknown potential, conflicting parameter forms,
    // and a zero-sample request are all usage errors.
    assert_eq!(code(&run(&[])), 64);
    assert_eq!(code(&run(&["spectrum", "--potential", "v"])), 64);
    assert_eq!(
        code(&run(&[
            "spectrum",
            "--potential",
            "i",
            "--mu1",
            "0.75",
            "--k1",
            "1.0",
        ])),
        64
    );
    assert_eq!(
        code(&run(&[
            "verify-classical",
            "--potential",
            "i",
            "--samples",
            "0",
        ])),
        64
    );
}

#[test]
fn spectrum_known_values() {
    let out = run(&[
        "spectrum",
        "--potential",
        "i",
        "--mu1",
        "0.75",
        "--mu2",
        "0.75",
        "--p-max",
        "2",
        "--branches",
        "++",
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(v["schema"], "quadspec/1");
    assert_eq!(v["command"], "spectrum");
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    for (p, row) in rows.iter().enumerate() {
        let want = 4.0 + 2.0 * p as f64;
        assert!((row["e"].as_f64().unwrap() - want).abs() <= 1e-9);
        assert!(row["matrix_residual"].as_f64().unwrap() <= 1e-9);
    }
}

#[test]
fn spectrum_json_is_deterministic() {
    let args = [
        "spectrum",
        "--potential",
        "iii",
        "--k1",
        "0.6",
        "--k2",
        "0.7",
        "--p-max",
        "3",
        "--branches",
        "++,+-,-+",
        "--format",
        "json",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout, "same invocation must be byte-identical");
}

#[test]
fn csv_and_json_agree_to_17_digits() {
    let base = [
        "spectrum",
        "--potential",
        "iv",
        "--lambda",
        "2",
        "--nu2",
        "2",
        "--p-max",
        "1",
    ];
    let json = run(&[&base[..], &["--format", "json"]].concat());
    let csv = run(&[&base[..], &["--format", "csv"]].concat());
    assert_eq!(code(&json), 0);
    assert_eq!(code(&csv), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&json)).unwrap();
    let rows = v["rows"].as_array().unwrap();
    let csv_text = stdout_of(&csv);
    let mut lines = csv_text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "p,branch,e,u,eps,multiple_roots,phi0_residual,phi_p1_residual,matrix_residual"
    );
    let data: Vec<&str> = lines.collect();
    assert_eq!(data.len(), rows.len());
    for (line, row) in data.iter().zip(rows) {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f[0].parse::<u64>().unwrap(), row["p"].as_u64().unwrap());
        assert_eq!(f[1], row["branch"].as_str().unwrap());
        // 17 significant digits round-trip f64 exactly.
        assert_eq!(f[2].parse::<f64>().unwrap(), row["e"].as_f64().unwrap());
        assert_eq!(f[3].parse::<f64>().unwrap(), row["u"].as_f64().unwrap());
        assert_eq!(
            f[8].parse::<f64>().unwrap(),
            row["matrix_residual"].as_f64().unwrap()
        );
    }
}

#[test]
fn verify_rep_passes_and_perturbation_fails() {
    let base = [
        "verify-rep",
        "--potential",
        "ii",
        "--k",
        "0.7",
        "--p-max",
        "4",
    ];
    let ok = run(&base);
    assert_eq!(code(&ok), 0, "stdout: {}", stdout_of(&ok));
    let bad = run(&[&base[..], &["--perturb-e", "1e-3"]].concat());
    assert_eq!(code(&bad), 3, "perturbed energy must fail verification");
}

#[test]
fn verify_classical_seed_fallback() {
    let args = ["verify-classical", "--potential", "i", "--samples", "20"];
    let flagged = run(&[&args[..], &["--seed", "7"]].concat());
    assert_eq!(code(&flagged), 0);
    let env = bin()
        .args(args)
        .env("QUADSPEC_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(code(&env), 0);
    assert_eq!(
        flagged.stdout, env.stdout,
        "--seed and QUADSPEC_SEED must agree"
    );
}

#[test]
fn solve_custom_algebra_matches_catalog() {
    // The catalog's own quantum constants, fed back through --algebra,
    // must produce the same solutions as --potential.
    let cat = run(&["catalog", "--potential", "i", "--k1", "0.6", "--k2", "0.7"]);
    assert_eq!(code(&cat), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&cat)).unwrap();
    let algebra = &v["potentials"][0]["quantum"];
    let dir = std::env::temp_dir().join("quadspec-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("algebra-i.json");
    std::fs::write(&path, serde_json::to_string(algebra).unwrap()).unwrap();

    let the_box = [
        "--p", "0", "--u-min", "0.1", "--u-max", "2", "--e-min", "0.5", "--e-max", "6",
    ];
    let from_file = run(&[
        &["solve", "--algebra", path.to_str().unwrap()],
        &the_box[..],
    ]
    .concat());
    let from_catalog = run(&[
        &[
            "solve",
            "--potential",
            "i",
            "--k1",
            "0.6",
            "--k2",
            "0.7",
        ],
        &the_box[..],
    ]
    .concat());
    assert_eq!(code(&from_file), 0, "stderr: {:?}", from_file.stderr);
    assert_eq!(code(&from_catalog), 0);
    let a: serde_json::Value = serde_json::from_str(&stdout_of(&from_file)).unwrap();
    let b: serde_json::Value = serde_json::from_str(&stdout_of(&from_catalog)).unwrap();
    assert_eq!(a["solutions"], b["solutions"]);
    let n = a["solutions"].as_array().unwrap().len();
    assert_eq!(n, 4, "four roots of potential i in this box at p = 0");
}

#[test]
fn malformed_algebra_file_exits_65() {
    let dir = std::env::temp_dir().join("quadspec-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("broken.json");
    std::fs::write(&path, "{ not json").unwrap();
    let out = run(&["solve", "--algebra", path.to_str().unwrap()]);
    assert_eq!(code(&out), 65);
    // A missing file is also a data error.
    let missing = dir.join("does-not-exist.json");
    assert!(!Path::new(&missing).exists());
    let out = run(&["solve", "--algebra", missing.to_str().unwrap()]);
    assert_eq!(code(&out), 65);
}

#[test]
fn undefined_case_exits_partial() {
    // gamma = 0 with epsilon(E) <= 0 on the whole box: no parafermionic
    // realization exists there, reported as a partial result (exit 2).
    let dir = std::env::temp_dir().join("quadspec-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("undefined.json");
    std::fs::write(
        &path,
        r#"{"flavor":"quantum","hbar":1.0,"alpha":0.0,"gamma":0.0,"a":0.0,
           "delta":[],"epsilon":[-1.0],"zeta":[1.0],"d":[],"z":[0.0,1.0],
           "casimir":[1.0]}"#,
    )
    .unwrap();
    let out = run(&[
        "solve",
        "--algebra",
        path.to_str().unwrap(),
        "--u-min",
        "0",
        "--u-max",
        "1",
        "--e-min",
        "0",
        "--e-max",
        "1",
    ]);
    assert_eq!(code(&out), 2, "stderr: {:?}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn output_flag_writes_file() {
    let dir = std::env::temp_dir().join("quadspec-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("spectrum.json");
    let out = run(&[
        "spectrum",
        "--potential",
        "ii",
        "--k",
        "0.7",
        "--p-max",
        "1",
        "--format",
        "json",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&path).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["schema"], "quadspec/1");
    // two branches (+, -) at p = 0 and p = 1
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);
}

#[test]
fn inadmissible_branch_is_skipped_with_partial_exit() {
    // k1 = 1.2 makes the (-,.) branches violate the admissibility bound;
    // the run still reports the good branches but exits 2.
    let out = run(&[
        "spectrum",
        "--potential",
        "i",
        "--k1",
        "1.2",
        "--k2",
        "0.7",
        "--p-max",
        "1",
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 2);
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert!(!v["rows"].as_array().unwrap().is_empty());
    assert!(!v["skipped"].as_array().unwrap().is_empty());
}
