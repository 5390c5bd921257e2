//! End-to-end runs of the `erdos967` binary: argument validation, exit
//! codes, and output files.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_erdos967"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn tmpdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("erdos967-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn construct_writes_files_and_verify_accepts_them() {
    let dir = tmpdir("roundtrip");
    let set = dir.join("s.json");
    let report = dir.join("r.json");
    let out = run(&[
        "construct",
        "--t",
        "1",
        "--lambda",
        "-1,0",
        "--epsilon",
        "1e-9",
        "--out",
        set.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(
        code(&out),
        0,
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(set.exists() && report.exists());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("certified:"), "{stdout}");

    let v = run(&[
        "verify",
        "--input",
        set.to_str().unwrap(),
        "--lambda",
        "-1,0",
    ]);
    assert_eq!(
        code(&v),
        0,
        "stdout: {}",
        String::from_utf8_lossy(&v.stdout)
    );

    // identical invocation produces byte-identical output
    let set2 = dir.join("s2.json");
    let out2 = run(&[
        "construct",
        "--t",
        "1",
        "--lambda",
        "-1,0",
        "--epsilon",
        "1e-9",
        "--out",
        set2.to_str().unwrap(),
    ]);
    assert_eq!(code(&out2), 0);
    assert_eq!(
        std::fs::read(&set).unwrap(),
        std::fs::read(&set2).unwrap(),
        "two identical runs must emit byte-identical block sets"
    );
}

#[test]
fn construct_rejects_t_zero_with_exit_one() {
    let out = run(&[
        "construct",
        "--t",
        "0",
        "--lambda",
        "-1,0",
        "--out",
        "/dev/null",
    ]);
    assert_eq!(code(&out), 1);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("t must be nonzero"), "{stderr}");
}

#[test]
fn construct_zero_lambda_emits_empty_set() {
    let dir = tmpdir("zero");
    let set = dir.join("empty.json");
    let out = run(&[
        "construct",
        "--t",
        "1",
        "--lambda",
        "0,0",
        "--out",
        set.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&set).unwrap();
    assert!(text.contains("\"blocks\": []"), "{text}");
}

#[test]
fn construct_refuses_tiny_t_without_override() {
    let out = run(&[
        "construct",
        "--t",
        "0.003",
        "--lambda",
        "-1,0",
        "--out",
        "/dev/null",
    ]);
    assert_eq!(code(&out), 1);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("--allow-huge"), "{stderr}");
}

#[test]
fn non_convergence_exits_three() {
    let dir = tmpdir("nonconv");
    let set = dir.join("s.json");
    let out = run(&[
        "construct",
        "--t",
        "1",
        "--lambda",
        "-1,0",
        "--max-blocks",
        "2",
        "--out",
        set.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 3);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("NOT converged"), "{stderr}");
}

#[test]
fn verify_fails_on_tampered_and_malformed_files() {
    let dir = tmpdir("tamper");
    let set = dir.join("s.json");
    let out = run(&[
        "construct",
        "--t",
        "1",
        "--lambda",
        "-1,0",
        "--out",
        set.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);

    // move the first block start up by one
    let text = std::fs::read_to_string(&set).unwrap();
    let start_line = text
        .lines()
        .find(|l| l.contains("\"start\""))
        .unwrap()
        .trim()
        .to_owned();
    let digits: String = start_line.chars().filter(|c| c.is_ascii_digit()).collect();
    let bumped: u128 = digits.parse::<u128>().unwrap() + 1;
    let tampered_text = text.replacen(&digits, &bumped.to_string(), 1);
    let tampered = dir.join("tampered.json");
    std::fs::write(&tampered, tampered_text).unwrap();
    let v = run(&[
        "verify",
        "--input",
        tampered.to_str().unwrap(),
        "--lambda",
        "-1,0",
    ]);
    assert_eq!(code(&v), 2);
    assert!(String::from_utf8_lossy(&v.stdout).contains("FAIL"));

    let garbage = dir.join("garbage.json");
    std::fs::write(&garbage, "{ not json").unwrap();
    let v = run(&[
        "verify",
        "--input",
        garbage.to_str().unwrap(),
        "--lambda",
        "-1,0",
    ]);
    assert_eq!(code(&v), 2);
}

#[test]
fn scan_flagship_slice_writes_csv_and_report() {
    let dir = tmpdir("scan");
    let csv = dir.join("g.csv");
    let report = dir.join("scan.json");
    let out = run(&[
        "scan",
        "--elements",
        "2,3,5",
        "--t0",
        "0",
        "--t1",
        "10",
        "--step",
        "0.001",
        "--csv",
        csv.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(
        code(&out),
        0,
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv_text = std::fs::read_to_string(&csv).unwrap();
    assert!(csv_text.starts_with("t,re_g,im_g,abs_g\n"));
    assert_eq!(csv_text.lines().count(), 10_002); // header + 10001 grid points
    let rep: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(rep["certified_zero_free"], serde_json::Value::Bool(true));
    // g(0) = 1 + 1/2 + 1/3 + 1/5
    let first = csv_text.lines().nth(1).unwrap();
    assert!(first.starts_with("0,2.033333333333333"), "{first}");
}

#[test]
fn construct_report_carries_the_per_block_schema() {
    let dir = tmpdir("repschema");
    let set = dir.join("s.json");
    let report = dir.join("r.json");
    assert_eq!(
        code(&run(&[
            "construct",
            "--t",
            "1",
            "--lambda",
            "-1,0",
            "--out",
            set.to_str().unwrap(),
            "--report",
            report.to_str().unwrap(),
        ])),
        0
    );
    let rep: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(rep["converged"], serde_json::Value::Bool(true));
    let blocks = rep["blocks"].as_array().unwrap();
    assert!(!blocks.is_empty());
    for key in [
        "k",
        "c_re",
        "c_im",
        "start",
        "len",
        "sum_re",
        "sum_im",
        "sum_err",
        "mass",
        "lemma_margin_1",
        "lemma_margin_2",
    ] {
        assert!(blocks[0].get(key).is_some(), "missing per-block key {key}");
    }
    for key in [
        "residual_abs",
        "err_budget",
        "certified_gap",
        "sum_abs_c",
        "total_mass",
    ] {
        assert!(rep.get(key).is_some(), "missing totals key {key}");
    }
    // starts and lens are decimal strings in the report too
    assert!(blocks[0]["start"].is_string());
    // margins are nonnegative on a healthy run
    for b in blocks {
        assert!(b["lemma_margin_1"].as_f64().unwrap() >= 0.0);
        assert!(b["lemma_margin_2"].as_f64().unwrap() >= 0.0);
    }
}

#[test]
fn scan_empty_set_is_trivially_zero_free() {
    let out = run(&[
        "scan",
        "--elements",
        "",
        "--t0",
        "0",
        "--t1",
        "1",
        "--step",
        "0.01",
    ]);
    assert_eq!(code(&out), 0);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("certified_zero_free = true"), "{stdout}");
}

#[test]
fn scan_reads_elements_from_json_file() {
    let dir = tmpdir("elemsfile");
    let file = dir.join("elems.json");
    std::fs::write(&file, "[2, 3, 5]").unwrap();
    let out = run(&[
        "scan",
        "--elements-file",
        file.to_str().unwrap(),
        "--t0",
        "0",
        "--t1",
        "2",
        "--step",
        "0.01",
    ]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("certified_zero_free = true"));

    std::fs::write(&file, "[2, \"x\"]").unwrap();
    let out = run(&[
        "scan",
        "--elements-file",
        file.to_str().unwrap(),
        "--t0",
        "0",
        "--t1",
        "2",
        "--step",
        "0.01",
    ]);
    assert_eq!(code(&out), 1);
}

#[test]
fn scan_rejects_reversed_interval() {
    let out = run(&[
        "scan",
        "--elements",
        "2,3,5",
        "--t0",
        "5",
        "--t1",
        "1",
        "--step",
        "0.01",
    ]);
    assert_eq!(code(&out), 1);
}

#[test]
fn scan_blocks_source_reads_constructed_set() {
    let dir = tmpdir("scanblocks");
    let set = dir.join("s.json");
    assert_eq!(
        code(&run(&[
            "construct",
            "--t",
            "1",
            "--lambda",
            "-1,0",
            "--out",
            set.to_str().unwrap()
        ])),
        0
    );
    let out = run(&[
        "scan",
        "--blocks",
        set.to_str().unwrap(),
        "--t0",
        "0.9",
        "--t1",
        "1.1",
        "--step",
        "0.001",
    ]);
    assert_eq!(
        code(&out),
        0,
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    // near its own t the constructed series approaches -1, so |g| collapses
    assert!(stdout.contains("min |g| = "), "{stdout}");
}

#[test]
fn scan_strict_flag_flips_exit_on_uncertified() {
    let dir = tmpdir("strict");
    let set = dir.join("deep.json");
    // epsilon below the certification floor so the scan cannot certify
    // around t = 1
    assert_eq!(
        code(&run(&[
            "construct",
            "--t",
            "1",
            "--lambda",
            "-1,0",
            "--epsilon",
            "1e-12",
            "--out",
            set.to_str().unwrap()
        ])),
        0
    );
    let args = [
        "scan",
        "--blocks",
        set.to_str().unwrap(),
        "--t0",
        "0.99609375",
        "--t1",
        "1.00390625",
        "--step",
        "0.00000762939453125",
    ];
    let relaxed = run(&args);
    assert_eq!(
        code(&relaxed),
        0,
        "default semantics: completion is success"
    );
    assert!(String::from_utf8_lossy(&relaxed.stdout).contains("certified_zero_free = false"));
    let mut strict_args = args.to_vec();
    strict_args.push("--strict");
    assert_eq!(code(&run(&strict_args)), 2);
}

#[test]
fn demo967_default_run_and_t_zero_rejection() {
    let dir = tmpdir("demo");
    let set = dir.join("d.json");
    let out = run(&["demo967", "--out", set.to_str().unwrap()]);
    assert_eq!(
        code(&out),
        0,
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(
        stdout.contains("|1 + sum over S| <= epsilon + err"),
        "{stdout}"
    );
    assert!(set.exists());

    let out = run(&["demo967", "--t", "0", "--out", set.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
}

#[test]
fn direct_cap_env_override_is_honoured() {
    let dir = tmpdir("env");
    let a = dir.join("a.json");
    let b = dir.join("b.json");
    // default cap
    let out = bin()
        .args([
            "construct",
            "--t",
            "1",
            "--lambda",
            "-1,0",
            "--out",
            a.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    // tiny cap: every block goes through the Euler-Maclaurin route; the
    // emitted set may differ in late digits but must still verify
    let out = bin()
        .env("ERDOS967_DIRECT_CAP", "100")
        .args([
            "construct",
            "--t",
            "1",
            "--lambda",
            "-1,0",
            "--out",
            b.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = bin()
        .env("ERDOS967_DIRECT_CAP", "100")
        .args(["verify", "--input", b.to_str().unwrap(), "--lambda", "-1,0"])
        .output()
        .unwrap();
    assert_eq!(
        v.status.code(),
        Some(0),
        "stdout: {}",
        String::from_utf8_lossy(&v.stdout)
    );

    let bad = bin()
        .env("ERDOS967_DIRECT_CAP", "not-a-number")
        .args([
            "construct",
            "--t",
            "1",
            "--lambda",
            "-1,0",
            "--out",
            a.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn output_files_reload_through_the_schema() {
    let dir = tmpdir("schema");
    let set_path = dir.join("s.json");
    assert_eq!(
        code(&run(&[
            "construct",
            "--t",
            "-2",
            "--lambda",
            "0.3,0.4",
            "--out",
            set_path.to_str().unwrap()
        ])),
        0
    );
    let set = erdos967::setrep::BlockSet::load(Path::new(set_path.to_str().unwrap())).unwrap();
    assert_eq!(set.t(), -2.0);
    assert!(!set.is_empty());
    // round-trip byte-identity
    assert_eq!(set.to_json(), std::fs::read_to_string(&set_path).unwrap());
}
