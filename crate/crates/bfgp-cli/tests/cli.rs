//! End-to-end tests of the `bfgp` binary: every subcommand, the exit-code
//! contract, and byte-level determinism of generated artifacts.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use bfgp::DomainId;

fn bfgp_bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bfgp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut entries: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap())
        })
        .collect();
    entries.sort();
    entries
}

#[test]
fn gen_is_deterministic_per_seed() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = bfgp_bin(&[
            "gen",
            "--domain",
            "sorting",
            "--count",
            "3",
            "--sizes",
            "4..6",
            "--seed",
            "7",
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
    }
    assert_eq!(dir_bytes(a.path()), dir_bytes(b.path()));

    let c = tempfile::tempdir().unwrap();
    let out = bfgp_bin(&[
        "gen", "--domain", "sorting", "--count", "3", "--sizes", "4..6", "--seed", "8", "--out",
        c.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert_ne!(dir_bytes(a.path()), dir_bytes(c.path()), "seed must matter");
}

#[test]
fn gen_writes_the_requested_number_of_instances() {
    let dir = tempfile::tempdir().unwrap();
    let out = bfgp_bin(&[
        "gen",
        "--domain",
        "gripper",
        "--count",
        "1000",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let inst_files = fs::read_dir(dir.path())
        .unwrap()
        .filter(|e| {
            e.as_ref().unwrap().file_name().to_string_lossy().ends_with(".inst")
        })
        .count();
    assert_eq!(inst_files, 1000);
    assert!(dir.path().join("manifest.json").exists());
}

#[test]
fn gen_rejects_sizes_below_the_domain_minimum() {
    let dir = tempfile::tempdir().unwrap();
    let out = bfgp_bin(&[
        "gen",
        "--domain",
        "fibonacci",
        "--count",
        "1",
        "--sizes",
        "1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2, "undersized instances are a usage error");
}

#[test]
fn synth_solves_tsum_and_writes_verifiable_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = bfgp_bin(&[
        "synth",
        "--domain",
        "tsum",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    // The solution file must parse back to a program that renders the same
    // bytes (the format is its own round trip).
    let text = fs::read_to_string(dir.path().join("solution.txt")).unwrap();
    let actions = DomainId::Tsum.actions();
    let program = bfgp::parse_program(&text, &actions).unwrap();
    assert_eq!(program.to_text(&actions), text);

    // The manifest's recorded hash matches the bytes on disk.
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["solved"], serde_json::Value::Bool(true));
    let recorded = manifest["outputs"]["solution.txt"].as_str().unwrap();
    use sha2::Digest;
    let actual: String = sha2::Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect();
    assert_eq!(recorded, actual);

    let stats = fs::read_to_string(dir.path().join("stats.csv")).unwrap();
    let mut lines = stats.lines();
    assert_eq!(
        lines.next().unwrap(),
        "domain,n,pointers,fns,time_secs,expanded,evaluated,peak_open"
    );
    let row = lines.next().unwrap();
    assert!(row.starts_with("tsum,5,2,h5+f1,"), "row: {row}");
}

#[test]
fn synth_reports_unsolvable_lengths_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = bfgp_bin(&[
        "synth",
        "--domain",
        "tsum",
        "--lines",
        "2",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
    assert!(!dir.path().join("solution.txt").exists());
    assert!(dir.path().join("manifest.json").exists(), "manifest records the failed run");
}

#[test]
fn unknown_domains_are_usage_errors() {
    let out = bfgp_bin(&["synth", "--domain", "hanoi"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("hanoi"));
}

#[test]
fn synth_checks_the_declared_pointer_count() {
    let out = bfgp_bin(&["synth", "--domain", "tsum", "--pointers", "3"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("2 pointers"));
}

#[test]
fn validate_passes_the_reverse_reference_program() {
    let dir = tempfile::tempdir().unwrap();
    let program_path = dir.path().join("reverse.txt");
    fs::write(&program_path, DomainId::Reverse.reference_text()).unwrap();
    let out = bfgp_bin(&[
        "validate",
        "--program",
        program_path.to_str().unwrap(),
        "--domain",
        "reverse",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = fs::read_to_string(dir.path().join("validation.csv")).unwrap();
    // Header plus one row per desk-set instance, all solved.
    assert_eq!(csv.lines().count(), 51);
    assert_eq!(csv.lines().skip(1).filter(|l| l.contains(",solved,")).count(), 50);
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("validation.json")).unwrap())
            .unwrap();
    assert_eq!(json["instances"], serde_json::json!(50));
    assert_eq!(json["solved"], serde_json::json!(50));
}

#[test]
fn validate_flags_looping_programs_as_infinite() {
    let dir = tempfile::tempdir().unwrap();
    // After line 0 the machine state never changes, so every further
    // iteration revisits it: i is already at tail, and the loop always jumps.
    let program_path = dir.path().join("loop.txt");
    fs::write(&program_path, "0. set(i,tail)\n1. goto(0,!(yz&!yc))\n2. end\n").unwrap();
    let out = bfgp_bin(&[
        "validate",
        "--program",
        program_path.to_str().unwrap(),
        "--domain",
        "reverse",
        "--detect-infinite",
        "--max-steps",
        "5000",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
    let csv = fs::read_to_string(dir.path().join("validation.csv")).unwrap();
    assert_eq!(csv.lines().skip(1).filter(|l| l.contains(",infinite,")).count(), 50);
    assert!(stderr(&out).contains("reverse-"), "failing labels are listed");
}

#[test]
fn malformed_programs_are_rejected_with_a_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let program_path = dir.path().join("truncated.txt");
    fs::write(&program_path, "0. inc(a)\n1. dec(*a)\n").unwrap();
    let out = bfgp_bin(&[
        "validate",
        "--program",
        program_path.to_str().unwrap(),
        "--domain",
        "tsum",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("line"), "stderr: {}", stderr(&out));
}

#[test]
fn encode_prints_the_documented_bit_width() {
    let dir = tempfile::tempdir().unwrap();
    let program_path = dir.path().join("tsum.txt");
    fs::write(&program_path, DomainId::Tsum.reference_text()).unwrap();
    let out = bfgp_bin(&[
        "encode",
        "--program",
        program_path.to_str().unwrap(),
        "--domain",
        "tsum",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let stdout = String::from_utf8_lossy(&out.stdout).into_owned();
    // 5 lines over 14 actions: (5-1) * (14 + 3 + 4) bits.
    assert!(stdout.contains("bits: 84"), "stdout: {stdout}");
    assert!(stdout.contains("round-trip: ok"));
    let bit_line = stdout.lines().find(|l| l.chars().all(|c| c == '0' || c == '1') && !l.is_empty());
    assert_eq!(bit_line.map(|l| l.len()), Some(84));
}

#[test]
fn synth_accepts_generated_problem_directories() {
    let gen_dir = tempfile::tempdir().unwrap();
    let out = bfgp_bin(&[
        "gen",
        "--domain",
        "tsum",
        "--count",
        "4",
        "--sizes",
        "3..6",
        "--seed",
        "11",
        "--out",
        gen_dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let run_dir = tempfile::tempdir().unwrap();
    let out = bfgp_bin(&[
        "synth",
        "--problem",
        gen_dir.path().to_str().unwrap(),
        "--out",
        run_dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let stats = fs::read_to_string(run_dir.path().join("stats.csv")).unwrap();
    assert!(stats.lines().nth(1).unwrap().starts_with("tsum,"));

    // The same program must validate cleanly against the directory it was
    // trained on.
    let out = bfgp_bin(&[
        "validate",
        "--program",
        run_dir.path().join("solution.txt").to_str().unwrap(),
        "--problem",
        gen_dir.path().to_str().unwrap(),
        "--out",
        run_dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
}
